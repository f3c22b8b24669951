//! BBM92 with a deterministic or parametric down-conversion pair source,
//! placed halfway between the two parties.

use serde::Serialize;

use crate::detector::DetectorOperatingPoint;
use crate::error::{Error, Result};

use super::{check_rep_rate, fiber_transmission, leak_terms, ChannelParams, RateBreakdown};

/// Shrinking factor `τ = −log₂[1/2 + 2e − 2e²]`, clamped to zero for e ≥ 1/2.
///
/// Identical to the BB84 factor at β = 1: there is no photon-number
/// splitting analogue in BBM92.
pub fn tau_bbm92(e: f64) -> f64 {
    if e >= 0.5 {
        return 0.0;
    }
    -(0.5 + 2.0 * e - 2.0 * e * e).log2()
}

/// One-arm transmission seen by a pair photon, including the detector:
/// `t_L = η·10^−(αL + 2L_r)/20`.
pub fn pair_transmission(det_eta: f64, chan: &ChannelParams) -> f64 {
    det_eta * fiber_transmission(chan, 2).sqrt()
}

/// Coincidence coefficients of the PDC source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdcCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

/// Evaluate c1..c4 for squeeze parameter χ and arm transmission t_L.
pub fn pdc_coefficients(chi: f64, t_l: f64) -> PdcCoefficients {
    let cosh4 = chi.cosh().powi(4);
    let tanh2 = chi.tanh().powi(2);
    let den = 1.0 - tanh2 * (1.0 - t_l) * (1.0 - t_l);
    PdcCoefficients {
        c1: 2.0 * t_l * t_l * tanh2 / (cosh4 * den.powi(4)),
        c2: 1.0 / (cosh4 * den * den),
        c3: 2.0 * t_l * (1.0 - t_l) * tanh2 / (cosh4 * den.powi(3)),
        c4: 4.0 * t_l * t_l * (1.0 - t_l) * (1.0 - t_l) * tanh2 * tanh2 / (cosh4 * den.powi(4)),
    }
}

/// Deterministic pair source: exactly one entangled pair per pulse.
pub fn bbm92_breakdown_deterministic(
    det: &DetectorOperatingPoint,
    chan: &ChannelParams,
    nu_hz: f64,
) -> Result<RateBreakdown> {
    check_rep_rate(nu_hz, det)?;
    let t2 = fiber_transmission(chan, 2);
    let d = det.dark_per_window;
    let p_true = det.eta * det.eta * t2;
    let p_false = 8.0 * d * det.eta * t2.sqrt() + 16.0 * d * d;
    // Each side clicks on its own arm transmission.
    finish(
        p_true,
        p_false,
        pair_transmission(det.eta, chan),
        det,
        chan,
        nu_hz,
    )
}

/// Poissonian (PDC) pair source with squeeze parameter χ ≥ 0.
pub fn bbm92_breakdown_pdc(
    chi: f64,
    det: &DetectorOperatingPoint,
    chan: &ChannelParams,
    nu_hz: f64,
) -> Result<RateBreakdown> {
    check_rep_rate(nu_hz, det)?;
    if !(chi >= 0.0 && chi.is_finite()) {
        return Err(Error::InvalidProtocol(format!(
            "squeeze parameter must be finite and non-negative, got {chi}"
        )));
    }
    let t_l = pair_transmission(det.eta, chan);
    let d = det.dark_per_window;
    let c = pdc_coefficients(chi, t_l);
    let p_true = c.c1;
    let p_false = 16.0 * d * d * c.c2 + 8.0 * d * c.c3 + c.c4;
    // Mean pair emission tanh²χ sets each side's singles load.
    finish(p_true, p_false, t_l * chi.tanh().powi(2), det, chan, nu_hz)
}

fn finish(
    p_true: f64,
    p_false: f64,
    p_side: f64,
    det: &DetectorOperatingPoint,
    chan: &ChannelParams,
    nu_hz: f64,
) -> Result<RateBreakdown> {
    let p_coin = p_true + p_false;
    if p_coin == 0.0 {
        return Ok(RateBreakdown::zero());
    }
    let e = (0.5 * p_false + chan.baseline_error * p_true) / p_coin;
    let tau = tau_bbm92(e);
    let (f_e, leak) = leak_terms(e);
    let bracket = (tau + leak).max(0.0);
    // Detectors saturate on singles, not coincidences; four detectors per
    // party, one saturation factor per party.
    let sat = super::saturation_factor(nu_hz, p_side, det.t_dead_s, 4).powi(2);
    let rate_bps = 0.5 * nu_hz * p_coin * bracket * sat;
    Ok(RateBreakdown {
        p_signal: p_true,
        p_dark: p_false,
        p_click: p_coin,
        qber: e,
        beta: None,
        eta_bs: None,
        gamma: None,
        tau,
        f_e,
        leak,
        sat,
        rate_bps,
    })
}
