//! BB84 with an ideal or Poisson (weak laser pulse) single-photon source.

use crate::detector::DetectorOperatingPoint;
use crate::error::{Error, Result};

use super::{
    check_rep_rate, fiber_transmission, leak_terms, saturation_factor, Bb84Config, Bb84Source,
    ChannelParams, RateBreakdown,
};

/// Bob's passive detection unit uses four detectors.
const N_DETECTORS: u32 = 4;

/// Shrinking factor when Eve holds an ideal quantum memory:
/// `τ = −β·log₂[1/2 + 2(e/β) − 2(e/β)²]`.
///
/// The bracket re-enters (0, 1) spuriously once `e/β ≥ 1/2`, so τ clamps to
/// zero there (average collision probability 1: nothing survives privacy
/// amplification). β ≤ 0 likewise yields 0.
pub fn tau_bb84_memory(e: f64, beta: f64) -> f64 {
    if beta <= 0.0 {
        return 0.0;
    }
    let y = e / beta;
    if y >= 0.5 {
        return 0.0;
    }
    -beta * (0.5 + 2.0 * y - 2.0 * y * y).log2()
}

/// Shrinking factor when Eve must measure immediately:
/// `τ = −(1+β)/2·log₂[1/2 + 4e/(1+β) − 8(e/(1+β))²]`, clamped to zero for
/// `e/(1+β) ≥ 1/4`.
pub fn tau_bb84_no_memory(e: f64, beta: f64) -> f64 {
    if beta <= 0.0 {
        return 0.0;
    }
    let x = e / (1.0 + beta);
    if x >= 0.25 {
        return 0.0;
    }
    -(1.0 + beta) / 2.0 * (0.5 + 4.0 * x - 8.0 * x * x).log2()
}

/// Probability that a Poisson source emits more than one photon:
/// `p_m = 1 − (1+μ)·e^−μ`.
///
/// Evaluated as `−(μ + f + μ·f)` with `f = expm1(−μ)`, which avoids the
/// cancellation of the direct form at the small μ this model optimises to.
pub fn multi_photon_probability(mu: f64) -> f64 {
    let f = (-mu).exp_m1();
    -(mu + f + mu * f)
}

/// Evaluate the BB84 secure rate and every intermediate quantity.
pub fn bb84_breakdown(
    cfg: &Bb84Config,
    det: &DetectorOperatingPoint,
    chan: &ChannelParams,
    nu_hz: f64,
) -> Result<RateBreakdown> {
    check_rep_rate(nu_hz, det)?;
    let mu = match cfg.source {
        Bb84Source::Ideal => 1.0,
        Bb84Source::Poisson { mu } => {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(Error::InvalidProtocol(format!(
                    "mean photon number must be finite and positive, got {mu}"
                )));
            }
            mu
        }
    };

    let t1 = fiber_transmission(chan, 1);
    let p_signal = mu * det.eta * t1;
    if p_signal > 1.0 {
        return Err(Error::SignalProbabilityTooHigh(p_signal));
    }
    let p_dark = 4.0 * det.dark_per_window;
    let p_click = p_signal + p_dark;
    if p_click == 0.0 {
        // Dark-free detector that never fires: no clicks, no key.
        return Ok(RateBreakdown {
            beta: Some(1.0),
            ..RateBreakdown::zero()
        });
    }

    let e = (0.5 * p_dark + chan.baseline_error * p_signal) / p_click;
    let beta = match cfg.source {
        Bb84Source::Ideal => 1.0,
        Bb84Source::Poisson { .. } => (p_click - multi_photon_probability(mu)) / p_click,
    };
    let tau = if cfg.eve_has_memory {
        tau_bb84_memory(e, beta)
    } else {
        tau_bb84_no_memory(e, beta)
    };
    let (f_e, leak) = leak_terms(e);
    let bracket = if beta > 0.0 {
        (tau + leak).max(0.0)
    } else {
        0.0
    };
    let sat = saturation_factor(nu_hz, p_click, det.t_dead_s, N_DETECTORS);
    let rate_bps = 0.5 * nu_hz * p_click * bracket * sat;

    Ok(RateBreakdown {
        p_signal,
        p_dark,
        p_click,
        qber: e,
        beta: Some(beta),
        eta_bs: None,
        gamma: None,
        tau,
        f_e,
        leak,
        sat,
        rate_bps,
    })
}
