//! Differential phase shift keying against the hybrid beam-splitter plus
//! intercept-resend attack. All sifted bits are used, so the sifting
//! parameter is 1 and the receiver runs two detectors.

use crate::detector::DetectorOperatingPoint;
use crate::error::{Error, Result};

use super::{
    check_rep_rate, fiber_transmission, leak_terms, saturation_factor, ChannelParams, DpskConfig,
    RateBreakdown,
};

const N_DETECTORS: u32 = 2;

/// Shrinking factor `τ = γ − e / (N·(1 − 1/(2N)))`, clamped to [0, ∞).
///
/// At e = 0 this is exactly γ.
pub fn tau_dpsk(e: f64, gamma: f64, delay_n: u32) -> f64 {
    let n = f64::from(delay_n.max(1));
    (gamma - e / (n * (1.0 - 1.0 / (2.0 * n)))).max(0.0)
}

/// Evaluate the DPSK secure rate and every intermediate quantity.
pub fn dpsk_breakdown(
    cfg: &DpskConfig,
    det: &DetectorOperatingPoint,
    chan: &ChannelParams,
    nu_hz: f64,
) -> Result<RateBreakdown> {
    check_rep_rate(nu_hz, det)?;
    if !(cfg.mu > 0.0 && cfg.mu.is_finite()) {
        return Err(Error::InvalidProtocol(format!(
            "mean photon number must be finite and positive, got {}",
            cfg.mu
        )));
    }
    if cfg.delay_n < 1 {
        return Err(Error::InvalidProtocol(
            "delay multiplier N must be at least 1".to_string(),
        ));
    }

    // Eve matches her beam splitter to the honest channel so Bob's click
    // statistics are unchanged.
    let eta_bs = det.eta * fiber_transmission(chan, 1);
    let p_signal = cfg.mu * eta_bs;
    if p_signal > 1.0 {
        return Err(Error::SignalProbabilityTooHigh(p_signal));
    }
    let p_dark = 2.0 * det.dark_per_window;
    let p_click = p_signal + p_dark;
    if p_click == 0.0 {
        return Ok(RateBreakdown {
            eta_bs: Some(eta_bs),
            gamma: Some(1.0),
            ..RateBreakdown::zero()
        });
    }

    let e = (0.5 * p_dark + chan.baseline_error * p_signal) / p_click;
    // Fraction of bits on which the beam-splitter attack yields nothing.
    // With a quantum memory Eve waits for Bob's announcement; mu >= 1/2
    // then hands her everything (gamma <= 0) and no key survives.
    let gamma = if cfg.eve_has_memory {
        1.0 - 2.0 * cfg.mu + 2.0 * p_signal
    } else {
        let n = f64::from(cfg.delay_n);
        1.0 - cfg.mu / n + p_signal / n
    };
    let tau = if gamma > 0.0 {
        tau_dpsk(e, gamma, cfg.delay_n)
    } else {
        0.0
    };
    let (f_e, leak) = leak_terms(e);
    let bracket = (tau + leak).max(0.0);
    let sat = saturation_factor(nu_hz, p_click, det.t_dead_s, N_DETECTORS);
    let rate_bps = nu_hz * p_click * bracket * sat;

    Ok(RateBreakdown {
        p_signal,
        p_dark,
        p_click,
        qber: e,
        beta: None,
        eta_bs: Some(eta_bs),
        gamma: Some(gamma),
        tau,
        f_e,
        leak,
        sat,
        rate_bps,
    })
}

#[cfg(test)]
// Reference constants keep every digit the oracle printed.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lossless_channel_gives_eve_nothing() {
        // eta = 1, L = 0, L_r = 0: eta_BS = 1, so gamma = 1 and tau = 1.
        let det = DetectorOperatingPoint::new(1.0, 0.0, 0.0, 1e9, 50e-9, "unit".into()).unwrap();
        let chan = ChannelParams::new(0.0, 0.0, 0.0, 0.0).unwrap();
        let cfg = DpskConfig {
            mu: 0.2,
            delay_n: 10,
            eve_has_memory: false,
        };
        let b = dpsk_breakdown(&cfg, &det, &chan, 1e9).unwrap();
        assert_eq!(b.eta_bs, Some(1.0));
        assert_relative_eq!(b.gamma.unwrap(), 1.0, max_relative = 1e-15);
        assert_eq!(b.qber, 0.0);
        assert_relative_eq!(b.rate_bps, 0.2 * 1e9 * b.sat, max_relative = 1e-12);
    }

    #[test]
    fn memory_gamma_in_the_lossy_limit() {
        // eta_BS -> 0 with mu = 0.2 and a quantum memory: gamma -> 0.6.
        let det = DetectorOperatingPoint::new(1e-9, 0.0, 1e-9, 1e9, 0.0, "lossy".into()).unwrap();
        let chan = ChannelParams::new(0.2, 400.0, 1.0, 0.01).unwrap();
        let cfg = DpskConfig {
            mu: 0.2,
            delay_n: 1,
            eve_has_memory: true,
        };
        let b = dpsk_breakdown(&cfg, &det, &chan, 1e9).unwrap();
        assert_relative_eq!(b.gamma.unwrap(), 0.6, max_relative = 1e-9);
    }

    // Frozen from a 40-digit pre-build evaluation at mu = 0.5, N = 100,
    // no memory, upconv-min-nep, alpha = 0.2, L = 200, L_r = 1, b = 0.01,
    // nu = 1 GHz.
    #[test]
    fn reference_point_at_200_km() {
        let det = DetectorOperatingPoint::preset("upconv-min-nep").unwrap();
        let chan = ChannelParams::new(0.2, 200.0, 1.0, 0.01).unwrap();
        let cfg = DpskConfig {
            mu: 0.5,
            delay_n: 100,
            eve_has_memory: false,
        };
        let b = dpsk_breakdown(&cfg, &det, &chan, 1e9).unwrap();
        assert_relative_eq!(b.p_signal, 2.978_730_880_216_055_6e-6, max_relative = 1e-12);
        assert_eq!(b.p_dark, 2.56e-7);
        assert_relative_eq!(b.p_click, 3.234_730_880_216_055_6e-6, max_relative = 1e-12);
        assert_relative_eq!(b.qber, 0.048_779_114_753_318_073, max_relative = 1e-12);
        assert_relative_eq!(
            b.eta_bs.unwrap(),
            5.957_461_760_432_111_3e-6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            b.gamma.unwrap(),
            0.995_000_029_787_308_8,
            max_relative = 1e-12
        );
        assert_relative_eq!(b.tau, 0.994_509_787_427_978_97, max_relative = 1e-12);
        assert_relative_eq!(b.leak, -0.326_177_978_296_457_41, max_relative = 1e-12);
        assert_relative_eq!(b.sat, 0.999_919_134_997_745_17, max_relative = 1e-12);
        assert_relative_eq!(b.rate_bps, 2_161.698_721_319_609_5, max_relative = 1e-11);
    }

    #[test]
    fn memory_with_bright_pulses_yields_no_key() {
        // mu >= 1/2 with a quantum memory: gamma <= 0, flagged in the
        // breakdown, rate exactly zero.
        let det = DetectorOperatingPoint::preset("upconv-min-nep").unwrap();
        let chan = ChannelParams::new(0.2, 100.0, 1.0, 0.01).unwrap();
        let cfg = DpskConfig {
            mu: 0.6,
            delay_n: 1,
            eve_has_memory: true,
        };
        let b = dpsk_breakdown(&cfg, &det, &chan, 1e9).unwrap();
        assert!(b.gamma.unwrap() <= 0.0);
        assert_eq!(b.tau, 0.0);
        assert_eq!(b.rate_bps, 0.0);
    }

    #[test]
    fn tau_equals_gamma_at_zero_error() {
        for (gamma, n) in [(0.3, 1), (0.75, 10), (1.0, 100)] {
            assert_eq!(tau_dpsk(0.0, gamma, n), gamma);
        }
    }

    #[test]
    fn gamma_never_decreases_with_n_without_memory() {
        let det = DetectorOperatingPoint::preset("upconv-min-nep").unwrap();
        let chan = ChannelParams::new(0.2, 120.0, 1.0, 0.01).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for n in [1, 2, 5, 10, 50, 100, 1000] {
            let cfg = DpskConfig {
                mu: 0.3,
                delay_n: n,
                eve_has_memory: false,
            };
            let g = dpsk_breakdown(&cfg, &det, &chan, 1e9)
                .unwrap()
                .gamma
                .unwrap();
            assert!(g >= prev);
            prev = g;
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let det = DetectorOperatingPoint::preset("upconv-min-nep").unwrap();
        let chan = ChannelParams::new(0.2, 100.0, 1.0, 0.01).unwrap();
        let cfg = DpskConfig {
            mu: 0.0,
            delay_n: 1,
            eve_has_memory: false,
        };
        assert!(dpsk_breakdown(&cfg, &det, &chan, 1e9).is_err());
        let cfg = DpskConfig {
            mu: 0.5,
            delay_n: 0,
            eve_has_memory: false,
        };
        assert!(dpsk_breakdown(&cfg, &det, &chan, 1e9).is_err());
    }
}
