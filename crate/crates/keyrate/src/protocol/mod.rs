//! Secure communication rate equations for BB84, BBM92 and DPSK against
//! individual attacks.
//!
//! Each protocol evaluator composes the same pieces: click probabilities
//! from the link budget, the error rate, a privacy-amplification shrinking
//! factor τ, the error-correction leakage `f(e)·[e·log₂e + (1−e)·log₂(1−e)]`
//! and a dead-time saturation factor. Wherever the shrinking factors leave
//! their derivation domain the rate clamps to exactly zero: no secure key,
//! not a fault.

mod bb84;
mod bbm92;
mod dpsk;

pub use bb84::{bb84_breakdown, multi_photon_probability, tau_bb84_memory, tau_bb84_no_memory};
pub use bbm92::{
    bbm92_breakdown_deterministic, bbm92_breakdown_pdc, pair_transmission, pdc_coefficients,
    tau_bbm92, PdcCoefficients,
};
pub use dpsk::{dpsk_breakdown, tau_dpsk};

use serde::Serialize;

use crate::detector::DetectorOperatingPoint;
use crate::error::{Error, Result};

/// Fiber channel and receiver parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    /// Fiber loss coefficient α (dB/km).
    pub alpha_db_km: f64,
    /// Link length L (km). For BBM92 the source sits halfway, so this is
    /// still the total Alice-to-Bob distance.
    pub length_km: f64,
    /// Receiver unit loss L_r (dB), counted once per receiver.
    pub receiver_loss_db: f64,
    /// Baseline system error rate b, indistinguishable from tampering.
    pub baseline_error: f64,
}

impl ChannelParams {
    pub fn new(
        alpha_db_km: f64,
        length_km: f64,
        receiver_loss_db: f64,
        baseline_error: f64,
    ) -> Result<Self> {
        if !(alpha_db_km >= 0.0 && alpha_db_km.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "alpha must be finite and non-negative, got {alpha_db_km}"
            )));
        }
        if !(length_km >= 0.0 && length_km.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "length must be finite and non-negative, got {length_km}"
            )));
        }
        if !(receiver_loss_db >= 0.0 && receiver_loss_db.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "receiver loss must be finite and non-negative, got {receiver_loss_db}"
            )));
        }
        if !(0.0..0.5).contains(&baseline_error) {
            return Err(Error::InvalidChannel(format!(
                "baseline error rate must be in [0, 0.5), got {baseline_error}"
            )));
        }
        Ok(Self {
            alpha_db_km,
            length_km,
            receiver_loss_db,
            baseline_error,
        })
    }

    /// Same channel at a different length.
    pub fn with_length(&self, length_km: f64) -> Self {
        Self { length_km, ..*self }
    }
}

/// BB84 source model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Bb84Source {
    /// Exactly one photon per pulse (μ = 1, no multi-photon emission).
    Ideal,
    /// Weak laser pulses with mean photon number μ.
    Poisson { mu: f64 },
}

/// Entangled-pair source model for BBM92.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Bbm92Source {
    /// Exactly one pair per pulse.
    Deterministic,
    /// Parametric down-conversion source with squeeze parameter χ.
    Pdc { chi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bb84Config {
    pub source: Bb84Source,
    /// Whether Eve holds a quantum memory with unbounded coherence time.
    pub eve_has_memory: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpskConfig {
    /// Mean photon number per pulse.
    pub mu: f64,
    /// Receiver delay multiplier N (delay = N / clock frequency).
    pub delay_n: u32,
    pub eve_has_memory: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Protocol {
    Bb84(Bb84Config),
    Bbm92(Bbm92Source),
    Dpsk(DpskConfig),
}

/// A protocol plus the transmission repetition rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolConfig {
    pub protocol: Protocol,
    /// Repetition rate ν (Hz); must not exceed the detector's ceiling.
    pub nu_hz: f64,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu_hz > 0.0 && self.nu_hz.is_finite()) {
            return Err(Error::InvalidProtocol(format!(
                "repetition rate must be finite and positive, got {}",
                self.nu_hz
            )));
        }
        match self.protocol {
            Protocol::Bb84(Bb84Config { source, .. }) => {
                if let Bb84Source::Poisson { mu } = source {
                    if !(mu > 0.0 && mu.is_finite()) {
                        return Err(Error::InvalidProtocol(format!(
                            "mean photon number must be finite and positive, got {mu}"
                        )));
                    }
                }
            }
            Protocol::Bbm92(source) => {
                if let Bbm92Source::Pdc { chi } = source {
                    if !(chi >= 0.0 && chi.is_finite()) {
                        return Err(Error::InvalidProtocol(format!(
                            "squeeze parameter must be finite and non-negative, got {chi}"
                        )));
                    }
                }
            }
            Protocol::Dpsk(DpskConfig { mu, delay_n, .. }) => {
                if !(mu > 0.0 && mu.is_finite()) {
                    return Err(Error::InvalidProtocol(format!(
                        "mean photon number must be finite and positive, got {mu}"
                    )));
                }
                if delay_n < 1 {
                    return Err(Error::InvalidProtocol(
                        "delay multiplier N must be at least 1".to_string(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Stable label used in tables and file names.
    pub fn label(&self) -> String {
        match self.protocol {
            Protocol::Bb84(Bb84Config {
                source: Bb84Source::Ideal,
                ..
            }) => "bb84-ideal".to_string(),
            Protocol::Bb84(Bb84Config {
                source: Bb84Source::Poisson { .. },
                eve_has_memory,
            }) => format!("bb84-poisson-{}", memory_tag(eve_has_memory)),
            Protocol::Bbm92(Bbm92Source::Deterministic) => "bbm92-deterministic".to_string(),
            Protocol::Bbm92(Bbm92Source::Pdc { .. }) => "bbm92-pdc".to_string(),
            Protocol::Dpsk(DpskConfig {
                delay_n,
                eve_has_memory,
                ..
            }) => format!("dpsk-n{delay_n}-{}", memory_tag(eve_has_memory)),
        }
    }
}

fn memory_tag(eve_has_memory: bool) -> &'static str {
    if eve_has_memory {
        "memory"
    } else {
        "no-memory"
    }
}

/// Full trace of one rate evaluation.
///
/// For BBM92 the `p_signal`/`p_dark`/`p_click` slots hold the true, false
/// and total coincidence probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateBreakdown {
    pub p_signal: f64,
    pub p_dark: f64,
    pub p_click: f64,
    /// Quantum bit error rate e.
    pub qber: f64,
    /// Single-photon fraction (BB84 only); negative means the multi-photon
    /// emission already exceeds the click rate and no key survives.
    pub beta: Option<f64>,
    /// Transmission of Eve's beam splitter (DPSK only).
    pub eta_bs: Option<f64>,
    /// Fraction of bits untouched by the beam-splitter attack (DPSK only).
    pub gamma: Option<f64>,
    /// Privacy-amplification shrinking factor, clamped to [0, ∞).
    pub tau: f64,
    /// Error-correction performance factor f(e).
    pub f_e: f64,
    /// f(e)·[e·log₂e + (1−e)·log₂(1−e)] ≤ 0.
    pub leak: f64,
    /// Dead-time saturation factor in (0, 1].
    pub sat: f64,
    /// Secure rate R (bit/s), exactly 0 whenever no secure key survives.
    pub rate_bps: f64,
}

impl RateBreakdown {
    pub(crate) fn zero() -> Self {
        Self {
            p_signal: 0.0,
            p_dark: 0.0,
            p_click: 0.0,
            qber: 0.0,
            beta: None,
            eta_bs: None,
            gamma: None,
            tau: 0.0,
            f_e: F_E_TABLE[0].1,
            leak: 0.0,
            sat: 1.0,
            rate_bps: 0.0,
        }
    }
}

/// Power transmission of the link: `10^−(αL + passes·L_r)/10`.
///
/// `receiver_passes` is 1 for one-way links (BB84, DPSK) and 2 for BBM92,
/// where the pair source sits halfway between two receiver units.
pub fn fiber_transmission(chan: &ChannelParams, receiver_passes: u8) -> f64 {
    debug_assert!(receiver_passes == 1 || receiver_passes == 2);
    let db = chan.alpha_db_km * chan.length_km + f64::from(receiver_passes) * chan.receiver_loss_db;
    10f64.powf(-db / 10.0)
}

/// Binary-entropy leakage term `e·log₂e + (1−e)·log₂(1−e)`, with the
/// `0·log₂0 = 0` convention. Always ≤ 0.
pub fn entropy_leak_term(e: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&e));
    if e == 0.0 || e == 1.0 {
        return 0.0;
    }
    e * e.log2() + (1.0 - e) * (1.0 - e).log2()
}

/// Benchmark points of the bi-directional error-correction algorithm.
pub const F_E_TABLE: [(f64, f64); 4] = [(0.01, 1.16), (0.05, 1.16), (0.1, 1.22), (0.15, 1.35)];

/// Error-correction performance factor f(e).
///
/// Piecewise-linear through the benchmark table, constant 1.16 below the
/// first knot and constant 1.35 above the last. Undefined for e ≥ 0.5.
pub fn error_correction_factor(e: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&e) {
        return Err(Error::ErrorRateOutOfRange(e));
    }
    if e <= F_E_TABLE[0].0 {
        return Ok(F_E_TABLE[0].1);
    }
    let (e_last, f_last) = F_E_TABLE[F_E_TABLE.len() - 1];
    if e >= e_last {
        return Ok(f_last);
    }
    for window in F_E_TABLE.windows(2) {
        let [(x0, y0), (x1, y1)] = [window[0], window[1]];
        if e <= x1 {
            return Ok(y0 + (y1 - y0) * (e - x0) / (x1 - x0));
        }
    }
    unreachable!("knot table covers (first, last)")
}

/// Dead-time saturation `exp(−ν·p_click·t_dead / n_detectors)`.
///
/// With `t_dead = 0` (gated operation) there is no saturation.
pub fn saturation_factor(nu_hz: f64, p_click: f64, t_dead_s: f64, n_detectors: u32) -> f64 {
    debug_assert!(n_detectors >= 1);
    (-nu_hz * p_click * t_dead_s / f64::from(n_detectors)).exp()
}

/// Evaluate the configured protocol against one detector and channel.
pub fn rate_breakdown(
    cfg: &ProtocolConfig,
    det: &DetectorOperatingPoint,
    chan: &ChannelParams,
) -> Result<RateBreakdown> {
    cfg.validate()?;
    match cfg.protocol {
        Protocol::Bb84(ref bb84) => bb84_breakdown(bb84, det, chan, cfg.nu_hz),
        Protocol::Bbm92(Bbm92Source::Deterministic) => {
            bbm92_breakdown_deterministic(det, chan, cfg.nu_hz)
        }
        Protocol::Bbm92(Bbm92Source::Pdc { chi }) => bbm92_breakdown_pdc(chi, det, chan, cfg.nu_hz),
        Protocol::Dpsk(ref dpsk) => dpsk_breakdown(dpsk, det, chan, cfg.nu_hz),
    }
}

/// Shared entry checks for the breakdown evaluators.
pub(crate) fn check_rep_rate(nu_hz: f64, det: &DetectorOperatingPoint) -> Result<()> {
    if !(nu_hz > 0.0 && nu_hz.is_finite()) {
        return Err(Error::InvalidProtocol(format!(
            "repetition rate must be finite and positive, got {nu_hz}"
        )));
    }
    if nu_hz > det.nu_max_hz {
        return Err(Error::RepetitionRateTooHigh {
            nu_hz,
            nu_max_hz: det.nu_max_hz,
        });
    }
    Ok(())
}

/// f(e) and the error-correction leakage. At e ≥ 0.5 the factor is formally
/// undefined; the constant-extrapolation limit keeps the numbers finite and
/// the τ clamps already force the rate to zero there.
pub(crate) fn leak_terms(e: f64) -> (f64, f64) {
    let f_e = error_correction_factor(e).unwrap_or(F_E_TABLE[F_E_TABLE.len() - 1].1);
    (f_e, f_e * entropy_leak_term(e))
}

#[cfg(test)]
// Reference constants keep every digit the oracle printed.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn channel_validation() {
        assert!(ChannelParams::new(0.2, 50.0, 1.0, 0.01).is_ok());
        assert!(ChannelParams::new(-0.1, 50.0, 1.0, 0.01).is_err());
        assert!(ChannelParams::new(0.2, -1.0, 1.0, 0.01).is_err());
        assert!(ChannelParams::new(0.2, 50.0, -1.0, 0.01).is_err());
        assert!(ChannelParams::new(0.2, 50.0, 1.0, 0.5).is_err());
        assert!(ChannelParams::new(0.2, 50.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn transmission_examples() {
        let unit = ChannelParams::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(fiber_transmission(&unit, 1), 1.0);

        let chan = ChannelParams::new(0.2, 100.0, 1.0, 0.01).unwrap();
        assert_relative_eq!(
            fiber_transmission(&chan, 1),
            7.943_282_347_242_815e-3,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            fiber_transmission(&chan, 2),
            6.309_573_444_801_932_5e-3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn entropy_leak_examples() {
        assert_eq!(entropy_leak_term(0.0), 0.0);
        assert_eq!(entropy_leak_term(1.0), 0.0);
        assert_relative_eq!(entropy_leak_term(0.5), -1.0, max_relative = 1e-15);
        assert_relative_eq!(
            entropy_leak_term(0.11),
            -0.499_915_958_164_528,
            max_relative = 1e-12
        );
    }

    #[test]
    fn error_correction_factor_table_and_interpolation() {
        assert_eq!(error_correction_factor(0.01).unwrap(), 1.16);
        assert_eq!(error_correction_factor(0.05).unwrap(), 1.16);
        assert_eq!(error_correction_factor(0.1).unwrap(), 1.22);
        assert_eq!(error_correction_factor(0.15).unwrap(), 1.35);
        assert_relative_eq!(
            error_correction_factor(0.075).unwrap(),
            1.19,
            max_relative = 1e-12
        );
        // Constant extrapolation outside the benchmark range.
        assert_eq!(error_correction_factor(0.005).unwrap(), 1.16);
        assert_eq!(error_correction_factor(0.0).unwrap(), 1.16);
        assert_eq!(error_correction_factor(0.3).unwrap(), 1.35);
        assert!(matches!(
            error_correction_factor(0.5),
            Err(Error::ErrorRateOutOfRange(_))
        ));
        assert!(error_correction_factor(-0.01).is_err());
    }

    #[test]
    fn saturation_examples() {
        assert_eq!(saturation_factor(1e9, 0.0, 50e-9, 4), 1.0);
        assert_eq!(saturation_factor(1e9, 0.5, 0.0, 4), 1.0);
        assert_relative_eq!(
            saturation_factor(1e9, 1e-2, 5e-8, 2),
            0.778_800_783_071_404_87,
            max_relative = 1e-12
        );
    }

    #[test]
    fn labels() {
        let cfg = ProtocolConfig {
            protocol: Protocol::Dpsk(DpskConfig {
                mu: 0.5,
                delay_n: 100,
                eve_has_memory: false,
            }),
            nu_hz: 1e9,
        };
        assert_eq!(cfg.label(), "dpsk-n100-no-memory");
        let cfg = ProtocolConfig {
            protocol: Protocol::Bb84(Bb84Config {
                source: Bb84Source::Poisson { mu: 0.1 },
                eve_has_memory: true,
            }),
            nu_hz: 1e9,
        };
        assert_eq!(cfg.label(), "bb84-poisson-memory");
    }

    #[test]
    fn config_validation() {
        let bad = ProtocolConfig {
            protocol: Protocol::Dpsk(DpskConfig {
                mu: 0.0,
                delay_n: 1,
                eve_has_memory: false,
            }),
            nu_hz: 1e9,
        };
        assert!(bad.validate().is_err());
        let bad = ProtocolConfig {
            protocol: Protocol::Bbm92(Bbm92Source::Pdc { chi: -0.1 }),
            nu_hz: 1e9,
        };
        assert!(bad.validate().is_err());
        let ok = ProtocolConfig {
            protocol: Protocol::Bbm92(Bbm92Source::Pdc { chi: 0.0 }),
            nu_hz: 1e9,
        };
        assert!(ok.validate().is_ok());
    }
}
