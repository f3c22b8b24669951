//! Single-photon detector models.
//!
//! The up-conversion detector (PPLN waveguide + Si APD) has pump-power
//! dependent characteristics: efficiency follows a sin² law and the dark
//! rate a quartic polynomial, both empirical fits. Its figure of merit is
//! the dark count per measurement window `d = D / B_d`, which is set by the
//! filter bandwidth alone and is independent of the system bit rate. A
//! gated InGaAs/InP APD is modelled as a fixed operating point.

use serde::Serialize;

use crate::error::{Error, Result};

/// Repetition-rate ceiling of the up-conversion receiver (Hz).
pub const UPCONVERSION_NU_MAX_HZ: f64 = 1e9;
/// Si APD dead time of the up-conversion receiver (s).
pub const UPCONVERSION_T_DEAD_S: f64 = 50e-9;

/// Default pump grid step for the NEP search (mW). Resolves the first
/// efficiency lobe (width ~0.03 mW) with ~30 points.
pub const DEFAULT_NEP_GRID_STEP_MW: f64 = 1e-3;

/// Empirical pump-power fits of the up-conversion detector.
///
/// Efficiency is `a1 · sin²(√(a2·p))` and the dark rate is a quartic
/// polynomial in `p`, with `p` in mW. The fits are empirical: evaluating
/// them outside `pump_domain_mw` is an error, not an extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct UpConversionFit {
    /// Peak efficiency (dimensionless).
    pub a1: f64,
    /// Argument scale of the sin² law (1/mW).
    pub a2: f64,
    /// Dark-rate polynomial coefficients b0..b4 (counts/s per mW^k).
    pub dark_poly: [f64; 5],
    /// Filter bandwidth B_d (Hz) used to convert the dark rate to dark
    /// counts per measurement window.
    pub bandwidth_hz: f64,
    /// Closed pump-power interval over which the fits are valid (mW).
    pub pump_domain_mw: (f64, f64),
}

impl UpConversionFit {
    pub fn new(
        a1: f64,
        a2: f64,
        dark_poly: [f64; 5],
        bandwidth_hz: f64,
        pump_max_mw: f64,
    ) -> Result<Self> {
        if !(a1 > 0.0 && a1 <= 1.0) {
            return Err(Error::InvalidFit(format!("a1 must be in (0, 1], got {a1}")));
        }
        if !(bandwidth_hz > 0.0) {
            return Err(Error::NonPositiveBandwidth(bandwidth_hz));
        }
        if !(pump_max_mw > 0.0) {
            return Err(Error::InvalidFit(format!(
                "pump domain upper bound must be positive, got {pump_max_mw}"
            )));
        }
        Ok(Self {
            a1,
            a2,
            dark_poly,
            bandwidth_hz,
            pump_domain_mw: (0.0, pump_max_mw),
        })
    }

    /// The measured fit: a1 = 0.465, a2 = 79.75 /mW, dark polynomial
    /// (50, 826.4, 110.3, -0.403, 0.00065) counts/s, B_d = 50 GHz, valid
    /// for pump powers up to 100 mW.
    pub fn measured() -> Self {
        Self {
            a1: 0.465,
            a2: 79.75,
            dark_poly: [50.0, 826.4, 110.3, -0.403, 0.00065],
            bandwidth_hz: 50e9,
            pump_domain_mw: (0.0, 100.0),
        }
    }

    fn check_pump(&self, pump_mw: f64) -> Result<()> {
        let (lo, hi) = self.pump_domain_mw;
        if !pump_mw.is_finite() || pump_mw < lo || pump_mw > hi {
            return Err(Error::PumpOutOfDomain { pump_mw, lo, hi });
        }
        Ok(())
    }

    /// Detection efficiency at the given pump power: `a1 · sin²(√(a2·p))`.
    ///
    /// Evaluated exactly as fitted, including the oscillation beyond the
    /// first lobe; callers wanting physically meaningful operating points
    /// restrict themselves to the first lobe or use [`min_nep_operating_point`].
    ///
    /// [`min_nep_operating_point`]: Self::min_nep_operating_point
    pub fn efficiency(&self, pump_mw: f64) -> Result<f64> {
        self.check_pump(pump_mw)?;
        Ok(self.a1 * (self.a2 * pump_mw).sqrt().sin().powi(2))
    }

    /// Dark count rate at the given pump power (counts/s).
    pub fn dark_rate(&self, pump_mw: f64) -> Result<f64> {
        self.check_pump(pump_mw)?;
        let p = pump_mw;
        let [b0, b1, b2, b3, b4] = self.dark_poly;
        Ok(b0 + b1 * p + b2 * p * p + b3 * p * p * p + b4 * p * p * p * p)
    }

    /// Normalized noise-equivalent-power figure `√(2D) / η`.
    ///
    /// Errors where the efficiency vanishes (e.g. at zero pump) so that
    /// every returned number stays finite.
    pub fn nep(&self, pump_mw: f64) -> Result<f64> {
        let eta = self.efficiency(pump_mw)?;
        if eta == 0.0 {
            return Err(Error::NepUndefined(pump_mw));
        }
        Ok((2.0 * self.dark_rate(pump_mw)?).sqrt() / eta)
    }

    /// Operating point of this fit at one pump power.
    ///
    /// `d` is derived from the fit bandwidth via [`dark_per_window`].
    pub fn operating_point(
        &self,
        pump_mw: f64,
        nu_max_hz: f64,
        t_dead_s: f64,
    ) -> Result<DetectorOperatingPoint> {
        let eta = self.efficiency(pump_mw)?;
        let dark_rate_hz = self.dark_rate(pump_mw)?;
        DetectorOperatingPoint::new(
            eta,
            dark_rate_hz,
            dark_per_window(dark_rate_hz, self.bandwidth_hz)?,
            nu_max_hz,
            t_dead_s,
            format!("upconv-fit@{pump_mw}mW"),
        )
    }

    /// Grid argmin of the NEP over the pump domain, excluding points with
    /// zero efficiency. Ties resolve to the lowest pump. The coarse grid,
    /// not a local descent, selects the point: the efficiency fit
    /// oscillates, so the objective is not unimodal.
    pub fn min_nep_operating_point(&self, grid_step_mw: f64) -> Result<DetectorOperatingPoint> {
        let (lo, hi) = self.pump_domain_mw;
        let width = hi - lo;
        if !(grid_step_mw > 0.0) || grid_step_mw >= width {
            return Err(Error::InvalidGridStep {
                step: grid_step_mw,
                width,
            });
        }
        let mut best: Option<(f64, f64)> = None;
        let steps = (width / grid_step_mw).floor() as u64;
        for i in 0..=steps {
            let p = lo + i as f64 * grid_step_mw;
            let Ok(v) = self.nep(p) else { continue };
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((p, v));
            }
        }
        let (p_star, _) = best.ok_or(Error::NepSearchEmpty)?;
        let mut point =
            self.operating_point(p_star, UPCONVERSION_NU_MAX_HZ, UPCONVERSION_T_DEAD_S)?;
        point.label = format!("upconv-fit-min-nep@{p_star}mW");
        Ok(point)
    }
}

/// Dark counts per measurement window, `d = D / bandwidth`.
///
/// For the matched-filter up-conversion receiver the relevant bandwidth is
/// the filter bandwidth B_d, never the system bit rate; for a gated APD it
/// is the gate frequency.
pub fn dark_per_window(dark_rate_hz: f64, bandwidth_hz: f64) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::NonPositiveBandwidth(bandwidth_hz));
    }
    if !(dark_rate_hz >= 0.0) {
        return Err(Error::NegativeDarkRate(dark_rate_hz));
    }
    Ok(dark_rate_hz / bandwidth_hz)
}

/// Snapshot of a detector at one operating condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorOperatingPoint {
    /// Detection probability per photon.
    pub eta: f64,
    /// Dark count rate D (counts/s).
    pub dark_rate_hz: f64,
    /// Dark counts per measurement window d (dimensionless).
    pub dark_per_window: f64,
    /// Maximum repetition rate the detector supports (Hz).
    pub nu_max_hz: f64,
    /// Dead time after a click (s); 0 disables dead-time saturation.
    pub t_dead_s: f64,
    pub label: String,
}

impl DetectorOperatingPoint {
    pub fn new(
        eta: f64,
        dark_rate_hz: f64,
        dark_per_window: f64,
        nu_max_hz: f64,
        t_dead_s: f64,
        label: String,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidDetector(format!(
                "eta must be in [0, 1], got {eta}"
            )));
        }
        if !(dark_rate_hz >= 0.0) {
            return Err(Error::InvalidDetector(format!(
                "dark rate must be non-negative, got {dark_rate_hz}"
            )));
        }
        if !(dark_per_window >= 0.0) {
            return Err(Error::InvalidDetector(format!(
                "dark counts per window must be non-negative, got {dark_per_window}"
            )));
        }
        if !(nu_max_hz > 0.0) {
            return Err(Error::InvalidDetector(format!(
                "maximum repetition rate must be positive, got {nu_max_hz}"
            )));
        }
        if !(t_dead_s >= 0.0) {
            return Err(Error::InvalidDetector(format!(
                "dead time must be non-negative, got {t_dead_s}"
            )));
        }
        Ok(Self {
            eta,
            dark_rate_hz,
            dark_per_window,
            nu_max_hz,
            t_dead_s,
            label,
        })
    }

    /// Named operating points.
    ///
    /// `upconv-min-nep` is the published minimum-NEP condition of the
    /// up-conversion detector (η = 0.075, D = 6.4e3 /s, d = 1.28e-7). It is
    /// shipped as a constant rather than re-derived from the measured fit
    /// because the two are not mutually consistent. `upconv-ideal` assumes
    /// the waveguide dark counts are eliminated and performance is limited
    /// by the Si APD (η = 0.46, d = 5e-8). `ingaas-typical` is a gated
    /// InGaAs/InP APD at its best achieved gate frequency (η = 0.1,
    /// d = 1e-5 per gate, ν = 10 MHz).
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "upconv-min-nep" => Ok(Self {
                eta: 0.075,
                dark_rate_hz: 6.4e3,
                dark_per_window: 1.28e-7,
                nu_max_hz: UPCONVERSION_NU_MAX_HZ,
                t_dead_s: UPCONVERSION_T_DEAD_S,
                label: name.to_string(),
            }),
            "upconv-ideal" => Ok(Self {
                eta: 0.46,
                dark_rate_hz: 2.5e3,
                dark_per_window: 5e-8,
                nu_max_hz: UPCONVERSION_NU_MAX_HZ,
                t_dead_s: UPCONVERSION_T_DEAD_S,
                label: name.to_string(),
            }),
            "ingaas-typical" => Ok(Self {
                eta: 0.1,
                dark_rate_hz: 1e4,
                dark_per_window: 1e-5,
                nu_max_hz: 1e7,
                t_dead_s: 0.0,
                label: name.to_string(),
            }),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    pub const PRESET_NAMES: [&'static str; 3] =
        ["upconv-min-nep", "upconv-ideal", "ingaas-typical"];
}
