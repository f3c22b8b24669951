//! Maximisation of the secure rate over the free source parameters (μ, χ)
//! and the detector pump power, plus cutoff-distance location.
//!
//! Every objective here is cheap, smooth almost everywhere and unimodal in
//! practice, but the pump objective oscillates with the sin² efficiency
//! fit. A coarse grid therefore selects the refinement bracket and a
//! golden-section stage polishes it; the returned point is the best probe
//! ever evaluated, so the search can only improve on the grid. μ, χ and
//! pump span several decades, so their grids are laid out in log space,
//! where the golden-section tolerance is relative by construction.

use std::cell::{Cell, RefCell};

use serde::Serialize;

use crate::detector::{
    DetectorOperatingPoint, UpConversionFit, UPCONVERSION_NU_MAX_HZ, UPCONVERSION_T_DEAD_S,
};
use crate::error::{Error, Result};
use crate::protocol::{
    rate_breakdown, Bb84Source, Bbm92Source, ChannelParams, Protocol, ProtocolConfig, RateBreakdown,
};

/// Search range for the mean photon number μ.
pub const MU_RANGE: (f64, f64) = (1e-5, 1.0);
/// Search range for the PDC squeeze parameter χ.
pub const CHI_RANGE: (f64, f64) = (1e-4, 2.0);
/// Coarse grid size for every scalar search.
pub const COARSE_POINTS: usize = 64;
/// Relative golden-section tolerance on μ, χ and pump.
pub const RELATIVE_TOL: f64 = 1e-5;

/// How far past the last secure distance the cutoff scan keeps looking.
const LOOKAHEAD_KM: f64 = 50.0;
/// Hard cap on the cutoff forward scan.
const MAX_SCAN_KM: f64 = 10_000.0;

/// Where the detector characteristics come from during a search.
#[derive(Debug, Clone, PartialEq)]
pub enum DetectorSource {
    /// A fixed operating point; only source parameters are searched.
    Fixed(DetectorOperatingPoint),
    /// A pump-power fit; the pump is searched jointly with the source
    /// parameters and each probe derives (η, D, d) from the fit.
    Fit {
        fit: UpConversionFit,
        nu_max_hz: f64,
        t_dead_s: f64,
    },
}

impl DetectorSource {
    /// The measured up-conversion fit with its Si APD limits.
    pub fn measured_upconversion() -> Self {
        Self::Fit {
            fit: UpConversionFit::measured(),
            nu_max_hz: UPCONVERSION_NU_MAX_HZ,
            t_dead_s: UPCONVERSION_T_DEAD_S,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        Ok(Self::Fixed(DetectorOperatingPoint::preset(name)?))
    }
}

/// Optimised free parameters; a field is `None` when the protocol or
/// detector source leaves it fixed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct OptimizedParams {
    pub pump_mw: Option<f64>,
    pub mu: Option<f64>,
    pub chi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub params: OptimizedParams,
    pub best_rate_bps: f64,
    pub breakdown: RateBreakdown,
    /// Number of rate evaluations the search spent.
    pub evaluations: u64,
}

/// Coarse grid scan of `[lo, hi]` followed by golden-section refinement in
/// the cell pair around the best grid point. Returns the best probed
/// `(x, f(x))`; ties resolve to the lowest probed x.
pub fn maximize_scalar(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    coarse_points: usize,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidSearchInterval(format!(
            "need finite lo < hi, got [{lo}, {hi}]"
        )));
    }
    if coarse_points < 3 {
        return Err(Error::InvalidSearchInterval(format!(
            "need at least 3 coarse points, got {coarse_points}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidSearchInterval(format!(
            "tolerance must be positive, got {tol}"
        )));
    }

    let n = coarse_points;
    let step = (hi - lo) / (n - 1) as f64;
    let grid = |i: usize| if i == n - 1 { hi } else { lo + step * i as f64 };

    let mut best_x = lo;
    let mut best_f = f(lo);
    let mut best_i = 0usize;
    for i in 1..n {
        let x = grid(i);
        let v = f(x);
        if v > best_f {
            best_x = x;
            best_f = v;
            best_i = i;
        }
    }

    let mut a = grid(best_i.saturating_sub(1));
    let mut b = grid((best_i + 1).min(n - 1));

    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let track = |x: f64, v: f64, best_x: &mut f64, best_f: &mut f64| {
        if v > *best_f {
            *best_x = x;
            *best_f = v;
        }
    };
    track(x1, f1, &mut best_x, &mut best_f);
    track(x2, f2, &mut best_x, &mut best_f);

    let mut iterations = 0;
    while b - a > tol && iterations < 200 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            track(x1, f1, &mut best_x, &mut best_f);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            track(x2, f2, &mut best_x, &mut best_f);
        }
        iterations += 1;
    }

    Ok((best_x, best_f))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum FreeParam {
    Mu,
    Chi,
}

fn free_param(protocol: &Protocol) -> Option<FreeParam> {
    match protocol {
        Protocol::Bb84(cfg) => match cfg.source {
            Bb84Source::Ideal => None,
            Bb84Source::Poisson { .. } => Some(FreeParam::Mu),
        },
        Protocol::Bbm92(Bbm92Source::Deterministic) => None,
        Protocol::Bbm92(Bbm92Source::Pdc { .. }) => Some(FreeParam::Chi),
        Protocol::Dpsk(_) => Some(FreeParam::Mu),
    }
}

fn with_free_param(cfg: &ProtocolConfig, value: f64) -> ProtocolConfig {
    let mut out = *cfg;
    match &mut out.protocol {
        Protocol::Bb84(bb84) => bb84.source = Bb84Source::Poisson { mu: value },
        Protocol::Bbm92(source) => *source = Bbm92Source::Pdc { chi: value },
        Protocol::Dpsk(dpsk) => dpsk.mu = value,
    }
    out
}

/// Operating point for one pump probe. Constructed directly to keep the
/// inner loop allocation-free; the fit guarantees the field invariants.
fn probe_point(
    fit: &UpConversionFit,
    pump_mw: f64,
    nu_max_hz: f64,
    t_dead_s: f64,
) -> Result<DetectorOperatingPoint> {
    let eta = fit.efficiency(pump_mw)?;
    let dark_rate_hz = fit.dark_rate(pump_mw)?;
    Ok(DetectorOperatingPoint {
        eta,
        dark_rate_hz,
        dark_per_window: dark_rate_hz / fit.bandwidth_hz,
        nu_max_hz,
        t_dead_s,
        label: String::new(),
    })
}

/// Maximise the secure rate over the protocol's free parameters at one
/// distance.
///
/// With a fixed operating point only μ or χ is searched; a fit detector
/// adds an outer pump search (log-spaced over five decades below the
/// domain ceiling, since the rate vanishes with the pump). Configurations
/// with nothing to optimise evaluate the rate once. The returned rate is
/// never below any probed grid point, and identical inputs reproduce the
/// search bit for bit.
pub fn optimize_rate(
    cfg: &ProtocolConfig,
    chan: &ChannelParams,
    source: &DetectorSource,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    let inner = free_param(&cfg.protocol);
    let evaluations = Cell::new(0u64);
    let first_error: RefCell<Option<Error>> = RefCell::new(None);

    let rate_at = |det: &DetectorOperatingPoint, value: Option<f64>| -> f64 {
        evaluations.set(evaluations.get() + 1);
        let probe_cfg = match value {
            Some(v) => with_free_param(cfg, v),
            None => *cfg,
        };
        match rate_breakdown(&probe_cfg, det, chan) {
            Ok(b) => b.rate_bps,
            Err(err) => {
                let mut slot = first_error.borrow_mut();
                if slot.is_none() {
                    *slot = Some(err);
                }
                f64::NEG_INFINITY
            }
        }
    };

    // Best source parameter at one operating point; log-space search.
    let inner_best = |det: &DetectorOperatingPoint| -> Result<(Option<f64>, f64)> {
        match inner {
            None => Ok((None, rate_at(det, None))),
            Some(param) => {
                let (lo, hi) = match param {
                    FreeParam::Mu => MU_RANGE,
                    FreeParam::Chi => CHI_RANGE,
                };
                let (y, rate) = maximize_scalar(
                    |y| rate_at(det, Some(y.exp())),
                    lo.ln(),
                    hi.ln(),
                    COARSE_POINTS,
                    RELATIVE_TOL,
                )?;
                Ok((Some(y.exp()), rate))
            }
        }
    };

    let (pump, inner_value, best_rate, det) = match source {
        DetectorSource::Fixed(det) => {
            let (value, rate) = inner_best(det)?;
            (None, value, rate, det.clone())
        }
        DetectorSource::Fit {
            fit,
            nu_max_hz,
            t_dead_s,
        } => {
            let scan_hi = fit.pump_domain_mw.1;
            let scan_lo = scan_hi * 1e-5;
            let pump_rate = |y: f64| -> f64 {
                let pump = y.exp().min(scan_hi);
                match probe_point(fit, pump, *nu_max_hz, *t_dead_s) {
                    Ok(det) => match inner_best(&det) {
                        Ok((_, rate)) => rate,
                        Err(_) => f64::NEG_INFINITY,
                    },
                    Err(_) => f64::NEG_INFINITY,
                }
            };
            let (y_star, rate) = maximize_scalar(
                pump_rate,
                scan_lo.ln(),
                scan_hi.ln(),
                COARSE_POINTS,
                RELATIVE_TOL,
            )?;
            let pump = y_star.exp().min(scan_hi);
            let det = fit.operating_point(pump, *nu_max_hz, *t_dead_s)?;
            // Pure re-run at the winning pump recovers the inner optimum.
            let (value, rerun_rate) = inner_best(&det)?;
            debug_assert_eq!(rerun_rate, rate);
            (Some(pump), value, rate, det)
        }
    };

    if let Some(err) = first_error.borrow_mut().take() {
        return Err(err);
    }

    let final_cfg = match inner_value {
        Some(v) => with_free_param(cfg, v),
        None => *cfg,
    };
    let breakdown = rate_breakdown(&final_cfg, &det, chan)?;
    debug_assert_eq!(breakdown.rate_bps, best_rate);

    let mut params = OptimizedParams {
        pump_mw: pump,
        ..OptimizedParams::default()
    };
    match inner {
        Some(FreeParam::Mu) => params.mu = inner_value,
        Some(FreeParam::Chi) => params.chi = inner_value,
        None => {}
    }

    Ok(OptimizationResult {
        params,
        best_rate_bps: breakdown.rate_bps,
        breakdown,
        evaluations: evaluations.get(),
    })
}

/// Largest distance (to 0.1 km) at which the optimised rate stays at or
/// above `rate_floor_bps`.
///
/// A 1 km forward scan runs until 50 km pass without any secure point,
/// then bisection sharpens the last good kilometre. Errors if the rate at
/// L = 0 is already below the floor.
pub fn cutoff_distance(
    cfg: &ProtocolConfig,
    chan: &ChannelParams,
    source: &DetectorSource,
    rate_floor_bps: f64,
) -> Result<f64> {
    if !(rate_floor_bps > 0.0 && rate_floor_bps.is_finite()) {
        return Err(Error::InvalidRateFloor(rate_floor_bps));
    }
    let rate_at = |l_km: f64| -> Result<f64> {
        optimize_rate(cfg, &chan.with_length(l_km), source).map(|r| r.best_rate_bps)
    };

    let rate_origin = rate_at(0.0)?;
    if rate_origin < rate_floor_bps {
        return Err(Error::FloorAboveRate {
            floor_bps: rate_floor_bps,
            rate_bps: rate_origin,
        });
    }

    let mut last_good = 0.0f64;
    let mut l = 1.0f64;
    loop {
        if rate_at(l)? >= rate_floor_bps {
            last_good = l;
        }
        if l > last_good + LOOKAHEAD_KM {
            break;
        }
        if l > MAX_SCAN_KM {
            return Err(Error::InvalidSearchInterval(format!(
                "no cutoff found within {MAX_SCAN_KM} km"
            )));
        }
        l += 1.0;
    }

    let (mut lo, mut hi) = (last_good, last_good + 1.0);
    while hi - lo > 0.1 {
        let mid = 0.5 * (lo + hi);
        if rate_at(mid)? >= rate_floor_bps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
