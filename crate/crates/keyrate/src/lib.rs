//! Secure-key rate models for fiber-optic quantum key distribution links.
//!
//! The crate evaluates the secure communication rate of three QKD
//! protocols - BB84, BBM92 and DPSK - against individual attacks, using
//! parametric single-photon detector models: a 1.55 μm frequency
//! up-conversion detector whose efficiency and dark rate depend on the
//! pump power, and a gated InGaAs/InP APD. On top of the closed-form rate
//! equations it provides per-distance optimisation of the free source and
//! detector parameters (μ, χ, pump power), cutoff-distance location,
//! rate-vs-distance sweep tables, and a seeded per-pulse Monte Carlo
//! simulation that validates the analytic click and error probabilities.
//!
//! ```
//! use keyrate::{bb84_breakdown, Bb84Config, Bb84Source, ChannelParams,
//!               DetectorOperatingPoint};
//!
//! let det = DetectorOperatingPoint::preset("upconv-min-nep").unwrap();
//! let chan = ChannelParams::new(0.2, 50.0, 1.0, 0.01).unwrap();
//! let cfg = Bb84Config {
//!     source: Bb84Source::Poisson { mu: 0.005 },
//!     eve_has_memory: true,
//! };
//! let b = bb84_breakdown(&cfg, &det, &chan, 1e9).unwrap();
//! assert!(b.rate_bps > 5e3 && b.rate_bps < 5.3e3);
//! ```

// Validation uses negated float comparisons (`!(x > 0.0)`) so NaN fails
// the check too; the positive form would wave NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detector;
pub mod error;
pub mod montecarlo;
pub mod optimize;
pub mod protocol;
pub mod sweep;

pub use detector::{
    dark_per_window, DetectorOperatingPoint, UpConversionFit, DEFAULT_NEP_GRID_STEP_MW,
    UPCONVERSION_NU_MAX_HZ, UPCONVERSION_T_DEAD_S,
};
pub use error::{Error, Result};
pub use montecarlo::{simulate_bb84, simulate_dpsk, z_scores, TrialStats, ZScores, RNG_ALGORITHM};
pub use optimize::{
    cutoff_distance, maximize_scalar, optimize_rate, DetectorSource, OptimizationResult,
    OptimizedParams, CHI_RANGE, COARSE_POINTS, MU_RANGE, RELATIVE_TOL,
};
pub use protocol::{
    bb84_breakdown, bbm92_breakdown_deterministic, bbm92_breakdown_pdc, dpsk_breakdown,
    entropy_leak_term, error_correction_factor, fiber_transmission, multi_photon_probability,
    pair_transmission, pdc_coefficients, rate_breakdown, saturation_factor, tau_bb84_memory,
    tau_bb84_no_memory, tau_bbm92, tau_dpsk, Bb84Config, Bb84Source, Bbm92Source, ChannelParams,
    DpskConfig, PdcCoefficients, Protocol, ProtocolConfig, RateBreakdown, F_E_TABLE,
};
pub use sweep::{
    figure_preset, render_csv, render_json, sweep_distance, write_table, FigureBundle, SweepRow,
    SweepSpec, TableFormat, CSV_HEADER,
};
