//! Rate-vs-distance tables and their CSV/JSON serialisation.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize::{optimize_rate, DetectorSource};
use crate::protocol::{
    rate_breakdown, Bb84Config, Bb84Source, Bbm92Source, ChannelParams, DpskConfig, Protocol,
    ProtocolConfig, RateBreakdown,
};

/// One optimised point of a rate-vs-distance sweep. Parameter fields stay
/// empty where the configuration leaves them fixed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub protocol: String,
    #[serde(rename = "L_km")]
    pub l_km: f64,
    #[serde(rename = "pump_mW")]
    pub pump_mw: Option<f64>,
    pub mu: Option<f64>,
    pub chi: Option<f64>,
    pub p_click: f64,
    pub qber: f64,
    pub tau: f64,
    pub sat: f64,
    pub rate_bps: f64,
}

/// Sweep the link length over `[l_start, l_end)` in `step_km` increments,
/// optimising the free parameters at every grid point. Rows with zero rate
/// are retained so cutoff tails stay visible.
pub fn sweep_distance(
    cfg: &ProtocolConfig,
    source: &DetectorSource,
    chan: &ChannelParams,
    l_start_km: f64,
    l_end_km: f64,
    step_km: f64,
) -> Result<Vec<SweepRow>> {
    if !(l_start_km >= 0.0 && l_start_km < l_end_km) {
        return Err(Error::InvalidSearchInterval(format!(
            "need 0 <= L_start < L_end, got [{l_start_km}, {l_end_km})"
        )));
    }
    if !(step_km > 0.0) {
        return Err(Error::InvalidSearchInterval(format!(
            "step must be positive, got {step_km}"
        )));
    }
    let span = (l_end_km - l_start_km) / step_km;
    let n = (span - 1e-9).ceil().max(1.0) as usize;
    let label = cfg.label();
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let l_km = l_start_km + k as f64 * step_km;
        let opt = optimize_rate(cfg, &chan.with_length(l_km), source)?;
        rows.push(SweepRow {
            protocol: label.clone(),
            l_km,
            pump_mw: opt.params.pump_mw,
            mu: opt.params.mu,
            chi: opt.params.chi,
            p_click: opt.breakdown.p_click,
            qber: opt.breakdown.qber,
            tau: opt.breakdown.tau,
            sat: opt.breakdown.sat,
            rate_bps: opt.breakdown.rate_bps,
        });
    }
    Ok(rows)
}

/// One fully specified sweep of a figure bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub label: String,
    pub config: ProtocolConfig,
    pub source: DetectorSource,
    pub channel: ChannelParams,
    pub l_start_km: f64,
    pub l_end_km: f64,
    pub step_km: f64,
}

impl SweepSpec {
    pub fn run(&self) -> Result<Vec<SweepRow>> {
        sweep_distance(
            &self.config,
            &self.source,
            &self.channel,
            self.l_start_km,
            self.l_end_km,
            self.step_km,
        )
    }

    /// Re-evaluate the breakdown at a row's recorded parameters. Emitted
    /// rows must round-trip through this to 1e-12 relative on the rate.
    pub fn reevaluate(&self, row: &SweepRow) -> Result<RateBreakdown> {
        let mut cfg = self.config;
        match &mut cfg.protocol {
            Protocol::Bb84(bb84) => {
                if let Some(mu) = row.mu {
                    bb84.source = Bb84Source::Poisson { mu };
                }
            }
            Protocol::Bbm92(source) => {
                if let Some(chi) = row.chi {
                    *source = Bbm92Source::Pdc { chi };
                }
            }
            Protocol::Dpsk(dpsk) => {
                if let Some(mu) = row.mu {
                    dpsk.mu = mu;
                }
            }
        }
        let det = match (&self.source, row.pump_mw) {
            (DetectorSource::Fixed(det), _) => det.clone(),
            (
                DetectorSource::Fit {
                    fit,
                    nu_max_hz,
                    t_dead_s,
                },
                Some(pump),
            ) => fit.operating_point(pump, *nu_max_hz, *t_dead_s)?,
            (DetectorSource::Fit { .. }, None) => {
                return Err(Error::InvalidProtocol(
                    "row from a fit detector lacks its pump power".to_string(),
                ))
            }
        };
        rate_breakdown(&cfg, &det, &self.channel.with_length(row.l_km))
    }
}

/// A named set of sweeps sharing the fixed link constants α = 0.2 dB/km,
/// b = 0.01, L_r = 1 dB and ν = 1 GHz.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureBundle {
    pub name: &'static str,
    pub sweeps: Vec<SweepSpec>,
}

const FIGURE_NAMES: [&str; 4] = ["fig5", "fig6", "fig7", "fig8"];

fn shared_channel() -> ChannelParams {
    ChannelParams::new(0.2, 0.0, 1.0, 0.01).expect("fixed constants are valid")
}

const SHARED_NU_HZ: f64 = 1e9;

/// Preconfigured sweep bundles:
///
/// * `fig5` - BB84 with a Poisson source (with and without Eve's quantum
///   memory) and with an ideal source, pump-optimised fit detector.
/// * `fig6` - BBM92 with a PDC source (χ optimised) and a deterministic
///   source, pump-optimised fit detector.
/// * `fig7` - DPSK without Eve's memory for N = 1, 10, 100, μ optimised,
///   pump-optimised fit detector.
/// * `fig8` - BB84 (ideal source), deterministic BBM92 and DPSK (N = 1,
///   Eve with memory) on the `upconv-ideal` operating point.
///
/// Sweeps run on a 1 km grid and end roughly 50 km past the expected
/// cutoff so the zero-rate tail stays visible.
pub fn figure_preset(name: &str) -> Result<FigureBundle> {
    let chan = shared_channel();
    let fit = DetectorSource::measured_upconversion();
    let sweep = |protocol: Protocol, source: &DetectorSource, l_end: f64| {
        let config = ProtocolConfig {
            protocol,
            nu_hz: SHARED_NU_HZ,
        };
        SweepSpec {
            label: config.label(),
            config,
            source: source.clone(),
            channel: chan,
            l_start_km: 0.0,
            l_end_km: l_end,
            step_km: 1.0,
        }
    };
    // Placeholder values for the free parameters; the sweep optimiser
    // replaces them at every grid point.
    let poisson = Bb84Source::Poisson { mu: 0.1 };
    let bundle = match name {
        "fig5" => FigureBundle {
            name: "fig5",
            sweeps: vec![
                sweep(
                    Protocol::Bb84(Bb84Config {
                        source: poisson,
                        eve_has_memory: true,
                    }),
                    &fit,
                    405.0,
                ),
                sweep(
                    Protocol::Bb84(Bb84Config {
                        source: poisson,
                        eve_has_memory: false,
                    }),
                    &fit,
                    405.0,
                ),
                sweep(
                    Protocol::Bb84(Bb84Config {
                        source: Bb84Source::Ideal,
                        eve_has_memory: true,
                    }),
                    &fit,
                    405.0,
                ),
            ],
        },
        "fig6" => FigureBundle {
            name: "fig6",
            sweeps: vec![
                sweep(Protocol::Bbm92(Bbm92Source::Pdc { chi: 0.1 }), &fit, 440.0),
                sweep(Protocol::Bbm92(Bbm92Source::Deterministic), &fit, 440.0),
            ],
        },
        "fig7" => FigureBundle {
            name: "fig7",
            sweeps: [1u32, 10, 100]
                .iter()
                .map(|&delay_n| {
                    sweep(
                        Protocol::Dpsk(DpskConfig {
                            mu: 0.5,
                            delay_n,
                            eve_has_memory: false,
                        }),
                        &fit,
                        440.0,
                    )
                })
                .collect(),
        },
        "fig8" => {
            let ideal = DetectorSource::preset("upconv-ideal")?;
            FigureBundle {
                name: "fig8",
                sweeps: vec![
                    sweep(
                        Protocol::Bb84(Bb84Config {
                            source: Bb84Source::Ideal,
                            eve_has_memory: true,
                        }),
                        &ideal,
                        440.0,
                    ),
                    sweep(Protocol::Bbm92(Bbm92Source::Deterministic), &ideal, 440.0),
                    sweep(
                        Protocol::Dpsk(DpskConfig {
                            mu: 0.5,
                            delay_n: 1,
                            eve_has_memory: true,
                        }),
                        &ideal,
                        440.0,
                    ),
                ],
            }
        }
        other => return Err(Error::UnknownFigure(other.to_string())),
    };
    debug_assert!(FIGURE_NAMES.contains(&bundle.name));
    Ok(bundle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

impl TableFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

pub const CSV_HEADER: &str = "protocol,L_km,pump_mW,mu,chi,p_click,qber,tau,sat,rate_bps";

fn push_field(out: &mut String, value: Option<f64>) {
    if let Some(v) = value {
        // Shortest round-trip scientific notation keeps full precision and
        // byte-stable output.
        let _ = write!(out, "{v:e}");
    }
}

/// Render rows as CSV with the fixed header; absent parameters serialise
/// as empty fields.
pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.protocol);
        for field in [
            Some(row.l_km),
            row.pump_mw,
            row.mu,
            row.chi,
            Some(row.p_click),
            Some(row.qber),
            Some(row.tau),
            Some(row.sat),
            Some(row.rate_bps),
        ] {
            out.push(',');
            push_field(&mut out, field);
        }
        out.push('\n');
    }
    out
}

/// Render rows as a JSON array of objects with the same keys as the CSV
/// header (absent parameters serialise as null).
pub fn render_json(rows: &[SweepRow]) -> String {
    let mut out = serde_json::to_string_pretty(rows).expect("rows serialise");
    out.push('\n');
    out
}

/// Serialise rows to `destination`. Identical rows produce byte-identical
/// files.
pub fn write_table(rows: &[SweepRow], format: TableFormat, destination: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let content = match format {
        TableFormat::Csv => render_csv(rows),
        TableFormat::Json => render_json(rows),
    };
    std::fs::write(destination, content).map_err(|source| Error::Io {
        path: destination.display().to_string(),
        source,
    })
}
