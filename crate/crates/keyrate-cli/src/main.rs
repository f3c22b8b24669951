//! Command-line front end for the QKD secure-rate models.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use keyrate::{
    cutoff_distance, figure_preset, rate_breakdown, simulate_bb84, simulate_dpsk, write_table,
    z_scores, Bb84Config, Bb84Source, Bbm92Source, ChannelParams, DetectorOperatingPoint,
    DetectorSource, DpskConfig, OptimizationResult, Protocol, ProtocolConfig, RateBreakdown,
    TableFormat, TrialStats, UpConversionFit, ZScores, RNG_ALGORITHM, UPCONVERSION_NU_MAX_HZ,
    UPCONVERSION_T_DEAD_S,
};

use config::{ConfigError, FileConfig};

const DEFAULT_ALPHA_DB_KM: f64 = 0.2;
const DEFAULT_BASELINE_ERROR: f64 = 0.01;
const DEFAULT_RECEIVER_LOSS_DB: f64 = 1.0;
const DEFAULT_NU_HZ: f64 = 1e9;
const DEFAULT_SEED: u64 = 1;
const DEFAULT_N_PULSES: u64 = 1_000_000;
const DEFAULT_Z_LIMIT: f64 = 4.0;
const DEFAULT_RATE_FLOOR_BPS: f64 = 1.0;

#[derive(Parser)]
#[command(
    name = "keyrate",
    version,
    about = "Secure-key rates of fiber-optic QKD links (BB84, BBM92, DPSK)",
    after_help = "Defaults: alpha = 0.2 dB/km, b = 0.01, Lr = 1 dB, nu = 1 GHz.\n\
                  Values from --config sit between these defaults and the flags."
)]
struct Cli {
    /// Config file with `key = value` lines; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the up-conversion detector (eta, D, d, NEP) against pump power.
    DetectorCurve(DetectorCurveArgs),
    /// Evaluate one secure-rate breakdown.
    Rate(RateArgs),
    /// Maximise the rate over the free parameters at one distance, or find
    /// the cutoff distance for a rate floor.
    Optimize(OptimizeArgs),
    /// Sweep the rate over a distance grid and write a table.
    Sweep(SweepArgs),
    /// Run a preconfigured figure bundle (fig5..fig8) into a directory.
    Figures(FiguresArgs),
    /// Monte Carlo check of the analytic click/error probabilities.
    McCheck(McCheckArgs),
}

#[derive(Args, Clone, Default)]
struct ChannelArgs {
    /// Fiber loss coefficient (dB/km).
    #[arg(long)]
    alpha: Option<f64>,
    /// Baseline system error rate.
    #[arg(long)]
    b: Option<f64>,
    /// Receiver loss (dB).
    #[arg(long = "Lr")]
    lr: Option<f64>,
    /// Repetition rate (Hz).
    #[arg(long)]
    nu: Option<f64>,
    /// Link length (km).
    #[arg(long = "L")]
    l: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct ProtocolArgs {
    /// Protocol: bb84 | bbm92 | dpsk.
    #[arg(long)]
    protocol: Option<String>,
    /// Mean photon number per pulse. Selects the Poisson source for bb84;
    /// required for dpsk.
    #[arg(long)]
    mu: Option<f64>,
    /// PDC squeeze parameter. Selects the PDC source for bbm92.
    #[arg(long)]
    chi: Option<f64>,
    /// DPSK delay multiplier N.
    #[arg(long = "N")]
    delay_n: Option<u32>,
    /// Grant Eve an ideal quantum memory.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    eve_memory: Option<bool>,
}

#[derive(Args, Clone, Default)]
struct DetectorArgs {
    /// Detector: upconv-min-nep | upconv-ideal | ingaas-typical | fit.
    #[arg(long)]
    detector: Option<String>,
    /// Pump power (mW); pins `--detector fit` to one operating point.
    #[arg(long)]
    pump: Option<f64>,
}

#[derive(Args)]
struct DetectorCurveArgs {
    /// Single pump power (mW) to evaluate.
    #[arg(long)]
    pump: Option<f64>,
    /// Range start (mW).
    #[arg(long)]
    pump_start: Option<f64>,
    /// Range end (mW), inclusive.
    #[arg(long)]
    pump_end: Option<f64>,
    /// Range step (mW).
    #[arg(long)]
    pump_step: Option<f64>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RateArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Output format: text | json.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Also locate the cutoff distance for this rate floor (bit/s).
    #[arg(long)]
    cutoff: bool,
    /// Rate floor used with --cutoff (bit/s).
    #[arg(long)]
    rate_floor: Option<f64>,
    /// Output format: text | json.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Sweep start (km).
    #[arg(long)]
    l_start: Option<f64>,
    /// Sweep end (km), exclusive.
    #[arg(long)]
    l_end: Option<f64>,
    /// Sweep step (km).
    #[arg(long)]
    step: Option<f64>,
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format: csv | json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct FiguresArgs {
    /// Bundle name: fig5 | fig6 | fig7 | fig8.
    name: String,
    /// Output directory (one table per sweep).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the 1 km sweep step.
    #[arg(long)]
    step: Option<f64>,
    /// Override the DPSK delay multiplier in the bundle.
    #[arg(long = "dpsk-n")]
    dpsk_n: Option<u32>,
    /// Table format: csv | json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct McCheckArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Number of simulated pulses.
    #[arg(long)]
    n_pulses: Option<u64>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// |z| threshold for a pass.
    #[arg(long)]
    z_limit: Option<f64>,
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl From<keyrate::Error> for CliError {
    fn from(err: keyrate::Error) -> Self {
        match err {
            keyrate::Error::Io { .. } => Self::Runtime(err.to_string()),
            _ => Self::Config(err.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        Self::Config(err.to_string())
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => err.exit(),
    };
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::empty(),
    };
    match cli.command {
        Command::DetectorCurve(args) => cmd_detector_curve(args, &file),
        Command::Rate(args) => cmd_rate(args, &file),
        Command::Optimize(args) => cmd_optimize(args, &file),
        Command::Sweep(args) => cmd_sweep(args, &file),
        Command::Figures(args) => cmd_figures(args, &file),
        Command::McCheck(args) => cmd_mc_check(args, &file),
    }
}

// ---- resolution: defaults < config file < flags ----

struct Link {
    channel: ChannelParams,
    nu_hz: f64,
}

fn resolve_link(
    args: &ChannelArgs,
    file: &FileConfig,
    need_length: bool,
) -> Result<Link, CliError> {
    let alpha = args
        .alpha
        .or(file.get_f64("alpha")?)
        .unwrap_or(DEFAULT_ALPHA_DB_KM);
    let b = args
        .b
        .or(file.get_f64("b")?)
        .unwrap_or(DEFAULT_BASELINE_ERROR);
    let lr = args
        .lr
        .or(file.get_f64("l_r")?)
        .unwrap_or(DEFAULT_RECEIVER_LOSS_DB);
    let nu_hz = args.nu.or(file.get_f64("nu")?).unwrap_or(DEFAULT_NU_HZ);
    let l = match args.l.or(file.get_f64("l")?) {
        Some(l) => l,
        None if need_length => return Err(config_err("link length is required (--L <km>)")),
        None => 0.0,
    };
    Ok(Link {
        channel: ChannelParams::new(alpha, l, lr, b)?,
        nu_hz,
    })
}

fn resolve_protocol(
    args: &ProtocolArgs,
    file: &FileConfig,
    nu_hz: f64,
) -> Result<ProtocolConfig, CliError> {
    let name = args
        .protocol
        .clone()
        .or_else(|| file.get_str("protocol").map(String::from))
        .ok_or_else(|| config_err("protocol is required (--protocol bb84 | bbm92 | dpsk)"))?;
    let mu = args.mu.or(file.get_f64("mu")?);
    let chi = args.chi.or(file.get_f64("chi")?);
    let delay_n = args.delay_n.or(file.get_u32("n")?);
    let eve_has_memory = args
        .eve_memory
        .or(file.get_bool("eve_memory")?)
        .unwrap_or(false);

    let protocol = match name.as_str() {
        "bb84" => Protocol::Bb84(Bb84Config {
            source: match mu {
                Some(mu) => Bb84Source::Poisson { mu },
                None => Bb84Source::Ideal,
            },
            eve_has_memory,
        }),
        "bbm92" => Protocol::Bbm92(match chi {
            Some(chi) => Bbm92Source::Pdc { chi },
            None => Bbm92Source::Deterministic,
        }),
        "dpsk" => Protocol::Dpsk(DpskConfig {
            mu: mu.ok_or_else(|| config_err("dpsk requires --mu"))?,
            delay_n: delay_n.unwrap_or(1),
            eve_has_memory,
        }),
        other => return Err(config_err(format!("unknown protocol `{other}`"))),
    };
    let cfg = ProtocolConfig { protocol, nu_hz };
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_fit(file: &FileConfig) -> Result<UpConversionFit, CliError> {
    let base = UpConversionFit::measured();
    let poly = [
        file.get_f64("fit_b0")?.unwrap_or(base.dark_poly[0]),
        file.get_f64("fit_b1")?.unwrap_or(base.dark_poly[1]),
        file.get_f64("fit_b2")?.unwrap_or(base.dark_poly[2]),
        file.get_f64("fit_b3")?.unwrap_or(base.dark_poly[3]),
        file.get_f64("fit_b4")?.unwrap_or(base.dark_poly[4]),
    ];
    Ok(UpConversionFit::new(
        file.get_f64("fit_a1")?.unwrap_or(base.a1),
        file.get_f64("fit_a2")?.unwrap_or(base.a2),
        poly,
        file.get_f64("fit_bandwidth")?.unwrap_or(base.bandwidth_hz),
        file.get_f64("fit_pump_max")?
            .unwrap_or(base.pump_domain_mw.1),
    )?)
}

fn resolve_detector_source(
    args: &DetectorArgs,
    file: &FileConfig,
) -> Result<DetectorSource, CliError> {
    let name = args
        .detector
        .clone()
        .or_else(|| file.get_str("detector").map(String::from))
        .ok_or_else(|| {
            config_err("detector is required (--detector upconv-min-nep | upconv-ideal | ingaas-typical | fit)")
        })?;
    if name != "fit" {
        return Ok(DetectorSource::preset(&name)?);
    }
    let fit = resolve_fit(file)?;
    match args.pump.or(file.get_f64("pump")?) {
        Some(pump_mw) => Ok(DetectorSource::Fixed(fit.operating_point(
            pump_mw,
            UPCONVERSION_NU_MAX_HZ,
            UPCONVERSION_T_DEAD_S,
        )?)),
        None => Ok(DetectorSource::Fit {
            fit,
            nu_max_hz: UPCONVERSION_NU_MAX_HZ,
            t_dead_s: UPCONVERSION_T_DEAD_S,
        }),
    }
}

fn resolve_detector_point(
    args: &DetectorArgs,
    file: &FileConfig,
) -> Result<DetectorOperatingPoint, CliError> {
    match resolve_detector_source(args, file)? {
        DetectorSource::Fixed(det) => Ok(det),
        DetectorSource::Fit { .. } => Err(config_err(
            "this command evaluates one operating point; add --pump <mW> to pin `--detector fit`",
        )),
    }
}

fn resolve_table_format(
    flag: &Option<String>,
    file: &FileConfig,
    default: TableFormat,
) -> Result<TableFormat, CliError> {
    let name = match flag
        .clone()
        .or_else(|| file.get_str("format").map(String::from))
    {
        Some(name) => name,
        None => return Ok(default),
    };
    match name.as_str() {
        "csv" => Ok(TableFormat::Csv),
        "json" => Ok(TableFormat::Json),
        other => Err(config_err(format!(
            "unknown table format `{other}` (csv | json)"
        ))),
    }
}

// ---- commands ----

fn cmd_detector_curve(args: DetectorCurveArgs, file: &FileConfig) -> Result<ExitCode, CliError> {
    let fit = resolve_fit(file)?;
    let pumps: Vec<f64> = match args.pump.or(file.get_f64("pump")?) {
        Some(p) => vec![p],
        None => {
            let start = args
                .pump_start
                .or(file.get_f64("pump_start")?)
                .unwrap_or(fit.pump_domain_mw.0);
            let end = args
                .pump_end
                .or(file.get_f64("pump_end")?)
                .unwrap_or(fit.pump_domain_mw.1);
            let step = args.pump_step.or(file.get_f64("pump_step")?).unwrap_or(1.0);
            if !(step > 0.0 && end >= start) {
                return Err(config_err(format!(
                    "invalid pump range [{start}, {end}] step {step}"
                )));
            }
            let n = ((end - start) / step).floor() as usize + 1;
            (0..n).map(|i| start + i as f64 * step).collect()
        }
    };

    let mut out = String::from("pump_mW,eta,dark_rate_hz,d_per_window,nep\n");
    for pump in pumps {
        let eta = fit.efficiency(pump)?;
        let dark = fit.dark_rate(pump)?;
        let d = dark / fit.bandwidth_hz;
        let nep = fit.nep(pump).map(|v| format!("{v:e}")).unwrap_or_default();
        out.push_str(&format!("{pump:e},{eta:e},{dark:e},{d:e},{nep}\n"));
    }
    emit(args.out.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct RateReport<'a> {
    protocol: String,
    #[serde(rename = "L_km")]
    l_km: f64,
    nu_hz: f64,
    detector: &'a str,
    breakdown: &'a RateBreakdown,
}

fn cmd_rate(args: RateArgs, file: &FileConfig) -> Result<ExitCode, CliError> {
    let link = resolve_link(&args.channel, file, true)?;
    let cfg = resolve_protocol(&args.protocol, file, link.nu_hz)?;
    let det = resolve_detector_point(&args.detector, file)?;
    let breakdown = rate_breakdown(&cfg, &det, &link.channel)?;

    match args.format.as_str() {
        "json" => {
            let report = RateReport {
                protocol: cfg.label(),
                l_km: link.channel.length_km,
                nu_hz: link.nu_hz,
                detector: &det.label,
                breakdown: &breakdown,
            };
            println!("{}", to_json(&report)?);
        }
        "text" => {
            println!("protocol  {}", cfg.label());
            println!("detector  {}", det.label);
            println!("L_km      {}", link.channel.length_km);
            println!("nu_hz     {}", link.nu_hz);
            print_breakdown(&breakdown);
        }
        other => {
            return Err(config_err(format!(
                "unknown format `{other}` (text | json)"
            )))
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_breakdown(b: &RateBreakdown) {
    println!("p_signal  {}", b.p_signal);
    println!("p_dark    {}", b.p_dark);
    println!("p_click   {}", b.p_click);
    println!("qber      {}", b.qber);
    if let Some(v) = b.beta {
        println!("beta      {v}");
    }
    if let Some(v) = b.eta_bs {
        println!("eta_bs    {v}");
    }
    if let Some(v) = b.gamma {
        println!("gamma     {v}");
    }
    println!("tau       {}", b.tau);
    println!("f_e       {}", b.f_e);
    println!("leak      {}", b.leak);
    println!("sat       {}", b.sat);
    println!("rate_bps  {}", b.rate_bps);
}

#[derive(Serialize)]
struct OptimizeReport {
    protocol: String,
    #[serde(rename = "L_km")]
    l_km: f64,
    result: OptimizationResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    cutoff_km: Option<f64>,
}

fn cmd_optimize(args: OptimizeArgs, file: &FileConfig) -> Result<ExitCode, CliError> {
    let link = resolve_link(&args.channel, file, true)?;
    let cfg = resolve_protocol(&args.protocol, file, link.nu_hz)?;
    let source = resolve_detector_source(&args.detector, file)?;
    let result = keyrate::optimize_rate(&cfg, &link.channel, &source)?;

    let cutoff_km = if args.cutoff {
        let floor = args
            .rate_floor
            .or(file.get_f64("rate_floor")?)
            .unwrap_or(DEFAULT_RATE_FLOOR_BPS);
        Some(cutoff_distance(&cfg, &link.channel, &source, floor)?)
    } else {
        None
    };

    match args.format.as_str() {
        "json" => {
            let report = OptimizeReport {
                protocol: cfg.label(),
                l_km: link.channel.length_km,
                result,
                cutoff_km,
            };
            println!("{}", to_json(&report)?);
        }
        "text" => {
            println!("protocol     {}", cfg.label());
            println!("L_km         {}", link.channel.length_km);
            if let Some(v) = result.params.pump_mw {
                println!("pump_mW      {v}");
            }
            if let Some(v) = result.params.mu {
                println!("mu           {v}");
            }
            if let Some(v) = result.params.chi {
                println!("chi          {v}");
            }
            println!("best_rate    {}", result.best_rate_bps);
            println!("evaluations  {}", result.evaluations);
            if let Some(c) = cutoff_km {
                println!("cutoff_km    {c}");
            }
            print_breakdown(&result.breakdown);
        }
        other => {
            return Err(config_err(format!(
                "unknown format `{other}` (text | json)"
            )))
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs, file: &FileConfig) -> Result<ExitCode, CliError> {
    let link = resolve_link(&args.channel, file, false)?;
    let cfg = resolve_protocol(&args.protocol, file, link.nu_hz)?;
    let source = resolve_detector_source(&args.detector, file)?;
    let l_start = args.l_start.or(file.get_f64("l_start")?).unwrap_or(0.0);
    let l_end = args
        .l_end
        .or(file.get_f64("l_end")?)
        .ok_or_else(|| config_err("sweep end is required (--l-end <km>)"))?;
    let step = args.step.or(file.get_f64("step")?).unwrap_or(1.0);
    let format = resolve_table_format(&args.format, file, TableFormat::Csv)?;
    let out = args
        .out
        .or_else(|| file.get_str("out").map(PathBuf::from))
        .ok_or_else(|| config_err("output file is required (--out <path>)"))?;

    let rows = keyrate::sweep_distance(&cfg, &source, &link.channel, l_start, l_end, step)?;
    write_table(&rows, format, &out)?;
    println!("{} rows -> {}", rows.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_figures(args: FiguresArgs, file: &FileConfig) -> Result<ExitCode, CliError> {
    let mut bundle = figure_preset(&args.name)?;
    if let Some(step) = args.step.or(file.get_f64("step")?) {
        // The negated form also rejects NaN.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(step > 0.0) {
            return Err(config_err(format!("invalid sweep step {step}")));
        }
        for spec in &mut bundle.sweeps {
            spec.step_km = step;
        }
    }
    if let Some(n) = args.dpsk_n.or(file.get_u32("n")?) {
        for spec in &mut bundle.sweeps {
            if let Protocol::Dpsk(ref mut dpsk) = spec.config.protocol {
                dpsk.delay_n = n;
                spec.label = spec.config.label();
            }
        }
    }
    let format = resolve_table_format(&args.format, file, TableFormat::Csv)?;
    let out_dir = args
        .out
        .or_else(|| file.get_str("out").map(PathBuf::from))
        .ok_or_else(|| config_err("output directory is required (--out <dir>)"))?;

    // Compute every sweep before touching the filesystem.
    let mut tables = Vec::with_capacity(bundle.sweeps.len());
    for spec in &bundle.sweeps {
        let rows = spec.run()?;
        let name = format!("{}_{}.{}", bundle.name, spec.label, format.extension());
        tables.push((name, rows));
    }

    std::fs::create_dir_all(&out_dir).map_err(|source| keyrate::Error::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    for (name, rows) in &tables {
        let path = out_dir.join(name);
        write_table(rows, format, &path)?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct McReport {
    protocol: String,
    rng: &'static str,
    stats: TrialStats,
    p_click_hat: f64,
    e_hat: f64,
    analytic_p_click: f64,
    analytic_qber: f64,
    z_click: f64,
    z_error: f64,
    z_limit: f64,
    pass: bool,
}

fn cmd_mc_check(args: McCheckArgs, file: &FileConfig) -> Result<ExitCode, CliError> {
    let link = resolve_link(&args.channel, file, true)?;
    let cfg = resolve_protocol(&args.protocol, file, link.nu_hz)?;
    let det = resolve_detector_point(&args.detector, file)?;
    let n_pulses = args
        .n_pulses
        .or(file.get_u64("n_pulses")?)
        .unwrap_or(DEFAULT_N_PULSES);
    let seed = args.seed.or(file.get_u64("seed")?).unwrap_or(DEFAULT_SEED);
    let z_limit = args
        .z_limit
        .or(file.get_f64("z_limit")?)
        .unwrap_or(DEFAULT_Z_LIMIT);

    let (stats, analytic) = match cfg.protocol {
        Protocol::Bb84(Bb84Config {
            source: Bb84Source::Poisson { mu },
            ..
        }) => (
            simulate_bb84(n_pulses, mu, &det, &link.channel, seed)?,
            rate_breakdown(&cfg, &det, &link.channel)?,
        ),
        Protocol::Dpsk(DpskConfig { mu, .. }) => (
            simulate_dpsk(n_pulses, mu, &det, &link.channel, seed)?,
            rate_breakdown(&cfg, &det, &link.channel)?,
        ),
        _ => {
            return Err(config_err(
                "mc-check supports --protocol bb84 (with --mu) and dpsk",
            ))
        }
    };
    let ZScores { click, error } = z_scores(&stats, &analytic)?;
    let pass = click.abs() <= z_limit && error.abs() <= z_limit;

    let report = McReport {
        protocol: cfg.label(),
        rng: RNG_ALGORITHM,
        stats,
        p_click_hat: stats.p_click_hat(),
        e_hat: stats.e_hat(),
        analytic_p_click: analytic.p_click,
        analytic_qber: analytic.qber,
        z_click: click,
        z_error: error,
        z_limit,
        pass,
    };
    println!("{}", to_json(&report)?);
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("serialising output: {e}")))
}

fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, content).map_err(|source| {
            CliError::from(keyrate::Error::Io {
                path: path.display().to_string(),
                source,
            })
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
