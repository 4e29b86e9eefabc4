//! The `hashpeak` command line.
//!
//! Exit codes: 0 success, 1 usage, configuration or data error, 2 a model
//! invariant failed.

mod config;
mod sanity;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use config::RunConfig;
pub use sanity::{sanity_report, SanityCheck, SanityReport};

use crate::calibration::{calibrate, compare_fits, CalibrationResult, Mode, ObjectiveKind};
use crate::dynamics::{simulate, Trajectory};
use crate::econ::AdjustmentRegime;
use crate::error::Error;
use crate::exog_series::{fetch_chart, load_csv, Chart, Unit};
use crate::scenario::project;

#[derive(Debug, Parser)]
#[command(
    name = "hashpeak",
    version,
    about = "System-dynamics model of bitcoin mining"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the model over the historical inputs.
    Simulate(SimulateArgs),
    /// Fit the hash-rate adjustment time(s) to the historical hash rate.
    Calibrate(CalibrateArgs),
    /// Project past the present with noisy price and fee scenarios.
    Project(ProjectArgs),
    /// Check the coin-supply schedule against its closed forms.
    Sanity(SanityArgs),
    /// Download the three charts into the cache directory.
    Fetch(FetchArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON run configuration (a previous run.json works too).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Integration step in days.
    #[arg(long, value_name = "DAYS")]
    pub dt: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub price_csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub fees_csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub hashrate_csv: Option<PathBuf>,
    /// Read charts without an explicit path from the fetch cache,
    /// downloading them if needed.
    #[arg(long)]
    pub fetch: bool,
    #[arg(long, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RegimeArgs {
    /// Adjustment time(s) in days: one value, or early,late.
    #[arg(long, value_name = "DAYS", value_delimiter = ',', num_args = 1..=2)]
    pub tau: Vec<f64>,
    /// Day the early adjustment time gives way to the late one.
    #[arg(long, value_name = "DAY")]
    pub break_day: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub regimes: RegimeArgs,
    #[arg(long, value_name = "DAY")]
    pub t_end: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Single,
    TwoRegime,
    TwoRegimeFreeBreak,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Single => Mode::Single,
            ModeArg::TwoRegime => Mode::TwoRegime,
            ModeArg::TwoRegimeFreeBreak => Mode::TwoRegimeFreeBreak,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    LogRmse,
    LinearNrmse,
}

impl From<ObjectiveArg> for ObjectiveKind {
    fn from(o: ObjectiveArg) -> ObjectiveKind {
        match o {
            ObjectiveArg::LogRmse => ObjectiveKind::LogRmse,
            ObjectiveArg::LinearNrmse => ObjectiveKind::LinearNrmse,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Fixed break day for two-regime mode.
    #[arg(long, value_name = "DAY")]
    pub break_day: Option<f64>,
    /// Fit window as START:END days.
    #[arg(long, value_name = "START:END", value_parser = parse_window)]
    pub window: Option<(f64, f64)>,
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveArg>,
}

#[derive(Debug, Clone, Args)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub regimes: RegimeArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "USD")]
    pub mean_price: Option<f64>,
    #[arg(long, value_name = "USD")]
    pub sd_price: Option<f64>,
    #[arg(long, value_name = "BTC")]
    pub mean_fees: Option<f64>,
    #[arg(long, value_name = "BTC")]
    pub sd_fees: Option<f64>,
    /// Noise correlation time.
    #[arg(long, value_name = "DAYS")]
    pub correlation_time: Option<f64>,
    /// Present day; history after it is replaced by the scenario.
    #[arg(long, value_name = "DAY")]
    pub start: Option<f64>,
    /// Last projected day.
    #[arg(long, value_name = "DAY")]
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SanityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_name = "DAY")]
    pub t_end: Option<f64>,
    /// Observed block heights (`day,value` or `date,value`) to compare with.
    #[arg(long, value_name = "PATH")]
    pub height_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FetchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected START:END, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, configuration or data; exit 1.
    Input(String),
    /// A model invariant did not hold; exit 2.
    Invariant(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Invariant(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) => f.write_str(m),
            Failure::Invariant(m) => write!(f, "invariant violated: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hashpeak: error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

pub fn execute(command: &Command) -> CmdResult {
    match command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Project(a) => cmd_project(a),
        Command::Sanity(a) => cmd_sanity(a),
        Command::Fetch(a) => cmd_fetch(a),
    }
}

/// Config file (or defaults) with the common flags applied on top.
pub fn resolve_config(common: &CommonArgs) -> Result<RunConfig, Error> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        config.out_dir = out.clone();
    }
    if let Some(dt) = common.dt {
        config.params.dt = dt;
    }
    if let Some(p) = &common.price_csv {
        config.price_csv = Some(p.clone());
    }
    if let Some(p) = &common.fees_csv {
        config.fees_csv = Some(p.clone());
    }
    if let Some(p) = &common.hashrate_csv {
        config.hashrate_csv = Some(p.clone());
    }
    if common.fetch {
        config.fetch = true;
    }
    if let Some(d) = &common.cache_dir {
        config.cache_dir = d.clone();
    }
    Ok(config)
}

fn apply_regimes(config: &mut RunConfig, args: &RegimeArgs) -> Result<(), Error> {
    let current_break = config
        .params
        .adjustment_regimes
        .iter()
        .find_map(|r| r.until_day);
    match args.tau.as_slice() {
        [] => {
            if let Some(b) = args.break_day {
                for r in &mut config.params.adjustment_regimes {
                    if r.until_day.is_some() {
                        r.until_day = Some(b);
                    }
                }
            }
        }
        [tau] => {
            if args.break_day.is_some() {
                return Err(Error::InvalidParams(
                    "--break-day needs two --tau values".into(),
                ));
            }
            config.params.adjustment_regimes = vec![AdjustmentRegime::open(*tau)];
        }
        [early, late] => {
            let b = args
                .break_day
                .or(current_break)
                .unwrap_or(crate::calibration::CalibrationSpec::default().break_day);
            config.params.adjustment_regimes = vec![
                AdjustmentRegime::until(b, *early),
                AdjustmentRegime::open(*late),
            ];
        }
        _ => unreachable!("clap limits --tau to two values"),
    }
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config: &'a RunConfig,
    inputs: Vec<(String, String)>,
    outputs: Vec<String>,
    warnings: &'a [String],
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParams(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_manifest(
    config: &RunConfig,
    command: &str,
    charts: &[Chart],
    outputs: &[&str],
    warnings: &[String],
) -> Result<(), Error> {
    let manifest = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
        inputs: charts
            .iter()
            .map(|&c| (c.name().to_owned(), config.source_of(c)))
            .collect(),
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        warnings,
    };
    write_json(&config.out_dir.join("run.json"), &manifest)
}

fn print_warnings(trajectory: &Trajectory) {
    for w in &trajectory.warnings {
        eprintln!("hashpeak: warning: {w}");
    }
}

fn cmd_simulate(args: &SimulateArgs) -> CmdResult {
    let mut config = resolve_config(&args.common)?;
    apply_regimes(&mut config, &args.regimes)?;
    if let Some(t) = args.t_end {
        config.t_end = t;
    }
    config.validate()?;
    let price = config.load_chart(Chart::MarketPrice)?;
    let fees = config.load_chart(Chart::TransactionFees)?;
    let trajectory = simulate(&config.params, &price, &fees, config.t_end)?;
    print_warnings(&trajectory);

    ensure_dir(&config.out_dir)?;
    trajectory.write_csv(config.out_dir.join("trajectory.csv"))?;
    write_manifest(
        &config,
        "simulate",
        &[Chart::MarketPrice, Chart::TransactionFees],
        &["trajectory.csv"],
        &trajectory.warnings,
    )?;
    if let Some(last) = trajectory.last() {
        println!(
            "simulated {} rows to day {}: hash rate {:.4e} GH/s, circulating {:.0} BTC",
            trajectory.len(),
            last.t,
            last.hash_rate_ghs,
            last.circulating
        );
    }
    println!("wrote {}", config.out_dir.join("trajectory.csv").display());
    Ok(())
}

#[derive(Serialize)]
struct FitReport<'a> {
    mode: Mode,
    taus: Vec<f64>,
    break_day: Option<f64>,
    objective: f64,
    objective_kind: ObjectiveKind,
    evaluations: usize,
    converged: bool,
    regimes: &'a [AdjustmentRegime],
    single: FitSummary,
    comparison: Option<crate::calibration::FitComparison>,
}

#[derive(Serialize)]
struct FitSummary {
    tau: f64,
    objective: f64,
    evaluations: usize,
}

fn cmd_calibrate(args: &CalibrateArgs) -> CmdResult {
    let mut config = resolve_config(&args.common)?;
    if let Some(m) = args.mode {
        config.calibration.mode = m.into();
    }
    if let Some(b) = args.break_day {
        config.calibration.break_day = b;
    }
    if let Some(w) = args.window {
        config.calibration.fit_window = w;
    }
    if let Some(o) = args.objective {
        config.calibration.objective = o.into();
    }
    config.validate()?;
    config.calibration.validate(config.params.dt)?;
    let price = config.load_chart(Chart::MarketPrice)?;
    let fees = config.load_chart(Chart::TransactionFees)?;
    let historical = config.load_chart(Chart::HashRate)?;

    let single_spec = config.calibration.clone().with_mode(Mode::Single);
    let single = calibrate(&single_spec, &config.params, &price, &fees, &historical)?;
    let chosen: CalibrationResult = if config.calibration.mode == Mode::Single {
        single.clone()
    } else {
        calibrate(
            &config.calibration,
            &config.params,
            &price,
            &fees,
            &historical,
        )?
    };
    let comparison = (chosen.mode != Mode::Single).then(|| compare_fits(&single, &chosen));

    ensure_dir(&config.out_dir)?;
    let t_end = config.calibration.fit_window.1;
    let mut outputs = vec!["fit_report.json".to_owned()];
    let mut warnings = Vec::new();
    for result in [&single, &chosen] {
        let name = format!("trajectory_{}.csv", result.mode.as_str());
        if outputs.contains(&name) {
            continue;
        }
        let trajectory = simulate(&result.params(&config.params), &price, &fees, t_end)?;
        print_warnings(&trajectory);
        warnings.extend(trajectory.warnings.iter().cloned());
        trajectory.write_csv(config.out_dir.join(&name))?;
        outputs.push(name);
    }

    let report = FitReport {
        mode: chosen.mode,
        taus: chosen.taus.iter().map(|r| r.tau_days).collect(),
        break_day: chosen.break_day,
        objective: chosen.objective_value,
        objective_kind: chosen.objective_kind,
        evaluations: chosen.evaluations,
        converged: chosen.converged,
        regimes: &chosen.taus,
        single: FitSummary {
            tau: single.taus[0].tau_days,
            objective: single.objective_value,
            evaluations: single.evaluations,
        },
        comparison: comparison.clone(),
    };
    write_json(&config.out_dir.join("fit_report.json"), &report)?;
    let outputs: Vec<&str> = outputs.iter().map(String::as_str).collect();
    write_manifest(&config, "calibrate", &Chart::ALL, &outputs, &warnings)?;

    println!(
        "single: tau = {:.1} d, {} = {:.6}",
        single.taus[0].tau_days,
        single.objective_kind.as_str(),
        single.objective_value
    );
    if let Some(c) = &comparison {
        let taus: Vec<String> = chosen
            .taus
            .iter()
            .map(|r| format!("{:.1}", r.tau_days))
            .collect();
        println!(
            "{}: taus = [{}] d, break day {:.1}, {} = {:.6}",
            chosen.mode.as_str(),
            taus.join(", "),
            chosen.break_day.unwrap_or(f64::NAN),
            chosen.objective_kind.as_str(),
            chosen.objective_value
        );
        println!("{}", c.verdict);
    }
    println!("wrote {}", config.out_dir.join("fit_report.json").display());
    Ok(())
}

fn cmd_project(args: &ProjectArgs) -> CmdResult {
    let mut config = resolve_config(&args.common)?;
    apply_regimes(&mut config, &args.regimes)?;
    let s = &mut config.scenario;
    if let Some(v) = args.seed {
        s.seed = v;
    }
    if let Some(v) = args.mean_price {
        s.price_mean = v;
    }
    if let Some(v) = args.sd_price {
        s.price_sd = v;
    }
    if let Some(v) = args.mean_fees {
        s.fees_mean = v;
    }
    if let Some(v) = args.sd_fees {
        s.fees_sd = v;
    }
    if let Some(v) = args.correlation_time {
        s.correlation_time = v;
    }
    if let Some(v) = args.start {
        s.t_start = v;
    }
    if let Some(v) = args.horizon {
        s.t_end = v;
    }
    config.validate()?;
    config.scenario.validate()?;
    let price = config.load_chart(Chart::MarketPrice)?;
    let fees = config.load_chart(Chart::TransactionFees)?;
    let projection = project(&config.params, &price, &fees, &config.scenario)?;
    print_warnings(&projection.trajectory);

    ensure_dir(&config.out_dir)?;
    projection
        .trajectory
        .write_csv(config.out_dir.join("trajectory.csv"))?;
    write_json(&config.out_dir.join("summary.json"), &projection.summary)?;
    write_manifest(
        &config,
        "project",
        &[Chart::MarketPrice, Chart::TransactionFees],
        &["trajectory.csv", "summary.json"],
        &projection.trajectory.warnings,
    )?;

    let sum = &projection.summary;
    println!(
        "peak hash rate {:.4e} GH/s at day {}; terminal {:.4e} GH/s at day {}",
        sum.peak_hash_rate, sum.peak_day, sum.terminal_hash_rate, sum.t_end
    );
    for h in &sum.halvings {
        println!(
            "halving {}: model day {:.2} ({}){}",
            h.index,
            h.model_day,
            h.model_date,
            h.real_date
                .map(|d| format!(", real {d}"))
                .unwrap_or_default()
        );
    }
    println!("wrote {}", config.out_dir.join("summary.json").display());
    Ok(())
}

fn cmd_sanity(args: &SanityArgs) -> CmdResult {
    let mut config = resolve_config(&args.common)?;
    if let Some(t) = args.t_end {
        config.t_end = t;
    }
    config.params.validate_structure()?;
    let heights = match &args.height_csv {
        Some(p) => Some(load_csv(p, Unit::Blocks)?),
        None => None,
    };
    let report = sanity_report(config.t_end, config.params.dt, heights.as_ref())?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    report
        .print(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Input(format!("stdout: {e}")))?;
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(failed.join(", ")))
    }
}

fn cmd_fetch(args: &FetchArgs) -> CmdResult {
    let config = resolve_config(&args.common)?;
    for chart in Chart::ALL {
        let series = fetch_chart(chart.name(), &config.cache_dir)?;
        println!(
            "{}: {} points, days {}..{} -> {}",
            chart.name(),
            series.len(),
            series.first_day(),
            series.last_day(),
            config
                .cache_dir
                .join(format!("{}.csv", chart.name()))
                .display()
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        assert_eq!(parse_window("0:4100"), Ok((0.0, 4100.0)));
        assert_eq!(parse_window(" 10 : 20.5"), Ok((10.0, 20.5)));
        assert!(parse_window("10-20").is_err());
        assert!(parse_window("a:1").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn tau_flags() {
        let mut c = RunConfig::default();
        apply_regimes(
            &mut c,
            &RegimeArgs {
                tau: vec![800.0],
                break_day: None,
            },
        )
        .unwrap();
        assert_eq!(
            c.params.adjustment_regimes,
            vec![AdjustmentRegime::open(800.0)]
        );
        apply_regimes(
            &mut c,
            &RegimeArgs {
                tau: vec![1000.0, 300.0],
                break_day: None,
            },
        )
        .unwrap();
        assert_eq!(
            c.params.adjustment_regimes[0],
            AdjustmentRegime::until(3777.0, 1000.0)
        );
        apply_regimes(
            &mut c,
            &RegimeArgs {
                tau: vec![],
                break_day: Some(3000.0),
            },
        )
        .unwrap();
        assert_eq!(c.params.adjustment_regimes[0].until_day, Some(3000.0));
        assert!(apply_regimes(
            &mut c,
            &RegimeArgs {
                tau: vec![5.0],
                break_day: Some(1.0),
            },
        )
        .is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"params": {"dt": 0.25}, "out_dir": "a"}"#).unwrap();
        let common = CommonArgs {
            config: Some(path),
            dt: Some(0.5),
            ..Default::default()
        };
        let c = resolve_config(&common).unwrap();
        assert_eq!(c.params.dt, 0.5);
        assert_eq!(c.out_dir, PathBuf::from("a"));
    }
}
