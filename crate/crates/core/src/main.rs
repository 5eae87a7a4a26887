use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hiddencorr::correlations::crosscheck::{crosscheck, default_points, CrosscheckReport};
use hiddencorr::correlations::{
    unsteerability_tu, CorrelationReport, Method, CHSH_LOCAL_BOUND, LABEL_MARGIN, STEERING_BOUND, UNSTEER_BOUND,
};
use hiddencorr::expsim::{
    run_experiment, ExperimentConfig, ExperimentReport, DEFAULT_ACCIDENTALS, DEFAULT_N_PER_SETTING, DEFAULT_SETS,
};
use hiddencorr::filters::{Filtering, LocalFilter};
use hiddencorr::phasemap::{self, format_sig, GridSpec, ThresholdRow, SIGNIFICANT_DIGITS};
use hiddencorr::states::{noisy_state, StateParams};

/// Environment variable holding the worker-thread count.
const WORKERS_ENV: &str = "HIDDENCORR_WORKERS";

#[derive(Parser)]
#[command(
    name = "hiddencorr",
    version,
    about = "Entanglement, steering and Bell nonlocality of filtered two-qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measures of a single state, optionally after a local filter.
    Analyze(AnalyzeArgs),
    /// Classify every point of a (p, γ) grid.
    Scan(ScanArgs),
    /// Critical p for each criterion.
    Thresholds(ThresholdArgs),
    /// Monte-Carlo photon-counting experiment.
    Simulate(SimulateArgs),
    /// Compare closed-form expressions with the density-matrix path.
    Crosscheck(CrosscheckArgs),
}

#[derive(Args)]
#[group(id = "angle", required = true, multiple = false)]
struct Angle {
    /// Schmidt ratio γ = cot²θ ≥ 1.
    #[arg(long, group = "angle")]
    gamma: Option<f64>,
    /// Schmidt angle θ in radians, (0, π/4].
    #[arg(long, group = "angle")]
    theta: Option<f64>,
}

impl Angle {
    fn params(&self, p: f64) -> hiddencorr::Result<StateParams> {
        match (self.gamma, self.theta) {
            (Some(g), _) => StateParams::from_gamma(p, g),
            (_, Some(t)) => StateParams::new(p, t),
            _ => unreachable!("clap enforces one of --gamma/--theta"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    None,
    F,
    G,
    Custom,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum TextOrJson {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ThresholdFormat {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Bisection,
    ClosedForm,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    p: f64,
    #[command(flatten)]
    angle: Angle,
    #[arg(long, value_enum, default_value = "none")]
    filter: FilterArg,
    /// Diagonals of K_A and K_B for --filter custom: a0 a1 b0 b1.
    #[arg(long, num_args = 4, value_names = ["A0", "A1", "B0", "B1"], required_if_eq("filter", "custom"))]
    custom: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "text")]
    format: TextOrJson,
}

#[derive(Args)]
struct GammaSelection {
    /// Comma-separated γ values.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    /// Log-spaced γ values as MIN:MAX:COUNT.
    #[arg(long, value_name = "MIN:MAX:COUNT")]
    gamma_log: Option<String>,
    /// Evenly spaced γ values as MIN:MAX:COUNT.
    #[arg(long, value_name = "MIN:MAX:COUNT")]
    gamma_lin: Option<String>,
}

impl GammaSelection {
    /// Explicit values, then log- and linear-spaced ones; `default` when empty.
    fn values(&self, default: impl FnOnce() -> Vec<f64>) -> Result<Vec<f64>, CliError> {
        let mut out = self.gamma.clone();
        if let Some(spec) = &self.gamma_log {
            let (a, b, n) = parse_range(spec)?;
            out.extend(phasemap::log_gammas(a, b, n)?);
        }
        if let Some(spec) = &self.gamma_lin {
            let (a, b, n) = parse_range(spec)?;
            out.extend(phasemap::linear_gammas(a, b, n)?);
        }
        Ok(if out.is_empty() { default() } else { out })
    }
}

fn parse_range(spec: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("expected MIN:MAX:COUNT, got '{spec}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok((
        parts[0].trim().parse().map_err(|_| bad())?,
        parts[1].trim().parse().map_err(|_| bad())?,
        parts[2].trim().parse().map_err(|_| bad())?,
    ))
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 0.0)]
    p_min: f64,
    #[arg(long, default_value_t = 1.0)]
    p_max: f64,
    #[arg(long, default_value_t = 200)]
    p_steps: usize,
    #[command(flatten)]
    gammas: GammaSelection,
    /// Filters evaluated at each point (comma-separated: none, f, g).
    #[arg(long, value_delimiter = ',', default_value = "f,g")]
    filters: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    gammas: GammaSelection,
    #[arg(long, value_enum, default_value = "bisection")]
    method: MethodArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: ThresholdFormat,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    p: f64,
    #[command(flatten)]
    angle: Angle,
    #[arg(long, value_enum, default_value = "none")]
    filter: FilterArg,
    /// Photon pairs per setting and set.
    #[arg(long, default_value_t = DEFAULT_N_PER_SETTING)]
    n: u64,
    /// Expected accidental coincidences per setting.
    #[arg(long, default_value_t = DEFAULT_ACCIDENTALS)]
    accidentals: f64,
    #[arg(long, default_value_t = DEFAULT_SETS)]
    sets: usize,
    /// Fidelity of the source to the ideal pure state.
    #[arg(long, default_value_t = 1.0)]
    fidelity: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    subtract_accidentals: bool,
    /// JSON report destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-set values as CSV.
    #[arg(long)]
    per_set_csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: TextOrJson,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: TextOrJson,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(hiddencorr::Error),
    Io(PathBuf, io::Error),
}

impl From<hiddencorr::Error> for CliError {
    fn from(e: hiddencorr::Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Domain(_) => 2,
            CliError::Io(..) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "I/O error on {}: {e}", p.display()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_workers().and_then(|()| run(cli.command)) {
        eprintln!("hiddencorr: {e}");
        return ExitCode::from(e.exit_code());
    }
    ExitCode::SUCCESS
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze(a) => analyze(a),
        Command::Scan(a) => scan(a),
        Command::Thresholds(a) => thresholds(a),
        Command::Simulate(a) => simulate(a),
        Command::Crosscheck(a) => crosscheck_cmd(a),
    }
}

/// Writes to `path` or stdout. stdout failures (closed pipe) are I/O errors too.
fn emit(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::Io(p.to_path_buf(), e))?;
            let mut w = BufWriter::new(file);
            body(&mut w).and_then(|()| w.flush()).map_err(|e| CliError::Io(p.to_path_buf(), e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w).and_then(|()| w.flush()).map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e))
        }
    }
}

fn write_json(w: &mut dyn Write, value: &impl Serialize) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}

fn sig(x: f64) -> String {
    format_sig(x, SIGNIFICANT_DIGITS)
}

fn named_filter(f: FilterArg) -> Filtering {
    match f {
        FilterArg::F => Filtering::F,
        FilterArg::G => Filtering::G,
        FilterArg::None | FilterArg::Custom => Filtering::None,
    }
}

#[derive(Serialize)]
struct AnalyzeOutput {
    p: f64,
    gamma: f64,
    theta: f64,
    filter: String,
    success_prob: f64,
    #[serde(flatten)]
    report: CorrelationReport,
    /// Unfiltered values, present when a filter was applied.
    unfiltered: Option<CorrelationReport>,
    /// HiddenBell_X / HiddenSteer_X when the filter reveals them.
    hidden: Vec<String>,
}

fn analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let params = args.angle.params(args.p)?;
    let rho = noisy_state(params);
    let unfiltered = CorrelationReport::for_params(params)?;
    let (filter, tag) = match args.filter {
        FilterArg::Custom => {
            let v = args.custom.expect("clap requires --custom with --filter custom");
            (LocalFilter::new([v[0], v[1]], [v[2], v[3]])?.normalize(), "custom")
        }
        f => {
            let named = named_filter(f);
            (LocalFilter::named(named, params.theta())?, if named == Filtering::None { "none" } else { named.name() })
        }
    };
    let out = if tag == "none" {
        AnalyzeOutput {
            p: params.p(),
            gamma: params.gamma(),
            theta: params.theta(),
            filter: tag.into(),
            success_prob: 1.0,
            report: unfiltered,
            unfiltered: None,
            hidden: Vec::new(),
        }
    } else {
        let filtered = filter.apply(&rho)?;
        let report = CorrelationReport::for_state(&filtered.state, None)?;
        let suffix = tag.to_uppercase();
        let suffix = if tag == "custom" { "custom".to_string() } else { suffix };
        let mut hidden = Vec::new();
        if unfiltered.bell_s <= CHSH_LOCAL_BOUND + LABEL_MARGIN && report.bell_s > CHSH_LOCAL_BOUND + LABEL_MARGIN {
            hidden.push(format!("HiddenBell_{suffix}"));
        }
        if unsteerability_tu(params) <= UNSTEER_BOUND + LABEL_MARGIN
            && report.steering_t > STEERING_BOUND + LABEL_MARGIN
        {
            hidden.push(format!("HiddenSteer_{suffix}"));
        }
        AnalyzeOutput {
            p: params.p(),
            gamma: params.gamma(),
            theta: params.theta(),
            filter: tag.into(),
            success_prob: filtered.success_prob,
            report,
            unfiltered: Some(unfiltered),
            hidden,
        }
    };
    emit(None, |w| match args.format {
        TextOrJson::Json => write_json(w, &out),
        TextOrJson::Text => write_analyze_text(w, &out),
    })
}

fn write_analyze_text(w: &mut dyn Write, out: &AnalyzeOutput) -> io::Result<()> {
    writeln!(w, "p = {}  gamma = {}  theta = {}  filter = {}", sig(out.p), sig(out.gamma), sig(out.theta), out.filter)?;
    let r = &out.report;
    writeln!(w, "C  = {}", sig(r.concurrence))?;
    writeln!(w, "S  = {}", sig(r.bell_s))?;
    writeln!(w, "T  = {}", sig(r.steering_t))?;
    writeln!(w, "TU = {}", r.unsteer_tu.map_or("n/a (filtered state)".into(), sig))?;
    writeln!(w, "success_prob = {}", sig(out.success_prob))?;
    let labels: Vec<&str> = r.labels.iter().map(|l| l.name()).collect();
    writeln!(w, "labels: {}", labels.join(", "))?;
    if let Some(u) = &out.unfiltered {
        writeln!(
            w,
            "unfiltered: C = {}  S = {}  T = {}  TU = {}",
            sig(u.concurrence),
            sig(u.bell_s),
            sig(u.steering_t),
            u.unsteer_tu.map_or("n/a".into(), sig)
        )?;
        let hidden = if out.hidden.is_empty() { "none".to_string() } else { out.hidden.join(", ") };
        writeln!(w, "hidden: {hidden}")?;
    }
    Ok(())
}

fn scan(args: ScanArgs) -> Result<(), CliError> {
    let gammas = args.gammas.values(|| phasemap::log_gammas(1.0, 100.0, 100).expect("valid default range"))?;
    let filters = args
        .filters
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<Filtering>())
        .collect::<hiddencorr::Result<BTreeSet<_>>>()?;
    let grid = GridSpec::new(args.p_min, args.p_max, args.p_steps, gammas, filters)?;
    let rows = phasemap::scan(&grid)?;
    emit(args.out.as_deref(), |w| match args.format {
        TableFormat::Csv => phasemap::write_csv(&rows, w),
        TableFormat::Json => write_json(w, &phasemap::records_to_json(&rows)),
    })
}

fn thresholds(args: ThresholdArgs) -> Result<(), CliError> {
    let gammas = args.gammas.values(|| vec![1.0, 9.0])?;
    let method = match args.method {
        MethodArg::Bisection => Method::Bisection,
        MethodArg::ClosedForm => Method::ClosedForm,
    };
    let rows = phasemap::threshold_table(&gammas, method)?;
    emit(args.out.as_deref(), |w| match args.format {
        ThresholdFormat::Csv => phasemap::write_thresholds_csv(&rows, w),
        ThresholdFormat::Json => write_json(w, &phasemap::thresholds_to_json(&rows)),
        ThresholdFormat::Text => write_thresholds_text(w, &rows),
    })
}

fn write_thresholds_text(w: &mut dyn Write, rows: &[ThresholdRow]) -> io::Result<()> {
    let cell = |x: Option<f64>| x.map_or("-".to_string(), sig);
    for r in rows {
        writeln!(w, "gamma = {}  theta = {}", sig(r.gamma), sig(r.theta))?;
        for (name, v) in [
            ("entangled", r.entangled),
            ("steer", r.steer),
            ("bell", r.bell),
            ("unsteer_root", r.unsteer_root),
            ("hidden_steer_f", r.hidden_steer_f),
            ("hidden_steer_g", r.hidden_steer_g),
            ("hidden_bell_f", r.hidden_bell_f),
            ("hidden_bell_g", r.hidden_bell_g),
            ("delta_closed", r.delta_closed),
            ("delta_operational", r.delta_operational),
        ] {
            writeln!(w, "  {name:<18} {}", cell(v))?;
        }
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    if matches!(args.filter, FilterArg::Custom) {
        return Err(CliError::Usage("simulate supports --filter none, f or g".into()));
    }
    let params = args.angle.params(args.p)?;
    let config = ExperimentConfig {
        params,
        filter: named_filter(args.filter),
        n_per_setting: args.n,
        accidentals: args.accidentals,
        sets: args.sets,
        fidelity: args.fidelity,
        seed: args.seed,
        subtract_accidentals: args.subtract_accidentals,
    };
    let report = run_experiment(&config)?;
    if let Some(path) = &args.out {
        emit(Some(path), |w| write_json(w, &report))?;
    }
    if let Some(path) = &args.per_set_csv {
        emit(Some(path), |w| write_per_set_csv(w, &report))?;
    }
    emit(None, |w| match args.format {
        TextOrJson::Json => write_json(w, &report),
        TextOrJson::Text => write_simulate_text(w, &report),
    })
}

fn write_per_set_csv(w: &mut dyn Write, r: &ExperimentReport) -> io::Result<()> {
    writeln!(w, "set,S,T,TU,p_hat,theta_hat")?;
    let v = &r.per_set_values;
    for i in 0..v.s.len() {
        writeln!(
            w,
            "{i},{},{},{},{},{}",
            sig(v.s[i]),
            sig(v.t[i]),
            sig(v.tu[i]),
            sig(v.p_hat[i]),
            sig(v.theta_hat[i])
        )?;
    }
    Ok(())
}

fn write_simulate_text(w: &mut dyn Write, r: &ExperimentReport) -> io::Result<()> {
    writeln!(
        w,
        "p = {}  gamma = {}  filter = {}  fidelity = {}  sets = {}  n = {}  accidentals = {}  seed = {}",
        sig(r.p),
        sig(r.gamma),
        r.filter,
        sig(r.fidelity),
        r.sets,
        r.n_per_setting,
        sig(r.accidentals),
        r.seed
    )?;
    for (name, mean, std, sem, exact) in [
        ("S", r.s_mean, r.s_std, r.s_sem, r.s_exact),
        ("T", r.t_mean, r.t_std, r.t_sem, r.t_exact),
        ("TU", r.tu_mean, r.tu_std, r.tu_sem, r.tu_exact),
    ] {
        writeln!(w, "{name:<3}= {} ± {} (sem {}, exact {})", sig(mean), sig(std), sig(sem), sig(exact))?;
    }
    writeln!(w, "success_prob = {}", sig(r.success_prob))
}

fn crosscheck_cmd(args: CrosscheckArgs) -> Result<(), CliError> {
    let report = crosscheck(&default_points())?;
    if let Some(path) = &args.out {
        emit(Some(path), |w| write_json(w, &report))?;
    }
    emit(None, |w| match args.format {
        TextOrJson::Json => write_json(w, &report),
        TextOrJson::Text => write_crosscheck_text(w, &report),
    })
}

fn write_crosscheck_text(w: &mut dyn Write, r: &CrosscheckReport) -> io::Result<()> {
    writeln!(w, "{:<18} {:>6} {:>14} {:>8}  note", "quantity", "points", "max_abs_diff", "agrees")?;
    for q in &r.summary {
        writeln!(w, "{:<18} {:>6} {:>14} {:>8}  {}", q.quantity, q.points, sig(q.max_abs_diff), q.agrees, q.note)?;
    }
    Ok(())
}
