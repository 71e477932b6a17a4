//! `steerlab` CLI: every analysis as a reproducible, scriptable run.
//!
//! Exit codes: 0 success, 2 scientific bound violation (implementation bug),
//! 64 usage error, 65 malformed input data, 74 I/O error.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use steerlab::bd;
use steerlab::error::Error as LibError;
use steerlab::report::round_sig15;
use steerlab::steering::{
    corrected_local_bound, empirical_corrected_bound, fact2_correction, lhs_bound, Assemblage,
    SteeringFunctional,
};
use steerlab::tomography::run_fact1_experiment_full;
use steerlab::trust::{trust_from_deviations, trust_from_fidelity};
use steerlab::ComplexSquareMatrix;

const EXIT_VIOLATION: i32 = 2;
const EXIT_USAGE: i32 = 64;
const EXIT_DATA: i32 = 65;
const EXIT_IO: i32 = 74;

#[derive(Parser)]
#[command(
    name = "steerlab",
    version,
    about = "Steering-bound analysis under imprecise trusted-side measurements"
)]
struct Cli {
    /// Worker threads for Monte-Carlo and enumeration (default: all cores).
    /// Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the tomography deviation bound by seeded Monte-Carlo
    Tomography(TomographyArgs),
    /// Exact local bound of a steering functional
    LhsBound(LhsArgs),
    /// Local bound plus the analytic distrust correction
    CorrectedBound(CorrectedArgs),
    /// Monte-Carlo search for the realized corrected bound
    EmpiricalBound(EmpiricalArgs),
    /// Ratio curves of corrected to quantum bound for the MUB family
    BdCurve(BdCurveArgs),
    /// Minimum trust for witnessing steering with the MUB family
    BdThreshold(BdThresholdArgs),
    /// Trust parameter from observable deviations or average fidelity
    Trust(TrustArgs),
}

#[derive(Args)]
struct TomographyArgs {
    /// Trusted-side dimension d
    #[arg(long)]
    dim: usize,
    /// Per-observable deviation budget (squared Hilbert-Schmidt units)
    #[arg(long, conflicts_with = "gamma")]
    epsilon: Option<f64>,
    /// Trust parameter; converted to epsilon = 2d(1 - gamma)
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path, '-' for stdout
    #[arg(long, short, default_value = "-")]
    out: String,
    /// Optional per-sample CSV (sample_index, deviation)
    #[arg(long)]
    per_sample: Option<String>,
}

#[derive(Args)]
struct LhsArgs {
    /// Functional file: {"scenario": ..., "F": {"b,y": matrix, ...}}
    #[arg(long)]
    functional: String,
    #[arg(long, short, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct CorrectedArgs {
    #[arg(long)]
    functional: String,
    #[arg(long, conflicts_with = "gamma")]
    epsilon: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Assemblage evaluating the correction weight; defaults to the
    /// enumerated bound-attaining assemblage
    #[arg(long)]
    assemblage: Option<String>,
    #[arg(long, short, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct EmpiricalArgs {
    #[arg(long)]
    functional: String,
    #[arg(long, conflicts_with = "gamma")]
    epsilon: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Assemblage to perturb; defaults to the enumerated bound-attaining
    /// assemblage
    #[arg(long)]
    assemblage: Option<String>,
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct BdCurveArgs {
    /// Dimensions: comma list or start:end[:step], e.g. "2,5,10" or "2:20:2"
    #[arg(long)]
    dims: String,
    /// Trust grid: comma list or start:end:step, e.g. "0.90:1.00:0.001"
    #[arg(long, conflicts_with = "epsilons")]
    gamma: Option<String>,
    /// Budget grid alternative to --gamma
    #[arg(long)]
    epsilons: Option<String>,
    /// csv (default) or json
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long, short, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct BdThresholdArgs {
    #[arg(long)]
    dims: String,
    /// json (default) or csv
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long, short, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct TrustArgs {
    /// Average measurement fidelity in [0, 1]
    #[arg(long, requires = "dim", conflicts_with_all = ["ideal", "actual"])]
    f_avg: Option<f64>,
    /// Dimension, required with --f-avg
    #[arg(long)]
    dim: Option<usize>,
    /// JSON array of intended observables (matrix wire format)
    #[arg(long, requires = "actual")]
    ideal: Option<String>,
    /// JSON array of implemented observables
    #[arg(long)]
    actual: Option<String>,
    #[arg(long, short, default_value = "-")]
    out: String,
}

enum Failure {
    Usage(String),
    Data(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Io(m) => m,
        }
    }
}

/// Library errors raised while acting on flag values are usage errors.
fn usage(err: LibError) -> Failure {
    Failure::Usage(err.to_string())
}

/// Library errors raised while validating file contents are data errors.
fn data(err: LibError) -> Failure {
    Failure::Data(err.to_string())
}

type CliResult<T> = Result<T, Failure>;

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };

    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    let outcome = match cli.command {
        Command::Tomography(args) => cmd_tomography(args),
        Command::LhsBound(args) => cmd_lhs_bound(args),
        Command::CorrectedBound(args) => cmd_corrected_bound(args),
        Command::EmpiricalBound(args) => cmd_empirical_bound(args),
        Command::BdCurve(args) => cmd_bd_curve(args),
        Command::BdThreshold(args) => cmd_bd_threshold(args),
        Command::Trust(args) => cmd_trust(args),
    };
    match outcome {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            failure.exit_code()
        }
    }
}

fn resolve_epsilon(epsilon: Option<f64>, gamma: Option<f64>, dim: usize) -> CliResult<f64> {
    match (epsilon, gamma) {
        (Some(e), None) => Ok(e),
        (None, Some(g)) => {
            if !(0.0..=1.0).contains(&g) {
                return Err(Failure::Usage(format!("--gamma {g} must lie in [0, 1]")));
            }
            Ok(2.0 * dim as f64 * (1.0 - g))
        }
        (None, None) => Err(Failure::Usage(
            "one of --epsilon or --gamma is required".into(),
        )),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn read_file(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))
}

fn write_output(path: &str, content: &str) -> CliResult<()> {
    if path == "-" {
        print!("{content}");
        return Ok(());
    }
    if let Some(parent) = Path::new(path).parent() {
        if !parent.as_os_str().is_empty() && !parent.exists() {
            return Err(Failure::Io(format!("{path}: parent directory missing")));
        }
    }
    fs::write(path, content).map_err(|e| Failure::Io(format!("{path}: {e}")))
}

/// Round every number to 15 significant digits before emission.
fn rounded(mut value: Value) -> Value {
    round_in_place(&mut value);
    value
}

fn round_in_place(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig15(f)) {
                        *n = rounded;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_in_place),
        Value::Object(map) => map.values_mut().for_each(round_in_place),
        _ => {}
    }
}

fn emit_json(path: &str, value: Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&rounded(value)).expect("serializable");
    write_output(path, &format!("{text}\n"))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn cmd_tomography(args: TomographyArgs) -> CliResult<i32> {
    let epsilon = resolve_epsilon(args.epsilon, args.gamma, args.dim)?;
    let (summary, deviations) =
        run_fact1_experiment_full(args.dim, epsilon, args.samples, args.seed).map_err(usage)?;
    if let Some(path) = &args.per_sample {
        let mut csv = String::from("sample_index,deviation\n");
        for (i, dev) in deviations.iter().enumerate() {
            let _ = writeln!(csv, "{},{}", i, steerlab::report::fmt_g15(*dev));
        }
        write_output(path, &csv)?;
    }
    emit_json(&args.out, to_value(&summary))?;
    // a bound violation is an implementation bug, flagged for CI
    Ok(if summary.violations > 0 {
        EXIT_VIOLATION
    } else {
        0
    })
}

fn load_functional(path: &str) -> CliResult<SteeringFunctional> {
    SteeringFunctional::from_json(&read_file(path)?).map_err(data)
}

fn load_assemblage(path: &str) -> CliResult<Assemblage> {
    Assemblage::from_json(&read_file(path)?).map_err(data)
}

fn cmd_lhs_bound(args: LhsArgs) -> CliResult<i32> {
    let functional = load_functional(&args.functional)?;
    let result = lhs_bound(&functional).map_err(usage)?;
    emit_json(
        &args.out,
        json!({
            "beta_L": result.beta_l,
            "strategy": result.optimal_strategy.outcomes(),
        }),
    )?;
    Ok(0)
}

fn cmd_corrected_bound(args: CorrectedArgs) -> CliResult<i32> {
    let functional = load_functional(&args.functional)?;
    let epsilon = resolve_epsilon(args.epsilon, args.gamma, functional.scenario().d_alice)?;
    let (beta_l, strategy, correction) = match &args.assemblage {
        None => {
            let result = corrected_local_bound(&functional, epsilon).map_err(usage)?;
            (
                result.local.beta_l,
                result.local.optimal_strategy.outcomes().to_vec(),
                result.correction,
            )
        }
        Some(path) => {
            let assemblage = load_assemblage(path)?;
            let local = lhs_bound(&functional).map_err(usage)?;
            let correction = fact2_correction(&functional, &assemblage, epsilon).map_err(usage)?;
            (
                local.beta_l,
                local.optimal_strategy.outcomes().to_vec(),
                correction,
            )
        }
    };
    emit_json(
        &args.out,
        json!({
            "beta_L": beta_l,
            "strategy": strategy,
            "epsilon": epsilon,
            "correction": correction,
            "beta_L_corr": beta_l + correction,
        }),
    )?;
    Ok(0)
}

fn cmd_empirical_bound(args: EmpiricalArgs) -> CliResult<i32> {
    let functional = load_functional(&args.functional)?;
    let epsilon = resolve_epsilon(args.epsilon, args.gamma, functional.scenario().d_alice)?;
    let (assemblage, strategy) = match &args.assemblage {
        None => {
            let local = lhs_bound(&functional).map_err(usage)?;
            (
                local.attaining_assemblage,
                Some(local.optimal_strategy.outcomes().to_vec()),
            )
        }
        Some(path) => (load_assemblage(path)?, None),
    };
    let summary =
        empirical_corrected_bound(&functional, &assemblage, epsilon, args.samples, args.seed)
            .map_err(usage)?;
    let mut out = to_value(&summary);
    if let Some(strategy) = strategy {
        out["strategy"] = json!(strategy);
    }
    emit_json(&args.out, out)?;
    Ok(if summary.violations > 0 {
        EXIT_VIOLATION
    } else {
        0
    })
}

fn cmd_bd_curve(args: BdCurveArgs) -> CliResult<i32> {
    let dims = parse_dim_grid(&args.dims)?;
    let rows = match (&args.gamma, &args.epsilons) {
        (Some(grid), None) => bd::bd_curve(&dims, &parse_float_grid(grid)?).map_err(usage)?,
        (None, Some(grid)) => {
            bd::bd_curve_from_epsilons(&dims, &parse_float_grid(grid)?).map_err(usage)?
        }
        (None, None) => {
            return Err(Failure::Usage(
                "one of --gamma or --epsilons is required".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    match args.format.as_str() {
        "csv" => {
            let mut buf = Vec::new();
            bd::write_curve_csv(&rows, &mut buf).map_err(|e| Failure::Io(format!("csv: {e}")))?;
            write_output(&args.out, &String::from_utf8(buf).expect("utf8"))?;
        }
        "json" => emit_json(&args.out, to_value(&rows))?,
        other => {
            return Err(Failure::Usage(format!(
                "--format must be csv or json, got {other}"
            )))
        }
    }
    let mut sorted = dims;
    sorted.sort_unstable();
    sorted.dedup();
    for d in sorted {
        let threshold = bd::bd_trust_threshold(d).map_err(usage)?;
        eprintln!(
            "bd-threshold d={d}: {}",
            steerlab::report::fmt_g15(threshold)
        );
    }
    Ok(0)
}

fn cmd_bd_threshold(args: BdThresholdArgs) -> CliResult<i32> {
    let mut dims = parse_dim_grid(&args.dims)?;
    dims.sort_unstable();
    dims.dedup();
    let thresholds: Vec<(usize, f64)> = dims
        .iter()
        .map(|&d| bd::bd_trust_threshold(d).map(|t| (d, t)))
        .collect::<Result<_, _>>()
        .map_err(usage)?;
    match args.format.as_str() {
        "json" => {
            let items: Vec<Value> = thresholds
                .iter()
                .map(|(d, t)| json!({"d": d, "gamma_min": t}))
                .collect();
            emit_json(&args.out, Value::Array(items))?;
        }
        "csv" => {
            let mut csv = String::from("d,gamma_min\n");
            for (d, t) in &thresholds {
                let _ = writeln!(csv, "{},{}", d, steerlab::report::fmt_g15(*t));
            }
            write_output(&args.out, &csv)?;
        }
        other => {
            return Err(Failure::Usage(format!(
                "--format must be json or csv, got {other}"
            )))
        }
    }
    Ok(0)
}

fn load_matrix_list(path: &str) -> CliResult<Vec<ComplexSquareMatrix>> {
    serde_json::from_str(&read_file(path)?).map_err(|e| Failure::Data(format!("{path}: {e}")))
}

fn cmd_trust(args: TrustArgs) -> CliResult<i32> {
    let report = match (args.f_avg, &args.ideal, &args.actual) {
        (Some(f_avg), None, None) => {
            let dim = args.dim.expect("clap requires --dim with --f-avg");
            trust_from_fidelity(f_avg, dim).map_err(usage)?
        }
        (None, Some(ideal), Some(actual)) => {
            let ideal = load_matrix_list(ideal)?;
            let actual = load_matrix_list(actual)?;
            trust_from_deviations(&ideal, &actual, ideal.len()).map_err(data)?
        }
        _ => {
            return Err(Failure::Usage(
                "provide either --f-avg with --dim, or --ideal with --actual".into(),
            ))
        }
    };
    emit_json(&args.out, to_value(&report))?;
    Ok(0)
}

/// "2,5,10" or "2:20" or "2:20:2".
fn parse_dim_grid(text: &str) -> CliResult<Vec<usize>> {
    let bad = |m: String| Failure::Usage(m);
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad(format!(
                "dimension range {text:?} is not start:end[:step]"
            )));
        }
        let start: usize = parts[0]
            .parse()
            .map_err(|_| bad(format!("bad dimension {:?}", parts[0])))?;
        let end: usize = parts[1]
            .parse()
            .map_err(|_| bad(format!("bad dimension {:?}", parts[1])))?;
        let step: usize = if parts.len() == 3 {
            parts[2]
                .parse()
                .map_err(|_| bad(format!("bad step {:?}", parts[2])))?
        } else {
            1
        };
        if step == 0 || end < start {
            return Err(bad(format!("empty dimension range {text:?}")));
        }
        Ok((start..=end).step_by(step).collect())
    } else {
        text.split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| bad(format!("bad dimension {p:?}")))
            })
            .collect()
    }
}

/// "0.9,0.95,1.0" or "0.90:1.00:0.001" (end included up to roundoff).
fn parse_float_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = |m: String| Failure::Usage(m);
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("grid {text:?} is not start:end:step")));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| bad(format!("bad grid value {:?}", parts[0])))?;
        let end: f64 = parts[1]
            .parse()
            .map_err(|_| bad(format!("bad grid value {:?}", parts[1])))?;
        let step: f64 = parts[2]
            .parse()
            .map_err(|_| bad(format!("bad step {:?}", parts[2])))?;
        if !step.is_finite() || step <= 0.0 || end < start {
            return Err(bad(format!("empty grid {text:?}")));
        }
        let mut values = Vec::new();
        let mut k = 0u64;
        loop {
            let v = start + k as f64 * step;
            if v > end + step * 1e-9 {
                break;
            }
            values.push(v.min(end));
            k += 1;
        }
        Ok(values)
    } else {
        text.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad grid value {p:?}")))
            })
            .collect()
    }
}
