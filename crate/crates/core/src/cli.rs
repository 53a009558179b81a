//! Command-line front end.
//!
//! Subcommands: `model list`, `evolve`, `structure`, `contract`, `verify`.
//! Exit codes: 0 success or finding, 1 oracle/spec failure, 2 usage error,
//! 3 conditioning refusal.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::contraction::{classify, LieClassification};
use crate::deformed::{
    asymptotic_structure_constants, default_schedule, LimitReport, StructureTensor,
};
use crate::jsonio;
use crate::lindblad::{adjoint_generator, build_generator, LindbladSpec, Superoperator};
use crate::matrix::Matrix;
use crate::models::{self, ModelInstance};
use crate::operator::{matrix_unit_basis, Operator, OperatorBasis};
use crate::{Error, Result, Tolerances};

#[derive(Parser)]
#[command(
    name = "lindblad-algebra",
    about = "Deformed observable products and algebra contraction for Lindblad dynamics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model registry operations.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
    /// Evolve an observable in the Heisenberg picture over a time schedule.
    Evolve(EvolveArgs),
    /// Structure constants C(t) over a schedule, plus their t→∞ limit.
    Structure(StructureArgs),
    /// Contract the algebra and classify the limit.
    Contract(ContractArgs),
    /// Run a registry model's oracle and channel checks.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum ModelCommand {
    /// List registered models.
    List {
        /// Machine-readable registry dump.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct SourceArgs {
    /// Registry model name.
    #[arg(long, conflicts_with = "spec")]
    model: Option<String>,
    /// Path to a LindbladSpec JSON file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Rate scale for registry models.
    #[arg(long)]
    gamma: Option<f64>,
    /// Analysis basis: "canonical" or a basis JSON file.
    #[arg(long, default_value = "canonical")]
    basis: String,
}

#[derive(Args)]
struct ScheduleArgs {
    /// Explicit comma-separated times.
    #[arg(long, value_delimiter = ',', conflicts_with = "schedule")]
    times: Option<Vec<f64>>,
    /// Geometric schedule tmin:tmax:count.
    #[arg(long)]
    schedule: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ToleranceArgs {
    /// Override the limit-extraction tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the conditioning ceiling for propagator inversion.
    #[arg(long = "cond-max")]
    cond_max: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Observable: a basis label of the model, or a matrix JSON file.
    #[arg(long)]
    observable: String,
}

#[derive(Args)]
struct StructureArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    tolerances: ToleranceArgs,
}

#[derive(Args)]
struct ContractArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    tolerances: ToleranceArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Registry model name.
    #[arg(long)]
    model: String,
    /// Rate scale.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    json: bool,
}

/// Entry point for the binary. Never returns.
pub fn main() -> ! {
    let code = run(std::env::args_os());
    std::process::exit(code);
}

fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on stdout with code 0 and usage
            // errors on stderr with code 2
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::IllConditioned { .. } => 3,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Model { command } => match command {
            ModelCommand::List { json } => cmd_model_list(json),
        },
        Command::Evolve(args) => cmd_evolve(args),
        Command::Structure(args) => cmd_structure(args),
        Command::Contract(args) => cmd_contract(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn cmd_model_list(as_json: bool) -> Result<()> {
    if as_json {
        let entries: Vec<Value> = models::REGISTRY
            .iter()
            .map(|name| {
                let m = models::build(name, None)?;
                Ok(m.to_json())
            })
            .collect::<Result<_>>()?;
        println!("{}", serde_json::to_string_pretty(&Value::Array(entries))?);
    } else {
        println!("{:<26} {:>4}  expected contraction", "model", "dim");
        for name in models::REGISTRY {
            let m = models::build(name, None)?;
            let label = m
                .expected_contraction
                .map(|l| l.as_str())
                .unwrap_or("none recorded");
            println!("{:<26} {:>4}  {}", name, m.dim(), label);
        }
    }
    Ok(())
}

/// A resolved dynamics source: registry model or spec file.
struct Source {
    name: String,
    adjoint: Superoperator,
    basis: OperatorBasis,
    basis_labels: Vec<String>,
    default_times: Vec<f64>,
    interior: Option<usize>,
    tolerances: Tolerances,
    model: Option<ModelInstance>,
}

fn load_source(args: &SourceArgs) -> Result<Source> {
    if let Some(name) = &args.model {
        let model = models::build(name, args.gamma)?;
        let basis = match args.basis.as_str() {
            "canonical" => model.canonical_basis.clone(),
            path => load_basis_file(Path::new(path), &model.analysis.tolerances)?,
        };
        let labels = basis.labels().to_vec();
        Ok(Source {
            name: model.name.clone(),
            adjoint: model.adjoint.clone(),
            basis,
            basis_labels: labels,
            default_times: model.analysis.schedule.clone(),
            interior: model.analysis.interior,
            tolerances: model.analysis.tolerances,
            model: Some(model),
        })
    } else if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path)?;
        let value: Value = serde_json::from_str(&text)?;
        let spec = LindbladSpec::from_json(&value)?;
        let tol = Tolerances::default();
        let generator = build_generator(&spec)?;
        let adjoint = adjoint_generator(&generator);
        let basis = match args.basis.as_str() {
            "canonical" => matrix_unit_basis(spec.dim),
            bpath => load_basis_file(Path::new(bpath), &tol)?,
        };
        let gamma_ref = spec
            .jumps
            .iter()
            .map(|(_, r)| *r)
            .fold(0.0f64, f64::max)
            .max(1e-12);
        let labels = basis.labels().to_vec();
        let default_times = default_schedule(&adjoint, gamma_ref, &tol);
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "spec".into());
        Ok(Source {
            name,
            adjoint,
            basis,
            basis_labels: labels,
            default_times,
            interior: None,
            tolerances: tol,
            model: None,
        })
    } else {
        Err(Error::Spec("either --model or --spec is required".into()))
    }
}

fn load_basis_file(path: &Path, tol: &Tolerances) -> Result<OperatorBasis> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    let labels: Vec<String> = value["labels"]
        .as_array()
        .ok_or_else(|| Error::Basis("basis file needs a 'labels' array".into()))?
        .iter()
        .map(|v| v.as_str().unwrap_or_default().to_string())
        .collect();
    let elements: Vec<Matrix> = value["elements"]
        .as_array()
        .ok_or_else(|| Error::Basis("basis file needs an 'elements' array".into()))?
        .iter()
        .map(jsonio::matrix_from_json)
        .collect::<Result<_>>()?;
    OperatorBasis::new(elements, labels, tol)
}

fn resolve_times(args: &ScheduleArgs, default: &[f64]) -> Result<Vec<f64>> {
    let times = if let Some(times) = &args.times {
        times.clone()
    } else if let Some(sched) = &args.schedule {
        let parts: Vec<&str> = sched.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Schedule(format!(
                "schedule must be tmin:tmax:count, got '{sched}'"
            )));
        }
        let tmin: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Schedule(format!("bad tmin '{}'", parts[0])))?;
        let tmax: f64 = parts[1]
            .parse()
            .map_err(|_| Error::Schedule(format!("bad tmax '{}'", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| Error::Schedule(format!("bad count '{}'", parts[2])))?;
        if !(tmin > 0.0) || !(tmax > tmin) || count < 2 {
            return Err(Error::Schedule(
                "geometric schedule needs 0 < tmin < tmax and count >= 2".into(),
            ));
        }
        let ratio = (tmax / tmin).powf(1.0 / (count as f64 - 1.0));
        (0..count).map(|k| tmin * ratio.powi(k as i32)).collect()
    } else {
        default.to_vec()
    };
    if times.is_empty() {
        return Err(Error::Schedule("empty time list".into()));
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Schedule("times must be strictly increasing".into()));
        }
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Schedule("times must be finite and >= 0".into()));
    }
    Ok(times)
}

fn apply_tolerance_overrides(tol: &mut Tolerances, args: &ToleranceArgs) {
    if let Some(t) = args.tol {
        tol.limit = t;
    }
    if let Some(c) = args.cond_max {
        tol.cond_max = c;
    }
}

fn emit(output: &OutputArgs, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn resolve_observable(source: &Source, spec: &str) -> Result<Operator> {
    if let Some(op) = source.basis.by_label(spec) {
        return Ok(op.clone());
    }
    if let Some(model) = &source.model {
        if let Some(oracle) = model.oracles.iter().find(|o| o.label == spec) {
            return Ok(oracle.observable.clone());
        }
    }
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        let value: Value = serde_json::from_str(&text)?;
        let m = jsonio::matrix_from_json(&value)?;
        if m.rows() != source.adjoint.dim() {
            return Err(Error::Dimension {
                expected: source.adjoint.dim(),
                got: m.rows(),
            });
        }
        return Ok(m);
    }
    Err(Error::Spec(format!(
        "unknown observable '{spec}': not a basis label of [{}] and not a file",
        source.basis_labels.join(", ")
    )))
}

fn cmd_evolve(args: EvolveArgs) -> Result<()> {
    let source = load_source(&args.source)?;
    let times = resolve_times(&args.schedule, &source.default_times)?;
    let observable = resolve_observable(&source, &args.observable)?;
    let evolved: Vec<Operator> = times
        .iter()
        .map(|&t| source.adjoint.propagator(t).apply(&observable))
        .collect::<Result<_>>()?;
    match args.output.format {
        Format::Json => {
            let states: Vec<Value> = evolved.iter().map(jsonio::matrix_to_json).collect();
            let doc = json!({
                "model": source.name,
                "observable": args.observable,
                "times": times,
                "evolved": states,
            });
            emit(&args.output, &serde_json::to_string_pretty(&doc)?)
        }
        Format::Csv => {
            let mut out = String::from("time,i,j,re,im\n");
            for (t, m) in times.iter().zip(&evolved) {
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        let z = m[(i, j)];
                        out.push_str(&format!("{t},{i},{j},{},{}\n", z.re, z.im));
                    }
                }
            }
            emit(&args.output, out.trim_end())
        }
    }
}

fn structure_series(
    source: &Source,
    times: &[f64],
    tol: &Tolerances,
) -> Result<(Vec<StructureTensor>, LimitReport)> {
    let tensors = crate::deformed::structure_constant_series(
        &source.adjoint,
        &source.basis,
        times,
        source.interior,
        tol,
    )?;
    let report = crate::deformed::extrapolate_limit(times, &tensors, tol);
    Ok((tensors, report))
}

fn cmd_structure(args: StructureArgs) -> Result<()> {
    let source = load_source(&args.source)?;
    let times = resolve_times(&args.schedule, &source.default_times)?;
    let mut tol = source.tolerances;
    apply_tolerance_overrides(&mut tol, &args.tolerances);
    let (tensors, report) = structure_series(&source, &times, &tol)?;
    match args.output.format {
        Format::Json => {
            let doc = json!({
                "model": source.name,
                "basis_labels": source.basis_labels,
                "times": times,
                "tensors": tensors.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
                "limit_report": report.to_json(),
            });
            emit(&args.output, &serde_json::to_string_pretty(&doc)?)
        }
        Format::Csv => {
            let mut out = String::from("time,k,i,j,re,im\n");
            let n = source.basis.len();
            for tensor in &tensors {
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let z = tensor.get(k, i, j);
                            out.push_str(&format!(
                                "{},{k},{i},{j},{},{}\n",
                                tensor.time(),
                                z.re,
                                z.im
                            ));
                        }
                    }
                }
            }
            if let Some(limit) = &report.limit {
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let z = limit.get(k, i, j);
                            out.push_str(&format!("inf,{k},{i},{j},{},{}\n", z.re, z.im));
                        }
                    }
                }
            }
            emit(&args.output, out.trim_end())
        }
    }
}

fn cmd_contract(args: ContractArgs) -> Result<()> {
    let source = load_source(&args.source)?;
    let times = resolve_times(&args.schedule, &source.default_times)?;
    let mut tol = source.tolerances;
    apply_tolerance_overrides(&mut tol, &args.tolerances);
    let report = asymptotic_structure_constants(
        &source.adjoint,
        &source.basis,
        &times,
        source.interior,
        &tol,
    )?;
    let classification: Option<LieClassification> =
        report.limit.as_ref().map(|limit| classify(limit, &tol));
    let doc = json!({
        "model": source.name,
        "basis_labels": source.basis_labels,
        "converged": report.converged,
        "classification": match &classification {
            Some(c) => c.to_json(),
            // a non-converged limit is a finding, not a failure
            None => json!({ "label": "unclassified" }),
        },
        "limit_report": report.to_json(),
    });
    emit(&args.output, &serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let model = models::build(&args.model, args.gamma)?;
    let report = models::verify_model(&model)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report.to_json())?);
    } else {
        println!("verify {}:", report.model);
        for check in &report.checks {
            println!(
                "  {} {:<42} deviation {:9.3e}  (threshold {:6.1e})",
                if check.passed { "PASS" } else { "FAIL" },
                check.name,
                check.deviation,
                check.threshold,
            );
        }
        println!(
            "{}: max deviation {:.3e}",
            if report.passed() { "PASS" } else { "FAIL" },
            report.max_deviation()
        );
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Error::Spec(format!(
            "{} oracle checks failed",
            report.checks.iter().filter(|c| !c.passed).count()
        )))
    }
}
