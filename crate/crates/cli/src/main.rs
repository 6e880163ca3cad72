//! Command-line front end: plan, validate, oracle runs, benchmarks and
//! corpus generation.
//!
//! Exit codes: 0 success, 1 error, 2 no path, 3 path fails validation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use corridor_theta::io::corpus::{comparison_suite, generate_corpus, random_scenarios, CorpusParams, RandomParams, SuiteKind};
use corridor_theta::io::result::{run_planner, PlannerKind, ResultRecord, RunStatus};
use corridor_theta::io::svg::render_svg;
use corridor_theta::oracle::{compare_runs, Comparison};
use corridor_theta::{build_world_in, find_holes, parse_scenario, validate_path, Error, ScenarioConfig, Vertex};

const EXIT_ERROR: u8 = 1;
const EXIT_NO_PATH: u8 = 2;
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(name = "corridor-theta", version, about = "Any-angle planning under flight constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one scenario and print the result record.
    Plan {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "constrained")]
        planner: PlannerKind,
        /// Write the result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also render the world and path as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check a path against a scenario's constraints.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
        /// A result record, a planned path, or a JSON list of vertices.
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the brute-force and/or exhaustive oracles on one scenario.
    Oracle {
        #[arg(long)]
        scenario: PathBuf,
        /// brute or exhaustive; both when omitted.
        #[arg(long)]
        planner: Vec<PlannerKind>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run planners over every scenario in a corpus directory.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        /// Planners to run; theta and constrained when omitted.
        #[arg(long)]
        planner: Vec<PlannerKind>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-planner summary as CSV.
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Generate a scenario corpus into a directory.
    Gen {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "corridor")]
        kind: CorpusKind,
        /// Number of scenarios; the kind's default when omitted.
        #[arg(long)]
        count: Option<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorpusKind {
    /// 650x105 corridor fragments.
    Corridor,
    /// 5x5 to 8x8 random instances.
    Small,
    /// 16x16 to 64x64 random instances.
    Medium,
    /// 40x40 instances with holes across the start-goal line.
    Holes,
    /// 40x40 instances with obstacles across the start-goal line.
    Obstacles,
}

struct Failure {
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::DegenerateSegment | Error::InvalidPolyline(_) | Error::MalformedPath(_) => "malformed_path",
            Error::InfeasibleEndpoints { .. } => "infeasible_endpoints",
            Error::InvalidConstraints(_) => "invalid_constraints",
            Error::Parse { .. } | Error::Json(_) => "parse",
            Error::MapFormat(_) => "map_format",
            Error::OracleExhausted { .. } | Error::OracleBoundExceeded(_) => "oracle_bound",
            Error::Io(_) | Error::Csv(_) => "io",
        };
        Failure { kind, message: e.to_string() }
    }
}

impl Failure {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Failure { kind, message: message.into() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::new("io", format!("{}: {e}", path.display()))
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_ERROR);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cmd: Command) -> CliResult<u8> {
    match cmd {
        Command::Plan { scenario, planner, out, svg, format } => plan(&scenario, planner, out.as_deref(), svg.as_deref(), format),
        Command::Validate { scenario, path, out } => validate(&scenario, &path, out.as_deref()),
        Command::Oracle { scenario, planner, out, format } => oracle(&scenario, planner, out.as_deref(), format),
        Command::Bench { corpus, planner, out, metrics, format } => {
            bench(&corpus, planner, out.as_deref(), metrics.as_deref(), format)
        }
        Command::Gen { corpus, seed, kind, count } => gen(&corpus, seed, kind, count),
    }
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::io(path, e))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_scenario(path: &Path) -> CliResult<ScenarioConfig> {
    Ok(parse_scenario(&read(path)?)?)
}

/// Scenario map references resolve against the scenario file's directory.
fn base_dir(path: &Path) -> Option<&Path> {
    path.parent().filter(|p| !p.as_os_str().is_empty())
}

fn records_text(records: Vec<ResultRecord>, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&records).map_err(Error::from)? + "\n"),
        Format::Csv => Ok(Comparison { records, metrics: Vec::new() }.records_csv()?),
    }
}

fn status_code(records: &[ResultRecord]) -> u8 {
    if records.iter().any(|r| r.status == RunStatus::Error) {
        EXIT_ERROR
    } else if records.iter().any(|r| r.status == RunStatus::NoPath) {
        EXIT_NO_PATH
    } else {
        0
    }
}

fn plan(path: &Path, planner: PlannerKind, out: Option<&Path>, svg: Option<&Path>, format: Format) -> CliResult<u8> {
    let scenario = load_scenario(path)?;
    let dir = base_dir(path);
    let rec = run_planner(&scenario, dir, planner)?;
    if let Some(e) = &rec.error {
        eprintln!("{}", json!({ "error": "oracle_bound", "message": e }));
    }
    let code = status_code(std::slice::from_ref(&rec));
    if let Some(svg_path) = svg {
        let world = build_world_in(&scenario, dir)?;
        let holes = find_holes(&world);
        let mut shown = vec![rec.clone()];
        if planner != PlannerKind::Theta {
            shown.insert(0, run_planner(&scenario, dir, PlannerKind::Theta)?);
        }
        let doc = render_svg(&world, &holes, &shown);
        fs::write(svg_path, doc).map_err(|e| Failure::io(svg_path, e))?;
    }
    let text = match format {
        Format::Json => rec.to_json()? + "\n",
        Format::Csv => records_text(vec![rec], format)?,
    };
    emit(out, &text)?;
    Ok(code)
}

/// Turning points from a result record, a planned path, or a bare list.
fn path_points(v: Value) -> CliResult<Vec<Vertex>> {
    let bad = |m: &str| Failure::new("parse", m.to_owned());
    let points = match v {
        Value::Array(_) => v,
        Value::Object(mut o) => match o.remove("turning_points") {
            Some(tp) => tp,
            None => match o.remove("path") {
                Some(Value::Object(mut p)) => p.remove("turning_points").ok_or_else(|| bad("path has no turning_points"))?,
                Some(Value::Null) => return Err(Failure::new("no_path", "result record has no path")),
                _ => return Err(bad("expected a result record, a planned path or a vertex list")),
            },
        },
        _ => return Err(bad("expected a result record, a planned path or a vertex list")),
    };
    serde_json::from_value(points).map_err(|e| bad(&format!("turning points: {e}")))
}

fn validate(scenario_path: &Path, path: &Path, out: Option<&Path>) -> CliResult<u8> {
    let scenario = load_scenario(scenario_path)?;
    let value: Value = serde_json::from_slice(&read(path)?).map_err(Error::from)?;
    let points = path_points(value)?;
    let world = build_world_in(&scenario, base_dir(scenario_path))?;
    let holes = find_holes(&world);
    let report = validate_path(&points, &world, &holes, &scenario.constraints)?;
    let doc = json!({ "pass": report.pass, "failures": report.failures(), "report": report });
    emit(out, &(serde_json::to_string_pretty(&doc).map_err(Error::from)? + "\n"))?;
    Ok(if report.pass { 0 } else { EXIT_INVALID })
}

fn oracle(path: &Path, planners: Vec<PlannerKind>, out: Option<&Path>, format: Format) -> CliResult<u8> {
    let planners = if planners.is_empty() { vec![PlannerKind::Brute, PlannerKind::Exhaustive] } else { planners };
    if let Some(p) = planners.iter().find(|p| !matches!(p, PlannerKind::Brute | PlannerKind::Exhaustive)) {
        return Err(Failure::new("usage", format!("`{p}` is not an oracle (expected brute or exhaustive)")));
    }
    let scenario = load_scenario(path)?;
    let records =
        planners.iter().map(|&p| run_planner(&scenario, base_dir(path), p)).collect::<Result<Vec<_>, _>>()?;
    for e in records.iter().filter_map(|r| r.error.as_ref()) {
        eprintln!("{}", json!({ "error": "oracle_bound", "message": e }));
    }
    let code = status_code(&records);
    emit(out, &records_text(records, format)?)?;
    Ok(code)
}

/// Every `*.json` scenario in `dir`, sorted by file name.
fn load_corpus(dir: &Path) -> CliResult<Vec<ScenarioConfig>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Failure::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
        .iter()
        .map(|f| {
            let mut s = load_scenario(f).map_err(|e| Failure::new(e.kind, format!("{}: {}", f.display(), e.message)))?;
            if s.id.is_none() {
                s.id = f.file_stem().map(|x| x.to_string_lossy().into_owned());
            }
            Ok(s)
        })
        .collect()
}

fn bench(dir: &Path, planners: Vec<PlannerKind>, out: Option<&Path>, metrics: Option<&Path>, format: Format) -> CliResult<u8> {
    let planners = if planners.is_empty() { vec![PlannerKind::Theta, PlannerKind::Constrained] } else { planners };
    let scenarios = load_corpus(dir)?;
    if scenarios.is_empty() {
        return Err(Failure::new("usage", format!("{}: no scenario files", dir.display())));
    }
    let cmp = compare_runs(&scenarios, &planners, Some(dir))?;
    eprint!("{}", cmp.metrics_text());
    if let Some(m) = metrics {
        fs::write(m, cmp.metrics_csv()?).map_err(|e| Failure::io(m, e))?;
    }
    let text = match format {
        Format::Csv => cmp.records_csv()?,
        Format::Json => {
            let doc = json!({ "records": cmp.records, "metrics": cmp.metrics });
            serde_json::to_string_pretty(&doc).map_err(Error::from)? + "\n"
        }
    };
    emit(out, &text)?;
    Ok(0)
}

fn gen(dir: &Path, seed: u64, kind: CorpusKind, count: Option<usize>) -> CliResult<u8> {
    let scenarios = match kind {
        CorpusKind::Corridor => {
            let mut params = CorpusParams::default();
            params.count = count.unwrap_or(params.count);
            generate_corpus(&params, seed)
        }
        CorpusKind::Small => random_scenarios(&RandomParams::small(), seed, count.unwrap_or(100)),
        CorpusKind::Medium => random_scenarios(&RandomParams::medium(), seed, count.unwrap_or(100)),
        CorpusKind::Holes => comparison_suite(SuiteKind::Holes, seed, count.unwrap_or(20)),
        CorpusKind::Obstacles => comparison_suite(SuiteKind::Obstacles, seed, count.unwrap_or(20)),
    };
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    for (i, s) in scenarios.iter().enumerate() {
        let name = s.id.clone().unwrap_or_else(|| format!("scenario-{i:03}"));
        let file = dir.join(format!("{name}.json"));
        fs::write(&file, s.to_json()? + "\n").map_err(|e| Failure::io(&file, e))?;
    }
    eprintln!("wrote {} scenarios to {}", scenarios.len(), dir.display());
    Ok(0)
}
