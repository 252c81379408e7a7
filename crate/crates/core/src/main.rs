use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use trendsolve::check::check_scenarios;
use trendsolve::correlation::parse_correlation_csv;
use trendsolve::dsl::{parse_model, render_model};
use trendsolve::fixture::{parse_scenarios, render_scenarios};
use trendsolve::graph::build_graph;
use trendsolve::model::TrendModel;
use trendsolve::ode::translate_text;
use trendsolve::repair::repair;
use trendsolve::solver::solve;
use trendsolve::{Mode, ScenarioSet};

const THREADS_VAR: &str = "TRENDSOLVE_THREADS";

#[derive(Parser)]
#[command(name = "trendsolve", version, about = "Qualitative trend scenarios, transitions and repairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate every scenario of a model.
    Solve {
        model: PathBuf,
        /// Ignore second derivatives.
        #[arg(long)]
        first_order: bool,
        #[arg(long, value_enum, default_value_t = TableFormat::Table)]
        format: TableFormat,
        #[command(flatten)]
        out: Output,
    },
    /// Transition graph of a model's scenarios or of a scenario file.
    Graph {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
        #[command(flatten)]
        out: Output,
    },
    /// Whether one scenario can lead to another.
    Reach {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
    },
    /// Turn a polynomial ODE system into trend equations.
    Translate {
        ode: PathBuf,
        #[arg(long, value_enum, default_value_t = DslFormat::Dsl)]
        format: DslFormat,
        #[command(flatten)]
        out: Output,
    },
    /// Build a model from a correlation matrix, dropping weak coefficients
    /// until it has a non-trivial solution.
    Repair {
        csv: PathBuf,
        #[arg(long, value_enum, default_value_t = DslFormat::Dsl)]
        format: DslFormat,
        /// Also write the removal trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Verify that given scenarios satisfy a model.
    Check {
        model: PathBuf,
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Model to solve in full mode.
    model: Option<PathBuf>,
    /// Scenario JSON file.
    #[arg(long)]
    scenarios: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DslFormat {
    Dsl,
    Json,
}

enum Failure {
    Io(String),
    Parse(String),
    Semantic(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Semantic(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Parse(m) | Failure::Semantic(m) => m,
        }
    }
}

type Run = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &Output, text: &str) -> Run {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn load_model(path: &Path) -> Result<TrendModel, Failure> {
    parse_model(&read(path)?).map_err(|e| Failure::Parse(format!("{}:{e}", path.display())))
}

fn load_scenarios(path: &Path) -> Result<ScenarioSet, Failure> {
    parse_scenarios(&read(path)?).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn solve_model(model: &TrendModel, mode: Mode) -> Result<ScenarioSet, Failure> {
    solve(model, mode).map_err(|e| Failure::Semantic(e.to_string()))
}

fn load_source(source: &Source) -> Result<ScenarioSet, Failure> {
    match (&source.model, &source.scenarios) {
        (_, Some(path)) => load_scenarios(path),
        (Some(path), None) => solve_model(&load_model(path)?, Mode::Full),
        (None, None) => unreachable!("clap requires one source"),
    }
}

fn render_table(ss: &ScenarioSet) -> String {
    let id_width = ss.scenarios.iter().map(|s| s.id.to_string().len()).max().unwrap_or(0).max(2);
    let widths: Vec<usize> = ss.variables.iter().map(|v| v.chars().count().max(3)).collect();
    let mut out = String::new();
    let mut line = format!("{:<id_width$}", "id");
    for (v, w) in ss.variables.iter().zip(&widths) {
        let _ = write!(line, "  {v:<w$}");
    }
    let _ = writeln!(out, "{}", line.trim_end());
    for s in &ss.scenarios {
        let mut line = format!("{:<id_width$}", s.id);
        for (t, w) in s.triplets.iter().zip(&widths) {
            let _ = write!(line, "  {:<w$}", t.to_string());
        }
        if s.is_steady_state() {
            line.push_str("  steady");
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
    let noun = if ss.len() == 1 { "scenario" } else { "scenarios" };
    let _ = writeln!(out, "# {} {noun} ({})", ss.len(), ss.mode);
    out
}

fn cmd_solve(model: &Path, first_order: bool, format: TableFormat, out: &Output) -> Run {
    let mode = if first_order { Mode::FirstOrder } else { Mode::Full };
    let ss = solve_model(&load_model(model)?, mode)?;
    let text = match format {
        TableFormat::Table => render_table(&ss),
        TableFormat::Json => render_scenarios(&ss),
    };
    emit(out, &text)
}

fn cmd_graph(source: &Source, format: GraphFormat, out: &Output) -> Run {
    let g = build_graph(&load_source(source)?).map_err(|e| Failure::Semantic(e.to_string()))?;
    let text = match format {
        GraphFormat::Dot => g.to_dot(),
        GraphFormat::Json => g.to_json(),
    };
    emit(out, &text)
}

fn cmd_reach(source: &Source, from: usize, to: usize, format: TextFormat) -> Run {
    let g = build_graph(&load_source(source)?).map_err(|e| Failure::Semantic(e.to_string()))?;
    let yes = g.reachable(from, to).map_err(|e| Failure::Semantic(e.to_string()))?;
    let text = match format {
        TextFormat::Text => format!("{}\n", if yes { "yes" } else { "no" }),
        TextFormat::Json => format!("{}\n", json!({ "from": from, "to": to, "reachable": yes })),
    };
    emit(&Output { out: None }, &text)
}

fn cmd_translate(ode: &Path, format: DslFormat, out: &Output) -> Run {
    let report = translate_text(&read(ode)?).map_err(|e| Failure::Parse(format!("{}:{e}", ode.display())))?;
    let text = match format {
        DslFormat::Dsl => report.render(),
        DslFormat::Json => {
            let doc = json!({
                "model": report.render(),
                "equations": report.equations.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "provenance": report.provenance,
                "eliminated": report.eliminated,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("report serializes"))
        }
    };
    emit(out, &text)
}

fn cmd_repair(csv: &Path, format: DslFormat, trace_path: Option<&Path>, out: &Output) -> Run {
    let matrix = parse_correlation_csv(&read(csv)?).map_err(|e| Failure::Parse(format!("{}: {e}", csv.display())))?;
    let trace = repair(&matrix).map_err(|e| Failure::Semantic(e.to_string()))?;
    if let Some(path) = trace_path {
        fs::write(path, trace.to_json()).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    let model = render_model(&trace.model);
    let text = match format {
        DslFormat::Dsl => {
            let mut text = model;
            for step in &trace.steps {
                let [a, b] = &step.pair;
                let _ = writeln!(text, "# removed {a} {b} ({}), {} scenarios", step.value, step.scenarios);
            }
            if trace.exhausted {
                text.push_str("# every coefficient removed; solution still trivial\n");
            }
            let _ = writeln!(text, "# {} scenarios", trace.scenarios.len());
            text
        }
        DslFormat::Json => {
            let doc = json!({
                "model": model,
                "steps": trace.steps,
                "exhausted": trace.exhausted,
                "scenarios": trace.scenarios.len(),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("trace serializes"))
        }
    };
    emit(out, &text)
}

fn cmd_check(model: &Path, scenarios: &Path, format: TextFormat) -> Run {
    let m = load_model(model)?;
    let ss = load_scenarios(scenarios)?;
    let report = check_scenarios(&m, &ss).map_err(|e| Failure::Semantic(e.to_string()))?;
    let text = match format {
        TextFormat::Text => {
            let mut text = String::new();
            for v in &report.violations {
                let _ = writeln!(text, "scenario {}: violates {}", v.scenario, v.constraint);
            }
            let _ = writeln!(
                text,
                "{} scenarios checked ({}), {} violations",
                report.checked,
                report.mode,
                report.violations.len()
            );
            text
        }
        TextFormat::Json => report.to_json(),
    };
    emit(&Output { out: None }, &text)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Semantic(format!("{} violations", report.violations.len())))
    }
}

fn configure_threads() -> Run {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Parse(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Semantic(e.to_string()))
}

fn run(cli: Cli) -> Run {
    configure_threads()?;
    match &cli.command {
        Command::Solve { model, first_order, format, out } => cmd_solve(model, *first_order, *format, out),
        Command::Graph { source, format, out } => cmd_graph(source, *format, out),
        Command::Reach { source, from, to, format } => cmd_reach(source, *from, *to, *format),
        Command::Translate { ode, format, out } => cmd_translate(ode, *format, out),
        Command::Repair { csv, format, trace, out } => cmd_repair(csv, *format, trace.as_deref(), out),
        Command::Check { model, scenarios, format } => cmd_check(model, scenarios, *format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("trendsolve: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
