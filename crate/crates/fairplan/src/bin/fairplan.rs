//! Command-line front end for scenario documents.
//!
//! Exit codes: 0 success, 1 document errors (unreadable, malformed, or
//! invalid), 2 computation errors (unknown scenario, missing configuration,
//! unwritable output), 64 usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fairplan::report::{self, Format, Report};
use fairplan::scenario::{Model, ScenarioDocument};

/// Environment variable consulted when no document path is given.
const SCENARIO_PATH_VAR: &str = "FAIRPLAN_SCENARIO_PATH";

#[derive(Parser)]
#[command(name = "fairplan", version, about = "Deterministic capacity planning from scenario documents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a document and report every problem found.
    Validate {
        /// Scenario document; defaults to $FAIRPLAN_SCENARIO_PATH.
        file: Option<PathBuf>,
    },
    /// Print one table of the plan as markdown.
    Tables {
        file: Option<PathBuf>,
        #[arg(long, value_enum)]
        table: TableId,
    },
    /// Print a scenario's disk and archive evolution over a span of years.
    Timeline {
        file: Option<PathBuf>,
        /// Scenario name; defaults to the document's only scenario.
        #[arg(long)]
        scenario: Option<String>,
        /// First year; defaults to the scenario start year.
        #[arg(long)]
        from: Option<i32>,
        /// Last year; defaults to twelve years after the first.
        #[arg(long)]
        to: Option<i32>,
        /// Also print the cumulative archive.
        #[arg(long)]
        archive: bool,
    },
    /// Print a scenario's compute roll-up.
    Aggregate {
        file: Option<PathBuf>,
        /// Scenario name; defaults to the document's only scenario.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Render the full plan.
    Report {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatId::Markdown)]
        format: FormatId,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableId {
    EventSizes,
    DataRates,
    StoragePlan,
    Compute,
    PandaHs06,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatId {
    Markdown,
    Csv,
    Json,
}

impl From<FormatId> for Format {
    fn from(id: FormatId) -> Self {
        match id {
            FormatId::Markdown => Format::Markdown,
            FormatId::Csv => Format::Csv,
            FormatId::Json => Format::Json,
        }
    }
}

enum Failure {
    Usage(String),
    Document(Vec<fairplan::scenario::Issue>),
    Computation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Document(_) => 1,
            Failure::Computation(_) => 2,
        }
    }

    fn report(&self) {
        match self {
            Failure::Usage(message) => eprintln!("usage error: {message}"),
            Failure::Document(issues) => {
                for issue in issues {
                    eprintln!("error: {issue}");
                }
            }
            Failure::Computation(message) => eprintln!("error: {message}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            failure.report();
            ExitCode::from(failure.code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { file } => {
            let doc = load_document(file)?;
            let issues = doc.validate();
            if issues.is_empty() {
                println!(
                    "ok: {} setups, {} runs, {} experiments, {} scenarios",
                    doc.setups.len(),
                    doc.runs.len(),
                    doc.experiments.len(),
                    doc.scenarios.len()
                );
                Ok(())
            } else {
                Err(Failure::Document(issues))
            }
        }
        Command::Tables { file, table } => {
            let model = load_model(file)?;
            let table = match table {
                TableId::EventSizes => report::event_sizes_table(&model),
                TableId::DataRates => report::data_rates_table(&model),
                TableId::StoragePlan => report::storage_plan_table(&model),
                TableId::Compute => report::compute_table(&model),
                TableId::PandaHs06 => report::campaigns_table(&model),
            };
            print!("{}", table.to_markdown());
            Ok(())
        }
        Command::Timeline {
            file,
            scenario,
            from,
            to,
            archive,
        } => {
            let model = load_model(file)?;
            let scenario = pick_scenario(&model, scenario.as_deref())?;
            let from = from.unwrap_or_else(|| scenario.start_year());
            let to = to.unwrap_or(from + 12);
            let report = report::timeline_report(scenario, from, to, archive)
                .map_err(|e| Failure::Computation(e.to_string()))?;
            print!("{}", report.to_markdown());
            Ok(())
        }
        Command::Aggregate { file, scenario } => {
            let model = load_model(file)?;
            let scenario = pick_scenario(&model, scenario.as_deref())?;
            let report = report::aggregate_report(scenario)
                .map_err(|e| Failure::Computation(e.to_string()))?;
            print!("{}", report.to_markdown());
            Ok(())
        }
        Command::Report { file, format, out } => {
            let model = load_model(file)?;
            let report = report::full_report(&model);
            emit(&report, format.into(), out.as_deref())
        }
    }
}

fn resolve_path(file: Option<PathBuf>) -> Result<PathBuf, Failure> {
    if let Some(path) = file {
        return Ok(path);
    }
    match std::env::var_os(SCENARIO_PATH_VAR) {
        Some(path) => Ok(PathBuf::from(path)),
        None => Err(Failure::Usage(format!(
            "no document given: pass a file argument or set {SCENARIO_PATH_VAR}"
        ))),
    }
}

fn load_document(file: Option<PathBuf>) -> Result<ScenarioDocument, Failure> {
    let path = resolve_path(file)?;
    // An unreadable path is a bad invocation, not a bad document.
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    ScenarioDocument::from_str(&text).map_err(|issue| Failure::Document(vec![issue]))
}

fn load_model(file: Option<PathBuf>) -> Result<Model, Failure> {
    let doc = load_document(file)?;
    doc.to_model().map_err(Failure::Document)
}

fn pick_scenario<'m>(
    model: &'m Model,
    name: Option<&str>,
) -> Result<&'m fairplan::facility::Scenario, Failure> {
    match name {
        Some(name) => model.scenarios.get(name).ok_or_else(|| {
            Failure::Computation(format!(
                "unknown scenario {name:?}; document has: {}",
                scenario_names(model)
            ))
        }),
        None if model.scenarios.len() == 1 => {
            Ok(model.scenarios.values().next().expect("len checked"))
        }
        None => Err(Failure::Usage(format!(
            "pick a scenario with --scenario; document has: {}",
            scenario_names(model)
        ))),
    }
}

fn scenario_names(model: &Model) -> String {
    model
        .scenarios
        .keys()
        .map(|n| format!("{n:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn emit(report: &Report, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let rendered = report.render(format);
    match out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| {
            Failure::Computation(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}
