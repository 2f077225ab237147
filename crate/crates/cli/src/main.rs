use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use exclusivity::report::{
    figure_graph, full_report, simulate, verify, FigureGraph, GraphExport, ReportBundle,
    SimulationConfig, VerifyOptions, Which,
};
use exclusivity::scenario::{build_chsh_scenario, build_nc_scenario, Scenario, ScenarioError};

/// Exit status for a failed verdict or invalid input file.
const EXIT_FAILED: u8 = 1;
/// Exit status for malformed invocations, matching clap's own.
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "exclusivity",
    version,
    about = "Exclusivity-principle toolkit: verification, simulation and exports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the ideal-value verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Test hook: tilt v3 so its orthogonality check fails.
        #[arg(long, hide = true)]
        perturb_v3: bool,
    },
    /// Simulate the photon-counting experiments.
    Simulate {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_enum, default_value_t = Target::Both)]
        which: Target,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one of the exclusivity graphs.
    ExportGraph {
        #[arg(long, value_enum)]
        which: GraphId,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Save or load a scenario file.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
    /// Run verification and simulation and write every table into a directory.
    Report {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ScenarioAction {
    Save {
        #[arg(long, value_enum)]
        which: Experiment,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and re-validate a scenario file.
    Load { path: PathBuf },
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Shots per setting; 0 gives exact probabilities.
    #[arg(long, default_value_t = exclusivity::montecarlo::DEFAULT_SHOTS)]
    shots: u64,
    /// Visibility of the Bell experiment, and of the NC experiment unless
    /// --nc-visibility is given.
    #[arg(long, value_parser = unit_interval)]
    visibility: Option<f64>,
    #[arg(long, value_parser = unit_interval)]
    nc_visibility: Option<f64>,
}

impl SimArgs {
    fn config(&self, which: Which) -> SimulationConfig {
        let defaults = SimulationConfig::default();
        SimulationConfig {
            seed: self.seed,
            shots: self.shots,
            chsh_visibility: self.visibility.unwrap_or(defaults.chsh_visibility),
            nc_visibility: self
                .nc_visibility
                .or(self.visibility)
                .unwrap_or(defaults.nc_visibility),
            which,
        }
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Chsh,
    Nc,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Chsh,
    Nc,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphId {
    F1b,
    F1c,
    F4,
}

/// Errors that map to exit status 2 rather than 1.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn unsupported(command: &str, format: Format, allowed: &str) -> anyhow::Error {
    let name = format
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string();
    UsageError(format!(
        "{command} does not support --format {name} (use {allowed})"
    ))
    .into()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn bundle_output(bundle: &ReportBundle, format: Format, command: &str) -> Result<String> {
    match format {
        Format::Text => Ok(bundle.render()),
        Format::Json => Ok(bundle.to_json() + "\n"),
        Format::Csv => Ok(bundle.verdicts_csv()),
        Format::Dot => Err(unsupported(command, format, "text, csv or json")),
    }
}

fn verdict_status(bundle: &ReportBundle) -> u8 {
    if bundle.all_passed() {
        0
    } else {
        EXIT_FAILED
    }
}

fn cmd_verify(format: Format, out: Option<&Path>, perturb_v3: bool) -> Result<u8> {
    let bundle = verify(&VerifyOptions { perturb_v3 });
    emit(out, &bundle_output(&bundle, format, "verify")?)?;
    Ok(verdict_status(&bundle))
}

fn cmd_simulate(sim: &SimArgs, which: Target, format: Format, out: Option<&Path>) -> Result<u8> {
    let which = match which {
        Target::Chsh => Which::Chsh,
        Target::Nc => Which::Nc,
        Target::Both => Which::Both,
    };
    let (bundle, outcome) = simulate(&sim.config(which)).map_err(|e| UsageError(e.to_string()))?;
    let text = match format {
        Format::Text => bundle.render(),
        Format::Json => {
            serde_json::to_string_pretty(&serde_json::json!({
                "config": {
                    "seed": sim.seed,
                    "shots": sim.shots,
                    "chsh_visibility": sim.config(which).chsh_visibility,
                    "nc_visibility": sim.config(which).nc_visibility,
                },
                "outcome": outcome,
                "report": bundle,
            }))? + "\n"
        }
        Format::Csv => outcome.summary_table().to_csv(),
        Format::Dot => return Err(unsupported("simulate", format, "text, csv or json")),
    };
    emit(out, &text)?;
    Ok(verdict_status(&bundle))
}

fn graph_text(which: FigureGraph, format: Format) -> Result<(String, usize, usize)> {
    let (g, labels) = figure_graph(which);
    let text = match format {
        Format::Dot => g.to_dot(which.id(), &labels),
        Format::Json => {
            serde_json::to_string_pretty(&GraphExport {
                labels,
                graph: g.to_json(),
            })? + "\n"
        }
        _ => return Err(unsupported("export-graph", format, "dot or json")),
    };
    Ok((text, g.n(), g.edge_count()))
}

fn cmd_export_graph(which: GraphId, format: Format, out: Option<&Path>) -> Result<u8> {
    let which = match which {
        GraphId::F1b => FigureGraph::F1b,
        GraphId::F1c => FigureGraph::F1c,
        GraphId::F4 => FigureGraph::F4,
    };
    let (text, n, edges) = graph_text(which, format)?;
    emit(out, &text)?;
    eprintln!("{}: {n} vertices, {edges} edges", which.id());
    Ok(0)
}

fn cmd_scenario(action: &ScenarioAction) -> Result<u8> {
    match action {
        ScenarioAction::Save { which, out } => {
            let s = match which {
                Experiment::Chsh => build_chsh_scenario(),
                Experiment::Nc => build_nc_scenario(),
            };
            emit(out.as_deref(), &(s.to_json_string() + "\n"))?;
            Ok(0)
        }
        ScenarioAction::Load { path } => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            match Scenario::from_json_str(&text) {
                Ok(s) => {
                    println!(
                        "{}: dimension {}, {} events, {} exclusive pairs; all invariants hold",
                        s.name,
                        s.dim(),
                        s.events.len(),
                        s.graph.edge_count()
                    );
                    Ok(0)
                }
                Err(e) => {
                    match &e {
                        ScenarioError::InvariantViolation { check, .. } => {
                            eprintln!("invalid scenario [{check}]: {e}")
                        }
                        _ => eprintln!("invalid scenario: {e}"),
                    }
                    Ok(EXIT_FAILED)
                }
            }
        }
    }
}

fn cmd_report(sim: &SimArgs, dir: &Path) -> Result<u8> {
    let bundle = full_report(&sim.config(Which::Both)).map_err(|e| UsageError(e.to_string()))?;
    let tables = dir.join("tables");
    let graphs = dir.join("graphs");
    fs::create_dir_all(&tables).with_context(|| format!("creating {}", tables.display()))?;
    fs::create_dir_all(&graphs).with_context(|| format!("creating {}", graphs.display()))?;
    for (id, table) in &bundle.tables {
        fs::write(tables.join(format!("{id}.csv")), table.to_csv())?;
    }
    for which in [FigureGraph::F1b, FigureGraph::F1c, FigureGraph::F4] {
        for (format, ext) in [(Format::Dot, "dot"), (Format::Json, "json")] {
            let (text, _, _) = graph_text(which, format)?;
            fs::write(graphs.join(format!("{}.{ext}", which.id())), text)?;
        }
    }
    fs::write(dir.join("report.json"), bundle.to_json() + "\n")?;
    fs::write(dir.join("report.txt"), bundle.render())?;
    fs::write(dir.join("verdicts.csv"), bundle.verdicts_csv())?;
    let failed = bundle.verdicts.iter().filter(|v| !v.passed).count();
    println!(
        "wrote {} tables and 3 graphs to {}; {} of {} verdicts passed",
        bundle.tables.len(),
        dir.display(),
        bundle.verdicts.len() - failed,
        bundle.verdicts.len()
    );
    Ok(verdict_status(&bundle))
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Verify {
            format,
            out,
            perturb_v3,
        } => cmd_verify(*format, out.as_deref(), *perturb_v3),
        Command::Simulate {
            sim,
            which,
            format,
            out,
        } => cmd_simulate(sim, *which, *format, out.as_deref()),
        Command::ExportGraph { which, format, out } => {
            cmd_export_graph(*which, *format, out.as_deref())
        }
        Command::Scenario { action } => cmd_scenario(action),
        Command::Report { sim, out } => cmd_report(sim, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}
