use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use moser_lab::catalog::catalog;
use moser_lab::runner::run;
use moser_lab::spec::{Overrides, ScenarioSpec};
use moser_lab::CliError;

#[derive(Parser)]
#[command(version, about = "Certify triviality of Lie group deformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List built-in scenarios
    List,
    /// Run a scenario from a spec file or by id
    Run {
        /// JSON spec file
        spec: Option<PathBuf>,
        /// Built-in scenario id (instead of a spec file)
        #[arg(long, conflicts_with = "spec")]
        scenario: Option<String>,
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
        #[arg(long, default_value = "residuals.csv")]
        residuals: PathBuf,
        #[arg(long)]
        eps_max: Option<f64>,
        #[arg(long)]
        eps_steps: Option<usize>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn list() {
    println!("{:<32} {:<16} {:<20} exercises", "id", "kind", "expected");
    for s in catalog() {
        println!(
            "{:<32} {:<16} {:<20} {}",
            s.id,
            s.kind.to_string(),
            s.expected.to_string(),
            s.exercises
        );
    }
}

fn run_command(
    spec: Option<PathBuf>,
    scenario: Option<String>,
    overrides: Overrides,
    out: PathBuf,
    residuals: PathBuf,
) -> Result<bool, CliError> {
    let mut spec = match (spec, scenario) {
        (Some(path), None) => ScenarioSpec::from_json(&std::fs::read_to_string(path)?)?,
        (None, Some(id)) => ScenarioSpec::for_id(&id)?,
        _ => return Err(CliError::Spec("give a spec file or --scenario".into())),
    };
    spec.apply(&overrides);
    let report = run(&spec)?;
    report.write_json(BufWriter::new(File::create(&out)?))?;
    report.write_csv(BufWriter::new(File::create(&residuals)?))?;
    println!(
        "{}: {} (expected {}), max conjugation error {:e}, {:.2}s",
        report.scenario_id,
        report.verdict,
        report.expected_verdict,
        report
            .conjugation_error
            .iter()
            .copied()
            .fold(f64::NAN, f64::max),
        report.wall_time
    );
    Ok(report.verdict_matches())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            list();
            ExitCode::SUCCESS
        }
        Command::Run {
            spec,
            scenario,
            out,
            residuals,
            eps_max,
            eps_steps,
            resolution,
            seed,
        } => {
            let overrides = Overrides {
                eps_max,
                eps_steps,
                resolution,
                seed,
            };
            match run_command(spec, scenario, overrides, out, residuals) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
