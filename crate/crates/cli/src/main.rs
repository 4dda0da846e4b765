use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use fembem_cli::{run_study, StudyConfig};
use fembem_core::analysis::{run_suite, Suite};

#[derive(Parser)]
#[command(name = "fembem", version, about = "Three-field FEM-BEM coupling for Helmholtz transmission problems")]
struct Cli {
    /// Worker threads for boundary element assembly (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a refinement study and write its CSV table.
    Run {
        /// Flat `key = value` config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a config key, e.g. `--set levels=2`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Write every assembled block system as Matrix Market files.
        #[arg(long)]
        export_matrices: bool,
    },
    /// Run a named invariant suite, or `all`.
    Verify {
        #[arg(long, value_parser = parse_suites)]
        suite: SuiteSelection,
    },
}

#[derive(Clone)]
struct SuiteSelection(Vec<Suite>);

fn parse_suites(s: &str) -> Result<SuiteSelection, String> {
    if s == "all" {
        return Ok(SuiteSelection(Suite::ALL.to_vec()));
    }
    s.parse::<Suite>().map(|suite| SuiteSelection(vec![suite])).map_err(|e| e.to_string())
}

fn run(config: Option<PathBuf>, overrides: &[String], export_matrices: bool) -> anyhow::Result<bool> {
    let config = match config {
        Some(path) => StudyConfig::from_file(&path, overrides)?,
        None => StudyConfig::parse("", overrides)?,
    };
    eprintln!("study {} (k = {:.6})", config.stem(), config.wavenumber());
    let outcome = run_study(&config, export_matrices, |run| {
        eprintln!(
            "  level {} p = {}: {} + {} + {} unknowns, assembly {:.1} s, solve {:.1} s",
            run.level,
            run.report.p,
            run.dims.volume,
            run.dims.mortar,
            run.dims.exterior,
            run.assembly_time.as_secs_f64(),
            run.solve_time.as_secs_f64()
        )
    })?;
    for (p, rates) in &outcome.rates {
        let [l2, h1, m, d] = rates.least_squares;
        println!("p = {p} least-squares rates: L2 {l2:.3}, H1 {h1:.3}, mortar {m:.3}, exterior {d:.3}");
    }
    for check in &outcome.checks {
        println!("{check}");
    }
    if let Some(path) = &outcome.csv_path {
        println!("wrote {}", path.display());
    }
    Ok(outcome.passed())
}

fn verify(suites: &[Suite]) -> anyhow::Result<bool> {
    let mut passed = true;
    for &suite in suites {
        let report = run_suite(suite).with_context(|| format!("suite {suite}"))?;
        for check in &report.checks {
            println!("{suite}: {check}");
        }
        println!("{suite}: {}", if report.passed() { "pass" } else { "FAIL" });
        passed &= report.passed();
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Run { config, overrides, export_matrices } => run(config, &overrides, export_matrices),
        Command::Verify { suite } => verify(&suite.0),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
