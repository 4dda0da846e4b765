//! Refinement studies: assemble, solve and measure each (level, degree)
//! pair, then write one CSV per study.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::Context;
use fembem_core::analysis::{
    compute_errors, convergence_rates, error_quadrature_order, Bound, Check, ConvergenceRates, ErrorQuantity,
    ErrorReport,
};
use fembem_core::bem::TraceSpaces;
use fembem_core::coupling::{assemble_block_system, ManufacturedCase, SystemDims};
use fembem_core::fem::FeSpace;
use fembem_core::solver::solve;
use serde::Serialize;

use crate::config::{CaseName, Mode, StudyConfig};
use crate::export::export_system;

/// CSV column order. Changing it is a breaking change of the output format.
pub const CSV_COLUMNS: [&str; 21] = [
    "case",
    "k",
    "mode",
    "level",
    "h",
    "p",
    "dofs_volume",
    "dofs_mortar",
    "dofs_exterior",
    "rel_l2_omega",
    "rel_h1semi_omega",
    "scaled_rel_l2_m",
    "scaled_rel_l2_uext",
    "rate_l2_omega",
    "rate_h1semi_omega",
    "rate_m",
    "rate_uext",
    "solver",
    "residual",
    "factorizations",
    "iterations",
];

/// Largest accepted relative residual of a solve.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

/// Error bound of the exactly reproduced polynomial case.
pub const EXACT_LIMIT: f64 = 1e-10;

/// One CSV row. Rates are empty on the coarsest level and in p-version mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub case: String,
    pub k: f64,
    pub mode: String,
    pub level: usize,
    pub h: f64,
    pub p: usize,
    pub dofs_volume: usize,
    pub dofs_mortar: usize,
    pub dofs_exterior: usize,
    pub rel_l2_omega: f64,
    pub rel_h1semi_omega: f64,
    pub scaled_rel_l2_m: f64,
    pub scaled_rel_l2_uext: f64,
    pub rate_l2_omega: Option<f64>,
    pub rate_h1semi_omega: Option<f64>,
    pub rate_m: Option<f64>,
    pub rate_uext: Option<f64>,
    pub solver: String,
    pub residual: f64,
    pub factorizations: usize,
    pub iterations: usize,
}

/// Result of one (level, degree) run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub level: usize,
    pub dims: SystemDims,
    pub report: ErrorReport,
    pub assembly_time: Duration,
    pub solve_time: Duration,
}

#[derive(Debug, Clone)]
pub struct StudyOutcome {
    pub rows: Vec<StudyRow>,
    pub runs: Vec<RunResult>,
    /// Least-squares and pairwise rates per degree (h-version with at
    /// least two levels only).
    pub rates: Vec<(usize, ConvergenceRates)>,
    pub checks: Vec<Check>,
    pub csv_path: Option<PathBuf>,
}

impl StudyOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn rates_for(&self, p: usize) -> Option<&ConvergenceRates> {
        self.rates.iter().find(|(q, _)| *q == p).map(|(_, r)| r)
    }
}

pub fn build_case(config: &StudyConfig, degree: usize) -> fembem_core::Result<ManufacturedCase> {
    let k = config.wavenumber();
    match config.case {
        CaseName::Tc1 => ManufacturedCase::plane_and_point_source(k),
        CaseName::Tc2 => ManufacturedCase::inclusion(k),
        CaseName::PolyExact => ManufacturedCase::polynomial(k, degree),
    }
}

/// Assembles, solves and measures one (level, degree) pair, optionally
/// exporting the block system to `export_dir`.
pub fn run_one(
    config: &StudyConfig,
    level: usize,
    degree: usize,
    export_dir: Option<&Path>,
) -> anyhow::Result<RunResult> {
    let ctx = || format!("{} level {level} p = {degree}", config.case);
    let case = build_case(config, degree).with_context(ctx)?;
    let start = Instant::now();
    let mesh = case.domain.mesh(level).with_context(ctx)?;
    let fe = FeSpace::new(Arc::new(mesh), degree).with_context(ctx)?;
    let sp = TraceSpaces::new(fe.surface().clone(), degree).with_context(ctx)?;
    let system = assemble_block_system(&case, &fe, &sp, &config.coupling).with_context(ctx)?;
    let assembly_time = start.elapsed();
    if let Some(dir) = export_dir {
        let sub = dir.join(format!("{}_L{level}_p{degree}", config.stem()));
        export_system(&system, &sub).with_context(|| format!("exporting matrices to {}", sub.display()))?;
    }
    let start = Instant::now();
    let solution = solve(&system, config.solver).with_context(ctx)?;
    let solve_time = start.elapsed();
    let order = config.error_order.unwrap_or_else(|| error_quadrature_order(degree));
    let report = compute_errors(&solution, &case, &fe, &sp, order).with_context(ctx)?;
    Ok(RunResult { level, dims: system.dims, report, assembly_time, solve_time })
}

/// Runs every (level, degree) pair of the study, reporting progress
/// through `progress`, and evaluates the study's checks.
pub fn run_study_runs(
    config: &StudyConfig,
    export_dir: Option<&Path>,
    mut progress: impl FnMut(&RunResult),
) -> anyhow::Result<StudyOutcome> {
    let mut runs = Vec::new();
    for level in config.level_range() {
        for &p in &config.degrees {
            let run = run_one(config, level, p, export_dir)?;
            progress(&run);
            runs.push(run);
        }
    }
    let mut rates = Vec::new();
    if config.mode == Mode::HVersion && config.levels >= 2 {
        for &p in &config.degrees {
            let reports: Vec<ErrorReport> = runs.iter().filter(|r| r.report.p == p).map(|r| r.report).collect();
            if config.case != CaseName::PolyExact {
                rates.push((p, convergence_rates(&reports).with_context(|| format!("rates for p = {p}"))?));
            }
        }
    }
    let rows = rows(config, &runs, &rates);
    let checks = checks(config, &runs, &rates);
    Ok(StudyOutcome { rows, runs, rates, checks, csv_path: None })
}

/// Runs the study and writes its CSV into the configured output directory.
pub fn run_study(
    config: &StudyConfig,
    export_matrices: bool,
    progress: impl FnMut(&RunResult),
) -> anyhow::Result<StudyOutcome> {
    std::fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating output directory {}", config.output_dir.display()))?;
    let export_dir = export_matrices.then(|| config.output_dir.join("matrices"));
    let mut outcome = run_study_runs(config, export_dir.as_deref(), progress)?;
    let path = config.output_dir.join(format!("{}.csv", config.stem()));
    write_csv_atomic(&path, &outcome.rows)?;
    outcome.csv_path = Some(path);
    Ok(outcome)
}

fn rows(config: &StudyConfig, runs: &[RunResult], rates: &[(usize, ConvergenceRates)]) -> Vec<StudyRow> {
    runs.iter()
        .map(|run| {
            let r = &run.report;
            let step = config.level_range().position(|l| l == run.level).expect("level in range");
            let rate = rates
                .iter()
                .find(|(p, _)| *p == r.p)
                .and_then(|(_, rates)| step.checked_sub(1).map(|i| rates.pairwise[i]));
            StudyRow {
                case: config.case.to_string(),
                k: r.k,
                mode: config.mode.to_string(),
                level: run.level,
                h: r.h,
                p: r.p,
                dofs_volume: run.dims.volume,
                dofs_mortar: run.dims.mortar,
                dofs_exterior: run.dims.exterior,
                rel_l2_omega: r.rel_l2_omega,
                rel_h1semi_omega: r.rel_h1semi_omega,
                scaled_rel_l2_m: r.scaled_rel_l2_m,
                scaled_rel_l2_uext: r.scaled_rel_l2_uext,
                rate_l2_omega: rate.map(|v| v[0]),
                rate_h1semi_omega: rate.map(|v| v[1]),
                rate_m: rate.map(|v| v[2]),
                rate_uext: rate.map(|v| v[3]),
                solver: r.stats.method.to_string(),
                residual: r.stats.residual,
                factorizations: r.stats.factorizations,
                iterations: r.stats.iterations,
            }
        })
        .collect()
}

/// The study's embedded assertions:
/// - every solve reaches [`RESIDUAL_LIMIT`];
/// - poly-exact errors stay below [`EXACT_LIMIT`];
/// - h-version: least-squares `H^1` rate within `[0.8 p, 1.3 p]` and both
///   boundary errors converging at least as fast;
/// - p-version: every error decreases strictly with `p` on each mesh.
pub fn checks(config: &StudyConfig, runs: &[RunResult], rates: &[(usize, ConvergenceRates)]) -> Vec<Check> {
    let mut out = Vec::new();
    for run in runs {
        let r = &run.report;
        let tag = format!("level {} p = {}", run.level, r.p);
        out.push(Check::new(format!("{tag} residual"), r.stats.residual, Bound::AtMost(RESIDUAL_LIMIT)));
        if config.case == CaseName::PolyExact {
            for q in ErrorQuantity::ALL {
                out.push(Check::new(format!("{tag} {q}"), r.get(q), Bound::AtMost(EXACT_LIMIT)));
            }
        }
    }
    if config.case == CaseName::PolyExact {
        return out;
    }
    match config.mode {
        Mode::HVersion => {
            for (p, rates) in rates {
                let pf = *p as f64;
                let h1 = rates.least_squares_of(ErrorQuantity::H1);
                out.push(Check::new(format!("p = {p} H1 rate lower"), h1, Bound::AtLeast(0.8 * pf)));
                out.push(Check::new(format!("p = {p} H1 rate upper"), h1, Bound::AtMost(1.3 * pf)));
                for q in [ErrorQuantity::Mortar, ErrorQuantity::Exterior] {
                    let excess = rates.least_squares_of(q) - h1;
                    out.push(Check::new(format!("p = {p} {q} rate minus H1 rate"), excess, Bound::AtLeast(0.0)));
                }
            }
        }
        Mode::PVersion => {
            for level in config.level_range() {
                let at_level: Vec<&ErrorReport> = runs.iter().filter(|r| r.level == level).map(|r| &r.report).collect();
                for w in at_level.windows(2) {
                    for q in ErrorQuantity::ALL {
                        let ratio = w[1].get(q) / w[0].get(q);
                        let name = format!("level {level} {q} ratio p = {} / p = {}", w[1].p, w[0].p);
                        out.push(Check::new(name, ratio, Bound::Below(1.0)));
                    }
                }
            }
        }
    }
    out
}

/// Writes `rows` as CSV to a temporary file beside `path`, then renames it
/// into place.
pub fn write_csv_atomic(path: &Path, rows: &[StudyRow]) -> anyhow::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(tmp.as_file_mut());
        w.write_record(CSV_COLUMNS)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    tmp.as_file_mut().flush()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
