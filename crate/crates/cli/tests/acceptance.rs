//! Acceptance run: one PASS/FAIL line per criterion with measured values,
//! pinned bounds and runtime. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fembem_cli::{run_study_runs, CaseName, Mode, StudyConfig, StudyOutcome};
use fembem_core::analysis::{run_suite, ErrorQuantity, Suite};
use fembem_core::bem::TraceSpaces;
use fembem_core::coupling::{assemble_block_system, CouplingOptions, ManufacturedCase};
use fembem_core::fem::FeSpace;
use fembem_core::linalg::rel_diff_vec;
use fembem_core::solver::{direct_solve, gmres_solve, schur_solve, GmresOptions, SolutionTriple, DIRECT_CAP};

struct Verdict {
    passed: bool,
    detail: String,
}

fn suite_verdict(suite: Suite) -> Verdict {
    match run_suite(suite) {
        Ok(report) => {
            let failed: Vec<String> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.to_string()).collect();
            let detail = if failed.is_empty() {
                format!("{} checks", report.checks.len())
            } else {
                format!("failed: {}", failed.join("; "))
            };
            Verdict { passed: report.passed(), detail }
        }
        Err(e) => Verdict { passed: false, detail: format!("error: {e}") },
    }
}

fn study(
    case: CaseName,
    k_multiplier: f64,
    first_level: usize,
    levels: usize,
    degrees: &[usize],
    mode: Mode,
) -> anyhow::Result<StudyOutcome> {
    let config = StudyConfig {
        case,
        k_multiplier,
        first_level,
        levels,
        degrees: degrees.to_vec(),
        mode,
        ..StudyConfig::default()
    };
    run_study_runs(&config, None, |_| {})
}

fn h1_rate(outcome: &StudyOutcome) -> f64 {
    outcome.rates_for(1).map_or(f64::NAN, |r| r.least_squares_of(ErrorQuantity::H1))
}

fn in_optimal_range(rate: f64) -> bool {
    (0.8..=1.3).contains(&rate)
}

fn h_version(k_multiplier: f64) -> anyhow::Result<(StudyOutcome, Verdict)> {
    let outcome = study(CaseName::Tc1, k_multiplier, 1, 3, &[1], Mode::HVersion)?;
    let rates = outcome.rates_for(1).expect("three levels");
    let h1 = rates.least_squares_of(ErrorQuantity::H1);
    let m = rates.least_squares_of(ErrorQuantity::Mortar);
    let d = rates.least_squares_of(ErrorQuantity::Exterior);
    let passed = in_optimal_range(h1) && m >= h1 && d >= h1;
    let detail =
        format!("levels 1-3, H1 rate {h1:.3} in [0.8, 1.3]; mortar rate {m:.3} and exterior rate {d:.3} >= H1 rate");
    Ok((outcome, Verdict { passed, detail }))
}

fn criterion_6(base: Option<&StudyOutcome>) -> anyhow::Result<Verdict> {
    let (outcome, _) = h_version(3.0)?;
    let worst = outcome.runs.iter().map(|r| r.report.stats.residual).fold(0.0, f64::max);
    let h1 = h1_rate(&outcome);
    let h1_base = base.map_or(f64::NAN, h1_rate);
    let diff = (h1 - h1_base).abs();
    Ok(Verdict {
        passed: worst <= 1e-10 && diff <= 0.4,
        detail: format!(
            "largest residual {worst:.2e} <= 1e-10; H1 rate {h1:.3} vs {h1_base:.3}, difference {diff:.3} <= 0.4"
        ),
    })
}

fn criterion_7() -> anyhow::Result<Verdict> {
    let outcome = study(CaseName::Tc1, 3.0, 1, 1, &[1, 2, 3], Mode::PVersion)?;
    let errors: Vec<[f64; 4]> = outcome.runs.iter().map(|r| ErrorQuantity::ALL.map(|q| r.report.get(q))).collect();
    let listed: Vec<String> = errors
        .iter()
        .zip(1..)
        .map(|(e, p)| format!("p={p} [{:.3e}, {:.3e}, {:.3e}, {:.3e}]", e[0], e[1], e[2], e[3]))
        .collect();
    Ok(Verdict {
        passed: outcome.passed(),
        detail: format!("level 1, errors [L2, H1, mortar, exterior] strictly decreasing: {}", listed.join(", ")),
    })
}

fn stacked(s: &SolutionTriple) -> Vec<fembem_core::C64> {
    [s.u.as_slice(), &s.m, &s.uext].concat()
}

fn criterion_8() -> anyhow::Result<Verdict> {
    let case = ManufacturedCase::plane_and_point_source(1.5 * 3f64.sqrt() * std::f64::consts::PI)?;
    let (mut direct_worst, mut gmres_worst, mut iterations) = (0.0f64, 0.0f64, Vec::new());
    for level in [0, 1] {
        let fe = FeSpace::new(Arc::new(case.domain.mesh(level)?), 1)?;
        let sp = TraceSpaces::new(fe.surface().clone(), 1)?;
        let sys = assemble_block_system(&case, &fe, &sp, &CouplingOptions::default())?;
        let schur = schur_solve(&sys)?;
        let direct = direct_solve(&sys, DIRECT_CAP)?;
        let gmres = gmres_solve(&sys, &GmresOptions { tol: 1e-8, max_iterations: 2000, ..Default::default() })?;
        direct_worst = direct_worst.max(rel_diff_vec(&stacked(&schur), &stacked(&direct)));
        gmres_worst = gmres_worst.max(rel_diff_vec(&stacked(&gmres), &stacked(&direct)));
        iterations.push(gmres.stats.iterations.to_string());
    }
    Ok(Verdict {
        passed: direct_worst <= 1e-8 && gmres_worst <= 1e-6,
        detail: format!(
            "levels 0-1, Schur vs direct {direct_worst:.2e} <= 1e-8; GMRES vs LU {gmres_worst:.2e} <= 1e-6 ({} iterations)",
            iterations.join(", ")
        ),
    })
}

fn criterion_9() -> anyhow::Result<Verdict> {
    let outcome = study(CaseName::Tc2, 1.0, 0, 2, &[1], Mode::HVersion)?;
    let h1 = h1_rate(&outcome);
    let errors: Vec<String> = outcome.runs.iter().map(|r| format!("{:.4}", r.report.rel_h1semi_omega)).collect();
    Ok(Verdict {
        passed: in_optimal_range(h1),
        detail: format!("levels 0-1, H1 errors {}, H1 rate {h1:.3} in [0.8, 1.3]", errors.join(", ")),
    })
}

fn flatten(r: anyhow::Result<Verdict>) -> Verdict {
    r.unwrap_or_else(|e| Verdict { passed: false, detail: format!("error: {e:#}") })
}

fn report(id: usize, name: &str, budget: Duration, elapsed: Duration, v: &Verdict) -> bool {
    let in_time = elapsed <= budget;
    let passed = v.passed && in_time;
    println!(
        "criterion {id} {name}: {} ({}; {:.1} s <= {} s)",
        if passed { "PASS" } else { "FAIL" },
        v.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    passed
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() -> ExitCode {
    let minutes = |m: u64| Duration::from_secs(60 * m);
    let mut results = Vec::new();

    let suites = [
        (1, "static energy identity", Suite::EnergyK0, Duration::from_secs(30)),
        (2, "static operator identities", Suite::Conventions, minutes(1)),
        (3, "jump relations", Suite::Jumps, minutes(1)),
        (4, "exterior Calderon residual", Suite::Calderon, minutes(2)),
    ];
    for (id, name, suite, budget) in suites {
        let (v, t) = timed(|| suite_verdict(suite));
        results.push(report(id, name, budget, t, &v));
    }

    let (first, t) = timed(|| h_version(1.5));
    let (base, v) = match first {
        Ok((outcome, v)) => (Some(outcome), v),
        Err(e) => (None, Verdict { passed: false, detail: format!("error: {e:#}") }),
    };
    results.push(report(5, "h-version tc1 k = 1.5 sqrt3 pi", minutes(10), t, &v));
    let (v, t) = timed(|| flatten(criterion_6(base.as_ref())));
    results.push(report(6, "h-version tc1 k = 3 sqrt3 pi", minutes(10), t, &v));

    let (v, t) = timed(|| flatten(criterion_7()));
    results.push(report(7, "p-version tc1 k = 3 sqrt3 pi", minutes(15), t, &v));
    let (v, t) = timed(|| flatten(criterion_8()));
    results.push(report(8, "solver cross-check", minutes(2), t, &v));
    let (v, t) = timed(|| flatten(criterion_9()));
    results.push(report(9, "h-version tc2 k = sqrt3 pi", minutes(10), t, &v));

    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
