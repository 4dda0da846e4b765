use std::f64::consts::PI;
use std::sync::Arc;

use faer::Mat;
use fembem_core::analysis::{compute_errors, error_quadrature_order};
use fembem_core::bem::{BemOptions, TraceSpaces};
use fembem_core::coupling::{
    assemble_block_system, assemble_t_matrix, jump_rhs, trace_dofs, BlockSystem, CaseDomain, CouplingOptions, Field,
    FieldSample, ManufacturedCase, Source,
};
use fembem_core::fem::{FeSpace, MediumCoefficients};
use fembem_core::linalg::{norm2, rel_diff, rel_diff_vec, CsrMatrix};
use fembem_core::solver::schur_solve;
use fembem_core::{Error, C64};

fn spaces(case: &ManufacturedCase, level: usize, degree: usize) -> (FeSpace, TraceSpaces) {
    let fe = FeSpace::new(Arc::new(case.domain.mesh(level).unwrap()), degree).unwrap();
    let sp = TraceSpaces::new(fe.surface().clone(), degree).unwrap();
    (fe, sp)
}

fn tc1() -> ManufacturedCase {
    ManufacturedCase::plane_and_point_source(1.5 * 3f64.sqrt() * PI).unwrap()
}

/// tc1's interior field on both sides, so every jump vanishes.
fn matched_case(k: f64) -> ManufacturedCase {
    let base = ManufacturedCase::plane_and_point_source(k).unwrap();
    let b1 = base.clone();
    let field: Field = Arc::new(move |x| b1.interior(x));
    let b2 = base.clone();
    let source: Source = Arc::new(move |x, r| b2.source(x, r));
    ManufacturedCase::new(
        "matched",
        MediumCoefficients::homogeneous(k),
        CaseDomain::Cube { cells: 2 },
        field.clone(),
        Some(field),
        source,
    )
    .unwrap()
}

fn zero_case(k: f64) -> ManufacturedCase {
    let field: Field = Arc::new(|_| FieldSample::zero());
    let source: Source = Arc::new(|_, _| C64::new(0.0, 0.0));
    ManufacturedCase::new(
        "zero",
        MediumCoefficients::homogeneous(k),
        CaseDomain::Cube { cells: 2 },
        field,
        None,
        source,
    )
    .unwrap()
}

fn csr_rel_diff(a: &CsrMatrix, b: &CsrMatrix) -> f64 {
    rel_diff(&a.to_dense(), &b.to_dense())
}

fn negated(m: &Mat<C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| -m[(i, j)])
}

fn exact_coefficients(case: &ManufacturedCase, fe: &FeSpace, sp: &TraceSpaces) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
    let u = fe.interpolate(|x| case.interior(x).value);
    let m = sp.project_w(|x, t| case.mortar(x, &sp.panels()[t].normal)).unwrap();
    let d = sp.interpolate_z(|x| case.exterior_trace(x));
    (u, m, d)
}

#[test]
fn dimensions_follow_the_spaces() {
    let case = tc1();
    let (fe, sp) = spaces(&case, 0, 2);
    let sys = assemble_block_system(&case, &fe, &sp, &CouplingOptions::default()).unwrap();
    assert_eq!(sys.dims.volume, fe.num_dofs());
    assert_eq!(sys.dims.mortar, sp.dim_w());
    assert_eq!(sys.dims.exterior, sp.dim_z());
    assert_eq!(sys.rhs().len(), sys.dims.total());
    assert_eq!(sys.to_dense().nrows(), sys.dims.total());
}

#[test]
fn zero_data_gives_zero_right_hand_side_and_solution() {
    let case = zero_case(2.0);
    let (fe, sp) = spaces(&case, 0, 1);
    let sys = assemble_block_system(&case, &fe, &sp, &CouplingOptions::default()).unwrap();
    assert!(sys.rhs().iter().all(|v| *v == C64::new(0.0, 0.0)));
    let sol = schur_solve(&sys).unwrap();
    assert!(sol.u.iter().chain(&sol.m).chain(&sol.uext).all(|v| *v == C64::new(0.0, 0.0)));
    assert_eq!(sol.stats.residual, 0.0);
}

#[test]
fn matching_fields_give_vanishing_jump_data() {
    let case = matched_case(3.0);
    let (_, sp) = spaces(&case, 0, 1);
    let (r2, r3) = jump_rhs(&case, &sp, &CouplingOptions::default()).unwrap();
    assert!(r2.iter().chain(&r3).all(|v| *v == C64::new(0.0, 0.0)));
}

#[test]
fn impedance_block_is_complex_symmetric() {
    let case = tc1();
    let (fe, sp) = spaces(&case, 0, 2);
    let sys = assemble_block_system(&case, &fe, &sp, &CouplingOptions::default()).unwrap();
    assert!(csr_rel_diff(&sys.a_blk, &sys.a_blk.transpose()) < 1e-14);
    assert!(sys.a_blk.iter().any(|(_, _, v)| v.im != 0.0));
}

#[test]
fn mortar_pairings_are_transposes() {
    let case = tc1();
    let (fe, sp) = spaces(&case, 0, 2);
    let sys = assemble_block_system(&case, &fe, &sp, &CouplingOptions::default()).unwrap();
    let minus_b1t = CsrMatrix::combine(&[(C64::new(-1.0, 0.0), &sys.b1)]).transpose();
    assert!(csr_rel_diff(&minus_b1t, &sys.b4) < 1e-15);
}

#[test]
fn form_matrix_reconciles_with_block_system() {
    // The sesquilinear form is assembled from nine single-operator blocks,
    // the block system from fused combinations; rows (v, λ, ṽ) of T are the
    // rows [V; W; -Z] of the block system.
    let case = tc1();
    for degree in [1, 2] {
        let (fe, sp) = spaces(&case, 0, degree);
        let opts = CouplingOptions::default();
        let sys = assemble_block_system(&case, &fe, &sp, &opts).unwrap();
        let t = assemble_t_matrix(&case.medium, &fe, &sp, &opts).unwrap();
        assert_eq!(t.dims, sys.dims);
        assert!(csr_rel_diff(&t.vu, &sys.a_blk) < 1e-14);
        assert!(csr_rel_diff(&t.vm, &sys.b1) < 1e-14);
        assert!(csr_rel_diff(&t.lu, &sys.b4) < 1e-14);
        assert!(rel_diff(&t.lm, &sys.b5) < 1e-12);
        assert!(rel_diff(&t.ld, &sys.b6) < 1e-12, "degree {degree}");
        assert!(rel_diff(&t.tm, &negated(&sys.b2)) < 1e-12);
        assert!(rel_diff(&t.td, &negated(&sys.b3)) < 1e-12);
    }
}

#[test]
fn fused_and_separate_jump_data_agree() {
    let case = tc1();
    let (fe, sp) = spaces(&case, 0, 2);
    let opts = CouplingOptions::default();
    let sys = assemble_block_system(&case, &fe, &sp, &opts).unwrap();
    let (r2, r3) = jump_rhs(&case, &sp, &opts).unwrap();
    assert!(rel_diff_vec(&sys.rhs_r2, &r2) < 1e-13);
    assert!(rel_diff_vec(&sys.rhs_r3, &r3) < 1e-13);
}

#[test]
fn exact_solution_residual_decreases_under_refinement() {
    let case = tc1();
    let opts = CouplingOptions::default();
    let residuals: Vec<f64> = (0..3)
        .map(|level| {
            let (fe, sp) = spaces(&case, level, 1);
            let sys = assemble_block_system(&case, &fe, &sp, &opts).unwrap();
            let (u, m, d) = exact_coefficients(&case, &fe, &sp);
            sys.relative_residual(&u, &m, &d)
        })
        .collect();
    for w in residuals.windows(2) {
        assert!(w[1] < 0.6 * w[0], "{residuals:?}");
    }
}

#[test]
fn polynomial_fields_are_reproduced() {
    for p in [2, 3] {
        let case = ManufacturedCase::polynomial(1.5 * 3f64.sqrt() * PI, p).unwrap();
        let (fe, sp) = spaces(&case, 0, p);
        let sys = assemble_block_system(&case, &fe, &sp, &CouplingOptions::default()).unwrap();
        let sol = schur_solve(&sys).unwrap();
        let e = compute_errors(&sol, &case, &fe, &sp, error_quadrature_order(p)).unwrap();
        for v in [e.rel_l2_omega, e.rel_h1semi_omega, e.scaled_rel_l2_m, e.scaled_rel_l2_uext] {
            assert!(v <= 1e-10, "p = {p}: {e:?}");
        }
        // The exact coefficients satisfy the discrete equations.
        let (u, m, d) = exact_coefficients(&case, &fe, &sp);
        assert!(sys.relative_residual(&u, &m, &d) < 1e-10);
    }
}

#[test]
fn mismatched_spaces_are_rejected() {
    let case = tc1();
    let (fe0, _) = spaces(&case, 0, 1);
    let (_, sp1) = spaces(&case, 1, 1);
    let opts = CouplingOptions::default();
    assert!(matches!(assemble_block_system(&case, &fe0, &sp1, &opts), Err(Error::DimensionMismatch { .. })));
    let sp2 = TraceSpaces::new(fe0.surface().clone(), 2).unwrap();
    assert!(matches!(trace_dofs(&fe0, &sp2), Err(Error::InvalidArgument(_))));
    // Same triangle count, different geometry.
    let scaled = fembem_core::mesh::cube_mesh(2.0, 2).unwrap();
    let fe_big = FeSpace::new(Arc::new(scaled), 1).unwrap();
    let sp0 = TraceSpaces::new(fe0.surface().clone(), 1).unwrap();
    assert!(matches!(trace_dofs(&fe_big, &sp0), Err(Error::InvalidMesh(_))));
}

#[test]
fn negative_wavenumber_is_rejected() {
    let field: Field = Arc::new(|_| FieldSample::zero());
    let source: Source = Arc::new(|_, _| C64::new(0.0, 0.0));
    let medium = MediumCoefficients::homogeneous(-1.0);
    assert!(ManufacturedCase::new("bad", medium, CaseDomain::Cube { cells: 1 }, field, None, source).is_err());
}

#[test]
fn serial_and_parallel_assembly_agree() {
    let case = tc1();
    let (fe, sp) = spaces(&case, 0, 1);
    let serial = CouplingOptions { bem: BemOptions { parallel: false, ..Default::default() }, ..Default::default() };
    let a = assemble_block_system(&case, &fe, &sp, &serial).unwrap();
    let b = assemble_block_system(&case, &fe, &sp, &CouplingOptions::default()).unwrap();
    assert!(rel_diff(&a.to_dense(), &b.to_dense()) <= 1e-12);
    assert!(rel_diff_vec(&a.rhs(), &b.rhs()) <= 1e-12);
}

#[test]
fn block_application_matches_dense_matrix() {
    let case = tc1();
    let (fe, sp) = spaces(&case, 0, 1);
    let sys: BlockSystem = assemble_block_system(&case, &fe, &sp, &CouplingOptions::default()).unwrap();
    let n = sys.dims.total();
    let x: Vec<C64> = (0..n).map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
    let (u, m, d) = sys.split(&x);
    let dense = fembem_core::linalg::dense_matvec(&sys.to_dense(), &x);
    let blocks = sys.apply(u, m, d);
    assert!(rel_diff_vec(&blocks, &dense) < 1e-14);
    assert!(norm2(&blocks) > 0.0);
}
