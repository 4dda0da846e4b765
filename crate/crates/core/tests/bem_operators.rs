use std::f64::consts::PI;
use std::sync::Arc;

use faer::{Mat, Side};
use fembem_core::bem::{
    apply_to_function, assemble_adjoint_double_layer, assemble_blocks, assemble_double_layer, assemble_hypersingular,
    assemble_operator_set, assemble_single_layer, barycentric, panel_quadrature, BemOptions, BlockSpec, BoundarySpace,
    Density, FunctionSpec, OperatorKind, PairClass, PotentialEvaluator, TraceSpaces,
};
use fembem_core::geom::{self, Point};
use fembem_core::mesh::{cube_mesh, extract_boundary, icosphere};
use fembem_core::C64;

fn cube_spaces(n: usize, degree: usize) -> TraceSpaces {
    let mesh = cube_mesh(1.0, n).unwrap();
    TraceSpaces::new(Arc::new(extract_boundary(&mesh).unwrap()), degree).unwrap()
}

fn fro(m: &Mat<C64>) -> f64 {
    m.norm_l2()
}

fn diff(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    fro(&(a - b))
}

fn transpose(a: &Mat<C64>) -> Mat<C64> {
    a.transpose().to_owned()
}

fn hermitian_eigenvalues(a: &Mat<C64>) -> Vec<f64> {
    let h = Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let eig = h.self_adjoint_eigen(Side::Lower).unwrap();
    let s = eig.S();
    let mut v: Vec<f64> = (0..a.nrows()).map(|i| s[i].re).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn static_single_layer_is_hermitian_positive_definite() {
    for degree in [1, 2] {
        let sp = cube_spaces(1, degree);
        let v = assemble_single_layer(&sp, 0.0, &BemOptions::default()).unwrap();
        assert!(diff(&v, &v.adjoint().to_owned()) <= 1e-13 * fro(&v));
        let eig = hermitian_eigenvalues(&v);
        assert!(eig[0] > 0.0, "degree {degree}: smallest eigenvalue {}", eig[0]);
    }
}

#[test]
fn static_hypersingular_kernel_is_the_constants() {
    for degree in [1, 2] {
        let sp = cube_spaces(1, degree);
        let w = assemble_hypersingular(&sp, 0.0, &BemOptions::default()).unwrap();
        let ones = vec![C64::new(1.0, 0.0); sp.dim_z()];
        let w1 = fembem_core::linalg::dense_matvec(&w, &ones);
        assert!(fembem_core::linalg::norm2(&w1) <= 1e-10 * fro(&w));
        let eig = hermitian_eigenvalues(&w);
        assert!(eig[0] >= -1e-12 * fro(&w));
        assert!(eig[1] > 1e-6 * fro(&w), "second eigenvalue {}", eig[1]);
    }
}

#[test]
fn adjoint_double_layer_is_transpose_of_double_layer() {
    for k in [0.0, 3.0] {
        let sp = cube_spaces(1, 2);
        let opts = BemOptions::default();
        let kk = assemble_double_layer(&sp, k, &opts).unwrap();
        let kp = assemble_adjoint_double_layer(&sp, k, &opts).unwrap();
        assert!(diff(&kp, &transpose(&kk)) <= 1e-12 * fro(&kk), "k = {k}");
    }
}

#[test]
fn single_layer_and_hypersingular_are_complex_symmetric() {
    let sp = cube_spaces(1, 1);
    let set = assemble_operator_set(&sp, 4.0, &BemOptions::default()).unwrap();
    assert!(diff(&set.single, &transpose(&set.single)) <= 1e-13 * fro(&set.single));
    assert!(diff(&set.hypersingular, &transpose(&set.hypersingular)) <= 1e-13 * fro(&set.hypersingular));
}

#[test]
fn double_layer_of_constant_is_minus_half_mass() {
    // On a closed surface the double layer maps 1 to -1/2 almost everywhere.
    for degree in [1, 2] {
        let sp = cube_spaces(1, degree);
        let kk = assemble_double_layer(&sp, 0.0, &BemOptions::default()).unwrap();
        let ones = vec![C64::new(1.0, 0.0); sp.dim_z()];
        let lhs = fembem_core::linalg::dense_matvec(&kk, &ones);
        let rhs: Vec<C64> =
            sp.mass(BoundarySpace::W, BoundarySpace::Z).unwrap().matvec(&ones).into_iter().map(|v| -0.5 * v).collect();
        let err = fembem_core::linalg::rel_diff_vec(&lhs, &rhs);
        assert!(err < 1e-3, "degree {degree}: {err}");
    }
}

#[test]
fn single_layer_of_constant_on_unit_sphere() {
    // <V_0 1, 1> = 4 pi on the unit sphere.
    let mut errors = Vec::new();
    for level in 1..=3 {
        let surf = icosphere(1.0, level).unwrap();
        let sp = TraceSpaces::new(Arc::new(surf), 1).unwrap();
        let v = assemble_single_layer(&sp, 0.0, &BemOptions::default()).unwrap();
        let total: C64 = (0..v.nrows()).flat_map(|i| (0..v.ncols()).map(move |j| (i, j))).map(|(i, j)| v[(i, j)]).sum();
        errors.push((total.re - 4.0 * PI).abs() / (4.0 * PI));
    }
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[2] < 0.01, "{errors:?}");
}

#[test]
fn operators_are_continuous_as_wavenumber_vanishes() {
    let sp = cube_spaces(1, 1);
    let opts = BemOptions::default();
    let a = assemble_operator_set(&sp, 0.0, &opts).unwrap();
    let b = assemble_operator_set(&sp, 1e-3, &opts).unwrap();
    assert!(diff(&a.single, &b.single) < 1e-3 * fro(&a.single));
    assert!(diff(&a.double, &b.double) < 1e-5 * fro(&a.double));
    assert!(diff(&a.hypersingular, &b.hypersingular) < 1e-5 * fro(&a.hypersingular));
}

#[test]
fn parallel_and_serial_assembly_agree_bitwise() {
    let sp = cube_spaces(2, 1);
    let par = BemOptions::default();
    let ser = BemOptions { parallel: false, ..par };
    let a = assemble_operator_set(&sp, 2.0, &par).unwrap();
    let b = assemble_operator_set(&sp, 2.0, &ser).unwrap();
    for (x, y) in [(&a.single, &b.single), (&a.double, &b.double), (&a.hypersingular, &b.hypersingular)] {
        assert_eq!(diff(x, y), 0.0);
    }
}

#[test]
fn hypersingular_rejects_discontinuous_space() {
    let sp = cube_spaces(1, 1);
    let spec = BlockSpec::single(OperatorKind::Hypersingular, BoundarySpace::W, BoundarySpace::Z);
    assert!(assemble_blocks(&sp, 1.0, &BemOptions::default(), &[spec]).is_err());
}

#[test]
fn function_application_matches_matrix_times_coefficients() {
    let sp = cube_spaces(1, 1);
    let opts = BemOptions::default();
    let k = 2.5;
    let set = assemble_operator_set(&sp, k, &opts).unwrap();
    let ones_w = vec![C64::new(1.0, 0.0); sp.dim_w()];
    let ones_z = vec![C64::new(1.0, 0.0); sp.dim_z()];
    let specs = [
        FunctionSpec { test: BoundarySpace::W, terms: vec![(OperatorKind::Single, C64::new(1.0, 0.0))] },
        FunctionSpec { test: BoundarySpace::W, terms: vec![(OperatorKind::Double, C64::new(1.0, 0.0))] },
        FunctionSpec { test: BoundarySpace::Z, terms: vec![(OperatorKind::AdjointDouble, C64::new(1.0, 0.0))] },
    ];
    let out = apply_to_function(&sp, k, &opts, &|_, _| C64::new(1.0, 0.0), &specs).unwrap();
    let dm = fembem_core::linalg::dense_matvec;
    assert!(fembem_core::linalg::rel_diff_vec(&out[0], &dm(&set.single, &ones_w)) < 1e-12);
    assert!(fembem_core::linalg::rel_diff_vec(&out[1], &dm(&set.double, &ones_z)) < 1e-12);
    assert!(fembem_core::linalg::rel_diff_vec(&out[2], &dm(&set.adjoint_double, &ones_w)) < 1e-12);
}

fn pair_integral(class: PairClass, n: usize, p: &[Point; 3], q: &[Point; 3], f: impl Fn(&Point, &Point) -> f64) -> f64 {
    let rule = panel_quadrature(class, n).unwrap();
    let map = |t: &[Point; 3], s: &[f64; 2]| {
        let b = barycentric(s);
        [0, 1, 2].map(|i| b[0] * t[0][i] + b[1] * t[1][i] + b[2] * t[2][i])
    };
    let area = |t: &[Point; 3]| 0.5 * geom::norm(&geom::cross(&geom::sub(&t[1], &t[0]), &geom::sub(&t[2], &t[0])));
    let jac = 4.0 * area(p) * area(q);
    (0..rule.len()).map(|i| rule.weights[i] * f(&map(p, &rule.x[i]), &map(q, &rule.y[i]))).sum::<f64>() * jac
}

#[test]
fn identical_panel_rule_is_stable_in_order() {
    let t = [[0.0, 0.0, 0.0], [1.0, 0.1, 0.0], [0.3, 0.8, 0.0]];
    let f = |x: &Point, y: &Point| 1.0 / geom::dist(x, y);
    let vals: Vec<f64> = (8..=12).map(|n| pair_integral(PairClass::Identical, n, &t, &t, f)).collect();
    for w in vals.windows(2) {
        assert!((w[1] - w[0]).abs() < 1e-8 * w[1].abs(), "{vals:?}");
    }
}

#[test]
fn singular_rules_integrate_smooth_kernels_like_the_tensor_rule() {
    let f = |x: &Point, y: &Point| (-geom::dist(x, y).powi(2)).exp() * (1.0 + x[0] * y[1]);
    let a = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.2, 0.9, 0.0]];
    let edge = [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.6, -0.7, 0.3]];
    let vert = [[0.0, 0.0, 0.0], [-0.8, 0.3, 0.1], [-0.5, -0.6, 0.4]];
    for (class, b) in [(PairClass::Edge, edge), (PairClass::Vertex, vert), (PairClass::Identical, a)] {
        let singular = pair_integral(class, 10, &a, &b, f);
        let tensor = pair_integral(PairClass::Far, 12, &a, &b, f);
        assert!((singular - tensor).abs() < 1e-10 * tensor.abs(), "{class:?}: {singular} vs {tensor}");
    }
}

#[test]
fn single_layer_potential_of_constant_at_sphere_centre() {
    // On the unit sphere the static single layer potential of 1 equals 1
    // at the centre; flat panels approach it under refinement.
    let mut errors = Vec::new();
    for level in 1..=3 {
        let sp = TraceSpaces::new(Arc::new(icosphere(1.0, level).unwrap()), 1).unwrap();
        let ones = vec![C64::new(1.0, 0.0); sp.dim_w()];
        let ev = PotentialEvaluator::new(&sp, 0.0, 4).unwrap();
        let val = ev.single_layer(&[0.0; 3], Density::W(&ones)).unwrap().value;
        errors.push((val - 1.0).norm());
    }
    assert!(errors.windows(2).all(|w| w[1] < 0.5 * w[0]), "{errors:?}");
    assert!(errors[2] < 1e-2, "{errors:?}");
}

#[test]
fn double_layer_potential_of_constant_is_minus_one_inside() {
    let sp = cube_spaces(1, 1);
    let ones = vec![C64::new(1.0, 0.0); sp.dim_z()];
    let ev = PotentialEvaluator::new(&sp, 0.0, 6).unwrap();
    for x in [[0.1, 0.2, -0.3], [0.45, 0.0, 0.1], [0.0, 0.0, 0.499]] {
        let v = ev.double_layer(&x, Density::Z(&ones)).unwrap().value;
        assert!((v + 1.0).norm() < 1e-6, "{x:?}: {v}");
    }
    let outside = ev.double_layer(&[0.9, 0.1, 0.2], Density::Z(&ones)).unwrap().value;
    assert!(outside.norm() < 1e-6);
}

#[test]
fn potentials_solve_the_helmholtz_equation() {
    let sp = cube_spaces(1, 1);
    let k = 3.0;
    let ev = PotentialEvaluator::new(&sp, k, 6).unwrap();
    let dens: Vec<C64> = (0..sp.dim_w()).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.7).cos())).collect();
    let x0 = [1.3, 0.2, -0.4];
    let h = 1e-3;
    let u = |x: &Point| ev.single_layer(x, Density::W(&dens)).unwrap();
    let centre = u(&x0);
    let mut lap = C64::new(0.0, 0.0);
    for i in 0..3 {
        let (mut xp, mut xm) = (x0, x0);
        xp[i] += h;
        xm[i] -= h;
        let (up, um) = (u(&xp), u(&xm));
        lap += (up.value - 2.0 * centre.value + um.value) / (h * h);
        let fd = (up.value - um.value) / (2.0 * h);
        let g = centre.gradient[i];
        assert!((fd - g).norm() < 1e-5 * g.norm(), "{fd} vs {g}");
    }
    let res = lap + centre.value * k * k;
    assert!(res.norm() < 1e-4 * (k * k * centre.value.norm()), "{res}");
}

#[test]
fn potential_rejects_points_on_the_surface() {
    let sp = cube_spaces(1, 1);
    let ones = vec![C64::new(1.0, 0.0); sp.dim_w()];
    let ev = PotentialEvaluator::new(&sp, 1.0, 4).unwrap();
    assert!(ev.single_layer(&[0.5, 0.1, 0.1], Density::W(&ones)).is_err());
}
