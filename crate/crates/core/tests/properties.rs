use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use fembem_core::analysis::{least_squares_rate, pair_rate, Bound};
use fembem_core::bem::{green_kernel, TraceSpaces};
use fembem_core::coupling::{
    assemble_block_system, assemble_t_matrix, BlockSystem, CouplingOptions, ManufacturedCase, TMatrix,
};
use fembem_core::fem::FeSpace;
use fembem_core::lagrange::SimplexLagrange;
use fembem_core::linalg::{dense_matvec, rel_diff_vec, CsrMatrix};
use fembem_core::mesh::{cube_mesh, refine_uniform};
use fembem_core::quadrature::{tet_rule, triangle_rule};
use fembem_core::C64;
use proptest::prelude::*;

struct Fixture {
    system: BlockSystem,
    t: TMatrix,
}

/// Level-0 tc1 system and form matrix, assembled once for all cases.
fn fixture() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let case = ManufacturedCase::plane_and_point_source(1.5 * 3f64.sqrt() * PI).unwrap();
        let fe = FeSpace::new(Arc::new(case.domain.mesh(0).unwrap()), 1).unwrap();
        let sp = TraceSpaces::new(fe.surface().clone(), 1).unwrap();
        let opts = CouplingOptions::default();
        let system = assemble_block_system(&case, &fe, &sp, &opts).unwrap();
        let t = assemble_t_matrix(&case.medium, &fe, &sp, &opts).unwrap();
        Fixture { system, t }
    })
}

fn vector(seed: u64, n: usize) -> Vec<C64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn combine(a: C64, x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(u, v)| a * u + v).collect()
}

fn scalar() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0..1.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn least_squares_recovers_a_power_law(rate in 0.1..4.0f64, c in 0.01..100.0f64, ratio in 1.2..3.0f64, n in 2usize..6) {
        let h: Vec<f64> = (0..n).map(|i| ratio.powi(-(i as i32))).collect();
        let e: Vec<f64> = h.iter().map(|hi| c * hi.powf(rate)).collect();
        prop_assert!((least_squares_rate(&h, &e).unwrap() - rate).abs() < 1e-9);
        prop_assert!((pair_rate((h[0], h[1]), (e[0], e[1])) - rate).abs() < 1e-9);
    }

    #[test]
    fn rates_reject_non_decreasing_sizes(h0 in 0.1..1.0f64, e in 0.1..1.0f64) {
        prop_assert!(least_squares_rate(&[h0, h0], &[e, e / 2.0]).is_err());
        prop_assert!(least_squares_rate(&[h0, 2.0 * h0], &[e, e]).is_err());
    }

    #[test]
    fn block_application_is_linear(a in scalar(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let sys = &fixture().system;
        let n = sys.dims.total();
        let (x, y) = (vector(s1, n), vector(s2, n));
        let apply = |v: &[C64]| {
            let (u, m, d) = sys.split(v);
            sys.apply(u, m, d)
        };
        let lhs = apply(&combine(a, &x, &y));
        let rhs = combine(a, &apply(&x), &apply(&y));
        prop_assert!(rel_diff_vec(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn form_is_sesquilinear(a in scalar(), s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let t = &fixture().t;
        let n = t.dims.total();
        let (x, y, z) = (vector(s1, n), vector(s2, n), vector(s3, n));
        let scale = t.form(&x, &z).norm() + t.form(&y, &z).norm() + 1.0;
        let linear = t.form(&combine(a, &x, &y), &z) - (a * t.form(&x, &z) + t.form(&y, &z));
        prop_assert!(linear.norm() < 1e-10 * scale);
        let scale = t.form(&z, &x).norm() + t.form(&z, &y).norm() + 1.0;
        let antilinear = t.form(&z, &combine(a, &x, &y)) - (a.conj() * t.form(&z, &x) + t.form(&z, &y));
        prop_assert!(antilinear.norm() < 1e-10 * scale);
    }

    #[test]
    fn form_matches_its_dense_matrix(s1 in any::<u64>(), s2 in any::<u64>()) {
        let t = &fixture().t;
        let n = t.dims.total();
        let (x, y) = (vector(s1, n), vector(s2, n));
        let tx = dense_matvec(&t.to_dense(), &x);
        let dense: C64 = tx.iter().zip(&y).map(|(a, b)| a * b.conj()).sum();
        prop_assert!((dense - t.form(&x, &y)).norm() <= 1e-12 * dense.norm().max(1.0));
    }

    #[test]
    fn kernel_is_symmetric_and_bounded(k in 0.0..20.0f64, x in point(), y in point()) {
        prop_assume!(fembem_core::geom::dist(&x, &y) > 1e-3);
        let (gxy, gyx) = (green_kernel(k, &x, &y).unwrap(), green_kernel(k, &y, &x).unwrap());
        prop_assert_eq!(gxy, gyx);
        let r = fembem_core::geom::dist(&x, &y);
        prop_assert!((gxy.norm() - 1.0 / (4.0 * PI * r)).abs() <= 1e-12 / r);
    }

    #[test]
    fn lagrange_bases_partition_unity(degree in 1usize..4, a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
        let s = a + b + c;
        prop_assume!(s > 1e-9);
        let t = s.max(1.0);
        let x = [a / t, b / t, c / t];
        let e = SimplexLagrange::<3>::new(degree).unwrap();
        let mut phi = vec![0.0; e.num_basis()];
        e.eval(&x, &mut phi);
        prop_assert!((phi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mut grad = vec![[0.0; 3]; e.num_basis()];
        e.grad(&x, &mut grad);
        for d in 0..3 {
            prop_assert!(grad.iter().map(|g| g[d]).sum::<f64>().abs() < 1e-10);
        }
    }

    #[test]
    fn simplex_rules_integrate_monomials(n in 1usize..7, i in 0u32..6, j in 0u32..6, l in 0u32..6) {
        prop_assume!(((i + j) as usize) < 2 * n);
        let rule = triangle_rule(n).unwrap();
        let q: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[0].powi(i as i32) * p[1].powi(j as i32)).sum();
        prop_assert!((q - simplex_monomial(&[i, j])).abs() < 1e-13);
        prop_assume!(((i + j + l) as usize) < 2 * n);
        let rule = tet_rule(n).unwrap();
        let q: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| w * p[0].powi(i as i32) * p[1].powi(j as i32) * p[2].powi(l as i32))
            .sum();
        prop_assert!((q - simplex_monomial(&[i, j, l])).abs() < 1e-13);
    }

    #[test]
    fn triplet_duplicates_are_summed(entries in prop::collection::vec((0usize..4, 0usize..5, -1.0..1.0f64), 0..30), s in any::<u64>()) {
        let triplets: Vec<_> = entries.iter().map(|&(i, j, v)| (i, j, C64::new(v, -v))).collect();
        let m = CsrMatrix::from_triplets(4, 5, triplets.clone());
        let x = vector(s, 5);
        let mut want = vec![C64::new(0.0, 0.0); 4];
        for (i, j, v) in triplets {
            want[i] += v * x[j];
        }
        let got = m.matvec(&x);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn bounds_treat_nan_as_failure(limit in -10.0..10.0f64) {
        for b in [Bound::AtMost(limit), Bound::AtLeast(limit), Bound::Below(limit), Bound::Above(limit)] {
            prop_assert!(!b.holds(f64::NAN));
        }
        prop_assert!(Bound::AtMost(limit).holds(limit) && Bound::AtLeast(limit).holds(limit));
    }
}

/// `∫ x^a y^b (z^c)` over the reference simplex: `a! b! c! / (d + sum)!`.
fn simplex_monomial(exponents: &[u32]) -> f64 {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    let num: f64 = exponents.iter().map(|&e| fact(e)).product();
    num / fact(exponents.len() as u32 + exponents.iter().sum::<u32>())
}

#[test]
fn refinement_preserves_volume_and_multiplies_cells() {
    let mut mesh = cube_mesh(1.0, 1).unwrap();
    for _ in 0..3 {
        let fine = refine_uniform(&mesh).unwrap();
        assert_eq!(fine.num_tets(), 8 * mesh.num_tets());
        assert!((fine.total_volume() - 1.0).abs() < 1e-13);
        mesh = fine;
    }
}
