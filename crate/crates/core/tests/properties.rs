//! Randomized invariants across modules.

use proptest::prelude::*;

use twistres::algebra::Algebra;
use twistres::catalog;
use twistres::cli::{load, run, Overrides, RunOptions};
use twistres::complex::{compose_check, exactness_report, truncate, ChainComplexSpec};
use twistres::homology::{ext_over_augmented, tor_over_augmented};
use twistres::kernel::{homology_dim, rank, Field, SparseMatrix};
use twistres::lin::Lin;
use twistres::resolutions::{cyclic_periodic, lift_twist, one_sided_koszul, ore_koszul, poly_koszul, LiftSide};
use twistres::twistprod::{action_commutes_check, SignRule, TwistedBicomplex};

const Q: Field = Field::RATIONALS;

fn matrix(rows: usize, cols: usize, entries: &[i64]) -> Vec<Vec<i64>> {
    (0..rows).map(|r| (0..cols).map(|c| entries[(r * cols + c) % entries.len()]).collect()).collect()
}

fn dense_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter().map(|row| (0..cols).map(|c| (0..inner).map(|k| row[k] * b[k][c]).sum()).collect()).collect()
}

fn block_diag(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let (ac, bc) = (a.first().map_or(0, |r| r.len()), b.first().map_or(0, |r| r.len()));
    let mut out: Vec<Vec<i64>> = a.iter().map(|r| r.iter().copied().chain(std::iter::repeat_n(0, bc)).collect()).collect();
    out.extend(b.iter().map(|r| std::iter::repeat_n(0, ac).chain(r.iter().copied()).collect()));
    out
}

/// `X·P` and `Q·Y` with `P·Q = 0`: a random two-step complex through `k^n`.
fn two_step(n: usize, k: usize, m: usize, r: usize, xs: &[i64], ys: &[i64]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let p: Vec<Vec<i64>> = (0..k).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let q: Vec<Vec<i64>> = (0..n).map(|i| (0..n - k).map(|j| i64::from(i == j + k)).collect()).collect();
    let d_out = dense_mul(&matrix(m, k, xs), &p);
    let d_in = dense_mul(&q, &matrix(n - k, r, ys));
    (d_in, d_out)
}

fn complexes() -> Vec<ChainComplexSpec> {
    let kxy = Algebra::polynomial(Q, &["x", "y"]);
    vec![
        poly_koszul(&kxy, true).unwrap().complex,
        ore_koszul(&catalog::weyl_algebra(Q)).unwrap().complex,
        one_sided_koszul(&catalog::heisenberg_algebra(Q)).unwrap().complex,
        cyclic_periodic(Field::new(3).unwrap(), 3, 4).unwrap().complex,
        ore_koszul(&catalog::solvable_algebra(Q)).unwrap().complex,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(40) })]

    #[test]
    fn rank_of_transpose(rows in 1usize..9, cols in 1usize..9, entries in prop::collection::vec(-3i64..=3, 1..40), p in prop::sample::select(vec![0u64, 2, 3, 7])) {
        let f = Field::new(p).unwrap();
        let m = SparseMatrix::from_rows(f, &matrix(rows, cols, &entries));
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }

    #[test]
    fn rank_over_q_matches_a_large_prime(rows in 1usize..9, cols in 1usize..9, entries in prop::collection::vec(-9i64..=9, 1..50)) {
        let dense = matrix(rows, cols, &entries);
        let big = Field::new(1_000_003).unwrap();
        prop_assert_eq!(rank(&SparseMatrix::from_rows(Q, &dense)), rank(&SparseMatrix::from_rows(big, &dense)));
    }

    #[test]
    fn homology_is_additive_over_blocks(
        n1 in 2usize..6, n2 in 2usize..6, k1 in 1usize..3, k2 in 1usize..3,
        xs in prop::collection::vec(-2i64..=2, 1..20), ys in prop::collection::vec(-2i64..=2, 1..20),
    ) {
        let (k1, k2) = (k1.min(n1 - 1), k2.min(n2 - 1));
        let (a_in, a_out) = two_step(n1, k1, 3, 2, &xs, &ys);
        let (b_in, b_out) = two_step(n2, k2, 2, 3, &ys, &xs);
        let h = |i: &[Vec<i64>], o: &[Vec<i64>]| homology_dim(&SparseMatrix::from_rows(Q, i), &SparseMatrix::from_rows(Q, o)).unwrap();
        prop_assert_eq!(h(&block_diag(&a_in, &b_in), &block_diag(&a_out, &b_out)), h(&a_in, &a_out) + h(&b_in, &b_out));
    }

    #[test]
    fn truncations_compose_and_are_deterministic(which in 0usize..5, n_cut in 1u32..5) {
        let c = &complexes()[which];
        prop_assert!(compose_check(c).passed());
        let a = truncate(c, n_cut).unwrap();
        let b = truncate(c, n_cut).unwrap();
        prop_assert!(a.composes_to_zero());
        prop_assert_eq!(&a.bases, &b.bases);
        prop_assert_eq!(&a.matrices, &b.matrices);
    }

    #[test]
    fn graded_slices_sum_to_the_truncation(which in prop::sample::select(vec![0usize, 3]), n_cut in 1u32..6) {
        let c = &complexes()[which];
        let r = exactness_report(c, n_cut).unwrap();
        let graded = r.graded.clone().expect("homogeneous complex");
        for s in &r.spots {
            let total: usize = graded.iter().filter(|(n, _, _)| *n == s.degree).map(|(_, _, h)| h).sum();
            prop_assert_eq!(total, s.dim);
        }
    }

    #[test]
    fn zero_delta_ore_koszul_is_koszul(t in 1usize..4) {
        let names: Vec<&str> = ["a", "b", "c"][..t].to_vec();
        let ore = Algebra::iterated_ore(Q, &names, vec![]).unwrap();
        let poly = Algebra::polynomial(Q, &names);
        let (x, y) = (ore_koszul(&ore).unwrap().complex, poly_koszul(&poly, true).unwrap().complex);
        prop_assert_eq!(x.differentials, y.differentials);
        for (s, u) in x.terms.iter().zip(&y.terms) {
            prop_assert_eq!(s.labels(), u.labels());
        }
    }

    #[test]
    fn two_dimensional_lie_algebras(a in -3i64..=3) {
        // [x, y] = a·y
        let value = format!("{a}*y");
        let alg = catalog::ore_algebra(Q, &["y", "x"], &[(1, 0, value.as_str())]).unwrap();
        let c = one_sided_koszul(&alg).unwrap().complex;
        let tor = tor_over_augmented(&c, 2).unwrap();
        prop_assert_eq!(&tor, &ext_over_augmented(&c, 2).unwrap());
        prop_assert_eq!(tor, if a == 0 { vec![1, 2, 1] } else { vec![1, 1, 0] });
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(8) })]

    #[test]
    fn twists_satisfy_units(which in 0usize..5) {
        let t = [
            catalog::weyl_twist(Q),
            catalog::flip_twist(Q),
            catalog::solvable_twist(Q),
            catalog::skew_group_twist(2).unwrap(),
            catalog::sign_twist(Q),
        ][which].clone();
        prop_assert!(t.check_units(3));
    }

    #[test]
    fn total_differential_is_a_module_map(seed in 0u64..10_000, which in 0usize..2) {
        let t = [catalog::weyl_twist(Q), catalog::solvable_twist(Q)][which].clone();
        let pm = lift_twist(&ore_koszul(t.left()).unwrap(), &t, LiftSide::Left).unwrap();
        let pn = lift_twist(&poly_koszul(t.right(), true).unwrap(), &t, LiftSide::Right).unwrap();
        let bc = TwistedBicomplex::new(&pm, &pn, &t, SignRule::Alternating).unwrap();
        let r = action_commutes_check(&bc, 3, 6, seed).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failures);
        // provenance: one cell per label, in (i, j) order, with i + j = n
        let tc = bc.total().unwrap();
        for (n, cells) in tc.provenance.iter().enumerate() {
            prop_assert_eq!(cells.len(), tc.complex.terms[n].rank());
            prop_assert!(cells.iter().all(|s| s.i + s.j == n));
            prop_assert!(cells.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn reports_repeat_for_any_seed(seed in 0u64..1_000_000) {
        let ov = Overrides { tasks: vec!["preset:flip".into(), "preset:heisenberg".into()], seed: Some(seed), ..Default::default() };
        let cfg = load(None, &ov).unwrap();
        let a = run(&cfg, RunOptions::default()).to_json();
        prop_assert_eq!(&a, &run(&cfg, RunOptions::default()).to_json());
        let needle = format!("\"seed\": {}", seed);
        prop_assert!(a.contains(&needle));
    }
}

#[test]
fn free_form_inverse_on_samples() {
    use twistres::algebra::Monomial;
    use twistres::resolutions::one_sided_koszul_kx;
    use twistres::twistprod::ore_module_resolution;
    let r = one_sided_koszul_kx(Q, "y");
    let y = r.complex.algebra.generator(0);
    let res = ore_module_resolution(&r, vec![y], "x").unwrap();
    let c = &res.sigma_delta.bundle.complex;
    let mut z = Lin::zero(Q);
    for (k, (m, u)) in [(0u32, 2u32), (3, 1), (2, 4)].into_iter().enumerate() {
        z.add_term((m, (Monomial(vec![u]), 0, c.algebra.one_mono())), &Q.int(k as i64 + 1));
    }
    for n in 0..=1 {
        let there = res.free_form(n, &z).unwrap();
        assert_eq!(res.free_form_inverse(n, &there), z);
    }
}

#[test]
fn hochschild_dimensions_convolve_over_tensor_factors() {
    use std::collections::BTreeMap;
    use twistres::homology::hochschild_cohomology;
    let n_cut = 6;
    let table = |names: &[&str], n_max: usize, n_cut: u32| -> BTreeMap<(usize, i64), usize> {
        let c = poly_koszul(&Algebra::polynomial(Q, names), true).unwrap().complex;
        let r = hochschild_cohomology(&c, n_max, n_cut).unwrap();
        r.table.iter().map(|w| ((w.n, w.weight), w.dim)).collect()
    };
    // the factors get a larger cutoff so that every weight pair summing into the window is present
    let (hx, hy, hxy) = (table(&["x"], 1, n_cut + 2), table(&["y"], 1, n_cut + 2), table(&["x", "y"], 2, n_cut));
    let mut conv: BTreeMap<(usize, i64), usize> = BTreeMap::new();
    for (&(i, u), a) in &hx {
        for (&(j, v), b) in &hy {
            *conv.entry((i + j, u + v)).or_default() += a * b;
        }
    }
    assert!(hxy.len() >= 15);
    for (&(n, w), dim) in &hxy {
        assert_eq!(*dim, conv.get(&(n, w)).copied().unwrap_or(0), "HH^{n} weight {w}");
    }
}
