use super::*;
use crate::kernel::Field;

const Q: Field = Field::RATIONALS;

fn m(e: &[u32]) -> Monomial {
    Monomial(e.to_vec())
}

/// `0 → A⊗x⊗A → A⊗A → A`, built by hand.
fn koszul_kx() -> ChainComplexSpec {
    let alg = Algebra::polynomial(Q, &["x"]);
    let t0 = FreeModuleTerm::new(ModuleSide::Bimodule, vec![(Label::Wedge(vec![]), 0)]).unwrap();
    let t1 = FreeModuleTerm::new(ModuleSide::Bimodule, vec![(Label::Wedge(vec![0]), 1)]).unwrap();
    let mut d1 = Lin::basis(Q, (m(&[1]), 0, m(&[0])));
    d1.add_term((m(&[0]), 0, m(&[1])), &Q.int(-1));
    ChainComplexSpec {
        name: "koszul k[x]".into(),
        algebra: alg,
        side: ModuleSide::Bimodule,
        terms: vec![t0, t1],
        differentials: vec![vec![], vec![d1]],
        augmentation: Augmentation::Multiplication,
        complete: true,
    }
}

/// Periodic resolution of `kZ/3` with `γ = g⊗1 − 1⊗g`, `η = g²⊗1 + g⊗g + 1⊗g²`.
fn periodic3(field: Field, n_max: usize, drop_eta_term: bool) -> ChainComplexSpec {
    let alg = Algebra::cyclic_group(field, 3).unwrap();
    let terms = (0..=n_max).map(|_| FreeModuleTerm::new(ModuleSide::Bimodule, vec![(Label::Unit, 0)]).unwrap()).collect();
    let mut gamma = Lin::basis(field, (m(&[1]), 0, m(&[0])));
    gamma.add_term((m(&[0]), 0, m(&[1])), &field.int(-1));
    let mut eta = Lin::zero(field);
    for k in 0..3u32 {
        if drop_eta_term && k == 1 {
            continue;
        }
        eta.add_term((m(&[2 - k]), 0, m(&[k])), &field.one());
    }
    let mut diffs = vec![vec![]];
    for n in 1..=n_max {
        diffs.push(vec![if n % 2 == 1 { gamma.clone() } else { eta.clone() }]);
    }
    ChainComplexSpec {
        name: "periodic".into(),
        algebra: alg,
        side: ModuleSide::Bimodule,
        terms,
        differentials: diffs,
        augmentation: Augmentation::Multiplication,
        complete: false,
    }
}

#[test]
fn labels_must_be_distinct() {
    let r = FreeModuleTerm::new(ModuleSide::Left, vec![(Label::Unit, 0), (Label::Unit, 0)]);
    assert!(matches!(r, Err(Error::Validation(_))));
}

#[test]
fn compose_checks() {
    let k = koszul_kx();
    let r = compose_check(&k);
    assert!(r.passed());
    assert_eq!(r.checked, 1);
    assert!(compose_check(&periodic3(Q, 4, false)).passed());
    let bad = periodic3(Q, 4, true);
    let r = compose_check(&bad);
    assert!(!r.passed());
    assert_eq!(r.failures[0].degree, 2);
}

#[test]
fn eta_gamma_product_by_hand() {
    // (g⊗1 − 1⊗g)·(g²⊗1 + g⊗g + 1⊗g²) telescopes to g³⊗1 − 1⊗g³ = 0
    let c = periodic3(Q, 2, false);
    let eta = c.differentials[2][0].clone();
    assert_eq!(c.apply_d(1, &eta), Lin::zero(Q));
}

#[test]
fn truncation_sizes() {
    let k = koszul_kx();
    let t = truncate(&k, 2).unwrap();
    assert_eq!(t.bases[0].len(), 6);
    assert_eq!(t.bases[1].len(), 3);
    assert!(t.composes_to_zero());
    for n in [0, 3, 7] {
        let t = truncate(&periodic3(Q, 3, false), n).unwrap();
        assert!(t.bases.iter().all(|b| b.len() == 9));
    }
}

#[test]
fn truncation_is_deterministic() {
    let k = koszul_kx();
    let a = truncate(&k, 4).unwrap();
    let b = truncate(&k, 4).unwrap();
    assert_eq!(a.bases, b.bases);
    assert_eq!(a.matrices, b.matrices);
}

#[test]
fn degree_raising_is_rejected() {
    let mut k = koszul_kx();
    k.differentials[1][0].add_term((m(&[2]), 0, m(&[0])), &Q.one());
    assert!(matches!(truncate(&k, 3), Err(Error::DegreeRaising(_))));
}

#[test]
fn exactness_of_small_complexes() {
    let r = exactness_report(&koszul_kx(), 4).unwrap();
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.spots.len(), 2);
    assert_eq!(r.target_dim, 5);
    let graded = r.graded.unwrap();
    assert!(graded.iter().all(|&(_, _, h)| h == 0));

    let f3 = Field::new(3).unwrap();
    for field in [Q, f3] {
        let r = exactness_report(&periodic3(field, 5, false), 0).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.spots.len(), 5);
    }
}

#[test]
fn periodic_ranks_alternate() {
    // γ has rank 6 and η rank 3 on kG⊗kG (char 0): 9 = 6 + 3 at every spot
    let t = truncate(&periodic3(Q, 3, false), 0).unwrap();
    assert_eq!(rank(&t.matrices[1]), 6);
    assert_eq!(rank(&t.matrices[2]), 3);
    assert_eq!(rank(&t.matrices[0]), 3);
}

#[test]
fn broken_differential_shows_homology() {
    let bad = periodic3(Q, 4, true);
    // the truncated product is nonzero, so the report refuses; the rank drop is visible directly
    assert!(matches!(exactness_report(&bad, 0), Err(Error::CompositionNonzero(_))));
    let mut k = koszul_kx();
    k.differentials[1][0] = Lin::basis(Q, (m(&[1]), 0, m(&[0])));
    k.augmentation = Augmentation::None;
    let r = exactness_report(&k, 3).unwrap();
    assert!(!r.passed());
}
