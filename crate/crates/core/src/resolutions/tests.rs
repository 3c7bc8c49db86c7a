use super::*;
use crate::catalog;
use crate::complex::{compose_check, truncate};
use crate::twist::TwistMap;

const Q: Field = Field::RATIONALS;

fn m(e: &[u32]) -> Monomial {
    Monomial(e.to_vec())
}

fn label_of(b: &ResolutionBundle, n: usize, l: Label) -> usize {
    b.complex.terms[n].position(&l).unwrap()
}

/// `Σ c·(u, label, v)` with labels given explicitly, for hand-written expectations.
fn elem(b: &ResolutionBundle, n: usize, terms: &[(i64, &[u32], Label, &[u32])]) -> ModuleElement {
    let mut out = Lin::zero(b.complex.field());
    for (c, u, l, v) in terms {
        out.add_term((m(u), label_of(b, n, l.clone()), m(v)), &b.complex.field().int(*c));
    }
    out
}

fn w(l: &[usize]) -> Label {
    Label::Wedge(l.to_vec())
}

#[test]
fn bar_differentials() {
    let kx = Algebra::polynomial(Q, &["x"]);
    let b = bar(&kx, 2, false, 3).unwrap();
    let k = label_of(&b, 1, Label::Tensor(vec![m(&[1])]));
    let unit = Label::Tensor(vec![]);
    assert_eq!(b.complex.differentials[1][k], elem(&b, 0, &[(1, &[1], unit.clone(), &[0]), (-1, &[0], unit, &[1])]));
    let rb = bar(&kx, 2, true, 3).unwrap();
    assert!(rb.complex.terms[1].position(&Label::Tensor(vec![m(&[0])])).is_none());
    assert!(b.complex.terms[1].position(&Label::Tensor(vec![m(&[0])])).is_some());

    let z2 = Algebra::cyclic_group(Q, 2).unwrap();
    let g = || m(&[1]);
    let e = || m(&[0]);
    let b = bar(&z2, 2, false, 0).unwrap();
    let k = label_of(&b, 2, Label::Tensor(vec![g(), g()]));
    let expect = elem(
        &b,
        1,
        &[(1, &[1], Label::Tensor(vec![g()]), &[0]), (-1, &[0], Label::Tensor(vec![e()]), &[0]), (1, &[0], Label::Tensor(vec![g()]), &[1])],
    );
    assert_eq!(b.complex.differentials[2][k], expect);
    let rb = bar(&z2, 2, true, 0).unwrap();
    let k = label_of(&rb, 2, Label::Tensor(vec![g(), g()]));
    let expect = elem(&rb, 1, &[(1, &[1], Label::Tensor(vec![g()]), &[0]), (1, &[0], Label::Tensor(vec![g()]), &[1])]);
    assert_eq!(rb.complex.differentials[2][k], expect);
}

#[test]
fn bar_cutoff_guard() {
    let kx = Algebra::polynomial(Q, &["x"]);
    let b = bar(&kx, 2, true, 3).unwrap();
    assert!(b.exactness(3).unwrap().passed());
    assert!(matches!(b.exactness(4), Err(Error::CutoffTooSmall(_))));
}

#[test]
fn koszul_differentials() {
    let kx = Algebra::polynomial(Q, &["x"]);
    let b = poly_koszul(&kx, true).unwrap();
    assert_eq!(b.complex.differentials[1][0], elem(&b, 0, &[(1, &[1], w(&[]), &[0]), (-1, &[0], w(&[]), &[1])]));

    let kxy = Algebra::polynomial(Q, &["x", "y"]);
    let b = poly_koszul(&kxy, true).unwrap();
    assert_eq!(b.complex.ranks(), [1, 2, 1]);
    let expect = elem(
        &b,
        1,
        &[(1, &[1, 0], w(&[1]), &[0, 0]), (-1, &[0, 0], w(&[1]), &[1, 0]), (-1, &[0, 1], w(&[0]), &[0, 0]), (1, &[0, 0], w(&[0]), &[0, 1])],
    );
    assert_eq!(b.complex.differentials[2][0], expect);
    let k3 = Algebra::polynomial(Q, &["a", "b", "c"]);
    assert_eq!(poly_koszul(&k3, true).unwrap().complex.n_max(), 3);
    assert!(poly_koszul(&catalog::weyl_algebra(Q), true).is_err());
}

#[test]
fn periodic_differentials() {
    let b = cyclic_periodic(Q, 3, 3).unwrap();
    let gamma = elem(&b, 0, &[(1, &[1], Label::Unit, &[0]), (-1, &[0], Label::Unit, &[1])]);
    let eta = elem(&b, 0, &[(1, &[2], Label::Unit, &[0]), (1, &[1], Label::Unit, &[1]), (1, &[0], Label::Unit, &[2])]);
    assert_eq!(b.complex.differentials[1][0], gamma);
    assert_eq!(b.complex.differentials[2][0], eta);
    assert_eq!(b.complex.differentials[3][0], gamma);
    let b2 = cyclic_periodic(Q, 2, 2).unwrap();
    let eta2 = elem(&b2, 0, &[(1, &[1], Label::Unit, &[0]), (1, &[0], Label::Unit, &[1])]);
    assert_eq!(b2.complex.differentials[2][0], eta2);
    assert!(cyclic_periodic(Q, 1, 2).is_err());
}

#[test]
fn ore_koszul_differentials() {
    let weyl = catalog::weyl_algebra(Q);
    let ore = ore_koszul(&weyl).unwrap();
    let poly = poly_koszul(&Algebra::polynomial(Q, &["x", "y"]), true).unwrap();
    // δ̄ kills the constant δ(x) = −1: same differentials as the polynomial complex
    assert_eq!(ore.complex.differentials, poly.complex.differentials);

    let ug = catalog::solvable_algebra(Q);
    let b = ore_koszul(&ug).unwrap();
    // x_1 = y, x_2 = x: d_2(1⊗y∧x⊗1) = x-terms − y-terms + 1⊗y⊗1
    let expect = elem(
        &b,
        1,
        &[
            (1, &[1, 0], w(&[1]), &[0, 0]),
            (-1, &[0, 0], w(&[1]), &[1, 0]),
            (-1, &[0, 1], w(&[0]), &[0, 0]),
            (1, &[0, 0], w(&[0]), &[0, 1]),
            (1, &[0, 0], w(&[0]), &[0, 0]),
        ],
    );
    assert_eq!(b.complex.differentials[2][0], expect);

    let one = ore_koszul(&Algebra::polynomial(Q, &["x"])).unwrap();
    let pk = poly_koszul(&Algebra::polynomial(Q, &["x"]), true).unwrap();
    assert_eq!(one.complex.differentials, pk.complex.differentials);

    let trivial = Algebra::iterated_ore(Q, &["x", "y", "z"], vec![]).unwrap();
    let pk = poly_koszul(&Algebra::polynomial(Q, &["x", "y", "z"]), true).unwrap();
    assert_eq!(ore_koszul(&trivial).unwrap().complex.differentials, pk.complex.differentials);
}

fn all_resolutions() -> Vec<ResolutionBundle> {
    let f3 = Field::new(3).unwrap();
    vec![
        bar(&Algebra::polynomial(Q, &["x"]), 3, false, 4).unwrap(),
        bar(&Algebra::polynomial(Q, &["x"]), 3, true, 4).unwrap(),
        bar(&Algebra::cyclic_group(f3, 3).unwrap(), 3, true, 0).unwrap(),
        bar(&catalog::weyl_algebra(Q), 3, true, 2).unwrap(),
        poly_koszul(&Algebra::polynomial(Q, &["x", "y", "z"]), true).unwrap(),
        poly_koszul(&Algebra::polynomial(Q, &["x", "y"]), false).unwrap(),
        cyclic_periodic(f3, 3, 5).unwrap(),
        cyclic_periodic(Q, 5, 5).unwrap(),
        ore_koszul(&catalog::weyl_algebra(Q)).unwrap(),
        ore_koszul(&catalog::solvable_algebra(Q)).unwrap(),
        ore_koszul(&catalog::heisenberg_algebra(Q)).unwrap(),
        ore_koszul(&catalog::weyl_n_algebra(Q, 2).unwrap()).unwrap(),
        one_sided_koszul(&catalog::heisenberg_algebra(Q)).unwrap(),
        one_sided_koszul_kx(Q, "x"),
    ]
}

#[test]
fn every_resolution_squares_to_zero() {
    for b in all_resolutions() {
        let r = compose_check(&b.complex);
        assert!(r.passed(), "{}: {:?}", b.complex.name, r.failures.first());
    }
}

#[test]
fn windowed_exactness() {
    for b in all_resolutions() {
        let n = match b.family {
            Family::Bar | Family::ReducedBar => b.label_cutoff.unwrap().min(2),
            _ => 3,
        };
        let r = b.exactness(n).unwrap();
        assert!(r.passed(), "{}: {r:?}", b.complex.name);
    }
}

#[test]
fn one_sided_kx() {
    let b = one_sided_koszul_kx(Q, "x");
    assert_eq!(b.complex.differentials[1][0], Lin::basis(Q, (m(&[1]), 0, m(&[0]))));
    assert!(b.complex.augment(&Lin::basis(Q, (m(&[2]), 0, m(&[0])))).is_zero());
    let r = b.exactness(5).unwrap();
    assert!(r.passed());
    assert!(r.graded.unwrap().iter().all(|&(_, _, h)| h == 0));
    // the trivial module does not exist over the Weyl algebra
    assert!(matches!(one_sided_koszul(&catalog::weyl_algebra(Q)), Err(Error::Augmentation(_))));
}

#[test]
fn wedge_sorting() {
    assert_eq!(sort_wedge(vec![2, 0, 1]), Some((vec![0, 1, 2], false)));
    assert_eq!(sort_wedge(vec![1, 0]), Some((vec![0, 1], true)));
    assert_eq!(sort_wedge(vec![1, 1]), None);
    assert_eq!(combinations(3, 2), [vec![0, 1], vec![0, 2], vec![1, 2]]);
}

fn koszul_over(alg: &Arc<Algebra>) -> ResolutionBundle {
    let mut b = poly_koszul(alg, true).unwrap();
    b.family = Family::PolyKoszul;
    b
}

#[test]
fn weyl_lift_values() {
    let t = catalog::weyl_twist(Q);
    let pk = koszul_over(t.left());
    let lifted = lift_twist(&pk, &t, LiftSide::Left).unwrap();
    let lift = lifted.lift.as_ref().unwrap();
    let gen = (m(&[0]), 0, m(&[0]));
    assert_eq!(lift.left(1, &m(&[1]), &gen).unwrap(), Lin::basis(Q, (gen.clone(), m(&[1]))));
    // y⊗(x⊗1) = (x⊗1)⊗y − (1⊗1)⊗1 in degree 0
    let mut expect = Lin::basis(Q, ((m(&[1]), 0, m(&[0])), m(&[1])));
    expect.add_term(((m(&[0]), 0, m(&[0])), m(&[0])), &Q.int(-1));
    assert_eq!(lift.left(0, &m(&[1]), &(m(&[1]), 0, m(&[0]))).unwrap(), expect);

    let flip = catalog::flip_twist(Q);
    let l = lift_twist(&koszul_over(flip.left()), &flip, LiftSide::Left).unwrap();
    let key = (m(&[2]), 0, m(&[1]));
    assert_eq!(l.lift.unwrap().left(1, &m(&[3]), &key).unwrap(), Lin::basis(Q, (key, m(&[3]))));
}

#[test]
fn solvable_lift_picks_up_correction() {
    // A = k[y], B = k[x], τ(x⊗y) = y⊗x + y⊗1
    let t = catalog::solvable_twist(Q);
    let l = lift_twist(&koszul_over(t.left()), &t, LiftSide::Left).unwrap();
    let gen = (m(&[0]), 0, m(&[0]));
    let mut expect = Lin::basis(Q, (gen.clone(), m(&[1])));
    expect.add_term((gen.clone(), m(&[0])), &Q.one());
    assert_eq!(l.lift.unwrap().left(1, &m(&[1]), &gen).unwrap(), expect);
}

fn lifted_suite() -> Vec<ResolutionBundle> {
    let weyl = catalog::weyl_twist(Q);
    let ug = catalog::solvable_twist(Q);
    let flip = catalog::flip_twist(Q);
    let skew = catalog::skew_group_twist(3).unwrap();
    let f3 = skew.left().field();
    let heis =
        TwistMap::ore(Algebra::polynomial(Q, &["z", "y"]), Algebra::polynomial(Q, &["x"]), vec![Lin::zero(Q), Lin::basis(Q, m(&[1, 0]))])
            .unwrap();
    vec![
        lift_twist(&koszul_over(weyl.left()), &weyl, LiftSide::Left).unwrap(),
        lift_twist(&koszul_over(weyl.right()), &weyl, LiftSide::Right).unwrap(),
        lift_twist(&koszul_over(ug.left()), &ug, LiftSide::Left).unwrap(),
        lift_twist(&koszul_over(ug.right()), &ug, LiftSide::Right).unwrap(),
        lift_twist(&koszul_over(flip.left()), &flip, LiftSide::Left).unwrap(),
        lift_twist(&koszul_over(flip.right()), &flip, LiftSide::Right).unwrap(),
        lift_twist(&koszul_over(heis.left()), &heis, LiftSide::Left).unwrap(),
        lift_twist(&cyclic_periodic(f3, 3, 4).unwrap(), &skew, LiftSide::Left).unwrap(),
        lift_twist(&koszul_over(skew.right()), &skew, LiftSide::Right).unwrap(),
        lift_twist(&bar(weyl.left(), 2, false, 2).unwrap(), &weyl, LiftSide::Left).unwrap(),
        lift_twist(&bar(weyl.left(), 2, true, 2).unwrap(), &weyl, LiftSide::Left).unwrap(),
        lift_twist(&bar(weyl.right(), 2, true, 2).unwrap(), &weyl, LiftSide::Right).unwrap(),
        lift_twist(&bar(skew.left(), 2, true, 0).unwrap(), &skew, LiftSide::Left).unwrap(),
    ]
}

#[test]
fn lifts_are_chain_maps_and_compatible() {
    for b in lifted_suite() {
        let r = check_lift(&b, 2, true).unwrap();
        assert!(
            r.passed(),
            "{} / {}: {:?} {:?}",
            b.complex.name,
            b.lift.as_ref().unwrap().rule,
            r.chain_failures.first(),
            r.compat.iter().find(|c| !c.passed()).map(|c| c.violations.first())
        );
        assert!(r.chain_checked > 0);
    }
}

#[test]
fn closed_form_matches_symmetrization() {
    for b in
        lifted_suite().into_iter().filter(|b| b.lift.as_ref().unwrap().side() == LiftSide::Left && matches!(b.family, Family::PolyKoszul))
    {
        assert!(cross_check_symmetrization(&b, 2, 2).unwrap() > 0, "{}", b.complex.name);
    }
}

#[test]
fn nonlinear_delta_does_not_restrict() {
    let a = Algebra::polynomial(Q, &["y"]);
    let t = TwistMap::ore(a.clone(), Algebra::polynomial(Q, &["x"]), vec![Lin::basis(Q, m(&[2]))]).unwrap();
    assert!(matches!(lift_twist(&koszul_over(&a), &t, LiftSide::Left), Err(Error::RestrictionFailure(_))));
    // δ raises degree, so the bar lift needs labels beyond any fixed cutoff
    assert!(matches!(lift_twist(&bar(&a, 2, true, 3).unwrap(), &t, LiftSide::Left), Err(Error::CutoffTooSmall(_))));
}

#[test]
fn bar_and_reduced_bar_lifts_agree_on_quotient() {
    let t = catalog::weyl_twist(Q);
    let full = lift_twist(&bar(t.left(), 2, false, 2).unwrap(), &t, LiftSide::Left).unwrap();
    let red = lift_twist(&bar(t.left(), 2, true, 2).unwrap(), &t, LiftSide::Left).unwrap();
    let tc = truncate(&full.complex, 2).unwrap();
    for n in 0..=2 {
        for key in &tc.bases[n] {
            let Label::Tensor(mid) = full.complex.terms[n].label(key.1) else { unreachable!() };
            if mid.iter().any(|x| x.is_one()) {
                continue;
            }
            let k2 = red.complex.terms[n].position(&Label::Tensor(mid.clone())).unwrap();
            for b in t.right().basis_up_to(2) {
                let a = full.lift.as_ref().unwrap().left(n, &b, key).unwrap();
                // quotient: drop tensors with a unit middle factor, relabel
                let mut q = Lin::zero(Q);
                for (((u, k, v), b1), c) in a.iter() {
                    let Label::Tensor(mm) = full.complex.terms[n].label(*k) else { unreachable!() };
                    if let Some(j) = red.complex.terms[n].position(&Label::Tensor(mm.clone())) {
                        q.add_term(((u.clone(), j, v.clone()), b1.clone()), c);
                    }
                }
                let r = red.lift.as_ref().unwrap().left(n, &b, &(key.0.clone(), k2, key.2.clone())).unwrap();
                assert_eq!(q, r);
            }
        }
    }
}

#[test]
fn mismatched_twist_is_rejected() {
    let t = catalog::weyl_twist(Q);
    let other = poly_koszul(&Algebra::polynomial(Q, &["z"]), true).unwrap();
    assert!(matches!(lift_twist(&other, &t, LiftSide::Left), Err(Error::SpecMismatch(_))));
    let per = cyclic_periodic(Q, 3, 2).unwrap();
    assert!(lift_twist(&per, &t, LiftSide::Right).is_err());
}

#[test]
fn sigma_delta_maps() {
    let r = Algebra::polynomial(Q, &["y"]);
    let res = one_sided_koszul(&r).unwrap();
    let sd = sigma_delta_chain_maps(&res, vec![r.generator(0)], "x").unwrap();
    let gen = Lin::basis(Q, (m(&[0]), 0, m(&[0])));
    assert_eq!(sd.delta_tilde(1, &gen), gen);
    assert_eq!(sd.sigma_tilde(1, &gen), gen);
    // δ̃_0(r) = δ(r): δ(y^2) = 2y^2
    let y2 = Lin::basis(Q, (m(&[2]), 0, m(&[0])));
    assert_eq!(sd.delta_tilde(0, &y2), y2.scaled(&Q.int(2)));

    let zero = sigma_delta_chain_maps(&res, vec![Lin::zero(Q)], "x").unwrap();
    assert!(zero.delta_tilde(1, &gen).is_zero() && zero.delta_tilde(0, &y2).is_zero());

    // Weyl: δ(y) = −1 has a constant term
    assert!(matches!(sigma_delta_chain_maps(&res, vec![r.scalar(Q.int(-1))], "x"), Err(Error::Augmentation(_))));
    assert!(sigma_delta_chain_maps(&poly_koszul(&r, true).unwrap(), vec![r.generator(0)], "x").is_err());
}
