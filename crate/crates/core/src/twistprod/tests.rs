use super::*;
use crate::catalog;
use crate::complex::compose_check;
use crate::kernel::Field;
use crate::resolutions::{bar, cyclic_periodic, lift_twist, ore_koszul, poly_koszul};

const Q: Field = Field::RATIONALS;

fn lifted(b: ResolutionBundle, t: &Arc<TwistMap>, side: LiftSide) -> ResolutionBundle {
    lift_twist(&b, t, side).unwrap()
}

fn flip_pair() -> (ResolutionBundle, ResolutionBundle, Arc<TwistMap>) {
    let t = catalog::flip_twist(Q);
    let pm = lifted(poly_koszul(t.left(), true).unwrap(), &t, LiftSide::Left);
    let pn = lifted(poly_koszul(t.right(), true).unwrap(), &t, LiftSide::Right);
    (pm, pn, t)
}

fn weyl_pair() -> (ResolutionBundle, ResolutionBundle, Arc<TwistMap>) {
    let t = catalog::weyl_twist(Q);
    let pm = lifted(ore_koszul(t.left()).unwrap(), &t, LiftSide::Left);
    let pn = lifted(poly_koszul(t.right(), true).unwrap(), &t, LiftSide::Right);
    (pm, pn, t)
}

fn skew_pair(p: u64, n_max: usize) -> (ResolutionBundle, ResolutionBundle, Arc<TwistMap>) {
    let t = catalog::skew_group_twist(p).unwrap();
    let f = t.left().field();
    let pm = lifted(cyclic_periodic(f, p as u32, n_max).unwrap(), &t, LiftSide::Left);
    let pn = lifted(poly_koszul(t.right(), true).unwrap(), &t, LiftSide::Right);
    (pm, pn, t)
}

#[test]
fn flip_product_is_koszul_of_the_tensor_product() {
    let (pm, pn, t) = flip_pair();
    let tc = bimodule_twisted_product(&pm, &pn, &t).unwrap();
    assert_eq!(tc.complex.ranks(), [1, 2, 1]);
    // X_1 = X_{0,1} ⊕ X_{1,0}, in (i, j) order
    assert_eq!(tc.provenance[1].iter().map(|s| (s.i, s.j)).collect::<Vec<_>>(), [(0, 1), (1, 0)]);
    let kxy = Algebra::polynomial(Q, &["x", "y"]);
    let flat = flatten(&tc, &kxy).unwrap();
    let expect = poly_koszul(&kxy, true).unwrap().complex;
    for n in 0..=2 {
        assert_eq!(flat.terms[n].labels(), expect.terms[n].labels());
    }
    assert_eq!(flat.differentials, expect.differentials);
}

#[test]
fn vertical_sign_on_x11() {
    // d(x|y) = (x⊗1 − 1⊗x)|y − x|(y⊗1 − 1⊗y), written in the free basis over k[x]⊗k[y]
    let (pm, pn, t) = flip_pair();
    let tc = bimodule_twisted_product(&pm, &pn, &t).unwrap();
    let c = &tc.complex;
    let (one, x, y) = (Monomial(vec![0, 0]), Monomial(vec![1, 0]), Monomial(vec![0, 1]));
    let lab_y = tc.provenance[1].iter().position(|s| s.i == 0).unwrap();
    let lab_x = 1 - lab_y;
    let mut expect = Lin::zero(Q);
    expect.add_term((x.clone(), lab_y, one.clone()), &Q.one());
    expect.add_term((one.clone(), lab_y, x), &Q.int(-1));
    expect.add_term((y.clone(), lab_x, one.clone()), &Q.int(-1));
    expect.add_term((one, lab_x, y), &Q.one());
    assert_eq!(c.differentials[2][0], expect);
}

#[test]
fn weyl_product_matches_ore_koszul() {
    let (pm, pn, t) = weyl_pair();
    let tc = bimodule_twisted_product(&pm, &pn, &t).unwrap();
    let weyl = catalog::weyl_algebra(Q);
    let flat = flatten(&tc, &weyl).unwrap();
    let expect = ore_koszul(&weyl).unwrap().complex;
    for n in 0..=2 {
        assert_eq!(flat.terms[n].labels(), expect.terms[n].labels());
    }
    assert_eq!(flat.differentials, expect.differentials);
    assert!(compose_check(&tc.complex).passed());
    assert!(exactness_report(&tc.complex, 4).unwrap().passed());
}

#[test]
fn flatten_rejects_different_products() {
    let (pm, pn, t) = weyl_pair();
    let tc = bimodule_twisted_product(&pm, &pn, &t).unwrap();
    let kxy = Algebra::polynomial(Q, &["x", "y"]);
    assert!(matches!(flatten(&tc, &kxy), Err(Error::SpecMismatch(_))));
}

#[test]
fn bar_cells_are_free() {
    // X_{0,0} = A⊗A⊗B⊗B ≅ (A⊗_τ B)^e, checked degree by degree up to 3
    let t = catalog::weyl_twist(Q);
    let pm = lifted(bar(t.left(), 1, true, 2).unwrap(), &t, LiftSide::Left);
    let pn = lifted(bar(t.right(), 1, true, 2).unwrap(), &t, LiftSide::Right);
    let bc = TwistedBicomplex::new(&pm, &pn, &t, SignRule::Alternating).unwrap();
    for bound in 0..=3 {
        let (r, cols, dim) = bc.free_identification(0, 0, bound).unwrap();
        assert_eq!((r, cols), (dim, dim), "bound {bound}");
    }
    let (r, cols, dim) = bc.free_identification(1, 1, 3).unwrap();
    assert_eq!((r, cols), (dim, dim));
    let tc = bc.total().unwrap();
    assert!(compose_check(&tc.complex).passed());
}

#[test]
fn skew_group_product() {
    let (pm, pn, t) = skew_pair(3, 3);
    let bc = TwistedBicomplex::new(&pm, &pn, &t, SignRule::Alternating).unwrap();
    assert!(anticommutation_check(&bc).passed());
    assert!(action_commutes_check(&bc, 2, 20, 7).unwrap().passed());
    let tc = bc.total().unwrap();
    assert_eq!(tc.complex.ranks(), [1, 3, 4, 4]);
    assert!(compose_check(&tc.complex).passed());
    let r = exactness_report(&tc.complex, 2).unwrap();
    assert!(r.passed(), "{r:?}");
    assert!(kunneth_degree0_check(&tc, 2).unwrap().iter().all(|r| r.h0 == r.expected));
}

#[test]
fn weyl_bicomplex_properties() {
    let (pm, pn, t) = weyl_pair();
    let bc = TwistedBicomplex::new(&pm, &pn, &t, SignRule::Alternating).unwrap();
    assert!(anticommutation_check(&bc).passed());
    assert!(action_commutes_check(&bc, 3, 40, 11).unwrap().passed());
    let tc = bc.total().unwrap();
    for r in kunneth_degree0_check(&tc, 4).unwrap() {
        assert_eq!(r.h0, r.expected);
    }
}

#[test]
fn dropped_sign_breaks_d_squared() {
    let (pm, pn, t) = flip_pair();
    let bc = TwistedBicomplex::new(&pm, &pn, &t, SignRule::Dropped).unwrap();
    assert!(!anticommutation_check(&bc).passed());
    let tc = bc.total().unwrap();
    assert!(!compose_check(&tc.complex).passed());
}

#[test]
fn missing_lifts_are_reported() {
    let t = catalog::flip_twist(Q);
    let pm = poly_koszul(t.left(), true).unwrap();
    let pn = lifted(poly_koszul(t.right(), true).unwrap(), &t, LiftSide::Right);
    assert!(matches!(bimodule_twisted_product(&pm, &pn, &t), Err(Error::MissingLift(_))));
    let pm = lifted(pm, &t, LiftSide::Left);
    let pn = poly_koszul(t.right(), true).unwrap();
    assert!(matches!(bimodule_twisted_product(&pm, &pn, &t), Err(Error::MissingLift(_))));
    // a lift for another twist does not count
    let w = catalog::weyl_twist(Q);
    let pn = lifted(poly_koszul(w.right(), true).unwrap(), &w, LiftSide::Right);
    assert!(matches!(bimodule_twisted_product(&pm, &pn, &t), Err(Error::MissingLift(_))));
}

#[test]
fn one_sided_flip_product() {
    let t = catalog::flip_twist(Q);
    let pm = lifted(poly_koszul(t.left(), false).unwrap(), &t, LiftSide::Left);
    let pn = poly_koszul(t.right(), false).unwrap();
    let tc = one_sided_twisted_product(&pm, &pn, &t).unwrap();
    assert_eq!(tc.complex.ranks(), [1, 2, 1]);
    let kxy = Algebra::polynomial(Q, &["x", "y"]);
    let flat = flatten(&tc, &kxy).unwrap();
    assert_eq!(flat.differentials, poly_koszul(&kxy, false).unwrap().complex.differentials);
    assert!(exactness_report(&tc.complex, 4).unwrap().passed());
}

#[test]
fn solvable_ore_module_resolution() {
    let r = one_sided_koszul_kx(Q, "y");
    let y = r.complex.algebra.generator(0);
    let res = ore_module_resolution(&r, vec![y], "x").unwrap();
    assert_eq!(res.bundle.complex.ranks(), [1, 2, 1]);
    assert!(res.bundle.complex.algebra.same_presentation(&catalog::solvable_algebra(Q)));
    assert!(compose_check(&res.total.complex).passed());
    assert!(res.bundle.exactness(5).unwrap().passed());
    // d(y∧x) carries the δ̄ correction: the reduced complex has d_2(y∧x) = ±y
    let d2 = &res.bundle.complex.differentials[2][0];
    let one = Monomial(vec![0, 0]);
    assert!(!d2.coeff(&(one.clone(), 0, one)).is_zero());
}

#[test]
fn zero_derivation_gives_koszul() {
    let r = one_sided_koszul_kx(Q, "y");
    let res = ore_module_resolution(&r, vec![Lin::zero(Q)], "x").unwrap();
    let kyx = Algebra::polynomial(Q, &["y", "x"]);
    let expect = poly_koszul(&kyx, false).unwrap().complex;
    assert_eq!(res.bundle.complex.differentials, expect.differentials);
}

#[test]
fn heisenberg_by_iteration() {
    let z = Algebra::polynomial(Q, &["z", "y"]).generator(0);
    let b = iterated_ore_resolution(Q, &["z", "y", "x"], &[vec![Lin::zero(Q)], vec![Lin::zero(Q), z]]).unwrap();
    assert_eq!(b.complex.ranks(), [1, 3, 3, 1]);
    assert!(b.complex.algebra.same_presentation(&catalog::heisenberg_algebra(Q)));
    assert!(compose_check(&b.complex).passed());
    assert!(b.exactness(4).unwrap().passed());
}

#[test]
fn free_form_round_trip() {
    let r = one_sided_koszul_kx(Q, "y");
    let y = r.complex.algebra.generator(0);
    let res = ore_module_resolution(&r, vec![y], "x").unwrap();
    let c = &res.sigma_delta.bundle.complex;
    for n in 0..=1 {
        for m in 0..4u32 {
            for u in 0..3u32 {
                let z = Lin::basis(Q, (m, (Monomial(vec![u]), 0, c.algebra.one_mono())));
                let there = res.free_form(n, &z).unwrap();
                assert_eq!(res.free_form_inverse(n, &there), z);
            }
        }
    }
    // x⊗y ↦ y⊗x + δ(y)⊗1 on P_0 = R
    let z = Lin::basis(Q, (1u32, (Monomial(vec![1]), 0, Monomial(vec![0]))));
    let mut expect = Lin::basis(Q, ((Monomial(vec![1]), 0, Monomial(vec![0])), 1u32));
    expect.add_term(((Monomial(vec![1]), 0, Monomial(vec![0])), 0), &Q.one());
    assert_eq!(res.free_form(0, &z).unwrap(), expect);
}

#[test]
fn determinism() {
    let (pm, pn, t) = skew_pair(2, 2);
    let a = bimodule_twisted_product(&pm, &pn, &t).unwrap();
    let b = bimodule_twisted_product(&pm, &pn, &t).unwrap();
    assert_eq!(a.complex.differentials, b.complex.differentials);
    assert_eq!(a.provenance, b.provenance);
}
