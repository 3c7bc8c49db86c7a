//! Lifts of a twisting map to resolutions: `τ_{B,•}: B⊗P_• → P_•⊗B` on resolutions over `A`
//! and `τ_{•,A}: P_•⊗A → A⊗P_•` on resolutions over `B`.

use std::cell::RefCell;
use std::sync::Arc;

use super::{bar_key, linear_part, sort_wedge, Family, ResolutionBundle, Resolved};
use crate::algebra::{AlgebraKind, Element, Monomial};
use crate::complex::{truncate, ChainComplexSpec, Key, Label, ModuleElement, ModuleSide};
use crate::kernel::Field;
use crate::lin::Lin;
use crate::twist::{check_left_compat, check_one_sided_compat, check_right_compat, CompatReport};
use crate::twist::{TwistMap, TwistRule};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftSide {
    /// `B⊗P → P⊗B` on a resolution over `A` (bimodule or left module).
    Left,
    /// `P⊗A → A⊗P` on a bimodule resolution over `B`.
    Right,
}

type LeftMap = dyn Fn(usize, &Monomial, &Key) -> Result<Lin<(Key, Monomial)>, Error> + Send + Sync;
type RightMap = dyn Fn(usize, &Key, &Monomial) -> Result<Lin<(Monomial, Key)>, Error> + Send + Sync;

#[derive(Clone)]
enum LiftMap {
    Left(Arc<LeftMap>),
    Right(Arc<RightMap>),
}

#[derive(Clone)]
pub struct TwistLift {
    pub twist: Arc<TwistMap>,
    /// Which construction produced the lift (for reports).
    pub rule: &'static str,
    map: LiftMap,
}

impl TwistLift {
    pub fn side(&self) -> LiftSide {
        match self.map {
            LiftMap::Left(_) => LiftSide::Left,
            LiftMap::Right(_) => LiftSide::Right,
        }
    }

    pub fn left(&self, n: usize, b: &Monomial, key: &Key) -> Result<Lin<(Key, Monomial)>, Error> {
        match &self.map {
            LiftMap::Left(f) => f(n, b, key),
            LiftMap::Right(_) => Err(Error::MissingLift("a left lift was requested from a right lift".into())),
        }
    }

    pub fn right(&self, n: usize, key: &Key, a: &Monomial) -> Result<Lin<(Monomial, Key)>, Error> {
        match &self.map {
            LiftMap::Right(f) => f(n, key, a),
            LiftMap::Left(_) => Err(Error::MissingLift("a right lift was requested from a left lift".into())),
        }
    }

    pub fn left_elem(&self, n: usize, b: &Monomial, x: &ModuleElement) -> Result<Lin<(Key, Monomial)>, Error> {
        let mut out = Lin::zero(x.field());
        for (k, c) in x.iter() {
            out.add_scaled(&self.left(n, b, k)?, c);
        }
        Ok(out)
    }

    pub fn right_elem(&self, n: usize, x: &ModuleElement, a: &Monomial) -> Result<Lin<(Monomial, Key)>, Error> {
        let mut out = Lin::zero(x.field());
        for (k, c) in x.iter() {
            out.add_scaled(&self.right(n, k, a)?, c);
        }
        Ok(out)
    }
}

/// Moves `b` rightwards through `factors` with `τ`: `b⊗f_0⊗…⊗f_r ↦ Σ f'_0⊗…⊗f'_r⊗b'`.
pub(crate) fn move_right(t: &TwistMap, b: &Monomial, factors: &[Monomial]) -> Lin<(Vec<Monomial>, Monomial)> {
    let field = t.left().field();
    let mut cur: Lin<(Vec<Monomial>, Monomial)> = Lin::basis(field, (Vec::new(), b.clone()));
    for f in factors {
        let mut next = Lin::zero(field);
        for ((prefix, b1), c) in cur.iter() {
            for ((f1, b2), c2) in t.apply_mono(b1, f).iter() {
                let mut p = prefix.clone();
                p.push(f1.clone());
                next.add_term((p, b2.clone()), &(c * c2));
            }
        }
        cur = next;
    }
    cur
}

/// Moves `a` leftwards through `factors`: `f_0⊗…⊗f_r⊗a ↦ Σ a'⊗f'_0⊗…⊗f'_r`.
pub(crate) fn move_left(t: &TwistMap, factors: &[Monomial], a: &Monomial) -> Lin<(Monomial, Vec<Monomial>)> {
    let field = t.left().field();
    let mut cur: Lin<(Monomial, Vec<Monomial>)> = Lin::basis(field, (a.clone(), Vec::new()));
    for f in factors.iter().rev() {
        let mut next = Lin::zero(field);
        for ((a1, suffix), c) in cur.iter() {
            for ((a2, f1), c2) in t.apply_mono(f, a1).iter() {
                let mut s = vec![f1.clone()];
                s.extend(suffix.iter().cloned());
                next.add_term((a2.clone(), s), &(c * c2));
            }
        }
        cur = next;
    }
    cur
}

/// `u ⊗ (label factors) ⊗ v` as a flat factor list.
fn key_factors(c: &ChainComplexSpec, n: usize, key: &Key) -> Vec<Monomial> {
    let alg = &c.algebra;
    let mut f = vec![key.0.clone()];
    match c.terms[n].label(key.1) {
        Label::Wedge(l) => f.extend(l.iter().map(|&i| alg.generator_mono(i))),
        Label::Tensor(ms) => f.extend(ms.iter().cloned()),
        _ => {}
    }
    if c.side == ModuleSide::Bimodule {
        f.push(key.2.clone());
    }
    f
}

/// Inverse of [`key_factors`] for wedge terms: middle factors must be generators (units are
/// killed, as in the reduced bar complex); anything else leaves the Koszul subcomplex.
fn wedge_key(c: &ChainComplexSpec, n: usize, factors: &[Monomial]) -> Result<Option<(Key, bool)>, Error> {
    let alg = &c.algebra;
    let mid_end = if c.side == ModuleSide::Bimodule { factors.len() - 1 } else { factors.len() };
    let mut w = Vec::new();
    for f in &factors[1..mid_end] {
        match alg.mono_degree(f) {
            0 => return Ok(None),
            1 => w.push(f.0.iter().position(|&e| e == 1).unwrap()),
            _ => {
                return Err(Error::RestrictionFailure(format!(
                    "{}: twisted label factor {} is not in the generator span",
                    c.name,
                    alg.fmt_mono(f)
                )))
            }
        }
    }
    let Some((w, neg)) = sort_wedge(w) else { return Ok(None) };
    let k = c.terms[n].position(&Label::Wedge(w)).ok_or_else(|| Error::RestrictionFailure("wedge label outside the term".into()))?;
    let v = if c.side == ModuleSide::Bimodule { factors[factors.len() - 1].clone() } else { alg.one_mono() };
    Ok(Some(((factors[0].clone(), k, v), neg)))
}

fn is_wedge_family(f: Family) -> bool {
    matches!(f, Family::PolyKoszul | Family::OreKoszul | Family::OneSidedKoszul | Family::TwistedProduct)
}

/// `D(a_0⊗ℓ⊗a_1) = δ(a_0)⊗ℓ⊗a_1 + a_0⊗ℓ⊗δ(a_1) + Σ_i a_0⊗ℓ[i ← δ̄(x_{l_i})]⊗a_1` for an Ore
/// twist (the `a_1` terms only for bimodules).
pub(crate) fn ore_wedge_derivation(t: &TwistMap, c: &ChainComplexSpec, n: usize, key: &Key) -> ModuleElement {
    let alg = &c.algebra;
    let field = alg.field();
    let (a0, k, a1) = key;
    let mut out = Lin::zero(field);
    for (m, coef) in t.ore_derivation(a0).iter() {
        out.add_term((m.clone(), *k, a1.clone()), coef);
    }
    if c.side == ModuleSide::Bimodule {
        for (m, coef) in t.ore_derivation(a1).iter() {
            out.add_term((a0.clone(), *k, m.clone()), coef);
        }
    }
    if let Label::Wedge(l) = c.terms[n].label(*k) {
        for i in 0..l.len() {
            let d = t.ore_derivation(&alg.generator_mono(l[i]));
            for (x, coef) in linear_part(alg, &d) {
                let mut w = l.clone();
                w[i] = x;
                if let Some((w, neg)) = sort_wedge(w) {
                    let k2 = c.terms[n].position(&Label::Wedge(w)).unwrap();
                    out.add_term((a0.clone(), k2, a1.clone()), &if neg { -&coef } else { coef });
                }
            }
        }
    }
    out
}

fn binomial(m: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (m - i) as i64 / (i + 1) as i64)
}

/// Closed form `τ(x^m ⊗ z) = Σ_k C(m,k) D^k(z) ⊗ x^{m−k}`.
fn ore_closed_lift(t: &TwistMap, c: &ChainComplexSpec, n: usize, b: &Monomial, key: &Key) -> Lin<(Key, Monomial)> {
    let field = c.field();
    let m = b.0[0];
    let mut out = Lin::zero(field);
    let mut cur: ModuleElement = Lin::basis(field, key.clone());
    for k in 0..=m {
        let coef = field.int(binomial(m, k));
        for (z, c1) in cur.iter() {
            out.add_term((z.clone(), Monomial(vec![m - k])), &(&coef * c1));
        }
        if k < m {
            cur = cur.map_linear(|z| ore_wedge_derivation(t, c, n, z));
            if cur.is_zero() {
                break;
            }
        }
    }
    out
}

fn flip_left(field: Field) -> Arc<LeftMap> {
    Arc::new(move |_n, b: &Monomial, key: &Key| Ok(Lin::basis(field, (key.clone(), b.clone()))))
}

fn flip_right(field: Field) -> Arc<RightMap> {
    Arc::new(move |_n, key: &Key, a: &Monomial| Ok(Lin::basis(field, (a.clone(), key.clone()))))
}

/// Sequential left lift: move `b` through every factor of the key.
fn sequential_left(t: Arc<TwistMap>, c: Arc<ChainComplexSpec>, family: Family) -> Arc<LeftMap> {
    Arc::new(move |n, b: &Monomial, key: &Key| {
        let moved = move_right(&t, b, &key_factors(&c, n, key));
        let mut out = Lin::zero(c.field());
        for ((f, b1), coef) in moved.iter() {
            match family {
                Family::Bar | Family::ReducedBar => {
                    if let Some(k) = bar_key(&c.terms[n], f, family == Family::ReducedBar)? {
                        out.add_term((k, b1.clone()), coef);
                    }
                }
                _ => {
                    if let Some((k, neg)) = wedge_key(&c, n, f)? {
                        out.add_term((k, b1.clone()), &if neg { -coef } else { coef.clone() });
                    }
                }
            }
        }
        Ok(out)
    })
}

fn sequential_right(t: Arc<TwistMap>, c: Arc<ChainComplexSpec>, family: Family) -> Arc<RightMap> {
    Arc::new(move |n, key: &Key, a: &Monomial| {
        let moved = move_left(&t, &key_factors(&c, n, key), a);
        let mut out = Lin::zero(c.field());
        for ((a1, f), coef) in moved.iter() {
            match family {
                Family::Bar | Family::ReducedBar => {
                    if let Some(k) = bar_key(&c.terms[n], f, family == Family::ReducedBar)? {
                        out.add_term((a1.clone(), k), coef);
                    }
                }
                _ => {
                    if let Some((k, neg)) = wedge_key(&c, n, f)? {
                        out.add_term((a1.clone(), k), &if neg { -coef } else { coef.clone() });
                    }
                }
            }
        }
        Ok(out)
    })
}

/// Lift on the periodic resolution for `τ(s⊗g^e) = g^e⊗g^{−e}(s)`:
/// `s⊗(g^a⊗ℓ_i⊗g^b) ↦ (g^a⊗ℓ_i⊗g^b)⊗(g^{a+b+[i odd]})^{−1}(s)`.
fn periodic_left(t: Arc<TwistMap>, order: u32) -> Arc<LeftMap> {
    Arc::new(move |n, s: &Monomial, key: &Key| {
        let shift = key.0 .0[0] + key.2 .0[0] + (n % 2) as u32;
        let inv = (order - shift % order) % order;
        Ok(t.group_act(inv, s).map_keys(|m| (key.clone(), m.clone())))
    })
}

/// Attaches the lift of `t` for the bundle's family and verifies the chain-map property on
/// inputs of degree `<= 2`.
pub fn lift_twist(bundle: &ResolutionBundle, t: &Arc<TwistMap>, side: LiftSide) -> Result<ResolutionBundle, Error> {
    let c = Arc::new(bundle.complex.clone());
    let field = c.field();
    let own = match side {
        LiftSide::Left => t.left(),
        LiftSide::Right => t.right(),
    };
    if !own.same_presentation(&c.algebra) {
        return Err(Error::SpecMismatch(format!(
            "twist '{}' acts on {} but the resolution is over {}",
            t.name(),
            own.name(),
            c.algebra.name()
        )));
    }
    if side == LiftSide::Right && c.side == ModuleSide::Left {
        return Err(Error::OutOfScope("right lifts are only defined on bimodule resolutions".into()));
    }
    let fam = bundle.family;
    let (rule, map) = match (side, t.rule()) {
        (LiftSide::Left, TwistRule::Flip) => ("transposition", LiftMap::Left(flip_left(field))),
        (LiftSide::Right, TwistRule::Flip) => ("transposition", LiftMap::Right(flip_right(field))),
        (LiftSide::Left, _) if matches!(fam, Family::Bar | Family::ReducedBar) => {
            ("iterated twist", LiftMap::Left(sequential_left(t.clone(), c.clone(), fam)))
        }
        (LiftSide::Right, _) if matches!(fam, Family::Bar | Family::ReducedBar) => {
            ("iterated twist", LiftMap::Right(sequential_right(t.clone(), c.clone(), fam)))
        }
        (LiftSide::Left, TwistRule::Ore { delta }) if is_wedge_family(fam) => {
            for (i, d) in delta.iter().enumerate() {
                if d.keys().any(|m| c.algebra.mono_degree(m) > 1) {
                    return Err(Error::RestrictionFailure(format!(
                        "δ({}) = {} leaves k ⊕ V, so the twist does not restrict to the Koszul subcomplex",
                        c.algebra.generator_names()[i],
                        c.algebra.fmt(d)
                    )));
                }
            }
            let (t2, c2) = (t.clone(), c.clone());
            let f: Arc<LeftMap> = Arc::new(move |n, b: &Monomial, key: &Key| Ok(ore_closed_lift(&t2, &c2, n, b, key)));
            ("closed-form Ore correction", LiftMap::Left(f))
        }
        (LiftSide::Left, _) if is_wedge_family(fam) => ("symmetrized twist", LiftMap::Left(sequential_left(t.clone(), c.clone(), fam))),
        (LiftSide::Right, _) if is_wedge_family(fam) => ("symmetrized twist", LiftMap::Right(sequential_right(t.clone(), c.clone(), fam))),
        (LiftSide::Left, TwistRule::SkewGroup { .. }) if fam == Family::CyclicPeriodic => {
            let AlgebraKind::CyclicGroup { order, .. } = c.algebra.kind() else { unreachable!() };
            ("periodic group lift", LiftMap::Left(periodic_left(t.clone(), *order)))
        }
        _ => {
            return Err(Error::OutOfScope(format!("no explicit lift of twist '{}' on a {:?} resolution", t.name(), fam)));
        }
    };
    let mut out = bundle.clone();
    out.lift = Some(TwistLift { twist: t.clone(), rule, map });
    let report = check_lift(&out, 2, false)?;
    if let Some(f) = report.chain_failures.first() {
        return Err(Error::ChainMapFailure(f.clone()));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct LiftReport {
    pub chain_checked: usize,
    pub chain_failures: Vec<String>,
    /// One report per homological degree (empty unless requested).
    pub compat: Vec<CompatReport>,
}

impl LiftReport {
    pub fn passed(&self) -> bool {
        self.chain_failures.is_empty() && self.compat.iter().all(|r| r.passed())
    }
}

/// Verifies the attached lift: chain-map property (including compatibility with the
/// augmentation) on every key of total degree `<= bound`, and optionally the compatibility
/// equations in every degree.
pub fn check_lift(bundle: &ResolutionBundle, bound: u32, with_compat: bool) -> Result<LiftReport, Error> {
    let lift = bundle.lift.as_ref().ok_or_else(|| Error::MissingLift(format!("{} carries no twist lift", bundle.complex.name)))?;
    let c = &bundle.complex;
    let t = &lift.twist;
    let field = c.field();
    let tc = truncate(c, bound)?;
    let mut report = LiftReport { chain_checked: 0, chain_failures: Vec::new(), compat: Vec::new() };
    let fail = |msg: String, report: &mut LiftReport| {
        if report.chain_failures.len() < 20 {
            report.chain_failures.push(msg);
        }
    };
    match lift.side() {
        LiftSide::Left => {
            let others = t.right().basis_up_to(bound);
            for n in 0..tc.bases.len() {
                for key in &tc.bases[n] {
                    for b in &others {
                        report.chain_checked += 1;
                        let img = lift.left(n, b, key)?;
                        if n == 0 {
                            // (ε⊗1)τ_{B,0} = τ_{B,M}(1⊗ε)
                            let mut lhs: Lin<(Monomial, Monomial)> = Lin::zero(field);
                            for ((k, b1), coef) in img.iter() {
                                for (m, c2) in c.augment(&Lin::basis(field, k.clone())).iter() {
                                    lhs.add_term((m.clone(), b1.clone()), &(coef * c2));
                                }
                            }
                            let eps = c.augment(&Lin::basis(field, key.clone()));
                            let rhs = match bundle.resolved {
                                Resolved::Algebra => eps.map_linear(|m| t.apply_mono(b, m)),
                                Resolved::Trivial => eps.map_keys(|m| (m.clone(), b.clone())),
                            };
                            if lhs != rhs {
                                fail(format!("degree 0: augmentation of τ({b:?}⊗{key:?}) differs"), &mut report);
                            }
                            continue;
                        }
                        let mut lhs = Lin::zero(field);
                        for ((k, b1), coef) in img.iter() {
                            for (k2, c2) in c.apply_d(n, &Lin::basis(field, k.clone())).iter() {
                                lhs.add_term((k2.clone(), b1.clone()), &(coef * c2));
                            }
                        }
                        let rhs = lift.left_elem(n - 1, b, &c.apply_d(n, &Lin::basis(field, key.clone())))?;
                        if lhs != rhs {
                            fail(format!("degree {n}: (d⊗1)τ ≠ τ(1⊗d) on {b:?}⊗{key:?}"), &mut report);
                        }
                    }
                }
            }
        }
        LiftSide::Right => {
            let others = t.left().basis_up_to(bound);
            for n in 0..tc.bases.len() {
                for key in &tc.bases[n] {
                    for a in &others {
                        report.chain_checked += 1;
                        let img = lift.right(n, key, a)?;
                        if n == 0 {
                            let mut lhs: Lin<(Monomial, Monomial)> = Lin::zero(field);
                            for ((a1, k), coef) in img.iter() {
                                for (m, c2) in c.augment(&Lin::basis(field, k.clone())).iter() {
                                    lhs.add_term((a1.clone(), m.clone()), &(coef * c2));
                                }
                            }
                            let eps = c.augment(&Lin::basis(field, key.clone()));
                            let rhs = eps.map_linear(|m| t.apply_mono(m, a));
                            if lhs != rhs {
                                fail(format!("degree 0: augmentation of τ({key:?}⊗{a:?}) differs"), &mut report);
                            }
                            continue;
                        }
                        let mut lhs = Lin::zero(field);
                        for ((a1, k), coef) in img.iter() {
                            for (k2, c2) in c.apply_d(n, &Lin::basis(field, k.clone())).iter() {
                                lhs.add_term((a1.clone(), k2.clone()), &(coef * c2));
                            }
                        }
                        let rhs = lift.right_elem(n - 1, &c.apply_d(n, &Lin::basis(field, key.clone())), a)?;
                        if lhs != rhs {
                            fail(format!("degree {n}: (1⊗d)τ ≠ τ(d⊗1) on {key:?}⊗{a:?}"), &mut report);
                        }
                    }
                }
            }
        }
    }
    if with_compat {
        report.compat = compat_reports(bundle, lift, &tc.bases, bound)?;
    }
    Ok(report)
}

fn compat_reports(bundle: &ResolutionBundle, lift: &TwistLift, bases: &[Vec<Key>], bound: u32) -> Result<Vec<CompatReport>, Error> {
    let c = &bundle.complex;
    let t = &lift.twist;
    let field = c.field();
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let a_basis = t.left().basis_up_to(bound);
    let b_basis = t.right().basis_up_to(bound);
    let mut out = Vec::new();
    for (n, basis) in bases.iter().enumerate() {
        let r = match (lift.side(), c.side) {
            (LiftSide::Left, ModuleSide::Bimodule) => check_left_compat(
                t,
                basis,
                &b_basis,
                &a_basis,
                |b, k| keep(&err, field, lift.left(n, b, k)),
                |a, k, a2| c.act(a, &Lin::basis(field, k.clone()), a2),
            ),
            (LiftSide::Left, ModuleSide::Left) => check_one_sided_compat(
                t,
                basis,
                &b_basis,
                &a_basis,
                |b, k| keep(&err, field, lift.left(n, b, k)),
                |a, k| c.act(a, &Lin::basis(field, k.clone()), &c.algebra.one_mono()),
            ),
            (LiftSide::Right, _) => check_right_compat(
                t,
                basis,
                &b_basis,
                &a_basis,
                |k, a| keep(&err, field, lift.right(n, k, a)),
                |b, k, b2| c.act(b, &Lin::basis(field, k.clone()), b2),
            ),
        };
        out.push(r);
    }
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn keep<T: Ord + Clone>(err: &RefCell<Option<Error>>, field: Field, r: Result<Lin<T>, Error>) -> Lin<T> {
    match r {
        Ok(v) => v,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            Lin::zero(field)
        }
    }
}

/// Recomputes a left Koszul lift by symmetrizing each label into the reduced bar complex,
/// moving `b` through every factor, and projecting back; errors if the image leaves the
/// symmetrized subcomplex or disagrees with the attached lift. Returns the number of inputs
/// compared.
pub fn cross_check_symmetrization(bundle: &ResolutionBundle, max_n: usize, bound: u32) -> Result<usize, Error> {
    let lift = bundle.lift.as_ref().ok_or_else(|| Error::MissingLift(bundle.complex.name.clone()))?;
    if lift.side() != LiftSide::Left || !is_wedge_family(bundle.family) {
        return Err(Error::OutOfScope("symmetrization cross-check applies to left lifts on Koszul resolutions".into()));
    }
    let c = &bundle.complex;
    let t = &lift.twist;
    let field = c.field();
    let tc = truncate(c, bound)?;
    let mut checked = 0;
    for n in 0..tc.bases.len().min(max_n + 1) {
        for key in &tc.bases[n] {
            let Label::Wedge(l) = c.terms[n].label(key.1) else { unreachable!() };
            for b in t.right().basis_up_to(bound) {
                checked += 1;
                // φ(ℓ) = Σ_σ sgn(σ) x_{σ(1)}⊗…⊗x_{σ(n)}, each pushed through the bar lift
                let mut image: Lin<(Vec<Monomial>, Monomial)> = Lin::zero(field);
                for (perm, neg) in permutations(l) {
                    let mut f = vec![key.0.clone()];
                    f.extend(perm.iter().map(|&i| c.algebra.generator_mono(i)));
                    if c.side == ModuleSide::Bimodule {
                        f.push(key.2.clone());
                    }
                    let sign = if neg { field.int(-1) } else { field.one() };
                    let moved = move_right(t, &b, &f);
                    let mid_end = if c.side == ModuleSide::Bimodule { f.len() - 1 } else { f.len() };
                    for ((g, b1), coef) in moved.iter() {
                        if g[1..mid_end].iter().any(|m| m.is_one()) {
                            continue; // zero in the reduced bar complex
                        }
                        image.add_term((g.clone(), b1.clone()), &(&sign * coef));
                    }
                }
                // projection: read off the coefficients of increasing generator words
                let mut projected: Lin<(Key, Monomial)> = Lin::zero(field);
                let mid_end = n + 1;
                for ((g, b1), coef) in image.iter() {
                    let mut idx = Vec::new();
                    for m in &g[1..mid_end] {
                        if c.algebra.mono_degree(m) != 1 {
                            return Err(Error::RestrictionFailure(format!(
                                "{}: lifted tensor has middle factor {} outside V",
                                c.name,
                                c.algebra.fmt_mono(m)
                            )));
                        }
                        idx.push(m.0.iter().position(|&e| e == 1).unwrap());
                    }
                    if idx.windows(2).all(|w| w[0] < w[1]) {
                        let k = c.terms[n].position(&Label::Wedge(idx)).unwrap();
                        let v = if c.side == ModuleSide::Bimodule { g[g.len() - 1].clone() } else { c.algebra.one_mono() };
                        projected.add_term(((g[0].clone(), k, v), b1.clone()), coef);
                    }
                }
                // the image must be the symmetrization of its projection
                let mut resym: Lin<(Vec<Monomial>, Monomial)> = Lin::zero(field);
                for (((u, k, v), b1), coef) in projected.iter() {
                    let Label::Wedge(w) = c.terms[n].label(*k) else { unreachable!() };
                    for (perm, neg) in permutations(w) {
                        let mut f = vec![u.clone()];
                        f.extend(perm.iter().map(|&i| c.algebra.generator_mono(i)));
                        if c.side == ModuleSide::Bimodule {
                            f.push(v.clone());
                        }
                        resym.add_term((f, b1.clone()), &if neg { -coef } else { coef.clone() });
                    }
                }
                if resym != image {
                    return Err(Error::RestrictionFailure(format!("{}: image of {key:?} is not antisymmetric", c.name)));
                }
                if projected != lift.left(n, &b, key)? {
                    return Err(Error::ChainMapFailure(format!(
                        "{}: closed-form lift and symmetrize–twist–project disagree on {b:?}⊗{key:?}",
                        c.name
                    )));
                }
            }
        }
    }
    Ok(checked)
}

/// All orderings of `l` with the parity of the permutation.
fn permutations(l: &[usize]) -> Vec<(Vec<usize>, bool)> {
    if l.len() <= 1 {
        return vec![(l.to_vec(), false)];
    }
    let mut out = Vec::new();
    for i in 0..l.len() {
        let mut rest = l.to_vec();
        let x = rest.remove(i);
        for (mut p, neg) in permutations(&rest) {
            p.insert(0, x);
            out.push((p, neg ^ (i % 2 == 1)));
        }
    }
    out
}

/// `σ̃ = 1` and `δ̃` for a derivation `δ` of `R` (given on generators), on a one-sided
/// resolution of `k` with wedge labels, together with the Ore twist `R ⊗ k[x]`.
#[derive(Clone)]
pub struct SigmaDelta {
    pub twist: Arc<TwistMap>,
    /// The input bundle with the lift `τ(x⊗z) = z⊗x + δ̃(z)⊗1` attached.
    pub bundle: ResolutionBundle,
}

impl SigmaDelta {
    pub fn sigma_tilde(&self, _n: usize, x: &ModuleElement) -> ModuleElement {
        x.clone()
    }

    /// `δ̃_n(r⊗w) = δ(r)⊗w + Σ_i r⊗(… ∧ δ̄(x_{l_i}) ∧ …)`.
    pub fn delta_tilde(&self, n: usize, x: &ModuleElement) -> ModuleElement {
        x.map_linear(|k| ore_wedge_derivation(&self.twist, &self.bundle.complex, n, k))
    }
}

pub fn sigma_delta_chain_maps(bundle: &ResolutionBundle, delta: Vec<Element>, var: &str) -> Result<SigmaDelta, Error> {
    let c = &bundle.complex;
    if c.side != ModuleSide::Left || bundle.resolved != Resolved::Trivial {
        return Err(Error::SpecMismatch("δ̃ is built on one-sided resolutions of k".into()));
    }
    if !c.terms.iter().all(|t| t.labels().iter().all(|l| matches!(l, Label::Wedge(_)))) {
        return Err(Error::SpecMismatch("δ̃ needs wedge-type labels".into()));
    }
    let r = c.algebra.clone();
    for (i, d) in delta.iter().enumerate() {
        r.check(d)?;
        if !r.counit(d).is_zero() {
            return Err(Error::Augmentation(format!(
                "ε(δ({})) = {} ≠ 0: k is not a module over the Ore extension",
                r.generator_names().get(i).cloned().unwrap_or_default(),
                r.counit(d)
            )));
        }
    }
    let b = crate::algebra::Algebra::polynomial(r.field(), &[var]);
    let twist = TwistMap::ore(r.clone(), b, delta)?;
    let sd = SigmaDelta { twist: twist.clone(), bundle: bundle.clone() };
    let field = r.field();
    for n in 1..c.terms.len() {
        for k in 0..c.terms[n].rank() {
            let g = c.generator(k);
            let lhs = c.apply_d(n, &sd.delta_tilde(n, &g));
            let rhs = sd.delta_tilde(n - 1, &c.apply_d(n, &g));
            if lhs != rhs {
                return Err(Error::ChainMapFailure(format!(
                    "d∘δ̃ ≠ δ̃∘d on {} in degree {n}: {} vs {}",
                    c.fmt_label(n, k),
                    c.fmt_element(n - 1, &lhs),
                    c.fmt_element(n - 1, &rhs)
                )));
            }
        }
    }
    // ε∘δ̃_0 = (x acting on k)∘ε = 0
    for m in r.basis_up_to(2) {
        let img = sd.delta_tilde(0, &Lin::basis(field, (m, 0, r.one_mono())));
        if !c.augment(&img).is_zero() {
            return Err(Error::Augmentation("ε∘δ̃_0 ≠ 0".into()));
        }
    }
    let lifted = lift_twist(bundle, &twist, LiftSide::Left)?;
    Ok(SigmaDelta { twist, bundle: lifted })
}
