//! Twisting maps `τ: B⊗A → A⊗B`, their verification, and inversion.

mod compat;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{fmt_lin, Algebra, AlgebraKind, Element, Monomial};
use crate::kernel::{inverse, rank, SparseMatrix};
use crate::lin::Lin;
use crate::Error;

pub use compat::{check_left_compat, check_one_sided_compat, check_right_compat, CompatReport, CompatViolation, Side};

/// An element of `X ⊗ Y` on pairs of basis monomials.
pub type Tensor = Lin<(Monomial, Monomial)>;

#[derive(Clone, Debug)]
pub enum TwistRule {
    Flip,
    /// `τ(x⊗r) = r⊗x + δ(r)⊗1` with `B = k[x]`; `delta[i]` is `δ` of the i-th generator of `A`.
    Ore {
        delta: Vec<Element>,
    },
    /// `A = kZ/n`, `τ(s⊗g) = g⊗g⁻¹(s)`; `action[i]` is `g` applied to the i-th generator of `B`.
    SkewGroup {
        action: Vec<Element>,
    },
    /// Explicit values on basis pairs `(b, a)`; pairs not in the table are reached by the
    /// hexagon recursion.
    Custom {
        table: BTreeMap<(Monomial, Monomial), Tensor>,
    },
}

pub struct TwistMap {
    left: Arc<Algebra>,
    right: Arc<Algebra>,
    rule: TwistRule,
    name: String,
    cache: Mutex<HashMap<(Monomial, Monomial), Tensor>>,
    // Ore: δ on A-monomials; SkewGroup: g^k on B-monomials keyed by (k, m).
    aux: Mutex<HashMap<(u32, Monomial), Element>>,
}

impl std::fmt::Debug for TwistMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "TwistMap({}: {} (x) {} -> {} (x) {})",
            self.name,
            self.right.name(),
            self.left.name(),
            self.left.name(),
            self.right.name()
        )
    }
}

fn binom(n: u32, k: u32) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

impl TwistMap {
    fn build(left: Arc<Algebra>, right: Arc<Algebra>, rule: TwistRule, name: &str) -> Result<Arc<TwistMap>, Error> {
        if left.field() != right.field() {
            return Err(Error::SpecMismatch("twist factors over different fields".into()));
        }
        Ok(Arc::new(TwistMap { left, right, rule, name: name.into(), cache: Mutex::new(HashMap::new()), aux: Mutex::new(HashMap::new()) }))
    }

    /// The ordinary tensor product: `τ(b⊗a) = a⊗b`.
    pub fn flip(a: Arc<Algebra>, b: Arc<Algebra>) -> Result<Arc<TwistMap>, Error> {
        TwistMap::build(a, b, TwistRule::Flip, "flip")
    }

    /// `B` must be a polynomial algebra in one variable.
    pub fn ore(a: Arc<Algebra>, b: Arc<Algebra>, delta: Vec<Element>) -> Result<Arc<TwistMap>, Error> {
        if !matches!(b.kind(), AlgebraKind::Polynomial { .. }) || b.generator_count() != 1 {
            return Err(Error::Validation("an Ore twist needs B = k[x] in one variable".into()));
        }
        if delta.len() != a.generator_count() {
            return Err(Error::Validation(format!("Ore twist: {} delta values for {} generators", delta.len(), a.generator_count())));
        }
        for d in &delta {
            a.check(d)?;
        }
        TwistMap::build(a, b, TwistRule::Ore { delta }, "ore")
    }

    /// `A` must be a cyclic group algebra; `action` gives the generator's action on `B`'s generators.
    pub fn skew_group(a: Arc<Algebra>, b: Arc<Algebra>, action: Vec<Element>) -> Result<Arc<TwistMap>, Error> {
        let AlgebraKind::CyclicGroup { order, .. } = a.kind() else {
            return Err(Error::Validation("a skew group twist needs A = kG for a cyclic group G".into()));
        };
        if action.len() != b.generator_count() {
            return Err(Error::Validation("skew group twist: one image per generator of B is required".into()));
        }
        for v in &action {
            b.check(v)?;
        }
        let order = *order;
        let t = TwistMap::build(a, b, TwistRule::SkewGroup { action }, "skew-group")?;
        for i in 0..t.right.generator_count() {
            let g = t.right.generator_mono(i);
            if t.group_act(order, &g) != t.right.generator(i) {
                return Err(Error::Validation(format!(
                    "the action does not have order dividing {order} on generator {}",
                    t.right.generator_names()[i]
                )));
            }
        }
        Ok(t)
    }

    pub fn custom(a: Arc<Algebra>, b: Arc<Algebra>, table: BTreeMap<(Monomial, Monomial), Tensor>) -> Result<Arc<TwistMap>, Error> {
        for ((bm, am), v) in &table {
            if !b.is_valid(bm) || !a.is_valid(am) {
                return Err(Error::SpecMismatch("custom twist table key outside the declared algebras".into()));
            }
            for (x, y) in v.keys() {
                if !a.is_valid(x) || !b.is_valid(y) {
                    return Err(Error::SpecMismatch("custom twist table value outside A (x) B".into()));
                }
            }
        }
        TwistMap::build(a, b, TwistRule::Custom { table }, "custom")
    }

    pub fn left(&self) -> &Arc<Algebra> {
        &self.left
    }
    pub fn right(&self) -> &Arc<Algebra> {
        &self.right
    }
    pub fn rule(&self) -> &TwistRule {
        &self.rule
    }
    pub fn name(&self) -> &str {
        &self.name
    }

    /// True when `τ` maps `B_j ⊗ A_i` into `A_i ⊗ B_j`.
    pub fn is_strongly_graded(&self) -> bool {
        match &self.rule {
            TwistRule::Flip => true,
            TwistRule::Ore { delta } => delta.iter().all(|d| d.is_zero()),
            TwistRule::SkewGroup { action } => action.iter().all(|v| v.keys().all(|m| self.right.mono_degree(m) == 1)),
            TwistRule::Custom { table } => table.iter().all(|((b, a), v)| {
                v.keys().all(|(x, y)| {
                    self.left.mono_degree(x) == self.left.mono_degree(a) && self.right.mono_degree(y) == self.right.mono_degree(b)
                })
            }),
        }
    }

    /// `δ` (Ore rule) extended to all of `A` by the Leibniz rule.
    pub fn ore_derivation(&self, m: &Monomial) -> Element {
        let TwistRule::Ore { delta } = &self.rule else {
            return Lin::zero(self.left.field());
        };
        let Some((g, rest)) = self.left.split_first(m) else {
            return Lin::zero(self.left.field());
        };
        let key = (0, m.clone());
        if let Some(hit) = self.aux.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let mut out = self.left.mul(&delta[g], &Lin::basis(self.left.field(), rest.clone()));
        let tail = self.ore_derivation(&rest);
        out.add(&self.left.mul(&self.left.generator(g), &tail));
        self.aux.lock().unwrap().insert(key, out.clone());
        out
    }

    pub fn ore_derivation_of(&self, a: &Element) -> Element {
        a.map_linear(|m| self.ore_derivation(m))
    }

    /// `g^k` applied to a monomial of `B` (skew group rule).
    pub fn group_act(&self, k: u32, m: &Monomial) -> Element {
        let TwistRule::SkewGroup { action } = &self.rule else { unreachable!() };
        let AlgebraKind::CyclicGroup { order, .. } = self.left.kind() else { unreachable!() };
        let k = k % order.max(&1);
        if k == 0 || m.is_one() {
            return Lin::basis(self.right.field(), m.clone());
        }
        let key = (k, m.clone());
        if let Some(hit) = self.aux.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let (g, rest) = self.right.split_first(m).unwrap();
        let out = if rest.is_one() {
            // g^k(b) = g(g^{k-1}(b))
            self.group_act(k - 1, m).map_linear(|w| self.group_act_once(w, action))
        } else {
            let head = self.group_act(k, &self.right.generator_mono(g));
            self.right.mul(&head, &self.group_act(k, &rest))
        };
        self.aux.lock().unwrap().insert(key, out.clone());
        out
    }

    fn group_act_once(&self, m: &Monomial, action: &[Element]) -> Element {
        let mut acc = self.right.one();
        for (i, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                acc = self.right.mul(&acc, &action[i]);
            }
        }
        acc
    }

    /// `τ(b⊗a)` on basis monomials.
    pub fn apply_mono(&self, b: &Monomial, a: &Monomial) -> Tensor {
        let field = self.left.field();
        if b.is_one() || a.is_one() {
            return Lin::basis(field, (a.clone(), b.clone()));
        }
        let key = (b.clone(), a.clone());
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let out = match &self.rule {
            TwistRule::Flip => Lin::basis(field, (a.clone(), b.clone())),
            TwistRule::Ore { .. } => {
                let m = b.0[0];
                let mut out = Lin::zero(field);
                let mut d = Lin::basis(field, a.clone());
                for k in 0..=m {
                    if d.is_zero() {
                        break;
                    }
                    let c = field.int(binom(m, k));
                    for (r, rc) in d.iter() {
                        out.add_term((r.clone(), Monomial(vec![m - k])), &(rc * &c));
                    }
                    d = self.ore_derivation_of(&d);
                }
                out
            }
            TwistRule::SkewGroup { .. } => {
                let AlgebraKind::CyclicGroup { order, .. } = self.left.kind() else { unreachable!() };
                let inv = (order - a.0[0] % order) % order;
                self.group_act(inv, b).map_keys(|s| (a.clone(), s.clone()))
            }
            TwistRule::Custom { table } => match table.get(&key) {
                Some(v) => v.clone(),
                None => self.recurse(b, a),
            },
        };
        self.cache.lock().unwrap().insert(key, out.clone());
        out
    }

    /// Hexagon recursion: peel one generator off `b` (or, for a generator `b`, off `a`).
    fn recurse(&self, b: &Monomial, a: &Monomial) -> Tensor {
        let field = self.left.field();
        let (gb, rest_b) = self.right.split_first(b).unwrap();
        if !rest_b.is_one() {
            // τ(g·b' ⊗ a) = (1⊗m_B)(τ⊗1)(g ⊗ τ(b'⊗a))
            let gm = self.right.generator_mono(gb);
            let mut out = Lin::zero(field);
            for ((a1, b1), c1) in self.apply_mono(&rest_b, a).iter() {
                for ((a2, g2), c2) in self.apply_mono(&gm, a1).iter() {
                    let prod = self.right.mul_mono(g2, b1);
                    for (bm, c3) in prod.iter() {
                        out.add_term((a2.clone(), bm.clone()), &(&(c1 * c2) * c3));
                    }
                }
            }
            return out;
        }
        let Some((ga, rest_a)) = self.left.split_first(a) else {
            return Lin::basis(field, (a.clone(), b.clone()));
        };
        if rest_a.is_one() {
            // a generator pair missing from the table: no information, treat as commuting
            return Lin::basis(field, (a.clone(), b.clone()));
        }
        // τ(b ⊗ h·a') = (m_A⊗1)(1⊗τ)(τ(b⊗h) ⊗ a')
        let hm = self.left.generator_mono(ga);
        let mut out = Lin::zero(field);
        for ((h1, b1), c1) in self.apply_mono(b, &hm).iter() {
            for ((a2, b2), c2) in self.apply_mono(b1, &rest_a).iter() {
                let prod = self.left.mul_mono(h1, a2);
                for (am, c3) in prod.iter() {
                    out.add_term((am.clone(), b2.clone()), &(&(c1 * c2) * c3));
                }
            }
        }
        out
    }

    /// Bilinear extension of [`TwistMap::apply_mono`].
    pub fn apply(&self, b: &Element, a: &Element) -> Result<Tensor, Error> {
        self.right.check(b)?;
        self.left.check(a)?;
        Ok(self.apply_unchecked(b, a))
    }

    pub fn apply_unchecked(&self, b: &Element, a: &Element) -> Tensor {
        let mut out = Lin::zero(self.left.field());
        for (bm, bc) in b.iter() {
            for (am, ac) in a.iter() {
                out.add_scaled(&self.apply_mono(bm, am), &(bc * ac));
            }
        }
        out
    }

    /// Applies `τ` to an element of `B ⊗ A`.
    pub fn apply_tensor(&self, t: &Tensor) -> Tensor {
        t.map_linear(|(b, a)| self.apply_mono(b, a))
    }

    pub fn fmt_tensor(&self, t: &Tensor) -> String {
        fmt_lin(t, |(a, b)| format!("{}(x){}", self.left.fmt_mono(a), self.right.fmt_mono(b)))
    }

    /// Checks `τ(1⊗a) = a⊗1` and `τ(b⊗1) = 1⊗b` on bases up to `bound`.
    pub fn check_units(&self, bound: u32) -> bool {
        let one_a = self.left.one_mono();
        let one_b = self.right.one_mono();
        let field = self.left.field();
        self.left.basis_up_to(bound).iter().all(|a| self.apply_mono(&one_b, a) == Lin::basis(field, (a.clone(), one_b.clone())))
            && self.right.basis_up_to(bound).iter().all(|b| self.apply_mono(b, &one_a) == Lin::basis(field, (one_a.clone(), b.clone())))
    }
}

/// `(m_A⊗m_B)(1⊗τ⊗1)` applied to `a⊗b⊗a'⊗b'`, returned as an element of `A⊗B`.
fn cross(t: &TwistMap, a: &Monomial, b: &Monomial, a2: &Monomial, b2: &Monomial, c: &crate::kernel::Scalar, out: &mut Tensor) {
    for ((a3, b3), c3) in t.apply_mono(b, a2).iter() {
        let left = t.left.mul_mono(a, a3);
        let right = t.right.mul_mono(b3, b2);
        for (la, lc) in left.iter() {
            for (rb, rc) in right.iter() {
                out.add_term((la.clone(), rb.clone()), &(&(c * c3) * &(lc * rc)));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HexagonViolation {
    /// `(b, b', a, a')` rendered with generator names.
    pub tuple: [String; 4],
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HexagonReport {
    pub tuples_checked: usize,
    pub violations: Vec<HexagonViolation>,
}

impl HexagonReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Both sides of the hexagon identity on `b⊗b'⊗a⊗a'` (linear combinations allowed).
fn hexagon_sides(t: &TwistMap, bs: (&Element, &Element), as_: (&Element, &Element)) -> (Tensor, Tensor) {
    let field = t.left.field();
    let bb = t.right.mul(bs.0, bs.1);
    let aa = t.left.mul(as_.0, as_.1);
    let lhs = t.apply_unchecked(&bb, &aa);
    let mut rhs = Lin::zero(field);
    for (b1, cb1) in bs.0.iter() {
        for (b2, cb2) in bs.1.iter() {
            for (a1, ca1) in as_.0.iter() {
                for (a2, ca2) in as_.1.iter() {
                    let c = &(cb1 * cb2) * &(ca1 * ca2);
                    // 1⊗τ⊗1: b1 ⊗ τ(b2⊗a1) ⊗ a2
                    for ((x, y), c1) in t.apply_mono(b2, a1).iter() {
                        // τ⊗τ: τ(b1⊗x) ⊗ τ(y⊗a2)
                        for ((p, q), c2) in t.apply_mono(b1, x).iter() {
                            for ((r, s), c3) in t.apply_mono(y, a2).iter() {
                                let coeff = &(&c * c1) * &(c2 * c3);
                                cross(t, p, q, r, s, &coeff, &mut rhs);
                            }
                        }
                    }
                }
            }
        }
    }
    (lhs, rhs)
}

fn random_element<R: Rng>(alg: &Algebra, basis: &[Monomial], rng: &mut R) -> Element {
    let mut e = Lin::zero(alg.field());
    let terms = rng.gen_range(1..=3);
    for _ in 0..terms {
        let m = &basis[rng.gen_range(0..basis.len())];
        let c = rng.gen_range(-3i64..=3);
        e.add_term(m.clone(), &alg.field().int(c));
    }
    if e.is_zero() {
        e = Lin::basis(alg.field(), basis[0].clone());
    }
    e
}

/// Verifies `τ∘(m_B⊗m_A) = (m_A⊗m_B)(1⊗τ⊗1)(τ⊗τ)(1⊗τ⊗1)` on every basis 4-tuple whose entries
/// have degree `<= degree_bound`, plus `sample_count` seeded random tuples.
pub fn check_hexagon(t: &TwistMap, degree_bound: u32, sample_count: usize, seed: u64) -> Result<HexagonReport, Error> {
    if degree_bound < 1 {
        return Err(Error::Validation("hexagon degree bound must be at least 1".into()));
    }
    let field = t.left.field();
    let bb = t.right.basis_up_to(degree_bound);
    let ab = t.left.basis_up_to(degree_bound);
    let mut report = HexagonReport { tuples_checked: 0, violations: Vec::new() };
    let mut check = |b1: &Element, b2: &Element, a1: &Element, a2: &Element| {
        let (lhs, rhs) = hexagon_sides(t, (b1, b2), (a1, a2));
        report.tuples_checked += 1;
        if lhs != rhs {
            report.violations.push(HexagonViolation {
                tuple: [t.right.fmt(b1), t.right.fmt(b2), t.left.fmt(a1), t.left.fmt(a2)],
                lhs: t.fmt_tensor(&lhs),
                rhs: t.fmt_tensor(&rhs),
            });
        }
    };
    for b1 in &bb {
        for b2 in &bb {
            for a1 in &ab {
                for a2 in &ab {
                    let e = |m: &Monomial| Lin::basis(field, m.clone());
                    check(&e(b1), &e(b2), &e(a1), &e(a2));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sample_count {
        let b1 = random_element(&t.right, &bb, &mut rng);
        let b2 = random_element(&t.right, &bb, &mut rng);
        let a1 = random_element(&t.left, &ab, &mut rng);
        let a2 = random_element(&t.left, &ab, &mut rng);
        check(&b1, &b2, &a1, &a2);
    }
    Ok(report)
}

/// `(a⊗b)(a'⊗b')` in `A ⊗_τ B`.
pub fn twisted_multiply(alg: &Algebra, u: &Element, v: &Element) -> Result<Element, Error> {
    if !matches!(alg.kind(), AlgebraKind::TwistedProduct { .. }) {
        return Err(Error::SpecMismatch(format!("{} is not a twisted tensor product", alg.name())));
    }
    alg.multiply(u, v)
}

/// Pairs `(x, y)` of basis monomials with `deg x + deg y <= n`.
fn pairs_up_to(x: &Algebra, y: &Algebra, n: u32) -> Vec<(Monomial, Monomial)> {
    let mut out = Vec::new();
    for a in x.basis_up_to(n) {
        let d = x.mono_degree(&a);
        for b in y.basis_up_to(n - d) {
            out.push((a.clone(), b));
        }
    }
    out
}

/// Inverts `τ` on the truncation `F_N(B⊗A) → F_N(A⊗B)` and returns `τ⁻¹: A⊗B → B⊗A` as a
/// twisting map for `B ⊗_{τ⁻¹} A` (so its left factor is `B`).
pub fn invert_twist(t: &TwistMap, degree_bound: u32) -> Result<Arc<TwistMap>, Error> {
    let field = t.left.field();
    let domain = pairs_up_to(&t.right, &t.left, degree_bound); // (b, a)
    let codomain = pairs_up_to(&t.left, &t.right, degree_bound); // (a, b)
    let row_of: HashMap<&(Monomial, Monomial), usize> = codomain.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut m = SparseMatrix::zero(field, codomain.len(), domain.len());
    for (col, (b, a)) in domain.iter().enumerate() {
        for (pair, c) in t.apply_mono(b, a).iter() {
            let row = *row_of.get(pair).ok_or_else(|| {
                Error::NonInvertibleTruncation(format!(
                    "tau({}(x){}) leaves filtration degree {degree_bound}",
                    t.right.fmt_mono(b),
                    t.left.fmt_mono(a)
                ))
            })?;
            m.add_entry(row, col, c);
        }
    }
    if codomain.len() != domain.len() || rank(&m) != domain.len() {
        return Err(Error::NonInvertibleTruncation(format!("rank deficit at degree bound {degree_bound}")));
    }
    let inv = inverse(&m).ok_or_else(|| Error::NonInvertibleTruncation("singular truncation".into()))?;
    let mut table: BTreeMap<(Monomial, Monomial), Tensor> = BTreeMap::new();
    for (r, c, v) in inv.triplets() {
        // inv[c_dom][r_cod]: coefficient of domain pair r in τ⁻¹(codomain pair c)
        let (a, b) = &codomain[c];
        let (b2, a2) = &domain[r];
        table.entry((a.clone(), b.clone())).or_insert_with(|| Lin::zero(field)).add_term((b2.clone(), a2.clone()), v);
    }
    let inverse_rule = TwistRule::Custom { table };
    TwistMap::build(t.right.clone(), t.left.clone(), inverse_rule, &format!("{}^-1", t.name))
}

/// Checks that `t` is bijective on every truncation up to `degree_bound` (rank test).
pub fn check_bijective(t: &TwistMap, degree_bound: u32) -> Result<(), Error> {
    invert_twist(t, degree_bound).map(|_| ())
}
