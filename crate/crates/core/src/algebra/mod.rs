//! Presented algebras with a PBW normal-form basis.
//!
//! Monomials are exponent vectors. For polynomial and iterated Ore algebras entry `i` is
//! the exponent of `x_{i+1}`; a cyclic group monomial is the single power `[e]`, `0 <= e < n`;
//! a twisted product monomial is the concatenation of its left and right factors.

mod parse;

use std::cmp::Reverse;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::kernel::{Field, Scalar};
use crate::lin::Lin;
use crate::twist::TwistMap;
use crate::Error;

pub use parse::{parse_element, parse_tensor};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }
    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
    pub fn exps(&self) -> &[u32] {
        &self.0
    }
    pub fn split(&self, at: usize) -> (Monomial, Monomial) {
        (Monomial(self.0[..at].to_vec()), Monomial(self.0[at..].to_vec()))
    }
    pub fn concat(a: &Monomial, b: &Monomial) -> Monomial {
        let mut v = a.0.clone();
        v.extend_from_slice(&b.0);
        Monomial(v)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub type Element = Lin<Monomial>;

/// The filtration degree: `deg x_i = 1`, group elements have degree 0, degrees add over `⊗`.
pub type FiltrationDegree = u32;

pub enum AlgebraKind {
    Polynomial {
        names: Vec<String>,
    },
    CyclicGroup {
        order: u32,
        name: String,
    },
    /// `delta[j][i]` holds `δ_{j+1}(x_{i+1})` for `i < j`.
    IteratedOre {
        names: Vec<String>,
        delta: Vec<Vec<Element>>,
    },
    TwistedProduct {
        left: Arc<Algebra>,
        right: Arc<Algebra>,
        twist: Arc<TwistMap>,
    },
}

pub struct Algebra {
    field: Field,
    name: String,
    kind: AlgebraKind,
    mul_cache: Mutex<HashMap<(Monomial, Monomial), Element>>,
    delta_cache: Mutex<HashMap<(usize, Monomial), Element>>,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra({} over {})", self.name, self.field)
    }
}

fn binom(n: u32, k: u32) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

impl Algebra {
    fn build(field: Field, name: impl Into<String>, kind: AlgebraKind) -> Arc<Algebra> {
        Arc::new(Algebra { field, name: name.into(), kind, mul_cache: Mutex::new(HashMap::new()), delta_cache: Mutex::new(HashMap::new()) })
    }

    pub fn polynomial(field: Field, names: &[&str]) -> Arc<Algebra> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let label = format!("k[{}]", names.join(","));
        Algebra::build(field, label, AlgebraKind::Polynomial { names })
    }

    pub fn cyclic_group(field: Field, order: u32) -> Result<Arc<Algebra>, Error> {
        if order < 1 {
            return Err(Error::Validation("cyclic group order must be at least 1".into()));
        }
        Ok(Algebra::build(field, format!("kZ/{order}"), AlgebraKind::CyclicGroup { order, name: "g".into() }))
    }

    /// `deltas` lists `(j, i, δ_j(x_i))` with 0-based generator indices `i < j`; omitted pairs are 0.
    /// Each value must lie in `k ⊕ span{x_1, …, x_{j-1}}`.
    pub fn iterated_ore(field: Field, names: &[&str], deltas: Vec<(usize, usize, Element)>) -> Result<Arc<Algebra>, Error> {
        let t = names.len();
        let mut delta: Vec<Vec<Element>> = (0..t).map(|j| vec![Lin::zero(field); j]).collect();
        for (j, i, value) in deltas {
            if j >= t || i >= j {
                return Err(Error::Validation(format!("delta entry ({}, {}) must satisfy i < j <= {t}", j + 1, i + 1)));
            }
            for m in value.keys() {
                let deg: u32 = m.0.iter().sum();
                if m.0.len() != t || deg > 1 || m.0[j..].iter().any(|&e| e > 0) {
                    return Err(Error::Validation(format!(
                        "delta_{}({}) = {} violates the filtered condition (must lie in k + span of x_1..x_{})",
                        j + 1,
                        names[i],
                        fmt_with(names, &value),
                        j
                    )));
                }
            }
            delta[j][i] = value;
        }
        let label = format!("k[{}; delta]", names.join(","));
        let names = names.iter().map(|s| s.to_string()).collect();
        Ok(Algebra::build(field, label, AlgebraKind::IteratedOre { names, delta }))
    }

    pub fn twisted_product(twist: Arc<TwistMap>) -> Arc<Algebra> {
        let left = twist.left().clone();
        let right = twist.right().clone();
        let label = format!("{} (x)_tau {}", left.name, right.name);
        Algebra::build(left.field, label, AlgebraKind::TwistedProduct { left, right, twist })
    }

    /// True when both algebras have the same field, generators and structure constants, so
    /// their monomials can be used interchangeably.
    pub fn same_presentation(&self, other: &Algebra) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.field != other.field {
            return false;
        }
        match (&self.kind, &other.kind) {
            (AlgebraKind::Polynomial { names: a }, AlgebraKind::Polynomial { names: b }) => a == b,
            (AlgebraKind::CyclicGroup { order: a, .. }, AlgebraKind::CyclicGroup { order: b, .. }) => a == b,
            (AlgebraKind::IteratedOre { names: a, delta: da }, AlgebraKind::IteratedOre { names: b, delta: db }) => a == b && da == db,
            (AlgebraKind::TwistedProduct { twist: a, .. }, AlgebraKind::TwistedProduct { twist: b, .. }) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    /// Number of entries in a monomial's exponent vector.
    pub fn arity(&self) -> usize {
        match &self.kind {
            AlgebraKind::Polynomial { names } | AlgebraKind::IteratedOre { names, .. } => names.len(),
            AlgebraKind::CyclicGroup { .. } => 1,
            AlgebraKind::TwistedProduct { left, right, .. } => left.arity() + right.arity(),
        }
    }

    pub fn generator_names(&self) -> Vec<String> {
        match &self.kind {
            AlgebraKind::Polynomial { names } | AlgebraKind::IteratedOre { names, .. } => names.clone(),
            AlgebraKind::CyclicGroup { name, .. } => vec![name.clone()],
            AlgebraKind::TwistedProduct { left, right, .. } => {
                let mut v = left.generator_names();
                v.extend(right.generator_names());
                v
            }
        }
    }

    pub fn generator_count(&self) -> usize {
        self.generator_names().len()
    }

    pub fn one_mono(&self) -> Monomial {
        Monomial::one(self.arity())
    }

    pub fn one(&self) -> Element {
        Lin::basis(self.field, self.one_mono())
    }

    pub fn scalar(&self, c: Scalar) -> Element {
        Lin::term(self.field, self.one_mono(), c)
    }

    /// Monomial of the `i`-th generator (0-based, in `generator_names` order).
    pub fn generator_mono(&self, i: usize) -> Monomial {
        match &self.kind {
            AlgebraKind::Polynomial { .. } | AlgebraKind::IteratedOre { .. } => {
                let mut m = self.one_mono();
                m.0[i] = 1;
                m
            }
            AlgebraKind::CyclicGroup { order, .. } => Monomial(vec![1 % order]),
            AlgebraKind::TwistedProduct { left, right, .. } => {
                let ng = left.generator_count();
                if i < ng {
                    Monomial::concat(&left.generator_mono(i), &right.one_mono())
                } else {
                    Monomial::concat(&left.one_mono(), &right.generator_mono(i - ng))
                }
            }
        }
    }

    pub fn generator(&self, i: usize) -> Element {
        Lin::basis(self.field, self.generator_mono(i))
    }

    /// Writes a non-unit monomial as `generator(i) · rest`, with the product already in normal form.
    pub fn split_first(&self, m: &Monomial) -> Option<(usize, Monomial)> {
        match &self.kind {
            AlgebraKind::Polynomial { .. } | AlgebraKind::IteratedOre { .. } => {
                let i = m.0.iter().position(|&e| e > 0)?;
                let mut rest = m.clone();
                rest.0[i] -= 1;
                Some((i, rest))
            }
            AlgebraKind::CyclicGroup { .. } => (m.0[0] > 0).then(|| (0, Monomial(vec![m.0[0] - 1]))),
            AlgebraKind::TwistedProduct { left, right, .. } => {
                let (a, b) = m.split(left.arity());
                if let Some((g, rest)) = left.split_first(&a) {
                    Some((g, Monomial::concat(&rest, &b)))
                } else {
                    let (g, rest) = right.split_first(&b)?;
                    Some((left.generator_count() + g, Monomial::concat(&a, &rest)))
                }
            }
        }
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generator_names().iter().position(|n| n == name)
    }

    pub fn is_valid(&self, m: &Monomial) -> bool {
        if m.0.len() != self.arity() {
            return false;
        }
        match &self.kind {
            AlgebraKind::CyclicGroup { order, .. } => m.0[0] < *order,
            AlgebraKind::TwistedProduct { left, right, .. } => {
                let (a, b) = m.split(left.arity());
                left.is_valid(&a) && right.is_valid(&b)
            }
            _ => true,
        }
    }

    pub fn check(&self, a: &Element) -> Result<(), Error> {
        if a.field() != self.field {
            return Err(Error::SpecMismatch(format!("element over {} used in {}", a.field(), self.name)));
        }
        match a.keys().find(|m| !self.is_valid(m)) {
            Some(m) => Err(Error::SpecMismatch(format!("monomial {m:?} does not belong to {}", self.name))),
            None => Ok(()),
        }
    }

    pub fn mono_degree(&self, m: &Monomial) -> FiltrationDegree {
        match &self.kind {
            AlgebraKind::CyclicGroup { .. } => 0,
            AlgebraKind::TwistedProduct { left, right, .. } => {
                let (a, b) = m.split(left.arity());
                left.mono_degree(&a) + right.mono_degree(&b)
            }
            _ => m.0.iter().sum(),
        }
    }

    pub fn filtration_degree(&self, a: &Element) -> Result<FiltrationDegree, Error> {
        a.keys().map(|m| self.mono_degree(m)).max().ok_or_else(|| Error::ZeroElement("filtration degree of 0 is undefined".into()))
    }

    /// Augmentation `ε`: generators of polynomial/Ore parts go to 0, group elements to 1.
    pub fn counit_mono(&self, m: &Monomial) -> bool {
        match &self.kind {
            AlgebraKind::CyclicGroup { .. } => true,
            AlgebraKind::TwistedProduct { left, right, .. } => {
                let (a, b) = m.split(left.arity());
                left.counit_mono(&a) && right.counit_mono(&b)
            }
            _ => m.is_one(),
        }
    }

    pub fn counit(&self, a: &Element) -> Scalar {
        let mut s = self.field.zero();
        for (m, c) in a.iter() {
            if self.counit_mono(m) {
                s += c;
            }
        }
        s
    }

    /// True when multiplication is homogeneous for the filtration degree.
    pub fn is_graded(&self) -> bool {
        match &self.kind {
            AlgebraKind::Polynomial { .. } | AlgebraKind::CyclicGroup { .. } => true,
            AlgebraKind::IteratedOre { delta, .. } => delta.iter().flatten().all(|d| d.is_zero()),
            AlgebraKind::TwistedProduct { left, right, twist } => left.is_graded() && right.is_graded() && twist.is_strongly_graded(),
        }
    }

    /// Ordering key for basis enumeration: degree, then exponents (descending for polynomial
    /// variables, ascending for group powers).
    fn basis_key(&self, m: &Monomial) -> Vec<i64> {
        match &self.kind {
            AlgebraKind::CyclicGroup { .. } => vec![m.0[0] as i64],
            AlgebraKind::TwistedProduct { left, right, .. } => {
                let (a, b) = m.split(left.arity());
                let mut k = left.basis_key(&a)[1..].to_vec();
                k.extend_from_slice(&right.basis_key(&b)[1..]);
                k
            }
            _ => m.0.iter().map(|&e| -(e as i64)).collect(),
        }
        .into_iter()
        .fold(vec![self.mono_degree(m) as i64], |mut acc, x| {
            acc.push(x);
            acc
        })
    }

    /// All monomials of degree `<= n` in a fixed order (degree first).
    pub fn basis_up_to(&self, n: FiltrationDegree) -> Vec<Monomial> {
        let mut out = match &self.kind {
            AlgebraKind::Polynomial { .. } | AlgebraKind::IteratedOre { .. } => {
                exponent_vectors(self.arity(), n).into_iter().map(Monomial).collect()
            }
            AlgebraKind::CyclicGroup { order, .. } => (0..*order).map(|e| Monomial(vec![e])).collect(),
            AlgebraKind::TwistedProduct { left, right, .. } => {
                let mut v = Vec::new();
                for a in left.basis_up_to(n) {
                    let da = left.mono_degree(&a);
                    for b in right.basis_up_to(n - da) {
                        v.push(Monomial::concat(&a, &b));
                    }
                }
                v
            }
        };
        out.sort_by_cached_key(|m| self.basis_key(m));
        out
    }

    /// Monomials of degree exactly `n`.
    pub fn basis_in_degree(&self, n: FiltrationDegree) -> Vec<Monomial> {
        self.basis_up_to(n).into_iter().filter(|m| self.mono_degree(m) == n).collect()
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element, Error> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Unchecked product; callers guarantee both arguments belong to this algebra.
    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut out = Lin::zero(self.field);
        for (m1, c1) in a.iter() {
            for (m2, c2) in b.iter() {
                out.add_scaled(&self.mul_mono(m1, m2), &(c1 * c2));
            }
        }
        out
    }

    pub fn mul_mono(&self, u: &Monomial, v: &Monomial) -> Element {
        if u.is_one() {
            return Lin::basis(self.field, v.clone());
        }
        if v.is_one() {
            return Lin::basis(self.field, u.clone());
        }
        if let Some(hit) = self.mul_cache.lock().unwrap().get(&(u.clone(), v.clone())) {
            return hit.clone();
        }
        let result = match &self.kind {
            AlgebraKind::Polynomial { .. } => Lin::basis(self.field, Monomial(u.0.iter().zip(&v.0).map(|(a, b)| a + b).collect())),
            AlgebraKind::CyclicGroup { order, .. } => Lin::basis(self.field, Monomial(vec![(u.0[0] + v.0[0]) % order])),
            AlgebraKind::IteratedOre { .. } => self.ore_mul(self.arity(), u, v),
            AlgebraKind::TwistedProduct { left, right, twist } => {
                let na = left.arity();
                let (a, b) = u.split(na);
                let (a2, b2) = v.split(na);
                let crossed = twist.apply_mono(&b, &a2);
                let mut out = Lin::zero(self.field);
                for ((a3, b3), c) in crossed.iter() {
                    let left_part = left.mul_mono(&a, a3);
                    let right_part = right.mul_mono(b3, &b2);
                    for (la, lc) in left_part.iter() {
                        for (rb, rc) in right_part.iter() {
                            out.add_term(Monomial::concat(la, rb), &(&(c * lc) * rc));
                        }
                    }
                }
                out
            }
        };
        self.mul_cache.lock().unwrap().insert((u.clone(), v.clone()), result.clone());
        result
    }

    fn ore_delta(&self) -> &Vec<Vec<Element>> {
        match &self.kind {
            AlgebraKind::IteratedOre { delta, .. } => delta,
            _ => unreachable!("ore_delta on non-Ore algebra"),
        }
    }

    /// Product inside the subalgebra generated by the first `k` variables.
    /// `x_k^p · v = Σ_m C(p, m) δ_k^m(v) x_k^{p-m}` since every `σ` is the identity.
    fn ore_mul(&self, k: usize, u: &Monomial, v: &Monomial) -> Element {
        if k == 0 || (u.is_one() && v.is_one()) {
            return Lin::basis(self.field, Monomial::one(self.arity()));
        }
        let var = k - 1;
        let p = u.0[var];
        let q = v.0[var];
        let mut u0 = u.clone();
        u0.0[var] = 0;
        let mut v0 = v.clone();
        v0.0[var] = 0;
        let mut out = Lin::zero(self.field);
        let mut power = Lin::basis(self.field, v0);
        for m in 0..=p {
            if power.is_zero() {
                break;
            }
            let coeff = self.field.int(binom(p, m));
            for (w, c) in power.iter() {
                for (prod, c2) in self.ore_mul(var, &u0, w).iter() {
                    let mut mono = prod.clone();
                    mono.0[var] = p - m + q;
                    out.add_term(mono, &(&(c * c2) * &coeff));
                }
            }
            if m < p {
                power = power.map_linear(|w| self.ore_derivation(var, w));
            }
        }
        out
    }

    /// `δ_{j+1}` applied to a monomial in the first `j` variables, via the Leibniz rule.
    pub(crate) fn ore_derivation(&self, j: usize, w: &Monomial) -> Element {
        if w.is_one() {
            return Lin::zero(self.field);
        }
        if let Some(hit) = self.delta_cache.lock().unwrap().get(&(j, w.clone())) {
            return hit.clone();
        }
        let i = w.0.iter().position(|&e| e > 0).unwrap();
        let mut rest = w.clone();
        rest.0[i] -= 1;
        let gen = {
            let mut g = Monomial::one(self.arity());
            g.0[i] = 1;
            g
        };
        let dx = &self.ore_delta()[j][i];
        let mut out = self.mul(dx, &Lin::basis(self.field, rest.clone()));
        let d_rest = self.ore_derivation(j, &rest);
        out.add(&self.mul(&Lin::basis(self.field, gen), &d_rest));
        self.delta_cache.lock().unwrap().insert((j, w.clone()), out.clone());
        out
    }

    /// Rewrites a word in the generators to PBW normal form.
    pub fn normalize(&self, word: &[usize]) -> Result<Element, Error> {
        self.normalize_counting(word).map(|(e, _)| e)
    }

    /// Like [`Algebra::normalize`], also returning the number of rewrite steps performed.
    pub fn normalize_counting(&self, word: &[usize]) -> Result<(Element, usize), Error> {
        let ng = self.generator_count();
        if let Some(&bad) = word.iter().find(|&&g| g >= ng) {
            return Err(Error::UnknownGenerator(format!("generator index {bad} (algebra has {ng})")));
        }
        match &self.kind {
            AlgebraKind::Polynomial { .. } | AlgebraKind::IteratedOre { .. } => Ok(self.rewrite_words(word)),
            AlgebraKind::CyclicGroup { order, .. } => {
                Ok((Lin::basis(self.field, Monomial(vec![(word.len() as u32) % order])), word.len() / *order as usize))
            }
            AlgebraKind::TwistedProduct { .. } => {
                let mut acc = self.one();
                for &g in word {
                    acc = self.mul(&acc, &self.generator(g));
                }
                Ok((acc, word.len()))
            }
        }
    }

    /// Word rewriting `x_j x_i -> x_i x_j + δ_j(x_i)` (i < j) until every word is sorted.
    fn rewrite_words(&self, word: &[usize]) -> (Element, usize) {
        let t = self.arity();
        let deltas: Option<&Vec<Vec<Element>>> = match &self.kind {
            AlgebraKind::IteratedOre { delta, .. } => Some(delta),
            _ => None,
        };
        let mut pending: Lin<Vec<usize>> = Lin::basis(self.field, word.to_vec());
        let mut done = Lin::zero(self.field);
        let mut steps = 0;
        while !pending.is_zero() {
            let mut next = Lin::zero(self.field);
            for (w, c) in pending.iter() {
                match w.windows(2).position(|p| p[0] > p[1]) {
                    None => {
                        let mut e = vec![0u32; t];
                        for &g in w {
                            e[g] += 1;
                        }
                        done.add_term(Monomial(e), c);
                    }
                    Some(pos) => {
                        steps += 1;
                        let (j, i) = (w[pos], w[pos + 1]);
                        let mut swapped = w.clone();
                        swapped.swap(pos, pos + 1);
                        next.add_term(swapped, c);
                        if let Some(d) = deltas {
                            for (m, dc) in d[j][i].iter() {
                                let mut nw = w[..pos].to_vec();
                                if let Some(g) = m.0.iter().position(|&e| e == 1) {
                                    nw.push(g);
                                }
                                nw.extend_from_slice(&w[pos + 2..]);
                                next.add_term(nw, &(c * dc));
                            }
                        }
                    }
                }
            }
            pending = next;
        }
        (done, steps)
    }

    pub fn fmt_mono(&self, m: &Monomial) -> String {
        match &self.kind {
            AlgebraKind::TwistedProduct { left, right, .. } => {
                let (a, b) = m.split(left.arity());
                format!("{}(x){}", left.fmt_mono(&a), right.fmt_mono(&b))
            }
            _ => fmt_mono_names(&self.generator_names(), m),
        }
    }

    pub fn fmt(&self, a: &Element) -> String {
        fmt_lin(a, |m| self.fmt_mono(m))
    }
}

fn fmt_mono_names(names: &[String], m: &Monomial) -> String {
    let parts: Vec<String> =
        m.0.iter().zip(names).filter(|(&e, _)| e > 0).map(|(&e, n)| if e == 1 { n.clone() } else { format!("{n}^{e}") }).collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn fmt_with(names: &[&str], a: &Element) -> String {
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    fmt_lin(a, |m| fmt_mono_names(&names, m))
}

/// Renders `Σ c·m` as `c*m + ...`, with unit coefficients elided.
pub fn fmt_lin<K: Ord + Clone>(a: &Lin<K>, mono: impl Fn(&K) -> String) -> String {
    if a.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in a.iter().enumerate() {
        let ms = mono(m);
        let neg = c.is_negative();
        let abs = if neg { -c } else { c.clone() };
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if abs.is_one() {
            s.push_str(&ms);
        } else if ms == "1" {
            s.push_str(&abs.to_string());
        } else {
            s.push_str(&format!("{abs}*{ms}"));
        }
    }
    s
}

/// Exponent vectors of length `t` with total degree `<= n`.
pub(crate) fn exponent_vectors(t: usize, n: u32) -> Vec<Vec<u32>> {
    fn rec(t: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(t, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(t, n, &mut Vec::new(), &mut out);
    out
}

/// Sorts monomials by (degree, exponents descending); used by callers that build ad hoc bases.
pub fn degree_lex_key(deg: u32, m: &Monomial) -> (u32, Reverse<Monomial>) {
    (deg, Reverse(m.clone()))
}
