//! Builders for the bar, reduced bar, Koszul, periodic and iterated-Ore Koszul resolutions.

use std::sync::Arc;

use crate::algebra::{Algebra, AlgebraKind, Element, Monomial};
use crate::complex::{
    exactness_report, Augmentation, ChainComplexSpec, ExactnessReport, FreeModuleTerm, Key, Label, ModuleElement, ModuleSide,
};
use crate::kernel::Field;
use crate::lin::Lin;
use crate::Error;

mod lifts;
#[cfg(test)]
mod tests;

pub use lifts::{check_lift, cross_check_symmetrization, lift_twist, sigma_delta_chain_maps, LiftReport, LiftSide, SigmaDelta, TwistLift};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Bar,
    ReducedBar,
    PolyKoszul,
    CyclicPeriodic,
    OreKoszul,
    OneSidedKoszul,
    /// Flattened total complex of a twisted product.
    TwistedProduct,
}

/// What the complex resolves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolved {
    /// The algebra as a bimodule over itself.
    Algebra,
    /// The trivial left module `k`.
    Trivial,
}

#[derive(Clone)]
pub struct ResolutionBundle {
    pub complex: ChainComplexSpec,
    pub family: Family,
    pub resolved: Resolved,
    pub lift: Option<TwistLift>,
    /// Bar families only: the largest enumerated label degree.
    pub label_cutoff: Option<u32>,
}

impl std::fmt::Debug for ResolutionBundle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ResolutionBundle")
            .field("complex", &self.complex)
            .field("family", &self.family)
            .field("lift", &self.lift.as_ref().map(|l| l.side()))
            .finish()
    }
}

impl ResolutionBundle {
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.complex.algebra
    }

    /// Rejects cutoffs that would need labels beyond the enumerated ones.
    pub fn check_cutoff(&self, n_cut: u32) -> Result<(), Error> {
        match self.label_cutoff {
            Some(c) if n_cut > c => Err(Error::CutoffTooSmall(format!(
                "{}: truncation at {n_cut} needs bar labels beyond the enumerated degree {c}",
                self.complex.name
            ))),
            _ => Ok(()),
        }
    }

    pub fn exactness(&self, n_cut: u32) -> Result<ExactnessReport, Error> {
        self.check_cutoff(n_cut)?;
        exactness_report(&self.complex, n_cut)
    }
}

/// Index subsets of `{0..t}` of size `n` in lexicographic order.
pub fn combinations(t: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, t: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..t {
            cur.push(i);
            rec(i + 1, t, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, t, n, &mut Vec::new(), &mut out);
    out
}

/// Sorts a wedge word; `None` if an index repeats, otherwise the sorted word and the sign.
pub fn sort_wedge(mut v: Vec<usize>) -> Option<(Vec<usize>, bool)> {
    let mut negative = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            negative = !negative;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, negative))
}

/// The `δ` table of an iterated Ore extension (`table[j][i] = δ_j(x_i)`); empty rows for
/// polynomial algebras.
pub(crate) fn delta_table(alg: &Algebra) -> Result<Vec<Vec<Element>>, Error> {
    match alg.kind() {
        AlgebraKind::Polynomial { names } => Ok(names.iter().enumerate().map(|(j, _)| vec![Lin::zero(alg.field()); j]).collect()),
        AlgebraKind::IteratedOre { delta, .. } => Ok(delta.clone()),
        _ => Err(Error::SpecMismatch(format!("{} is not a polynomial or iterated Ore algebra", alg.name()))),
    }
}

/// Linear part `Σ c_k x_k` of an element, as `(k, c)` pairs.
pub(crate) fn linear_part(alg: &Algebra, e: &Element) -> Vec<(usize, crate::kernel::Scalar)> {
    let mut out = Vec::new();
    for (m, c) in e.iter() {
        if alg.mono_degree(m) == 1 {
            let k = m.0.iter().position(|&x| x == 1).unwrap();
            out.push((k, c.clone()));
        }
    }
    out
}

fn wedge_terms(t: usize, n_max: usize, side: ModuleSide) -> Result<Vec<FreeModuleTerm>, Error> {
    (0..=n_max.min(t))
        .map(|n| FreeModuleTerm::new(side, combinations(t, n).into_iter().map(|l| (Label::Wedge(l), n as u32)).collect()))
        .collect()
}

/// Koszul-type resolution of a polynomial or iterated Ore algebra, with the `δ̄` double sum.
fn koszul(alg: &Arc<Algebra>, side: ModuleSide) -> Result<ChainComplexSpec, Error> {
    let t = alg.generator_count();
    let delta = delta_table(alg)?;
    let field = alg.field();
    let terms = wedge_terms(t, t, side)?;
    let one = alg.one_mono();
    let mut diffs: Vec<Vec<ModuleElement>> = vec![vec![]];
    for n in 1..=t {
        let mut row = Vec::new();
        for lab in terms[n].labels() {
            let Label::Wedge(l) = lab else { unreachable!() };
            let mut img = Lin::zero(field);
            for i in 0..n {
                let sign = if i % 2 == 0 { field.one() } else { field.int(-1) };
                let mut rest = l.clone();
                let xi = rest.remove(i);
                let k = terms[n - 1].position(&Label::Wedge(rest)).unwrap();
                let g = alg.generator_mono(xi);
                img.add_term((g.clone(), k, one.clone()), &sign);
                if side == ModuleSide::Bimodule {
                    img.add_term((one.clone(), k, g), &-&sign);
                }
            }
            for j in 0..n {
                for i in 0..j {
                    let d = delta.get(l[j]).and_then(|r| r.get(l[i])).cloned().unwrap_or_else(|| Lin::zero(field));
                    for (x, c) in linear_part(alg, &d) {
                        let mut w = l.clone();
                        w[i] = x;
                        w.remove(j);
                        let Some((w, neg)) = sort_wedge(w) else { continue };
                        let k = terms[n - 1].position(&Label::Wedge(w)).unwrap();
                        // (−1)^j with 1-based j, times the re-sorting sign
                        let positive = ((j + 1) % 2 == 0) ^ neg;
                        let s = if positive { c.clone() } else { -&c };
                        img.add_term((one.clone(), k, one.clone()), &s);
                    }
                }
            }
            row.push(img);
        }
        diffs.push(row);
    }
    Ok(ChainComplexSpec {
        name: format!("koszul({})", alg.name()),
        algebra: alg.clone(),
        side,
        terms,
        differentials: diffs,
        augmentation: if side == ModuleSide::Bimodule { Augmentation::Multiplication } else { Augmentation::Counit },
        complete: true,
    })
}

/// `A⊗Λ^n V⊗A` (or `A⊗Λ^n V`) for a polynomial algebra.
pub fn poly_koszul(alg: &Arc<Algebra>, bimodule: bool) -> Result<ResolutionBundle, Error> {
    if !matches!(alg.kind(), AlgebraKind::Polynomial { .. }) {
        return Err(Error::SpecMismatch(format!("{} is not a polynomial algebra", alg.name())));
    }
    let side = if bimodule { ModuleSide::Bimodule } else { ModuleSide::Left };
    let complex = koszul(alg, side)?;
    Ok(ResolutionBundle {
        complex,
        family: if bimodule { Family::PolyKoszul } else { Family::OneSidedKoszul },
        resolved: if bimodule { Resolved::Algebra } else { Resolved::Trivial },
        lift: None,
        label_cutoff: None,
    })
}

/// Bimodule Koszul resolution of an iterated Ore extension.
pub fn ore_koszul(alg: &Arc<Algebra>) -> Result<ResolutionBundle, Error> {
    if !matches!(alg.kind(), AlgebraKind::IteratedOre { .. } | AlgebraKind::Polynomial { .. }) {
        return Err(Error::SpecMismatch(format!("{} is not an iterated Ore extension", alg.name())));
    }
    let complex = koszul(alg, ModuleSide::Bimodule)?;
    Ok(ResolutionBundle { complex, family: Family::OreKoszul, resolved: Resolved::Algebra, lift: None, label_cutoff: None })
}

/// One-sided resolution of `k` over a polynomial or iterated Ore algebra (for Lie algebras
/// presented as iterated Ore extensions this is the Chevalley–Eilenberg resolution).
pub fn one_sided_koszul(alg: &Arc<Algebra>) -> Result<ResolutionBundle, Error> {
    for row in delta_table(alg)? {
        for d in row {
            if !alg.counit(&d).is_zero() {
                return Err(Error::Augmentation(format!("{}: the trivial module does not exist (δ has a constant term)", alg.name())));
            }
        }
    }
    let complex = koszul(alg, ModuleSide::Left)?;
    Ok(ResolutionBundle { complex, family: Family::OneSidedKoszul, resolved: Resolved::Trivial, lift: None, label_cutoff: None })
}

/// `0 → k[x] --x·--> k[x] --ε--> k → 0`.
pub fn one_sided_koszul_kx(field: Field, name: &str) -> ResolutionBundle {
    let alg = Algebra::polynomial(field, &[name]);
    let mut b = one_sided_koszul(&alg).unwrap();
    b.complex.name = format!("koszul_1({})", alg.name());
    b
}

/// The 2-periodic resolution of `kZ/p`: `d_odd = γ = g⊗1 − 1⊗g`, `d_even = η = Σ g^{p−1−k}⊗g^k`.
pub fn cyclic_periodic(field: Field, p: u32, n_max: usize) -> Result<ResolutionBundle, Error> {
    if p < 2 {
        return Err(Error::Validation(format!("cyclic group order must be at least 2 (got {p})")));
    }
    let alg = Algebra::cyclic_group(field, p)?;
    let g = |e: u32| Monomial(vec![e % p]);
    let mut gamma = Lin::basis(field, (g(1), 0, g(0)));
    gamma.add_term((g(0), 0, g(1)), &field.int(-1));
    let mut eta = Lin::zero(field);
    for k in 0..p {
        eta.add_term((g(p - 1 - k), 0, g(k)), &field.one());
    }
    let terms = (0..=n_max).map(|_| FreeModuleTerm::new(ModuleSide::Bimodule, vec![(Label::Unit, 0)])).collect::<Result<Vec<_>, _>>()?;
    let mut diffs = vec![vec![]];
    for n in 1..=n_max {
        diffs.push(vec![if n % 2 == 1 { gamma.clone() } else { eta.clone() }]);
    }
    let complex = ChainComplexSpec {
        name: format!("periodic({})", alg.name()),
        algebra: alg,
        side: ModuleSide::Bimodule,
        terms,
        differentials: diffs,
        augmentation: Augmentation::Multiplication,
        complete: false,
    };
    Ok(ResolutionBundle { complex, family: Family::CyclicPeriodic, resolved: Resolved::Algebra, lift: None, label_cutoff: None })
}

/// Middle-factor tuples of length `n` with total degree `<= cutoff` (non-unit factors when
/// `reduced`).
fn bar_labels(alg: &Algebra, n: usize, cutoff: u32, reduced: bool) -> Vec<(Label, u32)> {
    let mut out = Vec::new();
    let basis: Vec<Monomial> = alg.basis_up_to(cutoff).into_iter().filter(|m| !(reduced && m.is_one())).collect();
    fn rec(alg: &Algebra, basis: &[Monomial], n: usize, left: u32, cur: &mut Vec<Monomial>, out: &mut Vec<(Label, u32)>, cutoff: u32) {
        if cur.len() == n {
            out.push((Label::Tensor(cur.clone()), cutoff - left));
            return;
        }
        for m in basis {
            let d = alg.mono_degree(m);
            if d <= left {
                cur.push(m.clone());
                rec(alg, basis, n, left - d, cur, out, cutoff);
                cur.pop();
            }
        }
    }
    rec(alg, &basis, n, cutoff, &mut Vec::new(), &mut out, cutoff);
    out
}

/// Alternating-sum differential of the bar complex on one basis tensor
/// `f_0 ⊗ f_1 ⊗ … ⊗ f_{n+1}`, as a combination of tensors with one factor fewer.
pub(crate) fn bar_boundary(alg: &Algebra, factors: &[Monomial]) -> Lin<Vec<Monomial>> {
    let field = alg.field();
    let mut out = Lin::zero(field);
    for i in 0..factors.len() - 1 {
        let sign = if i % 2 == 0 { field.one() } else { field.int(-1) };
        for (p, c) in alg.mul_mono(&factors[i], &factors[i + 1]).iter() {
            let mut f: Vec<Monomial> = factors[..i].to_vec();
            f.push(p.clone());
            f.extend_from_slice(&factors[i + 2..]);
            out.add_term(f, &(&sign * c));
        }
    }
    out
}

/// Converts a full tensor `u ⊗ a_1 ⊗ … ⊗ a_n ⊗ v` into a key of a bar term (`None` when a
/// reduced middle factor is the unit).
pub(crate) fn bar_key(term: &FreeModuleTerm, factors: &[Monomial], reduced: bool) -> Result<Option<Key>, Error> {
    let n = factors.len();
    let middle = &factors[1..n - 1];
    if reduced && middle.iter().any(|m| m.is_one()) {
        return Ok(None);
    }
    let k = term
        .position(&Label::Tensor(middle.to_vec()))
        .ok_or_else(|| Error::CutoffTooSmall(format!("bar label {middle:?} is beyond the enumerated labels")))?;
    Ok(Some((factors[0].clone(), k, factors[n - 1].clone())))
}

/// The (reduced) bar resolution through `n_max`, with middle labels of total degree `<= cutoff`.
pub fn bar(alg: &Arc<Algebra>, n_max: usize, reduced: bool, cutoff: u32) -> Result<ResolutionBundle, Error> {
    let field = alg.field();
    let terms = (0..=n_max)
        .map(|n| FreeModuleTerm::new(ModuleSide::Bimodule, bar_labels(alg, n, cutoff, reduced)))
        .collect::<Result<Vec<_>, _>>()?;
    let one = alg.one_mono();
    let mut diffs = vec![vec![]];
    for n in 1..=n_max {
        let mut row = Vec::new();
        for lab in terms[n].labels() {
            let Label::Tensor(mid) = lab else { unreachable!() };
            let mut factors = vec![one.clone()];
            factors.extend(mid.iter().cloned());
            factors.push(one.clone());
            let mut img = Lin::zero(field);
            for (f, c) in bar_boundary(alg, &factors).iter() {
                if let Some(key) = bar_key(&terms[n - 1], f, reduced)? {
                    img.add_term(key, c);
                }
            }
            row.push(img);
        }
        diffs.push(row);
    }
    let complex = ChainComplexSpec {
        name: format!("{}bar({})", if reduced { "reduced " } else { "" }, alg.name()),
        algebra: alg.clone(),
        side: ModuleSide::Bimodule,
        terms,
        differentials: diffs,
        augmentation: Augmentation::Multiplication,
        complete: false,
    };
    Ok(ResolutionBundle {
        complex,
        family: if reduced { Family::ReducedBar } else { Family::Bar },
        resolved: Resolved::Algebra,
        lift: None,
        label_cutoff: Some(cutoff),
    })
}
