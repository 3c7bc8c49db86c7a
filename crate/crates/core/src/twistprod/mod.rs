//! Twisted tensor products of resolutions: the bicomplex `X_{i,j} = P_i(M)⊗P_j(N)`, its total
//! complex over `A⊗_τ B`, and the two-column Ore module resolution.
//!
//! The bicomplex is handled as a plain vector space (keys of both factors side by side); the
//! `A⊗_τ B` action routes `B` leftwards through `P(M)` and `A` rightwards through `P(N)` with the
//! attached lifts. Each total differential is then rewritten in the free basis by a linear solve
//! over the action images of candidate basis elements of bounded degree.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Algebra, Element, Monomial};
use crate::complex::{exactness_report, Augmentation, ChainComplexSpec, FreeModuleTerm, Key, Label, ModuleElement, ModuleSide};
use crate::kernel::{rank, solve_many, SparseMatrix};
use crate::lin::Lin;
use crate::resolutions::{one_sided_koszul_kx, sigma_delta_chain_maps, Family, LiftSide, ResolutionBundle, Resolved, SigmaDelta};
use crate::twist::TwistMap;
use crate::Error;

#[cfg(test)]
mod tests;

/// `(i, key in P_i(M), j, key in P_j(N))`.
pub type XKey = (usize, Key, usize, Key);
pub type XElement = Lin<XKey>;

/// Sign of the vertical differential on `X_{i,j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignRule {
    /// `d = d_i⊗1 + (−1)^i 1⊗d_j`.
    Alternating,
    /// `d = d_i⊗1 + 1⊗d_j` (not a differential; kept for mutation tests).
    Dropped,
}

/// Where a total-complex label comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Source {
    pub i: usize,
    pub j: usize,
    /// Label index in `P_i(M)`.
    pub left: usize,
    /// Label index in `P_j(N)`.
    pub right: usize,
}

#[derive(Clone)]
pub struct TwistedBicomplex {
    pub left: ResolutionBundle,
    pub right: ResolutionBundle,
    pub twist: Arc<TwistMap>,
    pub algebra: Arc<Algebra>,
    pub side: ModuleSide,
    pub signs: SignRule,
    sources: Vec<Vec<Source>>,
}

#[derive(Clone, Debug)]
pub struct TotalComplex {
    pub complex: ChainComplexSpec,
    /// `provenance[n][k]` is the bicomplex cell of label `k` in degree `n`.
    pub provenance: Vec<Vec<Source>>,
}

impl TotalComplex {
    pub fn into_bundle(self, resolved: Resolved) -> ResolutionBundle {
        ResolutionBundle { complex: self.complex, family: Family::TwistedProduct, resolved, lift: None, label_cutoff: None }
    }
}

fn same_twist(a: &Arc<TwistMap>, b: &Arc<TwistMap>) -> bool {
    Arc::ptr_eq(a, b)
}

fn require_lift(b: &ResolutionBundle, t: &Arc<TwistMap>, side: LiftSide, what: &str) -> Result<(), Error> {
    match &b.lift {
        Some(l) if l.side() == side && same_twist(&l.twist, t) => Ok(()),
        Some(l) if l.side() != side => Err(Error::MissingLift(format!("{what}: the attached lift is on the wrong side"))),
        Some(_) => Err(Error::MissingLift(format!("{what}: the attached lift belongs to a different twist"))),
        None => Err(Error::MissingLift(format!("{what}: no lift of '{}' attached to {}", t.name(), b.complex.name))),
    }
}

impl TwistedBicomplex {
    /// Checks the factors and their lifts. Bimodule products need a left lift on `P(M)` (over
    /// `A`) and a right lift on `P(N)` (over `B`); one-sided products only the former.
    pub fn new(pm: &ResolutionBundle, pn: &ResolutionBundle, t: &Arc<TwistMap>, signs: SignRule) -> Result<Self, Error> {
        let side = pm.complex.side;
        if pn.complex.side != side {
            return Err(Error::SpecMismatch("both factors must be bimodule or both one-sided resolutions".into()));
        }
        if !t.left().same_presentation(&pm.complex.algebra) || !t.right().same_presentation(&pn.complex.algebra) {
            return Err(Error::SpecMismatch(format!(
                "twist '{}' is on {} ⊗ {}, the factors are over {} and {}",
                t.name(),
                t.left().name(),
                t.right().name(),
                pm.complex.algebra.name(),
                pn.complex.algebra.name()
            )));
        }
        require_lift(pm, t, LiftSide::Left, "P(M)")?;
        if side == ModuleSide::Bimodule {
            require_lift(pn, t, LiftSide::Right, "P(N)")?;
        }
        let (nm, nn) = (pm.complex.n_max(), pn.complex.n_max());
        let mut sources = Vec::new();
        for n in 0..=nm + nn {
            let mut cell = Vec::new();
            for i in n.saturating_sub(nn)..=n.min(nm) {
                let j = n - i;
                for left in 0..pm.complex.terms[i].rank() {
                    for right in 0..pn.complex.terms[j].rank() {
                        cell.push(Source { i, j, left, right });
                    }
                }
            }
            sources.push(cell);
        }
        Ok(TwistedBicomplex {
            left: pm.clone(),
            right: pn.clone(),
            twist: t.clone(),
            algebra: Algebra::twisted_product(t.clone()),
            side,
            signs,
            sources,
        })
    }

    fn pm(&self) -> &ChainComplexSpec {
        &self.left.complex
    }

    fn pn(&self) -> &ChainComplexSpec {
        &self.right.complex
    }

    /// Largest total degree whose cells are all present (and meaningful).
    pub fn n_max(&self) -> usize {
        let (nm, nn) = (self.pm().n_max(), self.pn().n_max());
        match (self.pm().complete, self.pn().complete) {
            (true, true) => nm + nn,
            (false, true) => nm,
            (true, false) => nn,
            (false, false) => nm.min(nn),
        }
    }

    pub fn sources(&self, n: usize) -> &[Source] {
        &self.sources[n]
    }

    /// The generator `(1⊗ℓ⊗1)⊗(1⊗ℓ'⊗1)` of a cell.
    pub fn generator(&self, s: Source) -> XElement {
        let (a1, b1) = (self.pm().algebra.one_mono(), self.pn().algebra.one_mono());
        Lin::basis(self.algebra.field(), (s.i, (a1.clone(), s.left, a1), s.j, (b1.clone(), s.right, b1)))
    }

    pub fn key_degree(&self, k: &XKey) -> u32 {
        let (i, (u, g, v), j, (u2, h, v2)) = k;
        let (a, b) = (&self.pm().algebra, &self.pn().algebra);
        a.mono_degree(u)
            + self.pm().terms[*i].degree(*g)
            + a.mono_degree(v)
            + b.mono_degree(u2)
            + self.pn().terms[*j].degree(*h)
            + b.mono_degree(v2)
    }

    fn split(&self, lam: &Monomial) -> (Monomial, Monomial) {
        lam.split(self.twist.left().arity())
    }

    /// `(a⊗b)·(m⊗n) = Σ a·m'⊗b'·n` with `τ_{B,P}(b⊗m) = Σ m'⊗b'`.
    pub fn act_left(&self, lam: &Monomial, x: &XElement) -> Result<XElement, Error> {
        let field = self.algebra.field();
        let (a, b) = self.split(lam);
        let lift = self.left.lift.as_ref().expect("checked in new");
        let (pm, pn) = (self.pm(), self.pn());
        let (a1, b1) = (pm.algebra.one_mono(), pn.algebra.one_mono());
        let mut out = Lin::zero(field);
        for ((i, km, j, kn), c) in x.iter() {
            let moved = if b.is_one() { Lin::basis(field, (km.clone(), b.clone())) } else { lift.left(*i, &b, km)? };
            for ((km2, b2), c2) in moved.iter() {
                let left = pm.act(&a, &Lin::basis(field, km2.clone()), &a1);
                let right = pn.act(b2, &Lin::basis(field, kn.clone()), &b1);
                for (k1, c3) in left.iter() {
                    for (k2, c4) in right.iter() {
                        out.add_term((*i, k1.clone(), *j, k2.clone()), &(&(&(c * c2) * c3) * c4));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(m⊗n)·(a⊗b) = Σ m·a'⊗n'·b` with `τ_{P,A}(n⊗a) = Σ a'⊗n'`.
    pub fn act_right(&self, x: &XElement, lam: &Monomial) -> Result<XElement, Error> {
        let field = self.algebra.field();
        let (a, b) = self.split(lam);
        let lift = self.right.lift.as_ref().ok_or_else(|| Error::MissingLift("P(N) has no right lift".into()))?;
        let (pm, pn) = (self.pm(), self.pn());
        let (a1, b1) = (pm.algebra.one_mono(), pn.algebra.one_mono());
        let mut out = Lin::zero(field);
        for ((i, km, j, kn), c) in x.iter() {
            let moved = if a.is_one() { Lin::basis(field, (a.clone(), kn.clone())) } else { lift.right(*j, kn, &a)? };
            for ((a2, kn2), c2) in moved.iter() {
                let left = pm.act(&a1, &Lin::basis(field, km.clone()), a2);
                let right = pn.act(&b1, &Lin::basis(field, kn2.clone()), &b);
                for (k1, c3) in left.iter() {
                    for (k2, c4) in right.iter() {
                        out.add_term((*i, k1.clone(), *j, k2.clone()), &(&(&(c * c2) * c3) * c4));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `λ·x·λ'` (the right factor is ignored for one-sided products).
    pub fn act(&self, lam: &Monomial, x: &XElement, lam2: &Monomial) -> Result<XElement, Error> {
        let y = self.act_left(lam, x)?;
        if self.side == ModuleSide::Left || lam2.is_one() {
            return Ok(y);
        }
        self.act_right(&y, lam2)
    }

    /// `d_i⊗1`.
    pub fn d_horizontal(&self, x: &XElement) -> XElement {
        let field = self.algebra.field();
        let mut out = Lin::zero(field);
        for ((i, km, j, kn), c) in x.iter() {
            if *i == 0 {
                continue;
            }
            for (k, c2) in self.pm().apply_d(*i, &Lin::basis(field, km.clone())).iter() {
                out.add_term((i - 1, k.clone(), *j, kn.clone()), &(c * c2));
            }
        }
        out
    }

    /// `±1⊗d_j`, signed by the rule.
    pub fn d_vertical(&self, x: &XElement) -> XElement {
        let field = self.algebra.field();
        let mut out = Lin::zero(field);
        for ((i, km, j, kn), c) in x.iter() {
            if *j == 0 {
                continue;
            }
            let neg = self.signs == SignRule::Alternating && i % 2 == 1;
            for (k, c2) in self.pn().apply_d(*j, &Lin::basis(field, kn.clone())).iter() {
                let v = c * c2;
                out.add_term((*i, km.clone(), j - 1, k.clone()), &if neg { -&v } else { v });
            }
        }
        out
    }

    pub fn d(&self, x: &XElement) -> XElement {
        let mut out = self.d_horizontal(x);
        out.add(&self.d_vertical(x));
        out
    }

    /// Rewrites elements of total degree `n` in the free basis `Λ⊗(ℓ⊗ℓ')⊗Λ` (or `Λ⊗(ℓ⊗ℓ')`).
    pub fn express(&self, n: usize, ys: &[XElement]) -> Result<Vec<ModuleElement>, Error> {
        let field = self.algebra.field();
        let alg = &self.algebra;
        let Some(top) = ys.iter().flat_map(|y| y.keys().map(|k| self.key_degree(k))).max() else {
            return Ok(vec![Lin::zero(field); ys.len()]);
        };
        let mut candidates: Vec<Key> = Vec::new();
        let mut images: Vec<XElement> = Vec::new();
        for (k, s) in self.sources[n].iter().enumerate() {
            let dl = self.pm().terms[s.i].degree(s.left) + self.pn().terms[s.j].degree(s.right);
            if dl > top {
                continue;
            }
            let g = self.generator(*s);
            for u in alg.basis_up_to(top - dl) {
                let room = top - dl - alg.mono_degree(&u);
                let rights = match self.side {
                    ModuleSide::Bimodule => alg.basis_up_to(room),
                    ModuleSide::Left => vec![alg.one_mono()],
                };
                for v in rights {
                    images.push(self.act(&u, &g, &v)?);
                    candidates.push((u.clone(), k, v));
                }
            }
        }
        let mut rows: HashMap<XKey, usize> = HashMap::new();
        let mut row_of = |k: &XKey| {
            let next = rows.len();
            *rows.entry(k.clone()).or_insert(next)
        };
        let mut trip = Vec::new();
        for (col, img) in images.iter().enumerate() {
            for (k, c) in img.iter() {
                trip.push((row_of(k), col, c.clone()));
            }
        }
        let rhs: Vec<Vec<(usize, crate::kernel::Scalar)>> =
            ys.iter().map(|y| y.iter().map(|(k, c)| (row_of(k), c.clone())).collect()).collect();
        let mut a = SparseMatrix::zero(field, rows.len(), candidates.len());
        for (r, c, v) in trip {
            a.add_entry(r, c, &v);
        }
        let sols = solve_many(&a, &rhs);
        let mut out = Vec::with_capacity(ys.len());
        for (y, sol) in ys.iter().zip(sols) {
            let Some(x) = sol else {
                return Err(Error::ChainMapFailure(format!(
                    "element with {} terms in total degree {n} is not in the span of the free generators",
                    y.len()
                )));
            };
            let mut e = Lin::zero(field);
            for (cand, c) in candidates.iter().zip(x) {
                if !c.is_zero() {
                    e.add_term(cand.clone(), &c);
                }
            }
            out.push(e);
        }
        Ok(out)
    }

    pub fn label(&self, s: Source) -> Label {
        Label::Pair {
            i: s.i,
            j: s.j,
            left: Box::new(self.pm().terms[s.i].label(s.left).clone()),
            right: Box::new(self.pn().terms[s.j].label(s.right).clone()),
        }
    }

    /// The total complex with differentials in the free basis.
    pub fn total(&self) -> Result<TotalComplex, Error> {
        let n_top = self.n_max();
        let mut terms = Vec::new();
        for n in 0..=n_top {
            let labels = self.sources[n]
                .iter()
                .map(|s| (self.label(*s), self.pm().terms[s.i].degree(s.left) + self.pn().terms[s.j].degree(s.right)))
                .collect();
            terms.push(FreeModuleTerm::new(self.side, labels)?);
        }
        let mut differentials = vec![vec![]];
        for n in 1..=n_top {
            let ys: Vec<XElement> = self.sources[n].iter().map(|s| self.d(&self.generator(*s))).collect();
            differentials.push(self.express(n - 1, &ys)?);
        }
        let augmentation = match (self.pm().augmentation, self.pn().augmentation, self.side) {
            (Augmentation::Multiplication, Augmentation::Multiplication, ModuleSide::Bimodule) => Augmentation::Multiplication,
            (Augmentation::Counit, Augmentation::Counit, ModuleSide::Left) => Augmentation::Counit,
            _ => Augmentation::None,
        };
        let complex = ChainComplexSpec {
            name: format!("{} ⊗τ {}", self.pm().name, self.pn().name),
            algebra: self.algebra.clone(),
            side: self.side,
            terms,
            differentials,
            augmentation,
            complete: self.pm().complete && self.pn().complete,
        };
        Ok(TotalComplex { complex, provenance: self.sources[..=n_top].to_vec() })
    }

    /// Rank of the action map from free-basis elements of degree `<= bound` into cell `(i, j)`,
    /// with the dimensions of both sides; equal numbers witness the free-module identification.
    pub fn free_identification(&self, i: usize, j: usize, bound: u32) -> Result<(usize, usize, usize), Error> {
        let alg = &self.algebra;
        let cell: Vec<Source> = self.sources[i + j].iter().copied().filter(|s| s.i == i && s.j == j).collect();
        let mut images = Vec::new();
        for s in &cell {
            let dl = self.pm().terms[i].degree(s.left) + self.pn().terms[j].degree(s.right);
            if dl > bound {
                continue;
            }
            let g = self.generator(*s);
            for u in alg.basis_up_to(bound - dl) {
                let room = bound - dl - alg.mono_degree(&u);
                let rights = if self.side == ModuleSide::Bimodule { alg.basis_up_to(room) } else { vec![alg.one_mono()] };
                for v in rights {
                    images.push(self.act(&u, &g, &v)?);
                }
            }
        }
        let target = self.cell_dimension(i, j, bound);
        let mut rows: HashMap<XKey, usize> = HashMap::new();
        let mut a = SparseMatrix::zero(alg.field(), 0, 0);
        let mut trip = Vec::new();
        for (col, img) in images.iter().enumerate() {
            for (k, c) in img.iter() {
                let next = rows.len();
                let r = *rows.entry(k.clone()).or_insert(next);
                trip.push((r, col, c.clone()));
            }
        }
        if !images.is_empty() {
            a = SparseMatrix::zero(alg.field(), rows.len(), images.len());
            for (r, c, v) in trip {
                a.add_entry(r, c, &v);
            }
        }
        Ok((rank(&a), images.len(), target))
    }

    /// `dim` of the span of cell keys of degree `<= bound`.
    fn cell_dimension(&self, i: usize, j: usize, bound: u32) -> usize {
        let count = |c: &ChainComplexSpec, n: usize, room: u32| -> Vec<usize> {
            // number of keys of each degree 0..=room
            let mut v = vec![0; room as usize + 1];
            let alg = &c.algebra;
            for k in 0..c.terms[n].rank() {
                let dl = c.terms[n].degree(k);
                if dl > room {
                    continue;
                }
                for u in alg.basis_up_to(room - dl) {
                    let du = alg.mono_degree(&u);
                    if c.side == ModuleSide::Bimodule {
                        for w in alg.basis_up_to(room - dl - du) {
                            v[(dl + du + alg.mono_degree(&w)) as usize] += 1;
                        }
                    } else {
                        v[(dl + du) as usize] += 1;
                    }
                }
            }
            v
        };
        let (l, r) = (count(self.pm(), i, bound), count(self.pn(), j, bound));
        let mut total = 0;
        for (dl, a) in l.iter().enumerate() {
            for (dr, b) in r.iter().enumerate() {
                if dl + dr <= bound as usize {
                    total += a * b;
                }
            }
        }
        total
    }
}

pub fn bimodule_twisted_product(pm: &ResolutionBundle, pn: &ResolutionBundle, t: &Arc<TwistMap>) -> Result<TotalComplex, Error> {
    if pm.complex.side != ModuleSide::Bimodule {
        return Err(Error::SpecMismatch("bimodule_twisted_product needs bimodule resolutions".into()));
    }
    TwistedBicomplex::new(pm, pn, t, SignRule::Alternating)?.total()
}

pub fn one_sided_twisted_product(pm: &ResolutionBundle, pn: &ResolutionBundle, t: &Arc<TwistMap>) -> Result<TotalComplex, Error> {
    if pm.complex.side != ModuleSide::Left {
        return Err(Error::SpecMismatch("one_sided_twisted_product needs left-module resolutions".into()));
    }
    TwistedBicomplex::new(pm, pn, t, SignRule::Alternating)?.total()
}

/// Reads a total complex over `A⊗_τ B` as a complex over `target`, an algebra with the same
/// normal-form monomials and the same products. Labels `(ℓ | ℓ')` of wedge type become
/// `ℓ ∧ ℓ'` (the `B` generators shifted past those of `A`), sorted within each term.
pub fn flatten(tc: &TotalComplex, target: &Arc<Algebra>) -> Result<ChainComplexSpec, Error> {
    let c = &tc.complex;
    let src = &c.algebra;
    if src.arity() != target.arity() || src.generator_names() != target.generator_names() || src.field() != target.field() {
        return Err(Error::SpecMismatch(format!("{} and {} have different generators", src.name(), target.name())));
    }
    let basis = src.basis_up_to(2);
    for u in &basis {
        for v in &basis {
            if src.mul_mono(u, v) != target.mul_mono(u, v) {
                return Err(Error::SpecMismatch(format!(
                    "{} and {} multiply {}·{} differently",
                    src.name(),
                    target.name(),
                    src.fmt_mono(u),
                    src.fmt_mono(v)
                )));
            }
        }
    }
    let crate::algebra::AlgebraKind::TwistedProduct { left, .. } = src.kind() else {
        return Err(Error::SpecMismatch("flatten expects a twisted product complex".into()));
    };
    let shift = left.generator_count();
    let mut terms = Vec::new();
    let mut remap: Vec<Vec<usize>> = Vec::new();
    for term in &c.terms {
        let mut labels = Vec::new();
        for k in 0..term.rank() {
            let Label::Pair { left, right, .. } = term.label(k) else {
                return Err(Error::SpecMismatch("flatten expects pair labels".into()));
            };
            let (Label::Wedge(l), Label::Wedge(r)) = (left.as_ref(), right.as_ref()) else {
                return Err(Error::SpecMismatch("only wedge ⊗ wedge labels flatten".into()));
            };
            let mut w = l.clone();
            w.extend(r.iter().map(|x| x + shift));
            labels.push((Label::Wedge(w), term.degree(k), k));
        }
        labels.sort();
        let mut map = vec![0; labels.len()];
        for (new, (_, _, old)) in labels.iter().enumerate() {
            map[*old] = new;
        }
        remap.push(map);
        terms.push(FreeModuleTerm::new(c.side, labels.into_iter().map(|(l, d, _)| (l, d)).collect())?);
    }
    let mut differentials = vec![vec![]];
    for n in 1..c.terms.len() {
        let mut row = vec![Lin::zero(c.field()); c.terms[n].rank()];
        for (old, img) in c.differentials[n].iter().enumerate() {
            row[remap[n][old]] = img.map_keys(|(u, g, v)| (u.clone(), remap[n - 1][*g], v.clone()));
        }
        differentials.push(row);
    }
    Ok(ChainComplexSpec {
        name: c.name.clone(),
        algebra: target.clone(),
        side: c.side,
        terms,
        differentials,
        augmentation: c.augmentation,
        complete: c.complete,
    })
}

/// `R[x; δ]` with `R` polynomial or iterated Ore, as an iterated Ore extension.
pub fn ore_extension(r: &Arc<Algebra>, delta: &[Element], var: &str) -> Result<Arc<Algebra>, Error> {
    let table = crate::resolutions::delta_table(r)?;
    let t = r.arity();
    let mut names = r.generator_names();
    names.push(var.to_string());
    let pad = |e: &Element| e.map_keys(|m| Monomial::concat(m, &Monomial(vec![0])));
    let mut entries = Vec::new();
    for (j, row) in table.iter().enumerate() {
        for (i, e) in row.iter().enumerate() {
            if !e.is_zero() {
                entries.push((j, i, pad(e)));
            }
        }
    }
    for (i, e) in delta.iter().enumerate() {
        if !e.is_zero() {
            entries.push((t, i, pad(e)));
        }
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Algebra::iterated_ore(r.field(), &refs, entries)
}

/// The two-column resolution of `k` over `R[x; 1, δ]`, with the data behind it.
#[derive(Clone)]
pub struct OreModuleResolution {
    pub sigma_delta: SigmaDelta,
    pub bicomplex: TwistedBicomplex,
    /// Over `R ⊗_τ k[x]`.
    pub total: TotalComplex,
    /// The same complex read over the iterated Ore extension, with wedge labels.
    pub bundle: ResolutionBundle,
}

impl OreModuleResolution {
    /// `x^m⊗z ↦ Σ_k C(m,k) δ̃^k(z)⊗x^{m−k}`: `k[x]⊗P_n → P_n⊗k[x]`.
    pub fn free_form(&self, n: usize, z: &Lin<(u32, Key)>) -> Result<Lin<(Key, u32)>, Error> {
        let lift = self.sigma_delta.bundle.lift.as_ref().expect("sigma_delta attaches a lift");
        let mut out = Lin::zero(z.field());
        for ((m, key), c) in z.iter() {
            for ((k2, b), c2) in lift.left(n, &Monomial(vec![*m]), key)?.iter() {
                out.add_term((k2.clone(), b.0[0]), &(c * c2));
            }
        }
        Ok(out)
    }

    /// `z⊗x^m ↦ Σ_k (−1)^k C(m,k) x^{m−k}⊗δ̃^k(z)`.
    pub fn free_form_inverse(&self, n: usize, z: &Lin<(Key, u32)>) -> Lin<(u32, Key)> {
        let field = z.field();
        let mut out = Lin::zero(field);
        for ((key, m), c) in z.iter() {
            let mut cur: ModuleElement = Lin::basis(field, key.clone());
            let mut binom: i64 = 1;
            for k in 0..=*m {
                let coef = field.int(if k % 2 == 0 { binom } else { -binom });
                for (z2, c2) in cur.iter() {
                    out.add_term((m - k, z2.clone()), &(&(c * c2) * &coef));
                }
                cur = self.sigma_delta.delta_tilde(n, &cur);
                binom = binom * (*m - k) as i64 / (k + 1) as i64;
            }
        }
        out
    }
}

/// Builds the resolution of `k` over `R[x; δ]` from a one-sided wedge resolution of `k` over `R`.
pub fn ore_module_resolution(r_bundle: &ResolutionBundle, delta: Vec<Element>, var: &str) -> Result<OreModuleResolution, Error> {
    let r = r_bundle.complex.algebra.clone();
    let sd = sigma_delta_chain_maps(r_bundle, delta.clone(), var)?;
    let pn = one_sided_koszul_kx(r.field(), var);
    let bicomplex = TwistedBicomplex::new(&sd.bundle, &pn, &sd.twist, SignRule::Alternating)?;
    let total = bicomplex.total()?;
    let target = ore_extension(&r, &delta, var)?;
    let mut flat = flatten(&total, &target)?;
    flat.name = format!("resolution of k over {}", target.name());
    let bundle =
        ResolutionBundle { complex: flat, family: Family::TwistedProduct, resolved: Resolved::Trivial, lift: None, label_cutoff: None };
    Ok(OreModuleResolution { sigma_delta: sd, bicomplex, total, bundle })
}

/// Iterates [`ore_module_resolution`] from `k[x_1]` along a δ-table given per new variable
/// (`steps[s]` lists the images of the earlier generators under the derivation of variable `s+1`).
pub fn iterated_ore_resolution(field: crate::kernel::Field, names: &[&str], steps: &[Vec<Element>]) -> Result<ResolutionBundle, Error> {
    if names.is_empty() || steps.len() + 1 != names.len() {
        return Err(Error::Validation("one derivation list per variable after the first is required".into()));
    }
    let mut bundle = one_sided_koszul_kx(field, names[0]);
    for (s, delta) in steps.iter().enumerate() {
        bundle = ore_module_resolution(&bundle, delta.clone(), names[s + 1])?.bundle;
    }
    Ok(bundle)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KunnethRow {
    pub cutoff: u32,
    pub h0: usize,
    /// `dim (M⊗N)_{<= cutoff}`.
    pub expected: usize,
}

/// `dim H_0` of the truncated total complex against `dim (M⊗N)` of the same truncation, for every
/// cutoff up to `n_cut`.
pub fn kunneth_degree0_check(tc: &TotalComplex, n_cut: u32) -> Result<Vec<KunnethRow>, Error> {
    if tc.complex.augmentation == Augmentation::None {
        return Err(Error::Augmentation("the total complex carries no augmentation".into()));
    }
    let mut rows = Vec::new();
    for cutoff in 0..=n_cut {
        let r = exactness_report(&tc.complex, cutoff)?;
        rows.push(KunnethRow { cutoff, h0: r.h0, expected: r.target_dim });
    }
    Ok(rows)
}

#[derive(Clone, Debug, Default)]
pub struct BicomplexReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl BicomplexReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `d^h∘d^v = −d^v∘d^h` on every cell generator (and on `d_h²`, `d_v²`).
pub fn anticommutation_check(bc: &TwistedBicomplex) -> BicomplexReport {
    let mut rep = BicomplexReport::default();
    for n in 0..bc.sources.len() {
        for s in &bc.sources[n] {
            rep.checked += 1;
            let g = bc.generator(*s);
            let mut sum = bc.d_horizontal(&bc.d_vertical(&g));
            sum.add(&bc.d_vertical(&bc.d_horizontal(&g)));
            if !sum.is_zero() {
                rep.failures.push(format!("cell ({}, {}) label {:?}: d^h d^v + d^v d^h ≠ 0", s.i, s.j, bc.label(*s)));
            }
        }
    }
    rep
}

/// `d(λ·x·λ') = λ·d(x)·λ'` for seeded random monomials `λ, λ'` of degree `<= bound` and cell
/// generators `x`, plus every generator with `λ, λ'` among the algebra generators.
pub fn action_commutes_check(bc: &TwistedBicomplex, bound: u32, samples: usize, seed: u64) -> Result<BicomplexReport, Error> {
    let alg = &bc.algebra;
    let basis = alg.basis_up_to(bound);
    let gens: Vec<Source> = bc.sources.iter().flatten().copied().collect();
    let mut cases: Vec<(Monomial, Source, Monomial)> = Vec::new();
    let one = alg.one_mono();
    let mut small = vec![one.clone()];
    small.extend((0..alg.generator_count()).map(|i| alg.generator_mono(i)));
    for s in &gens {
        for u in &small {
            for v in &small {
                cases.push((u.clone(), *s, v.clone()));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let u = basis[rng.gen_range(0..basis.len())].clone();
        let v = basis[rng.gen_range(0..basis.len())].clone();
        cases.push((u, gens[rng.gen_range(0..gens.len())], v));
    }
    let mut rep = BicomplexReport::default();
    for (u, s, v) in cases {
        let v = if bc.side == ModuleSide::Left { one.clone() } else { v };
        rep.checked += 1;
        let g = bc.generator(s);
        let lhs = bc.d(&bc.act(&u, &g, &v)?);
        let rhs = bc.act(&u, &bc.d(&g), &v)?;
        if lhs != rhs {
            rep.failures.push(format!("{}·{:?}·{}: d does not commute with the action", alg.fmt_mono(&u), bc.label(s), alg.fmt_mono(&v)));
        }
    }
    Ok(rep)
}
