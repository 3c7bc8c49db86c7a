//! Free (bi)module chain complexes described by basis labels and symbolic differentials.
//!
//! A term in homological degree `n` is `A ⊗ span(labels) ⊗ A` (bimodule) or `A ⊗ span(labels)`
//! (left module). Elements are sparse sums of `(u, label index, v)` triples; for left modules
//! `v` is always the unit monomial. Truncation keeps the triples with
//! `deg u + internal(label) + deg v <= N` and produces exact sparse matrices.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::algebra::{fmt_lin, Algebra, Element, Monomial};
use crate::kernel::{rank, Field, SparseMatrix};
use crate::lin::Lin;
use crate::Error;

#[cfg(test)]
mod tests;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModuleSide {
    Bimodule,
    Left,
}

/// Basis label of a free term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// The single generator of a rank-one term (`A⊗A`, or the periodic terms `kG⊗kG`).
    Unit,
    /// `x_{l_1} ∧ … ∧ x_{l_n}` with `l_1 < … < l_n` (0-based generator indices).
    Wedge(Vec<usize>),
    /// Middle factors `a_1 ⊗ … ⊗ a_n` of a bar term.
    Tensor(Vec<Monomial>),
    /// `P_i(M) ⊗ P_j(N)` generator of a twisted product complex.
    Pair { i: usize, j: usize, left: Box<Label>, right: Box<Label> },
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Unit => write!(f, "1"),
            Label::Wedge(l) => write!(f, "∧{l:?}"),
            Label::Tensor(ms) => write!(f, "⊗{ms:?}"),
            Label::Pair { i, j, left, right } => write!(f, "({i},{j}:{left:?}|{right:?})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FreeModuleTerm {
    pub side: ModuleSide,
    labels: Vec<Label>,
    degrees: Vec<u32>,
    index: BTreeMap<Label, usize>,
}

impl FreeModuleTerm {
    pub fn new(side: ModuleSide, labels: Vec<(Label, u32)>) -> Result<Self, Error> {
        let mut index = BTreeMap::new();
        let mut ls = Vec::with_capacity(labels.len());
        let mut ds = Vec::with_capacity(labels.len());
        for (k, (l, d)) in labels.into_iter().enumerate() {
            if index.insert(l.clone(), k).is_some() {
                return Err(Error::Validation(format!("duplicate label {l:?}")));
            }
            ls.push(l);
            ds.push(d);
        }
        Ok(FreeModuleTerm { side, labels: ls, degrees: ds, index })
    }
    pub fn rank(&self) -> usize {
        self.labels.len()
    }
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }
    pub fn label(&self, k: usize) -> &Label {
        &self.labels[k]
    }
    pub fn degree(&self, k: usize) -> u32 {
        self.degrees[k]
    }
    pub fn position(&self, l: &Label) -> Option<usize> {
        self.index.get(l).copied()
    }
}

/// `(left coefficient, label index, right coefficient)`.
pub type Key = (Monomial, usize, Monomial);
pub type ModuleElement = Lin<Key>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Augmentation {
    /// `A⊗A → A`, `u⊗v ↦ uv` (bimodule resolution of `A`).
    Multiplication,
    /// `A → k`, the counit (one-sided resolution of the trivial module).
    Counit,
    None,
}

#[derive(Clone)]
pub struct ChainComplexSpec {
    pub name: String,
    pub algebra: Arc<Algebra>,
    pub side: ModuleSide,
    pub terms: Vec<FreeModuleTerm>,
    /// `differentials[n][k]` is `d_n` of label `k` of term `n` (empty for `n = 0`).
    pub differentials: Vec<Vec<ModuleElement>>,
    pub augmentation: Augmentation,
    /// Terms above `n_max` are zero (so the top spot's homology is meaningful).
    pub complete: bool,
}

impl fmt::Debug for ChainComplexSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChainComplexSpec")
            .field("name", &self.name)
            .field("ranks", &self.ranks())
            .field("augmentation", &self.augmentation)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposeFailure {
    pub degree: usize,
    pub label: String,
    pub residue: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposeReport {
    pub checked: usize,
    pub failures: Vec<ComposeFailure>,
}

impl ComposeReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Finite matrices of a truncated complex. `matrices[n]` represents `d_n: C_n → C_{n−1}`
/// (rows indexed by `bases[n−1]`); `matrices[0]` is the augmentation into `target`.
#[derive(Clone, Debug)]
pub struct TruncatedComplex {
    pub cutoff: u32,
    pub bases: Vec<Vec<Key>>,
    pub target: Vec<Monomial>,
    pub matrices: Vec<SparseMatrix>,
    /// Total filtration degree of every basis element, parallel to `bases`.
    pub degrees: Vec<Vec<u32>>,
    pub target_degrees: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpotHomology {
    pub degree: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub cutoff: u32,
    /// Largest internal degree whose homology is unaffected by the cut.
    pub window: u32,
    /// Homology of the augmented truncation at each reported spot `n >= 0`.
    pub spots: Vec<SpotHomology>,
    /// Cokernel of the augmentation (0 when it is onto the truncated target).
    pub augmentation_cokernel: usize,
    /// `dim H_0` of the unaugmented truncation versus the truncated target.
    pub h0: usize,
    pub target_dim: usize,
    /// Per-internal-degree homology `(n, d, dim)` when every differential is homogeneous.
    pub graded: Option<Vec<(usize, u32, usize)>>,
}

impl ExactnessReport {
    pub fn passed(&self) -> bool {
        self.augmentation_cokernel == 0 && self.spots.iter().all(|s| s.dim == 0) && self.h0 == self.target_dim
    }
}

impl ChainComplexSpec {
    pub fn field(&self) -> Field {
        self.algebra.field()
    }

    pub fn n_max(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.rank()).collect()
    }

    fn unit(&self) -> Monomial {
        self.algebra.one_mono()
    }

    /// The generator `1⊗label⊗1`.
    pub fn generator(&self, k: usize) -> ModuleElement {
        Lin::basis(self.field(), (self.unit(), k, self.unit()))
    }

    /// `u · (1⊗g⊗1) · v` for a single triple, expanded in normal form.
    pub fn act(&self, u: &Monomial, x: &ModuleElement, v: &Monomial) -> ModuleElement {
        let alg = &self.algebra;
        let mut out = Lin::zero(self.field());
        for ((a, g, b), c) in x.iter() {
            let left = alg.mul_mono(u, a);
            let right = if self.side == ModuleSide::Left { Lin::basis(self.field(), b.clone()) } else { alg.mul_mono(b, v) };
            for (l, c1) in left.iter() {
                for (r, c2) in right.iter() {
                    out.add_term((l.clone(), *g, r.clone()), &(&(c * c1) * c2));
                }
            }
        }
        out
    }

    /// `d_n` applied to an element of term `n` (`n >= 1`).
    pub fn apply_d(&self, n: usize, x: &ModuleElement) -> ModuleElement {
        let mut out = Lin::zero(self.field());
        for ((u, g, v), c) in x.iter() {
            let img = self.act(u, &self.differentials[n][*g], v);
            out.add_scaled(&img, c);
        }
        out
    }

    /// The augmentation of a degree-0 element (`Counit` lands on the empty monomial).
    pub fn augment(&self, x: &ModuleElement) -> Element {
        let field = self.field();
        let mut out = Lin::zero(field);
        for ((u, _, v), c) in x.iter() {
            match self.augmentation {
                Augmentation::Multiplication => out.add_scaled(&self.algebra.mul_mono(u, v), c),
                Augmentation::Counit => {
                    if self.algebra.counit_mono(u) {
                        out.add_term(Monomial(vec![]), c);
                    }
                }
                Augmentation::None => {}
            }
        }
        out
    }

    pub fn fmt_label(&self, n: usize, k: usize) -> String {
        fmt_label_with(&self.algebra, self.terms[n].label(k))
    }

    pub fn fmt_element(&self, n: usize, x: &ModuleElement) -> String {
        let alg = &self.algebra;
        fmt_lin(x, |(u, g, v)| {
            let l = self.fmt_label(n, *g);
            match self.side {
                ModuleSide::Bimodule => format!("{}⊗{}⊗{}", alg.fmt_mono(u), l, alg.fmt_mono(v)),
                ModuleSide::Left => format!("{}⊗{}", alg.fmt_mono(u), l),
            }
        })
    }

    /// Largest `deg(image term) − internal(label)` over every differential (and the
    /// augmentation); `None` when every differential is zero.
    pub fn max_shift(&self) -> Option<i64> {
        let alg = &self.algebra;
        let mut best: Option<i64> = None;
        for n in 1..self.terms.len() {
            for (k, img) in self.differentials[n].iter().enumerate() {
                let src = self.terms[n].degree(k) as i64;
                for (u, g, v) in img.keys() {
                    let d = alg.mono_degree(u) as i64 + self.terms[n - 1].degree(*g) as i64 + alg.mono_degree(v) as i64;
                    best = Some(best.map_or(d - src, |b| b.max(d - src)));
                }
            }
        }
        best
    }

    /// True when every differential term has exactly the degree of its source label.
    pub fn is_homogeneous(&self) -> bool {
        let alg = &self.algebra;
        alg.is_graded()
            && (1..self.terms.len()).all(|n| {
                self.differentials[n].iter().enumerate().all(|(k, img)| {
                    img.keys()
                        .all(|(u, g, v)| alg.mono_degree(u) + self.terms[n - 1].degree(*g) + alg.mono_degree(v) == self.terms[n].degree(k))
                })
            })
    }

    /// Checks the shapes of the differentials against the terms.
    pub fn validate(&self) -> Result<(), Error> {
        if self.differentials.len() != self.terms.len() {
            return Err(Error::DimensionMismatch("one differential list per term is required".into()));
        }
        for n in 1..self.terms.len() {
            if self.differentials[n].len() != self.terms[n].rank() {
                return Err(Error::DimensionMismatch(format!(
                    "d_{n} has {} images for {} labels",
                    self.differentials[n].len(),
                    self.terms[n].rank()
                )));
            }
            for img in &self.differentials[n] {
                for (u, g, v) in img.keys() {
                    if *g >= self.terms[n - 1].rank() || !self.algebra.is_valid(u) || !self.algebra.is_valid(v) {
                        return Err(Error::SpecMismatch(format!("d_{n} image leaves term {}", n - 1)));
                    }
                    if self.side == ModuleSide::Left && !v.is_one() {
                        return Err(Error::SpecMismatch("left-module element with a right coefficient".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn fmt_label_with(alg: &Algebra, l: &Label) -> String {
    let names = alg.generator_names();
    match l {
        Label::Unit => "1".into(),
        Label::Wedge(ix) if ix.is_empty() => "1".into(),
        Label::Wedge(ix) => ix.iter().map(|&i| names.get(i).cloned().unwrap_or_else(|| format!("e{i}"))).collect::<Vec<_>>().join("∧"),
        Label::Tensor(ms) if ms.is_empty() => "1".into(),
        Label::Tensor(ms) => ms.iter().map(|m| format!("[{}]", alg.fmt_mono(m))).collect::<Vec<_>>().join("⊗"),
        Label::Pair { left, right, .. } => format!("({:?}|{:?})", left, right),
    }
}

/// Evaluates `d_{n−1}(d_n(g))` for every label (and `ε(d_1(g))`), reporting nonzero results.
pub fn compose_check(c: &ChainComplexSpec) -> ComposeReport {
    let mut report = ComposeReport { checked: 0, failures: Vec::new() };
    for n in 1..c.terms.len() {
        for k in 0..c.terms[n].rank() {
            report.checked += 1;
            let d = &c.differentials[n][k];
            let residue = if n >= 2 {
                let dd = c.apply_d(n - 1, d);
                (!dd.is_zero()).then(|| c.fmt_element(n - 2, &dd))
            } else if c.augmentation != Augmentation::None {
                let e = c.augment(d);
                (!e.is_zero()).then(|| c.algebra.fmt(&e))
            } else {
                None
            };
            if let Some(residue) = residue {
                report.failures.push(ComposeFailure { degree: n, label: c.fmt_label(n, k), residue });
            }
        }
    }
    report
}

/// Truncates to total filtration degree `<= n_cut`.
pub fn truncate(c: &ChainComplexSpec, n_cut: u32) -> Result<TruncatedComplex, Error> {
    c.validate()?;
    if let Some(s) = c.max_shift() {
        if s > 0 {
            return Err(Error::DegreeRaising(format!("{}: a differential raises degree by {s}", c.name)));
        }
    }
    let alg = &c.algebra;
    let field = c.field();
    let mut bases: Vec<Vec<Key>> = Vec::new();
    let mut degrees: Vec<Vec<u32>> = Vec::new();
    for term in &c.terms {
        let mut basis = Vec::new();
        let mut degs = Vec::new();
        for k in 0..term.rank() {
            let int = term.degree(k);
            if int > n_cut {
                continue;
            }
            let room = n_cut - int;
            for u in alg.basis_up_to(room) {
                let du = alg.mono_degree(&u);
                let rights = match c.side {
                    ModuleSide::Bimodule => alg.basis_up_to(room - du),
                    ModuleSide::Left => vec![alg.one_mono()],
                };
                for v in rights {
                    degs.push(int + du + alg.mono_degree(&v));
                    basis.push((u.clone(), k, v));
                }
            }
        }
        bases.push(basis);
        degrees.push(degs);
    }

    let (target, target_degrees): (Vec<Monomial>, Vec<u32>) = match c.augmentation {
        Augmentation::Multiplication => {
            let t = alg.basis_up_to(n_cut);
            let d = t.iter().map(|m| alg.mono_degree(m)).collect();
            (t, d)
        }
        Augmentation::Counit => (vec![Monomial(vec![])], vec![0]),
        Augmentation::None => (Vec::new(), Vec::new()),
    };

    let mut matrices = Vec::with_capacity(c.terms.len());
    {
        let index: HashMap<&Monomial, usize> = target.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut m = SparseMatrix::zero(field, target.len(), bases[0].len());
        if c.augmentation != Augmentation::None {
            for (col, key) in bases[0].iter().enumerate() {
                let img = c.augment(&Lin::basis(field, key.clone()));
                for (t, v) in img.iter() {
                    let row = *index.get(t).ok_or_else(|| Error::DegreeRaising(format!("{}: augmentation leaves the window", c.name)))?;
                    m.add_entry(row, col, v);
                }
            }
        }
        matrices.push(m);
    }
    for n in 1..c.terms.len() {
        let index: HashMap<&Key, usize> = bases[n - 1].iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut m = SparseMatrix::zero(field, bases[n - 1].len(), bases[n].len());
        for (col, key) in bases[n].iter().enumerate() {
            let img = c.apply_d(n, &Lin::basis(field, key.clone()));
            for (t, v) in img.iter() {
                let row =
                    *index.get(t).ok_or_else(|| Error::DegreeRaising(format!("{}: d_{n} of {:?} leaves the truncation", c.name, key)))?;
                m.add_entry(row, col, v);
            }
        }
        matrices.push(m);
    }
    Ok(TruncatedComplex { cutoff: n_cut, bases, target, matrices, degrees, target_degrees })
}

impl TruncatedComplex {
    /// Checks that consecutive matrices compose to zero.
    pub fn composes_to_zero(&self) -> bool {
        (1..self.matrices.len()).all(|n| self.matrices[n - 1].mul(&self.matrices[n]).is_zero())
    }

    /// Restricts to the basis elements of total degree exactly `d` (differentials are
    /// block diagonal when homogeneous).
    pub fn degree_slice(&self, d: u32) -> TruncatedComplex {
        let pick = |degs: &[u32]| -> Vec<usize> { (0..degs.len()).filter(|&i| degs[i] == d).collect() };
        let tsel = pick(&self.target_degrees);
        let sels: Vec<Vec<usize>> = self.degrees.iter().map(|ds| pick(ds)).collect();
        let mut matrices = Vec::new();
        for n in 0..self.matrices.len() {
            let rows = if n == 0 { &tsel } else { &sels[n - 1] };
            matrices.push(submatrix(&self.matrices[n], rows, &sels[n]));
        }
        TruncatedComplex {
            cutoff: d,
            bases: self.bases.iter().zip(&sels).map(|(b, s)| s.iter().map(|&i| b[i].clone()).collect()).collect(),
            target: tsel.iter().map(|&i| self.target[i].clone()).collect(),
            matrices,
            degrees: sels.iter().map(|s| vec![d; s.len()]).collect(),
            target_degrees: vec![d; tsel.len()],
        }
    }

    /// `(dim H_n for n = 0..=top, cokernel of the augmentation, dim H_0 without augmentation)`.
    fn homology(&self) -> (Vec<usize>, usize, usize) {
        let ranks: Vec<usize> = self.matrices.iter().map(rank).collect();
        let top = self.bases.len();
        let mut dims = Vec::with_capacity(top);
        for n in 0..top {
            let out = ranks[n];
            let inc = if n + 1 < top { ranks[n + 1] } else { 0 };
            dims.push(self.bases[n].len() - out - inc);
        }
        let coker = self.target.len() - ranks[0];
        let h0 = self.bases[0].len() - if top > 1 { ranks[1] } else { 0 };
        (dims, coker, h0)
    }
}

pub fn submatrix(m: &SparseMatrix, rows: &[usize], cols: &[usize]) -> SparseMatrix {
    let rmap: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let cmap: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut out = SparseMatrix::zero(m.field(), rows.len(), cols.len());
    for (r, c, v) in m.triplets() {
        if let (Some(&i), Some(&j)) = (rmap.get(&r), cmap.get(&c)) {
            out.add_entry(i, j, v);
        }
    }
    out
}

/// Homology of the truncation at cutoff `n_cut`, reported on the faithful window.
pub fn exactness_report(c: &ChainComplexSpec, n_cut: u32) -> Result<ExactnessReport, Error> {
    let tc = truncate(c, n_cut)?;
    if !tc.composes_to_zero() {
        return Err(Error::CompositionNonzero(format!("{}: truncated differentials do not compose to zero", c.name)));
    }
    let shift = c.max_shift().unwrap_or(0).max(0) as u32;
    let window = n_cut.saturating_sub(shift);
    let (dims, coker, h0) = tc.homology();
    let top = if c.complete { c.n_max() } else { c.n_max().saturating_sub(1) };
    let reported = if c.complete || c.n_max() > 0 { top + 1 } else { 0 };
    let spots = (0..reported).map(|n| SpotHomology { degree: n, dim: dims[n] }).collect();
    let graded = c.is_homogeneous().then(|| {
        let mut rows = Vec::new();
        for d in 0..=window {
            let (dd, _, _) = tc.degree_slice(d).homology();
            for (n, &h) in dd.iter().enumerate().take(reported) {
                rows.push((n, d, h));
            }
        }
        rows
    });
    Ok(ExactnessReport { cutoff: n_cut, window, spots, augmentation_cokernel: coker, h0, target_dim: tc.target.len(), graded })
}
