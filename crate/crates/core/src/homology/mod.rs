//! Dimensions of derived functors from free resolutions: Hochschild cohomology with
//! coefficients in the algebra, and `Tor`/`Ext` of the trivial module over augmented algebras.
//!
//! For a free bimodule resolution `Λ⊗V_n⊗Λ`, `Hom_{Λ^e}(Λ⊗V_n⊗Λ, Λ) = Hom(V_n, Λ)`: a cochain
//! assigns an algebra element to each label and `(δf)(ℓ) = Σ c·u·f(ℓ')·v` over the terms
//! `c·u⊗ℓ'⊗v` of `d(ℓ)`. A cochain basis vector `(ℓ, m)` has weight `deg m − deg ℓ`; the
//! codifferential never raises weight on non-raising complexes and preserves it on
//! homogeneous ones.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::Monomial;
use crate::complex::{submatrix, Augmentation, ChainComplexSpec, ModuleSide};
use crate::kernel::{rank, SparseMatrix};
use crate::Error;


#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    /// Graded input: every reported weight slice is computed exactly.
    Exact,
    /// Filtered input: the windowed dimension agreed at cutoffs `N` and `N + 2`.
    Stable,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightRow {
    pub n: usize,
    /// `deg(coefficient) − deg(label)`.
    pub weight: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HochschildReport {
    pub algebra: String,
    pub graded: bool,
    pub cutoff: u32,
    /// Total dimension per cohomological degree (over the computed weights when graded).
    pub dims: Vec<usize>,
    pub flags: Vec<Stability>,
    /// Filtered inputs: the dimensions at cutoff `N + 2`.
    pub check_dims: Option<Vec<usize>>,
    /// Graded inputs: dimensions per weight.
    pub table: Vec<WeightRow>,
}

impl HochschildReport {
    pub fn stable(&self) -> bool {
        self.flags.iter().all(|f| *f != Stability::Unstable)
    }
}

type CochainKey = (usize, Monomial);

fn cochain_basis(c: &ChainComplexSpec, n: usize, keep: impl Fn(i64) -> bool, max_coeff: u32) -> Vec<CochainKey> {
    let alg = &c.algebra;
    let mut out = Vec::new();
    for k in 0..c.terms[n].rank() {
        let dl = c.terms[n].degree(k) as i64;
        for m in alg.basis_up_to(max_coeff) {
            if keep(alg.mono_degree(&m) as i64 - dl) {
                out.push((k, m));
            }
        }
    }
    out
}

fn weight(c: &ChainComplexSpec, n: usize, key: &CochainKey) -> i64 {
    c.algebra.mono_degree(&key.1) as i64 - c.terms[n].degree(key.0) as i64
}

/// `δ^n: C^n → C^{n+1}` on the given bases.
fn codifferential(c: &ChainComplexSpec, n: usize, src: &[CochainKey], dst: &[CochainKey]) -> Result<SparseMatrix, Error> {
    let alg = &c.algebra;
    let field = c.field();
    let index: HashMap<&CochainKey, usize> = dst.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut by_label: HashMap<usize, Vec<(usize, Monomial, Monomial, crate::kernel::Scalar)>> = HashMap::new();
    for (k, img) in c.differentials[n + 1].iter().enumerate() {
        for ((u, g, v), coef) in img.iter() {
            by_label.entry(*g).or_default().push((k, u.clone(), v.clone(), coef.clone()));
        }
    }
    let mut m = SparseMatrix::zero(field, dst.len(), src.len());
    for (col, (g, mono)) in src.iter().enumerate() {
        let Some(terms) = by_label.get(g) else { continue };
        for (k, u, v, coef) in terms {
            let left = alg.mul_mono(u, mono);
            for (lm, c1) in left.iter() {
                for (p, c2) in alg.mul_mono(lm, v).iter() {
                    let row = *index.get(&(*k, p.clone())).ok_or_else(|| {
                        Error::DegreeRaising(format!("{}: codifferential leaves the truncation in degree {}", c.name, n + 1))
                    })?;
                    m.add_entry(row, col, &(&(coef * c1) * c2));
                }
            }
        }
    }
    Ok(m)
}

fn require_bimodule_resolution(c: &ChainComplexSpec) -> Result<(), Error> {
    if c.side != ModuleSide::Bimodule || c.augmentation != Augmentation::Multiplication {
        return Err(Error::SpecMismatch(format!("{}: Hochschild cohomology needs a bimodule resolution of the algebra", c.name)));
    }
    c.validate()?;
    if c.max_shift().unwrap_or(0) > 0 {
        return Err(Error::DegreeRaising(format!("{}: a differential raises degree", c.name)));
    }
    Ok(())
}

/// Highest cohomological degree whose neighbours are all present.
fn top_degree(c: &ChainComplexSpec, n_max: usize) -> usize {
    let top = if c.complete { c.n_max() } else { c.n_max().saturating_sub(1) };
    top.min(n_max)
}

fn max_label_degree(c: &ChainComplexSpec, n: usize) -> u32 {
    if n >= c.terms.len() {
        return 0;
    }
    (0..c.terms[n].rank()).map(|k| c.terms[n].degree(k)).max().unwrap_or(0)
}

/// `HH^n(Λ, Λ)` for `n <= n_max` from a bimodule resolution of `Λ`.
///
/// Homogeneous resolutions are split by weight, and each weight slice whose cochains (in degrees
/// `n−1..n+1`) all have coefficient degree `<= N` is computed exactly. Filtered resolutions get
/// the dimension of cohomology classes of weight `<= N − 2`, with coboundaries taken from the
/// weight `<= N` truncation; the computation is repeated at `N + 2` and flagged stable when both
/// agree.
pub fn hochschild_cohomology(c: &ChainComplexSpec, n_max: usize, n_cut: u32) -> Result<HochschildReport, Error> {
    require_bimodule_resolution(c)?;
    let top = top_degree(c, n_max);
    if c.is_homogeneous() {
        graded_hochschild(c, top, n_cut)
    } else {
        let a = filtered_dims(c, top, n_cut)?;
        let b = filtered_dims(c, top, n_cut + 2)?;
        let flags = a.iter().zip(&b).map(|(x, y)| if x == y { Stability::Stable } else { Stability::Unstable }).collect();
        Ok(HochschildReport {
            algebra: c.algebra.name().to_string(),
            graded: false,
            cutoff: n_cut,
            dims: a,
            flags,
            check_dims: Some(b),
            table: Vec::new(),
        })
    }
}

fn graded_hochschild(c: &ChainComplexSpec, top: usize, n_cut: u32) -> Result<HochschildReport, Error> {
    let mut table = Vec::new();
    let mut dims = Vec::new();
    for n in 0..=top {
        let lo = -(max_label_degree(c, n) as i64);
        // every label of degrees n−1..n+1 must fit with coefficient degree `w + deg ℓ <= N`
        let reach = (n.saturating_sub(1)..=n + 1).map(|k| max_label_degree(c, k)).max().unwrap_or(0);
        let hi = n_cut as i64 - reach as i64;
        let mut total = 0;
        for w in lo..=hi {
            let at = |k: usize| cochain_basis(c, k, |x| x == w, n_cut);
            let cur = at(n);
            if cur.is_empty() {
                continue;
            }
            let out_rank = if n + 1 < c.terms.len() { rank(&codifferential(c, n, &cur, &at(n + 1))?) } else { 0 };
            let in_rank = if n > 0 { rank(&codifferential(c, n - 1, &at(n - 1), &cur)?) } else { 0 };
            let dim = cur.len() - out_rank - in_rank;
            total += dim;
            table.push(WeightRow { n, weight: w, dim });
        }
        dims.push(total);
    }
    Ok(HochschildReport {
        algebra: c.algebra.name().to_string(),
        graded: true,
        cutoff: n_cut,
        dims,
        flags: vec![Stability::Exact; top + 1],
        check_dims: None,
        table,
    })
}

/// Windowed dimensions: classes of weight `<= N − 2`, coboundaries from weight `<= N`.
fn filtered_dims(c: &ChainComplexSpec, top: usize, n_cut: u32) -> Result<Vec<usize>, Error> {
    let window = n_cut as i64 - 2;
    let big = n_cut as i64;
    let coeff = |n: usize, w: i64| (w + max_label_degree(c, n) as i64).max(0) as u32;
    let mut dims = Vec::new();
    for n in 0..=top {
        let small_n = cochain_basis(c, n, |x| x <= window, coeff(n, window));
        let out_rank = if n + 1 < c.terms.len() {
            let dst = cochain_basis(c, n + 1, |x| x <= big, coeff(n + 1, big));
            rank(&codifferential(c, n, &small_n, &dst)?)
        } else {
            0
        };
        let boundary_in_window = if n > 0 {
            let src = cochain_basis(c, n - 1, |x| x <= big, coeff(n - 1, big));
            let dst = cochain_basis(c, n, |x| x <= big, coeff(n, big));
            let m = codifferential(c, n - 1, &src, &dst)?;
            let outside: Vec<usize> = (0..dst.len()).filter(|&i| weight(c, n, &dst[i]) > window).collect();
            let all: Vec<usize> = (0..src.len()).collect();
            rank(&m) - rank(&submatrix(&m, &outside, &all))
        } else {
            0
        };
        dims.push(small_n.len() - out_rank - boundary_in_window);
    }
    Ok(dims)
}

fn require_trivial_resolution(c: &ChainComplexSpec) -> Result<(), Error> {
    if c.side != ModuleSide::Left || c.augmentation != Augmentation::Counit {
        return Err(Error::SpecMismatch(format!("{}: expected a one-sided resolution of the trivial module", c.name)));
    }
    c.validate()
}

/// `k⊗_Λ d_n` as a matrix `W_n → W_{n−1}`: every coefficient is reduced by `ε`.
fn reduced_differential(c: &ChainComplexSpec, n: usize) -> SparseMatrix {
    let field = c.field();
    let mut m = SparseMatrix::zero(field, c.terms[n - 1].rank(), c.terms[n].rank());
    for (k, img) in c.differentials[n].iter().enumerate() {
        for ((u, g, _), coef) in img.iter() {
            if c.algebra.counit_mono(u) {
                m.add_entry(*g, k, coef);
            }
        }
    }
    m
}

/// `dim Tor_n^Λ(k, k)` for `n <= n_max`.
pub fn tor_over_augmented(c: &ChainComplexSpec, n_max: usize) -> Result<Vec<usize>, Error> {
    require_trivial_resolution(c)?;
    let top = top_degree(c, n_max);
    let ranks: Vec<usize> = (0..c.terms.len()).map(|n| if n == 0 { 0 } else { rank(&reduced_differential(c, n)) }).collect();
    Ok((0..=top)
        .map(|n| {
            let out = ranks[n];
            let inc = if n + 1 < c.terms.len() { ranks[n + 1] } else { 0 };
            c.terms[n].rank() - out - inc
        })
        .collect())
}

/// `dim Ext^n_Λ(k, k)` for `n <= n_max`, from the dual (transposed) reduced complex.
pub fn ext_over_augmented(c: &ChainComplexSpec, n_max: usize) -> Result<Vec<usize>, Error> {
    require_trivial_resolution(c)?;
    let top = top_degree(c, n_max);
    // δ^n = (k⊗d_{n+1})^T : W_n^* → W_{n+1}^*
    let co: Vec<SparseMatrix> = (0..c.terms.len() - 1).map(|n| reduced_differential(c, n + 1).transpose()).collect();
    Ok((0..=top)
        .map(|n| {
            let out = co.get(n).map_or(0, rank);
            let inc = if n > 0 { rank(&co[n - 1]) } else { 0 };
            c.terms[n].rank() - out - inc
        })
        .collect())
}
