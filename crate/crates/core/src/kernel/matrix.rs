//! Sparse exact matrices and the rank/kernel/homology computations built on them.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::scalar::{Field, Scalar};
use crate::Error;

/// Below this size (in both dimensions) ranks over ℚ use dense Bareiss elimination.
pub const DENSE_LIMIT: usize = 512;

/// A finite matrix over a field stored as nonzero `(row, col, value)` triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMatrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Self {
        SparseMatrix { field, rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = SparseMatrix::zero(field, n, n);
        for i in 0..n {
            m.add_entry(i, i, &field.one());
        }
        m
    }

    /// Builds a matrix from triples, summing duplicates and dropping zeros.
    pub fn from_triplets(field: Field, rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, Scalar)>) -> Self {
        let mut m = SparseMatrix::zero(field, rows, cols);
        for (r, c, v) in triplets {
            m.add_entry(r, c, &v);
        }
        m
    }

    /// Dense constructor from small integers; handy in tests.
    pub fn from_rows(field: Field, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = SparseMatrix::zero(field, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.add_entry(i, j, &field.int(v));
            }
        }
        m
    }

    pub fn add_entry(&mut self, r: usize, c: usize, v: &Scalar) {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of range {}x{}", self.rows, self.cols);
        if v.is_zero() {
            return;
        }
        let slot = self.entries.entry((r, c)).or_insert_with(|| self.field.zero());
        *slot += v;
        if slot.is_zero() {
            self.entries.remove(&(r, c));
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|(&(r, c), v)| ((c, r), v.clone())).collect(),
        }
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut by_row: Vec<Vec<(usize, &Scalar)>> = vec![Vec::new(); rhs.rows];
        for (&(r, c), v) in &rhs.entries {
            by_row[r].push((c, v));
        }
        let mut out = SparseMatrix::zero(self.field, self.rows, rhs.cols);
        for (&(i, k), a) in &self.entries {
            for &(j, b) in &by_row[k] {
                out.add_entry(i, j, &(a * b));
            }
        }
        out
    }

    /// Keeps only the listed rows, renumbered in the given order.
    pub fn select_rows(&self, keep: &[usize]) -> SparseMatrix {
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut out = SparseMatrix::zero(self.field, keep.len(), self.cols);
        for (&(r, c), v) in &self.entries {
            if let Some(&i) = pos.get(&r) {
                out.add_entry(i, c, v);
            }
        }
        out
    }

    fn sparse_rows(&self) -> Vec<Vec<(usize, Scalar)>> {
        let mut rows = vec![Vec::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            rows[r].push((c, v.clone()));
        }
        rows
    }
}

/// Exact rank over the matrix's field.
pub fn rank(m: &SparseMatrix) -> usize {
    if m.is_zero() {
        return 0;
    }
    if m.field.characteristic() == 0 && m.rows <= DENSE_LIMIT && m.cols <= DENSE_LIMIT {
        bareiss_rank(m)
    } else {
        SparseEliminator::new(m.sparse_rows(), m.cols).rank()
    }
}

pub fn kernel_dim(m: &SparseMatrix) -> usize {
    m.cols - rank(m)
}

/// Homology at the middle of `· --d_in--> V --d_out--> ·`.
pub fn homology_dim(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<usize, Error> {
    if d_in.rows != d_out.cols {
        return Err(Error::DimensionMismatch(format!("d_in has {} rows but d_out has {} columns", d_in.rows, d_out.cols)));
    }
    let comp = d_out.mul(d_in);
    if !comp.is_zero() {
        return Err(Error::CompositionNonzero(format!("composite has {} nonzero entries", comp.nnz())));
    }
    Ok(kernel_dim(d_out) - rank(d_in))
}

/// Fraction-free Gaussian elimination on an integer matrix obtained by clearing row denominators.
fn bareiss_rank(m: &SparseMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); m.cols]; m.rows];
    for (i, row) in m.sparse_rows().into_iter().enumerate() {
        let lcm = row.iter().fold(BigInt::one(), |l, (_, v)| l.lcm(&v.to_ratio().1));
        for (j, v) in row {
            let (n, d) = v.to_ratio();
            a[i][j] = n * (&lcm / d);
        }
    }
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = BigInt::one();
    let mut r = 0;
    for k in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][k].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in k + 1..cols {
                let t = &a[r][k] * &a[i][j] - &a[i][k] * &a[r][j];
                let (q, rem) = t.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division not exact");
                a[i][j] = q;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[r][k].clone();
        r += 1;
    }
    r
}

/// Sparse elimination with a Markowitz-style pivot choice (shortest row, then sparsest column).
struct SparseEliminator {
    rows: Vec<BTreeMap<usize, Scalar>>,
    col_rows: Vec<BTreeSet<usize>>,
    active: BTreeSet<usize>,
}

impl SparseEliminator {
    fn new(rows: Vec<Vec<(usize, Scalar)>>, cols: usize) -> Self {
        let mut col_rows = vec![BTreeSet::new(); cols];
        let mut out = Vec::with_capacity(rows.len());
        let mut active = BTreeSet::new();
        for (i, row) in rows.into_iter().enumerate() {
            let map: BTreeMap<usize, Scalar> = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            for &c in map.keys() {
                col_rows[c].insert(i);
            }
            if !map.is_empty() {
                active.insert(i);
            }
            out.push(map);
        }
        SparseEliminator { rows: out, col_rows, active }
    }

    /// Picks a pivot among active rows, restricted to columns below `limit`.
    fn choose_pivot(&self, limit: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize, usize)> = None;
        for &r in &self.active {
            let row = &self.rows[r];
            let len = row.range(..limit).count();
            if len == 0 {
                continue;
            }
            if let Some((bl, _, _, _)) = best {
                if len > bl {
                    continue;
                }
            }
            let (c, cc) = row.range(..limit).map(|(&c, _)| (c, self.col_rows[c].len())).min_by_key(|&(c, n)| (n, c)).unwrap();
            let better = match best {
                None => true,
                Some((bl, bcc, _, _)) => (len, cc) < (bl, bcc),
            };
            if better {
                best = Some((len, cc, r, c));
            }
        }
        best.map(|(_, _, r, c)| (r, c))
    }

    /// Eliminates column `c` from every row except `r` (restricted to `targets`).
    fn eliminate(&mut self, r: usize, c: usize, include_inactive: bool) {
        let pivot_row = self.rows[r].clone();
        let inv = pivot_row[&c].inv().unwrap();
        let others: Vec<usize> =
            self.col_rows[c].iter().copied().filter(|&s| s != r && (include_inactive || self.active.contains(&s))).collect();
        for s in others {
            let factor = &self.rows[s][&c] * &inv;
            for (&j, v) in &pivot_row {
                let delta = -&(&factor * v);
                let entry = self.rows[s].entry(j).or_insert_with(|| v.field().zero());
                *entry += &delta;
                if entry.is_zero() {
                    self.rows[s].remove(&j);
                    self.col_rows[j].remove(&s);
                } else {
                    self.col_rows[j].insert(s);
                }
            }
        }
    }

    fn rank(mut self) -> usize {
        let limit = self.col_rows.len();
        let mut rank = 0;
        while let Some((r, c)) = self.choose_pivot(limit) {
            self.eliminate(r, c, false);
            self.active.remove(&r);
            for &j in self.rows[r].keys() {
                self.col_rows[j].remove(&r);
            }
            rank += 1;
            self.active.retain(|&s| !self.rows[s].is_empty());
        }
        rank
    }
}

/// Solves `a * x = b_k` for each right-hand side column `b_k`; `None` where inconsistent.
/// Free variables are set to zero.
pub fn solve_many(a: &SparseMatrix, rhs: &[Vec<(usize, Scalar)>]) -> Vec<Option<Vec<Scalar>>> {
    let n = a.cols;
    let mut rows = a.sparse_rows();
    for (k, b) in rhs.iter().enumerate() {
        for (i, v) in b {
            rows[*i].push((n + k, v.clone()));
        }
    }
    let mut el = SparseEliminator::new(rows, n + rhs.len());
    let mut pivots = Vec::new();
    while let Some((r, c)) = el.choose_pivot(n) {
        el.eliminate(r, c, true);
        el.active.remove(&r);
        pivots.push((r, c));
    }
    let field = a.field;
    let mut out = Vec::with_capacity(rhs.len());
    for k in 0..rhs.len() {
        let col = n + k;
        let inconsistent = el.active.iter().any(|&s| el.rows[s].contains_key(&col));
        if inconsistent {
            out.push(None);
            continue;
        }
        let mut x = vec![field.zero(); n];
        for &(r, c) in &pivots {
            if let Some(v) = el.rows[r].get(&col) {
                x[c] = v * &el.rows[r][&c].inv().unwrap();
            }
        }
        out.push(Some(x));
    }
    out
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(a: &SparseMatrix) -> Option<SparseMatrix> {
    if a.rows != a.cols {
        return None;
    }
    if rank(a) != a.rows {
        return None;
    }
    let rhs: Vec<Vec<(usize, Scalar)>> = (0..a.rows).map(|i| vec![(i, a.field.one())]).collect();
    let sols = solve_many(a, &rhs);
    let mut inv = SparseMatrix::zero(a.field, a.rows, a.cols);
    for (k, s) in sols.into_iter().enumerate() {
        for (i, v) in s?.into_iter().enumerate() {
            inv.add_entry(i, k, &v);
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::RATIONALS
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseMatrix::identity(q(), 3)), 3);
        assert_eq!(rank(&SparseMatrix::from_rows(q(), &[vec![1, 2], vec![2, 4]])), 1);
        let f2 = Field::new(2).unwrap();
        assert_eq!(rank(&SparseMatrix::from_rows(f2, &[vec![1, 1], vec![1, 1]])), 1);
    }

    #[test]
    fn kernel_dim_examples() {
        assert_eq!(kernel_dim(&SparseMatrix::zero(q(), 2, 5)), 5);
        assert_eq!(kernel_dim(&SparseMatrix::identity(q(), 3)), 0);
        assert_eq!(kernel_dim(&SparseMatrix::from_rows(q(), &[vec![1, 2], vec![2, 4]])), 1);
    }

    #[test]
    fn homology_dim_examples() {
        let d_in = SparseMatrix::zero(q(), 1, 0);
        let d_out = SparseMatrix::zero(q(), 0, 1);
        assert_eq!(homology_dim(&d_in, &d_out).unwrap(), 1);

        let d_in = SparseMatrix::identity(q(), 2);
        let d_out = SparseMatrix::zero(q(), 1, 2);
        assert_eq!(homology_dim(&d_in, &d_out).unwrap(), 0);

        let d_in = SparseMatrix::from_rows(q(), &[vec![1], vec![0]]);
        let d_out = SparseMatrix::from_rows(q(), &[vec![0, 1]]);
        assert_eq!(homology_dim(&d_in, &d_out).unwrap(), 0);
    }

    #[test]
    fn homology_rejects_nonzero_composite() {
        let d = SparseMatrix::identity(q(), 2);
        assert!(matches!(homology_dim(&d, &d), Err(Error::CompositionNonzero(_))));
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        let m = SparseMatrix::from_rows(q(), &[vec![2, 4, 0, 6], vec![1, 2, 3, 3], vec![3, 6, 3, 9], vec![0, 0, 0, 1]]);
        assert_eq!(bareiss_rank(&m), 3);
        assert_eq!(SparseEliminator::new(m.sparse_rows(), m.cols).rank(), 3);
    }

    #[test]
    fn solve_and_inverse() {
        let a = SparseMatrix::from_rows(q(), &[vec![1, 1], vec![1, -1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(a.mul(&inv), SparseMatrix::identity(q(), 2));
        let sing = SparseMatrix::from_rows(q(), &[vec![1, 1], vec![2, 2]]);
        assert!(inverse(&sing).is_none());
        let sol = solve_many(&sing, &[vec![(0, q().int(1)), (1, q().int(3))]]);
        assert!(sol[0].is_none());
    }
}
