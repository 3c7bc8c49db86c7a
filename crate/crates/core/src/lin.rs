//! Sparse linear combinations over an exact field.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;

use crate::kernel::{Field, Scalar};

/// A finite formal sum `Σ c_k · k` with nonzero coefficients, kept in key order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lin<K: Ord> {
    field: Field,
    terms: BTreeMap<K, Scalar>,
}

impl<K: Ord + Clone> Lin<K> {
    pub fn zero(field: Field) -> Self {
        Lin { field, terms: BTreeMap::new() }
    }

    pub fn term(field: Field, key: K, coeff: Scalar) -> Self {
        let mut l = Lin::zero(field);
        l.add_term(key, &coeff);
        l
    }

    pub fn basis(field: Field, key: K) -> Self {
        Lin::term(field, key, field.one())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn add_term(&mut self, key: K, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            btree_map::Entry::Vacant(e) => {
                e.insert(coeff.clone());
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Lin<K>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), &(v * c));
        }
    }

    pub fn add(&mut self, other: &Lin<K>) {
        self.add_scaled(other, &self.field.one());
    }

    pub fn sub(&mut self, other: &Lin<K>) {
        self.add_scaled(other, &self.field.int(-1));
    }

    pub fn scaled(&self, c: &Scalar) -> Lin<K> {
        let mut out = Lin::zero(self.field);
        out.add_scaled(self, c);
        out
    }

    pub fn coeff(&self, key: &K) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Scalar)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    /// Applies a linear map given on basis keys.
    pub fn map_linear<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Lin<J>) -> Lin<J> {
        let mut out = Lin::zero(self.field);
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), c);
        }
        out
    }

    /// Relabels keys (terms landing on the same key are summed).
    pub fn map_keys<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> J) -> Lin<J> {
        let mut out = Lin::zero(self.field);
        for (k, c) in &self.terms {
            out.add_term(f(k), c);
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&K) -> bool) -> Lin<K> {
        Lin { field: self.field, terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }
}

impl<K: Ord> IntoIterator for Lin<K> {
    type Item = (K, Scalar);
    type IntoIter = btree_map::IntoIter<K, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for Lin<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*{k:?}")?;
        }
        Ok(())
    }
}
