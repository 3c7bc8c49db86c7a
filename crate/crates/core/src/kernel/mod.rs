//! Exact scalars and sparse exact linear algebra.

mod matrix;
mod scalar;

pub use matrix::{homology_dim, inverse, kernel_dim, rank, solve_many, SparseMatrix, DENSE_LIMIT};
pub use scalar::{Field, Scalar};
