//! Bit-packed GF(2) linear algebra: vectors, sparse parity rows, dense
//! matrices, kernels, ranks and permutations.
//!
//! Bit packing is fixed: bit `i` lives at byte `i / 8`, position `i % 8`,
//! little-endian within the byte. Serialized keys are therefore bit-exact
//! across implementations.

mod bits;
mod dense;
mod linalg;
mod perm;
mod sparse;

pub use bits::BitVec;
pub use dense::DenseMatrix;
pub use linalg::{kernel_basis, rank_dense, rank_rows, rank_sparse, sample_kernel_matrix};
pub use perm::{random_permutation, Permutation};
pub use sparse::{sample_sparse_row, SparseMatrix, SparseRow};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum F2Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("bad sparsity t={t} for ambient dimension n={n}")]
    BadSparsity { t: usize, n: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("bad hex encoding: {0}")]
    BadHex(String),
}
