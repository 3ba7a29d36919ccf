//! Rank, kernels and uniform kernel sampling via plain Gaussian
//! elimination. Keygen is not hot-path, so no structured elimination.

use super::{BitVec, DenseMatrix, SparseMatrix};
use crate::rng::RandomSource;

/// GF(2) rank of a set of row vectors; consumes the rows in place.
pub fn rank_rows(mut rows: Vec<BitVec>) -> usize {
    let width = match rows.first() {
        Some(r) => r.len(),
        None => return 0,
    };
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row.get(col) {
                row.xor_in_place(&pivot_row).expect("equal widths");
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

pub fn rank_dense(m: &DenseMatrix) -> usize {
    rank_rows(m.to_rows())
}

pub fn rank_sparse(p: &SparseMatrix) -> usize {
    rank_rows(p.rows().iter().map(|r| r.to_dense()).collect())
}

/// Basis of ker P as matrix columns; the column count is n − rank(P).
pub fn kernel_basis(p: &SparseMatrix) -> DenseMatrix {
    let n = p.n();
    // Row-reduce P to reduced echelon form, tracking pivot columns.
    let mut rows: Vec<BitVec> = p.rows().iter().map(|r| r.to_dense()).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row.get(col) {
                row.xor_in_place(&pivot_row).expect("equal widths");
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    // Free columns parameterize the kernel: for each free column f, the
    // basis vector has a 1 at f and, for each pivot row with a 1 in
    // column f, a 1 at that row's pivot column.
    let is_pivot = {
        let mut v = vec![false; n];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let mut columns = Vec::with_capacity(n - rank);
    for f in (0..n).filter(|&c| !is_pivot[c]) {
        let mut basis = BitVec::zeros(n);
        basis.set(f, true);
        for (row_i, &pc) in pivots.iter().enumerate() {
            if rows[row_i].get(f) {
                basis.set(pc, true);
            }
        }
        columns.push(basis);
    }
    DenseMatrix::from_columns(n, columns).expect("kernel basis length")
}

/// G ∈ F₂^{n×g} with each column an independent uniform element of ker P.
pub fn sample_kernel_matrix(p: &SparseMatrix, g: usize, rng: &mut RandomSource) -> DenseMatrix {
    let basis = kernel_basis(p);
    let dim = basis.num_cols();
    let columns = (0..g)
        .map(|_| {
            let coeffs = BitVec::random(dim, rng);
            basis.mat_vec(&coeffs).expect("coefficient length")
        })
        .collect();
    DenseMatrix::from_columns(p.n(), columns).expect("column length")
}
