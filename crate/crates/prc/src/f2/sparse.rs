//! Sparse parity rows and sparse parity-check matrices.

use super::{BitVec, F2Error};
use crate::rng::RandomSource;

/// A t-sparse row over F₂ⁿ: a sorted set of positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseRow {
    n: usize,
    idx: Vec<usize>,
}

impl SparseRow {
    pub fn new(n: usize, mut idx: Vec<usize>) -> Result<Self, F2Error> {
        idx.sort_unstable();
        idx.dedup();
        if let Some(&max) = idx.last() {
            if max >= n {
                return Err(F2Error::IndexOutOfRange { index: max, len: n });
            }
        }
        Ok(Self { n, idx })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self) -> usize {
        self.idx.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.idx
    }

    pub fn to_dense(&self) -> BitVec {
        let mut v = BitVec::zeros(self.n);
        for &i in &self.idx {
            v.set(i, true);
        }
        v
    }

    /// Parity of `v` at this row's positions.
    pub fn dot(&self, v: &BitVec) -> Result<bool, F2Error> {
        if v.len() != self.n {
            return Err(F2Error::LengthMismatch { expected: self.n, actual: v.len() });
        }
        Ok(self.idx.iter().fold(false, |acc, &i| acc ^ v.get(i)))
    }
}

/// Uniform t-subset of `[n]` via partial Fisher–Yates, then sorted.
pub fn sample_sparse_row(n: usize, t: usize, rng: &mut RandomSource) -> Result<SparseRow, F2Error> {
    if t == 0 || t > n {
        return Err(F2Error::BadSparsity { t, n });
    }
    // Partial Fisher–Yates on a lazily materialized identity array:
    // only the touched entries are stored.
    let mut swapped: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut idx = Vec::with_capacity(t);
    for i in 0..t {
        let j = i + rng.index(n - i);
        let vi = *swapped.get(&i).unwrap_or(&i);
        let vj = *swapped.get(&j).unwrap_or(&j);
        idx.push(vj);
        swapped.insert(j, vi);
    }
    SparseRow::new(n, idx)
}

/// An r×n matrix of sparse rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    n: usize,
    rows: Vec<SparseRow>,
}

impl SparseMatrix {
    pub fn new(n: usize, rows: Vec<SparseRow>) -> Result<Self, F2Error> {
        for row in &rows {
            if row.n() != n {
                return Err(F2Error::LengthMismatch { expected: n, actual: row.n() });
            }
        }
        Ok(Self { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    /// Px: one parity bit per row.
    pub fn syndrome(&self, x: &BitVec) -> Result<BitVec, F2Error> {
        if x.len() != self.n {
            return Err(F2Error::LengthMismatch { expected: self.n, actual: x.len() });
        }
        let mut out = BitVec::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(x)? {
                out.set(i, true);
            }
        }
        Ok(out)
    }
}
