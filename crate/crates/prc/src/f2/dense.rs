//! Dense column-major GF(2) matrices.

use super::{BitVec, F2Error};
use crate::rng::RandomSource;

/// A rows×cols matrix over F₂, stored as packed columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    columns: Vec<BitVec>,
}

impl DenseMatrix {
    pub fn from_columns(rows: usize, columns: Vec<BitVec>) -> Result<Self, F2Error> {
        for c in &columns {
            if c.len() != rows {
                return Err(F2Error::LengthMismatch { expected: rows, actual: c.len() });
            }
        }
        Ok(Self { rows, columns })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, columns: vec![BitVec::zeros(rows); cols] }
    }

    pub fn identity(k: usize) -> Self {
        let columns = (0..k)
            .map(|j| {
                let mut c = BitVec::zeros(k);
                c.set(j, true);
                c
            })
            .collect();
        Self { rows: k, columns }
    }

    pub fn random(rows: usize, cols: usize, rng: &mut RandomSource) -> Self {
        let columns = (0..cols).map(|_| BitVec::random(rows, rng)).collect();
        Self { rows, columns }
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &BitVec {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[BitVec] {
        &self.columns
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.columns[j].get(i)
    }

    /// Gu: XOR of the columns j with u_j = 1.
    pub fn mat_vec(&self, u: &BitVec) -> Result<BitVec, F2Error> {
        if u.len() != self.num_cols() {
            return Err(F2Error::LengthMismatch { expected: self.num_cols(), actual: u.len() });
        }
        let mut out = BitVec::zeros(self.rows);
        for (j, col) in self.columns.iter().enumerate() {
            if u.get(j) {
                out.xor_in_place(col).expect("column length invariant");
            }
        }
        Ok(out)
    }

    /// Materialized rows (for elimination).
    pub fn to_rows(&self) -> Vec<BitVec> {
        let mut rows = vec![BitVec::zeros(self.num_cols()); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for i in 0..self.rows {
                if col.get(i) {
                    rows[i].set(j, true);
                }
            }
        }
        rows
    }
}
