use std::sync::Arc;

use crate::error::{Error, Result};

/// Compressed-row sparsity structure. Column indices are sorted and unique
/// within each row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsityPattern {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl SparsityPattern {
    /// Builds a pattern from per-row column lists (unsorted, duplicates allowed).
    pub fn from_rows(n_cols: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        let n_rows = rows.len();
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        row_ptr.push(0);
        let total: usize = rows.iter().map(Vec::len).sum();
        let mut col_idx = Vec::with_capacity(total);
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            if let Some(&j) = row.last() {
                if j >= n_cols {
                    return Err(Error::IndexOutOfRange {
                        row: i,
                        col: j,
                        n_rows,
                        n_cols,
                    });
                }
            }
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
            *row = Vec::new();
        }
        Ok(SparsityPattern {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
        })
    }

    /// Builds a pattern from CSR arrays; columns must be sorted and unique
    /// within each row.
    pub fn from_csr(n_cols: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>) -> Result<Self> {
        let n_rows = row_ptr.len().saturating_sub(1);
        if row_ptr.first() != Some(&0) || row_ptr.last() != Some(&col_idx.len()) {
            return Err(Error::DimensionMismatch("row_ptr does not span col_idx".into()));
        }
        for i in 0..n_rows {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::DimensionMismatch(format!("row_ptr decreases at row {i}")));
            }
            let row = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} columns not strictly increasing"
                )));
            }
            if let Some(&j) = row.last() {
                if j >= n_cols {
                    return Err(Error::IndexOutOfRange {
                        row: i,
                        col: j,
                        n_rows,
                        n_cols,
                    });
                }
            }
        }
        Ok(SparsityPattern {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Storage position of entry `(i, j)`, if structurally present.
    #[inline]
    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_ptr[i];
        self.row(i).binary_search(&j).ok().map(|k| start + k)
    }
}

/// A CSR matrix whose structure may be shared between matrices (Newton
/// iterations reuse one pattern, and with it one symbolic factorization).
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    pattern: Arc<SparsityPattern>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(pattern: Arc<SparsityPattern>) -> Self {
        let values = vec![0.0; pattern.nnz()];
        SparseMatrix { pattern, values }
    }

    pub fn identity(n: usize) -> Self {
        let pattern = SparsityPattern {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
        };
        SparseMatrix {
            pattern: Arc::new(pattern),
            values: vec![1.0; n],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    /// Duplicates are summed in input order, so the result is deterministic.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if let Some(&(row, col, _)) = triplets.iter().find(|t| t.0 >= n_rows || t.1 >= n_cols) {
            return Err(Error::IndexOutOfRange {
                row,
                col,
                n_rows,
                n_cols,
            });
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (i, j, v) = triplets[k];
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let pattern = SparsityPattern {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
        };
        Ok(SparseMatrix {
            pattern: Arc::new(pattern),
            values,
        })
    }

    pub fn pattern(&self) -> &Arc<SparsityPattern> {
        &self.pattern
    }

    pub fn n_rows(&self) -> usize {
        self.pattern.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.pattern.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pattern.find(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Adds `v` to entry `(i, j)`.
    ///
    /// # Panics
    /// If the entry is not in the pattern.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .pattern
            .find(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) is not in the sparsity pattern"));
        self.values[k] += v;
    }

    /// Adds a dense row-major local block at rows `rows` and columns `cols`.
    pub fn add_block(&mut self, rows: &[usize], cols: &[usize], block: &[f64]) {
        debug_assert_eq!(block.len(), rows.len() * cols.len());
        for (a, &i) in rows.iter().enumerate() {
            let start = self.pattern.row_ptr[i];
            let row = self.pattern.row(i);
            for (b, &j) in cols.iter().enumerate() {
                let v = block[a * cols.len() + b];
                if v != 0.0 {
                    let k = row
                        .binary_search(&j)
                        .unwrap_or_else(|_| panic!("entry ({i}, {j}) is not in the sparsity pattern"));
                    self.values[start + k] += v;
                }
            }
        }
    }

    /// Columns and mutable values of row `i`.
    pub fn row_mut(&mut self, i: usize) -> (&[usize], &mut [f64]) {
        let (s, e) = (self.pattern.row_ptr[i], self.pattern.row_ptr[i + 1]);
        (&self.pattern.col_idx[s..e], &mut self.values[s..e])
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.pattern.row_ptr[i], self.pattern.row_ptr[i + 1]);
        (&self.pattern.col_idx[s..e], &self.values[s..e])
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols(), "vector length must equal the column count");
        (0..self.n_rows())
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, v)| v * x[j]).sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut out = nalgebra::DMatrix::zeros(self.n_rows(), self.n_cols());
        for i in 0..self.n_rows() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                out[(i, j)] += v;
            }
        }
        out
    }

    /// Largest `|A_ij - A_ji|` over stored entries (square matrices only).
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n_rows() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Assembles a matrix from triplets, summing duplicate entries.
pub fn triplet_assemble(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Result<SparseMatrix> {
    SparseMatrix::from_triplets(n_rows, n_cols, triplets)
}
