use super::field::Fp;
use super::matrix::FpMatrix;

/// Triplet-format sparse matrix. Densified on demand for elimination once
/// the fill ratio crosses `density_threshold`.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    field: Fp,
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, u8)>,
}

impl SparseMatrix {
    pub fn new(field: Fp, rows: usize, cols: usize) -> Self {
        SparseMatrix { field, rows, cols, entries: Vec::new() }
    }

    /// Accumulates `v` at `(r, c)`; duplicates are summed when densified.
    pub fn push(&mut self, r: usize, c: usize, v: i64) {
        assert!(r < self.rows && c < self.cols, "entry out of range");
        let v = self.field.reduce(v);
        if v != 0 {
            self.entries.push((r, c, v));
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn density(&self) -> f64 {
        if self.rows * self.cols == 0 {
            0.0
        } else {
            self.nnz() as f64 / (self.rows * self.cols) as f64
        }
    }

    pub fn to_dense(&self) -> FpMatrix {
        let mut m = FpMatrix::zeros(self.field, self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m.add_to(r, c, v);
        }
        m
    }

    /// Rank; triplets are combined through a dense elimination either way,
    /// but very sparse inputs are eliminated row by row without building
    /// the full matrix.
    pub fn rank(&self, density_threshold: f64) -> usize {
        if self.density() >= density_threshold {
            return self.to_dense().rank();
        }
        let mut by_row: Vec<Vec<(usize, u8)>> = vec![Vec::new(); self.rows];
        for &(r, c, v) in &self.entries {
            by_row[r].push((c, v));
        }
        let mut basis = super::Subspace::new(self.field, self.cols);
        let mut buf = vec![0u8; self.cols];
        for row in by_row {
            if row.is_empty() {
                continue;
            }
            buf.iter_mut().for_each(|x| *x = 0);
            for (c, v) in row {
                buf[c] = self.field.add(buf[c], v);
            }
            basis.insert(&buf);
        }
        basis.dim()
    }
}
