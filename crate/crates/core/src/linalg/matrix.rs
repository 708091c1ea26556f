use std::fmt;

use super::field::Fp;
use super::row::Row;
use crate::error::{Error, Result};

/// Dense matrix over F_p, row-major, every entry reduced into `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix[p={}; {}x{}]", self.field.p(), self.rows, self.cols)?;
        for r in 0..self.rows.min(16) {
            let row: Vec<String> = (0..self.cols.min(32))
                .map(|c| self.get(r, c).to_string())
                .collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: FpMatrix,
    pub pivots: Vec<usize>,
}

impl FpMatrix {
    pub fn zeros(field: Fp, rows: usize, cols: usize) -> Self {
        FpMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_fn(field: Fp, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = field.reduce(f(r, c));
            }
        }
        m
    }

    pub fn from_rows(field: Fp, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self::from_fn(field, rows.len(), cols, |r, c| rows[r][c]))
    }

    /// Builds a matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(field: Fp, rows: usize, columns: &[Vec<u8>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            debug_assert_eq!(col.len(), rows);
            for (r, &x) in col.iter().enumerate() {
                m.data[r * m.cols + c] = x;
            }
        }
        m
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = self.field.reduce(v);
    }

    #[inline]
    pub fn add_to(&mut self, r: usize, c: usize, v: u8) {
        let i = r * self.cols + c;
        self.data[i] = self.field.add(self.data[i], v);
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u8>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.p();
        let mut out = vec![0u32; self.rows * other.cols];
        for r in 0..self.rows {
            let acc = &mut out[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k] as u32;
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (x, &b) in acc.iter_mut().zip(orow) {
                    *x = (*x + a * b as u32) % p;
                }
            }
        }
        Ok(FpMatrix {
            field: self.field,
            rows: self.rows,
            cols: other.cols,
            data: out.into_iter().map(|x| x as u8).collect(),
        })
    }

    pub fn apply(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let p = self.p();
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let s: u32 = row
                    .iter()
                    .zip(v)
                    .filter(|(&a, &b)| a != 0 && b != 0)
                    .map(|(&a, &b)| a as u32 * b as u32 % p)
                    .sum();
                (s % p) as u8
            })
            .collect()
    }

    pub fn add(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.combine(other, self.field.neg(1))
    }

    /// `self + c * other`
    pub fn combine(&self, other: &FpMatrix, c: u8) -> Result<FpMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch in addition".into()));
        }
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, f.mul(c, b)))
            .collect();
        Ok(FpMatrix { field: f, rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: u8) -> FpMatrix {
        let f = self.field;
        FpMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    pub fn hstack(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack row mismatch".into()));
        }
        let cols = self.cols + other.cols;
        Ok(FpMatrix::from_fn(self.field, self.rows, cols, |r, c| {
            if c < self.cols {
                self.get(r, c) as i64
            } else {
                other.get(r, c - self.cols) as i64
            }
        }))
    }

    pub fn vstack(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FpMatrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &FpMatrix) -> FpMatrix {
        let mut m = FpMatrix::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.data[r * m.cols + c] = self.get(r, c);
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                m.data[(r + self.rows) * m.cols + c + self.cols] = other.get(r, c);
            }
        }
        m
    }

    /// Kronecker product, row index `(i, k) -> i * other.rows + k`.
    pub fn kronecker(&self, other: &FpMatrix) -> FpMatrix {
        let f = self.field;
        let mut m = FpMatrix::zeros(f, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if b != 0 {
                            let (r, c) = (i * other.rows + k, j * other.cols + l);
                            m.data[r * m.cols + c] = f.mul(a, b);
                        }
                    }
                }
            }
        }
        m
    }

    pub fn select_columns(&self, cols: &[usize]) -> FpMatrix {
        FpMatrix::from_fn(self.field, self.rows, cols.len(), |r, c| self.get(r, cols[c]) as i64)
    }

    pub fn select_rows(&self, rows: &[usize]) -> FpMatrix {
        FpMatrix::from_fn(self.field, rows.len(), self.cols, |r, c| self.get(rows[r], c) as i64)
    }

    pub(crate) fn packed_rows(&self) -> Vec<Row> {
        (0..self.rows).map(|r| Row::from_dense(self.field, self.row(r))).collect()
    }

    pub(crate) fn from_packed(field: Fp, cols: usize, rows: &[Row]) -> FpMatrix {
        let mut m = FpMatrix::zeros(field, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for c in 0..cols {
                m.data[r * cols + c] = row.get(c);
            }
        }
        m
    }

    /// Reduced row echelon form with first-nonzero pivoting.
    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut rows = self.packed_rows();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(sel) = (rank..rows.len()).find(|&r| rows[r].get(c) != 0) else {
                continue;
            };
            rows.swap(rank, sel);
            let lead = rows[rank].get(c);
            if lead != 1 {
                rows[rank].scale(f, f.inv(lead));
            }
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank {
                    let x = row.get(c);
                    if x != 0 {
                        row.axpy(f, f.neg(x), &pivot_row);
                    }
                }
            }
            pivots.push(c);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        Rref { matrix: FpMatrix::from_packed(f, self.cols, &rows), pivots }
    }

    /// Row rank over F_p.
    pub fn rank(&self) -> usize {
        // Eliminate along the shorter side; rank is transpose invariant.
        let f = self.field;
        let src = if self.rows > self.cols { self.transpose() } else { self.clone() };
        let mut basis = super::Subspace::new(f, src.cols);
        for r in 0..src.rows {
            basis.insert(src.row(r));
            if basis.dim() == src.cols {
                break;
            }
        }
        basis.dim()
    }

    /// Columns of the result form a basis of `{x : Mx = 0}`.
    pub fn kernel(&self) -> FpMatrix {
        let f = self.field;
        let Rref { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = FpMatrix::zeros(f, self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            k.data[fc * k.cols + j] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                let x = matrix.get(i, fc);
                if x != 0 {
                    k.data[pc * k.cols + j] = f.neg(x);
                }
            }
        }
        k
    }

    /// Columns form a basis of the column space.
    pub fn image(&self) -> FpMatrix {
        let mut basis = super::Subspace::new(self.field, self.rows);
        for c in 0..self.cols {
            basis.insert(&self.column(c));
        }
        basis.basis_matrix()
    }

    /// Some `x` with `Mx = b`, or `None` when `b` is not in the image.
    pub fn solve(&self, b: &[u8]) -> Option<Vec<u8>> {
        super::PreimageSolver::new(self).solve(b)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Fp {
        Fp::new(2).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FpMatrix::identity(f2(), 3).rank(), 3);
        assert_eq!(FpMatrix::zeros(Fp::new(3).unwrap(), 4, 2).rank(), 0);
        let m = FpMatrix::from_rows(f2(), &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(FpMatrix::identity(f2(), 4).kernel().cols(), 0);
        assert_eq!(FpMatrix::zeros(f2(), 2, 2).kernel().cols(), 2);
        let m = FpMatrix::from_rows(f2(), &[vec![1, 1]]).unwrap();
        let k = m.kernel();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.column(0), vec![1, 1]);
    }

    #[test]
    fn kernel_is_annihilated_mod_5() {
        let f = Fp::new(5).unwrap();
        let m = FpMatrix::from_rows(f, &[vec![1, 2, 3, 4], vec![2, 4, 1, 0]]).unwrap();
        let k = m.kernel();
        assert_eq!(k.cols(), 4 - m.rank());
        assert!(m.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn solve_roundtrip() {
        let f = Fp::new(3).unwrap();
        let m = FpMatrix::from_rows(f, &[vec![1, 2, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        let b = vec![2, 1, 0];
        let x = m.solve(&b).expect("solvable");
        assert_eq!(m.apply(&x), b);
    }

    #[test]
    fn unsolvable_system() {
        let m = FpMatrix::from_rows(f2(), &[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(m.solve(&[1, 0]).is_none());
    }
}
