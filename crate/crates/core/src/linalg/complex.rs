use super::field::Fp;
use super::matrix::FpMatrix;
use crate::error::{Error, Result};

/// A bounded chain complex `C_n -> ... -> C_1 -> C_0` of finite-dimensional
/// F_p-spaces. `differentials[i]` is `d_{i+1} : C_{i+1} -> C_i`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    field: Fp,
    dims: Vec<usize>,
    differentials: Vec<FpMatrix>,
}

impl ChainComplex {
    /// Validates shapes and `d . d = 0`.
    pub fn new(field: Fp, dims: Vec<usize>, differentials: Vec<FpMatrix>) -> Result<Self> {
        if !dims.is_empty() && differentials.len() + 1 != dims.len() {
            return Err(Error::Dimension(format!(
                "{} terms need {} differentials, got {}",
                dims.len(),
                dims.len() - 1,
                differentials.len()
            )));
        }
        for (i, d) in differentials.iter().enumerate() {
            if d.rows() != dims[i] || d.cols() != dims[i + 1] {
                return Err(Error::Dimension(format!(
                    "d_{} has shape {}x{}, expected {}x{}",
                    i + 1,
                    d.rows(),
                    d.cols(),
                    dims[i],
                    dims[i + 1]
                )));
            }
        }
        for i in 1..differentials.len() {
            if !differentials[i - 1].mul(&differentials[i])?.is_zero() {
                return Err(Error::NotAComplex { degree: i });
            }
        }
        Ok(ChainComplex { field, dims, differentials })
    }

    /// Cochain complex `C^0 -> C^1 -> ...` given by `coboundaries[i] : C^i -> C^{i+1}`,
    /// stored by reindexing as a chain complex with reversed degrees.
    pub fn from_cochain(field: Fp, dims: Vec<usize>, coboundaries: Vec<FpMatrix>) -> Result<CochainComplex> {
        CochainComplex::new(field, dims, coboundaries)
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// `d_i : C_i -> C_{i-1}` for `i >= 1`.
    pub fn differential(&self, i: usize) -> Option<&FpMatrix> {
        if i == 0 {
            None
        } else {
            self.differentials.get(i - 1)
        }
    }

    pub fn differentials(&self) -> &[FpMatrix] {
        &self.differentials
    }

    /// `dim H_i = dim ker d_i - rank d_{i+1}`.
    pub fn homology_dims(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.differentials.iter().map(FpMatrix::rank).collect();
        (0..self.dims.len())
            .map(|i| {
                let out_rank = if i == 0 { 0 } else { ranks[i - 1] };
                let in_rank = ranks.get(i).copied().unwrap_or(0);
                self.dims[i] - out_rank - in_rank
            })
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// The linear dual: a cochain complex with `C^i = (C_i)^*` and transposed maps.
    pub fn dual(&self) -> CochainComplex {
        CochainComplex {
            field: self.field,
            dims: self.dims.clone(),
            coboundaries: self.differentials.iter().map(FpMatrix::transpose).collect(),
        }
    }

    /// Tensor product with the Koszul sign `d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy`.
    ///
    /// Term `n` is ordered as the concatenation over `s = 0..=n` of
    /// `C_s (x) D_{n-s}` with Kronecker indexing inside each block.
    pub fn tensor(&self, other: &ChainComplex) -> Result<ChainComplex> {
        let f = self.field;
        let top = self.len() + other.len() - 1;
        let offsets = |n: usize| -> Vec<(usize, usize, usize)> {
            let mut acc = 0;
            let mut out = Vec::new();
            for s in 0..=n {
                if s < self.len() && n - s < other.len() {
                    out.push((s, n - s, acc));
                    acc += self.dims[s] * other.dims[n - s];
                }
            }
            out
        };
        let dims: Vec<usize> = (0..top)
            .map(|n| offsets(n).iter().map(|&(s, t, _)| self.dims[s] * other.dims[t]).sum())
            .collect();
        let mut diffs = Vec::new();
        for n in 1..top {
            let mut d = FpMatrix::zeros(f, dims[n - 1], dims[n]);
            let lower = offsets(n - 1);
            for &(s, t, off) in &offsets(n) {
                // dx (x) y lands in block (s-1, t)
                if s > 0 {
                    let (_, _, loff) = *lower.iter().find(|&&(a, b, _)| a == s - 1 && b == t).unwrap();
                    let m = self.differentials[s - 1].kronecker(&FpMatrix::identity(f, other.dims[t]));
                    place(&mut d, &m, loff, off, 1);
                }
                if t > 0 {
                    let (_, _, loff) = *lower.iter().find(|&&(a, b, _)| a == s && b == t - 1).unwrap();
                    let m = FpMatrix::identity(f, self.dims[s]).kronecker(&other.differentials[t - 1]);
                    let sign = if s % 2 == 0 { 1 } else { f.neg(1) };
                    place(&mut d, &m, loff, off, sign);
                }
            }
            diffs.push(d);
        }
        ChainComplex::new(f, dims, diffs)
    }
}

fn place(target: &mut FpMatrix, block: &FpMatrix, row_off: usize, col_off: usize, scale: u8) {
    let f = target.field();
    for r in 0..block.rows() {
        for c in 0..block.cols() {
            let x = block.get(r, c);
            if x != 0 {
                target.add_to(row_off + r, col_off + c, f.mul(scale, x));
            }
        }
    }
}

/// `C^0 -> C^1 -> ...` with `coboundaries[i] : C^i -> C^{i+1}`.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    field: Fp,
    dims: Vec<usize>,
    coboundaries: Vec<FpMatrix>,
}

impl CochainComplex {
    pub fn new(field: Fp, dims: Vec<usize>, coboundaries: Vec<FpMatrix>) -> Result<Self> {
        if coboundaries.len() + 1 != dims.len().max(1) {
            return Err(Error::Dimension("coboundary count mismatch".into()));
        }
        for (i, d) in coboundaries.iter().enumerate() {
            if d.cols() != dims[i] || d.rows() != dims[i + 1] {
                return Err(Error::Dimension(format!("delta^{i} has wrong shape")));
            }
        }
        for i in 1..coboundaries.len() {
            if !coboundaries[i].mul(&coboundaries[i - 1])?.is_zero() {
                return Err(Error::NotAComplex { degree: i });
            }
        }
        Ok(CochainComplex { field, dims, coboundaries })
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn coboundary(&self, i: usize) -> Option<&FpMatrix> {
        self.coboundaries.get(i)
    }

    /// `dim H^i = dim ker delta^i - rank delta^{i-1}`; the top term has no
    /// outgoing coboundary and is reported as its cokernel.
    pub fn cohomology_dims(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.coboundaries.iter().map(FpMatrix::rank).collect();
        (0..self.dims.len())
            .map(|i| {
                let out_rank = ranks.get(i).copied().unwrap_or(0);
                let in_rank = if i == 0 { 0 } else { ranks[i - 1] };
                self.dims[i] - out_rank - in_rank
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_differential_is_acyclic() {
        let f = Fp::new(2).unwrap();
        let c = ChainComplex::new(f, vec![1, 1], vec![FpMatrix::identity(f, 1)]).unwrap();
        assert_eq!(c.homology_dims(), vec![0, 0]);
    }

    #[test]
    fn zero_differentials() {
        let f = Fp::new(3).unwrap();
        let c = ChainComplex::new(
            f,
            vec![2, 3, 1],
            vec![FpMatrix::zeros(f, 2, 3), FpMatrix::zeros(f, 3, 1)],
        )
        .unwrap();
        assert_eq!(c.homology_dims(), vec![2, 3, 1]);
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn rejects_non_complex() {
        let f = Fp::new(2).unwrap();
        let one = FpMatrix::identity(f, 1);
        let err = ChainComplex::new(f, vec![1, 1, 1], vec![one.clone(), one]).unwrap_err();
        assert_eq!(err, Error::NotAComplex { degree: 1 });
    }

    #[test]
    fn dual_reverses_homology() {
        let f = Fp::new(2).unwrap();
        let d = FpMatrix::from_rows(f, &[vec![1, 0, 1]]).unwrap();
        let c = ChainComplex::new(f, vec![1, 3], vec![d]).unwrap();
        assert_eq!(c.dual().cohomology_dims(), c.homology_dims());
    }
}
