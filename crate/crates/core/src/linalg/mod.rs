//! Exact linear algebra over prime fields.

mod complex;
mod field;
mod matrix;
mod row;
mod sparse;
mod subspace;

pub use complex::{ChainComplex, CochainComplex};
pub use field::{is_prime, Fp};
pub use matrix::{FpMatrix, Rref};
pub use sparse::SparseMatrix;
pub use subspace::{PreimageSolver, Subspace};

/// A finite-dimensional space with a printable label per basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpSpace {
    pub field: Fp,
    pub labels: Vec<String>,
}

impl FpSpace {
    pub fn new(field: Fp, labels: Vec<String>) -> crate::Result<Self> {
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(crate::Error::Invalid(format!("duplicate basis label {dup:?}")));
        }
        Ok(FpSpace { field, labels })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// Homology dimensions of a chain complex (`dim ker d_i - rank d_{i+1}`).
pub fn homology_dims(c: &ChainComplex) -> Vec<usize> {
    c.homology_dims()
}
