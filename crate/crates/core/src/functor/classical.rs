//! The four-term sequence `0 → I → S^p → Γ^p → I → 0` over `F_p`-vector
//! spaces: Frobenius, norm and Verschiebung.

use std::collections::HashMap;
use std::sync::Arc;

use super::{DividedPower, FunctorRef, NatTransform, SymmetricPower, TensorFp};
use crate::addcat::{Object, Skeleton};
use crate::error::{Error, Result};
use crate::grpalg::MonomialModel;
use crate::linalg::{Fp, FpMatrix};

fn check_skeleton(sk: &Skeleton) -> Result<()> {
    let gens = &sk.spec().generators;
    let ok = gens.len() == 1 && gens[0].free_rank() == 0 && gens[0].torsion_exps() == [1];
    if !ok {
        return Err(Error::Invalid("the Frobenius sequence needs the single generator Z/p".into()));
    }
    if sk.k() < sk.p() as usize {
        return Err(Error::Invalid(format!("the Frobenius sequence needs K >= p, got K = {}", sk.k())));
    }
    Ok(())
}

fn degree_p_basis(field: Fp, n: usize) -> Vec<Vec<u64>> {
    MonomialModel::new(field, vec![None; n]).degree_basis(field.p() as usize)
}

fn index_of(basis: &[Vec<u64>]) -> HashMap<Vec<u64>, usize> {
    basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect()
}

fn pure_power(n: usize, j: usize, p: u64) -> Vec<u64> {
    let mut e = vec![0; n];
    e[j] = p;
    e
}

/// The functors `I`, `S^p ∘ I`, `Γ^p ∘ I` on a skeleton generated by `Z/p`.
fn functors(sk: &Arc<Skeleton>) -> (FunctorRef, FunctorRef, FunctorRef) {
    let p = sk.p() as usize;
    let i: FunctorRef = Arc::new(TensorFp::new(sk.clone()));
    let s: FunctorRef = Arc::new(SymmetricPower::new(i.clone(), p));
    let g: FunctorRef = Arc::new(DividedPower::new(i.clone(), p));
    (i, s, g)
}

fn frobenius_on(sk: &Arc<Skeleton>, i: FunctorRef, s: FunctorRef) -> NatTransform {
    let field = sk.field();
    let i2 = i.clone();
    NatTransform::new(i, s, move |a: &Object| {
        let n = i2.dim(a)?;
        let basis = degree_p_basis(field, n);
        let idx = index_of(&basis);
        let mut m = FpMatrix::zeros(field, basis.len(), n);
        for j in 0..n {
            m.set(idx[&pure_power(n, j, field.p() as u64)], j, 1);
        }
        Ok(m)
    })
}

fn norm_on(sk: &Arc<Skeleton>, i: FunctorRef, s: FunctorRef, g: FunctorRef) -> NatTransform {
    let field = sk.field();
    NatTransform::new(s, g, move |a: &Object| {
        let basis = degree_p_basis(field, i.dim(a)?);
        let diag: Vec<u8> = basis
            .iter()
            .map(|alpha| alpha.iter().fold(1u8, |acc, &e| (1..=e).fold(acc, |acc, k| field.mul(acc, field.reduce(k as i64)))))
            .collect();
        Ok(FpMatrix::from_fn(field, basis.len(), basis.len(), |r, c| if r == c { diag[r] as i64 } else { 0 }))
    })
}

fn verschiebung_on(sk: &Arc<Skeleton>, i: FunctorRef, g: FunctorRef) -> NatTransform {
    let field = sk.field();
    let i2 = i.clone();
    NatTransform::new(g, i, move |a: &Object| {
        let n = i2.dim(a)?;
        let basis = degree_p_basis(field, n);
        let idx = index_of(&basis);
        let mut m = FpMatrix::zeros(field, n, basis.len());
        for j in 0..n {
            m.set(j, idx[&pure_power(n, j, field.p() as u64)], 1);
        }
        Ok(m)
    })
}

/// Frobenius `I → S^p`, `e_j ↦ x_j^p`.
pub fn frobenius(sk: &Arc<Skeleton>) -> Result<NatTransform> {
    check_skeleton(sk)?;
    let (i, s, _) = functors(sk);
    Ok(frobenius_on(sk, i, s))
}

/// Norm `S^p → Γ^p`, `x^α ↦ (Π α_j!) γ_α`.
pub fn norm(sk: &Arc<Skeleton>) -> Result<NatTransform> {
    check_skeleton(sk)?;
    let (i, s, g) = functors(sk);
    Ok(norm_on(sk, i, s, g))
}

/// Verschiebung `Γ^p → I`, `γ_{p e_j} ↦ e_j` and every other `γ_α ↦ 0`.
pub fn verschiebung(sk: &Arc<Skeleton>) -> Result<NatTransform> {
    check_skeleton(sk)?;
    let (i, _, g) = functors(sk);
    Ok(verschiebung_on(sk, i, g))
}

/// The three maps over shared functor instances.
pub struct FrobeniusSequence {
    pub identity: FunctorRef,
    pub sym: FunctorRef,
    pub divided: FunctorRef,
    pub frobenius: Arc<NatTransform>,
    pub norm: Arc<NatTransform>,
    pub verschiebung: Arc<NatTransform>,
}

impl FrobeniusSequence {
    pub fn new(sk: &Arc<Skeleton>) -> Result<Self> {
        check_skeleton(sk)?;
        let (i, s, g) = functors(sk);
        Ok(FrobeniusSequence {
            frobenius: Arc::new(frobenius_on(sk, i.clone(), s.clone())),
            norm: Arc::new(norm_on(sk, i.clone(), s.clone(), g.clone())),
            verschiebung: Arc::new(verschiebung_on(sk, i.clone(), g.clone())),
            identity: i,
            sym: s,
            divided: g,
        })
    }

    pub fn is_natural(&self) -> Result<bool> {
        Ok(self.frobenius.is_natural()? && self.norm.is_natural()? && self.verschiebung.is_natural()?)
    }

    /// Exactness at all four terms on every skeleton object.
    pub fn is_exact(&self) -> Result<bool> {
        let sk = self.identity.skeleton();
        for a in sk.objects() {
            let (f, v) = (self.frobenius.component(a)?, self.verschiebung.component(a)?);
            if f.rank() != f.cols() || v.rank() != v.rows() {
                return Ok(false);
            }
        }
        Ok(self.frobenius.is_exact_with(&self.norm)? && self.norm.is_exact_with(&self.verschiebung)?)
    }
}
