//! Constructions on functors: classical symmetric, exterior and divided
//! powers, duals, tensor products and direct sums.

use std::collections::HashMap;
use std::sync::Arc;

use super::poly::{Poly, PolyRing};
use super::{check_dim, Functor, FunctorRef};
use crate::addcat::{Morphism, Object, Skeleton};
use crate::error::{Error, Result};
use crate::grpalg::MonomialModel;
use crate::koszul::wedge_basis;
use crate::linalg::{Fp, FpMatrix};

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Matrix of `S^d(M)` in the monomial bases of [`MonomialModel::degree_basis`].
pub fn sym_power_matrix(field: Fp, m: &FpMatrix, d: usize) -> FpMatrix {
    let src = MonomialModel::new(field, vec![None; m.cols()]).degree_basis(d);
    let dst = MonomialModel::new(field, vec![None; m.rows()]).degree_basis(d);
    let ring = PolyRing { field, caps: vec![None; m.rows()], max_degree: d };
    let lins: Vec<Poly> = (0..m.cols())
        .map(|i| {
            let mut p = Poly::default();
            for j in 0..m.rows() {
                let x = m.get(j, i);
                if x != 0 {
                    ring.add_assign(&mut p, &ring.var(j), x);
                }
            }
            p
        })
        .collect();
    let index: HashMap<&Vec<u64>, usize> = dst.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut out = FpMatrix::zeros(field, dst.len(), src.len());
    let mut memo: HashMap<Vec<u64>, Poly> = HashMap::new();
    for (c, alpha) in src.iter().enumerate() {
        let img = power_product(&ring, &lins, alpha, &mut memo);
        for (mono, &x) in &img.0 {
            out.add_to(index[mono], c, x);
        }
    }
    out
}

fn power_product(ring: &PolyRing, lins: &[Poly], alpha: &[u64], memo: &mut HashMap<Vec<u64>, Poly>) -> Poly {
    if let Some(p) = memo.get(alpha) {
        return p.clone();
    }
    let out = match alpha.iter().position(|&a| a > 0) {
        None => ring.one(),
        Some(j) => {
            let mut rest = alpha.to_vec();
            rest[j] -= 1;
            let r = power_product(ring, lins, &rest, memo);
            ring.mul(&r, &lins[j])
        }
    };
    memo.insert(alpha.to_vec(), out.clone());
    out
}

fn determinant(field: Fp, mut a: Vec<Vec<u8>>) -> u8 {
    let n = a.len();
    let mut det = 1u8;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| a[r][c] != 0) else {
            return 0;
        };
        if piv != c {
            a.swap(piv, c);
            det = field.neg(det);
        }
        det = field.mul(det, a[c][c]);
        let inv = field.inv(a[c][c]);
        for r in c + 1..n {
            let x = field.mul(a[r][c], inv);
            if x != 0 {
                let (upper, lower) = a.split_at_mut(r);
                for (dst, &src) in lower[0][c..n].iter_mut().zip(&upper[c][c..n]) {
                    *dst = field.sub(*dst, field.mul(x, src));
                }
            }
        }
    }
    det
}

/// Matrix of `Λ^d(M)` in the bases of increasing `d`-subsets: the `d × d` minors.
pub fn exterior_power_matrix(field: Fp, m: &FpMatrix, d: usize) -> FpMatrix {
    let src = wedge_basis(m.cols(), d);
    let dst = wedge_basis(m.rows(), d);
    let mut out = FpMatrix::zeros(field, dst.len(), src.len());
    for (c, cols) in src.iter().enumerate() {
        for (r, rows) in dst.iter().enumerate() {
            let minor: Vec<Vec<u8>> = rows.iter().map(|&i| cols.iter().map(|&j| m.get(i, j)).collect()).collect();
            let x = determinant(field, minor);
            if x != 0 {
                out.set(r, c, x as i64);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PowerKind {
    Sym,
    Ext,
    Div,
}

struct Power {
    inner: FunctorRef,
    d: usize,
    kind: PowerKind,
}

impl Power {
    fn dim(&self, a: &Object) -> Result<usize> {
        let n = self.inner.dim(a)?;
        let dim = match self.kind {
            PowerKind::Sym | PowerKind::Div if self.d == 0 => 1,
            PowerKind::Sym | PowerKind::Div => binomial(n + self.d - 1, self.d),
            PowerKind::Ext => binomial(n, self.d),
        };
        check_dim(&self.name(), a, dim)
    }

    fn name(&self) -> String {
        let s = match self.kind {
            PowerKind::Sym => "S",
            PowerKind::Ext => "L",
            PowerKind::Div => "G",
        };
        format!("{s}^{} . ({})", self.d, self.inner.name())
    }

    fn act(&self, f: &Morphism) -> Result<FpMatrix> {
        let field = self.inner.skeleton().field();
        let m = self.inner.act(f)?;
        Ok(match self.kind {
            PowerKind::Sym => sym_power_matrix(field, &m, self.d),
            PowerKind::Ext => exterior_power_matrix(field, &m, self.d),
            PowerKind::Div => sym_power_matrix(field, &m.transpose(), self.d).transpose(),
        })
    }
}

macro_rules! power_functor {
    ($name:ident, $kind:expr, $doc:literal) => {
        #[doc = $doc]
        pub struct $name(Power);

        impl $name {
            pub fn new(inner: FunctorRef, d: usize) -> Self {
                $name(Power { inner, d, kind: $kind })
            }
        }

        impl Functor for $name {
            fn skeleton(&self) -> &Arc<Skeleton> {
                self.0.inner.skeleton()
            }

            fn name(&self) -> String {
                self.0.name()
            }

            fn dim(&self, a: &Object) -> Result<usize> {
                self.0.dim(a)
            }

            fn act(&self, f: &Morphism) -> Result<FpMatrix> {
                self.0.act(f)
            }

            fn beyond_skeleton(&self) -> bool {
                self.0.inner.beyond_skeleton()
            }
        }
    };
}

power_functor!(SymmetricPower, PowerKind::Sym, "`S^d ∘ F` (classical symmetric power, monomial basis).");
power_functor!(ExteriorPower, PowerKind::Ext, "`Λ^d ∘ F` (basis of increasing wedges).");
power_functor!(
    DividedPower,
    PowerKind::Div,
    "`Γ^d ∘ F = (S^d ∘ F^∨)^∨`, in the basis `γ_α` dual to the monomials of the dual."
);

/// The dual `DF(a) = F(a^∨)^∨` on a self-dual skeleton: `DF(f) = F(f^∨)^T`.
pub struct DualFunctor {
    inner: FunctorRef,
}

impl DualFunctor {
    pub fn new(inner: FunctorRef) -> Result<Self> {
        if !inner.skeleton().is_self_dual() {
            return Err(Error::Invalid("duals need a skeleton of finite generators".into()));
        }
        Ok(DualFunctor { inner })
    }
}

impl Functor for DualFunctor {
    fn skeleton(&self) -> &Arc<Skeleton> {
        self.inner.skeleton()
    }

    fn name(&self) -> String {
        format!("D({})", self.inner.name())
    }

    fn dim(&self, a: &Object) -> Result<usize> {
        self.inner.dim(a)
    }

    fn act(&self, f: &Morphism) -> Result<FpMatrix> {
        Ok(self.inner.act(&self.skeleton().dual(f)?)?.transpose())
    }

    fn beyond_skeleton(&self) -> bool {
        self.inner.beyond_skeleton()
    }
}

/// Objectwise tensor product (Kronecker bases, left factor major).
pub struct TensorFunctor {
    left: FunctorRef,
    right: FunctorRef,
}

impl TensorFunctor {
    pub fn new(left: FunctorRef, right: FunctorRef) -> Self {
        TensorFunctor { left, right }
    }
}

impl Functor for TensorFunctor {
    fn skeleton(&self) -> &Arc<Skeleton> {
        self.left.skeleton()
    }

    fn name(&self) -> String {
        format!("({}) * ({})", self.left.name(), self.right.name())
    }

    fn dim(&self, a: &Object) -> Result<usize> {
        check_dim(&self.name(), a, self.left.dim(a)? * self.right.dim(a)?)
    }

    fn act(&self, f: &Morphism) -> Result<FpMatrix> {
        Ok(self.left.act(f)?.kronecker(&self.right.act(f)?))
    }

    fn beyond_skeleton(&self) -> bool {
        self.left.beyond_skeleton() && self.right.beyond_skeleton()
    }
}

/// Objectwise direct sum.
pub struct DirectSumFunctor {
    parts: Vec<FunctorRef>,
}

impl DirectSumFunctor {
    pub fn new(parts: Vec<FunctorRef>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Invalid("empty direct sum".into()));
        }
        Ok(DirectSumFunctor { parts })
    }
}

impl Functor for DirectSumFunctor {
    fn skeleton(&self) -> &Arc<Skeleton> {
        self.parts[0].skeleton()
    }

    fn name(&self) -> String {
        self.parts.iter().map(|p| p.name()).collect::<Vec<_>>().join(" + ")
    }

    fn dim(&self, a: &Object) -> Result<usize> {
        self.parts.iter().map(|p| p.dim(a)).sum()
    }

    fn act(&self, f: &Morphism) -> Result<FpMatrix> {
        let field = self.skeleton().field();
        self.parts.iter().try_fold(FpMatrix::zeros(field, 0, 0), |acc, p| Ok(acc.direct_sum(&p.act(f)?)))
    }

    fn beyond_skeleton(&self) -> bool {
        self.parts.iter().all(|p| p.beyond_skeleton())
    }
}
