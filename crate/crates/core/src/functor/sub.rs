//! Subfunctors and quotients given by a per-object subspace rule, and the
//! kernel, image and cokernel of a natural transformation.

use std::sync::Arc;

use super::{guard, Functor, FunctorRef, Memo, NatTransform};
use crate::addcat::{Morphism, Object, Skeleton};
use crate::error::{Error, Result};
use crate::linalg::{FpMatrix, Subspace};

type SubspaceRule = dyn Fn(&Object) -> Result<Subspace> + Send + Sync;

struct Rule {
    parent: FunctorRef,
    rule: Box<SubspaceRule>,
    memo: Memo<Subspace>,
    beyond_skeleton: bool,
}

impl Rule {
    /// The subspace at `a`, in reduced echelon form.
    fn at(&self, a: &Object) -> Result<Arc<Subspace>> {
        if !self.beyond_skeleton {
            self.parent.skeleton().check_contains(a)?;
        }
        guard(self.parent.as_ref(), a)?;
        self.memo.get_or(a, || {
            let s = (self.rule)(a)?;
            if s.ambient() != self.parent.dim(a)? {
                return Err(Error::Dimension(format!("subspace at {a} has the wrong ambient dimension")));
            }
            Ok(s.into_reduced())
        })
    }
}

/// `a ↦ S(a) ⊆ F(a)`; the rule must be stable under every `F(f)`. The basis
/// of `S(a)` is its reduced echelon basis, so coordinates are read off at pivots.
pub struct SubFunctor {
    name: String,
    rule: Rule,
}

impl SubFunctor {
    /// Marks the rule as valid at objects past the bound `K` (only honoured
    /// when the parent is).
    pub fn allow_beyond_skeleton(mut self, yes: bool) -> Self {
        self.rule.beyond_skeleton = yes && self.rule.parent.beyond_skeleton();
        self
    }

    pub fn new(
        name: impl Into<String>,
        parent: FunctorRef,
        rule: impl Fn(&Object) -> Result<Subspace> + Send + Sync + 'static,
    ) -> Self {
        SubFunctor { name: name.into(), rule: Rule { parent, rule: Box::new(rule), memo: Memo::default(), beyond_skeleton: false } }
    }

    pub fn parent(&self) -> &FunctorRef {
        &self.rule.parent
    }

    pub fn subspace(&self, a: &Object) -> Result<Arc<Subspace>> {
        self.rule.at(a)
    }

    /// The inclusion `S → F`.
    pub fn inclusion(self: &Arc<Self>) -> NatTransform {
        let s = self.clone();
        NatTransform::new(self.clone(), self.rule.parent.clone(), move |a| Ok(s.subspace(a)?.basis_matrix()))
    }
}

impl Functor for SubFunctor {
    fn skeleton(&self) -> &Arc<Skeleton> {
        self.rule.parent.skeleton()
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn dim(&self, a: &Object) -> Result<usize> {
        Ok(self.subspace(a)?.dim())
    }

    fn act(&self, f: &Morphism) -> Result<FpMatrix> {
        let (sa, sb) = (self.subspace(&f.source)?, self.subspace(&f.target)?);
        let m = self.rule.parent.act(f)?;
        let cols: Vec<Vec<u8>> = sa
            .basis()
            .iter()
            .map(|v| {
                let w = m.apply(v);
                if !sb.contains(&w) {
                    return Err(Error::Invalid(format!("{} is not stable under {f:?}", self.name)));
                }
                Ok(sb.pivots().iter().map(|&p| w[p]).collect())
            })
            .collect::<Result<_>>()?;
        Ok(FpMatrix::from_columns(self.skeleton().field(), sb.dim(), &cols))
    }

    fn beyond_skeleton(&self) -> bool {
        self.rule.beyond_skeleton
    }
}

/// `a ↦ F(a) / S(a)`, with basis the classes of the unit vectors off the pivots of `S(a)`.
pub struct QuotientFunctor {
    name: String,
    rule: Rule,
}

impl QuotientFunctor {
    /// Marks the rule as valid at objects past the bound `K` (only honoured
    /// when the parent is).
    pub fn allow_beyond_skeleton(mut self, yes: bool) -> Self {
        self.rule.beyond_skeleton = yes && self.rule.parent.beyond_skeleton();
        self
    }

    pub fn new(
        name: impl Into<String>,
        parent: FunctorRef,
        rule: impl Fn(&Object) -> Result<Subspace> + Send + Sync + 'static,
    ) -> Self {
        QuotientFunctor { name: name.into(), rule: Rule { parent, rule: Box::new(rule), memo: Memo::default(), beyond_skeleton: false } }
    }

    pub fn parent(&self) -> &FunctorRef {
        &self.rule.parent
    }

    pub fn subspace(&self, a: &Object) -> Result<Arc<Subspace>> {
        self.rule.at(a)
    }

    /// Class of `v ∈ F(a)` in the quotient basis.
    pub fn class_of(&self, a: &Object, v: &[u8]) -> Result<Vec<u8>> {
        let s = self.subspace(a)?;
        Ok(s.quotient_coords(v, &s.complement_indices()))
    }

    /// The projection `F → F/S`.
    pub fn projection(self: &Arc<Self>) -> NatTransform {
        let q = self.clone();
        NatTransform::new(self.rule.parent.clone(), self.clone(), move |a| {
            let s = q.subspace(a)?;
            let comp = s.complement_indices();
            let n = s.ambient();
            let field = q.skeleton().field();
            let cols: Vec<Vec<u8>> = (0..n)
                .map(|i| {
                    let mut e = vec![0u8; n];
                    e[i] = 1;
                    s.quotient_coords(&e, &comp)
                })
                .collect();
            Ok(FpMatrix::from_columns(field, comp.len(), &cols))
        })
    }
}

impl Functor for QuotientFunctor {
    fn skeleton(&self) -> &Arc<Skeleton> {
        self.rule.parent.skeleton()
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn dim(&self, a: &Object) -> Result<usize> {
        let s = self.subspace(a)?;
        Ok(s.ambient() - s.dim())
    }

    fn act(&self, f: &Morphism) -> Result<FpMatrix> {
        let (sa, sb) = (self.subspace(&f.source)?, self.subspace(&f.target)?);
        let (ca, cb) = (sa.complement_indices(), sb.complement_indices());
        let m = self.rule.parent.act(f)?;
        let cols: Vec<Vec<u8>> = ca.iter().map(|&i| sb.quotient_coords(&m.column(i), &cb)).collect();
        Ok(FpMatrix::from_columns(self.skeleton().field(), cb.len(), &cols))
    }

    fn beyond_skeleton(&self) -> bool {
        self.rule.beyond_skeleton
    }
}

impl NatTransform {
    pub fn kernel(self: &Arc<Self>) -> SubFunctor {
        let eta = self.clone();
        SubFunctor::new(format!("ker({} -> {})", self.source.name(), self.target.name()), self.source.clone(), move |a| {
            Ok(Subspace::column_span(&eta.component(a)?.kernel()))
        })
    }

    pub fn image(self: &Arc<Self>) -> SubFunctor {
        let eta = self.clone();
        SubFunctor::new(format!("im({} -> {})", self.source.name(), self.target.name()), self.target.clone(), move |a| {
            Ok(Subspace::column_span(&*eta.component(a)?))
        })
    }

    pub fn cokernel(self: &Arc<Self>) -> QuotientFunctor {
        let eta = self.clone();
        QuotientFunctor::new(
            format!("coker({} -> {})", self.source.name(), self.target.name()),
            self.target.clone(),
            move |a| Ok(Subspace::column_span(&*eta.component(a)?)),
        )
    }

    /// Exactness of `F → G → H` at `G` on every skeleton object.
    pub fn is_exact_with(&self, other: &NatTransform) -> Result<bool> {
        for a in self.skeleton().objects() {
            let f = self.component(a)?;
            let g = other.component(a)?;
            if !g.mul(&f)?.is_zero() || f.rank() + g.rank() != f.rows() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
