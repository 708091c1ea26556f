//! Stabilization complexes from the cross-effect comonad
//! `T(F)(a) = cr_{n+1}(F)(a, ..., a)` with counit induced by the fold.
//!
//! With `N = n + 1`, `T^i(F)(a)` is realized inside `F(N^i·a)`: the copies of
//! `a` are indexed by words `w` of length `i` over `0..N` (first letter most
//! significant), and `T^i(F)(a)` is the image of the commuting idempotents
//! `1 - F(κ_{l,j})`, where `κ_{l,j}` kills the copies whose letter `l` is `j`.
//! The face `d_j = T^j ε T^{i-1-j}` is `F` of the fold along letter `i - j`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::addcat::{DirectSum, Morphism, Object, Skeleton};
use crate::error::{Error, Result};
use crate::functor::{DualFunctor, Functor, FunctorRef};
use crate::linalg::{ChainComplex, FpMatrix, Subspace};
use crate::polyfilt::{p_trunc, q_trunc};

/// `T^i(F)(a)` as a split summand of `F(N^i·a)`.
pub struct Term {
    pub ambient: Object,
    /// The idempotent with image the term; restricted to the term it is the identity.
    pub idempotent: FpMatrix,
    pub space: Subspace,
}

impl Term {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Coordinates of a vector of the term in the reduced echelon basis.
    fn coords(&self, v: &[u8]) -> Vec<u8> {
        self.space.pivots().iter().map(|&p| v[p]).collect()
    }
}

/// The complex evaluated at one object.
pub struct DAt {
    pub object: Object,
    pub terms: Vec<Term>,
    /// `faces[i][j] : term_i → term_{i-1}` in term coordinates (`faces[0]` is empty).
    pub faces: Vec<Vec<FpMatrix>>,
    pub complex: ChainComplex,
    /// Whether some `N^i·a` lies past the skeleton bound.
    pub beyond_skeleton: bool,
}

impl DAt {
    pub fn term_dims(&self) -> Vec<usize> {
        self.terms.iter().map(Term::dim).collect()
    }

    /// `H_i` for `i < i_max`; the top degree lacks its incoming differential.
    pub fn homology_dims(&self) -> Vec<usize> {
        let mut h = self.complex.homology_dims();
        h.pop();
        h
    }

    /// `d_a d_b = d_{b-1} d_a` for `a < b` at every term.
    pub fn simplicial_identities_hold(&self) -> Result<bool> {
        for i in 2..self.faces.len() {
            for b in 0..i {
                for a in 0..b {
                    let lhs = self.faces[i - 1][a].mul(&self.faces[i][b])?;
                    let rhs = self.faces[i - 1][b - 1].mul(&self.faces[i][a])?;
                    if lhs != rhs {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Each idempotent squares to itself and fixes its term.
    pub fn retractions_hold(&self) -> Result<bool> {
        for t in &self.terms {
            let e = &t.idempotent;
            let basis = t.space.basis_matrix();
            if e.mul(e)? != *e || e.mul(&basis)? != basis {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn letter(w: usize, l: usize, i: usize, n: usize) -> usize {
    w / n.pow((i - l) as u32) % n
}

/// `w` with letter `l` removed.
fn drop_letter(w: usize, l: usize, i: usize, n: usize) -> usize {
    let low = n.pow((i - l) as u32);
    let high = w / (low * n);
    high * low + w % low
}

struct Builder<'a> {
    sk: &'a Skeleton,
    f: &'a dyn Functor,
    a: &'a Object,
    n: usize,
}

impl Builder<'_> {
    fn sum(&self, i: usize) -> Result<DirectSum> {
        self.sk.direct_sum(&vec![self.a.clone(); self.n.pow(i as u32)])
    }

    fn check(&self, ds: &DirectSum) -> Result<()> {
        let k = self.sk.k();
        if ds.object.total() > k && !self.f.beyond_skeleton() {
            return Err(Error::Guard(format!("{} needs {} with total multiplicity > K = {k}", self.f.name(), ds.object)));
        }
        Ok(())
    }

    /// `Σ_w ι_{g(w)} π_w` over the words `w` selected by `keep`.
    fn copy_map(
        &self,
        src: &DirectSum,
        dst: &DirectSum,
        keep: impl Fn(usize) -> bool,
        g: impl Fn(usize) -> usize,
    ) -> Result<Morphism> {
        let mut acc = self.sk.zero_morphism(&src.object, &dst.object);
        for (w, p) in src.projections.iter().enumerate() {
            if keep(w) {
                acc = self.sk.add(&acc, &self.sk.compose(&dst.inclusions[g(w)], p)?)?;
            }
        }
        Ok(acc)
    }

    fn term(&self, i: usize, ds: &DirectSum) -> Result<Term> {
        let field = self.sk.field();
        let dim = self.f.dim(&ds.object)?;
        let id = FpMatrix::identity(field, dim);
        let mut e = id.clone();
        for l in 1..=i {
            for j in 0..self.n {
                let kappa = self.copy_map(ds, ds, |w| letter(w, l, i, self.n) != j, |w| w)?;
                e = id.sub(&self.f.act(&kappa)?)?.mul(&e)?;
            }
        }
        let space = Subspace::column_span(&e).into_reduced();
        Ok(Term { ambient: ds.object.clone(), idempotent: e, space })
    }
}

fn evaluate(f: &dyn Functor, n: usize, i_max: usize, a: &Object) -> Result<DAt> {
    let sk = f.skeleton();
    let field = sk.field();
    let b = Builder { sk, f, a, n: n + 1 };
    let sums: Vec<DirectSum> = (0..=i_max).map(|i| b.sum(i)).collect::<Result<_>>()?;
    for ds in &sums {
        b.check(ds)?;
    }
    let terms: Vec<Term> = sums.iter().enumerate().map(|(i, ds)| b.term(i, ds)).collect::<Result<_>>()?;
    let mut faces = vec![Vec::new()];
    let mut differentials = Vec::new();
    for i in 1..=i_max {
        let basis = terms[i].space.basis();
        let mut fi = Vec::with_capacity(i);
        let mut d = FpMatrix::zeros(field, terms[i - 1].dim(), terms[i].dim());
        for j in 0..i {
            let l = i - j;
            let fold = b.copy_map(&sums[i], &sums[i - 1], |_| true, |w| drop_letter(w, l, i, b.n))?;
            let m = f.act(&fold)?;
            let cols: Vec<Vec<u8>> = basis
                .iter()
                .map(|v| {
                    let y = m.apply(v);
                    if terms[i - 1].space.contains(&y) {
                        Ok(terms[i - 1].coords(&y))
                    } else {
                        Err(Error::Invalid(format!("face d_{j} leaves T^{}", i - 1)))
                    }
                })
                .collect::<Result<_>>()?;
            let face = FpMatrix::from_columns(field, terms[i - 1].dim(), &cols);
            let sign = if j % 2 == 0 { 1 } else { field.neg(1) };
            d = d.combine(&face, sign)?;
            fi.push(face);
        }
        faces.push(fi);
        differentials.push(d);
    }
    let complex = ChainComplex::new(field, terms.iter().map(Term::dim).collect(), differentials)?;
    let beyond_skeleton = sums.last().is_some_and(|ds| ds.object.total() > sk.k());
    Ok(DAt { object: a.clone(), terms, faces, complex, beyond_skeleton })
}

/// The complex `D^{(n)}_*(F)` in degrees `0..=i_max` at the given objects.
pub struct DComplex {
    pub functor: FunctorRef,
    pub n: usize,
    pub i_max: usize,
    pub at: Vec<DAt>,
}

/// Nonzero skeleton objects `a` with `(n+1)·a` in the skeleton, where
/// `H_0` and `q_n` can both be read without leaving it.
pub fn default_objects(sk: &Skeleton, n: usize) -> Vec<Object> {
    sk.objects().iter().filter(|a| !a.is_zero() && (n + 1) * a.total() <= sk.k()).cloned().collect()
}

/// Builds the complex at `objects`. Terms at `N^i·a` past the bound `K` are
/// evaluated only for functors defined on the whole category.
pub fn build_dcomplex(f: FunctorRef, n: usize, i_max: usize, objects: &[Object]) -> Result<DComplex> {
    if n == 0 {
        return Err(Error::Invalid("the arity n must be positive".into()));
    }
    let at = objects.par_iter().map(|a| evaluate(f.as_ref(), n, i_max, a)).collect::<Result<_>>()?;
    Ok(DComplex { functor: f, n, i_max, at })
}

/// The dual complex: the linear dual of `D^{(n)}_*(DF)`, a cochain complex
/// whose degree-0 term is `F(a)` (objects of a self-dual skeleton).
pub fn dual_dcomplex(f: FunctorRef, n: usize, i_max: usize, objects: &[Object]) -> Result<DComplex> {
    let d: FunctorRef = Arc::new(DualFunctor::new(f)?);
    build_dcomplex(d, n, i_max, objects)
}

impl DComplex {
    /// `im(d_1) = ker(F(a) → q_n F(a))` as subspaces at every object.
    pub fn h0_is_qn(&self) -> Result<bool> {
        let q = q_trunc(self.functor.clone(), self.n)?;
        self.at.iter().try_fold(true, |ok, x| {
            let bound = x.complex.differential(1).map_or_else(
                || Subspace::new(self.functor.skeleton().field(), x.terms[0].dim()),
                Subspace::column_span,
            );
            Ok(ok && bound.same_as(&*q.subspace(&x.object)?))
        })
    }

    /// For a dual complex built from `DF`: `ker(δ^0) = p_n F(a)` as subspaces.
    pub fn dual_h0_is_pn(&self, f: &FunctorRef) -> Result<bool> {
        let p = p_trunc(f.clone(), self.n)?;
        self.at.iter().try_fold(true, |ok, x| {
            let cocycles = match x.complex.differential(1) {
                Some(d) => Subspace::column_span(&d.transpose().kernel()),
                None => Subspace::full(f.skeleton().field(), x.terms[0].dim()),
            };
            Ok(ok && cocycles.same_as(&*p.subspace(&x.object)?))
        })
    }

    pub fn higher_terms_vanish(&self) -> bool {
        self.at.iter().all(|x| x.terms[1..].iter().all(|t| t.dim() == 0))
    }

    pub fn simplicial_identities_hold(&self) -> Result<bool> {
        self.at.iter().try_fold(true, |ok, x| Ok(ok && x.simplicial_identities_hold()?))
    }

    pub fn retractions_hold(&self) -> Result<bool> {
        self.at.iter().try_fold(true, |ok, x| Ok(ok && x.retractions_hold()?))
    }

    /// Cohomology of the linear dual: `H^i` for `i < i_max`.
    pub fn cohomology_dims(&self) -> Vec<Vec<usize>> {
        self.at.iter().map(|x| x.complex.dual().cohomology_dims()[..self.i_max].to_vec()).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DoldObject {
    pub object: Object,
    pub term_dims: Vec<usize>,
    pub homology: Vec<usize>,
    pub dual_cohomology: Vec<usize>,
    pub beyond_skeleton: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DoldReport {
    pub functor: String,
    pub n: usize,
    pub i_max: usize,
    pub objects: Vec<DoldObject>,
    pub h0_is_qn: bool,
    pub dual_h0_is_pn: bool,
    pub simplicial_identities: bool,
    pub retractions: bool,
    pub higher_terms_vanish: bool,
}

/// Primal and dual complexes with every check.
pub fn dold_report(f: FunctorRef, n: usize, i_max: usize, objects: &[Object]) -> Result<DoldReport> {
    let primal = build_dcomplex(f.clone(), n, i_max, objects)?;
    let dual = dual_dcomplex(f.clone(), n, i_max, objects)?;
    let dual_h = dual.cohomology_dims();
    let objs = primal
        .at
        .iter()
        .zip(dual_h)
        .map(|(x, h)| DoldObject {
            object: x.object.clone(),
            term_dims: x.term_dims(),
            homology: x.homology_dims(),
            dual_cohomology: h,
            beyond_skeleton: x.beyond_skeleton,
        })
        .collect();
    Ok(DoldReport {
        functor: f.name(),
        n,
        i_max,
        objects: objs,
        h0_is_qn: primal.h0_is_qn()?,
        dual_h0_is_pn: dual.dual_h0_is_pn(&f)?,
        simplicial_identities: primal.simplicial_identities_hold()? && dual.simplicial_identities_hold()?,
        retractions: primal.retractions_hold()? && dual.retractions_hold()?,
        higher_terms_vanish: primal.higher_terms_vanish(),
    })
}

#[cfg(test)]
mod tests;
