//! Cross-effects, polynomial degree, and the truncations `q_d` (largest
//! quotient of degree `<= d`) and `p_d` (largest subfunctor of degree `<= d`).

use std::sync::Arc;

use serde::Serialize;

use crate::addcat::{DirectSum, Object, Skeleton};
use crate::error::{Error, Result};
use crate::functor::{Functor, FunctorRef, NatTransform, QuotientFunctor, SubFunctor};
use crate::linalg::{FpMatrix, Subspace};

/// `cr_n(F)(a_1, ..., a_n)` as a subspace of `F(a_1 ⊕ ... ⊕ a_n)`.
#[derive(Clone, Debug)]
pub struct CrossEffect {
    pub tuple: Vec<Object>,
    pub sum: DirectSum,
    /// Product of the idempotents `1 - F(collapse_i)`, in increasing `i`.
    pub idempotent: FpMatrix,
    pub space: Subspace,
}

impl CrossEffect {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

fn total(tuple: &[Object]) -> usize {
    tuple.iter().map(Object::total).sum()
}

/// Whether `F` may be evaluated at an object of total multiplicity `n`.
fn check_size(f: &dyn Functor, n: usize) -> Result<()> {
    let k = f.skeleton().k();
    if n <= k || f.beyond_skeleton() {
        Ok(())
    } else {
        Err(Error::Guard(format!("{} needs an object of total multiplicity {n} > K = {k}", f.name())))
    }
}

fn cross_effect_unchecked(f: &dyn Functor, tuple: &[Object]) -> Result<CrossEffect> {
    let sk = f.skeleton();
    let field = sk.field();
    let sum = sk.direct_sum(tuple)?;
    let n = f.dim(&sum.object)?;
    let id = FpMatrix::identity(field, n);
    let mut e = id.clone();
    for (inc, proj) in sum.inclusions.iter().zip(&sum.projections) {
        let keep = sk.compose(inc, proj)?;
        let collapse = sk.add(&sk.identity(&sum.object), &sk.scalar(&keep, -1))?;
        e = id.sub(&f.act(&collapse)?)?.mul(&e)?;
    }
    let space = Subspace::column_span(&e);
    Ok(CrossEffect { tuple: tuple.to_vec(), sum, idempotent: e, space })
}

/// `cr_n(F)(a_1, ..., a_n)`; the direct sum must lie in the skeleton.
pub fn cross_effect(f: &dyn Functor, tuple: &[Object]) -> Result<CrossEffect> {
    let k = f.skeleton().k();
    let n = total(tuple);
    if n > k {
        return Err(Error::Guard(format!("cross-effect at a sum of total multiplicity {n} > K = {k}")));
    }
    cross_effect_unchecked(f, tuple)
}

/// Nondecreasing `n`-tuples of nonzero skeleton objects whose sum fits in the skeleton.
pub fn admissible_tuples(sk: &Skeleton, n: usize) -> Vec<Vec<Object>> {
    let objs: Vec<&Object> = sk.objects().iter().filter(|a| !a.is_zero()).collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec<'a>(
        objs: &[&'a Object],
        start: usize,
        n: usize,
        left: usize,
        cur: &mut Vec<&'a Object>,
        out: &mut Vec<Vec<Object>>,
    ) {
        if cur.len() == n {
            out.push(cur.iter().map(|&a| a.clone()).collect());
            return;
        }
        for i in start..objs.len() {
            let t = objs[i].total();
            if t <= left {
                cur.push(objs[i]);
                rec(objs, i, n, left - t, cur, out);
                cur.pop();
            }
        }
    }
    rec(&objs, 0, n, sk.k(), &mut cur, &mut out);
    out
}

/// Outcome of a degree test up to `d_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub d_max: usize,
    /// Least `d <= d_max` with `cr_{d+1}` vanishing on every admissible tuple.
    pub degree: Option<usize>,
    /// A tuple where `cr_{d_max+1}` is nonzero, with its dimension, when the degree exceeds `d_max`.
    pub witness: Option<(Vec<Object>, usize)>,
    pub tuples_checked: usize,
}

/// Polynomial degree detected by cross-effects at every admissible tuple of skeleton objects.
pub fn poly_degree(f: &dyn Functor, d_max: usize) -> Result<DegreeReport> {
    let sk = f.skeleton();
    if d_max + 1 > sk.k() {
        return Err(Error::Guard(format!("degree test up to {d_max} needs {} summands, K = {}", d_max + 1, sk.k())));
    }
    let mut checked = 0;
    let mut witness = None;
    for d in 0..=d_max {
        witness = None;
        for t in admissible_tuples(sk, d + 1) {
            checked += 1;
            let c = cross_effect(f, &t)?;
            if c.dim() > 0 {
                witness = Some((t, c.dim()));
                break;
            }
        }
        if witness.is_none() {
            return Ok(DegreeReport { d_max, degree: Some(d), witness: None, tuples_checked: checked });
        }
    }
    Ok(DegreeReport { d_max, degree: None, witness, tuples_checked: checked })
}

/// `q_d F` with its projection and `p_d F` with its inclusion.
pub struct PolyTruncation {
    pub d: usize,
    pub functor: FunctorRef,
    pub quotient: Arc<QuotientFunctor>,
    pub projection: Arc<NatTransform>,
    pub sub: Arc<SubFunctor>,
    pub inclusion: Arc<NatTransform>,
    /// Skeleton objects `a` with `(d+1)·a` outside the skeleton, where `F` is
    /// evaluated past the bound `K`.
    pub virtual_objects: Vec<Object>,
}

impl PolyTruncation {
    pub fn guard_exceeded(&self) -> bool {
        !self.virtual_objects.is_empty()
    }
}

/// `im(F(∇) ∘ cr_{d+1}(F)(a, ..., a))` for the fold `∇`: the kernel of `F(a) → q_d F(a)`.
fn q_subspace(f: &dyn Functor, a: &Object, d: usize) -> Result<Subspace> {
    let sk = f.skeleton();
    check_size(f, a.total() * (d + 1))?;
    let c = cross_effect_unchecked(f, &vec![a.clone(); d + 1])?;
    let fold = f.act(&sk.fold(a, d + 1)?)?;
    Ok(Subspace::column_span(&fold.mul(&c.idempotent)?))
}

/// Kernel of `F(a) → cr_{d+1}(F)(a, ..., a)` through the diagonal.
fn p_subspace(f: &dyn Functor, a: &Object, d: usize) -> Result<Subspace> {
    let sk = f.skeleton();
    check_size(f, a.total() * (d + 1))?;
    let c = cross_effect_unchecked(f, &vec![a.clone(); d + 1])?;
    let diag = f.act(&sk.diagonal(a, d + 1)?)?;
    Ok(Subspace::column_span(&c.idempotent.mul(&diag)?.kernel()))
}

/// Builds `q_d F` and `p_d F`. When `F` is only defined on the skeleton,
/// every object must satisfy `(d+1)·a ∈` skeleton.
pub fn truncate(f: FunctorRef, d: usize) -> Result<PolyTruncation> {
    let sk = f.skeleton().clone();
    let virtual_objects: Vec<Object> =
        sk.objects().iter().filter(|a| a.total() * (d + 1) > sk.k()).cloned().collect();
    if let Some(a) = virtual_objects.first() {
        check_size(f.as_ref(), a.total() * (d + 1))?;
    }
    let fq = f.clone();
    let quotient = Arc::new(QuotientFunctor::new(format!("q_{d}({})", f.name()), f.clone(), move |a| {
        q_subspace(fq.as_ref(), a, d)
    }).allow_beyond_skeleton(true));
    let fp = f.clone();
    let sub = Arc::new(SubFunctor::new(format!("p_{d}({})", f.name()), f.clone(), move |a| {
        p_subspace(fp.as_ref(), a, d)
    }).allow_beyond_skeleton(true));
    Ok(PolyTruncation {
        d,
        functor: f,
        projection: Arc::new(quotient.projection()),
        inclusion: Arc::new(sub.inclusion()),
        quotient,
        sub,
        virtual_objects,
    })
}

/// `q_d F` alone.
pub fn q_trunc(f: FunctorRef, d: usize) -> Result<Arc<QuotientFunctor>> {
    Ok(truncate(f, d)?.quotient)
}

/// `p_d F` alone.
pub fn p_trunc(f: FunctorRef, d: usize) -> Result<Arc<SubFunctor>> {
    Ok(truncate(f, d)?.sub)
}
