//! Functors from a skeleton to finite-dimensional F_p-vector spaces, natural
//! transformations between them, and the standard constructions on them.

mod basic;
mod classical;
mod expr;
mod ops;
pub(crate) mod poly;
mod sub;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::addcat::{Morphism, Object, Skeleton};
use crate::error::{Error, Result};
use crate::linalg::{FpMatrix, Subspace};

pub use basic::{AdditiveTensor, Constant, Linearization, ReducedLinearization, TensorFp, TruncatedPoly};
pub use classical::{frobenius, norm, verschiebung, FrobeniusSequence};
pub use expr::{parse_functor, FunctorExpr};
pub use ops::{DirectSumFunctor, DividedPower, DualFunctor, ExteriorPower, SymmetricPower, TensorFunctor};
pub use sub::{QuotientFunctor, SubFunctor};

pub type FunctorRef = Arc<dyn Functor>;

/// Largest space a functor may be asked to build.
pub const MAX_VALUE_DIM: usize = 1 << 14;

pub trait Functor: Send + Sync {
    fn skeleton(&self) -> &Arc<Skeleton>;

    fn name(&self) -> String;

    /// `dim F(a)`.
    fn dim(&self, a: &Object) -> Result<usize>;

    /// Matrix of `F(f) : F(a) → F(b)`.
    fn act(&self, f: &Morphism) -> Result<FpMatrix>;

    /// `F(f) v`.
    fn apply(&self, f: &Morphism, v: &[u8]) -> Result<Vec<u8>> {
        Ok(self.act(f)?.apply(v))
    }

    /// Whether the functor is defined by a formula valid on the whole category
    /// (so it may be evaluated at objects past the bound `K`).
    fn beyond_skeleton(&self) -> bool {
        true
    }
}

/// Rejects objects that a skeleton-only functor cannot evaluate.
pub(crate) fn guard(f: &dyn Functor, a: &Object) -> Result<()> {
    if f.beyond_skeleton() {
        Ok(())
    } else {
        f.skeleton().check_contains(a)
    }
}

pub(crate) fn check_dim(name: &str, a: &Object, n: usize) -> Result<usize> {
    if n > MAX_VALUE_DIM {
        Err(Error::TooLarge(format!("{name}({a}) has dimension {n}")))
    } else {
        Ok(n)
    }
}

/// Per-object memo table.
pub(crate) struct Memo<T> {
    map: Mutex<HashMap<Object, Arc<T>>>,
}

impl<T> Default for Memo<T> {
    fn default() -> Self {
        Memo { map: Mutex::new(HashMap::new()) }
    }
}

impl<T> Memo<T> {
    pub fn get_or(&self, a: &Object, make: impl FnOnce() -> Result<T>) -> Result<Arc<T>> {
        if let Some(v) = self.map.lock().expect("memo lock").get(a) {
            return Ok(v.clone());
        }
        let v = Arc::new(make()?);
        self.map.lock().expect("memo lock").insert(a.clone(), v.clone());
        Ok(v)
    }
}

type ComponentRule = dyn Fn(&Object) -> Result<FpMatrix> + Send + Sync;

/// A natural transformation given by a rule for its components.
pub struct NatTransform {
    pub source: FunctorRef,
    pub target: FunctorRef,
    rule: Box<ComponentRule>,
    memo: Memo<FpMatrix>,
}

impl NatTransform {
    pub fn new(
        source: FunctorRef,
        target: FunctorRef,
        rule: impl Fn(&Object) -> Result<FpMatrix> + Send + Sync + 'static,
    ) -> Self {
        NatTransform { source, target, rule: Box::new(rule), memo: Memo::default() }
    }

    pub fn skeleton(&self) -> &Arc<Skeleton> {
        self.source.skeleton()
    }

    pub fn component(&self, a: &Object) -> Result<Arc<FpMatrix>> {
        self.memo.get_or(a, || {
            let m = (self.rule)(a)?;
            let (r, c) = (self.target.dim(a)?, self.source.dim(a)?);
            if m.rows() != r || m.cols() != c {
                return Err(Error::Dimension(format!(
                    "component at {a} is {}x{}, expected {r}x{c}",
                    m.rows(),
                    m.cols()
                )));
            }
            Ok(m)
        })
    }

    /// Whether `G(f) η_a = η_b F(f)` for every listed morphism.
    pub fn is_natural_on(&self, morphisms: &[Morphism]) -> Result<bool> {
        for f in morphisms {
            let lhs = self.target.act(f)?.mul(&*self.component(&f.source)?)?;
            let rhs = self.component(&f.target)?.mul(&self.source.act(f)?)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Naturality on the generating morphisms of the skeleton.
    pub fn is_natural(&self) -> Result<bool> {
        self.is_natural_on(self.skeleton().generating_set()?)
    }

    /// `other ∘ self`.
    pub fn then(self: &Arc<Self>, other: &Arc<NatTransform>) -> NatTransform {
        let (a, b) = (self.clone(), other.clone());
        NatTransform::new(self.source.clone(), other.target.clone(), move |x| {
            b.component(x)?.mul(&*a.component(x)?)
        })
    }

    pub fn identity(f: FunctorRef) -> NatTransform {
        let g = f.clone();
        NatTransform::new(f.clone(), f, move |a| Ok(FpMatrix::identity(g.skeleton().field(), g.dim(a)?)))
    }
}

/// The transformation `P_a → G` corresponding to `x ∈ G(a)` under Yoneda:
/// component at `b` sends `[u]` to `G(u) x`.
pub fn yoneda_transform(g: FunctorRef, a: &Object, x: Vec<u8>) -> Result<NatTransform> {
    let sk = g.skeleton().clone();
    if x.len() != g.dim(a)? {
        return Err(Error::Dimension("Yoneda element has wrong length".into()));
    }
    let p: FunctorRef = Arc::new(Linearization::new(sk.clone(), a.clone())?);
    let a = a.clone();
    let target = g.clone();
    Ok(NatTransform::new(p, g, move |b| {
        let n = sk.hom_size(&a, b).ok_or_else(|| Error::TooLarge("hom set".into()))?;
        let cols: Vec<Vec<u8>> = (0..n)
            .map(|i| target.apply(&sk.morphism_from_index(&a, b, i), &x))
            .collect::<Result<_>>()?;
        Ok(FpMatrix::from_columns(sk.field(), target.dim(b)?, &cols))
    }))
}

/// Coefficient matrix of the naturality system: unknowns are the entries of
/// `η_b` for every skeleton object `b` (row-major, objects in skeleton order),
/// one block of equations `G(f) η_a - η_b F(f) = 0` per listed morphism.
fn naturality_rows(f: &dyn Functor, g: &dyn Functor, morphisms: &[Morphism]) -> Result<(usize, Vec<Vec<u8>>)> {
    let sk = f.skeleton();
    let field = sk.field();
    let mut offset = HashMap::new();
    let mut n = 0usize;
    for b in sk.objects() {
        offset.insert(b.clone(), n);
        n += g.dim(b)? * f.dim(b)?;
    }
    let mut rows = Vec::new();
    for m in morphisms {
        let (a, b) = (&m.source, &m.target);
        let (fa, fb, ga, gb) = (f.dim(a)?, f.dim(b)?, g.dim(a)?, g.dim(b)?);
        let gf = g.act(m)?;
        let ff = f.act(m)?;
        let (oa, ob) = (offset[a], offset[b]);
        // entry (r, c) of G(f) η_a - η_b F(f), r < gb, c < fa
        for r in 0..gb {
            for c in 0..fa {
                let mut row = vec![0u8; n];
                for k in 0..ga {
                    let x = gf.get(r, k);
                    if x != 0 {
                        row[oa + k * fa + c] = field.add(row[oa + k * fa + c], x);
                    }
                }
                for k in 0..fb {
                    let x = ff.get(k, c);
                    if x != 0 {
                        let i = ob + r * fb + k;
                        row[i] = field.sub(row[i], x);
                    }
                }
                rows.push(row);
            }
        }
    }
    Ok((n, rows))
}

/// `dim Hom(F, G)` by solving the naturality system on the generating morphisms.
pub fn nat_space_dim(f: &dyn Functor, g: &dyn Functor) -> Result<usize> {
    let sk = f.skeleton();
    let (n, rows) = naturality_rows(f, g, sk.generating_set()?)?;
    let mut s = Subspace::new(sk.field(), n);
    for r in &rows {
        s.insert(r);
    }
    Ok(n - s.dim())
}

/// A basis of `Hom(F, G)`, each element as its list of components in skeleton order.
pub fn nat_space_basis(f: &dyn Functor, g: &dyn Functor) -> Result<Vec<Vec<FpMatrix>>> {
    let sk = f.skeleton();
    let field = sk.field();
    let (n, rows) = naturality_rows(f, g, sk.generating_set()?)?;
    let kernel = if rows.is_empty() {
        FpMatrix::identity(field, n)
    } else {
        let m = FpMatrix::from_rows(field, &rows.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect::<Vec<_>>())?;
        m.kernel()
    };
    let mut out = Vec::new();
    for col in kernel.columns() {
        let mut comps = Vec::new();
        let mut off = 0;
        for b in sk.objects() {
            let (gd, fd) = (g.dim(b)?, f.dim(b)?);
            comps.push(FpMatrix::from_fn(field, gd, fd, |r, c| col[off + r * fd + c] as i64));
            off += gd * fd;
        }
        out.push(comps);
    }
    Ok(out)
}

/// Functoriality on identities, on every composable pair of generating
/// morphisms, and on `random_pairs` random composable pairs.
pub fn check_functoriality(f: &dyn Functor, random_pairs: usize, rng: &mut impl Rng) -> Result<bool> {
    let sk = f.skeleton();
    let field = sk.field();
    for a in sk.objects() {
        if f.act(&sk.identity(a))? != FpMatrix::identity(field, f.dim(a)?) {
            return Ok(false);
        }
    }
    let gens = sk.generating_set()?;
    let mut by_source: HashMap<&Object, Vec<&Morphism>> = HashMap::new();
    for g in gens {
        by_source.entry(&g.source).or_default().push(g);
    }
    for u in gens {
        for v in by_source.get(&u.target).into_iter().flatten() {
            if f.act(&sk.compose(v, u)?)? != f.act(v)?.mul(&f.act(u)?)? {
                return Ok(false);
            }
        }
    }
    let objs = sk.objects();
    for _ in 0..random_pairs {
        let a = objs.choose(rng).expect("nonempty");
        let b = objs.choose(rng).expect("nonempty");
        let c = objs.choose(rng).expect("nonempty");
        let (Some(n1), Some(n2)) = (sk.hom_size(a, b), sk.hom_size(b, c)) else {
            continue;
        };
        let u = sk.morphism_from_index(a, b, rng.gen_range(0..n1));
        let v = sk.morphism_from_index(b, c, rng.gen_range(0..n2));
        if f.act(&sk.compose(&v, &u)?)? != f.act(&v)?.mul(&f.act(&u)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Values of `F` at every skeleton object.
pub fn dims_on_skeleton(f: &dyn Functor) -> Result<Vec<usize>> {
    f.skeleton().objects().iter().map(|a| f.dim(a)).collect()
}

#[cfg(test)]
mod tests;
