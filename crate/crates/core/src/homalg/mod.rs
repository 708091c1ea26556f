//! Projective resolutions in the truncated functor category (full mode, by
//! Yoneda projectives `P_a`) and in the degree-`<= d` subcategory (poly mode,
//! by `q_d P_a`), Ext groups, comparison maps and derived functors of `p_d`.

mod ext;
mod lift;

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::addcat::{Morphism, Object, Skeleton};
use crate::error::{Error, Result};
use crate::functor::{Functor, FunctorRef, Linearization, NatTransform, TruncatedPoly};
use crate::linalg::{FpMatrix, PreimageSolver, Subspace};
use crate::polyfilt::poly_degree;

pub use ext::{
    compare, derived_pd, excl_class_check, ext, ext_low, Cohomology, Comparison, ComparisonDegree, ComparisonMap, DerivedPd, ExclReport,
    ExtComplex, ExtTable,
};
pub use lift::{lift, TargetComplex};

/// Generators allowed in one stage of a resolution.
pub const MAX_GENERATORS: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Poly(usize),
}

/// Expresses vectors of a projective `Π_a(b)` as combinations of the images
/// `Π_a(u)(1)` of the universal element along morphisms `u : a → b`.
struct Expansion {
    morphisms: Vec<Morphism>,
    /// `None` when the images are the basis itself (full mode).
    inverse: Option<FpMatrix>,
}

impl Expansion {
    fn coefficients(&self, v: &[u8]) -> Vec<u8> {
        match &self.inverse {
            None => v.to_vec(),
            Some(m) => m.apply(v),
        }
    }
}

/// `⊕_h Π_{a_h}` with `Π_a = P_a` (full mode) or `q_d P_a` (poly mode).
pub struct ProjSum {
    sk: Arc<Skeleton>,
    mode: Mode,
    objects: Vec<Object>,
    parts: Vec<FunctorRef>,
    expansions: Mutex<HashMap<(Object, Object), Arc<Expansion>>>,
}

impl ProjSum {
    pub fn new(sk: Arc<Skeleton>, mode: Mode, objects: Vec<Object>) -> Result<Self> {
        let parts = objects
            .iter()
            .map(|a| -> Result<FunctorRef> {
                Ok(match mode {
                    Mode::Full => Arc::new(Linearization::new(sk.clone(), a.clone())?),
                    Mode::Poly(d) => Arc::new(TruncatedPoly::quotient(sk.clone(), a.clone(), d)?),
                })
            })
            .collect::<Result<_>>()?;
        Ok(ProjSum { sk, mode, objects, parts, expansions: Mutex::new(HashMap::new()) })
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn rank(&self) -> usize {
        self.objects.len()
    }

    /// Start of each summand inside `Π(b)`, plus the total dimension.
    pub fn offsets(&self, b: &Object) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut n = 0;
        out.push(0);
        for p in &self.parts {
            n += p.dim(b)?;
            out.push(n);
        }
        Ok(out)
    }

    fn expansion(&self, h: usize, b: &Object) -> Result<Arc<Expansion>> {
        let a = &self.objects[h];
        let key = (a.clone(), b.clone());
        if let Some(e) = self.expansions.lock().expect("expansion lock").get(&key) {
            return Ok(e.clone());
        }
        let n = self.sk.hom_size(a, b).ok_or_else(|| Error::TooLarge(format!("Hom({a}, {b})")))?;
        let e = match self.mode {
            Mode::Full => Expansion { morphisms: (0..n).map(|i| self.sk.morphism_from_index(a, b, i)).collect(), inverse: None },
            Mode::Poly(d) => {
                let q = TruncatedPoly::quotient(self.sk.clone(), a.clone(), d)?;
                let dim = q.dim(b)?;
                let mut span = Subspace::new(self.sk.field(), dim);
                let mut morphisms = Vec::new();
                let mut columns = Vec::new();
                for i in 0..n {
                    if span.dim() == dim {
                        break;
                    }
                    let u = self.sk.morphism_from_index(a, b, i);
                    let g = q.group_element(&u)?;
                    if span.insert(&g) {
                        morphisms.push(u);
                        columns.push(g);
                    }
                }
                if span.dim() != dim {
                    return Err(Error::Invalid(format!("group elements do not span q_{d} P_{a}({b})")));
                }
                let solver = PreimageSolver::from_columns(self.sk.field(), dim, &columns);
                let cols: Vec<Vec<u8>> = (0..dim)
                    .map(|j| {
                        let mut e = vec![0u8; dim];
                        e[j] = 1;
                        solver.solve(&e).expect("spanning set")
                    })
                    .collect();
                Expansion { morphisms, inverse: Some(FpMatrix::from_columns(self.sk.field(), dim, &cols)) }
            }
        };
        let e = Arc::new(e);
        self.expansions.lock().expect("expansion lock").insert(key, e.clone());
        Ok(e)
    }

    /// `v ∈ Π_{a_h}(b)` as `Σ c_u Π_{a_h}(u)(1)`.
    pub fn expand(&self, h: usize, b: &Object, v: &[u8]) -> Result<Vec<(Morphism, u8)>> {
        let e = self.expansion(h, b)?;
        let c = e.coefficients(v);
        Ok(e.morphisms.iter().zip(c).filter(|(_, c)| *c != 0).map(|(u, c)| (u.clone(), c)).collect())
    }

    /// Matrix at `b` of the map `Π_{a_h} → M` sending the universal element to `x ∈ M(a_h)`.
    pub fn yoneda_block(&self, h: usize, b: &Object, m: &dyn Functor, x: &[u8]) -> Result<FpMatrix> {
        let e = self.expansion(h, b)?;
        let rows = m.dim(b)?;
        let cols: Vec<Vec<u8>> = e.morphisms.iter().map(|u| m.apply(u, x)).collect::<Result<_>>()?;
        let w = FpMatrix::from_columns(self.sk.field(), rows, &cols);
        match &e.inverse {
            None => Ok(w),
            Some(inv) => w.mul(inv),
        }
    }

    /// Matrix at `b` of the map `⊕_h Π_{a_h} → M` with generator images `xs`.
    pub fn map_to(&self, b: &Object, m: &dyn Functor, xs: &[Vec<u8>]) -> Result<FpMatrix> {
        let field = self.sk.field();
        let mut out = FpMatrix::zeros(field, m.dim(b)?, 0);
        for (h, x) in xs.iter().enumerate() {
            out = out.hstack(&self.yoneda_block(h, b, m, x)?)?;
        }
        Ok(out)
    }
}

impl Functor for ProjSum {
    fn skeleton(&self) -> &Arc<Skeleton> {
        &self.sk
    }

    fn name(&self) -> String {
        let parts: Vec<String> = self.parts.iter().map(|p| p.name()).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    fn dim(&self, b: &Object) -> Result<usize> {
        Ok(*self.offsets(b)?.last().expect("nonempty offsets"))
    }

    fn act(&self, f: &Morphism) -> Result<FpMatrix> {
        let field = self.sk.field();
        self.parts.iter().try_fold(FpMatrix::zeros(field, 0, 0), |acc, p| Ok(acc.direct_sum(&p.act(f)?)))
    }

    fn apply(&self, f: &Morphism, v: &[u8]) -> Result<Vec<u8>> {
        let src = self.offsets(&f.source)?;
        let mut out = Vec::with_capacity(self.dim(&f.target)?);
        for (h, p) in self.parts.iter().enumerate() {
            out.extend(p.apply(f, &v[src[h]..src[h + 1]])?);
        }
        Ok(out)
    }
}

/// Elements generating the subfunctor `b ↦ target(b)` of `ambient`, chosen
/// object by object in skeleton order: at each object the target vectors not
/// yet reached from earlier generators become new generators. Reachability
/// is a worklist closure over the generating morphisms.
pub fn generators_of(
    ambient: &dyn Functor,
    target: &dyn Fn(&Object) -> Result<Arc<Subspace>>,
) -> Result<Vec<(Object, Vec<u8>)>> {
    let sk = ambient.skeleton();
    let field = sk.field();
    let gens = sk.generating_set()?;
    let mut from: HashMap<&Object, Vec<&Morphism>> = HashMap::new();
    for g in gens {
        from.entry(&g.source).or_default().push(g);
    }
    let mut reached: HashMap<Object, Subspace> = HashMap::new();
    for b in sk.objects() {
        reached.insert(b.clone(), Subspace::new(field, ambient.dim(b)?));
    }
    let mut out = Vec::new();
    for a in sk.objects() {
        let t = target(a)?;
        for v in t.basis() {
            if reached[a].contains(&v) {
                continue;
            }
            out.push((a.clone(), v.clone()));
            if out.len() > MAX_GENERATORS {
                return Err(Error::TooLarge(format!("more than {MAX_GENERATORS} generators")));
            }
            reached.get_mut(a).expect("object").insert(&v);
            let mut queue = VecDeque::from([(a.clone(), v)]);
            while let Some((b, w)) = queue.pop_front() {
                for g in from.get(&b).into_iter().flatten() {
                    let x = ambient.apply(g, &w)?;
                    if reached.get_mut(&g.target).expect("object").insert(&x) {
                        queue.push_back((g.target.clone(), x));
                    }
                }
            }
        }
        if reached[a].dim() != t.dim() {
            return Err(Error::Invalid(format!("generated subfunctor leaves the target at {a}")));
        }
    }
    Ok(out)
}

/// One stage `Π_i` of a resolution with the images of its generators in the
/// previous stage (or in `F` for `i = 0`).
pub struct Stage {
    pub term: Arc<ProjSum>,
    pub images: Vec<Vec<u8>>,
}

/// `... → Π_1 → Π_0 → F`, built to a given length. Stages `0..length` are
/// evaluated at every skeleton object; the last stage is known only through
/// its generators, which is all Ext needs.
pub struct Resolution {
    pub functor: FunctorRef,
    pub mode: Mode,
    pub stages: Vec<Stage>,
    differentials: Vec<Memo>,
}

type Memo = Mutex<HashMap<Object, Arc<FpMatrix>>>;

/// Dimensions of one stage, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct StageSummary {
    pub generators: Vec<Object>,
    pub dims: Vec<usize>,
    pub kernel_dims: Vec<usize>,
}

impl Resolution {
    pub fn skeleton(&self) -> &Arc<Skeleton> {
        self.functor.skeleton()
    }

    pub fn length(&self) -> usize {
        self.stages.len() - 1
    }

    /// The target of stage `i`: `F` or `Π_{i-1}`.
    fn previous(&self, i: usize) -> &dyn Functor {
        if i == 0 {
            self.functor.as_ref()
        } else {
            self.stages[i - 1].term.as_ref()
        }
    }

    /// `∂_i : Π_i(b) → Π_{i-1}(b)` (`ε : Π_0(b) → F(b)` for `i = 0`).
    pub fn differential(&self, i: usize, b: &Object) -> Result<Arc<FpMatrix>> {
        if let Some(m) = self.differentials[i].lock().expect("memo lock").get(b) {
            return Ok(m.clone());
        }
        let st = &self.stages[i];
        let m = Arc::new(st.term.map_to(b, self.previous(i), &st.images)?);
        self.differentials[i].lock().expect("memo lock").insert(b.clone(), m.clone());
        Ok(m)
    }

    pub fn kernel(&self, i: usize, b: &Object) -> Result<Subspace> {
        Ok(Subspace::column_span(&self.differential(i, b)?.kernel()))
    }

    /// Exactness by rank accounting: `rank ∂_0 = dim F` and
    /// `rank ∂_{i+1} = dim ker ∂_i` at every object, for evaluated stages.
    pub fn is_exact(&self) -> Result<bool> {
        for b in self.skeleton().objects() {
            if self.differential(0, b)?.rank() != self.functor.dim(b)? {
                return Ok(false);
            }
            for i in 0..self.length().saturating_sub(1) {
                let d = self.differential(i, b)?;
                let next = self.differential(i + 1, b)?;
                if !d.mul(&next)?.is_zero() || next.rank() != d.cols() - d.rank() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn summary(&self) -> Result<Vec<StageSummary>> {
        let sk = self.skeleton();
        let mut out = Vec::new();
        for (i, st) in self.stages.iter().enumerate() {
            let evaluated = i < self.length();
            let dims = if evaluated { sk.objects().iter().map(|b| st.term.dim(b)).collect::<Result<_>>()? } else { vec![] };
            let kernel_dims = if evaluated {
                sk.objects().iter().map(|b| Ok(self.differential(i, b)?.kernel().cols())).collect::<Result<_>>()?
            } else {
                vec![]
            };
            out.push(StageSummary { generators: st.term.objects().to_vec(), dims, kernel_dims });
        }
        Ok(out)
    }

    /// `∂_i` as a natural transformation `Π_i → Π_{i-1}` (or `→ F`).
    pub fn differential_transform(self: &Arc<Self>, i: usize) -> NatTransform {
        let target: FunctorRef = if i == 0 { self.functor.clone() } else { self.stages[i - 1].term.clone() };
        let r = self.clone();
        NatTransform::new(self.stages[i].term.clone(), target, move |b| Ok((*r.differential(i, b)?).clone()))
    }
}

/// Resolves `F` to the given length. Poly mode requires `F` of degree `<= d`
/// on the skeleton.
pub fn resolve(f: FunctorRef, mode: Mode, length: usize) -> Result<Resolution> {
    let sk = f.skeleton().clone();
    if let Mode::Poly(d) = mode {
        let report = poly_degree(f.as_ref(), d)?;
        if report.degree.is_none() {
            return Err(Error::Invalid(format!("{} is not of degree <= {d} on the skeleton", f.name())));
        }
    }
    let mut res = Resolution { functor: f.clone(), mode, stages: Vec::new(), differentials: Vec::new() };
    for i in 0..=length {
        let gens = if i == 0 {
            generators_of(f.as_ref(), &|b| Ok(Arc::new(Subspace::full(sk.field(), f.dim(b)?))))?
        } else {
            let ambient = res.stages[i - 1].term.clone();
            generators_of(ambient.as_ref(), &|b| Ok(Arc::new(res.kernel(i - 1, b)?)))?
        };
        let (objects, images): (Vec<Object>, Vec<Vec<u8>>) = gens.into_iter().unzip();
        let term = Arc::new(ProjSum::new(sk.clone(), mode, objects)?);
        res.stages.push(Stage { term, images });
        res.differentials.push(Mutex::new(HashMap::new()));
    }
    Ok(res)
}

#[cfg(test)]
mod tests;
