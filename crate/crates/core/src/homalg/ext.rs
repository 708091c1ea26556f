//! Ext groups from resolutions, the comparison `Ext_poly → Ext_full`, the
//! class of the Frobenius sequence, and derived functors of `p_d`.

use std::sync::Arc;

use serde::Serialize;

use crate::addcat::{Object, Skeleton};
use crate::error::{Error, Result};
use crate::functor::{nat_space_dim, DualFunctor, Functor, FunctorRef, FrobeniusSequence, NatTransform, SubFunctor, TruncatedPoly};
use crate::linalg::{FpMatrix, PreimageSolver, Subspace};
use crate::polyfilt::p_trunc;

use super::lift::{lift, TargetComplex};
use super::{resolve, Mode, ProjSum, Resolution};

/// Matrix of `φ ↦ (φ(y_r))_r` from `Hom(Π, G) = ⊕_h G(a_h)` to `⊕_r G(b_r)`
/// for vectors `y_r ∈ Π(b_r)`.
fn cochain_map(pi: &ProjSum, rows: &[(Object, Vec<u8>)], g: &dyn Functor) -> Result<FpMatrix> {
    let field = pi.skeleton().field();
    let col_dims: Vec<usize> = pi.objects().iter().map(|a| g.dim(a)).collect::<Result<_>>()?;
    let row_dims: Vec<usize> = rows.iter().map(|(b, _)| g.dim(b)).collect::<Result<_>>()?;
    let col_off: Vec<usize> = offsets(&col_dims);
    let row_off: Vec<usize> = offsets(&row_dims);
    let mut m = FpMatrix::zeros(field, row_off[rows.len()], col_off[col_dims.len()]);
    for (r, (b, y)) in rows.iter().enumerate() {
        let off = pi.offsets(b)?;
        for h in 0..pi.rank() {
            let block = &y[off[h]..off[h + 1]];
            if block.iter().all(|&x| x == 0) {
                continue;
            }
            for (u, c) in pi.expand(h, b, block)? {
                let gu = g.act(&u)?;
                for i in 0..gu.rows() {
                    for j in 0..gu.cols() {
                        let x = gu.get(i, j);
                        if x != 0 {
                            m.add_to(row_off[r] + i, col_off[h] + j, field.mul(c, x));
                        }
                    }
                }
            }
        }
    }
    Ok(m)
}

fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0];
    for d in dims {
        out.push(out.last().expect("nonempty") + d);
    }
    out
}

/// `H^i = Z^i / B^i` with chosen representatives of a basis.
pub struct Cohomology {
    pub cocycles: Subspace,
    pub boundaries: Subspace,
    pub reps: Vec<Vec<u8>>,
    solver: PreimageSolver,
}

impl Cohomology {
    /// From `δ^{i-1}` (absent for `i = 0`) and `δ^i`.
    pub fn new(before: Option<&FpMatrix>, after: &FpMatrix) -> Self {
        let field = after.field();
        let n = after.cols();
        let cocycles = Subspace::column_span(&after.kernel());
        let boundaries = before.map_or_else(|| Subspace::new(field, n), Subspace::column_span);
        let mut span = boundaries.clone();
        let mut reps = Vec::new();
        for v in cocycles.basis() {
            if span.insert(&v) {
                reps.push(v);
            }
        }
        let mut cols = reps.clone();
        cols.extend(boundaries.basis());
        let solver = PreimageSolver::from_columns(field, n, &cols);
        Cohomology { cocycles, boundaries, reps, solver }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn is_cocycle(&self, v: &[u8]) -> bool {
        self.cocycles.contains(v)
    }

    pub fn is_boundary(&self, v: &[u8]) -> bool {
        self.boundaries.contains(v)
    }

    /// Coordinates of the class of a cocycle in the basis of representatives.
    pub fn class_coords(&self, v: &[u8]) -> Result<Vec<u8>> {
        let x = self.solver.solve(v).ok_or_else(|| Error::Invalid("vector is not a cocycle".into()))?;
        Ok(x[..self.reps.len()].to_vec())
    }
}

/// `Hom(Π_•, G)` in degrees `0..=i_max` and its cohomology.
pub struct ExtComplex {
    pub resolution: Arc<Resolution>,
    pub coefficients: FunctorRef,
    pub coboundaries: Vec<FpMatrix>,
    pub cohomology: Vec<Cohomology>,
}

impl ExtComplex {
    /// Needs a resolution of length at least `i_max + 1`.
    pub fn new(resolution: Arc<Resolution>, g: FunctorRef, i_max: usize) -> Result<Self> {
        if resolution.length() < i_max + 1 {
            return Err(Error::Invalid(format!("Ext^{i_max} needs a resolution of length {}", i_max + 1)));
        }
        let coboundaries: Vec<FpMatrix> = (0..=i_max)
            .map(|i| {
                let next = &resolution.stages[i + 1];
                let rows: Vec<(Object, Vec<u8>)> =
                    next.term.objects().iter().cloned().zip(next.images.iter().cloned()).collect();
                cochain_map(&resolution.stages[i].term, &rows, g.as_ref())
            })
            .collect::<Result<_>>()?;
        let cohomology =
            (0..=i_max).map(|i| Cohomology::new(i.checked_sub(1).map(|j| &coboundaries[j]), &coboundaries[i])).collect();
        Ok(ExtComplex { resolution, coefficients: g, coboundaries, cohomology })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.cohomology.iter().map(Cohomology::dim).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtTable {
    pub source: String,
    pub coefficients: String,
    pub mode: Mode,
    pub dims: Vec<usize>,
    /// `dim Ext^0` against `dim Hom(F, G)` from the naturality system.
    pub hom_check: bool,
    pub generators: Vec<usize>,
}

/// `Ext^i(F, G)` for `i <= i_max` in the given mode.
pub fn ext(f: FunctorRef, g: FunctorRef, mode: Mode, i_max: usize) -> Result<ExtTable> {
    if let Mode::Poly(d) = mode {
        let report = crate::polyfilt::poly_degree(g.as_ref(), d)?;
        if report.degree.is_none() {
            return Err(Error::Invalid(format!("{} is not of degree <= {d} on the skeleton", g.name())));
        }
    }
    let res = Arc::new(resolve(f.clone(), mode, i_max + 1)?);
    let c = ExtComplex::new(res.clone(), g.clone(), i_max)?;
    let dims = c.dims();
    let hom_check = dims[0] == nat_space_dim(f.as_ref(), g.as_ref())?;
    Ok(ExtTable {
        source: f.name(),
        coefficients: g.name(),
        mode,
        dims,
        hom_check,
        generators: res.stages.iter().map(|s| s.term.rank()).collect(),
    })
}

/// `[dim Hom(F, G), dim Ext^1(F, G)]` from the presentation `0 → K_0 → P_0 → F → 0`:
/// `Ext^1 = coker(Hom(P_0, G) → Hom(K_0, G))`. Needs only the first stage of a
/// resolution and the naturality system, so it reaches larger skeletons. On a
/// self-dual skeleton `Ext^i(F, G) = Ext^i(DG, DF)`, and the side with the
/// smaller `P_0` is presented.
pub fn ext_low(f: FunctorRef, g: FunctorRef) -> Result<[usize; 2]> {
    let direct = Arc::new(resolve(f.clone(), Mode::Full, 0)?);
    if !f.skeleton().is_self_dual() {
        return ext_low_presented(direct, g);
    }
    let dg: FunctorRef = Arc::new(DualFunctor::new(g.clone())?);
    let df: FunctorRef = Arc::new(DualFunctor::new(f)?);
    let dual = Arc::new(resolve(dg, Mode::Full, 0)?);
    if p0_size(&dual)? < p0_size(&direct)? {
        ext_low_presented(dual, df)
    } else {
        ext_low_presented(direct, g)
    }
}

fn p0_size(res: &Resolution) -> Result<usize> {
    let p0 = &res.stages[0].term;
    res.skeleton().objects().iter().map(|b| p0.dim(b)).sum()
}

fn ext_low_presented(res: Arc<Resolution>, g: FunctorRef) -> Result<[usize; 2]> {
    let f = res.functor.clone();
    let p0 = res.stages[0].term.clone();
    let r = res.clone();
    let k0 = SubFunctor::new("K_0", p0.clone(), move |b| r.kernel(0, b));
    let hom_f = nat_space_dim(f.as_ref(), g.as_ref())?;
    let hom_p0: usize = p0.objects().iter().map(|a| g.dim(a)).sum::<Result<_>>()?;
    let hom_k = nat_space_dim(&k0, g.as_ref())?;
    Ok([hom_f, hom_k + hom_f - hom_p0])
}

/// The induced map on one degree of Ext.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonDegree {
    pub i: usize,
    pub poly_dim: usize,
    pub full_dim: usize,
    pub rank: usize,
    pub injective: bool,
    pub surjective: bool,
    /// Whether a second, perturbed lift induces the same matrix.
    pub lift_independent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonMap {
    pub source: String,
    pub coefficients: String,
    pub d: usize,
    pub degrees: Vec<ComparisonDegree>,
}

/// Matrices of `Ext^i_poly(d)(F, G) → Ext^i(F, G)` for `i <= i_max`, in the
/// bases of representatives, induced by a chain map `P → Q` lifting the
/// identity from the full resolution into the poly resolution.
pub struct Comparison {
    pub full: ExtComplex,
    pub poly: ExtComplex,
    pub matrices: Vec<FpMatrix>,
}

fn induced(full: &ExtComplex, poly: &ExtComplex, z: &[Vec<Vec<u8>>], i_max: usize) -> Result<Vec<FpMatrix>> {
    let field = full.resolution.skeleton().field();
    (0..=i_max)
        .map(|i| {
            let p = &full.resolution.stages[i].term;
            let rows: Vec<(Object, Vec<u8>)> = p.objects().iter().cloned().zip(z[i].iter().cloned()).collect();
            let m = cochain_map(&poly.resolution.stages[i].term, &rows, poly.coefficients.as_ref())?;
            let (hp, hq) = (&full.cohomology[i], &poly.cohomology[i]);
            let cols: Vec<Vec<u8>> = hq.reps.iter().map(|r| hp.class_coords(&m.apply(r))).collect::<Result<_>>()?;
            Ok(FpMatrix::from_columns(field, hp.dim(), &cols))
        })
        .collect()
}

impl Comparison {
    pub fn new(f: FunctorRef, g: FunctorRef, d: usize, i_max: usize) -> Result<(Self, bool)> {
        for h in [&f, &g] {
            if crate::polyfilt::poly_degree(h.as_ref(), d)?.degree.is_none() {
                return Err(Error::Invalid(format!("{} is not of degree <= {d} on the skeleton", h.name())));
            }
        }
        let p = Arc::new(resolve(f.clone(), Mode::Full, i_max + 1)?);
        let q = Arc::new(resolve(f, Mode::Poly(d), i_max + 1)?);
        let target = TargetComplex::from_resolution(&q);
        let full = ExtComplex::new(p.clone(), g.clone(), i_max)?;
        let poly = ExtComplex::new(q, g, i_max)?;
        let matrices = induced(&full, &poly, &lift(&p, &target, false)?, i_max)?;
        let other = induced(&full, &poly, &lift(&p, &target, true)?, i_max)?;
        let same = matrices == other;
        Ok((Comparison { full, poly, matrices }, same))
    }
}

/// Report of the comparison map in degrees `0..=i_max`.
pub fn compare(f: FunctorRef, g: FunctorRef, d: usize, i_max: usize) -> Result<ComparisonMap> {
    let (source, coefficients) = (f.name(), g.name());
    let (c, same) = Comparison::new(f, g, d, i_max)?;
    let degrees = c
        .matrices
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let rank = m.rank();
            ComparisonDegree {
                i,
                poly_dim: m.cols(),
                full_dim: m.rows(),
                rank,
                injective: rank == m.cols(),
                surjective: rank == m.rows(),
                lift_independent: same,
            }
        })
        .collect();
    Ok(ComparisonMap { source, coefficients, d, degrees })
}

/// The class in `Ext^2(I, I)` of `0 → I → S^p → Γ^p → I → 0`.
#[derive(Clone, Debug, Serialize)]
pub struct ExclReport {
    pub p: u32,
    pub k: usize,
    pub ext_full: Vec<usize>,
    pub ext_poly1: Vec<usize>,
    /// Absent when the skeleton cannot see degree 2 (`K < 3`).
    pub ext_poly2: Option<Vec<usize>>,
    pub class_is_cocycle: bool,
    pub class_nonzero: bool,
    pub poly1_vanishes: bool,
    pub in_image_from_poly2: Option<bool>,
    pub split_class_zero: bool,
    pub lift_independent: bool,
}

/// Cocycle in `Hom(P_2, I)` of the 2-extension given as a target complex.
fn extension_cocycle(res: &Resolution, target: &TargetComplex, perturb: bool) -> Result<Vec<u8>> {
    let z = lift(res, target, perturb)?;
    Ok(z[2].concat())
}

pub fn excl_class_check(sk: &Arc<Skeleton>) -> Result<ExclReport> {
    let seq = FrobeniusSequence::new(sk)?;
    let id = seq.identity.clone();
    let res = Arc::new(resolve(id.clone(), Mode::Full, 3)?);
    let full = ExtComplex::new(res.clone(), id.clone(), 2)?;
    let target = TargetComplex::new(
        vec![seq.divided.clone(), seq.sym.clone(), id.clone()],
        vec![seq.verschiebung.clone(), seq.norm.clone(), seq.frobenius.clone()],
    )?;
    let c = extension_cocycle(&res, &target, false)?;
    let c2 = extension_cocycle(&res, &target, true)?;
    let h2 = &full.cohomology[2];
    let class_is_cocycle = h2.is_cocycle(&c) && h2.is_cocycle(&c2);
    let class = h2.class_coords(&c)?;
    let lift_independent = class == h2.class_coords(&c2)?;
    let class_nonzero = class.iter().any(|&x| x != 0);

    let one: Arc<NatTransform> = Arc::new(NatTransform::identity(id.clone()));
    let zero = Arc::new(NatTransform::new(id.clone(), id.clone(), {
        let id = id.clone();
        move |a| {
            let n = id.dim(a)?;
            Ok(FpMatrix::zeros(id.skeleton().field(), n, n))
        }
    }));
    let split = TargetComplex::new(vec![id.clone(), id.clone(), id.clone()], vec![one.clone(), zero, one])?;
    let s = extension_cocycle(&res, &split, false)?;
    let split_class_zero = h2.is_cocycle(&s) && h2.is_boundary(&s);

    let ext_poly1 = ext(id.clone(), id.clone(), Mode::Poly(1), 2)?.dims;
    let poly1_vanishes = ext_poly1[2] == 0;
    let (ext_poly2, in_image_from_poly2) = if sk.k() >= 3 {
        let (cmp, _) = Comparison::new(id.clone(), id.clone(), 2, 2)?;
        let image = Subspace::column_span(&cmp.matrices[2]);
        (Some(cmp.poly.dims()), Some(image.contains(&class)))
    } else {
        (None, None)
    };
    Ok(ExclReport {
        p: sk.p(),
        k: sk.k(),
        ext_full: full.dims(),
        ext_poly1,
        ext_poly2,
        class_is_cocycle,
        class_nonzero,
        poly1_vanishes,
        in_image_from_poly2,
        split_class_zero,
        lift_independent,
    })
}

/// `R^j p_d(F)(a) = Ext^j(q_d P_a, F)` for every skeleton object `a`.
#[derive(Clone, Debug, Serialize)]
pub struct DerivedPd {
    pub functor: String,
    pub d: usize,
    pub objects: Vec<Object>,
    /// `dims[j][k] = dim R^j p_d(F)(objects[k])`.
    pub dims: Vec<Vec<usize>>,
    /// `R^0 p_d F` against `p_d F` built from cross-effects.
    pub r0_matches: bool,
}

pub fn derived_pd(f: FunctorRef, d: usize, j_max: usize) -> Result<DerivedPd> {
    let sk = f.skeleton().clone();
    let pd = p_trunc(f.clone(), d)?;
    let mut dims = vec![Vec::new(); j_max + 1];
    let mut r0_matches = true;
    for a in sk.objects() {
        let q: FunctorRef = Arc::new(TruncatedPoly::quotient(sk.clone(), a.clone(), d)?);
        let res = Arc::new(resolve(q, Mode::Full, j_max + 1)?);
        let c = ExtComplex::new(res, f.clone(), j_max)?;
        for (j, n) in c.dims().into_iter().enumerate() {
            dims[j].push(n);
        }
        r0_matches &= dims[0].last() == Some(&pd.dim(a)?);
    }
    Ok(DerivedPd { functor: f.name(), d, objects: sk.objects().to_vec(), dims, r0_matches })
}
