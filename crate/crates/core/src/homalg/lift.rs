//! Lifting the identity of `F` to a chain map from a projective resolution
//! into an exact complex `... → T_1 → T_0 → F`.

use std::sync::Arc;

use crate::addcat::Object;
use crate::error::{Error, Result};
use crate::functor::{Functor, FunctorRef, NatTransform};
use crate::linalg::PreimageSolver;

use super::{ProjSum, Resolution};

/// `... → T_1 → T_0 → F` with `maps[0] : T_0 → F` and `maps[j] : T_j → T_{j-1}`.
pub struct TargetComplex {
    pub terms: Vec<FunctorRef>,
    pub maps: Vec<Arc<NatTransform>>,
}

impl TargetComplex {
    pub fn new(terms: Vec<FunctorRef>, maps: Vec<Arc<NatTransform>>) -> Result<Self> {
        if terms.len() != maps.len() {
            return Err(Error::Dimension("a target complex needs one map per term".into()));
        }
        Ok(TargetComplex { terms, maps })
    }

    /// The resolution itself, truncated to its evaluated stages.
    pub fn from_resolution(res: &Arc<Resolution>) -> Self {
        let n = res.length();
        let terms = (0..n).map(|i| res.stages[i].term.clone() as FunctorRef).collect();
        let maps = (0..n).map(|i| Arc::new(res.differential_transform(i))).collect();
        TargetComplex { terms, maps }
    }
}

/// Image under a chain map of a vector `y ∈ Π(b)`, given the images `z` of
/// the generators of `Π` in `T`.
pub(crate) fn push(pi: &ProjSum, b: &Object, y: &[u8], t: &dyn Functor, z: &[Vec<u8>]) -> Result<Vec<u8>> {
    let field = pi.skeleton().field();
    let offsets = pi.offsets(b)?;
    let mut out = vec![0u8; t.dim(b)?];
    for h in 0..pi.rank() {
        let block = &y[offsets[h]..offsets[h + 1]];
        if block.iter().all(|&x| x == 0) {
            continue;
        }
        for (u, c) in pi.expand(h, b, block)? {
            for (o, x) in out.iter_mut().zip(t.apply(&u, &z[h])?) {
                *o = field.add(*o, field.mul(c, x));
            }
        }
    }
    Ok(out)
}

/// Generator images `z[i][h] ∈ T_i(a_h)` of a chain map `Π_• → T_•` over the
/// identity of `F`, for `i < min(len T, length + 1)`. With `perturb` every
/// choice adds the sum of the kernel basis, giving a second, different lift.
pub fn lift(res: &Resolution, target: &TargetComplex, perturb: bool) -> Result<Vec<Vec<Vec<u8>>>> {
    let field = res.skeleton().field();
    let n = target.terms.len().min(res.stages.len());
    let mut z: Vec<Vec<Vec<u8>>> = Vec::with_capacity(n);
    for i in 0..n {
        let st = &res.stages[i];
        let mut zi = Vec::with_capacity(st.term.rank());
        for (h, a) in st.term.objects().iter().enumerate() {
            let want = if i == 0 {
                st.images[h].clone()
            } else {
                let prev = &res.stages[i - 1].term;
                push(prev, a, &st.images[h], target.terms[i - 1].as_ref(), &z[i - 1])?
            };
            let m = target.maps[i].component(a)?;
            let solver = PreimageSolver::from_columns(field, m.rows(), &m.columns());
            let mut x = solver
                .solve(&want)
                .ok_or_else(|| Error::Invalid(format!("target complex is not exact at stage {i}, object {a}")))?;
            if perturb {
                for k in m.kernel().columns() {
                    for (o, v) in x.iter_mut().zip(k) {
                        *o = field.add(*o, v);
                    }
                }
            }
            zi.push(x);
        }
        z.push(zi);
    }
    Ok(z)
}
