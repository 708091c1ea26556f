//! Functors given by closed formulas on the whole category.

use std::collections::HashMap;
use std::sync::Arc;

use super::poly::{Poly, PolyRing};
use super::{check_dim, Functor};
use crate::addcat::{Morphism, Object, Skeleton};
use crate::error::{Error, Result};
use crate::grpalg::MonomialModel;
use crate::linalg::FpMatrix;

/// The constant functor `F_p^n`.
pub struct Constant {
    sk: Arc<Skeleton>,
    n: usize,
}

impl Constant {
    pub fn new(sk: Arc<Skeleton>, n: usize) -> Self {
        Constant { sk, n }
    }
}

impl Functor for Constant {
    fn skeleton(&self) -> &Arc<Skeleton> {
        &self.sk
    }

    fn name(&self) -> String {
        if self.n == 1 {
            "k".into()
        } else {
            format!("k^{}", self.n)
        }
    }

    fn dim(&self, _a: &Object) -> Result<usize> {
        Ok(self.n)
    }

    fn act(&self, _f: &Morphism) -> Result<FpMatrix> {
        Ok(FpMatrix::identity(self.sk.field(), self.n))
    }
}

fn hom_count(sk: &Skeleton, a: &Object, b: &Object, name: &str) -> Result<usize> {
    let n = sk.hom_size(a, b).ok_or_else(|| Error::TooLarge(format!("Hom({a}, {b})")))?;
    check_dim(name, b, usize::try_from(n).unwrap_or(usize::MAX))
}

/// The Yoneda projective `P_a = F_p[A(a, -)]` with basis the morphisms `a → b`.
pub struct Linearization {
    sk: Arc<Skeleton>,
    a: Object,
}

impl Linearization {
    pub fn new(sk: Arc<Skeleton>, a: Object) -> Result<Self> {
        if a.0.len() != sk.num_generators() {
            return Err(Error::Dimension(format!("object {a} has the wrong number of generators")));
        }
        Ok(Linearization { sk, a })
    }

    pub fn object(&self) -> &Object {
        &self.a
    }

    /// Index of `f ∘ u` for every basis morphism `u : a → b`.
    fn images(&self, f: &Morphism) -> Result<Vec<usize>> {
        let n = hom_count(&self.sk, &self.a, &f.source, &self.name())?;
        (0..n as u64)
            .map(|i| {
                let u = self.sk.morphism_from_index(&self.a, &f.source, i);
                Ok(self.sk.morphism_index(&self.sk.compose(f, &u)?) as usize)
            })
            .collect()
    }
}

impl Functor for Linearization {
    fn skeleton(&self) -> &Arc<Skeleton> {
        &self.sk
    }

    fn name(&self) -> String {
        format!("P({})", self.a)
    }

    fn dim(&self, b: &Object) -> Result<usize> {
        hom_count(&self.sk, &self.a, b, &self.name())
    }

    fn act(&self, f: &Morphism) -> Result<FpMatrix> {
        let img = self.images(f)?;
        let mut m = FpMatrix::zeros(self.sk.field(), self.dim(&f.target)?, img.len());
        for (c, &r) in img.iter().enumerate() {
            m.set(r, c, 1);
        }
        Ok(m)
    }

    fn apply(&self, f: &Morphism, v: &[u8]) -> Result<Vec<u8>> {
        let field = self.sk.field();
        let mut out = vec![0u8; self.dim(&f.target)?];
        for (c, &x) in v.iter().enumerate() {
            if x != 0 {
                let u = self.sk.morphism_from_index(&self.a, &f.source, c as u64);
                let r = self.sk.morphism_index(&self.sk.compose(f, &u)?) as usize;
                out[r] = field.add(out[r], x);
            }
        }
        Ok(out)
    }
}

/// The augmentation kernel of `P_a`, with basis `[u] - [0]` for `u ≠ 0`.
pub struct ReducedLinearization {
    inner: Linearization,
}

impl ReducedLinearization {
    pub fn new(sk: Arc<Skeleton>, a: Object) -> Result<Self> {
        Ok(ReducedLinearization { inner: Linearization::new(sk, a)? })
    }
}

impl Functor for ReducedLinearization {
    fn skeleton(&self) -> &Arc<Skeleton> {
        &self.inner.sk
    }

    fn name(&self) -> String {
        format!("Pbar({})", self.inner.a)
    }

    fn dim(&self, b: &Object) -> Result<usize> {
        Ok(self.inner.dim(b)? - 1)
    }

    fn act(&self, f: &Morphism) -> Result<FpMatrix> {
        let img = self.inner.images(f)?;
        let mut m = FpMatrix::zeros(self.inner.sk.field(), self.dim(&f.target)?, img.len() - 1);
        for (c, &r) in img.iter().enumerate().skip(1) {
            if r != 0 {
                m.set(r - 1, c - 1, 1);
            }
        }
        Ok(m)
    }
}

/// `A(a, -) ⊗ F_p`, with basis the hom-matrix entries of nonzero order.
pub struct AdditiveTensor {
    sk: Arc<Skeleton>,
    a: Object,
}

impl AdditiveTensor {
    pub fn new(sk: Arc<Skeleton>, a: Object) -> Result<Self> {
        if a.0.len() != sk.num_generators() {
            return Err(Error::Dimension(format!("object {a} has the wrong number of generators")));
        }
        Ok(AdditiveTensor { sk, a })
    }

    fn entries(&self, b: &Object) -> Vec<usize> {
        let moduli = self.sk.hom_moduli(&self.a, b);
        (0..moduli.len()).filter(|&e| moduli[e] > 1).collect()
    }
}

impl Functor for AdditiveTensor {
    fn skeleton(&self) -> &Arc<Skeleton> {
        &self.sk
    }

    fn name(&self) -> String {
        format!("A({})", self.a)
    }

    fn dim(&self, b: &Object) -> Result<usize> {
        check_dim(&self.name(), b, self.entries(b).len())
    }

    fn act(&self, f: &Morphism) -> Result<FpMatrix> {
        let src = self.entries(&f.source);
        let dst = self.entries(&f.target);
        let p = self.sk.p() as u64;
        let mut m = FpMatrix::zeros(self.sk.field(), dst.len(), src.len());
        let zero = self.sk.zero_morphism(&self.a, &f.source);
        for (c, &e) in src.iter().enumerate() {
            let mut u = zero.clone();
            u.coeffs[e] = 1;
            let v = self.sk.compose(f, &u)?;
            for (r, &e2) in dst.iter().enumerate() {
                m.set(r, c, (v.coeffs[e2] % p) as i64);
            }
        }
        Ok(m)
    }
}

/// `a ↦ a ⊗ F_p`, one basis vector per cyclic summand.
pub struct TensorFp {
    sk: Arc<Skeleton>,
}

impl TensorFp {
    pub fn new(sk: Arc<Skeleton>) -> Self {
        TensorFp { sk }
    }
}

impl Functor for TensorFp {
    fn skeleton(&self) -> &Arc<Skeleton> {
        &self.sk
    }

    fn name(&self) -> String {
        "I".into()
    }

    fn dim(&self, a: &Object) -> Result<usize> {
        Ok(self.sk.summands(a).len())
    }

    fn act(&self, f: &Morphism) -> Result<FpMatrix> {
        let sa = self.sk.summands(&f.source);
        let sb = self.sk.summands(&f.target);
        let p = self.sk.p() as u64;
        let na = sa.len();
        Ok(FpMatrix::from_fn(self.sk.field(), sb.len(), na, |s, r| {
            if self.sk.entry_modulus(sa[r], sb[s]) == 1 || Skeleton::shift(sa[r], sb[s]) > 0 {
                0
            } else {
                (f.coeffs[s * na + r] % p) as i64
            }
        }))
    }
}

/// `F_p[A(a, -)] / I^{d+1}` in the monomial basis `x^γ`, `|γ| <= d`, where
/// `x_e = [u_e] - [0]` for the unit morphisms `u_e` of the hom-matrix; with
/// `graded` only the top piece `I^d / I^{d+1}` (monomials of degree `d`).
pub struct TruncatedPoly {
    sk: Arc<Skeleton>,
    a: Object,
    d: usize,
    graded: bool,
}

impl TruncatedPoly {
    /// `q_d(P_a)`.
    pub fn quotient(sk: Arc<Skeleton>, a: Object, d: usize) -> Result<Self> {
        Self::build(sk, a, d, false)
    }

    /// `S^d_{(p)} ∘ A(a, -)`.
    pub fn graded(sk: Arc<Skeleton>, a: Object, d: usize) -> Result<Self> {
        Self::build(sk, a, d, true)
    }

    fn build(sk: Arc<Skeleton>, a: Object, d: usize, graded: bool) -> Result<Self> {
        if a.0.len() != sk.num_generators() {
            return Err(Error::Dimension(format!("object {a} has the wrong number of generators")));
        }
        Ok(TruncatedPoly { sk, a, d, graded })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn object(&self) -> &Object {
        &self.a
    }

    /// Variables (hom entries of nonzero order) and their caps at `b`.
    fn variables(&self, b: &Object) -> (Vec<usize>, Vec<Option<u64>>) {
        let moduli = self.sk.hom_moduli(&self.a, b);
        let vars: Vec<usize> = (0..moduli.len()).filter(|&e| moduli[e] > 1).collect();
        let caps = vars.iter().map(|&e| Some(moduli[e])).collect();
        (vars, caps)
    }

    pub fn basis(&self, b: &Object) -> Vec<Vec<u64>> {
        let (_, caps) = self.variables(b);
        let model = MonomialModel::new(self.sk.field(), caps);
        if self.graded {
            model.degree_basis(self.d)
        } else {
            model.truncated_basis(self.d)
        }
    }

    /// Coordinates of the group element `[u]` in the basis at `u.target`
    /// (only meaningful for the quotient, not the graded piece).
    pub fn group_element(&self, u: &Morphism) -> Result<Vec<u8>> {
        let b = &u.target;
        let (vars, caps) = self.variables(b);
        let model = MonomialModel::new(self.sk.field(), caps);
        let beta: Vec<u64> = vars.iter().map(|&e| u.coeffs[e]).collect();
        let basis = self.basis(b);
        let index: HashMap<&Vec<u64>, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut out = vec![0u8; basis.len()];
        for (gamma, c) in model.group_element(&beta, self.d) {
            if let Some(&i) = index.get(&gamma) {
                out[i] = c;
            }
        }
        Ok(out)
    }
}

impl Functor for TruncatedPoly {
    fn skeleton(&self) -> &Arc<Skeleton> {
        &self.sk
    }

    fn name(&self) -> String {
        if self.graded {
            format!("S^{} . Hom({},-)", self.d, self.a)
        } else {
            format!("Q^{} . Hom({},-)", self.d, self.a)
        }
    }

    fn dim(&self, b: &Object) -> Result<usize> {
        let (_, caps) = self.variables(b);
        let model = MonomialModel::new(self.sk.field(), caps);
        let n = if self.graded {
            model.s_dim(self.d)
        } else {
            (0..=self.d).map(|k| model.s_dim(k)).sum()
        };
        check_dim(&self.name(), b, n)
    }

    fn act(&self, f: &Morphism) -> Result<FpMatrix> {
        let field = self.sk.field();
        let (src_vars, _) = self.variables(&f.source);
        let (dst_vars, dst_caps) = self.variables(&f.target);
        let ring = PolyRing { field, caps: dst_caps, max_degree: self.d };
        // image of x_e is prod_{e'} (1 + x_{e'})^{c_{e'}} - 1 with c = f ∘ u_e
        let zero = self.sk.zero_morphism(&self.a, &f.source);
        let mut var_images = Vec::with_capacity(src_vars.len());
        for &e in &src_vars {
            let mut u = zero.clone();
            u.coeffs[e] = 1;
            let v = self.sk.compose(f, &u)?;
            let mut y = ring.one();
            for (j, &e2) in dst_vars.iter().enumerate() {
                if v.coeffs[e2] != 0 {
                    y = ring.mul(&y, &ring.one_plus_var_pow(j, v.coeffs[e2]));
                }
            }
            let minus_one = ring.one();
            ring.add_assign(&mut y, &minus_one, field.neg(1));
            var_images.push(y);
        }
        let src_basis = self.basis(&f.source);
        let dst_basis = self.basis(&f.target);
        let index: HashMap<&Vec<u64>, usize> = dst_basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut m = FpMatrix::zeros(field, dst_basis.len(), src_basis.len());
        let mut memo: HashMap<Vec<u64>, Poly> = HashMap::new();
        for (c, gamma) in src_basis.iter().enumerate() {
            let img = image_of(&ring, &var_images, gamma, &mut memo);
            let img = if self.graded { ring.homogeneous(&img, self.d) } else { img };
            for (mono, &x) in &img.0 {
                let r = *index.get(mono).ok_or_else(|| Error::Invalid("image outside basis".into()))?;
                m.add_to(r, c, x);
            }
        }
        Ok(m)
    }
}

fn image_of(ring: &PolyRing, vars: &[Poly], gamma: &[u64], memo: &mut HashMap<Vec<u64>, Poly>) -> Poly {
    if let Some(p) = memo.get(gamma) {
        return p.clone();
    }
    let out = match gamma.iter().position(|&g| g > 0) {
        None => ring.one(),
        Some(j) => {
            let mut rest = gamma.to_vec();
            rest[j] -= 1;
            let r = image_of(ring, vars, &rest, memo);
            ring.mul(&r, &vars[j])
        }
    };
    memo.insert(gamma.to_vec(), out.clone());
    out
}
