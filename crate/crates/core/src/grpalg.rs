//! The group algebra `F_p[V]` of a finite abelian p-group, its
//! augmentation-ideal filtration, the truncated polynomial model
//! `F_p[x_j]/(x_j^{p^{r_j}})`, and spaces of polynomial functions `V -> F_p`.

use serde::Serialize;

use crate::abgrp::AbGroup;
use crate::error::{Error, Result};
use crate::linalg::{Fp, FpMatrix, Subspace};

/// `F_p[V]` with basis `[v]` in the lexicographic element order of [`AbGroup::elements`].
#[derive(Clone, Debug)]
pub struct GroupAlgebra {
    group: AbGroup,
    field: Fp,
    moduli: Vec<u64>,
    order: usize,
}

/// Columns span `I^d`.
#[derive(Clone, Debug)]
pub struct FiltrationLevel {
    pub d: usize,
    pub basis: FpMatrix,
}

impl FiltrationLevel {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

const MAX_ORDER: u64 = 1 << 16;

impl GroupAlgebra {
    pub fn new(group: &AbGroup) -> Result<Self> {
        let moduli = group.moduli()?;
        let order = group.order().filter(|&n| n <= MAX_ORDER).ok_or_else(|| {
            Error::TooLarge(format!("group algebra of {group} exceeds {MAX_ORDER} elements"))
        })?;
        Ok(GroupAlgebra { group: group.clone(), field: Fp::new(group.p())?, moduli, order: order as usize })
    }

    pub fn group(&self) -> &AbGroup {
        &self.group
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.order
    }

    pub fn index(&self, coords: &[u64]) -> usize {
        coords.iter().zip(&self.moduli).fold(0usize, |acc, (&c, &m)| acc * m as usize + (c % m) as usize)
    }

    pub fn coords(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.moduli.len()];
        for j in (0..self.moduli.len()).rev() {
            let m = self.moduli[j] as usize;
            out[j] = (idx % m) as u64;
            idx /= m;
        }
        out
    }

    fn add_index(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.coords(a), self.coords(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| u + v).collect();
        self.index(&s)
    }

    /// Multiplication by the basis element `[g]`.
    pub fn translate(&self, v: &[u8], g: usize) -> Vec<u8> {
        let mut out = vec![0u8; self.order];
        for (i, &x) in v.iter().enumerate() {
            if x != 0 {
                out[self.add_index(i, g)] = x;
            }
        }
        out
    }

    /// Multiplication by `[g] - [0]`.
    pub fn difference(&self, v: &[u8], g: usize) -> Vec<u8> {
        let f = self.field;
        let mut out = self.translate(v, g);
        for (o, &x) in out.iter_mut().zip(v) {
            *o = f.sub(*o, x);
        }
        out
    }

    pub fn mul(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        let f = self.field;
        let mut out = vec![0u8; self.order];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y != 0 {
                    let k = self.add_index(i, j);
                    out[k] = f.add(out[k], f.mul(x, y));
                }
            }
        }
        out
    }

    pub fn augmentation(&self, v: &[u8]) -> u8 {
        v.iter().fold(0u8, |acc, &x| self.field.add(acc, x))
    }

    pub fn basis_vector(&self, idx: usize) -> Vec<u8> {
        let mut v = vec![0u8; self.order];
        v[idx] = 1;
        v
    }

    /// Indices of the group generators `g_j`.
    pub fn generator_indices(&self) -> Vec<usize> {
        (0..self.moduli.len())
            .map(|j| {
                let mut c = vec![0u64; self.moduli.len()];
                c[j] = 1;
                self.index(&c)
            })
            .collect()
    }

    /// `I^0 ⊇ I^1 ⊇ ... ⊇ I^{d_max}`, each level obtained from the previous
    /// one by multiplying a basis with every `[g_j] - [0]` and eliminating.
    pub fn filtration(&self, d_max: usize) -> Vec<Subspace> {
        let gens = self.generator_indices();
        let mut levels = vec![Subspace::full(self.field, self.order)];
        for _ in 0..d_max {
            let prev = levels.last().expect("nonempty");
            let mut next = Subspace::new(self.field, self.order);
            if prev.dim() > 0 {
                for b in prev.basis() {
                    for &g in &gens {
                        next.insert(&self.difference(&b, g));
                    }
                }
            }
            levels.push(next);
        }
        levels
    }

    pub fn augmentation_power(&self, d: usize) -> FiltrationLevel {
        let level = self.filtration(d).pop().expect("nonempty");
        FiltrationLevel { d, basis: level.basis_matrix() }
    }

    /// `dim I^d / I^{d+1}`.
    pub fn s_graded_dim(&self, d: usize) -> usize {
        let f = self.filtration(d + 1);
        f[d].dim() - f[d + 1].dim()
    }

    /// `dim I^d / I^{d+1}` for every `d <= d_max`.
    pub fn s_graded_dims(&self, d_max: usize) -> Vec<usize> {
        let f = self.filtration(d_max + 1);
        (0..=d_max).map(|d| f[d].dim() - f[d + 1].dim()).collect()
    }

    /// `dim F_p[V]/I^{d+1}`.
    pub fn q_dim(&self, d: usize) -> usize {
        self.order - self.filtration(d + 1)[d + 1].dim()
    }
}

/// The commutative algebra `F_p[x_1..x_k]/(x_j^{cap_j})`; a `None` cap is a
/// free variable. For a group `V` the caps are `p^{r_j}` (free summands
/// uncapped) and `x_j` corresponds to `[g_j] - [0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialModel {
    field: Fp,
    caps: Vec<Option<u64>>,
}

impl MonomialModel {
    pub fn new(field: Fp, caps: Vec<Option<u64>>) -> Self {
        MonomialModel { field, caps }
    }

    pub fn from_group(group: &AbGroup) -> Result<Self> {
        let p = group.p() as u64;
        let caps = group.cyclic_orders().into_iter().map(|o| o.map(|r| p.pow(r))).collect();
        Ok(MonomialModel { field: Fp::new(group.p())?, caps })
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn caps(&self) -> &[Option<u64>] {
        &self.caps
    }

    pub fn num_vars(&self) -> usize {
        self.caps.len()
    }

    fn admits(&self, j: usize, e: u64) -> bool {
        self.caps[j].is_none_or(|c| e < c)
    }

    /// Monomials of total degree exactly `d`, lexicographically decreasing in
    /// the first exponent.
    pub fn degree_basis(&self, d: usize) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut cur = vec![0u64; self.caps.len()];
        self.fill(0, d as u64, &mut cur, &mut out);
        out
    }

    fn fill(&self, j: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if j == self.caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in (0..=left).rev() {
            if self.admits(j, e) {
                cur[j] = e;
                self.fill(j + 1, left - e, cur, out);
            }
        }
        cur[j] = 0;
    }

    /// Monomials of degree `<= d`, by increasing degree.
    pub fn truncated_basis(&self, d: usize) -> Vec<Vec<u64>> {
        (0..=d).flat_map(|k| self.degree_basis(k)).collect()
    }

    /// Number of monomials of degree exactly `d`.
    pub fn s_dim(&self, d: usize) -> usize {
        let mut counts = vec![0usize; d + 1];
        counts[0] = 1;
        for cap in &self.caps {
            let mut next = vec![0usize; d + 1];
            for (n, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for e in 0..=(d - n) {
                    if cap.is_some_and(|k| e as u64 >= k) {
                        break;
                    }
                    next[n + e] += c;
                }
            }
            counts = next;
        }
        counts[d]
    }

    /// `x^a x^b`, or `None` when a cap is reached.
    pub fn multiply(&self, a: &[u64], b: &[u64]) -> Option<Vec<u64>> {
        let s: Vec<u64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        s.iter().enumerate().all(|(j, &e)| self.admits(j, e)).then_some(s)
    }

    /// Expansion of the group element `prod_j (1 + x_j)^{beta_j}` in monomials
    /// of degree `<= d`: coefficient of `x^gamma` is `prod_j C(beta_j, gamma_j)`.
    pub fn group_element(&self, beta: &[u64], d: usize) -> Vec<(Vec<u64>, u8)> {
        let f = self.field;
        let mut out = Vec::new();
        for gamma in self.truncated_basis(d) {
            let c = gamma
                .iter()
                .zip(beta)
                .fold(1u8, |acc, (&g, &b)| f.mul(acc, f.binomial(b, g)));
            if c != 0 {
                out.push((gamma, c));
            }
        }
        out
    }

    /// Degree of a monomial.
    pub fn degree(m: &[u64]) -> usize {
        m.iter().sum::<u64>() as usize
    }
}

/// Change of basis from `[v]` to monomials: column `v` holds the coefficients
/// of `[v] = prod_j (1 + x_j)^{v_j}` over [`MonomialModel::truncated_basis`]
/// of the full degree range.
pub fn monomial_change_of_basis(alg: &GroupAlgebra) -> Result<(Vec<Vec<u64>>, FpMatrix)> {
    let model = MonomialModel::from_group(alg.group())?;
    let top: u64 = model.caps.iter().map(|c| c.expect("finite group") - 1).sum();
    let monos = model.truncated_basis(top as usize);
    let pos: std::collections::HashMap<&Vec<u64>, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut m = FpMatrix::zeros(alg.field(), monos.len(), alg.dim());
    for v in 0..alg.dim() {
        for (gamma, c) in model.group_element(&alg.coords(v), top as usize) {
            m.set(pos[&gamma], v, c as i64);
        }
    }
    Ok((monos, m))
}

/// Polynomial functions `V -> F_p` of degree `<= d`, as value vectors in the
/// element order of [`AbGroup::elements`].
#[derive(Clone, Debug, Serialize)]
pub struct PolSpace {
    pub group: String,
    pub d: usize,
    pub basis: Vec<Vec<u8>>,
    #[serde(skip)]
    span: Option<Subspace>,
}

impl PolSpace {
    fn from_subspace(group: &AbGroup, d: usize, s: Subspace) -> Self {
        PolSpace { group: group.to_string(), d, basis: s.basis(), span: Some(s) }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn subspace(&self) -> &Subspace {
        self.span.as_ref().expect("constructed with a span")
    }

    pub fn contains(&self, f: &[u8]) -> bool {
        self.subspace().contains(f)
    }
}

fn annihilator(field: Fp, ambient: usize, s: &Subspace) -> Subspace {
    // functions f with sum_v f(v) b(v) = 0 for every basis vector b
    let rows: Vec<Vec<i64>> = s.basis().iter().map(|b| b.iter().map(|&x| x as i64).collect()).collect();
    if rows.is_empty() {
        return Subspace::full(field, ambient);
    }
    let m = FpMatrix::from_rows(field, &rows).expect("rectangular");
    Subspace::column_span(&m.kernel())
}

/// `Pol_d(V)` as the annihilator of `I^{d+1}`.
pub fn pol_space(group: &AbGroup, d: usize) -> Result<PolSpace> {
    let alg = GroupAlgebra::new(group)?;
    let ideal = alg.filtration(d + 1).pop().expect("nonempty");
    Ok(PolSpace::from_subspace(group, d, annihilator(alg.field(), alg.dim(), &ideal)))
}

/// `Pol_d(V)` as the functions killed by every `(d+1)`-fold finite difference
/// `Δ_{v_1}...Δ_{v_{d+1}}` along nonzero elements, evaluated at every point.
pub fn pol_space_by_differences(group: &AbGroup, d: usize) -> Result<PolSpace> {
    let alg = GroupAlgebra::new(group)?;
    let n = alg.dim();
    // evaluation functionals f -> (Δ...Δ f)(x), built one difference at a time
    let mut functionals = Subspace::full(alg.field(), n);
    for _ in 0..=d {
        let mut next = Subspace::new(alg.field(), n);
        for u in functionals.basis() {
            for v in 1..n {
                next.insert(&alg.difference(&u, v));
                if next.dim() == n {
                    break;
                }
            }
        }
        functionals = next;
    }
    Ok(PolSpace::from_subspace(group, d, annihilator(alg.field(), n, &functionals)))
}

/// Outcome of comparing `Pol_d(V/p^i)` (pulled back along `V -> V/p^i`) with `Pol_d(V)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolStationarity {
    pub d: usize,
    pub i: u32,
    pub quotient_dim: usize,
    pub dim: usize,
    pub equal: bool,
}

pub fn pol_stationarity(group: &AbGroup, d: usize, i: u32) -> Result<PolStationarity> {
    let (quot, proj) = group.quotient_mod(i)?;
    let small = pol_space(&quot, d)?;
    let big = pol_space(group, d)?;
    let elements = group.elements()?;
    let image_idx: Vec<usize> = elements
        .iter()
        .map(|v| quot.element_index(&proj.apply(v)?))
        .collect::<Result<_>>()?;
    let mut pulled = Subspace::new(big.subspace().field(), elements.len());
    for g in &small.basis {
        let f: Vec<u8> = image_idx.iter().map(|&k| g[k]).collect();
        pulled.insert(&f);
    }
    Ok(PolStationarity {
        d,
        i,
        quotient_dim: small.dim(),
        dim: big.dim(),
        equal: pulled.same_as(big.subspace()),
    })
}

/// Whether precomposition with `V -> V/p^i` maps `Pol_d(V/p^i)` onto `Pol_d(V)`.
pub fn pol_stationarity_check(group: &AbGroup, d: usize, i: u32) -> Result<bool> {
    Ok(pol_stationarity(group, d, i)?.equal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u32, s: &str) -> AbGroup {
        AbGroup::parse(p, s).unwrap()
    }

    #[test]
    fn augmentation_power_examples() {
        let a = GroupAlgebra::new(&g(2, "Z/2")).unwrap();
        assert_eq!(a.augmentation_power(1).dim(), 1);
        let v = g(3, "Z/3 + Z/9");
        let b = GroupAlgebra::new(&v).unwrap();
        assert_eq!(b.augmentation_power(0).dim(), 27);
        let c = GroupAlgebra::new(&g(2, "Z/4")).unwrap();
        assert_eq!(c.augmentation_power(4).dim(), 0);
        assert_eq!(c.augmentation_power(5).dim(), 0);
    }

    #[test]
    fn augmentation_ideal_elements_have_zero_augmentation() {
        let a = GroupAlgebra::new(&g(2, "Z/2 + Z/4")).unwrap();
        let i1 = a.augmentation_power(1);
        assert_eq!(i1.dim(), a.dim() - 1);
        for c in i1.basis.columns() {
            assert_eq!(a.augmentation(&c), 0);
        }
    }

    #[test]
    fn ideal_powers_multiply() {
        let a = GroupAlgebra::new(&g(2, "Z/2 + Z/4")).unwrap();
        let f = a.filtration(5);
        for x in 0..3 {
            for y in 0..3 {
                if x + y > 5 {
                    continue;
                }
                for u in f[x].basis() {
                    for w in f[y].basis() {
                        assert!(f[x + y].contains(&a.mul(&u, &w)));
                    }
                }
            }
        }
    }

    #[test]
    fn graded_dims_of_cyclic_groups() {
        for p in [2u32, 3] {
            for r in 1..=3 {
                let v = AbGroup::cyclic(p, r).unwrap();
                let q = p.pow(r) as usize;
                let dims = GroupAlgebra::new(&v).unwrap().s_graded_dims(q + 2);
                for (d, &dim) in dims.iter().enumerate() {
                    assert_eq!(dim, usize::from(d < q), "p={p} r={r} d={d}");
                }
            }
        }
    }

    #[test]
    fn graded_dim_matches_monomial_count() {
        let v = g(2, "Z/2 + Z/4");
        assert_eq!(GroupAlgebra::new(&v).unwrap().s_graded_dim(3), 2);
        assert_eq!(MonomialModel::from_group(&v).unwrap().s_dim(3), 2);
        assert_eq!(MonomialModel::from_group(&v).unwrap().degree_basis(3), vec![vec![1, 2], vec![0, 3]]);
    }

    #[test]
    fn monomial_model_with_free_variable() {
        let m = MonomialModel::from_group(&g(2, "Z + Z/2")).unwrap();
        assert_eq!(m.s_dim(5), 2);
        assert_eq!(m.multiply(&[2, 1], &[1, 1]), None);
        assert_eq!(m.multiply(&[2, 1], &[3, 0]), Some(vec![5, 1]));
    }

    #[test]
    fn change_of_basis_carries_filtration_to_monomial_degrees() {
        let v = g(3, "Z/3 + Z/3");
        let alg = GroupAlgebra::new(&v).unwrap();
        let (monos, m) = monomial_change_of_basis(&alg).unwrap();
        assert!(m.is_invertible());
        let f = alg.filtration(5);
        for (d, level) in f.iter().enumerate() {
            let img = Subspace::column_span(&m.mul(&level.basis_matrix()).unwrap());
            let mut expected = Subspace::new(alg.field(), monos.len());
            for (k, mono) in monos.iter().enumerate() {
                if MonomialModel::degree(mono) >= d {
                    expected.insert(&alg.basis_vector(k));
                }
            }
            assert!(img.same_as(&expected), "d={d}");
        }
    }

    #[test]
    fn pol_space_examples() {
        assert_eq!(pol_space(&g(2, "Z/4"), 0).unwrap().dim(), 1);
        assert_eq!(pol_space(&g(2, "Z/2"), 1).unwrap().dim(), 2);
        assert_eq!(pol_space(&g(2, "Z/4"), 2).unwrap().dim(), 3);
    }

    #[test]
    fn pol_constructions_agree() {
        for (p, s) in [(2, "Z/4"), (2, "Z/2 + Z/4"), (3, "Z/9"), (3, "Z/3 + Z/3")] {
            let v = g(p, s);
            for d in 0..6 {
                let a = pol_space(&v, d).unwrap();
                let b = pol_space_by_differences(&v, d).unwrap();
                assert!(a.subspace().same_as(b.subspace()), "{v} d={d}");
            }
        }
    }

    #[test]
    fn pol_duality_and_exhaustion() {
        let v = g(2, "Z/2 + Z/4");
        let alg = GroupAlgebra::new(&v).unwrap();
        let f = alg.filtration(6);
        for d in 0..5 {
            assert_eq!(pol_space(&v, d).unwrap().dim() + f[d + 1].dim(), 8);
        }
        assert_eq!(pol_space(&v, 4).unwrap().dim(), 8);
        assert_eq!(pol_space(&v, 3).unwrap().dim(), 7);
    }

    #[test]
    fn pol_stationarity_examples() {
        let z4 = g(2, "Z/4");
        assert!(pol_stationarity_check(&z4, 1, 1).unwrap());
        assert!(pol_stationarity_check(&z4, 0, 0).unwrap());
        let r = pol_stationarity(&z4, 2, 1).unwrap();
        assert_eq!((r.quotient_dim, r.dim, r.equal), (2, 3, false));
    }

    #[test]
    fn rejects_free_group() {
        assert!(GroupAlgebra::new(&g(2, "Z")).is_err());
    }
}
