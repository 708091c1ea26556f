//! Truncated Koszul complexes `K^n_i = S^{n-i}_{(p)} ⊗ Λ^i` of a finitely
//! generated abelian p-group, their homology, the Künneth isomorphism for
//! direct sums, and the classical Koszul complex with its divided-power dual.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::abgrp::AbGroup;
use crate::error::Result;
use crate::grpalg::MonomialModel;
use crate::linalg::{ChainComplex, CochainComplex, Fp, FpMatrix};

/// Strictly increasing `i`-subsets of `0..k`, lexicographically.
pub fn wedge_basis(k: usize, i: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for j in start..k {
            if k - j < left {
                break;
            }
            cur.push(j);
            go(j + 1, k, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, i, &mut Vec::new(), &mut out);
    out
}

/// A basis element `x^α ⊗ e_J` of `S^{n-i} ⊗ Λ^i`.
pub type BasisElement = (Vec<u64>, Vec<usize>);

/// Basis of `K^n_i`: pairs (monomial of degree `n-i`, wedge subset of size `i`),
/// monomial-major.
pub type KoszulBasis = Vec<BasisElement>;

/// The complex `K^n_*` built on a monomial model. Term `i` is
/// `S^{n-i} ⊗ Λ^i`, with differential
/// `x^α ⊗ e_J ↦ Σ_t (-1)^{t-1} x^α x_{j_t} ⊗ e_{J \ j_t}`.
#[derive(Clone, Debug)]
pub struct KoszulComplex {
    pub n: usize,
    pub bases: Vec<KoszulBasis>,
    pub complex: ChainComplex,
}

impl KoszulComplex {
    pub fn build(model: &MonomialModel, n: usize) -> Result<Self> {
        let f = model.field();
        let k = model.num_vars();
        let bases: Vec<KoszulBasis> = (0..=n)
            .map(|i| {
                let monos = model.degree_basis(n - i);
                let wedges = wedge_basis(k, i);
                monos
                    .iter()
                    .flat_map(|m| wedges.iter().map(move |w| (m.clone(), w.clone())))
                    .collect()
            })
            .collect();
        let index: Vec<HashMap<&BasisElement, usize>> =
            bases.iter().map(|b| b.iter().enumerate().map(|(i, x)| (x, i)).collect()).collect();
        let mut diffs = Vec::with_capacity(n);
        for i in 1..=n {
            let mut d = FpMatrix::zeros(f, bases[i - 1].len(), bases[i].len());
            for (col, (alpha, wedge)) in bases[i].iter().enumerate() {
                for (t, &j) in wedge.iter().enumerate() {
                    let mut unit = vec![0u64; k];
                    unit[j] = 1;
                    let Some(mono) = model.multiply(alpha, &unit) else {
                        continue;
                    };
                    let rest: Vec<usize> = wedge.iter().copied().filter(|&x| x != j).collect();
                    let row = index[i - 1][&(mono, rest)];
                    let sign = if t % 2 == 0 { 1 } else { f.neg(1) };
                    d.add_to(row, col, sign);
                }
            }
            diffs.push(d);
        }
        let dims = bases.iter().map(Vec::len).collect();
        Ok(KoszulComplex { n, bases, complex: ChainComplex::new(f, dims, diffs)? })
    }

    pub fn for_group(group: &AbGroup, n: usize) -> Result<Self> {
        Self::build(&MonomialModel::from_group(group)?, n)
    }

    pub fn dims(&self) -> &[usize] {
        self.complex.dims()
    }

    pub fn homology_dims(&self) -> Vec<usize> {
        self.complex.homology_dims()
    }
}

/// One nonzero entry `dim H_i(n)(V)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyEntry {
    pub n: usize,
    pub i: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HomologyTable {
    pub group: String,
    #[serde(serialize_with = "entries_as_list")]
    pub entries: BTreeMap<(usize, usize), usize>,
}

fn entries_as_list<S: serde::Serializer>(m: &BTreeMap<(usize, usize), usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|(&(n, i), &dim)| HomologyEntry { n, i, dim }))
}

impl HomologyTable {
    pub fn get(&self, n: usize, i: usize) -> usize {
        self.entries.get(&(n, i)).copied().unwrap_or(0)
    }

    pub fn nonzero(&self) -> Vec<HomologyEntry> {
        self.entries
            .iter()
            .filter(|(_, &d)| d > 0)
            .map(|(&(n, i), &dim)| HomologyEntry { n, i, dim })
            .collect()
    }
}

/// `dim H_i(n)(V)` for every `n <= n_max`, `i <= n`.
pub fn homology_table(group: &AbGroup, n_max: usize) -> Result<HomologyTable> {
    let model = MonomialModel::from_group(group)?;
    let mut entries = BTreeMap::new();
    for n in 0..=n_max {
        for (i, d) in KoszulComplex::build(&model, n)?.homology_dims().into_iter().enumerate() {
            entries.insert((n, i), d);
        }
    }
    Ok(HomologyTable { group: group.to_string(), entries })
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingReport {
    pub table: HomologyTable,
    /// `p^r` with `r` the torsion exponent.
    pub bound: u64,
    /// Entries with `n > p^r i` and nonzero homology.
    pub violations: Vec<HomologyEntry>,
}

/// Checks `H_i(n)(V) = 0` whenever `n > p^r i`.
pub fn verify_vanishing(group: &AbGroup, n_max: usize) -> Result<VanishingReport> {
    let table = homology_table(group, n_max)?;
    let bound = (group.p() as u64).pow(group.torsion_exponent());
    let violations = table
        .nonzero()
        .into_iter()
        .filter(|e| e.n as u64 > bound * e.i as u64)
        .collect();
    Ok(VanishingReport { table, bound, violations })
}

/// Direct sum of chain complexes of equal length.
fn direct_sum(field: Fp, parts: &[ChainComplex]) -> Result<ChainComplex> {
    let len = parts[0].len();
    let dims: Vec<usize> = (0..len).map(|i| parts.iter().map(|c| c.dims()[i]).sum()).collect();
    let diffs = (1..len)
        .map(|i| {
            parts.iter().fold(FpMatrix::zeros(field, 0, 0), |acc, c| {
                acc.direct_sum(c.differential(i).expect("in range"))
            })
        })
        .collect();
    ChainComplex::new(field, dims, diffs)
}

/// The isomorphism `K^n(U ⊕ V) → ⊕_{a+b=n} K^a(U) ⊗ K^b(V)` sending
/// `x^{(α,β)} ⊗ e_{(J,J')}` to `(x^α ⊗ e_J) ⊗ (x^β ⊗ e_{J'})`.
#[derive(Clone, Debug)]
pub struct ExponentialIso {
    pub source: ChainComplex,
    pub target: ChainComplex,
    /// `maps[i] : source_i → target_i`.
    pub maps: Vec<FpMatrix>,
}

impl ExponentialIso {
    /// `d Φ_i = Φ_{i-1} d` for every `i`.
    pub fn is_chain_map(&self) -> bool {
        (1..self.source.len()).all(|i| {
            let lhs = self.target.differential(i).unwrap().mul(&self.maps[i]).unwrap();
            let rhs = self.maps[i - 1].mul(self.source.differential(i).unwrap()).unwrap();
            lhs == rhs
        })
    }

    pub fn is_bijective(&self) -> bool {
        self.maps.iter().all(|m| m.rows() == m.cols() && (m.rows() == 0 || m.is_invertible()))
    }
}

pub fn exponential_iso(u: &AbGroup, v: &AbGroup, n: usize) -> Result<ExponentialIso> {
    let sum = u.direct_sum(v)?;
    let mu = MonomialModel::from_group(u)?;
    let mv = MonomialModel::from_group(v)?;
    // order the generators of U ⊕ V as those of U followed by those of V
    let mut caps = mu.caps().to_vec();
    caps.extend_from_slice(mv.caps());
    let field = mu.field();
    let msum = MonomialModel::new(field, caps);
    let ku = mu.num_vars();
    let source = KoszulComplex::build(&msum, n)?;
    let left: Vec<KoszulComplex> = (0..=n).map(|a| KoszulComplex::build(&mu, a)).collect::<Result<_>>()?;
    let right: Vec<KoszulComplex> = (0..=n).map(|b| KoszulComplex::build(&mv, b)).collect::<Result<_>>()?;
    let pieces: Vec<ChainComplex> = (0..=n)
        .map(|a| left[a].complex.tensor(&right[n - a].complex))
        .collect::<Result<_>>()?;
    let target = direct_sum(field, &pieces)?;
    debug_assert_eq!(sum.num_generators(), msum.num_vars());

    let lookup = |kc: &KoszulComplex, s: usize, key: &(Vec<u64>, Vec<usize>)| -> usize {
        kc.bases[s].iter().position(|x| x == key).expect("basis element present")
    };
    let mut maps = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut m = FpMatrix::zeros(field, target.dims()[i], source.dims()[i]);
        for (col, (alpha, wedge)) in source.bases[i].iter().enumerate() {
            let (au, av) = alpha.split_at(ku);
            let ju: Vec<usize> = wedge.iter().copied().filter(|&j| j < ku).collect();
            let jv: Vec<usize> = wedge.iter().filter(|&&j| j >= ku).map(|&j| j - ku).collect();
            let a = MonomialModel::degree(au) + ju.len();
            let b = n - a;
            let (s, t) = (ju.len(), jv.len());
            // offset of block a in the direct sum, then of C_s ⊗ D_t inside the tensor
            let mut off: usize = pieces[..a].iter().map(|c| c.dims()[i]).sum();
            for s2 in 0..s {
                if i - s2 <= b {
                    off += left[a].dims()[s2] * right[b].dims()[i - s2];
                }
            }
            let x = lookup(&left[a], s, &(au.to_vec(), ju));
            let y = lookup(&right[b], t, &(av.to_vec(), jv));
            m.set(off + x * right[b].dims()[t] + y, col, 1);
        }
        maps.push(m);
    }
    Ok(ExponentialIso { source: source.complex, target, maps })
}

/// The classical Koszul complex `Λ^n → Λ^{n-1} ⊗ S^1 → ... → S^n` of an
/// `m`-dimensional space, and its dual `Γ^n → Γ^{n-1} ⊗ Λ^1 → ... → Λ^n`.
pub fn classical_koszul_and_dual(field: Fp, m: usize, n: usize) -> Result<(KoszulComplex, CochainComplex)> {
    let k = KoszulComplex::build(&MonomialModel::new(field, vec![None; m]), n)?;
    let dual = k.complex.dual();
    Ok((k, dual))
}

/// The divided-power Koszul complex built directly:
/// `γ_β ⊗ e_J ↦ Σ_{j ∉ J} γ_{β - e_j} ⊗ e_j ∧ e_J`, with `C^i = Γ^{n-i} ⊗ Λ^i`
/// in the bases of [`KoszulComplex::bases`].
pub fn divided_power_koszul(field: Fp, m: usize, n: usize) -> Result<CochainComplex> {
    let model = MonomialModel::new(field, vec![None; m]);
    let k = KoszulComplex::build(&model, n)?;
    let index: Vec<HashMap<&BasisElement, usize>> =
        k.bases.iter().map(|b| b.iter().enumerate().map(|(i, x)| (x, i)).collect()).collect();
    let mut cobs = Vec::new();
    for i in 0..n {
        let mut d = FpMatrix::zeros(field, k.bases[i + 1].len(), k.bases[i].len());
        for (col, (beta, wedge)) in k.bases[i].iter().enumerate() {
            for j in 0..m {
                if beta[j] == 0 || wedge.contains(&j) {
                    continue;
                }
                let mut b = beta.clone();
                b[j] -= 1;
                let pos = wedge.iter().filter(|&&x| x < j).count();
                let mut w = wedge.clone();
                w.insert(pos, j);
                let sign = if pos % 2 == 0 { 1 } else { field.neg(1) };
                d.add_to(index[i + 1][&(b, w)], col, sign);
            }
        }
        cobs.push(d);
    }
    CochainComplex::new(field, k.dims().to_vec(), cobs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u32, s: &str) -> AbGroup {
        AbGroup::parse(p, s).unwrap()
    }

    #[test]
    fn wedge_dims_are_binomial() {
        assert_eq!(wedge_basis(4, 2).len(), 6);
        assert_eq!(wedge_basis(3, 0), vec![Vec::<usize>::new()]);
        assert!(wedge_basis(1, 2).is_empty());
    }

    #[test]
    fn cyclic_order_two_in_degree_two() {
        let k = KoszulComplex::for_group(&g(2, "Z/2"), 2).unwrap();
        assert_eq!(k.dims(), &[0, 1, 0]);
        assert_eq!(k.homology_dims(), vec![0, 1, 0]);
    }

    #[test]
    fn degree_zero_is_the_ground_field() {
        let k = KoszulComplex::for_group(&g(3, "Z/3 + Z/9"), 0).unwrap();
        assert_eq!(k.homology_dims(), vec![1]);
    }

    #[test]
    fn mixed_group_term_dims() {
        let k = KoszulComplex::for_group(&g(2, "Z/2 + Z/4"), 3).unwrap();
        assert_eq!(k.dims(), &[2, 4, 2, 0]);
        let h = k.homology_dims();
        let chi: i64 = h.iter().enumerate().map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) }).sum();
        assert_eq!(chi, k.complex.euler_characteristic());
    }

    #[test]
    fn cyclic_witness_and_bound() {
        for p in [2u32, 3] {
            for t in 1..=2 {
                let v = AbGroup::cyclic(p, t).unwrap();
                let q = p.pow(t) as usize;
                let rep = verify_vanishing(&v, q + 4).unwrap();
                assert!(rep.violations.is_empty());
                assert_eq!(rep.table.get(q, 1), 1);
                for n in 1..=q + 4 {
                    assert_eq!(rep.table.get(n, 0), 0);
                    if n != q {
                        assert_eq!(rep.table.get(n, 1), 0, "p={p} t={t} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn free_part_is_exact_in_positive_degree() {
        let rep = verify_vanishing(&g(3, "Z^2 + Z/3"), 6).unwrap();
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn exponential_iso_small() {
        let z2 = g(2, "Z/2");
        let z4 = g(2, "Z/4");
        for n in 0..=6 {
            let iso = exponential_iso(&z2, &z4, n).unwrap();
            assert!(iso.is_chain_map(), "n={n}");
            assert!(iso.is_bijective(), "n={n}");
        }
        let zero = AbGroup::trivial(2).unwrap();
        let iso = exponential_iso(&zero, &z4, 3).unwrap();
        for m in &iso.maps {
            assert_eq!(*m, FpMatrix::identity(m.field(), m.rows()));
        }
    }

    #[test]
    fn homology_is_exponential() {
        let u = g(3, "Z/3");
        let v = g(3, "Z/9");
        let hu = homology_table(&u, 8).unwrap();
        let hv = homology_table(&v, 8).unwrap();
        let huv = homology_table(&u.direct_sum(&v).unwrap(), 8).unwrap();
        for n in 0..=8 {
            for i in 0..=n {
                let mut expected = 0;
                for a in 0..=n {
                    for s in 0..=i.min(a) {
                        if i - s <= n - a {
                            expected += hu.get(a, s) * hv.get(n - a, i - s);
                        }
                    }
                }
                assert_eq!(huv.get(n, i), expected, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn classical_complexes_are_exact() {
        for p in [2u32, 3] {
            let f = Fp::new(p).unwrap();
            for m in 1..=3 {
                for n in 1..=3 {
                    let (k, dual) = classical_koszul_and_dual(f, m, n).unwrap();
                    assert!(k.homology_dims().iter().all(|&d| d == 0));
                    assert!(dual.cohomology_dims().iter().all(|&d| d == 0));
                }
            }
        }
    }

    #[test]
    fn divided_power_complex_is_the_transpose() {
        for p in [2u32, 3] {
            let f = Fp::new(p).unwrap();
            let (_, dual) = classical_koszul_and_dual(f, 3, 3).unwrap();
            let gamma = divided_power_koszul(f, 3, 3).unwrap();
            for i in 0..3 {
                assert_eq!(dual.coboundary(i), gamma.coboundary(i));
            }
        }
    }

    #[test]
    fn identity_when_one_dimensional() {
        let f = Fp::new(2).unwrap();
        let (k, _) = classical_koszul_and_dual(f, 1, 1).unwrap();
        assert_eq!(k.complex.differential(1).unwrap(), &FpMatrix::identity(f, 1));
    }
}
