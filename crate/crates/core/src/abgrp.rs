//! Finitely generated abelian groups `Z^f + Z/p^r1 + ... + Z/p^rk` at a fixed
//! prime, their homomorphisms, quotients `V/p^i`, and the functor
//! `Ext^1_Z(-, Z/p)` together with its stationarity index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_prime, Fp, FpMatrix};

/// Generator order: free generators first, then torsion generators in
/// increasing exponent. All matrices follow this order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbGroup {
    p: u32,
    free_rank: usize,
    torsion_exps: Vec<u32>,
}

/// Order of a cyclic summand: `None` is `Z`, `Some(r)` is `Z/p^r`.
pub type CyclicOrder = Option<u32>;

impl AbGroup {
    pub fn new(p: u32, free_rank: usize, mut torsion_exps: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        torsion_exps.retain(|&r| r > 0);
        torsion_exps.sort_unstable();
        Ok(AbGroup { p, free_rank, torsion_exps })
    }

    pub fn cyclic(p: u32, r: u32) -> Result<Self> {
        Self::new(p, 0, vec![r])
    }

    pub fn free(p: u32, rank: usize) -> Result<Self> {
        Self::new(p, rank, Vec::new())
    }

    pub fn trivial(p: u32) -> Result<Self> {
        Self::new(p, 0, Vec::new())
    }

    /// Parses `"Z^f + Z/p^r + Z/8"` (whitespace-insensitive). Orders must be
    /// powers of `p`; `"0"` is the trivial group.
    pub fn parse(p: u32, s: &str) -> Result<Self> {
        let err = |reason: &str| Error::GroupParse { input: s.to_string(), reason: reason.to_string() };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        let mut free = 0usize;
        let mut tors = Vec::new();
        for term in compact.split('+') {
            if term == "0" {
                continue;
            }
            let Some(rest) = term.strip_prefix('Z') else {
                return Err(err("summands must start with Z"));
            };
            if rest.is_empty() {
                free += 1;
            } else if let Some(e) = rest.strip_prefix('^') {
                free += e.parse::<usize>().map_err(|_| err("bad free rank"))?;
            } else if let Some(ord) = rest.strip_prefix('/') {
                let order: u64 = if let Some((b, e)) = ord.split_once('^') {
                    let base: u64 = if b == "p" { p as u64 } else { b.parse().map_err(|_| err("bad base"))? };
                    let e: u32 = e.parse().map_err(|_| err("bad exponent"))?;
                    base.checked_pow(e).ok_or_else(|| err("order overflows"))?
                } else {
                    ord.parse().map_err(|_| err("bad order"))?
                };
                tors.push(p_adic_exponent(p, order).ok_or_else(|| err("order is not a power of p"))?);
            } else {
                return Err(err("unrecognized summand"));
            }
        }
        Self::new(p, free, tors)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_exps(&self) -> &[u32] {
        &self.torsion_exps
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Largest torsion exponent `r_k` (0 without torsion).
    pub fn torsion_exponent(&self) -> u32 {
        self.torsion_exps.last().copied().unwrap_or(0)
    }

    pub fn num_generators(&self) -> usize {
        self.free_rank + self.torsion_exps.len()
    }

    /// Orders of the generators in the canonical order.
    pub fn cyclic_orders(&self) -> Vec<CyclicOrder> {
        std::iter::repeat_n(None, self.free_rank)
            .chain(self.torsion_exps.iter().map(|&r| Some(r)))
            .collect()
    }

    /// `|V|`, or `None` for infinite groups (and on overflow).
    pub fn order(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        let e: u32 = self.torsion_exps.iter().sum();
        (self.p as u64).checked_pow(e)
    }

    /// Generator-wise moduli `p^{r_j}` of a finite group.
    pub fn moduli(&self) -> Result<Vec<u64>> {
        if !self.is_finite() {
            return Err(Error::InfiniteGroup(self.to_string()));
        }
        Ok(self.torsion_exps.iter().map(|&r| (self.p as u64).pow(r)).collect())
    }

    /// Lexicographic enumeration of the elements (coordinates per generator),
    /// last generator varying fastest.
    pub fn elements(&self) -> Result<Vec<Vec<u64>>> {
        let moduli = self.moduli()?;
        let n = self.order().ok_or_else(|| Error::TooLarge(self.to_string()))?;
        if n > 1 << 22 {
            return Err(Error::TooLarge(format!("{self} has {n} elements")));
        }
        let mut out = Vec::with_capacity(n as usize);
        let mut cur = vec![0u64; moduli.len()];
        for _ in 0..n {
            out.push(cur.clone());
            for j in (0..moduli.len()).rev() {
                cur[j] += 1;
                if cur[j] < moduli[j] {
                    break;
                }
                cur[j] = 0;
            }
        }
        Ok(out)
    }

    /// Index of an element in [`Self::elements`].
    pub fn element_index(&self, coords: &[u64]) -> Result<usize> {
        let moduli = self.moduli()?;
        Ok(coords.iter().zip(&moduli).fold(0usize, |acc, (&c, &m)| acc * m as usize + (c % m) as usize))
    }

    pub fn direct_sum(&self, other: &AbGroup) -> Result<AbGroup> {
        if self.p != other.p {
            return Err(Error::Invalid("direct sum across different primes".into()));
        }
        let mut t = self.torsion_exps.clone();
        t.extend_from_slice(&other.torsion_exps);
        AbGroup::new(self.p, self.free_rank + other.free_rank, t)
    }

    /// For each generator of `V`, its exponent in `V/p^i` and its generator
    /// slot there (`None` when it dies).
    fn quotient_slots(&self, i: u32) -> Vec<(u32, Option<usize>)> {
        let images: Vec<u32> = self
            .cyclic_orders()
            .into_iter()
            .map(|o| o.map_or(i, |r| r.min(i)))
            .collect();
        let mut order: Vec<usize> = (0..images.len()).filter(|&j| images[j] > 0).collect();
        order.sort_by_key(|&j| (images[j], j));
        let mut slots = vec![None; images.len()];
        for (slot, &j) in order.iter().enumerate() {
            slots[j] = Some(slot);
        }
        images.into_iter().zip(slots).collect()
    }

    /// `V/p^i` with the canonical projection.
    pub fn quotient_mod(&self, i: u32) -> Result<(AbGroup, AbHom)> {
        let slots = self.quotient_slots(i);
        let target = AbGroup::new(self.p, 0, slots.iter().map(|&(e, _)| e).collect())?;
        let mut matrix = vec![vec![0i64; self.num_generators()]; target.num_generators()];
        for (j, &(_, slot)) in slots.iter().enumerate() {
            if let Some(slot) = slot {
                matrix[slot][j] = 1;
            }
        }
        let proj = AbHom::new(self.clone(), target.clone(), matrix)?;
        Ok((target, proj))
    }

    /// `Hom_Z(V, W)` as an abelian group together with generating homs, one
    /// per nontrivial summand, in the order of the returned group's generators.
    pub fn hom_group(&self, w: &AbGroup) -> Result<(AbGroup, Vec<AbHom>)> {
        if self.p != w.p {
            return Err(Error::Invalid("hom across different primes".into()));
        }
        let mut free = Vec::new();
        let mut tors = Vec::new();
        let src = self.cyclic_orders();
        let dst = w.cyclic_orders();
        for (i, &t) in dst.iter().enumerate() {
            for (j, &s) in src.iter().enumerate() {
                let mut m = vec![vec![0i64; src.len()]; dst.len()];
                match (s, t) {
                    (None, None) => {
                        m[i][j] = 1;
                        free.push(m);
                    }
                    (None, Some(b)) => {
                        m[i][j] = 1;
                        tors.push((b, m));
                    }
                    (Some(_), None) => {}
                    (Some(a), Some(b)) => {
                        m[i][j] = (self.p as i64).pow(b.saturating_sub(a));
                        tors.push((a.min(b), m));
                    }
                }
            }
        }
        tors.sort_by_key(|(r, _)| *r);
        let group = AbGroup::new(self.p, free.len(), tors.iter().map(|(r, _)| *r).collect())?;
        let gens = free
            .into_iter()
            .chain(tors.into_iter().map(|(_, m)| m))
            .map(|m| AbHom::new(self.clone(), w.clone(), m))
            .collect::<Result<Vec<_>>>()?;
        Ok((group, gens))
    }

    /// `dim_{F_p} Ext^1_Z(V, Z/p) = dim Hom_Z(Z/p, V)`: the number of torsion summands.
    pub fn ext1_zp_dim(&self) -> usize {
        self.torsion_exps.len()
    }

    /// Matrix over F_p of `Hom(Z/p, V) -> Hom(Z/p, V/p^m)` induced by the
    /// projection, in the socle bases (one vector per torsion summand).
    pub fn socle_map(&self, m: u32) -> Result<FpMatrix> {
        let field = Fp::new(self.p)?;
        let (quot, proj) = self.quotient_mod(m)?;
        let src_tors: Vec<(usize, u32)> = self
            .cyclic_orders()
            .iter()
            .enumerate()
            .filter_map(|(j, o)| o.map(|r| (j, r)))
            .collect();
        let dst_orders = quot.cyclic_orders();
        let mut out = FpMatrix::zeros(field, dst_orders.len(), src_tors.len());
        for (col, &(j, r)) in src_tors.iter().enumerate() {
            // socle element p^{r-1} g_j and its image
            for (i, o) in dst_orders.iter().enumerate() {
                let s = o.expect("quotient is finite");
                let coeff = proj.matrix[i][j] * (self.p as i64).pow(r - 1);
                let modulus = (self.p as i64).pow(s);
                let c = coeff.rem_euclid(modulus);
                // image lies in the socle of Z/p^s iff it is a multiple of p^{s-1}
                let socle_unit = (self.p as i64).pow(s - 1);
                if c % socle_unit == 0 {
                    out.set(i, col, c / socle_unit);
                }
            }
        }
        Ok(out)
    }

    /// F_p-matrix of `Hom(Z/p, V/p^{m+1}) -> Hom(Z/p, V/p^m)` in socle bases.
    fn socle_transition(&self, m: u32) -> Result<FpMatrix> {
        let field = Fp::new(self.p)?;
        let hi = self.quotient_slots(m + 1);
        let lo = self.quotient_slots(m);
        let rows = lo.iter().filter(|s| s.1.is_some()).count();
        let cols = hi.iter().filter(|s| s.1.is_some()).count();
        let mut out = FpMatrix::zeros(field, rows, cols);
        for (&(e_hi, s_hi), &(e_lo, s_lo)) in hi.iter().zip(&lo) {
            // p^{e_hi - 1} survives in the socle of Z/p^{e_lo} only when nothing is cut off
            if let (Some(a), Some(b)) = (s_hi, s_lo) {
                if e_hi == e_lo {
                    out.set(b, a, 1);
                }
            }
        }
        Ok(out)
    }

    /// Stationarity of `Ext^1_Z(-, Z/p)` on `V`, decided on the finite range
    /// `m <= r_k + f + 2`.
    pub fn stationarity(&self) -> Result<Stationarity> {
        let cap = self.torsion_exponent() + self.free_rank as u32 + 2;
        let target_dim = self.ext1_zp_dim();
        let mut levels = Vec::new();
        for m in 0..=cap {
            // Ext^1(V/p^m) -> Ext^1(V) is the dual of the socle map
            let to_v = self.socle_map(m)?.transpose();
            let kernel = to_v.kernel();
            let trans = self.socle_transition(m)?.transpose();
            let dies = trans.mul(&kernel)?.is_zero();
            levels.push(StationarityLevel {
                m,
                source_dim: to_v.cols(),
                image_rank: to_v.rank(),
                kernel_dies_in_transition: dies,
            });
        }
        let ok = |l: &StationarityLevel| l.image_rank == target_dim && l.kernel_dies_in_transition;
        let index = (0..levels.len()).find(|&n| levels[n..].iter().all(ok)).map(|n| n as u32);
        Ok(Stationarity { index, cap, levels })
    }

    /// Smallest `n` from which the colimit of `Ext^1_Z(V/p^m, Z/p)` is reached.
    pub fn stationarity_index(&self) -> Result<Option<u32>> {
        Ok(self.stationarity()?.index)
    }
}

/// Behaviour of `Ext^1_Z(V/p^m, Z/p) -> Ext^1_Z(V, Z/p)` at one level `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StationarityLevel {
    pub m: u32,
    pub source_dim: usize,
    pub image_rank: usize,
    pub kernel_dies_in_transition: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stationarity {
    pub index: Option<u32>,
    pub cap: u32,
    pub levels: Vec<StationarityLevel>,
}

fn p_adic_exponent(p: u32, mut n: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut e = 0;
    while n.is_multiple_of(p as u64) {
        n /= p as u64;
        e += 1;
    }
    (n == 1).then_some(e)
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("Z^{n}")),
        }
        for &r in &self.torsion_exps {
            parts.push(format!("Z/{}", (self.p as u64).pow(r)));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Parses with an explicit prime in the form `"p:<group>"`, e.g. `"2:Z/4+Z"`.
impl FromStr for AbGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (p, g) = s.split_once(':').ok_or_else(|| Error::GroupParse {
            input: s.into(),
            reason: "expected <p>:<group>".into(),
        })?;
        let p: u32 = p.trim().parse().map_err(|_| Error::GroupParse { input: s.into(), reason: "bad prime".into() })?;
        AbGroup::parse(p, g)
    }
}

/// A homomorphism given by an integer matrix: entry `(i, j)` is the
/// coefficient of target generator `i` in the image of source generator `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbHom {
    pub source: AbGroup,
    pub target: AbGroup,
    pub matrix: Vec<Vec<i64>>,
}

impl AbHom {
    /// Reduces entries modulo target orders and checks well-definedness.
    pub fn new(source: AbGroup, target: AbGroup, mut matrix: Vec<Vec<i64>>) -> Result<Self> {
        let so = source.cyclic_orders();
        let to = target.cyclic_orders();
        if matrix.len() != to.len() || matrix.iter().any(|r| r.len() != so.len()) {
            return Err(Error::Dimension("hom matrix shape".into()));
        }
        let p = source.p as i64;
        for (i, t) in to.iter().enumerate() {
            for (j, s) in so.iter().enumerate() {
                let e = &mut matrix[i][j];
                if let Some(b) = t {
                    *e = e.rem_euclid(p.pow(*b));
                }
                let need = match (s, t) {
                    (_, None) if s.is_some() => {
                        if *e != 0 {
                            return Err(Error::Invalid("torsion generator cannot map to Z nontrivially".into()));
                        }
                        continue;
                    }
                    (None, _) => 0,
                    (Some(a), Some(b)) => b.saturating_sub(*a),
                    (Some(_), None) => unreachable!(),
                };
                if *e % p.pow(need) != 0 {
                    return Err(Error::Invalid(format!(
                        "entry ({i},{j}) = {e} not divisible by p^{need}"
                    )));
                }
            }
        }
        Ok(AbHom { source, target, matrix })
    }

    pub fn identity(g: &AbGroup) -> Self {
        let n = g.num_generators();
        let m = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        AbHom::new(g.clone(), g.clone(), m).expect("identity is well defined")
    }

    /// `self . other` (apply `other` first).
    pub fn compose(&self, other: &AbHom) -> Result<AbHom> {
        if other.target != self.source {
            return Err(Error::Dimension("composition of incompatible homs".into()));
        }
        let rows = self.matrix.len();
        let cols = other.source.num_generators();
        let mid = self.source.num_generators();
        let m: Vec<Vec<i64>> = (0..rows)
            .map(|i| (0..cols).map(|k| (0..mid).map(|j| self.matrix[i][j] * other.matrix[j][k]).sum()).collect())
            .collect();
        AbHom::new(other.source.clone(), self.target.clone(), m)
    }

    /// Image of an element of a finite source, as target coordinates.
    pub fn apply(&self, x: &[u64]) -> Result<Vec<u64>> {
        let moduli = self.target.moduli()?;
        Ok(self
            .matrix
            .iter()
            .zip(&moduli)
            .map(|(row, &m)| {
                row.iter()
                    .zip(x)
                    .map(|(&a, &b)| (a as i128 * b as i128).rem_euclid(m as i128))
                    .sum::<i128>()
                    .rem_euclid(m as i128) as u64
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u32, s: &str) -> AbGroup {
        AbGroup::parse(p, s).unwrap()
    }

    #[test]
    fn parse_variants() {
        assert_eq!(g(2, "Z^2 + Z/8 + Z/2"), AbGroup::new(2, 2, vec![1, 3]).unwrap());
        assert_eq!(g(3, " Z / 3 ^ 2 "), AbGroup::cyclic(3, 2).unwrap());
        assert_eq!(g(2, "Z/p^3"), AbGroup::cyclic(2, 3).unwrap());
        assert!(AbGroup::parse(2, "Z/6").is_err());
        assert!(AbGroup::parse(2, "Q").is_err());
        assert_eq!(g(2, "0"), AbGroup::trivial(2).unwrap());
        assert_eq!("2:Z/4".parse::<AbGroup>().unwrap(), AbGroup::cyclic(2, 2).unwrap());
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(g(2, "Z + Z/8").quotient_mod(2).unwrap().0, g(2, "Z/4 + Z/4"));
        assert_eq!(g(2, "Z/2").quotient_mod(3).unwrap().0, g(2, "Z/2"));
        assert_eq!(g(2, "Z/2 + Z/4").quotient_mod(1).unwrap().0, g(2, "Z/2 + Z/2"));
        assert_eq!(g(3, "Z^3").quotient_mod(0).unwrap().0, AbGroup::trivial(3).unwrap());
    }

    #[test]
    fn projection_is_surjective_on_elements() {
        let v = g(2, "Z/8 + Z/2");
        let (q, proj) = v.quotient_mod(2).unwrap();
        let mut hit = std::collections::HashSet::new();
        for x in v.elements().unwrap() {
            hit.insert(proj.apply(&x).unwrap());
        }
        assert_eq!(hit.len() as u64, q.order().unwrap());
    }

    #[test]
    fn hom_group_examples() {
        assert_eq!(g(2, "Z/4").hom_group(&g(2, "Z/2")).unwrap().0, g(2, "Z/2"));
        assert_eq!(g(2, "Z").hom_group(&g(2, "Z/8")).unwrap().0, g(2, "Z/8"));
        assert_eq!(g(2, "Z/2 + Z/4").hom_group(&g(2, "Z/4")).unwrap().0, g(2, "Z/2 + Z/4"));
        assert_eq!(g(2, "Z/4").hom_group(&g(2, "Z")).unwrap().0, AbGroup::trivial(2).unwrap());
    }

    #[test]
    fn ext1_examples() {
        assert_eq!(g(5, "Z^3").ext1_zp_dim(), 0);
        assert_eq!(g(3, "Z/27").ext1_zp_dim(), 1);
        assert_eq!(g(2, "Z/2 + Z/4").ext1_zp_dim(), 2);
    }

    #[test]
    fn stationarity_examples() {
        for r in 1..=4 {
            assert_eq!(AbGroup::cyclic(2, r).unwrap().stationarity_index().unwrap(), Some(r));
        }
        assert_eq!(g(2, "Z/2 + Z/8").stationarity_index().unwrap(), Some(3));
        // no torsion: every level maps onto 0 and the transition maps are 0
        assert_eq!(g(3, "Z^2").stationarity_index().unwrap(), Some(0));
        assert_eq!(g(2, "Z + Z/4").stationarity_index().unwrap(), Some(2));
    }

    #[test]
    fn ext1_of_quotients_climbs_to_torsion_plus_free() {
        let v = g(2, "Z^2 + Z/4");
        let dims: Vec<usize> = (0..6).map(|i| v.quotient_mod(i).unwrap().0.ext1_zp_dim()).collect();
        assert!(dims.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*dims.last().unwrap(), v.ext1_zp_dim() + v.free_rank());
    }

    #[test]
    fn rejects_ill_defined_hom() {
        let z2 = g(2, "Z/2");
        let z4 = g(2, "Z/4");
        assert!(AbHom::new(z2.clone(), z4.clone(), vec![vec![1]]).is_err());
        assert!(AbHom::new(z2, z4, vec![vec![2]]).is_ok());
    }

    #[test]
    fn composition_stays_well_defined() {
        let z2 = g(2, "Z/2");
        let z8 = g(2, "Z/8");
        let up = AbHom::new(z2.clone(), z8.clone(), vec![vec![4]]).unwrap();
        let down = AbHom::new(z8, z2, vec![vec![1]]).unwrap();
        let comp = down.compose(&up).unwrap();
        assert_eq!(comp.matrix, vec![vec![0]]);
    }
}
