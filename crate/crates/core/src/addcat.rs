//! Finite skeletal truncations of the additive category generated by a few
//! finitely generated abelian p-groups, optionally divided by `p^t`.
//!
//! An object is a multiplicity vector over the generators. Its cyclic
//! summands are listed generator-major, copy-major, then in the generator's
//! own summand order. A morphism is a matrix of coefficients over cyclic
//! summands: entry `(s, r)` is `c` for the map `x ↦ c · p^{sh(r,s)} x`
//! between the `r`-th source summand and the `s`-th target summand, where
//! `sh(r,s) = max(exp_s - exp_r, 0)`, taken modulo the order of the cyclic
//! group `Hom(C_r, C_s)`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::abgrp::{AbGroup, CyclicOrder};
use crate::error::{Error, Result};
use crate::linalg::Fp;

/// A formal direct sum `⊕ g_j^{m_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Object(pub Vec<usize>);

impl Object {
    pub fn zero(num_generators: usize) -> Self {
        Object(vec![0; num_generators])
    }

    pub fn unit(num_generators: usize, j: usize) -> Self {
        let mut v = vec![0; num_generators];
        v[j] = 1;
        Object(v)
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0
    }

    pub fn add(&self, other: &Object) -> Object {
        Object(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: usize) -> Object {
        Object(self.0.iter().map(|a| a * k).collect())
    }

    /// Parses `V3` (single generator) or `V(1,2)`.
    pub fn parse(num_generators: usize, s: &str) -> Result<Object> {
        let bad = || Error::Invalid(format!("cannot parse object {s:?}"));
        let s = s.trim();
        let rest = s.strip_prefix('V').ok_or_else(bad)?;
        if let Some(inner) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let v: Vec<usize> = inner
                .split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            if v.len() != num_generators {
                return Err(bad());
            }
            Ok(Object(v))
        } else if num_generators == 1 {
            Ok(Object(vec![rest.parse().map_err(|_| bad())?]))
        } else {
            Err(bad())
        }
    }
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "V{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
            write!(f, "V({})", parts.join(","))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonSpec {
    pub p: u32,
    pub generators: Vec<AbGroup>,
    /// Bound on the total multiplicity of an object.
    pub k: usize,
    /// Realizes the quotient category by `p^t`.
    pub mod_reduction: Option<u32>,
}

impl SkeletonSpec {
    pub fn new(p: u32, generators: Vec<AbGroup>, k: usize) -> Self {
        SkeletonSpec { p, generators, k, mod_reduction: None }
    }

    /// The same spec with morphisms divided by `p^t`.
    pub fn reduce_mod(&self, t: u32) -> Result<SkeletonSpec> {
        if t == 0 {
            return Err(Error::Invalid("mod reduction needs t >= 1".into()));
        }
        let t = self.mod_reduction.map_or(t, |s| s.min(t));
        Ok(SkeletonSpec { mod_reduction: Some(t), ..self.clone() })
    }
}

/// A morphism between (possibly virtual) objects.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub source: Object,
    pub target: Object,
    /// Row-major over (target summand, source summand).
    pub coeffs: Vec<u64>,
}

/// The category with all objects; the skeleton bound `K` is only a membership test.
#[derive(Clone, Debug)]
pub struct Skeleton {
    spec: SkeletonSpec,
    field: Fp,
    gen_orders: Vec<Vec<CyclicOrder>>,
    objects: Vec<Object>,
    index: HashMap<Object, usize>,
    generators: OnceLock<Vec<Morphism>>,
}

impl Skeleton {
    pub fn new(spec: SkeletonSpec) -> Result<Self> {
        let field = Fp::new(spec.p)?;
        if spec.k == 0 {
            return Err(Error::Invalid("skeleton bound K must be at least 1".into()));
        }
        if spec.generators.is_empty() {
            return Err(Error::Invalid("at least one generator is needed".into()));
        }
        for g in &spec.generators {
            if g.p() != spec.p {
                return Err(Error::Invalid(format!("generator {g} is not over p = {}", spec.p)));
            }
            if g.free_rank() > 0 && spec.mod_reduction.is_none() {
                return Err(Error::InfiniteHom(format!("End({g})")));
            }
        }
        let gen_orders: Vec<Vec<CyclicOrder>> = spec.generators.iter().map(AbGroup::cyclic_orders).collect();
        let n = spec.generators.len();
        let mut objects = Vec::new();
        for total in 0..=spec.k {
            let mut level = Vec::new();
            compositions(n, total, &mut vec![0; n], 0, &mut level);
            level.sort_by(|a, b| b.cmp(a));
            objects.extend(level.into_iter().map(Object));
        }
        let index = objects.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        Ok(Skeleton { spec, field, gen_orders, objects, index, generators: OnceLock::new() })
    }

    pub fn spec(&self) -> &SkeletonSpec {
        &self.spec
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.spec.p
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn num_generators(&self) -> usize {
        self.spec.generators.len()
    }

    /// Objects by increasing total multiplicity.
    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn object_index(&self, a: &Object) -> Option<usize> {
        self.index.get(a).copied()
    }

    pub fn contains(&self, a: &Object) -> bool {
        a.0.len() == self.num_generators() && a.total() <= self.spec.k
    }

    pub fn check_contains(&self, a: &Object) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::OutsideSkeleton(format!("{a} (K = {})", self.spec.k)))
        }
    }

    pub fn zero_object(&self) -> Object {
        Object::zero(self.num_generators())
    }

    pub fn generator_object(&self, j: usize) -> Object {
        Object::unit(self.num_generators(), j)
    }

    /// All generators finite: every object is Pontryagin self-dual.
    pub fn is_self_dual(&self) -> bool {
        self.spec.generators.iter().all(AbGroup::is_finite)
    }

    /// Cyclic summands of an object.
    pub fn summands(&self, a: &Object) -> Vec<CyclicOrder> {
        let mut out = Vec::new();
        for (j, &m) in a.0.iter().enumerate() {
            for _ in 0..m {
                out.extend_from_slice(&self.gen_orders[j]);
            }
        }
        out
    }

    /// For each copy of a generator in `a`: (generator index, first summand index).
    pub fn copies(&self, a: &Object) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut off = 0;
        for (j, &m) in a.0.iter().enumerate() {
            for _ in 0..m {
                out.push((j, off));
                off += self.gen_orders[j].len();
            }
        }
        out
    }

    fn pow(&self, e: u32) -> u64 {
        (self.spec.p as u64).pow(e)
    }

    /// Order of `Hom(C_r, C_s)` (after mod reduction).
    pub fn entry_modulus(&self, r: CyclicOrder, s: CyclicOrder) -> u64 {
        let m = match (r, s) {
            (Some(a), Some(b)) => Some(self.pow(a.min(b))),
            (None, Some(b)) => Some(self.pow(b)),
            (Some(_), None) => Some(1),
            (None, None) => None,
        };
        match (m, self.spec.mod_reduction) {
            (Some(m), Some(t)) => m.min(self.pow(t)),
            (Some(m), None) => m,
            (None, Some(t)) => self.pow(t),
            (None, None) => unreachable!("free generators require mod reduction"),
        }
    }

    pub fn shift(r: CyclicOrder, s: CyclicOrder) -> u32 {
        match (r, s) {
            (Some(a), Some(b)) => b.saturating_sub(a),
            _ => 0,
        }
    }

    /// Entry moduli of `Hom(a, b)`, row-major.
    pub fn hom_moduli(&self, a: &Object, b: &Object) -> Vec<u64> {
        let sa = self.summands(a);
        let sb = self.summands(b);
        let mut out = Vec::with_capacity(sa.len() * sb.len());
        for &s in &sb {
            for &r in &sa {
                out.push(self.entry_modulus(r, s));
            }
        }
        out
    }

    /// `|Hom(a, b)|`, or `None` past `u64`.
    pub fn hom_size(&self, a: &Object, b: &Object) -> Option<u64> {
        self.hom_moduli(a, b).into_iter().try_fold(1u64, |acc, m| acc.checked_mul(m))
    }

    /// `dim Hom(a, b) ⊗ F_p`.
    pub fn hom_rank(&self, a: &Object, b: &Object) -> usize {
        self.hom_moduli(a, b).into_iter().filter(|&m| m > 1).count()
    }

    /// Mixed-radix enumeration: the last entry varies fastest.
    pub fn morphism_from_index(&self, a: &Object, b: &Object, mut idx: u64) -> Morphism {
        let moduli = self.hom_moduli(a, b);
        let mut coeffs = vec![0u64; moduli.len()];
        for i in (0..moduli.len()).rev() {
            coeffs[i] = idx % moduli[i];
            idx /= moduli[i];
        }
        Morphism { source: a.clone(), target: b.clone(), coeffs }
    }

    pub fn morphism_index(&self, f: &Morphism) -> u64 {
        let moduli = self.hom_moduli(&f.source, &f.target);
        f.coeffs.iter().zip(&moduli).fold(0u64, |acc, (&c, &m)| acc * m + c % m)
    }

    /// Every morphism `a → b`; rejects hom sets above `limit`.
    pub fn hom_set(&self, a: &Object, b: &Object, limit: u64) -> Result<Vec<Morphism>> {
        let n = self.hom_size(a, b).filter(|&n| n <= limit).ok_or_else(|| {
            Error::TooLarge(format!("Hom({a}, {b}) exceeds {limit} morphisms"))
        })?;
        Ok((0..n).map(|i| self.morphism_from_index(a, b, i)).collect())
    }

    /// Builds a morphism, reducing coefficients.
    pub fn morphism(&self, a: &Object, b: &Object, coeffs: Vec<i64>) -> Result<Morphism> {
        let moduli = self.hom_moduli(a, b);
        if coeffs.len() != moduli.len() {
            return Err(Error::Dimension(format!("Hom({a}, {b}) has {} entries", moduli.len())));
        }
        let coeffs = coeffs.iter().zip(&moduli).map(|(&c, &m)| c.rem_euclid(m as i64) as u64).collect();
        Ok(Morphism { source: a.clone(), target: b.clone(), coeffs })
    }

    pub fn zero_morphism(&self, a: &Object, b: &Object) -> Morphism {
        let n = self.summands(a).len() * self.summands(b).len();
        Morphism { source: a.clone(), target: b.clone(), coeffs: vec![0; n] }
    }

    pub fn identity(&self, a: &Object) -> Morphism {
        let s = self.summands(a);
        let n = s.len();
        let mut coeffs = vec![0u64; n * n];
        for i in 0..n {
            coeffs[i * n + i] = 1 % self.entry_modulus(s[i], s[i]);
        }
        Morphism { source: a.clone(), target: a.clone(), coeffs }
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: &Morphism, f: &Morphism) -> Result<Morphism> {
        if f.target != g.source {
            return Err(Error::Dimension(format!("cannot compose {} -> {} with {} -> {}", g.source, g.target, f.source, f.target)));
        }
        let sa = self.summands(&f.source);
        let sb = self.summands(&f.target);
        let sc = self.summands(&g.target);
        let (na, nb) = (sa.len(), sb.len());
        let mut coeffs = vec![0u64; sc.len() * na];
        for (u, &cu) in sc.iter().enumerate() {
            for (r, &ar) in sa.iter().enumerate() {
                let m = self.entry_modulus(ar, cu);
                if m == 1 {
                    continue;
                }
                let mut acc: u128 = 0;
                for (s, &bs) in sb.iter().enumerate() {
                    let x = f.coeffs[s * na + r];
                    let y = g.coeffs[u * nb + s];
                    if x == 0 || y == 0 {
                        continue;
                    }
                    let e = Self::shift(ar, bs) + Self::shift(bs, cu) - Self::shift(ar, cu);
                    let scale = pow_mod(self.spec.p as u64, e, m);
                    acc = (acc + x as u128 * y as u128 % m as u128 * scale as u128) % m as u128;
                }
                coeffs[u * na + r] = acc as u64;
            }
        }
        Ok(Morphism { source: f.source.clone(), target: g.target.clone(), coeffs })
    }

    pub fn add(&self, f: &Morphism, g: &Morphism) -> Result<Morphism> {
        if f.source != g.source || f.target != g.target {
            return Err(Error::Dimension("adding morphisms with different ends".into()));
        }
        let moduli = self.hom_moduli(&f.source, &f.target);
        let coeffs = f.coeffs.iter().zip(&g.coeffs).zip(&moduli).map(|((a, b), m)| (a + b) % m).collect();
        Ok(Morphism { source: f.source.clone(), target: f.target.clone(), coeffs })
    }

    pub fn scalar(&self, f: &Morphism, c: i64) -> Morphism {
        let moduli = self.hom_moduli(&f.source, &f.target);
        let coeffs = f
            .coeffs
            .iter()
            .zip(&moduli)
            .map(|(&a, &m)| ((a as i128 * c as i128).rem_euclid(m as i128)) as u64)
            .collect();
        Morphism { source: f.source.clone(), target: f.target.clone(), coeffs }
    }

    /// Pontryagin dual `b → a` of `f : a → b`: the transposed coefficient matrix.
    pub fn dual(&self, f: &Morphism) -> Result<Morphism> {
        if !self.is_self_dual() {
            return Err(Error::Invalid("duality needs finite generators".into()));
        }
        let na = self.summands(&f.source).len();
        let nb = self.summands(&f.target).len();
        let mut coeffs = vec![0u64; na * nb];
        for s in 0..nb {
            for r in 0..na {
                coeffs[r * nb + s] = f.coeffs[s * na + r];
            }
        }
        Ok(Morphism { source: f.target.clone(), target: f.source.clone(), coeffs })
    }

    /// A morphism that maps whole generator copies by integer multiples of the
    /// identity: `m[t][s]` is the multiple from source copy `s` to target copy `t`
    /// (both copies must be of the same generator unless the multiple is zero).
    pub fn from_copy_matrix(&self, a: &Object, b: &Object, m: &[Vec<i64>]) -> Result<Morphism> {
        let ca = self.copies(a);
        let cb = self.copies(b);
        let na = self.summands(a).len();
        let sb = self.summands(b);
        let mut coeffs = vec![0i64; sb.len() * na];
        for (t, &(jt, ot)) in cb.iter().enumerate() {
            for (s, &(js, os)) in ca.iter().enumerate() {
                let c = m[t][s];
                if c == 0 {
                    continue;
                }
                if jt != js {
                    return Err(Error::Invalid("copy matrix mixes generators".into()));
                }
                for k in 0..self.gen_orders[jt].len() {
                    coeffs[(ot + k) * na + os + k] = c;
                }
            }
        }
        self.morphism(a, b, coeffs)
    }

    /// `a_1 ⊕ ... ⊕ a_n` with its inclusions and projections; copies of each
    /// generator are ordered by summand.
    pub fn direct_sum(&self, parts: &[Object]) -> Result<DirectSum> {
        let n = self.num_generators();
        let sum = parts.iter().fold(Object::zero(n), |acc, a| acc.add(a));
        let total_copies = sum.total();
        // position of (part i, copy c of a_i) among copies of the sum
        let mut pos = vec![Vec::new(); parts.len()];
        let mut block_start = vec![0usize; n];
        for j in 1..n {
            block_start[j] = block_start[j - 1] + sum.0[j - 1];
        }
        let mut filled = vec![0usize; n];
        for (i, a) in parts.iter().enumerate() {
            for (j, &m) in a.0.iter().enumerate() {
                for _ in 0..m {
                    pos[i].push(block_start[j] + filled[j]);
                    filled[j] += 1;
                }
            }
        }
        let mut inclusions = Vec::new();
        let mut projections = Vec::new();
        for (i, a) in parts.iter().enumerate() {
            let ncopies = a.total();
            let mut inc = vec![vec![0i64; ncopies]; total_copies];
            let mut proj = vec![vec![0i64; total_copies]; ncopies];
            for (c, &q) in pos[i].iter().enumerate() {
                inc[q][c] = 1;
                proj[c][q] = 1;
            }
            inclusions.push(self.from_copy_matrix(a, &sum, &inc)?);
            projections.push(self.from_copy_matrix(&sum, a, &proj)?);
        }
        Ok(DirectSum { object: sum, inclusions, projections })
    }

    /// The fold map `a^{⊕n} → a`.
    pub fn fold(&self, a: &Object, n: usize) -> Result<Morphism> {
        let ds = self.direct_sum(&vec![a.clone(); n])?;
        let mut acc = self.zero_morphism(&ds.object, a);
        for p in &ds.projections {
            acc = self.add(&acc, p)?;
        }
        Ok(acc)
    }

    /// The diagonal `a → a^{⊕n}`.
    pub fn diagonal(&self, a: &Object, n: usize) -> Result<Morphism> {
        let ds = self.direct_sum(&vec![a.clone(); n])?;
        let mut acc = self.zero_morphism(a, &ds.object);
        for i in &ds.inclusions {
            acc = self.add(&acc, i)?;
        }
        Ok(acc)
    }

    /// `f_1 ⊕ ... ⊕ f_n`.
    pub fn sum_of_morphisms(&self, fs: &[Morphism]) -> Result<Morphism> {
        let src = self.direct_sum(&fs.iter().map(|f| f.source.clone()).collect::<Vec<_>>())?;
        let tgt = self.direct_sum(&fs.iter().map(|f| f.target.clone()).collect::<Vec<_>>())?;
        let mut acc = self.zero_morphism(&src.object, &tgt.object);
        for (i, f) in fs.iter().enumerate() {
            let t = self.compose(&tgt.inclusions[i], &self.compose(f, &src.projections[i])?)?;
            acc = self.add(&acc, &t)?;
        }
        Ok(acc)
    }

    /// Single-entry morphisms of `Hom(g_i, g_j)` with coefficient 1: they
    /// generate the hom group additively.
    fn unit_homs(&self, i: usize, j: usize) -> Vec<Morphism> {
        let a = self.generator_object(i);
        let b = self.generator_object(j);
        let moduli = self.hom_moduli(&a, &b);
        (0..moduli.len())
            .filter(|&e| moduli[e] > 1)
            .map(|e| {
                let mut coeffs = vec![0u64; moduli.len()];
                coeffs[e] = 1;
                Morphism { source: a.clone(), target: b.clone(), coeffs }
            })
            .collect()
    }

    /// Places `h : g_i → g_j` from copy `s` of `a` to copy `t` of `b`, plus the
    /// copy matrix `base`.
    fn with_entry(&self, a: &Object, b: &Object, base: &[Vec<i64>], s: usize, t: usize, h: &Morphism) -> Result<Morphism> {
        let mut f = self.from_copy_matrix(a, b, base)?;
        let ca = self.copies(a);
        let cb = self.copies(b);
        let na = self.summands(a).len();
        let (_, os) = ca[s];
        let (_, ot) = cb[t];
        let hs = self.summands(&h.source).len();
        let moduli = self.hom_moduli(a, b);
        for x in 0..self.summands(&h.target).len() {
            for y in 0..hs {
                let idx = (ot + x) * na + os + y;
                f.coeffs[idx] = (f.coeffs[idx] + h.coeffs[x * hs + y]) % moduli[idx];
            }
        }
        Ok(f)
    }

    /// A set of morphisms inside the skeleton whose composites give every
    /// morphism of the skeleton: adjacent inclusions and projections, adjacent
    /// swaps, elementary automorphisms, endomorphisms of a single copy, and
    /// copy replacements along `Hom(g_i, g_j)`.
    pub fn generating_morphisms(&self) -> Result<Vec<Morphism>> {
        let n = self.num_generators();
        let mut out = Vec::new();
        for a in &self.objects {
            let c = a.total();
            let ca = self.copies(a);
            let id: Vec<Vec<i64>> = (0..c).map(|i| (0..c).map(|j| i64::from(i == j)).collect()).collect();
            for j in 0..n {
                let b = a.add(&self.generator_object(j));
                if self.contains(&b) {
                    let ds = self.direct_sum(&[a.clone(), self.generator_object(j)])?;
                    out.push(ds.inclusions[0].clone());
                    out.push(ds.projections[0].clone());
                }
            }
            for s in 0..c {
                if s + 1 < c && ca[s].0 == ca[s + 1].0 {
                    let mut m = id.clone();
                    m[s][s] = 0;
                    m[s + 1][s + 1] = 0;
                    m[s][s + 1] = 1;
                    m[s + 1][s] = 1;
                    out.push(self.from_copy_matrix(a, a, &m)?);
                }
                for t in 0..c {
                    if s != t {
                        for h in self.unit_homs(ca[s].0, ca[t].0) {
                            out.push(self.with_entry(a, a, &id, s, t, &h)?);
                        }
                    }
                }
            }
            for j in 0..n {
                let Some(first) = ca.iter().position(|&(g, _)| g == j) else {
                    continue;
                };
                let g = self.generator_object(j);
                let mut base = id.clone();
                base[first][first] = 0;
                for phi in self.hom_set(&g, &g, 1 << 12)? {
                    out.push(self.with_entry(a, a, &base, first, first, &phi)?);
                }
                for i in 0..n {
                    if i == j {
                        continue;
                    }
                    // replace the first copy of g_j by a copy of g_i placed last in its block
                    let mut b = a.clone();
                    b.0[j] -= 1;
                    b.0[i] += 1;
                    let cb = self.copies(&b);
                    let mut m = vec![vec![0i64; c]; cb.len()];
                    let mut src_rest: Vec<usize> = (0..c).filter(|&s| s != first).collect();
                    let new_pos = cb.iter().rposition(|&(gi, _)| gi == i).expect("copy of g_i");
                    for (t, _) in cb.iter().enumerate() {
                        if t == new_pos {
                            continue;
                        }
                        let s = src_rest.remove(0);
                        m[t][s] = 1;
                    }
                    for h in self.hom_set(&g, &self.generator_object(i), 1 << 12)? {
                        out.push(self.with_entry(a, &b, &m, first, new_pos, &h)?);
                    }
                }
            }
        }
        let mut seen = HashSet::new();
        out.retain(|f| seen.insert(f.clone()));
        Ok(out)
    }

    /// [`Self::generating_morphisms`], computed once.
    pub fn generating_set(&self) -> Result<&[Morphism]> {
        if let Some(g) = self.generators.get() {
            return Ok(g);
        }
        let g = self.generating_morphisms()?;
        Ok(self.generators.get_or_init(|| g))
    }

    /// Breadth-first closure of the identities under composition with `gens`,
    /// grouped by (source, target); stops past `limit` morphisms.
    pub fn composition_closure(&self, gens: &[Morphism], limit: usize) -> Result<HashSet<Morphism>> {
        let mut by_source: HashMap<&Object, Vec<&Morphism>> = HashMap::new();
        for g in gens {
            by_source.entry(&g.source).or_default().push(g);
        }
        let mut seen: HashSet<Morphism> = HashSet::new();
        let mut queue = VecDeque::new();
        for a in &self.objects {
            let id = self.identity(a);
            seen.insert(id.clone());
            queue.push_back(id);
        }
        while let Some(f) = queue.pop_front() {
            for g in by_source.get(&f.target).into_iter().flatten() {
                let h = self.compose(g, &f)?;
                if seen.insert(h.clone()) {
                    if seen.len() > limit {
                        return Err(Error::TooLarge(format!("closure exceeds {limit} morphisms")));
                    }
                    queue.push_back(h);
                }
            }
        }
        Ok(seen)
    }

    /// Reduction `A → A/p^t` of a morphism into the reduced skeleton.
    pub fn reduce_morphism(&self, reduced: &Skeleton, f: &Morphism) -> Morphism {
        let moduli = reduced.hom_moduli(&f.source, &f.target);
        let coeffs = f.coeffs.iter().zip(&moduli).map(|(c, m)| c % m).collect();
        Morphism { source: f.source.clone(), target: f.target.clone(), coeffs }
    }
}

#[derive(Clone, Debug)]
pub struct DirectSum {
    pub object: Object,
    pub inclusions: Vec<Morphism>,
    pub projections: Vec<Morphism>,
}

fn compositions(n: usize, total: usize, cur: &mut Vec<usize>, j: usize, out: &mut Vec<Vec<usize>>) {
    if j + 1 == n {
        cur[j] = total;
        out.push(cur.clone());
        return;
    }
    for x in 0..=total {
        cur[j] = x;
        compositions(n, total - x, cur, j + 1, out);
    }
    cur[j] = 0;
}

fn pow_mod(b: u64, mut e: u32, m: u64) -> u64 {
    let mut r = 1 % m;
    let mut x = b % m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * x % m;
        }
        x = x * x % m;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skel(p: u32, gens: &[&str], k: usize) -> Skeleton {
        let g = gens.iter().map(|s| AbGroup::parse(p, s).unwrap()).collect();
        Skeleton::new(SkeletonSpec::new(p, g, k)).unwrap()
    }

    fn v(x: &[usize]) -> Object {
        Object(x.to_vec())
    }

    #[test]
    fn hom_counts() {
        let s = skel(2, &["Z/2"], 2);
        assert_eq!(s.objects(), &[v(&[0]), v(&[1]), v(&[2])]);
        assert_eq!(s.hom_size(&v(&[1]), &v(&[2])), Some(4));
        assert_eq!(s.hom_size(&v(&[0]), &v(&[2])), Some(1));
        let t = skel(2, &["Z/4"], 1);
        assert_eq!(t.hom_size(&v(&[1]), &v(&[1])), Some(4));
        let u = Skeleton::new(SkeletonSpec::new(2, vec![AbGroup::cyclic(2, 2).unwrap()], 2).reduce_mod(1).unwrap()).unwrap();
        assert_eq!(u.hom_size(&v(&[1]), &v(&[1])), Some(2));
        let w = Skeleton::new(SkeletonSpec::new(2, vec![AbGroup::cyclic(2, 3).unwrap()], 1).reduce_mod(1).unwrap()).unwrap();
        assert_eq!(w.hom_size(&v(&[1]), &v(&[1])), Some(2));
    }

    #[test]
    fn hom_count_is_product_over_generator_blocks() {
        let s = skel(2, &["Z/2 + Z/4", "Z/8"], 2);
        let g0 = AbGroup::parse(2, "Z/2 + Z/4").unwrap();
        let g1 = AbGroup::parse(2, "Z/8").unwrap();
        let order = |a: &AbGroup, b: &AbGroup| a.hom_group(b).unwrap().0.order().unwrap();
        assert_eq!(s.hom_size(&v(&[1, 1]), &v(&[0, 1])), Some(order(&g0, &g1) * order(&g1, &g1)));
        assert_eq!(s.hom_size(&v(&[1, 0]), &v(&[1, 0])), Some(order(&g0, &g0)));
    }

    #[test]
    fn rejects_free_generators_without_reduction() {
        let spec = SkeletonSpec::new(2, vec![AbGroup::free(2, 1).unwrap()], 2);
        assert!(matches!(Skeleton::new(spec.clone()), Err(Error::InfiniteHom(_))));
        let red = Skeleton::new(spec.reduce_mod(2).unwrap()).unwrap();
        assert_eq!(red.hom_size(&v(&[1]), &v(&[1])), Some(4));
    }

    #[test]
    fn composition_agrees_with_group_homs() {
        // compare against AbHom composition on single-copy objects
        let g = AbGroup::parse(2, "Z/2 + Z/8").unwrap();
        let h = AbGroup::parse(2, "Z/4").unwrap();
        let s = Skeleton::new(SkeletonSpec::new(2, vec![g.clone(), h.clone()], 2)).unwrap();
        let a = v(&[1, 0]);
        let b = v(&[0, 1]);
        let to_abhom = |f: &Morphism, src: &AbGroup, dst: &AbGroup| {
            let so = src.cyclic_orders();
            let to = dst.cyclic_orders();
            let m: Vec<Vec<i64>> = (0..to.len())
                .map(|t| {
                    (0..so.len())
                        .map(|r| (f.coeffs[t * so.len() + r] * 2u64.pow(Skeleton::shift(so[r], to[t]))) as i64)
                        .collect()
                })
                .collect();
            crate::abgrp::AbHom::new(src.clone(), dst.clone(), m).unwrap()
        };
        for f in s.hom_set(&a, &b, 1000).unwrap() {
            for k in s.hom_set(&b, &a, 1000).unwrap() {
                let c = s.compose(&k, &f).unwrap();
                let expected = to_abhom(&k, &h, &g).compose(&to_abhom(&f, &g, &h)).unwrap();
                assert_eq!(to_abhom(&c, &g, &g), expected);
            }
        }
    }

    #[test]
    fn composition_is_associative_and_bilinear() {
        let s = skel(2, &["Z/2", "Z/4"], 2);
        let objs = s.objects().to_vec();
        for a in &objs {
            for b in &objs {
                for c in &objs {
                    let fs = s.hom_set(a, b, 1 << 12).unwrap();
                    let gs = s.hom_set(b, c, 1 << 12).unwrap();
                    for f in fs.iter().step_by(1 + fs.len() / 5) {
                        for g in gs.iter().step_by(1 + gs.len() / 5) {
                            let gf = s.compose(g, f).unwrap();
                            for f2 in fs.iter().step_by(1 + fs.len() / 4) {
                                let lhs = s.compose(g, &s.add(f, f2).unwrap()).unwrap();
                                let rhs = s.add(&gf, &s.compose(g, f2).unwrap()).unwrap();
                                assert_eq!(lhs, rhs);
                            }
                            for d in objs.iter().take(3) {
                                for h in s.hom_set(c, d, 1 << 12).unwrap().iter().step_by(3) {
                                    assert_eq!(
                                        s.compose(h, &gf).unwrap(),
                                        s.compose(&s.compose(h, g).unwrap(), f).unwrap()
                                    );
                                }
                            }
                        }
                    }
                    let id = s.identity(b);
                    for f in s.hom_set(a, b, 1 << 12).unwrap() {
                        assert_eq!(s.compose(&id, &f).unwrap(), f);
                    }
                }
            }
        }
    }

    #[test]
    fn direct_sum_universal_property() {
        let s = skel(2, &["Z/2", "Z/4"], 3);
        let a = v(&[1, 0]);
        let b = v(&[0, 1]);
        let c = v(&[1, 1]);
        let ds = s.direct_sum(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(ds.object, c);
        for (i, p) in ds.projections.iter().enumerate() {
            for (j, inc) in ds.inclusions.iter().enumerate() {
                let e = s.compose(p, inc).unwrap();
                if i == j {
                    assert_eq!(e, s.identity(&e.source));
                } else {
                    assert!(e.coeffs.iter().all(|&x| x == 0));
                }
            }
        }
        // Hom(a ⊕ b, c) ≅ Hom(a, c) × Hom(b, c)
        let mut pairs = HashSet::new();
        for f in s.hom_set(&ds.object, &c, 1 << 12).unwrap() {
            let fa = s.compose(&f, &ds.inclusions[0]).unwrap();
            let fb = s.compose(&f, &ds.inclusions[1]).unwrap();
            assert!(pairs.insert((fa, fb)));
        }
        assert_eq!(pairs.len() as u64, s.hom_size(&a, &c).unwrap() * s.hom_size(&b, &c).unwrap());
    }

    #[test]
    fn reduction_is_compatible_with_composition() {
        let spec = SkeletonSpec::new(2, vec![AbGroup::cyclic(2, 3).unwrap(), AbGroup::cyclic(2, 1).unwrap()], 2);
        let s = Skeleton::new(spec.clone()).unwrap();
        let r = Skeleton::new(spec.reduce_mod(1).unwrap()).unwrap();
        let objs = s.objects().to_vec();
        for a in &objs {
            for b in &objs {
                for c in &objs {
                    for f in s.hom_set(a, b, 1 << 16).unwrap().iter().step_by(7) {
                        for g in s.hom_set(b, c, 1 << 16).unwrap().iter().step_by(13) {
                            let lhs = s.reduce_morphism(&r, &s.compose(g, f).unwrap());
                            let rhs = r.compose(&s.reduce_morphism(&r, g), &s.reduce_morphism(&r, f)).unwrap();
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
        // large t changes nothing
        let big = Skeleton::new(spec.reduce_mod(3).unwrap()).unwrap();
        for a in &objs {
            for b in &objs {
                assert_eq!(big.hom_moduli(a, b), s.hom_moduli(a, b));
            }
        }
    }

    #[test]
    fn duality_reverses_composition() {
        let s = skel(3, &["Z/3 + Z/9"], 2);
        let a = v(&[1]);
        let b = v(&[2]);
        let gs = s.hom_set(&b, &a, 1 << 16).unwrap();
        for f in s.hom_set(&a, &b, 1 << 16).unwrap().iter().step_by(997) {
            for g in gs.iter().step_by(1009) {
                let lhs = s.dual(&s.compose(g, f).unwrap()).unwrap();
                let rhs = s.compose(&s.dual(f).unwrap(), &s.dual(g).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn generating_morphisms_generate() {
        for (p, gens, k) in [
            (2, vec!["Z/2"], 3),
            (2, vec!["Z/4"], 2),
            (3, vec!["Z/3"], 2),
            (2, vec!["Z/2", "Z/4"], 2),
            (2, vec!["Z/2", "Z/4"], 1),
            (2, vec!["Z/2 + Z/4"], 1),
        ] {
            let s = skel(p, &gens, k);
            let g = s.generating_morphisms().unwrap();
            let closure = s.composition_closure(&g, 1 << 20).unwrap();
            let total: u64 = s
                .objects()
                .iter()
                .flat_map(|a| s.objects().iter().map(move |b| (a, b)))
                .map(|(a, b)| s.hom_size(a, b).unwrap())
                .sum();
            assert_eq!(closure.len() as u64, total, "{gens:?} K={k}");
        }
    }

    #[test]
    fn morphism_indexing_roundtrip() {
        let s = skel(2, &["Z/2", "Z/4"], 2);
        let a = v(&[1, 1]);
        let b = v(&[0, 2]);
        for i in 0..s.hom_size(&a, &b).unwrap() {
            assert_eq!(s.morphism_index(&s.morphism_from_index(&a, &b, i)), i);
        }
    }

    #[test]
    fn object_names() {
        assert_eq!(Object::parse(1, "V3").unwrap(), v(&[3]));
        assert_eq!(Object::parse(2, "V(1, 2)").unwrap(), v(&[1, 2]));
        assert_eq!(v(&[1, 2]).to_string(), "V(1,2)");
        assert!(Object::parse(2, "V3").is_err());
    }
}
