//! Sparse polynomials in commuting variables with optional nilpotency caps,
//! truncated at a total degree.

use std::collections::BTreeMap;

use crate::linalg::Fp;

pub(crate) type Monomial = Vec<u64>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Poly(pub BTreeMap<Monomial, u8>);

#[derive(Clone, Debug)]
pub(crate) struct PolyRing {
    pub field: Fp,
    pub caps: Vec<Option<u64>>,
    pub max_degree: usize,
}

impl PolyRing {
    pub fn one(&self) -> Poly {
        let mut m = BTreeMap::new();
        m.insert(vec![0; self.caps.len()], 1);
        Poly(m)
    }

    pub fn var(&self, j: usize) -> Poly {
        let mut e = vec![0; self.caps.len()];
        e[j] = 1;
        let mut m = BTreeMap::new();
        if self.admits(&e) {
            m.insert(e, 1);
        }
        Poly(m)
    }

    fn admits(&self, e: &[u64]) -> bool {
        e.iter().sum::<u64>() as usize <= self.max_degree
            && e.iter().zip(&self.caps).all(|(&x, c)| c.is_none_or(|c| x < c))
    }

    pub fn add_assign(&self, a: &mut Poly, b: &Poly, scale: u8) {
        let f = self.field;
        for (m, &c) in &b.0 {
            let v = a.0.entry(m.clone()).or_insert(0);
            *v = f.add(*v, f.mul(c, scale));
            if *v == 0 {
                a.0.remove(m);
            }
        }
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let f = self.field;
        let mut out: BTreeMap<Monomial, u8> = BTreeMap::new();
        for (ma, &ca) in &a.0 {
            for (mb, &cb) in &b.0 {
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                if !self.admits(&m) {
                    continue;
                }
                let v = out.entry(m).or_insert(0);
                *v = f.add(*v, f.mul(ca, cb));
            }
        }
        out.retain(|_, v| *v != 0);
        Poly(out)
    }

    /// `(1 + x_j)^e` truncated.
    pub fn one_plus_var_pow(&self, j: usize, e: u64) -> Poly {
        let f = self.field;
        let mut m = BTreeMap::new();
        for k in 0..=e.min(self.max_degree as u64) {
            let mut mono = vec![0; self.caps.len()];
            mono[j] = k;
            let c = f.binomial(e, k);
            if c != 0 && self.admits(&mono) {
                m.insert(mono, c);
            }
        }
        Poly(m)
    }

    /// Keeps only the homogeneous component of degree `d`.
    pub fn homogeneous(&self, a: &Poly, d: usize) -> Poly {
        Poly(a.0.iter().filter(|(m, _)| m.iter().sum::<u64>() as usize == d).map(|(m, &c)| (m.clone(), c)).collect())
    }
}
