use crate::error::{Error, Result};

/// The prime field F_p for a prime `p <= 251`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Fp {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) || p > 251 {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Fp { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u8 {
        x.rem_euclid(self.p as i64) as u8
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u32 + b as u32) % self.p) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u32 + self.p - b as u32) % self.p) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        ((self.p - a as u32) % self.p) as u8
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u32 * b as u32) % self.p) as u8
    }

    pub fn pow(self, a: u8, mut e: u32) -> u8 {
        let mut base = a as u32 % self.p;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc as u8
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u8) -> u8 {
        assert!(!(a as u32).is_multiple_of(self.p), "inverse of zero in F_{}", self.p);
        self.pow(a, self.p - 2)
    }

    /// Binomial coefficient C(n, k) mod p via Lucas' theorem.
    pub fn binomial(self, mut n: u64, mut k: u64) -> u8 {
        let p = self.p as u64;
        let mut acc = 1u8;
        while n > 0 || k > 0 {
            let (a, b) = (n % p, k % p);
            if b > a {
                return 0;
            }
            // small binomial C(a, b) with a < p
            let mut num = 1u8;
            let mut den = 1u8;
            for i in 0..b {
                num = self.mul(num, ((a - i) % p) as u8);
                den = self.mul(den, ((i + 1) % p) as u8);
            }
            acc = self.mul(acc, self.mul(num, self.inv(den)));
            n /= p;
            k /= p;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert!(Fp::new(4).is_err());
        assert!(Fp::new(1).is_err());
        assert!(Fp::new(257).is_err());
        assert!(Fp::new(251).is_ok());
    }

    #[test]
    fn lucas_matches_pascal() {
        for p in [2u32, 3, 5] {
            let f = Fp::new(p).unwrap();
            let mut row = vec![1u64];
            for n in 0..20u64 {
                for k in 0..=n {
                    assert_eq!(f.binomial(n, k) as u64, row[k as usize] % p as u64);
                }
                let mut next = vec![1u64; row.len() + 1];
                for k in 1..row.len() {
                    next[k] = (row[k - 1] + row[k]) % 1_000_000_007;
                }
                row = next;
            }
        }
    }

    #[test]
    fn inverses() {
        let f = Fp::new(7).unwrap();
        for a in 1..7u8 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }
}
