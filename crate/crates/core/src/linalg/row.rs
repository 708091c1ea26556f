//! Packed row storage shared by every elimination routine.
//!
//! Rows over F_2 are bit-packed into `u64` words; rows over odd primes keep
//! one residue per byte.

use super::field::Fp;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Row {
    Bits { words: Vec<u64>, len: usize },
    Bytes(Vec<u8>),
}

impl Row {
    pub fn zero(field: Fp, len: usize) -> Self {
        if field.p() == 2 {
            Row::Bits { words: vec![0; len.div_ceil(64)], len }
        } else {
            Row::Bytes(vec![0; len])
        }
    }

    pub fn from_dense(field: Fp, dense: &[u8]) -> Self {
        let mut r = Row::zero(field, dense.len());
        match &mut r {
            Row::Bits { words, .. } => {
                for (i, &x) in dense.iter().enumerate() {
                    if x & 1 == 1 {
                        words[i / 64] |= 1 << (i % 64);
                    }
                }
            }
            Row::Bytes(b) => b.copy_from_slice(dense),
        }
        r
    }

    pub fn len(&self) -> usize {
        match self {
            Row::Bits { len, .. } => *len,
            Row::Bytes(b) => b.len(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        match self {
            Row::Bits { words, .. } => ((words[i / 64] >> (i % 64)) & 1) as u8,
            Row::Bytes(b) => b[i],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: u8) {
        match self {
            Row::Bits { words, .. } => {
                if v & 1 == 1 {
                    words[i / 64] |= 1 << (i % 64);
                } else {
                    words[i / 64] &= !(1 << (i % 64));
                }
            }
            Row::Bytes(b) => b[i] = v,
        }
    }

    pub fn to_dense(&self) -> Vec<u8> {
        match self {
            Row::Bits { len, .. } => (0..*len).map(|i| self.get(i)).collect(),
            Row::Bytes(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Row::Bits { words, .. } => words.iter().all(|&w| w == 0),
            Row::Bytes(b) => b.iter().all(|&x| x == 0),
        }
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        match self {
            Row::Bits { words, .. } => words
                .iter()
                .enumerate()
                .find(|(_, &w)| w != 0)
                .map(|(k, w)| k * 64 + w.trailing_zeros() as usize),
            Row::Bytes(b) => b.iter().position(|&x| x != 0),
        }
    }

    /// `self += c * other`
    #[inline]
    pub fn axpy(&mut self, field: Fp, c: u8, other: &Row) {
        debug_assert_eq!(self.len(), other.len());
        if c == 0 {
            return;
        }
        match (self, other) {
            (Row::Bits { words, .. }, Row::Bits { words: o, .. }) => {
                for (w, x) in words.iter_mut().zip(o) {
                    *w ^= *x;
                }
            }
            (Row::Bytes(b), Row::Bytes(o)) => {
                let p = field.p() as u16;
                let c = c as u16;
                for (x, &y) in b.iter_mut().zip(o) {
                    if y != 0 {
                        *x = ((*x as u16 + c * y as u16) % p) as u8;
                    }
                }
            }
            _ => unreachable!("mixed row representations"),
        }
    }

    pub fn scale(&mut self, field: Fp, c: u8) {
        match self {
            Row::Bits { words, .. } => {
                if c & 1 == 0 {
                    words.iter_mut().for_each(|w| *w = 0);
                }
            }
            Row::Bytes(b) => b.iter_mut().for_each(|x| *x = field.mul(*x, c)),
        }
    }
}
