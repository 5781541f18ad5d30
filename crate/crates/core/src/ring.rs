//! The commutative-ring interface shared by every coefficient ring, and the
//! scalar ring `Z/p^N`.
//!
//! Rings are context objects: elements carry no reference to their parent and
//! every operation goes through the ring value.

use std::fmt::Debug;

use rand::Rng;

use crate::error::{Error, Result};

pub trait Ring {
    type Elem: Clone + Debug + PartialEq;

    fn prime(&self) -> u64;
    /// Smallest k with p^k = 0 in this ring.
    fn p_precision(&self) -> u32;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_u64(&self, c: u64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn eq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_unit(&self, a: &Self::Elem) -> bool;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn random(&self, rng: &mut dyn rand::RngCore) -> Self::Elem;

    fn from_i64(&self, c: i64) -> Self::Elem {
        if c >= 0 {
            self.from_u64(c as u64)
        } else {
            self.neg(&self.from_u64(c.unsigned_abs()))
        }
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn scale(&self, c: i64, a: &Self::Elem) -> Self::Elem {
        self.mul(&self.from_i64(c), a)
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    fn try_inv(&self, a: &Self::Elem) -> Result<Self::Elem> {
        self.inv(a).ok_or_else(|| Error::NotUnit(format!("{a:?}")))
    }
}

pub fn pow_u64(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("p-power overflows u64")
}

pub fn checked_modulus(p: u64, e: u32) -> Result<u64> {
    match p.checked_pow(e) {
        Some(m) if m < (1u64 << 62) => Ok(m),
        _ => Err(Error::Precision(format!("{p}^{e} exceeds 62 bits"))),
    }
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn addmod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn submod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

/// Inverse of a unit modulo m by the extended Euclidean algorithm.
pub fn invmod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

pub fn reduce_i64(c: i64, m: u64) -> u64 {
    (c as i128).rem_euclid(m as i128) as u64
}

/// p-adic valuation of a residue modulo p^n; returns n for zero.
pub fn valuation(mut c: u64, p: u64, n: u32) -> u32 {
    if c == 0 {
        return n;
    }
    let mut v = 0;
    while c % p == 0 {
        c /= p;
        v += 1;
    }
    v
}

/// The ring Z/p^N with elements stored as canonical residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Zpn {
    p: u64,
    n: u32,
    modulus: u64,
}

impl Zpn {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if p < 2 || !is_prime(p) {
            return Err(Error::InvalidDesc(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::InvalidDesc("precision must be positive".into()));
        }
        Ok(Zpn { p, n, modulus: checked_modulus(p, n)? })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl Ring for Zpn {
    type Elem = u64;

    fn prime(&self) -> u64 {
        self.p
    }
    fn p_precision(&self) -> u32 {
        self.n
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    fn from_u64(&self, c: u64) -> u64 {
        c % self.modulus
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        addmod(*a, *b, self.modulus)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        submod(*a, *b, self.modulus)
    }
    fn neg(&self, a: &u64) -> u64 {
        submod(0, *a, self.modulus)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mulmod(*a, *b, self.modulus)
    }
    fn eq(&self, a: &u64, b: &u64) -> bool {
        a == b
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &u64) -> bool {
        a % self.p != 0
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        invmod(*a, self.modulus)
    }
    fn random(&self, rng: &mut dyn rand::RngCore) -> u64 {
        rng.gen_range(0..self.modulus)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
