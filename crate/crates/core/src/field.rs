//! Arithmetic in GF(p) for word-sized primes.
//!
//! Residues are always kept canonical in `[0, p)`. Products go through a
//! 128-bit intermediate followed by a single reduction; the Mersenne prime
//! `2^61 - 1` takes a folding fast path.

use std::fmt;

use crate::error::Error;

/// The Mersenne prime `2^61 - 1`, the default production modulus.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// Largest modulus accepted (exclusive).
pub const MAX_MODULUS: u64 = 1 << 62;

/// A canonical residue modulo the ambient prime.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(u64);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);
    pub const ONE: Scalar = Scalar(1);

    /// Wraps a value the caller knows is already reduced.
    #[inline]
    pub(crate) const fn from_canonical(v: u64) -> Self {
        Scalar(v)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// 8-byte little-endian encoding used by transcripts.
    pub fn to_le_bytes(self) -> [u8; 8] {
        self.0.to_le_bytes()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Modular arithmetic context for a prime `p < 2^62`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    p: u64,
}

impl Field {
    /// Builds a field after checking that `p` is a prime in `(2, 2^62)`.
    pub fn new(p: u64) -> Result<Self, Error> {
        if p <= 2 || p >= MAX_MODULUS {
            return Err(Error::InvalidParameter(format!(
                "modulus {p} outside (2, 2^62)"
            )));
        }
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("modulus {p} is not prime")));
        }
        Ok(Field { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary integer.
    #[inline]
    pub fn element(&self, v: u64) -> Scalar {
        Scalar(v % self.p)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        let r = v.rem_euclid(self.p as i64);
        Scalar(r as u64)
    }

    /// Checks that `v` is already canonical.
    pub fn canonical(&self, v: u64) -> Option<Scalar> {
        (v < self.p).then_some(Scalar(v))
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        let s = a.0 + b.0;
        Scalar(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        Scalar(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        let prod = a.0 as u128 * b.0 as u128;
        if self.p == MERSENNE_61 {
            let folded = (prod as u64 & MERSENNE_61) + (prod >> 61) as u64;
            let folded = (folded & MERSENNE_61) + (folded >> 61);
            Scalar(if folded >= MERSENNE_61 { folded - MERSENNE_61 } else { folded })
        } else {
            Scalar((prod % self.p as u128) as u64)
        }
    }

    /// `acc + a * b`
    #[inline]
    pub fn mul_add(&self, acc: Scalar, a: Scalar, b: Scalar) -> Scalar {
        self.add(acc, self.mul(a, b))
    }

    pub fn pow(&self, base: Scalar, mut exp: u64) -> Scalar {
        let mut result = Scalar::ONE;
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        result
    }

    pub fn inv(&self, a: Scalar) -> Result<Scalar, Error> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.p as i128, a.0 as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Scalar(t0.rem_euclid(self.p as i128) as u64))
    }

    pub fn div(&self, a: Scalar, b: Scalar) -> Result<Scalar, Error> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

/// A field together with the finite sample set used for challenges.
///
/// Challenges are drawn from `{0, ..., sample_set_size - 1}`; the soundness
/// of every probabilistic check is `1 / sample_set_size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    field: Field,
    sample_set_size: u64,
}

impl FieldSpec {
    pub fn new(p: u64) -> Result<Self, Error> {
        let field = Field::new(p)?;
        Ok(FieldSpec { field, sample_set_size: p })
    }

    pub fn from_field(field: Field) -> Self {
        FieldSpec { field, sample_set_size: field.modulus() }
    }

    pub fn with_sample_set(mut self, size: u64) -> Result<Self, Error> {
        if size == 0 || size > self.field.modulus() {
            return Err(Error::InvalidParameter(format!(
                "sample set size {size} outside [1, p]"
            )));
        }
        self.sample_set_size = size;
        Ok(self)
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn sample_set_size(&self) -> u64 {
        self.sample_set_size
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Miller-Rabin with the first twelve prime bases, which is exact for all
/// 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
