//! Dense univariate polynomials over GF(p) and the minimal generating
//! polynomial of a linearly recurrent sequence.

use crate::error::Error;
use crate::field::{Field, Scalar};

/// Coefficients in increasing degree order, with no trailing zeros. The zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DensePolynomial {
    coeffs: Vec<Scalar>,
}

impl DensePolynomial {
    pub fn zero() -> Self {
        DensePolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        DensePolynomial { coeffs: vec![Scalar::ONE] }
    }

    /// Takes coefficients that are already canonical residues and trims them.
    pub fn from_coeffs(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DensePolynomial { coeffs }
    }

    /// `x - a`
    pub fn linear(field: &Field, a: Scalar) -> Self {
        DensePolynomial { coeffs: vec![field.neg(a), Scalar::ONE] }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Scalar> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(Scalar::ONE)
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).copied().unwrap_or(Scalar::ZERO)
    }

    /// Horner evaluation.
    pub fn eval(&self, field: &Field, x: Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::ZERO, |acc, &c| field.mul_add(c, acc, x))
    }

    pub fn mul(&self, field: &Field, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Scalar::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.mul_add(out[i + j], a, b);
            }
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, field: &Field, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs(
            (0..len)
                .map(|i| field.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn scale(&self, field: &Field, c: Scalar) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    /// Scales so the leading coefficient is one. The zero polynomial stays zero.
    pub fn monic(&self, field: &Field) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => self.scale(field, field.inv(lc).expect("leading coefficient is nonzero")),
        }
    }

    /// Euclidean division `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, field: &Field, divisor: &Self) -> Result<(Self, Self), Error> {
        let dlead = divisor.leading().ok_or(Error::DivisionByZero)?;
        let dinv = field.inv(dlead)?;
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Scalar::ZERO; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = field.mul(rem[k + dd], dinv);
            quot[k] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &dj) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = field.sub(rem[k + j], field.mul(c, dj));
            }
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, field: &Field, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(field, &b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic(field)
    }

    /// Monic least common multiple of two nonzero polynomials.
    pub fn lcm(&self, field: &Field, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let g = self.gcd(field, other);
        let (q, _) = self.div_rem(field, &g).expect("gcd is nonzero");
        q.mul(field, other).monic(field)
    }
}

/// True iff `divisor` divides `g`. `divisor` must be nonzero.
pub fn poly_divides(field: &Field, divisor: &DensePolynomial, g: &DensePolynomial) -> bool {
    match g.div_rem(field, divisor) {
        Ok((_, r)) => r.is_zero(),
        Err(_) => false,
    }
}

/// Minimal monic generating polynomial of a linearly recurrent sequence,
/// computed with Berlekamp-Massey.
///
/// For a sequence of `2d` terms the result has degree at most `d` and is
/// the unique minimal one whenever the true recurrence has order `<= d`.
/// The all-zero sequence yields the constant polynomial `1`.
pub fn minpoly_of_sequence(field: &Field, s: &[Scalar]) -> DensePolynomial {
    // connection polynomial c(x) = 1 + c_1 x + ... + c_L x^L
    let mut c: Vec<Scalar> = vec![Scalar::ONE];
    let mut b: Vec<Scalar> = vec![Scalar::ONE];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut last_disc = Scalar::ONE;

    for i in 0..s.len() {
        let mut disc = s[i];
        for j in 1..=len.min(c.len() - 1) {
            disc = field.mul_add(disc, c[j], s[i - j]);
        }
        if disc.is_zero() {
            shift += 1;
            continue;
        }
        let coef = field.mul(disc, field.inv(last_disc).expect("nonzero discrepancy"));
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, Scalar::ZERO);
        }
        for (j, &bj) in b.iter().enumerate() {
            c[j + shift] = field.sub(c[j + shift], field.mul(coef, bj));
        }
        if 2 * len <= i {
            len = i + 1 - len;
            b = prev;
            last_disc = disc;
            shift = 1;
        } else {
            shift += 1;
        }
    }

    // f(x) = x^L c(1/x)
    c.resize(len + 1, Scalar::ZERO);
    DensePolynomial::from_coeffs(c.into_iter().rev().collect())
}

/// Checks `sum_i f_i s[j + i] = 0` for every window that fits in `s`.
pub fn annihilates(field: &Field, f: &DensePolynomial, s: &[Scalar]) -> bool {
    let Some(deg) = f.degree() else {
        return true;
    };
    (0..s.len().saturating_sub(deg)).all(|j| {
        f.coeffs()
            .iter()
            .enumerate()
            .fold(Scalar::ZERO, |acc, (i, &fi)| field.mul_add(acc, fi, s[j + i]))
            .is_zero()
    })
}
