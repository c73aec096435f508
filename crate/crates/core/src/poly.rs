//! Dense univariate polynomials in `q` with big-integer coefficients.

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::BigReal;

/// Polynomial `Σ coeffs[i] · q^i`. The zero polynomial has no coefficients,
/// and every other value has a nonzero leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    coeffs: Vec<BigInt>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    pub fn monomial(c: BigInt, degree: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        QPoly { coeffs }
    }

    pub fn is_palindromic(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }

    /// Horner evaluation at an exact integer.
    pub fn eval(&self, q: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * q + c)
    }

    /// Horner evaluation at a ball, rounding every step to `bits`.
    pub fn eval_ball(&self, x: &BigReal, bits: u64) -> BigReal {
        self.coeffs.iter().rev().fold(BigReal::zero(), |acc, c| {
            (&(&acc * x) + &BigReal::from_int(c.clone())).rounded(bits)
        })
    }

    fn max_coeff_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }
}

/// Schoolbook product through `i128` accumulators when every partial sum is
/// provably in range.
fn mul_small(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let a: Vec<i128> = a.iter().map(|c| c.to_i128().unwrap()).collect();
    let b: Vec<i128> = b.iter().map(|c| c.to_i128().unwrap()).collect();
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(&b) {
            *o += x * y;
        }
    }
    out.into_iter().map(BigInt::from).collect()
}

fn mul_big(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (o, y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += s;
        }
        QPoly::new(coeffs)
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let terms = self.coeffs.len().min(rhs.coeffs.len()) as u64;
        let bound =
            self.max_coeff_bits() + rhs.max_coeff_bits() + 64 - terms.leading_zeros() as u64;
        let coeffs = if bound < 126 {
            mul_small(&self.coeffs, &rhs.coeffs)
        } else {
            mul_big(&self.coeffs, &rhs.coeffs)
        };
        QPoly::new(coeffs)
    }
}

impl fmt::Display for QPoly {
    /// Ascending powers: `4 + 2q + 2q^2`, `1 - q`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("q")?,
                (1, false) => write!(f, "{mag}q")?,
                (_, true) => write!(f, "q^{i}")?,
                (_, false) => write!(f, "{mag}q^{i}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial in `q` whose coefficients are balls.
#[derive(Clone, Debug)]
pub struct BallPoly {
    coeffs: Vec<BigReal>,
}

impl BallPoly {
    pub fn new(mut coeffs: Vec<BigReal>) -> Self {
        while coeffs
            .last()
            .is_some_and(|c| c.is_exact() && c.mid().is_zero())
        {
            coeffs.pop();
        }
        BallPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigReal] {
        &self.coeffs
    }

    /// True when every coefficient ball contains the matching integer
    /// coefficient of `p`.
    pub fn encloses(&self, p: &QPoly) -> bool {
        let n = self.coeffs.len().max(p.coeffs().len());
        (0..n).all(|i| {
            let c = crate::ball::Dyadic::from_int(p.coeff(i));
            self.coeffs.get(i).map_or(c.is_zero(), |b| b.contains(&c))
        })
    }

    /// Exact integer polynomial when every coefficient is an exact integer.
    pub fn to_exact(&self) -> Option<QPoly> {
        self.coeffs
            .iter()
            .map(|c| {
                let m = c.mid();
                (c.is_exact() && m.exponent() >= 0).then(|| m.mantissa() << m.exponent() as usize)
            })
            .collect::<Option<Vec<_>>>()
            .map(QPoly::new)
    }
}
