//! Midpoint-radius ("ball") arithmetic over dyadic rationals.
//!
//! A [`BigReal`] is a midpoint `m · 2^e` with an arbitrary-precision integer
//! mantissa, paired with a radius that is a rigorous upper bound on the
//! absolute distance to the quantity it represents. The binary exponent is an
//! `i64`, so magnitudes such as `29^-2011` are carried directly without
//! leaving the representable range.
//!
//! The `+`, `-` and `*` operators are exact on the midpoint; call
//! [`BigReal::rounded`] to trim the mantissa back to a working precision.
//! Division and roots always round and fold the rounding error into the
//! radius.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Mantissa width used for radii. Radii are always rounded upward to this.
const RAD_BITS: u64 = 30;

/// Rounding direction applied to the magnitude of a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

/// An exact dyadic rational `man · 2^exp`, kept with odd mantissa (or zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Self::zero();
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { man, exp }
        } else {
            Dyadic {
                man: man >> tz,
                exp: exp + tz as i64,
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n.into(), 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: e,
        }
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if raw_exp == 0 {
            (frac as i64, -1074)
        } else {
            ((frac | (1u64 << 52)) as i64, raw_exp - 1075)
        };
        Some(Self::new(BigInt::from(sign * man), exp))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    /// Bit length of the mantissa magnitude.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// `floor(log2 |x|)`; `None` for zero.
    pub fn ilog2(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.bits() as i64 - 1 + self.exp)
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = &other.man << (other.exp - e) as usize;
        (a, b, e)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(other);
        Self::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.man * &other.man, self.exp + other.exp)
    }

    /// Rounds the magnitude to at most `bits` significant bits.
    pub fn round(&self, bits: u64, mode: Round) -> Self {
        let nbits = self.bits();
        if nbits <= bits {
            return self.clone();
        }
        let shift = nbits - bits;
        let (sign, mag) = split(&self.man);
        let mut q = &mag >> shift as usize;
        let bumped = match mode {
            Round::Down => false,
            Round::Up => q.clone() << shift as usize != mag,
            Round::Nearest => mag.bit(shift - 1),
        };
        if bumped {
            q += 1u32;
        }
        Self::new(BigInt::from_biguint(sign, q), self.exp + shift as i64)
    }

    /// Quotient rounded to `bits` bits in the given direction.
    pub fn div(&self, other: &Self, bits: u64, mode: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let (sa, ma) = split(&self.man);
        let (sb, mb) = split(&other.man);
        let shift = (bits as i64 + 2 + mb.bits() as i64 - ma.bits() as i64).max(0);
        let (mut q, rem) = (ma << shift as usize).div_rem(&mb);
        let inexact = !rem.is_zero();
        if inexact && mode == Round::Up {
            q += 1u32;
        }
        let sign = if sa == sb { Sign::Plus } else { Sign::Minus };
        let out = Self::new(BigInt::from_biguint(sign, q), self.exp - other.exp - shift);
        match mode {
            // q already carries bits + 2 significant bits, so a nearest
            // rounding of it stays within one ulp of the exact quotient.
            Round::Nearest | Round::Down => out.round(bits, mode),
            Round::Up => out.round(bits, Round::Up),
        }
    }

    /// Square root of a nonnegative value, rounded in the given direction.
    pub fn sqrt(&self, bits: u64, mode: Round) -> Self {
        assert!(!self.is_negative(), "square root of a negative dyadic");
        if self.is_zero() {
            return Self::zero();
        }
        let (_, m) = split(&self.man);
        let mut shift = (2 * bits as i64 + 4 - m.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let scaled = m << shift as usize;
        let mut r = scaled.sqrt();
        if mode == Round::Up && &r * &r != scaled {
            r += 1u32;
        }
        let out = Self::new(BigInt::from(r), (self.exp - shift) / 2);
        out.round(
            bits,
            if mode == Round::Nearest {
                Round::Nearest
            } else {
                mode
            },
        )
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Nearest `f64`; saturates to zero or infinity outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(53, Round::Nearest);
        let m = r.man.to_f64().unwrap_or(f64::NAN);
        if r.exp > 2000 {
            return m * f64::INFINITY;
        }
        if r.exp < -2200 {
            return m * 0.0;
        }
        // split the scaling so intermediate powers stay finite
        let half = r.exp / 2;
        m * 2f64.powi(half as i32) * 2f64.powi((r.exp - half) as i32)
    }

    /// Approximate `log2 |x|` (negative infinity for zero).
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let top = self.round(53, Round::Nearest);
        let b = top.bits() as i64;
        let frac = top.man.abs().to_f64().unwrap() / 2f64.powi(b as i32);
        frac.log2() + (b + top.exp) as f64
    }
}

fn split(n: &BigInt) -> (Sign, BigUint) {
    (n.sign(), n.magnitude().clone())
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.sub(other);
        d.man.sign().cmp(&Sign::NoSign)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::decimal::format_sci(self, 17))
    }
}

/// Upper bound of a nonnegative quantity with a short mantissa.
fn up(d: Dyadic) -> Dyadic {
    debug_assert!(!d.is_negative());
    d.round(RAD_BITS, Round::Up)
}

/// A real number known to lie within `rad` of `mid`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigReal {
    mid: Dyadic,
    rad: Dyadic,
}

impl BigReal {
    pub fn exact(mid: Dyadic) -> Self {
        BigReal {
            mid,
            rad: Dyadic::zero(),
        }
    }

    pub fn with_radius(mid: Dyadic, rad: Dyadic) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        BigReal { mid, rad: up(rad) }
    }

    pub fn zero() -> Self {
        Self::exact(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::exact(Dyadic::one())
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::exact(Dyadic::from_int(n))
    }

    pub fn from_f64(x: f64) -> Option<Self> {
        Dyadic::from_f64(x).map(Self::exact)
    }

    /// `num / den` rounded to `bits` bits, with the rounding error in the radius.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u64) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Self::from_int(num.clone()).div(&Self::from_int(den.clone()), bits)
    }

    pub fn from_rational(q: &BigRational, bits: u64) -> Result<Self> {
        Self::from_ratio(q.numer(), q.denom(), bits)
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    /// Upper bound on `|x|`.
    pub fn abs_upper(&self) -> Dyadic {
        self.mid.abs().add(&self.rad)
    }

    /// Lower bound on `|x|` (zero if the ball contains zero).
    pub fn abs_lower(&self) -> Dyadic {
        let d = self.mid.abs().sub(&self.rad);
        if d.is_negative() {
            Dyadic::zero()
        } else {
            d
        }
    }

    /// Widens the radius by `e`.
    pub fn add_error(&mut self, e: &Dyadic) {
        self.rad = up(self.rad.add(&e.abs()));
    }

    /// Trims the midpoint to `bits` significant bits.
    pub fn rounded(&self, bits: u64) -> Self {
        if self.mid.bits() <= bits {
            return self.clone();
        }
        let mid = self.mid.round(bits, Round::Nearest);
        let err = self.mid.sub(&mid).abs();
        BigReal {
            rad: up(self.rad.add(&err)),
            mid,
        }
    }

    pub fn abs(&self) -> Self {
        BigReal {
            mid: self.mid.abs(),
            rad: self.rad.clone(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.upper().is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.lower() <= *x && *x <= self.upper()
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    /// True when every point of `self` is strictly below every point of `other`.
    pub fn definitely_lt(&self, other: &Self) -> bool {
        self.upper() < other.lower()
    }

    pub fn div(&self, other: &Self, bits: u64) -> Result<Self> {
        let den_lo = other.abs_lower();
        if den_lo.is_zero() {
            return Err(Error::Domain(
                "division by an interval containing zero".into(),
            ));
        }
        let lo = self.mid.div(&other.mid, bits, Round::Down);
        let hi = self.mid.div(&other.mid, bits, Round::Up);
        let rounding = hi.sub(&lo).abs();
        // |a/b - a'/b'| <= (|a|·rb + |b|·ra) / (|b|·(|b| - rb))
        let propagated = if self.rad.is_zero() && other.rad.is_zero() {
            Dyadic::zero()
        } else {
            let num = up(self.mid.abs())
                .mul(&other.rad)
                .add(&up(other.mid.abs()).mul(&self.rad));
            let den = other
                .mid
                .abs()
                .round(RAD_BITS, Round::Down)
                .mul(&den_lo.round(RAD_BITS, Round::Down));
            up(num).div(&den, RAD_BITS, Round::Up)
        };
        Ok(BigReal {
            mid: lo,
            rad: up(propagated.add(&rounding)),
        })
    }

    pub fn recip(&self, bits: u64) -> Result<Self> {
        Self::one().div(self, bits)
    }

    pub fn sqrt(&self, bits: u64) -> Result<Self> {
        if self.mid.is_negative() {
            return Err(Error::Domain("square root of a negative value".into()));
        }
        let lo = self.mid.sqrt(bits, Round::Down);
        let hi = self.mid.sqrt(bits, Round::Up);
        let rounding = hi.sub(&lo);
        let propagated = if self.rad.is_zero() {
            Dyadic::zero()
        } else {
            let floor = self.lower();
            if !floor.is_positive() {
                return Err(Error::Domain(
                    "square root of an interval reaching zero".into(),
                ));
            }
            // |sqrt(a) - sqrt(a')| <= r / sqrt(a - r)
            let s = floor.sqrt(RAD_BITS, Round::Down);
            self.rad.div(&s, RAD_BITS, Round::Up)
        };
        Ok(BigReal {
            mid: lo,
            rad: up(propagated.add(&rounding)),
        })
    }

    /// Fourth root, as two square roots.
    pub fn root4(&self, bits: u64) -> Result<Self> {
        self.sqrt(bits + 8)?.sqrt(bits)
    }

    /// `self^n` by repeated squaring, rounding every product to `bits`.
    pub fn powi(&self, mut n: u64, bits: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = (&acc * &base).rounded(bits);
            }
            n >>= 1;
            if n > 0 {
                base = (&base * &base).rounded(bits);
            }
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Approximate `log2` of the midpoint magnitude.
    pub fn log2_abs(&self) -> f64 {
        self.mid.log2_abs()
    }
}

impl Add for &BigReal {
    type Output = BigReal;
    fn add(self, rhs: &BigReal) -> BigReal {
        BigReal {
            mid: self.mid.add(&rhs.mid),
            rad: up(self.rad.add(&rhs.rad)),
        }
    }
}

impl Sub for &BigReal {
    type Output = BigReal;
    fn sub(self, rhs: &BigReal) -> BigReal {
        BigReal {
            mid: self.mid.sub(&rhs.mid),
            rad: up(self.rad.add(&rhs.rad)),
        }
    }
}

impl Mul for &BigReal {
    type Output = BigReal;
    fn mul(self, rhs: &BigReal) -> BigReal {
        let mid = self.mid.mul(&rhs.mid);
        let rad = if self.rad.is_zero() && rhs.rad.is_zero() {
            Dyadic::zero()
        } else {
            let a = up(self.mid.abs()).mul(&rhs.rad);
            let b = up(rhs.mid.abs()).mul(&self.rad);
            let c = self.rad.mul(&rhs.rad);
            up(a.add(&b).add(&c))
        };
        BigReal { mid, rad }
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
        }
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ± {}",
            crate::decimal::format_sci(&self.mid, 17),
            crate::decimal::format_err(&self.rad)
        )
    }
}

/// `2^(ceil(l) + 1)`: an upper bound for `2^l` with one guard bit to absorb
/// the `f64` evaluation of `l`.
pub(crate) fn bound_from_log2(l: f64) -> Dyadic {
    if l == f64::NEG_INFINITY {
        return Dyadic::zero();
    }
    Dyadic::pow2(l.ceil() as i64 + 1)
}
