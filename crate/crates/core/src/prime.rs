//! Primality by trial division, and the `q` values accepted on input.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};

use crate::ball::BigReal;
use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `(p, m)` with `q = p^m` and `p` prime, if `q` is a prime power.
pub fn prime_power_decompose(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

/// A real base `q >= 2`, either an integer or a power `base^exp` kept in
/// factored form so that `29^2011` does not need to be expanded for logs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QValue {
    Int(BigUint),
    Power { base: u64, exp: u32 },
}

impl QValue {
    pub fn from_u64(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::Domain(format!("q must be at least 2, got {q}")));
        }
        Ok(QValue::Int(BigUint::from(q)))
    }

    pub fn power(base: u64, exp: u32) -> Result<Self> {
        if base < 2 || exp == 0 {
            return Err(Error::Domain(format!(
                "q = {base}^{exp} must be at least 2"
            )));
        }
        Ok(QValue::Power { base, exp })
    }

    pub fn to_exact(&self) -> BigInt {
        match self {
            QValue::Int(n) => BigInt::from(n.clone()),
            QValue::Power { base, exp } => num_traits::pow(BigInt::from(*base), *exp as usize),
        }
    }

    /// The value as a `u64`, when it fits.
    pub fn as_u64(&self) -> Option<u64> {
        match self {
            QValue::Int(n) => n.to_u64(),
            QValue::Power { base, exp } => base.checked_pow(*exp),
        }
    }

    pub fn log2(&self) -> f64 {
        match self {
            QValue::Int(n) => {
                let bits = n.bits();
                if bits <= 1000 {
                    n.to_f64().unwrap().log2()
                } else {
                    let top = n >> (bits - 64) as usize;
                    top.to_f64().unwrap().log2() + (bits - 64) as f64
                }
            }
            QValue::Power { base, exp } => (*base as f64).log2() * *exp as f64,
        }
    }

    /// The nome `x = 1/q` as a ball with `bits` bits of relative precision.
    pub fn nome(&self, bits: u64) -> Result<BigReal> {
        BigReal::from_ratio(&BigInt::one(), &self.to_exact(), bits)
    }

    /// `(p, m)` with `q = p^m`, if `q` is a prime power.
    pub fn prime_power(&self) -> Option<(u64, u32)> {
        match self {
            QValue::Int(n) => prime_power_decompose(n.to_u64()?),
            QValue::Power { base, exp } => {
                let (p, m) = prime_power_decompose(*base)?;
                Some((p, m.checked_mul(*exp)?))
            }
        }
    }
}

impl FromStr for QValue {
    type Err = Error;

    /// Accepts `29`, `29^2011` and `10^8`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected an integer or base^exp, got {s:?}"));
        let s = s.trim();
        if let Some((b, e)) = s.split_once('^') {
            let base: u64 = b.trim().parse().map_err(|_| bad())?;
            let exp: u32 = e.trim().parse().map_err(|_| bad())?;
            return Self::power(base, exp);
        }
        let n: BigUint = s.parse().map_err(|_| bad())?;
        if n < BigUint::from(2u32) {
            return Err(Error::Domain(format!("q must be at least 2, got {n}")));
        }
        Ok(QValue::Int(n))
    }
}

impl fmt::Display for QValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QValue::Int(n) => write!(f, "{n}"),
            QValue::Power { base, exp } => write!(f, "{base}^{exp}"),
        }
    }
}
