//! Point counts and local zeta functions of Grassmannians over finite fields.
//!
//! `Z(Gr(k,N), t) = Π_i (1 - p^i t)^{-b_i}` where `b_i` are the coefficients of
//! the Gaussian binomial `[N choose k]_q`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::prime::is_prime;
use crate::qcomb::{binomial, qbinomial};

/// Even Betti numbers `b_0, …, b_{k(N-k)}` of the complex Grassmannian.
pub fn grassmannian_betti(k: usize, n: usize) -> Result<Vec<BigUint>> {
    if k > n {
        return Err(Error::Domain(format!("need k <= N, got k = {k}, N = {n}")));
    }
    let poly = qbinomial(n, k as i64);
    let betti: Vec<BigUint> = poly
        .coeffs()
        .iter()
        .map(|c| {
            c.to_biguint()
                .expect("Gaussian binomial coefficients are nonnegative")
        })
        .collect();
    debug_assert_eq!(betti.len(), k * (n - k) + 1);
    Ok(betti)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaFactorization {
    pub k: usize,
    pub n: usize,
    pub p: u64,
    pub betti: Vec<BigUint>,
}

pub fn zeta_grassmannian(k: usize, n: usize, p: u64) -> Result<ZetaFactorization> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let betti = grassmannian_betti(k, n)?;
    let total: BigUint = betti.iter().sum();
    if BigInt::from(total) != binomial(n, k) {
        return Err(Error::Invariant(
            "Betti numbers do not sum to the binomial coefficient".into(),
        ));
    }
    Ok(ZetaFactorization { k, n, p, betti })
}

impl ZetaFactorization {
    /// `|Gr(k,N)(F_{p^e})| = Σ_i b_i p^{i e}`.
    pub fn point_count(&self, e: u32) -> BigInt {
        let a = num_traits::pow(BigInt::from(self.p), e as usize);
        let mut pw = BigInt::one();
        let mut total = BigInt::zero();
        for b in &self.betti {
            total += BigInt::from(b.clone()) * &pw;
            pw *= &a;
        }
        total
    }

    /// `(1-t)(1-2t)(1-4t)^2…`, the denominator of `Z` with `p^i` expanded.
    pub fn denominator_string(&self) -> String {
        let mut out = String::new();
        let mut pw = BigUint::one();
        for b in &self.betti {
            if !b.is_zero() {
                if pw.is_one() {
                    out.push_str("(1-t)");
                } else {
                    out.push_str(&format!("(1-{pw}t)"));
                }
                if !b.is_one() {
                    out.push_str(&format!("^{b}"));
                }
            }
            pw *= self.p;
        }
        out
    }

    /// Power series coefficients `c_0, …, c_order` of `Z(t)`, from the product
    /// of `(1 - a t)^{-b} = Σ_m C(b+m-1, m) a^m t^m`.
    pub fn zeta_coefficients(&self, order: usize) -> Vec<BigInt> {
        let mut series = vec![BigInt::zero(); order + 1];
        series[0] = BigInt::one();
        let mut a = BigInt::one();
        for b in &self.betti {
            let b = b.to_usize().expect("Betti number fits in usize");
            if b > 0 {
                let mut factor = Vec::with_capacity(order + 1);
                let mut am = BigInt::one();
                for m in 0..=order {
                    factor.push(binomial(b + m - 1, m) * &am);
                    am *= &a;
                }
                let mut next = vec![BigInt::zero(); order + 1];
                for (i, s) in series.iter().enumerate() {
                    if s.is_zero() {
                        continue;
                    }
                    for (jj, f) in factor.iter().enumerate().take(order + 1 - i) {
                        next[i + jj] += s * f;
                    }
                }
                series = next;
            }
            a *= self.p;
        }
        series
    }

    /// Recovers `N_1, …, N_order` from the coefficients of `Z(t)` through
    /// `m c_m = Σ_{i=1}^m N_i c_{m-i}`.
    pub fn point_counts_from_zeta(&self, order: usize) -> Vec<BigInt> {
        let c = self.zeta_coefficients(order);
        let mut counts: Vec<BigInt> = Vec::with_capacity(order);
        for m in 1..=order {
            let mut v = &c[m] * m;
            for i in 1..m {
                v -= &counts[i - 1] * &c[m - i];
            }
            counts.push(v);
        }
        counts
    }

    /// Coefficients of `log Z(t) = Σ_{e>=1} N_e t^e / e`, up to `t^order`.
    pub fn log_zeta_coefficients(&self, order: usize) -> Vec<BigRational> {
        (1..=order as u32)
            .map(|e| BigRational::new(self.point_count(e), BigInt::from(e)))
            .collect()
    }

    /// Checks that the Betti-sum point counts, the counts read off the
    /// expanded zeta function, and `[N choose k]` at `q = p^e` all agree.
    pub fn verify(&self, order: usize) -> Result<()> {
        let from_zeta = self.point_counts_from_zeta(order);
        let poly = qbinomial(self.n, self.k as i64);
        for e in 1..=order {
            let direct = self.point_count(e as u32);
            let q = num_traits::pow(BigInt::from(self.p), e);
            if direct != from_zeta[e - 1] || direct != poly.eval(&q) {
                return Err(Error::Invariant(format!(
                    "point count mismatch over F_{}^{e}",
                    self.p
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[u64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn betti_examples() {
        let b = |k, n| -> Vec<u64> {
            grassmannian_betti(k, n)
                .unwrap()
                .iter()
                .map(|x| x.to_u64().unwrap())
                .collect()
        };
        assert_eq!(b(1, 2), vec![1, 1]);
        assert_eq!(b(2, 4), vec![1, 1, 2, 1, 1]);
        assert_eq!(b(0, 7), vec![1]);
        assert!(grassmannian_betti(3, 2).is_err());
    }

    #[test]
    fn betti_sum_and_palindrome() {
        for n in 0..=12 {
            for k in 0..=n {
                let b = grassmannian_betti(k, n).unwrap();
                let total: BigUint = b.iter().sum();
                assert_eq!(BigInt::from(total), binomial(n, k));
                assert!(b.iter().eq(b.iter().rev()));
            }
        }
    }

    #[test]
    fn projective_line() {
        let z = zeta_grassmannian(1, 2, 2).unwrap();
        assert_eq!(z.denominator_string(), "(1-t)(1-2t)");
        assert_eq!(z.point_counts_from_zeta(3), ints(&[3, 5, 9]));
        z.verify(6).unwrap();
    }

    #[test]
    fn point_and_full_space() {
        let z = zeta_grassmannian(0, 3, 5).unwrap();
        assert_eq!(z.denominator_string(), "(1-t)");
        assert_eq!(z.point_counts_from_zeta(4), ints(&[1, 1, 1, 1]));
        // Z(t) = 1/(1-t)
        assert_eq!(z.zeta_coefficients(3), ints(&[1, 1, 1, 1]));
    }

    #[test]
    fn lines_in_four_space() {
        let z = zeta_grassmannian(2, 4, 2).unwrap();
        assert_eq!(z.point_count(1), BigInt::from(35));
        assert_eq!(z.denominator_string(), "(1-t)(1-2t)(1-4t)^2(1-8t)(1-16t)");
        z.verify(5).unwrap();
        let logs = z.log_zeta_coefficients(2);
        assert_eq!(logs[0], BigRational::from_integer(35.into()));
    }

    #[test]
    fn composite_p_rejected() {
        assert_eq!(zeta_grassmannian(1, 2, 4), Err(Error::NotPrime(4)));
        assert_eq!(zeta_grassmannian(1, 2, 1), Err(Error::NotPrime(1)));
    }
}
