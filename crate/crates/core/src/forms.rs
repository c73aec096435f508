//! The quadratic forms `F_0, …, F_{r-1}` on `Z^{r-1}`.
//!
//! `F_0(k) = Σ k_l² - Σ k_l k_{l+1}` is half the type `A_{r-1}` Cartan form,
//! and for `j >= 1`, `F_j(k) = (k_j + 1/2)² + Σ_{l≠j} k_l² - Σ k_l k_{l+1}`
//! which equals `F_0(k) + k_j + 1/4`. Values are quarter-integers, so they are
//! handled exactly as integers scaled by four.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// Largest supported `r`. Box enumeration over `Z^{r-1}` is exponential in `r`.
pub const MAX_RANK: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticFormFj {
    r: usize,
    j: usize,
}

impl QuadraticFormFj {
    pub fn new(r: usize, j: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::Domain(format!("r must be at least 2, got {r}")));
        }
        if r > MAX_RANK {
            return Err(Error::RankTooLarge { r, max: MAX_RANK });
        }
        if j >= r {
            return Err(Error::Domain(format!("j must lie in 0..{r}, got {j}")));
        }
        Ok(QuadraticFormFj { r, j })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn j(&self) -> usize {
        self.j
    }

    /// Lattice dimension `r - 1`.
    pub fn dim(&self) -> usize {
        self.r - 1
    }

    /// True for `j >= 1`, where every value is an integer plus `1/4`.
    pub fn has_quarter_offset(&self) -> bool {
        self.j > 0
    }

    fn check_len(&self, k: &[i64]) {
        assert_eq!(k.len(), self.dim(), "vector length must be r - 1");
    }

    /// `F_j(k) - 1/4·[j >= 1]`, an integer: `F_0(k) + k_j`.
    pub fn integer_part(&self, k: &[i64]) -> i64 {
        self.check_len(k);
        let f = base_form(k);
        if self.j == 0 {
            f
        } else {
            f + k[self.j - 1]
        }
    }

    /// `4 F_j(k)`, expanded term by term from the defining formula.
    pub fn value_times4(&self, k: &[i64]) -> i64 {
        self.check_len(k);
        let mut acc = 0i64;
        for (l, &kl) in k.iter().enumerate() {
            if self.j == l + 1 {
                acc += (2 * kl + 1) * (2 * kl + 1);
            } else {
                acc += 4 * kl * kl;
            }
        }
        for w in k.windows(2) {
            acc -= 4 * w[0] * w[1];
        }
        acc
    }

    pub fn value(&self, k: &[i64]) -> BigRational {
        BigRational::new(self.value_times4(k).into(), 4.into())
    }

    /// A lower bound for the smallest eigenvalue `1 - cos(π/r)` of half the
    /// `A_{r-1}` Cartan matrix. The relative slack covers `f64` rounding.
    pub fn lambda_min_lower(&self) -> f64 {
        let lambda = 1.0 - (std::f64::consts::PI / self.r as f64).cos();
        lambda * (1.0 - 1e-9)
    }
}

/// `Σ k_l² - Σ k_l k_{l+1}`.
pub fn base_form(k: &[i64]) -> i64 {
    let sq: i64 = k.iter().map(|x| x * x).sum();
    let cross: i64 = k.windows(2).map(|w| w[0] * w[1]).sum();
    sq - cross
}

/// Cartan matrix of type `A_{n}`: 2 on the diagonal, -1 beside it.
pub fn cartan_matrix(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| match a.abs_diff(b) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

/// `(1/2) kᵀ A k` for the Cartan matrix `A` of matching size.
pub fn half_cartan_form(k: &[i64]) -> BigRational {
    let a = cartan_matrix(k.len());
    let mut total = BigInt::from(0);
    for (i, row) in a.iter().enumerate() {
        for (j, &aij) in row.iter().enumerate() {
            total += BigInt::from(k[i]) * aij * k[j];
        }
    }
    BigRational::new(total, 2.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_two_reduces_to_jacobi_exponents() {
        let f0 = QuadraticFormFj::new(2, 0).unwrap();
        let f1 = QuadraticFormFj::new(2, 1).unwrap();
        for k in -5i64..=5 {
            assert_eq!(f0.value_times4(&[k]), 4 * k * k);
            assert_eq!(f1.value_times4(&[k]), (2 * k + 1) * (2 * k + 1));
        }
    }

    #[test]
    fn integer_part_matches_formula() {
        let form = QuadraticFormFj::new(4, 2).unwrap();
        for k in [[0, 0, 0], [1, -2, 3], [-4, 4, -1], [2, 2, 2]] {
            assert_eq!(4 * form.integer_part(&k) + 1, form.value_times4(&k));
        }
    }

    #[test]
    fn construction_limits() {
        assert!(QuadraticFormFj::new(1, 0).is_err());
        assert!(QuadraticFormFj::new(3, 3).is_err());
        assert!(matches!(
            QuadraticFormFj::new(11, 0),
            Err(Error::RankTooLarge { r: 11, max: 10 })
        ));
        assert!(QuadraticFormFj::new(10, 9).is_ok());
    }

    #[test]
    fn smallest_eigenvalue_bounds_the_form() {
        for r in 2..=6 {
            let form = QuadraticFormFj::new(r, 0).unwrap();
            let lambda = form.lambda_min_lower();
            let d = r - 1;
            let mut k = vec![-3i64; d];
            loop {
                let norm: i64 = k.iter().map(|x| x * x).sum();
                assert!(form.integer_part(&k) as f64 >= lambda * norm as f64 - 1e-9);
                let mut i = 0;
                while i < d && k[i] == 3 {
                    k[i] = -3;
                    i += 1;
                }
                if i == d {
                    break;
                }
                k[i] += 1;
            }
        }
    }
}
