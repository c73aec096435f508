//! Limits of `G^{(r)}_{rn+j}(q) · q^{-u_j(r,n)}` as `n → ∞`, convergence
//! scans against exact Galois numbers, and asymptotic counts of linear codes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::ball::{BigReal, Dyadic};
use crate::error::{Error, Result};
use crate::forms::{QuadraticFormFj, MAX_RANK};
use crate::prime::{is_prime, QValue};
use crate::qcomb::{factorial, galois_sequence_fast, galois_values_at};
use crate::special::{certify, euler_phi_inv_pow, jacobi_theta, lattice_theta, Precision};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `u_0 = r(r-1)n²/2` and, for `j >= 1`,
/// `u_j = (rn+j)(rn+j-1)/2 - rn(rn+2j-r)/(2r) + 1/4`.
pub fn exponent_u(r: usize, n: usize, j: usize) -> Result<BigRational> {
    if r < 2 || j >= r {
        return Err(Error::Domain(format!(
            "need r >= 2 and j < r, got r = {r}, j = {j}"
        )));
    }
    let (r, n, j) = (r as i64, n as i64, j as i64);
    if j == 0 {
        return Ok(ratio(r * (r - 1) * n * n, 2));
    }
    let big_n = r * n + j;
    Ok(ratio(big_n * (big_n - 1), 2) - ratio(r * n * (r * n + 2 * j - r), 2 * r) + ratio(1, 4))
}

/// `d_r(N)`, the top degree of `G_N^{(r)}`: with `N = rn + j`,
/// `d_r(N) = N(N-1)/2 - rn(rn+2j-r)/(2r)`.
pub fn demazure_degree(r: usize, big_n: usize) -> Result<BigRational> {
    if r < 2 {
        return Err(Error::Domain(format!("need r >= 2, got {r}")));
    }
    let (n, j) = big_n.div_rem(&r);
    let (r, n, j, big_n) = (r as i64, n as i64, j as i64, big_n as i64);
    Ok(ratio(big_n * (big_n - 1), 2) - ratio(r * n * (r * n + 2 * j - r), 2 * r))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticTarget {
    pub r: usize,
    pub j: usize,
    pub q: QValue,
}

impl AsymptoticTarget {
    pub fn new(r: usize, j: usize, q: QValue) -> Result<Self> {
        if r < 2 {
            return Err(Error::Domain(format!("need r >= 2, got {r}")));
        }
        if r > MAX_RANK {
            return Err(Error::RankTooLarge { r, max: MAX_RANK });
        }
        if j >= r {
            return Err(Error::Domain(format!("need j < r, got j = {j}, r = {r}")));
        }
        Ok(AsymptoticTarget { r, j, q })
    }

    pub fn exponent(&self, n: usize) -> BigRational {
        exponent_u(self.r, n, self.j).expect("validated target")
    }

    /// True when `q` is too large to expand as a machine integer; the ball
    /// arithmetic carries such values through a wide binary exponent.
    pub fn log_domain(&self) -> bool {
        self.q.log2() > 64.0
    }
}

/// `Θ_{F_j}(1/q) / φ(1/q)^{r-1}`. For `r = 2` the numerator is `ϑ3(0,1/q)`
/// (`j = 0`) or `ϑ2(0,1/q)` (`j = 1`).
pub fn limit_value(target: &AsymptoticTarget, prec: &Precision) -> Result<BigReal> {
    certify(prec, "limit value", |p| {
        let x = target.q.nome(p.working_bits + 16)?;
        let phi = euler_phi_inv_pow(&x, (target.r - 1) as u32, &p.tightened(8))?;
        let sub = p.tightened(2 + phi.abs_upper().log2_abs().max(0.0).ceil() as i64);
        let theta = if target.r == 2 {
            jacobi_theta(if target.j == 0 { 3 } else { 2 }, &x, &sub)?
        } else {
            lattice_theta(&QuadraticFormFj::new(target.r, target.j)?, &x, &sub)?
        };
        Ok((&theta * &phi).rounded(p.working_bits + 8))
    })
}

/// `g_{2∞}(q) - g_{2∞+1}(q) = ϑ4(0, q^{-1/4}) / φ(q^{-1})`.
pub fn limit_difference_even_odd(q: &QValue, prec: &Precision) -> Result<BigReal> {
    certify(prec, "limit difference", |p| {
        let bits = p.working_bits + 16;
        let x = q.nome(bits + 16)?;
        let y = x.root4(bits)?;
        let phi = euler_phi_inv_pow(&x, 1, &p.tightened(8))?;
        let sub = p.tightened(2 + phi.abs_upper().log2_abs().max(0.0).ceil() as i64);
        let theta = jacobi_theta(4, &y, &sub)?;
        Ok((&theta * &phi).rounded(p.working_bits + 8))
    })
}

/// `value · q^{-u}` for an exact integer value and a quarter-integer `u >= 0`.
fn scale_by_q_power(
    value: &BigInt,
    q: &BigInt,
    u: &BigRational,
    prec: &Precision,
) -> Result<BigReal> {
    let four_u = (u * BigRational::from_integer(4.into())).to_integer();
    let whole = (&four_u / BigInt::from(4))
        .to_usize()
        .ok_or_else(|| Error::Domain("exponent out of range".into()))?;
    let quarters = (&four_u % BigInt::from(4)).to_u32().unwrap();
    let den = num_traits::pow(q.clone(), whole);
    certify(prec, "scaled Galois number", |p| {
        let mag = value.bits() as i64 - den.bits() as i64;
        let bits = p.working_bits + mag.max(0) as u64 + 8;
        let mut v = BigReal::from_ratio(value, &den, bits)?;
        if quarters > 0 {
            let root = BigReal::from_int(q.clone()).root4(bits)?;
            let scale = root.powi(quarters as u64, bits);
            v = v.div(&scale, bits)?;
        }
        Ok(v)
    })
}

fn exact_q(q: &QValue) -> Result<BigInt> {
    match q.as_u64() {
        Some(v) => Ok(BigInt::from(v)),
        None => Err(Error::Domain(format!(
            "q = {q} is too large for exact Galois number scans"
        ))),
    }
}

/// Exact `G_0, …, G_{n_max}` for the given `r`.
fn galois_sequence(r: usize, n_max: usize, q: &BigInt) -> Result<Vec<BigInt>> {
    if r == 2 {
        galois_sequence_fast(n_max, q)
    } else {
        galois_values_at(n_max, r, q)
    }
}

/// `G_{rn+j}(q) · q^{-u_j(r,n)}`.
pub fn scaled_value(target: &AsymptoticTarget, n: usize, prec: &Precision) -> Result<BigReal> {
    let q = exact_q(&target.q)?;
    let big_n = target.r * n + target.j;
    let g = galois_sequence(target.r, big_n, &q)?.swap_remove(big_n);
    scale_by_q_power(&g, &q, &target.exponent(n), prec)
}

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub n: usize,
    pub big_n: usize,
    pub scaled: BigReal,
    /// `|scaled - limit|` as a ball.
    pub gap: BigReal,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub target: AsymptoticTarget,
    pub tolerance: f64,
    pub limit: BigReal,
    pub rows: Vec<ConvergenceRow>,
    pub converged_at: Option<usize>,
}

impl ConvergenceReport {
    pub fn converged(&self) -> bool {
        self.converged_at.is_some()
    }

    pub fn status(&self) -> &'static str {
        if self.converged() {
            "converged"
        } else {
            "not converged"
        }
    }

    pub fn final_gap(&self) -> Option<&BigReal> {
        self.rows.last().map(|r| &r.gap)
    }

    /// True when each of the last `k` gaps is certainly below its predecessor.
    pub fn gap_strictly_decreasing_over_last(&self, k: usize) -> bool {
        if self.rows.len() < k || k == 0 {
            return false;
        }
        self.rows[self.rows.len() - k..]
            .windows(2)
            .all(|w| w[1].gap.definitely_lt(&w[0].gap))
    }
}

/// Rows `n = 1..=n_max` of the scaled sequence, each compared with the limit.
pub fn convergence_scan(
    target: &AsymptoticTarget,
    n_max: usize,
    tolerance: f64,
    prec: &Precision,
) -> Result<ConvergenceReport> {
    if !(tolerance > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let q = exact_q(&target.q)?;
    let limit = limit_value(target, prec)?;
    let values = galois_sequence(target.r, target.r * n_max + target.j, &q)?;
    let tol = Dyadic::from_f64(tolerance).unwrap();
    let mut rows = Vec::with_capacity(n_max);
    let mut converged_at = None;
    for n in 1..=n_max {
        let big_n = target.r * n + target.j;
        let scaled = scale_by_q_power(&values[big_n], &q, &target.exponent(n), prec)?;
        let gap = (&scaled - &limit).abs();
        if converged_at.is_none() && gap.upper() < tol {
            converged_at = Some(n);
        }
        rows.push(ConvergenceRow {
            n,
            big_n,
            scaled,
            gap,
        });
    }
    Ok(ConvergenceReport {
        target: target.clone(),
        tolerance,
        limit,
        rows,
        converged_at,
    })
}

/// Equivalence notions for linear codes: permutation (`S`), monomial (`M`)
/// and semilinear monomial (`Gamma`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equivalence {
    S,
    M,
    Gamma,
}

impl std::str::FromStr for Equivalence {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(Equivalence::S),
            "M" | "m" => Ok(Equivalence::M),
            "Gamma" | "gamma" | "G" => Ok(Equivalence::Gamma),
            _ => Err(Error::Parse(format!(
                "equivalence must be S, M or Gamma, got {s:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Equivalence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Equivalence::S => "S",
            Equivalence::M => "M",
            Equivalence::Gamma => "Gamma",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeCountQuery {
    pub n: usize,
    pub p: u64,
    pub m: u32,
    pub equivalence: Equivalence,
}

impl CodeCountQuery {
    pub fn new(n: usize, p: u64, m: u32, equivalence: Equivalence) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("code length must be positive".into()));
        }
        if !is_prime(p) {
            return Err(Error::InvalidPrimePower(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidPrimePower(
                "exponent m must be at least 1".into(),
            ));
        }
        Ok(CodeCountQuery {
            n,
            p,
            m,
            equivalence,
        })
    }

    pub fn q(&self) -> QValue {
        QValue::power(self.p, self.m).expect("validated prime power")
    }

    /// `n! · (q-1)^{n-1} · a` with the factors that apply to the equivalence.
    fn divisor(&self, q: &BigInt) -> BigInt {
        let mut d = factorial(self.n);
        if self.equivalence != Equivalence::S {
            d *= num_traits::pow(q - 1, self.n - 1);
        }
        if self.equivalence == Equivalence::Gamma {
            d *= self.m;
        }
        d
    }
}

#[derive(Clone, Debug)]
pub struct CodeCountReport {
    pub asymptotic: BigReal,
    /// `G_n(q)` divided by the equivalence factors, for small cases.
    pub exact: Option<BigRational>,
    /// `asymptotic / exact`.
    pub ratio: Option<BigReal>,
}

/// Largest `n` for which the exact comparator is computed.
pub const EXACT_CODE_LENGTH_MAX: usize = 40;

/// `g · q^{u} / (n! (q-1)^{n-1} a)` with `g` the even or odd limit constant.
/// `prec` bounds the error of `g`; the result carries the scaled bound.
pub fn code_count_asymptotic(query: &CodeCountQuery, prec: &Precision) -> Result<CodeCountReport> {
    let q = query.q();
    let qi = q.to_exact();
    let (k, j) = query.n.div_rem(&2);
    let target = AsymptoticTarget::new(2, j, q.clone())?;
    let g = limit_value(&target, prec)?;
    let u = target.exponent(k);
    let four_u = (&u * BigRational::from_integer(4.into())).to_integer();
    let whole = (&four_u / BigInt::from(4)).to_usize().unwrap();
    let quarters = (&four_u % BigInt::from(4)).to_u32().unwrap();
    let bits = prec.working_bits + 16;
    let num = num_traits::pow(qi.clone(), whole);
    let den = query.divisor(&qi);
    let mut scale = BigReal::from_ratio(&num, &den, bits)?;
    if quarters > 0 {
        let root = BigReal::from_int(qi.clone()).root4(bits)?;
        scale = (&scale * &root.powi(quarters as u64, bits)).rounded(bits);
    }
    let asymptotic = (&g * &scale).rounded(bits);
    let (exact, ratio) = match q.as_u64() {
        Some(qv) if query.n <= EXACT_CODE_LENGTH_MAX => {
            let gn = galois_sequence_fast(query.n, &BigInt::from(qv))?.swap_remove(query.n);
            let exact = BigRational::new(gn.clone(), den.clone());
            let e = BigReal::from_ratio(&gn, &den, bits)?;
            let ratio = asymptotic.div(&e, bits)?;
            (Some(exact), Some(ratio))
        }
        _ => (None, None),
    };
    Ok(CodeCountReport {
        asymptotic,
        exact,
        ratio,
    })
}

/// `(d_1, d_2) = (g_{2∞+1}(q), g_{2∞}(q))`, checked against
/// `0 < d_1 < d_2 <= g_{2∞}(2) < 32` with certified comparisons.
pub fn wild_constants(q: &QValue, prec: &Precision) -> Result<(BigReal, BigReal)> {
    let d1 = limit_value(&AsymptoticTarget::new(2, 1, q.clone())?, prec)?;
    let d2 = limit_value(&AsymptoticTarget::new(2, 0, q.clone())?, prec)?;
    let top = limit_value(&AsymptoticTarget::new(2, 0, QValue::from_u64(2)?)?, prec)?;
    let ok = d1.is_positive()
        && d1.definitely_lt(&d2)
        && !top.definitely_lt(&d2)
        && top.upper() < Dyadic::from_int(32);
    if !ok {
        return Err(Error::Invariant(format!(
            "constant ordering fails at q = {q}: d1 = {d1}, d2 = {d2}, bound = {top}"
        )));
    }
    Ok((d1, d2))
}

#[derive(Clone, Debug)]
pub struct LargeQRow {
    pub q: QValue,
    /// `g_{2∞}(q)`, tending to 1.
    pub even: BigReal,
    /// `g_{2∞+1}(q) · q^{1/4}`, tending to 2.
    pub odd_scaled: BigReal,
}

#[derive(Clone, Debug)]
pub struct LargeQReport {
    pub rows: Vec<LargeQRow>,
    /// `|even - 1|` certainly decreases along the list.
    pub even_monotone: bool,
    /// `|odd_scaled - 2|` certainly decreases along the list.
    pub odd_monotone: bool,
}

pub fn large_q_asymptotics_check(q_list: &[QValue], prec: &Precision) -> Result<LargeQReport> {
    let mut rows = Vec::with_capacity(q_list.len());
    for q in q_list {
        let even = limit_value(&AsymptoticTarget::new(2, 0, q.clone())?, prec)?;
        let odd = limit_value(
            &AsymptoticTarget::new(2, 1, q.clone())?,
            &prec.tightened(q.log2().ceil() as i64),
        )?;
        let bits = prec.working_bits + 16;
        let root = BigReal::from_int(q.to_exact()).root4(bits)?;
        let odd_scaled = (&odd * &root).rounded(bits);
        rows.push(LargeQRow {
            q: q.clone(),
            even,
            odd_scaled,
        });
    }
    let dist = |v: &BigReal, c: i64| (v - &BigReal::from_int(c)).abs();
    let decreasing = |f: &dyn Fn(&LargeQRow) -> BigReal| {
        rows.windows(2).all(|w| f(&w[1]).definitely_lt(&f(&w[0])))
    };
    let even_monotone = decreasing(&|r| dist(&r.even, 1));
    let odd_monotone = decreasing(&|r| dist(&r.odd_scaled, 2));
    Ok(LargeQReport {
        rows,
        even_monotone,
        odd_monotone,
    })
}

/// Rational `u` as `a/b` text, e.g. `25/4`.
pub fn format_rational(u: &BigRational) -> String {
    if u.denom().is_one() {
        u.numer().to_string()
    } else {
        format!("{}/{}", u.numer(), u.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decimal::ball_matches_literal;
    use crate::qcomb::galois_polynomial;
    use num_traits::Zero;

    fn q(s: &str) -> QValue {
        s.parse().unwrap()
    }

    #[test]
    fn exponents() {
        for n in 0..10 {
            assert_eq!(exponent_u(2, n, 0).unwrap(), ratio((n * n) as i64, 1));
            let m = 2 * n as i64 + 1;
            assert_eq!(exponent_u(2, n, 1).unwrap(), ratio(m * m, 4));
        }
        assert!(exponent_u(3, 0, 0).unwrap().is_zero());
        assert!(exponent_u(3, 1, 3).is_err());
    }

    #[test]
    fn degrees() {
        assert_eq!(demazure_degree(2, 3).unwrap(), ratio(2, 1));
        assert_eq!(demazure_degree(2, 8).unwrap(), ratio(16, 1));
        assert!(demazure_degree(4, 0).unwrap().is_zero());
        for r in 2..=4 {
            for n in 0..=12 {
                let d = demazure_degree(r, n).unwrap();
                let deg = galois_polynomial(n, r).unwrap().degree().unwrap();
                assert_eq!(d, ratio(deg as i64, 1));
            }
        }
    }

    #[test]
    fn exponent_degree_relations() {
        for r in 2..=5 {
            for n in 0..=6 {
                assert_eq!(
                    exponent_u(r, n, 0).unwrap(),
                    demazure_degree(r, r * n).unwrap()
                );
                for j in 1..r {
                    assert_eq!(
                        exponent_u(r, n, j).unwrap(),
                        demazure_degree(r, r * n + j).unwrap() + ratio(1, 4)
                    );
                }
            }
        }
    }

    #[test]
    fn limit_examples() {
        let p = Precision::from_log2(-60);
        let even2 = limit_value(&AsymptoticTarget::new(2, 0, q("2")).unwrap(), &p).unwrap();
        assert!(ball_matches_literal(&even2, "7.371968801").unwrap());
        let odd3 = limit_value(&AsymptoticTarget::new(2, 1, q("3")).unwrap(), &p).unwrap();
        assert!(ball_matches_literal(&odd3, "3.018269046").unwrap());
    }

    #[test]
    fn limit_rank_three() {
        let p = Precision::from_log2(-60);
        let v = limit_value(&AsymptoticTarget::new(3, 0, q("2")).unwrap(), &p).unwrap();
        assert!(ball_matches_literal(&v, "62.7531054733841540").unwrap());
        let v = limit_value(&AsymptoticTarget::new(3, 1, q("5")).unwrap(), &p).unwrap();
        assert!(ball_matches_literal(&v, "4.4547007977352755").unwrap());
    }

    #[test]
    fn huge_q_limit() {
        let p = Precision::from_log2(-2500);
        let v = limit_value(&AsymptoticTarget::new(2, 1, q("29^2011")).unwrap(), &p).unwrap();
        assert!(ball_matches_literal(&v, "1.203473556e-735").unwrap());
    }

    #[test]
    fn difference_matches_subtraction() {
        let p = Precision::from_log2(-60);
        for qs in ["2", "3", "5"] {
            let d = limit_difference_even_odd(&q(qs), &p).unwrap();
            let e = limit_value(&AsymptoticTarget::new(2, 0, q(qs)).unwrap(), &p).unwrap();
            let o = limit_value(&AsymptoticTarget::new(2, 1, q(qs)).unwrap(), &p).unwrap();
            assert!(d.overlaps(&(&e - &o)));
        }
        let d = limit_difference_even_odd(&q("13"), &p).unwrap();
        assert!(ball_matches_literal(&d, "0.1029291515").unwrap());
    }

    #[test]
    fn scaled_values_at_small_n() {
        let p = Precision::from_log2(-60);
        let t = AsymptoticTarget::new(2, 0, q("2")).unwrap();
        assert!(scaled_value(&t, 1, &p)
            .unwrap()
            .contains(&Dyadic::from_f64(2.5).unwrap()));
        let t = AsymptoticTarget::new(2, 1, q("2")).unwrap();
        // G_1(2) · 2^{-1/4} = 2^{3/4}
        let v = scaled_value(&t, 0, &p).unwrap();
        assert!((v.to_f64() - 2f64.powf(0.75)).abs() < 1e-15);
    }

    #[test]
    fn scan_reports_in_band() {
        let p = Precision::from_log2(-60);
        let t = AsymptoticTarget::new(2, 0, q("2")).unwrap();
        let empty = convergence_scan(&t, 0, 1e-8, &p).unwrap();
        assert!(empty.rows.is_empty());
        assert_eq!(empty.status(), "not converged");
        let report = convergence_scan(&t, 10, 1e-8, &p).unwrap();
        assert!(report.rows[0]
            .scaled
            .contains(&Dyadic::from_f64(2.5).unwrap()));
        assert!(!report.converged());
        assert!(report.gap_strictly_decreasing_over_last(10));
        assert!(convergence_scan(&t, 3, -1.0, &p).is_err());
        let huge = AsymptoticTarget::new(2, 0, q("29^2011")).unwrap();
        assert!(convergence_scan(&huge, 3, 1e-3, &p).is_err());
    }

    #[test]
    fn code_counts() {
        let p = Precision::from_log2(-60);
        let s = code_count_asymptotic(&CodeCountQuery::new(10, 2, 1, Equivalence::S).unwrap(), &p)
            .unwrap();
        let r = s.ratio.unwrap().to_f64();
        assert!((r - 1.0).abs() < 0.1, "ratio {r}");
        let m = code_count_asymptotic(&CodeCountQuery::new(4, 3, 2, Equivalence::M).unwrap(), &p)
            .unwrap();
        let g = code_count_asymptotic(
            &CodeCountQuery::new(4, 3, 2, Equivalence::Gamma).unwrap(),
            &p,
        )
        .unwrap();
        let halved = m.asymptotic.div(&BigReal::from_int(2), 200).unwrap();
        assert!(halved.overlaps(&g.asymptotic));
        assert!(matches!(
            CodeCountQuery::new(5, 4, 1, Equivalence::S),
            Err(Error::InvalidPrimePower(_))
        ));
    }

    #[test]
    fn wild_constant_examples() {
        let p = Precision::from_log2(-50);
        let (d1, d2) = wild_constants(&q("29"), &p).unwrap();
        assert!(ball_matches_literal(&d1, "0.8947912163").unwrap());
        assert!(ball_matches_literal(&d2, "1.108510891").unwrap());
    }

    #[test]
    fn large_q_approach() {
        let p = Precision::from_log2(-50);
        let list: Vec<QValue> = ["2", "10", "100", "10^4", "10^8"]
            .iter()
            .map(|s| q(s))
            .collect();
        let report = large_q_asymptotics_check(&list, &p).unwrap();
        assert!(report.even_monotone && report.odd_monotone);
        // far from the asymptote at q = 2
        assert!((report.rows[0].odd_scaled.to_f64() - 8.767).abs() < 1e-3);
    }
}
