//! Certified evaluation of Euler's function, Jacobi theta constants and the
//! lattice theta series of the forms `F_j`, all at a real nome `0 <= x < 1`.
//!
//! Every routine keeps two error ledgers: the truncation of the infinite sum
//! or product (bounded analytically, half the budget) and the rounding of
//! the finite part (bounded by ball arithmetic at the working precision).
//! Tail bounds are computed as `log2` values in `f64` and then turned into
//! dyadic upper bounds with a guard bit.

use std::f64::consts::LOG2_E;

use crate::ball::{bound_from_log2, BigReal, Dyadic};
use crate::error::{Error, Result};
use crate::forms::QuadraticFormFj;

/// Accuracy request: an absolute error target and the number of bits kept
/// in every rounded intermediate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Precision {
    pub target_abs_err: Dyadic,
    pub working_bits: u64,
}

const MIN_BITS: u64 = 64;
const GUARD_BITS: i64 = 48;
const MAX_ATTEMPTS: usize = 5;
const MAX_FACTORS: u64 = 10_000_000;
const MAX_BOX_RADIUS: i64 = 400;
const MAX_BOX_POINTS: u64 = 60_000_000;

impl Precision {
    pub fn new(target_abs_err: Dyadic, working_bits: u64) -> Result<Self> {
        if !target_abs_err.is_positive() {
            return Err(Error::Domain("target error must be positive".into()));
        }
        if working_bits < 16 {
            return Err(Error::Domain("need at least 16 working bits".into()));
        }
        Ok(Precision {
            target_abs_err,
            working_bits,
        })
    }

    /// Target `2^l` with the default working precision `max(64, 48 - l)`.
    pub fn from_log2(l: i64) -> Self {
        Precision {
            target_abs_err: Dyadic::pow2(l),
            working_bits: ((GUARD_BITS - l).max(0) as u64).max(MIN_BITS),
        }
    }

    /// Target at most `err` (a positive `f64`), rounded down to a power of two.
    pub fn absolute(err: f64) -> Result<Self> {
        if !(err > 0.0 && err.is_finite()) {
            return Err(Error::Domain(format!("bad error target {err}")));
        }
        Ok(Self::from_log2(err.log2().floor() as i64))
    }

    pub fn target_log2(&self) -> f64 {
        self.target_abs_err.log2_abs()
    }

    /// Target divided by `2^k`, with `k` more working bits.
    pub fn tightened(&self, k: i64) -> Self {
        let k = k.max(0);
        Precision {
            target_abs_err: self.target_abs_err.mul_pow2(-k),
            working_bits: self.working_bits + k as u64,
        }
    }

    pub fn with_bits(&self, bits: u64) -> Self {
        Precision {
            target_abs_err: self.target_abs_err.clone(),
            working_bits: bits,
        }
    }

    /// Same target at four times the working precision.
    pub fn quadrupled(&self) -> Self {
        self.with_bits(self.working_bits * 4)
    }

    /// Bits needed for `steps` roundings of values up to `2^mag_log2`.
    fn bits_for(&self, mag_log2: f64, steps: u64) -> u64 {
        let extra = mag_log2.max(0.0).ceil() as u64 + 64 - steps.max(1).leading_zeros() as u64 + 4;
        self.working_bits + extra
    }

    fn truncation_budget_log2(&self) -> f64 {
        self.target_log2() - 1.0
    }
}

impl Default for Precision {
    /// About `1e-12` absolute.
    fn default() -> Self {
        Self::from_log2(-40)
    }
}

/// Runs `f` and retries with a tighter internal budget and more bits until
/// the returned radius is within `prec.target_abs_err`.
pub fn certify(
    prec: &Precision,
    what: &str,
    mut f: impl FnMut(&Precision) -> Result<BigReal>,
) -> Result<BigReal> {
    let mut inner = prec.clone();
    let mut last = f64::INFINITY;
    for _ in 0..MAX_ATTEMPTS {
        let v = f(&inner)?;
        if v.rad() <= &prec.target_abs_err {
            return Ok(v);
        }
        last = v.rad().log2_abs();
        let over = last - prec.target_log2();
        inner = inner.tightened(over.ceil() as i64 + 8);
    }
    Err(Error::Certification(format!(
        "{what}: error bound 2^{last:.1} stays above the target 2^{:.1}",
        prec.target_log2()
    )))
}

/// Evaluates `f` so that the error is below `10^-(digits+2)` relative to the
/// magnitude of the result. Returns the value and the precision used.
pub fn evaluate_to_digits(
    digits: u32,
    f: impl Fn(&Precision) -> Result<BigReal>,
) -> Result<(BigReal, Precision)> {
    let rel_log2 = -((digits as f64 + 2.0) * std::f64::consts::LOG2_10).ceil() as i64;
    let mut prec = Precision::from_log2(-40);
    for _ in 0..8 {
        let v = f(&prec)?;
        let floor = v.abs_lower();
        if floor.is_zero() {
            if v.mid().is_zero() && v.is_exact() {
                return Ok((v, prec));
            }
            prec = Precision::from_log2(prec.target_log2() as i64 - 64);
            continue;
        }
        let want = floor.ilog2().unwrap() + rel_log2;
        if v.rad() <= &Dyadic::pow2(want) {
            return Ok((v, prec));
        }
        prec = Precision::from_log2(want);
    }
    Err(Error::Certification(format!(
        "no certified value with {digits} significant digits"
    )))
}

fn check_nome(x: &BigReal) -> Result<()> {
    if x.lower().is_negative() {
        return Err(Error::Domain(format!("nome must be >= 0, got {x}")));
    }
    if x.upper() >= Dyadic::one() {
        return Err(Error::Domain(format!("nome must be < 1, got {x}")));
    }
    Ok(())
}

fn is_exact_zero(x: &BigReal) -> bool {
    x.is_exact() && x.mid().is_zero()
}

/// `log2(1 - 2^l)` for `l < 0`.
fn log2_one_minus_pow2(l: f64) -> f64 {
    (-(l / LOG2_E).exp_m1()).log2()
}

/// `log2(1 - x)` for the upper end of a nome ball, computed exactly first.
fn log2_one_minus(x_hi: &Dyadic) -> f64 {
    Dyadic::one().sub(x_hi).log2_abs()
}

/// `φ(x)^{-power} = Π_{m>=1} (1 - x^m)^{-power}`.
pub fn euler_phi_inv_pow(x: &BigReal, power: u32, prec: &Precision) -> Result<BigReal> {
    check_nome(x)?;
    if power == 0 || is_exact_zero(x) {
        return Ok(BigReal::one());
    }
    certify(prec, "Euler product", |p| phi_inv_pow_raw(x, power, p))
}

fn phi_inv_pow_raw(x: &BigReal, power: u32, p: &Precision) -> Result<BigReal> {
    let x_hi = x.upper();
    let lx = x_hi.log2_abs();
    let l1mx = log2_one_minus(&x_hi);
    let pw = power as f64;
    let budget = p.truncation_budget_log2();
    // log2 of the partial product, tracked alongside the choice of M
    let mut la = -pw * log2_one_minus_pow2(lx);
    let mut m = 1u64;
    let tail = loop {
        // log Π_{i>M} (1 - x^i)^{-1} <= x^{M+1} / (1-x)^2
        let lt = (m + 1) as f64 * lx - 2.0 * l1mx;
        let spill = pw * lt.exp2() * LOG2_E;
        if lt + pw.log2() <= -1.0 && (2.0 * pw).log2() + lt + la + spill <= budget {
            break lt;
        }
        m += 1;
        if m > MAX_FACTORS {
            return Err(Error::Certification(format!(
                "Euler product needs more than {MAX_FACTORS} factors"
            )));
        }
        la -= pw * log2_one_minus_pow2(m as f64 * lx);
    };
    let bits = p.bits_for(la, m + power as u64);
    let mut acc = BigReal::one();
    let mut xm = x.rounded(bits);
    let one = BigReal::one();
    for i in 1..=m {
        acc = (&acc * &(&one - &xm)).rounded(bits);
        if i < m {
            xm = (&xm * x).rounded(bits);
        }
    }
    let mut value = acc.powi(power as u64, bits).recip(bits)?;
    // exact value is value·e^s with 0 <= s <= power·τ <= 1/2, and e^s - 1 <= 2s
    let err = bound_from_log2((2.0 * pw).log2() + tail).mul(&value.abs_upper());
    value.add_error(&err);
    Ok(value)
}

/// The theta constants `ϑ2(0,x) = Σ x^{(k+1/2)^2}`, `ϑ3(0,x) = Σ x^{k^2}` and
/// `ϑ4(0,x) = Σ (-1)^k x^{k^2}`, sums over all integers `k`.
pub fn jacobi_theta(kind: u8, x: &BigReal, prec: &Precision) -> Result<BigReal> {
    if !(2..=4).contains(&kind) {
        return Err(Error::Domain(format!(
            "theta kind must be 2, 3 or 4, got {kind}"
        )));
    }
    check_nome(x)?;
    if is_exact_zero(x) {
        return Ok(if kind == 2 {
            BigReal::zero()
        } else {
            BigReal::one()
        });
    }
    certify(prec, "Jacobi theta", |p| jacobi_theta_raw(kind, x, p))
}

fn jacobi_theta_raw(kind: u8, x: &BigReal, p: &Precision) -> Result<BigReal> {
    let x_hi = x.upper();
    let lx = x_hi.log2_abs();
    let budget = p.truncation_budget_log2();
    // terms with |k| > K: 2 x^{(K+1)^2} / (1 - x^{2K+1}); also covers ϑ2
    let tail_log2 = |k: u64| {
        1.0 + ((k + 1) * (k + 1)) as f64 * lx - log2_one_minus_pow2((2 * k + 1) as f64 * lx)
    };
    let mut kmax = 0u64;
    while tail_log2(kmax) > budget {
        kmax += 1;
        if kmax > MAX_FACTORS {
            return Err(Error::Certification("theta series does not settle".into()));
        }
    }
    let mag = (3.0 - log2_one_minus(&x_hi)).max(1.0);
    let bits = p.bits_for(mag, 3 * kmax + 4);
    let x = x.rounded(bits);
    let x2 = (&x * &x).rounded(bits);
    let mut value = if kind == 2 {
        // 2 x^{1/4} Σ_{k>=0} x^{k(k+1)}
        let mut sum = BigReal::one();
        let mut term = BigReal::one();
        let mut step = x2.clone();
        for _ in 1..=kmax {
            term = (&term * &step).rounded(bits);
            step = (&step * &x2).rounded(bits);
            sum = (&sum + &term).rounded(bits);
        }
        let quarter = x.root4(bits)?;
        (&(&quarter * &sum).rounded(bits) * &BigReal::from_int(2)).rounded(bits)
    } else {
        // 1 + 2 Σ_{k>=1} s^k x^{k^2}
        let mut sum = BigReal::zero();
        let mut term = BigReal::one();
        let mut step = x.clone();
        for k in 1..=kmax {
            term = (&term * &step).rounded(bits);
            step = (&step * &x2).rounded(bits);
            sum = if kind == 4 && k % 2 == 1 {
                (&sum - &term).rounded(bits)
            } else {
                (&sum + &term).rounded(bits)
            };
        }
        (&BigReal::one() + &(&sum * &BigReal::from_int(2))).rounded(bits)
    };
    value.add_error(&bound_from_log2(tail_log2(kmax)));
    Ok(value)
}

/// `Θ_{F_j}(x) = Σ_{k ∈ Z^{r-1}} x^{F_j(k)}`.
pub fn lattice_theta(form: &QuadraticFormFj, x: &BigReal, prec: &Precision) -> Result<BigReal> {
    check_nome(x)?;
    if !x.is_positive() {
        return Err(Error::Domain(format!(
            "lattice theta needs 0 < x < 1, got {x}"
        )));
    }
    certify(prec, "lattice theta", |p| lattice_theta_raw(form, x, p))
}

/// `log2` of a bound on `Σ_{k outside [-R,R]^d} x^{F_j(k) - offset}`, or
/// `None` when the shell bound is not yet decreasing at `R`.
fn lattice_tail_log2(d: usize, lambda: f64, c: f64, lx: f64, radius: i64) -> Option<f64> {
    let t = (radius + 1) as f64;
    if t < c / (2.0 * lambda) {
        return None;
    }
    let d = d as f64;
    // shell ‖k‖_∞ = t has at most 2d(2t+1)^{d-1} points, each with
    // exponent >= λt² - ct
    let first =
        (2.0 * d).log2() + (d - 1.0) * (2.0 * t + 1.0).log2() + (lambda * t * t - c * t) * lx;
    let ratio = (d - 1.0) * ((2.0 * t + 3.0) / (2.0 * t + 1.0)).log2()
        + (lambda * (2.0 * t + 1.0) - c) * lx;
    if ratio >= -1e-3 {
        return None;
    }
    Some(first - log2_one_minus_pow2(ratio))
}

fn lattice_theta_raw(form: &QuadraticFormFj, x: &BigReal, p: &Precision) -> Result<BigReal> {
    let d = form.dim();
    let lambda = form.lambda_min_lower();
    let c = if form.has_quarter_offset() { 1.0 } else { 0.0 };
    let lx = x.upper().log2_abs();
    let budget = p.truncation_budget_log2();
    let mut radius = 1i64;
    let tail = loop {
        if let Some(t) = lattice_tail_log2(d, lambda, c, lx, radius) {
            if t <= budget {
                break t;
            }
        }
        radius += 1;
        let points = (2 * radius as u64 + 1).checked_pow(d as u32);
        if radius > MAX_BOX_RADIUS || points.is_none_or(|n| n > MAX_BOX_POINTS) {
            return Err(Error::Certification(format!(
                "lattice theta for r = {} needs a box beyond radius {radius}",
                form.r()
            )));
        }
    };
    let counts = box_exponent_counts(form, radius)?;
    let mag = (counts.iter().map(|&n| n as f64).sum::<f64>()).log2();
    let bits = p.bits_for(mag, counts.len() as u64 + 8);
    let x = x.rounded(bits);
    let mut sum = BigReal::zero();
    for &n in counts.iter().rev() {
        sum = (&(&sum * &x) + &BigReal::from_int(n)).rounded(bits);
    }
    sum.add_error(&bound_from_log2(tail));
    if form.has_quarter_offset() {
        sum = (&sum * &x.root4(bits)?).rounded(bits);
    }
    Ok(sum)
}

/// Multiplicities of each integer exponent `F_j(k) - offset` over the box
/// `[-R, R]^{r-1}`.
pub fn box_exponent_counts(form: &QuadraticFormFj, radius: i64) -> Result<Vec<u64>> {
    let d = form.dim();
    let mut counts: Vec<u64> = Vec::new();
    let mut k = vec![-radius; d];
    loop {
        let m = form.integer_part(&k);
        if m < 0 {
            return Err(Error::Invariant(format!("negative exponent {m} at {k:?}")));
        }
        let m = m as usize;
        if m >= counts.len() {
            counts.resize(m + 1, 0);
        }
        counts[m] += 1;
        let mut i = 0;
        while i < d && k[i] == radius {
            k[i] = -radius;
            i += 1;
        }
        if i == d {
            break;
        }
        k[i] += 1;
    }
    Ok(counts)
}

/// Product side of the triple product identities:
/// kind 3 gives `Π (1+x^m)(1+x^{2m-1})^2 = ϑ3/φ`,
/// kind 2 gives `2 x^{1/4} Π (1+x^m)(1+x^{2m})^2 = ϑ2/φ`.
pub fn jacobi_product(kind: u8, x: &BigReal, prec: &Precision) -> Result<BigReal> {
    if kind != 2 && kind != 3 {
        return Err(Error::Domain(format!(
            "product form exists for kinds 2 and 3, got {kind}"
        )));
    }
    check_nome(x)?;
    if is_exact_zero(x) {
        return Ok(if kind == 2 {
            BigReal::zero()
        } else {
            BigReal::one()
        });
    }
    certify(prec, "triple product", |p| jacobi_product_raw(kind, x, p))
}

fn jacobi_product_raw(kind: u8, x: &BigReal, p: &Precision) -> Result<BigReal> {
    let x_hi = x.upper();
    let lx = x_hi.log2_abs();
    let l1mx = log2_one_minus(&x_hi);
    let budget = p.truncation_budget_log2();
    let ln1p2 = |l: f64| (l / LOG2_E).exp().ln_1p() * LOG2_E;
    let mut la = 0.0;
    let mut m = 0u64;
    let tail = loop {
        // log of the remaining factors is at most 3 x^{M+1} / (1-x)
        let lt = (3f64).log2() + (m + 1) as f64 * lx - l1mx;
        if m > 0 && lt <= -1.0 && 1.0 + lt + la + 2.0 <= budget {
            break lt;
        }
        m += 1;
        if m > MAX_FACTORS {
            return Err(Error::Certification(
                "triple product does not settle".into(),
            ));
        }
        let odd_exp = if kind == 3 { 2 * m - 1 } else { 2 * m };
        la += ln1p2(m as f64 * lx) + 2.0 * ln1p2(odd_exp as f64 * lx);
    };
    let bits = p.bits_for(la + 2.0, 3 * m + 8);
    let x = x.rounded(bits);
    let x2 = (&x * &x).rounded(bits);
    let one = BigReal::one();
    let mut acc = BigReal::one();
    let mut xm = x.clone();
    let mut xo = if kind == 3 { x.clone() } else { x2.clone() };
    for _ in 1..=m {
        let f = &(&one + &xm) * &(&one + &xo).powi(2, bits);
        acc = (&acc * &f).rounded(bits);
        xm = (&xm * &x).rounded(bits);
        xo = (&xo * &x2).rounded(bits);
    }
    if kind == 2 {
        acc = (&(&acc * &x.root4(bits)?) * &BigReal::from_int(2)).rounded(bits);
    }
    let err = bound_from_log2(1.0 + tail).mul(&acc.abs_upper());
    acc.add_error(&err);
    Ok(acc)
}

/// One side-by-side comparison of an identity.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub lhs: BigReal,
    pub rhs: BigReal,
}

impl IdentityCheck {
    pub fn discrepancy(&self) -> Dyadic {
        self.lhs.mid().sub(self.rhs.mid()).abs()
    }

    pub fn allowance(&self) -> Dyadic {
        self.lhs.rad().add(self.rhs.rad())
    }

    pub fn holds(&self) -> bool {
        self.discrepancy() <= self.allowance()
    }
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub x: BigReal,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(IdentityCheck::holds)
    }
}

/// Evaluates both sides of
/// `ϑ4(0, x^{1/4}) = ϑ3(0, x) - ϑ2(0, x)` (difference),
/// `ϑ3(0, x)/φ(x) = Π (1+x^m)(1+x^{2m-1})^2` (even product) and
/// `ϑ2(0, x)/φ(x) = 2 x^{1/4} Π (1+x^m)(1+x^{2m})^2` (odd product).
pub fn theta_identity_check(x: &BigReal, prec: &Precision) -> Result<IdentityReport> {
    check_nome(x)?;
    if !x.is_positive() {
        return Err(Error::Domain(format!(
            "identity check needs 0 < x < 1, got {x}"
        )));
    }
    let sub = prec.tightened(2);
    let bits = sub.working_bits;
    let t2 = jacobi_theta(2, x, &sub)?;
    let t3 = jacobi_theta(3, x, &sub)?;
    let phi_inv = euler_phi_inv_pow(x, 1, &sub)?;
    let y = x.root4(bits + 16)?;
    let difference = IdentityCheck {
        name: "theta4 difference",
        lhs: jacobi_theta(4, &y, &sub)?,
        rhs: (&t3 - &t2).rounded(bits),
    };
    let even = IdentityCheck {
        name: "theta3 product",
        lhs: (&t3 * &phi_inv).rounded(bits),
        rhs: jacobi_product(3, x, &sub)?,
    };
    let odd = IdentityCheck {
        name: "theta2 product",
        lhs: (&t2 * &phi_inv).rounded(bits),
        rhs: jacobi_product(2, x, &sub)?,
    };
    Ok(IdentityReport {
        x: x.clone(),
        checks: vec![difference, even, odd],
    })
}
