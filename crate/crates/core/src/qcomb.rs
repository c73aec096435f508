//! Gaussian binomials, q-multinomials, Rogers-Szegő polynomials and
//! generalized Galois numbers, all in exact integer arithmetic.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ball::BigReal;
use crate::error::{Error, Result};
use crate::poly::{BallPoly, QPoly};

/// Row `n` of the Gaussian triangle, `[n choose k]_q` for `k = 0..=n`, built
/// with the q-Pascal rule `[m,i] = [m-1,i-1] + q^i [m-1,i]`.
pub fn qbinomial_row(n: usize) -> Vec<QPoly> {
    let mut row = vec![QPoly::one()];
    for m in 1..=n {
        row.push(QPoly::one());
        for i in (1..m).rev() {
            row[i] = &row[i - 1] + &row[i].shift(i);
        }
    }
    row
}

/// Every row of the Gaussian triangle up to `n`.
pub fn qbinomial_triangle(n: usize) -> Vec<Vec<QPoly>> {
    let mut rows: Vec<Vec<QPoly>> = vec![vec![QPoly::one()]];
    for m in 1..=n {
        let prev = &rows[m - 1];
        let mut row = Vec::with_capacity(m + 1);
        row.push(QPoly::one());
        for i in 1..m {
            row.push(&prev[i - 1] + &prev[i].shift(i));
        }
        row.push(QPoly::one());
        rows.push(row);
    }
    rows
}

/// The Gaussian binomial `[n choose k]_q`; zero outside `0 <= k <= n`.
pub fn qbinomial(n: usize, k: i64) -> QPoly {
    if k < 0 || k as usize > n {
        return QPoly::zero();
    }
    let k = (k as usize).min(n - k as usize);
    // only columns 0..=k of each row are needed
    let mut row = vec![QPoly::one()];
    for m in 1..=n {
        if m <= k {
            row.push(QPoly::one());
        }
        for i in (1..=(m - 1).min(k)).rev() {
            row[i] = &row[i - 1] + &row[i].shift(i);
        }
    }
    row.swap_remove(k)
}

/// `[n choose k]_q` evaluated at an integer, for every `k`, without forming
/// polynomials.
pub fn qbinomial_row_at(n: usize, q: &BigInt) -> Vec<BigInt> {
    let mut powers = Vec::with_capacity(n + 1);
    let mut p = BigInt::one();
    for _ in 0..=n {
        powers.push(p.clone());
        p *= q;
    }
    let mut row = vec![BigInt::one()];
    for m in 1..=n {
        row.push(BigInt::one());
        for i in (1..m).rev() {
            let shifted = &row[i] * &powers[i];
            row[i] = &row[i - 1] + shifted;
        }
    }
    row
}

/// A composition `(k_1, …, k_r)` of `N` into `r >= 1` nonnegative parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<usize>,
    total: usize,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Domain(
                "a composition needs at least one part".into(),
            ));
        }
        let total = parts.iter().sum();
        Ok(Composition { parts, total })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Lazily enumerates the compositions of `n` into `r` parts in colexicographic
/// order, starting at `(n, 0, …, 0)` and ending at `(0, …, 0, n)`.
#[derive(Clone, Debug)]
pub struct Compositions {
    current: Option<Vec<usize>>,
}

pub fn compositions(n: usize, r: usize) -> Compositions {
    let current = (r >= 1).then(|| {
        let mut v = vec![0; r];
        v[0] = n;
        v
    });
    Compositions { current }
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let r = out.len();
        if let Some(i) = out.iter().position(|&p| p > 0).filter(|&i| i + 1 < r) {
            let mut next = out.clone();
            let carry = next[i] - 1;
            next[i] = 0;
            next[i + 1] += 1;
            next[0] = carry;
            self.current = Some(next);
        }
        Some(out)
    }
}

/// The q-multinomial `[n; k_1, …, k_r]_q = Π_i [n - k_1 - … - k_{i-1} choose k_i]_q`.
pub fn qmultinomial(n: usize, parts: &Composition) -> Result<QPoly> {
    if parts.total() != n {
        return Err(Error::CompositionSum {
            parts: parts.parts().to_vec(),
            sum: parts.total(),
            expected: n,
        });
    }
    let mut remaining = n;
    let mut acc = QPoly::one();
    for &k in parts.parts() {
        acc = &acc * &qbinomial(remaining, k as i64);
        remaining -= k;
    }
    Ok(acc)
}

fn qmultinomial_from_triangle(triangle: &[Vec<QPoly>], parts: &[usize]) -> QPoly {
    let mut remaining: usize = parts.iter().sum();
    let mut acc = QPoly::one();
    for &k in parts {
        if k != 0 && k != remaining {
            acc = &acc * &triangle[remaining][k];
        }
        remaining -= k;
    }
    acc
}

/// The generalized Rogers-Szegő polynomial `H_N^{(r)}(z, q)` at numeric `z`,
/// as a polynomial in `q` with ball coefficients rounded to `bits`.
pub fn rogers_szego(n: usize, r: usize, z: &[BigReal], bits: u64) -> Result<BallPoly> {
    if r == 0 {
        return Err(Error::Domain("r must be at least 1".into()));
    }
    if z.len() != r {
        return Err(Error::LengthMismatch {
            expected: r,
            got: z.len(),
        });
    }
    let triangle = qbinomial_triangle(n);
    // powers[i][e] = z_i^e
    let powers: Vec<Vec<BigReal>> = z
        .iter()
        .map(|zi| {
            let mut row = vec![BigReal::one()];
            for e in 1..=n {
                let next = (&row[e - 1] * zi).rounded(bits);
                row.push(next);
            }
            row
        })
        .collect();
    let mut coeffs: Vec<BigReal> = Vec::new();
    for parts in compositions(n, r) {
        let weight = parts
            .iter()
            .enumerate()
            .fold(BigReal::one(), |acc, (i, &k)| {
                (&acc * &powers[i][k]).rounded(bits)
            });
        let poly = qmultinomial_from_triangle(&triangle, &parts);
        if coeffs.len() < poly.coeffs().len() {
            coeffs.resize(poly.coeffs().len(), BigReal::zero());
        }
        for (c, p) in coeffs.iter_mut().zip(poly.coeffs()) {
            let term = (&weight * &BigReal::from_int(p.clone())).rounded(bits);
            *c = (&*c + &term).rounded(bits);
        }
    }
    Ok(BallPoly::new(coeffs))
}

/// Table of generalized Galois polynomials `G_m^{(s)}(q)` for `m <= n_max`,
/// `s <= r_max`, from `G_m^{(s)} = Σ_k [m choose k]_q G_{m-k}^{(s-1)}`.
#[derive(Clone, Debug)]
pub struct GaloisTable {
    levels: Vec<Vec<QPoly>>,
}

impl GaloisTable {
    pub fn build(n_max: usize, r_max: usize) -> Self {
        let triangle = qbinomial_triangle(n_max);
        let mut levels = vec![vec![QPoly::zero(); n_max + 1]];
        levels[0][0] = QPoly::one();
        if r_max >= 1 {
            levels.push(vec![QPoly::one(); n_max + 1]);
        }
        for s in 2..=r_max {
            let prev = &levels[s - 1];
            let level = (0..=n_max)
                .map(|m| {
                    (0..=m).fold(QPoly::zero(), |acc, k| {
                        &acc + &(&triangle[m][k] * &prev[m - k])
                    })
                })
                .collect();
            levels.push(level);
        }
        GaloisTable { levels }
    }

    /// `G_n^{(r)}`; panics outside the built range.
    pub fn get(&self, n: usize, r: usize) -> &QPoly {
        &self.levels[r][n]
    }
}

/// `G_N^{(r)}(q)`: the number of length-`r` flags in `F_q^N`, as a polynomial.
pub fn galois_polynomial(n: usize, r: usize) -> Result<QPoly> {
    if r == 0 {
        return Err(Error::Domain("r must be at least 1".into()));
    }
    Ok(GaloisTable::build(n, r).get(n, r).clone())
}

/// `G_m^{(r)}(q)` at an integer `q` for every `m <= n_max`, exactly.
pub fn galois_values_at(n_max: usize, r: usize, q: &BigInt) -> Result<Vec<BigInt>> {
    if r == 0 {
        return Err(Error::Domain("r must be at least 1".into()));
    }
    let rows: Vec<Vec<BigInt>> = (0..=n_max).map(|m| qbinomial_row_at(m, q)).collect();
    let mut level = vec![BigInt::one(); n_max + 1];
    for _ in 2..=r {
        level = (0..=n_max)
            .map(|m| (0..=m).map(|k| &rows[m][k] * &level[m - k]).sum())
            .collect();
    }
    Ok(level)
}

/// `G_N^{(r)}(q)` at an integer `q`, exactly.
pub fn galois_eval(n: usize, r: usize, q: &BigInt) -> Result<BigInt> {
    Ok(galois_values_at(n, r, q)?.swap_remove(n))
}

/// The classical Galois numbers `G_0(q), …, G_{n_max}(q)` by the Goldman-Rota
/// recurrence `G_{N+1} = 2 G_N + (q^N - 1) G_{N-1}`, unchecked.
pub fn goldman_rota_sequence(n_max: usize, q: &BigInt) -> Vec<BigInt> {
    let mut g = vec![BigInt::one()];
    if n_max == 0 {
        return g;
    }
    g.push(BigInt::from(2));
    let mut qn = q.clone();
    for n in 1..n_max {
        let next = &g[n] * 2 + (&qn - 1) * &g[n - 1];
        g.push(next);
        qn *= q;
    }
    g
}

/// Checks the recurrence against `Σ_k [N choose k]_q` for `N <= 20`,
/// `q ∈ {2, 3, 4, 5}`.
pub fn validate_goldman_rota() -> Result<()> {
    for q in 2u64..=5 {
        let qb = BigInt::from(q);
        let fast = goldman_rota_sequence(20, &qb);
        for (n, value) in fast.iter().enumerate() {
            let direct: BigInt = qbinomial_row(n).iter().map(|p| p.eval(&qb)).sum();
            if &direct != value {
                return Err(Error::RecurrenceMismatch { n, q });
            }
        }
    }
    Ok(())
}

fn goldman_rota_validated() -> Result<()> {
    static CHECK: OnceLock<Result<()>> = OnceLock::new();
    CHECK.get_or_init(validate_goldman_rota).clone()
}

/// The classical Galois number `G_N(q)` through the Goldman-Rota recurrence.
/// The recurrence is validated against direct summation on first use.
pub fn galois_eval_fast(n: usize, q: &BigInt) -> Result<BigInt> {
    if q < &BigInt::from(2) {
        return Err(Error::Domain(format!("q must be at least 2, got {q}")));
    }
    goldman_rota_validated()?;
    Ok(goldman_rota_sequence(n, q).swap_remove(n))
}

/// `G_0(q), …, G_{n_max}(q)` through the validated recurrence.
pub fn galois_sequence_fast(n_max: usize, q: &BigInt) -> Result<Vec<BigInt>> {
    if q < &BigInt::from(2) {
        return Err(Error::Domain(format!("q must be at least 2, got {q}")));
    }
    goldman_rota_validated()?;
    Ok(goldman_rota_sequence(n_max, q))
}

/// Ordinary binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: `[n choose k]_q = Σ_S q^{inv(S)}` over `k`-subsets `S` of
    /// `{0..n}`, with `inv(S) = Σ S - k(k-1)/2`.
    fn subset_oracle(n: usize, k: usize) -> QPoly {
        let mut coeffs = vec![BigInt::zero(); k * (n - k) + 1];
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let s: usize = (0..n).filter(|i| mask >> i & 1 == 1).sum();
            coeffs[s - k * (k.saturating_sub(1)) / 2] += 1;
        }
        QPoly::new(coeffs)
    }

    /// Oracle: all subspaces of `F_p^n` by closure over vector subsets.
    /// Returns the count per dimension.
    fn subspace_counts(p: usize, n: usize) -> Vec<u64> {
        let size = p.pow(n as u32);
        let digits = |v: usize| -> Vec<usize> { (0..n).map(|i| v / p.pow(i as u32) % p).collect() };
        let from =
            |d: &[usize]| -> usize { d.iter().enumerate().map(|(i, x)| x * p.pow(i as u32)).sum() };
        let add = |a: usize, b: usize| {
            let (x, y) = (digits(a), digits(b));
            from(
                &x.iter()
                    .zip(&y)
                    .map(|(s, t)| (s + t) % p)
                    .collect::<Vec<_>>(),
            )
        };
        let scale =
            |c: usize, a: usize| from(&digits(a).iter().map(|s| s * c % p).collect::<Vec<_>>());
        let mut counts = vec![0u64; n + 1];
        for mask in 0u64..(1u64 << size) {
            if mask & 1 == 0 {
                continue;
            }
            let members: Vec<usize> = (0..size).filter(|v| mask >> v & 1 == 1).collect();
            let closed = members.iter().all(|&a| {
                members.iter().all(|&b| mask >> add(a, b) & 1 == 1)
                    && (1..p).all(|c| mask >> scale(c, a) & 1 == 1)
            });
            if closed {
                let dim = (members.len() as f64).log(p as f64).round() as usize;
                counts[dim] += 1;
            }
        }
        counts
    }

    #[test]
    fn qbinomial_examples() {
        assert_eq!(qbinomial(1, 0), QPoly::one());
        assert_eq!(qbinomial(2, 1), QPoly::from_i64s(&[1, 1]));
        assert_eq!(qbinomial(4, 2), QPoly::from_i64s(&[1, 1, 2, 1, 1]));
        assert_eq!(qbinomial(3, -1), QPoly::zero());
        assert_eq!(qbinomial(3, 4), QPoly::zero());
        assert_eq!(qbinomial(0, 0), QPoly::one());
    }

    #[test]
    fn qbinomial_matches_subset_oracle() {
        for n in 0..=12 {
            for k in 0..=n {
                assert_eq!(qbinomial(n, k as i64), subset_oracle(n, k), "[{n},{k}]");
            }
        }
    }

    #[test]
    fn row_triangle_and_single_agree() {
        let tri = qbinomial_triangle(15);
        for n in 0..=15 {
            let row = qbinomial_row(n);
            assert_eq!(row, tri[n]);
            for k in 0..=n {
                assert_eq!(qbinomial(n, k as i64), row[k]);
            }
        }
    }

    #[test]
    fn subspace_enumeration_agrees() {
        // F_2^2, F_3^2, F_2^3, F_2^4
        for (p, n) in [(2, 2), (3, 2), (2, 3), (2, 4)] {
            let counts = subspace_counts(p, n);
            let q = BigInt::from(p);
            for (k, &c) in counts.iter().enumerate() {
                assert_eq!(
                    qbinomial(n, k as i64).eval(&q),
                    BigInt::from(c),
                    "p={p} n={n} k={k}"
                );
            }
        }
        assert_eq!(subspace_counts(2, 4)[2], 35);
        assert_eq!(subspace_counts(2, 3).iter().sum::<u64>(), 16);
    }

    #[test]
    fn compositions_in_colex_order() {
        let all: Vec<_> = compositions(2, 3).collect();
        assert_eq!(
            all,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
        assert_eq!(compositions(0, 4).count(), 1);
        assert_eq!(compositions(5, 1).collect::<Vec<_>>(), vec![vec![5]]);
        assert_eq!(compositions(3, 0).count(), 0);
        for (n, r) in [(6, 3), (4, 5), (7, 2)] {
            let c: Vec<_> = compositions(n, r).collect();
            assert_eq!(
                c.len() as u64,
                u64::try_from(binomial(n + r - 1, r - 1)).unwrap()
            );
            assert!(c.iter().all(|p| p.iter().sum::<usize>() == n));
            let rev = |v: &Vec<usize>| v.iter().rev().cloned().collect::<Vec<_>>();
            assert!(c.windows(2).all(|w| rev(&w[0]) < rev(&w[1])));
        }
    }

    #[test]
    fn qmultinomial_examples() {
        let c = Composition::new(vec![1, 1, 1]).unwrap();
        assert_eq!(
            qmultinomial(3, &c).unwrap(),
            QPoly::from_i64s(&[1, 2, 2, 1])
        );
        let trivial = Composition::new(vec![7]).unwrap();
        assert_eq!(qmultinomial(7, &trivial).unwrap(), QPoly::one());
        let two = Composition::new(vec![1, 1]).unwrap();
        assert_eq!(
            qmultinomial(2, &two).unwrap().eval(&BigInt::one()),
            BigInt::from(2)
        );
        assert!(matches!(
            qmultinomial(4, &c),
            Err(Error::CompositionSum {
                sum: 3,
                expected: 4,
                ..
            })
        ));
        assert!(Composition::new(vec![]).is_err());
    }

    #[test]
    fn rogers_szego_examples() {
        let ones = |r| vec![BigReal::one(); r];
        let h = rogers_szego(1, 2, &ones(2), 64).unwrap();
        assert_eq!(h.to_exact().unwrap(), QPoly::from_i64s(&[2]));
        let h = rogers_szego(2, 2, &ones(2), 64).unwrap();
        assert_eq!(h.to_exact().unwrap(), QPoly::from_i64s(&[3, 1]));
        let z = vec![BigReal::from_int(2), BigReal::one()];
        let h = rogers_szego(2, 2, &z, 64).unwrap();
        assert_eq!(h.to_exact().unwrap(), QPoly::from_i64s(&[7, 2]));
        assert!(matches!(
            rogers_szego(2, 3, &z, 64),
            Err(Error::LengthMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn rogers_szego_at_ones_is_galois() {
        for r in 1..=4 {
            for n in 0..=8 {
                let h = rogers_szego(n, r, &vec![BigReal::one(); r], 64).unwrap();
                assert_eq!(h.to_exact().unwrap(), galois_polynomial(n, r).unwrap());
            }
        }
    }

    #[test]
    fn rogers_szego_with_inexact_weights_encloses_exact_value() {
        let third = BigReal::from_ratio(&1.into(), &3.into(), 80).unwrap();
        let z = vec![third.clone(), BigReal::from_int(3)];
        let h = rogers_szego(3, 2, &z, 80).unwrap();
        // H_3((1/3, 3), q) scaled by 27 is an integer polynomial
        let scaled = BallPoly::new(
            h.coeffs()
                .iter()
                .map(|c| &BigReal::from_int(27) * c)
                .collect(),
        );
        let expected = {
            let mut acc = QPoly::zero();
            for k in 0..=3usize {
                // z1^k z2^(3-k) * 27 = 3^{-k} 3^{3-k} 27 = 3^{6-2k}
                let weight = BigInt::from(3).pow(6 - 2 * k as u32);
                acc = &acc + &(&qbinomial(3, k as i64) * &QPoly::new(vec![weight]));
            }
            acc
        };
        assert!(scaled.encloses(&expected));
    }

    #[test]
    fn galois_examples() {
        assert_eq!(galois_polynomial(0, 3).unwrap(), QPoly::one());
        assert_eq!(galois_polynomial(2, 2).unwrap(), QPoly::from_i64s(&[3, 1]));
        assert_eq!(
            galois_polynomial(3, 2).unwrap(),
            QPoly::from_i64s(&[4, 2, 2])
        );
        assert_eq!(
            galois_polynomial(3, 2).unwrap().eval(&2.into()),
            BigInt::from(16)
        );
        assert_eq!(
            galois_polynomial(5, 3).unwrap().eval(&1.into()),
            BigInt::from(243)
        );
        assert!(galois_polynomial(3, 0).is_err());
    }

    #[test]
    fn galois_counts_flags() {
        // Oracle: chains V_1 ⊆ V_2 in F_2^3 counted through subspace dimensions:
        // Σ_{V_2} (#subspaces of V_2) = Σ_k [3,k]_2 · G_k(2)
        let g =
            |n: usize| -> BigInt { subspace_counts(2, n).iter().map(|&c| BigInt::from(c)).sum() };
        let flags3: BigInt = (0..=3)
            .map(|k| BigInt::from(subspace_counts(2, 3)[k]) * g(k))
            .sum();
        assert_eq!(galois_eval(3, 3, &2.into()).unwrap(), flags3);
    }

    #[test]
    fn galois_fast_examples() {
        let two = BigInt::from(2);
        assert_eq!(galois_eval_fast(1, &two).unwrap(), BigInt::from(2));
        assert_eq!(galois_eval_fast(3, &two).unwrap(), BigInt::from(16));
        assert_eq!(galois_eval_fast(4, &3.into()).unwrap(), BigInt::from(212));
        assert_eq!(galois_eval_fast(0, &two).unwrap(), BigInt::one());
        assert!(galois_eval_fast(3, &1.into()).is_err());
    }

    #[test]
    fn goldman_rota_validation_passes() {
        validate_goldman_rota().unwrap();
    }

    #[test]
    fn exact_evaluation_matches_polynomial() {
        let table = GaloisTable::build(12, 4);
        for r in 1..=4 {
            for q in [2, 3, 7] {
                let qb = BigInt::from(q);
                let vals = galois_values_at(12, r, &qb).unwrap();
                for n in 0..=12 {
                    assert_eq!(table.get(n, r).eval(&qb), vals[n]);
                }
            }
        }
    }
}
