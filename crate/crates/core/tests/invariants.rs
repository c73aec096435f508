use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use galois_core::asymptotics::{
    convergence_scan, limit_difference_even_odd, limit_value, wild_constants, AsymptoticTarget,
};
use galois_core::prime::is_prime;
use galois_core::qcomb::{binomial, galois_eval_fast, galois_polynomial, galois_values_at};
use galois_core::special::{box_exponent_counts, jacobi_product, lattice_theta};
use galois_core::zeta::{grassmannian_betti, zeta_grassmannian};
use galois_core::{BigReal, Precision, QValue, QuadraticFormFj};

fn nome(num: i64, den: i64) -> BigReal {
    BigReal::from_ratio(&BigInt::from(num), &BigInt::from(den), 256).unwrap()
}

#[test]
fn fast_recurrence_matches_polynomial() {
    for q in [2, 3, 5, 7] {
        let qb = BigInt::from(q);
        for n in 0..=40 {
            let poly = galois_polynomial(n, 2).unwrap().eval(&qb);
            assert_eq!(galois_eval_fast(n, &qb).unwrap(), poly, "N={n} q={q}");
        }
    }
}

#[test]
fn integer_rows_match_polynomial_for_higher_rank() {
    for r in 3..=5 {
        let vals = galois_values_at(24, r, &BigInt::from(3)).unwrap();
        for (n, v) in vals.iter().enumerate() {
            assert_eq!(*v, galois_polynomial(n, r).unwrap().eval(&BigInt::from(3)));
        }
    }
}

#[test]
fn betti_numbers_sum_to_binomial() {
    for n in 1..=12 {
        for k in 0..=n {
            let total: BigUint = grassmannian_betti(k, n).unwrap().iter().sum();
            assert_eq!(BigInt::from(total), binomial(n, k));
        }
    }
}

#[test]
fn zeta_routes_agree() {
    for (k, n, p) in [(1, 3, 2), (2, 4, 3), (2, 5, 5), (3, 6, 2)] {
        let z = zeta_grassmannian(k, n, p).unwrap();
        assert!(z.verify(6).is_ok(), "{k},{n},{p}");
    }
    assert!(zeta_grassmannian(2, 4, 6).is_err());
}

#[test]
fn theta_symmetric_under_j_reflection() {
    let prec = Precision::from_log2(-50);
    for r in 3..=5 {
        for j in 1..r {
            for x in [nome(1, 2), nome(1, 7)] {
                let a = lattice_theta(&QuadraticFormFj::new(r, j).unwrap(), &x, &prec).unwrap();
                let b = lattice_theta(&QuadraticFormFj::new(r, r - j).unwrap(), &x, &prec).unwrap();
                assert!(a.overlaps(&b), "r={r} j={j}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn minimum_multiplicity_is_binomial() {
    for r in 2..=5 {
        for j in 0..r {
            let form = QuadraticFormFj::new(r, j).unwrap();
            let counts = box_exponent_counts(&form, 3).unwrap();
            assert_eq!(BigInt::from(counts[0]), binomial(r, j), "r={r} j={j}");
        }
    }
}

#[test]
fn even_product_increases_with_nome() {
    let prec = Precision::from_log2(-60);
    let grid: Vec<BigReal> = (1..=18).map(|i| nome(i, 20)).collect();
    let vals: Vec<BigReal> = grid
        .iter()
        .map(|x| jacobi_product(3, x, &prec).unwrap())
        .collect();
    for w in vals.windows(2) {
        assert!(w[0].definitely_lt(&w[1]));
    }
}

#[test]
fn difference_identity_on_prime_grid() {
    let prec = Precision::from_log2(-60);
    for p in (2u64..=97).filter(|&p| is_prime(p)) {
        let q = QValue::from_u64(p).unwrap();
        let (odd, even) = wild_constants(&q, &prec).unwrap();
        let diff = limit_difference_even_odd(&q, &prec).unwrap();
        assert!(diff.overlaps(&(&even - &odd)), "q={p}");
    }
}

#[test]
fn limits_decrease_in_q() {
    let prec = Precision::from_log2(-50);
    for r in 2..=4 {
        for j in 0..r {
            let vals: Vec<BigReal> = [2u64, 3, 5, 7, 11]
                .iter()
                .map(|&q| {
                    let t = AsymptoticTarget::new(r, j, QValue::from_u64(q).unwrap()).unwrap();
                    limit_value(&t, &prec).unwrap()
                })
                .collect();
            for w in vals.windows(2) {
                assert!(w[1].definitely_lt(&w[0]), "r={r} j={j}");
            }
        }
    }
}

#[test]
fn rank_two_scans_converge() {
    let prec = Precision::from_log2(-120);
    for q in [2u64, 3, 5] {
        for j in 0..2 {
            let t = AsymptoticTarget::new(2, j, QValue::from_u64(q).unwrap()).unwrap();
            let rep = convergence_scan(&t, 40, 1e-6, &prec).unwrap();
            assert!(rep.converged(), "q={q} j={j}");
            let gaps: Vec<f64> = rep.rows.iter().map(|r| r.gap.to_f64()).collect();
            assert!(
                rep.gap_strictly_decreasing_over_last(10),
                "q={q} j={j} {gaps:?}"
            );
        }
    }
}

#[test]
fn rank_three_scans() {
    // q = 5 is inside tolerance by n = 12; q = 2, 3 still approach from afar
    let prec = Precision::from_log2(-80);
    for q in [2u64, 3, 5] {
        for j in 0..3 {
            let t = AsymptoticTarget::new(3, j, QValue::from_u64(q).unwrap()).unwrap();
            let rep = convergence_scan(&t, 12, 1e-6, &prec).unwrap();
            assert!(rep.gap_strictly_decreasing_over_last(6), "q={q} j={j}");
            assert_eq!(rep.converged(), q == 5, "q={q} j={j}");
        }
    }
}

#[test]
fn scan_without_rows_is_not_converged() {
    let t = AsymptoticTarget::new(2, 0, QValue::from_u64(2).unwrap()).unwrap();
    let rep = convergence_scan(&t, 0, 1e-8, &Precision::from_log2(-60)).unwrap();
    assert!(rep.rows.is_empty());
    assert!(!rep.converged());
    assert_eq!(rep.status(), "not converged");
}

#[test]
fn exponents_are_quarter_integers() {
    for r in 2..=6 {
        for n in 0..=10 {
            for j in 0..r {
                let u = galois_core::asymptotics::exponent_u(r, n, j).unwrap();
                let four = &u * BigRational::from_integer(4.into());
                assert!(four.is_integer());
            }
        }
    }
}
