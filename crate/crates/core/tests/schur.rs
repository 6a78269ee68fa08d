mod common;

use bkn::configurations::Partition;
use bkn::schur::{asymptotic_schur_ratio, schur, schur_at, vandermonde, weyl_dimension, weyl_dimension_f64};
use bkn::Complex64;
use nalgebra::DMatrix;
use num_bigint::BigUint;
use proptest::prelude::*;

/// Complete homogeneous symmetric polynomial by brute-force monomial enumeration.
fn h(m: i64, x: &[Complex64]) -> Complex64 {
    if m < 0 {
        return Complex64::new(0.0, 0.0);
    }
    fn rec(m: i64, x: &[Complex64]) -> Complex64 {
        match x.split_first() {
            None => Complex64::new(if m == 0 { 1.0 } else { 0.0 }, 0.0),
            Some((first, rest)) => (0..=m).map(|e| first.powi(e as i32) * rec(m - e, rest)).sum(),
        }
    }
    rec(m, x)
}

/// Jacobi–Trudi: `s_λ = det(h_{λ_i − i + j})`.
fn jacobi_trudi(lambda: &[i64], x: &[Complex64]) -> Complex64 {
    let l = lambda.len();
    if l == 0 {
        return Complex64::new(1.0, 0.0);
    }
    DMatrix::from_fn(l, l, |i, j| h(lambda[i] - i as i64 + j as i64, x)).determinant()
}

fn j_of(lambda: &[i64], k: usize) -> Vec<i64> {
    (0..k).map(|i| lambda.get(i).copied().unwrap_or(0) + (k - 1 - i) as i64).collect()
}

#[test]
fn bialternant_matches_jacobi_trudi() {
    let u = [2.3, 0.4, -1.7];
    let x: Vec<Complex64> = u.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    for lambda in [vec![], vec![1], vec![2, 1], vec![3, 3, 1], vec![5, 2], vec![4, 4, 4]] {
        let got = schur(&j_of(&lambda, 3), &u).unwrap();
        let want = jacobi_trudi(&lambda, &x);
        assert!((got - want).norm() < 1e-10, "λ={lambda:?}: {got} vs {want}");
    }
}

#[test]
fn weyl_dimension_counts_tableaux() {
    // s_λ(1, …, 1) = d_J; Jacobi–Trudi at 1 with h_m(1^k) = C(m+k−1, k−1).
    let ones = vec![Complex64::new(1.0, 0.0); 3];
    for lambda in [vec![2, 1], vec![4, 2, 1], vec![6, 0, 0]] {
        let j = j_of(&lambda, 3);
        assert!((jacobi_trudi(&lambda, &ones).re - weyl_dimension_f64(&j)).abs() < 1e-9);
    }
    assert_eq!(weyl_dimension(&[2, 0]), BigUint::from(2u32));
    assert_eq!(weyl_dimension(&[3, 0]), BigUint::from(3u32));
    assert_eq!(weyl_dimension(&[1, 1]), BigUint::from(0u32));
}

#[test]
fn singular_points_are_rejected() {
    assert!(schur_at(&[2, 0], &[0.5, 0.5]).is_err());
    assert!(schur_at(&[0, 2], &[0.5, 0.1]).is_err());
}

#[test]
fn vandermonde_modulus() {
    let v = vandermonde(&[0.0, std::f64::consts::PI]);
    assert!((v.norm() - 2.0).abs() < 1e-15);
}

#[test]
fn asymptotic_ratio_trivial_cases() {
    let u = [1.0, -1.0];
    let r = asymptotic_schur_ratio(&Partition::empty(), &u, 50).unwrap();
    assert_eq!(r.main, 1.0);
    assert!((r.exact - 1.0).norm() < 1e-14);
    // λ = (1,1) shifts I_0 by 1: K(Ĩ_λ) = 0.
    let r = asymptotic_schur_ratio(&Partition::new(vec![1, 1]).unwrap(), &u, 50).unwrap();
    assert_eq!(r.main, 1.0);
    assert!(asymptotic_schur_ratio(&Partition::single_box(), &[0.0], 50).is_err());
    assert!(asymptotic_schur_ratio(&Partition::single_box(), &[1.0, 0.0], 50).is_err());
}

#[test]
fn asymptotic_ratio_error_shrinks_at_least_cubically() {
    let u = [1.0, 0.5, -1.5];
    let lambda = Partition::new(vec![2]).unwrap();
    let ns = [50.0, 100.0, 200.0, 400.0];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| asymptotic_schur_ratio(&lambda, &u, n as usize).unwrap().error())
        .collect();
    let slope = common::loglog_slope(&ns, &errs);
    assert!((slope + 3.0).abs() < 0.1, "slope {slope}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_covariance(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, l1 in 0i64..6, l2 in 0i64..6) {
        prop_assume!((a - b).abs() > 0.05);
        let (hi, lo) = (l1.max(l2), l1.min(l2));
        let j = [hi + 1, lo];
        let u = [a, b];
        let shifted = [a + c, b + c];
        let lhs = schur(&j, &shifted).unwrap();
        let rhs = schur(&j, &u).unwrap() * Complex64::from_polar(1.0, c * (hi + lo) as f64);
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn bounded_by_dimension(a in -3.0f64..3.0, b in -3.0f64..3.0, hi in 1i64..8, lo in 0i64..8) {
        prop_assume!((a - b).abs() > 0.05 && hi > lo);
        let j = [hi, lo];
        prop_assert!(schur(&j, &[a, b]).unwrap().norm() <= weyl_dimension_f64(&j) + 1e-9);
    }
}
