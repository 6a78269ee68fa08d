mod common;

use std::f64::consts::{PI, TAU};

use bkn::heat::{
    determinantal_as_series, determinantal_kernel_11, dyson_fourier_multiplier, heat_kernel_suk,
    heat_kernel_suk_at_radius, heat_kernel_uk, kappa, kappa_unitary, shell, slice_quadrature,
    wrapped_gaussian, HeatParams,
};
use bkn::schur::vandermonde;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const QUAD_POINTS: usize = 400;

#[test]
fn kappa_examples() {
    assert_eq!(kappa(&[1, 0], 0.7, 1.3), 0.0);
    assert!((kappa(&[2, 0], 0.0, 1.0) - 0.75).abs() < 1e-15);
    // The shift part: J = I_0 + 1 has K = 0 and ⟨J⟩ − ⟨I_0⟩ = k.
    assert!((kappa(&[2, 1], 1.0, 5.0) - 1.0).abs() < 1e-15);
    assert!((kappa_unitary(&[2, 0]) - (1.5 + 0.5)).abs() < 1e-15);
}

#[test]
fn multiplier_is_one_at_ground_and_decreasing_in_t() {
    let a = HeatParams::new(0.5, 1.0, 0.3).unwrap();
    let b = HeatParams::new(0.5, 1.0, 0.6).unwrap();
    assert_eq!(dyson_fourier_multiplier(&[2, 1, 0], &a), 1.0);
    for j in [[3i64, 1, 0], [4, 2, 1], [5, 1, 0]] {
        assert!(dyson_fourier_multiplier(&j, &b) < dyson_fourier_multiplier(&j, &a));
    }
}

#[test]
fn shells_have_expected_sizes() {
    // k = 3: (L, j, 0) with L > j > 0.
    assert_eq!(shell(3, 5).len(), 4);
    assert_eq!(shell(2, 4), vec![vec![4, 0]]);
}

#[test]
fn su2_kernel_is_a_probability_density() {
    let u = [0.9, -0.9];
    for t in [0.25, 0.5, 1.0] {
        let z = slice_quadrature(2, 0.0, QUAD_POINTS, |v| heat_kernel_suk(&u, v, 1.0, t, 1e-13).unwrap().value);
        assert!((z - 1.0).abs() <= 1e-6, "t={t}: {z}");
    }
}

#[test]
fn su3_kernel_is_a_probability_density() {
    let u = [2.0, 0.1, -2.1];
    let z = slice_quadrature(3, 0.0, 60, |v| heat_kernel_suk(&u, v, 1.0, 0.5, 1e-11).unwrap().value);
    assert!((z - 1.0).abs() <= 1e-6, "{z}");
}

#[test]
fn su2_chapman_kolmogorov() {
    let (s, t) = (0.2, 0.3);
    let u = [1.2, -1.2];
    for v in [[0.4, -0.4], [2.5, -2.5], [1.0, -1.0]] {
        let lhs = heat_kernel_suk(&u, &v, 1.0, s + t, 1e-13).unwrap().value;
        let rhs = slice_quadrature(2, 0.0, QUAD_POINTS, |w| {
            heat_kernel_suk(&u, w, 1.0, s, 1e-13).unwrap().value
                * heat_kernel_suk(w, &v, 1.0, t, 1e-13).unwrap().value
        });
        assert!((lhs - rhs).abs() <= 1e-6, "v={v:?}: {lhs} vs {rhs}");
    }
}

#[test]
fn su_kernel_vanishes_off_the_congruence_slice() {
    let e = heat_kernel_suk(&[0.5, -0.5], &[0.7, -0.2], 1.0, 0.5, 1e-12).unwrap();
    assert_eq!(e.value, 0.0);
    // Totals differing by 2π are the same slice.
    let a = heat_kernel_suk(&[0.5, -0.5], &[0.3 + TAU, -0.3], 1.0, 0.5, 1e-12).unwrap().value;
    let b = heat_kernel_suk(&[0.5, -0.5], &[0.3, -0.3], 1.0, 0.5, 1e-12).unwrap().value;
    assert!((a - b).abs() < 1e-10);
}

#[test]
fn kernels_are_symmetric() {
    let u = [2.0, 0.4, -1.1];
    let v = [1.0, -0.3, 0.6];
    let p = HeatParams::new(0.7, 1.1, 0.4).unwrap();
    let a = heat_kernel_uk(&u, &v, &p, 1e-12).unwrap().value;
    let b = heat_kernel_uk(&v, &u, &p, 1e-12).unwrap().value;
    assert!((a - b).abs() < 1e-10);
}

#[test]
fn truncation_is_certified() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for k in [2usize, 3] {
        for _ in 0..10 {
            let u: Vec<f64> = (0..k).map(|_| rng.random_range(-PI..PI)).collect();
            let mut v: Vec<f64> = (0..k - 1).map(|_| rng.random_range(-PI..PI)).collect();
            v.push(u.iter().sum::<f64>() - v.iter().sum::<f64>());
            let t = rng.random_range(0.05..1.0);
            let e = heat_kernel_suk(&u, &v, 1.0, t, 1e-9).unwrap();
            assert!(e.tail_bound <= 1e-9);
            let better = heat_kernel_suk_at_radius(&u, &v, 1.0, t, 2 * e.truncation_radius).unwrap();
            assert!((better - e.value).abs() <= e.tail_bound, "k={k} t={t}");
        }
    }
}

#[test]
fn tiny_times_fail_loudly() {
    assert!(heat_kernel_suk(&[0.1, -0.1], &[0.2, -0.2], 1.0, 1e-9, 1e-12).is_err());
    assert!(HeatParams::new(0.0, 0.0, 1.0).is_err());
    assert!(HeatParams::new(1.0, 1.0, 0.0).is_err());
}

#[test]
fn kernels_are_positive_on_grids() {
    let u = [0.3, -0.3];
    for t in [0.05, 0.3, 1.5] {
        for i in 0..64 {
            let x = TAU * (i as f64 + 0.5) / 64.0;
            let e = heat_kernel_suk(&u, &[x, -x], 1.0, t, 1e-12).unwrap();
            assert!(e.value >= -1e-12, "t={t} x={x}: {}", e.value);
            let p = HeatParams::new(0.5, 1.0, t).unwrap();
            let e = heat_kernel_uk(&u, &[x, 0.2], &p, 1e-12).unwrap();
            assert!(e.value >= -1e-12);
        }
    }
}

#[test]
fn unitary_kernel_relaxes_to_haar() {
    let p = HeatParams::new(1.0, 1.0, 50.0).unwrap();
    for (u, v) in [([0.1, 2.0], [1.4, -2.2]), ([3.0, -1.0], [0.0, 0.5])] {
        let e = heat_kernel_uk(&u, &v, &p, 1e-12).unwrap();
        assert!((e.value - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn unitary_kernel_in_one_dimension_is_wrapped_gaussian() {
    let p = HeatParams::new(1.0, 0.0, 0.4).unwrap();
    for (u, v) in [(0.3, 1.7), (-2.0, 2.9)] {
        let series = heat_kernel_uk(&[u], &[v], &p, 1e-14).unwrap().value;
        // K = Σ_ℓ e^{−ℓ²t} e^{iℓ(v−u)}; its Poisson dual is 2π times the wrapped Gaussian.
        let direct: f64 = (-60i64..=60)
            .map(|l| (-(l * l) as f64 * 0.4).exp() * ((l as f64) * (v - u)).cos())
            .sum();
        assert!((series - direct).abs() < 1e-12);
        let wg = wrapped_gaussian(u, v, 0.4, 1, 30);
        assert!(wg > 0.0);
    }
}

#[test]
fn series_matches_determinantal_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in [2usize, 3] {
        let mut checked = 0;
        while checked < 20 {
            let u: Vec<f64> = (0..k).map(|_| rng.random_range(-PI..PI)).collect();
            let v: Vec<f64> = (0..k).map(|_| rng.random_range(-PI..PI)).collect();
            if vandermonde(&u).norm() < 1e-2 || vandermonde(&v).norm() < 1e-2 {
                continue;
            }
            let t = rng.random_range(0.1..1.5);
            let series = heat_kernel_uk(&u, &v, &HeatParams::new(1.0, 1.0, t).unwrap(), 1e-13).unwrap().value;
            let det = determinantal_as_series(&u, &v, t, 30).unwrap();
            assert!((series - det).abs() <= 1e-8, "k={k} t={t}: {series} vs {det}");
            checked += 1;
        }
    }
}

#[test]
fn determinantal_peak_scales_like_t_to_minus_k_over_two() {
    for (k, u) in [(2usize, vec![1.0, -1.0]), (3, vec![2.0, 0.0, -2.0])] {
        let ts = [0.1, 0.05, 0.025];
        let vals: Vec<f64> = ts.iter().map(|&t| determinantal_kernel_11(&u, &u, t, 10).unwrap()).collect();
        let slope = common::loglog_slope(&ts, &vals);
        assert!((slope + k as f64 / 2.0).abs() < 0.05, "k={k}: slope {slope}");
    }
}

#[test]
fn determinantal_rejects_coinciding_start() {
    assert!(determinantal_kernel_11(&[0.5, 0.5], &[0.1, 0.2], 0.5, 10).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kappa_is_nonnegative(a in 0i64..12, b in 0i64..12, c in 0i64..12, alpha in 0.0f64..3.0, gamma in 0.0f64..3.0) {
        let mut j = vec![a + 2, b + 1, c];
        j.sort_unstable_by(|x, y| y.cmp(x));
        j.dedup();
        prop_assume!(j.len() == 3);
        prop_assert!(kappa(&j, alpha, gamma) >= 0.0);
    }
}
