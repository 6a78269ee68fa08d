use bkn::configurations::{Configuration, Partition};
use bkn::harmonic::HMeasure;
use bkn::heat::HeatParams;
use bkn::limits::{
    berry_esseen_setup, convolved_density, corollary_check, fourier_decay_report, ln_bigint,
    local_limit_check, pieri_sequence, predicted_fourier, sequence_stats, t0,
    wasserstein_upper_bound, ClassFormula, ConvolutionMethod, GammaConvention, MeasureSequence,
    TorusLaw,
};
use bkn::qcoh::CohomologyClass;
use bkn::spectral::SpectralData;
use num_bigint::BigInt;
use proptest::prelude::*;

fn grid() -> Vec<f64> {
    (0..60).map(|i| 1e-3 * 500f64.powf(i as f64 / 59.0)).collect()
}

#[test]
fn diffusion_time() {
    assert!((t0(256, 16) - std::f64::consts::TAU.powi(2)).abs() < 1e-12);
}

#[test]
fn gamma_conventions() {
    assert!((GammaConvention::Standard.gamma(2, 1.5) - 0.5).abs() < 1e-15);
    assert!((GammaConvention::Doubled.gamma(2, 1.5) - 1.0).abs() < 1e-15);
}

#[test]
fn pieri_sequence_statistics() {
    let sd = SpectralData::build(2, 10).unwrap();
    let s = sequence_stats(&pieri_sequence(&sd, 100).unwrap(), &sd).unwrap();
    assert!((s.mean - 1.0).abs() < 1e-12);
    assert!(s.var2.abs() < 1e-12);
    assert!((s.k_value - 1.5).abs() < 1e-12);
    assert!(s.m_var.is_none());
    assert!(s.m_effective.is_finite() && s.m_effective > 0.0);
}

#[test]
fn convolution_methods_agree() {
    let sd = SpectralData::build(2, 12).unwrap();
    let seq = pieri_sequence(&sd, 50).unwrap();
    let g = Configuration::ground(2, 12).unwrap();
    let a = convolved_density(&seq, &g, &sd, ConvolutionMethod::Propagate).unwrap();
    let b = convolved_density(&seq, &g, &sd, ConvolutionMethod::Fourier).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()));
    }
}

#[test]
fn local_limit_supports_one_class_and_matches_full_congruence() {
    let n = 12;
    let sd = SpectralData::build(2, n).unwrap();
    let g = Configuration::ground(2, n).unwrap();
    // m = n² satisfies both congruences; an odd m separates them.
    let both = local_limit_check(&pieri_sequence(&sd, n * n).unwrap(), &g, &sd, GammaConvention::Standard, None).unwrap();
    assert_eq!(both.class_formula, ClassFormula::Both);
    let odd = local_limit_check(&pieri_sequence(&sd, n * n + 1).unwrap(), &g, &sd, GammaConvention::Standard, None).unwrap();
    assert_eq!(odd.class_formula, ClassFormula::Full);
    assert_eq!(odd.off_class_mass, 0.0);
    assert!(odd.sup_error < 1e-3);
}

#[test]
fn standard_gamma_beats_doubled() {
    let n = 16;
    let sd = SpectralData::build(2, n).unwrap();
    let g = Configuration::ground(2, n).unwrap();
    let seq = pieri_sequence(&sd, n * n / 8).unwrap();
    let s = local_limit_check(&seq, &g, &sd, GammaConvention::Standard, None).unwrap();
    let d = local_limit_check(&seq, &g, &sd, GammaConvention::Doubled, None).unwrap();
    assert!(s.sup_error < d.sup_error / 5.0, "{} vs {}", s.sup_error, d.sup_error);
}

#[test]
fn local_limit_requires_deterministic_steps() {
    let sd = SpectralData::build(2, 8).unwrap();
    let mut w = vec![0.0; sd.len()];
    w[1] = 1.0;
    w[3] = 1.0;
    let mu = HMeasure::from_unnormalized(w, &sd).unwrap();
    let seq = MeasureSequence::new(vec![(mu, 10)]).unwrap();
    let g = Configuration::ground(2, 8).unwrap();
    // Steps (2,0) and (3,0) have different sizes, so Var_2 > 0.
    assert!(local_limit_check(&seq, &g, &sd, GammaConvention::Standard, None).is_err());
}

#[test]
fn fourier_decay_is_exact_at_ground_and_small_in_window() {
    let n = 16;
    let sd = SpectralData::build(2, n).unwrap();
    let r = fourier_decay_report(&pieri_sequence(&sd, n * n).unwrap(), &sd, 1.0).unwrap();
    assert!(r.entries[0].error < 1e-12);
    assert!(r.entries.iter().any(|e| e.in_window && e.j != vec![1, 0]));
    assert!(r.max_error < 1e-4);
    assert!((predicted_fourier(&[1, 0], n, &r.stats) - 1.0).norm() < 1e-15);
}

#[test]
fn wasserstein_bound_vanishes_only_for_equal_laws() {
    let n = 12;
    let sd = SpectralData::build(2, n).unwrap();
    let g = Configuration::ground(2, n).unwrap();
    let be = berry_esseen_setup(&pieri_sequence(&sd, n * n).unwrap(), &g, &sd, GammaConvention::Standard).unwrap();
    let grid = grid();
    let w = wasserstein_upper_bound(&be.discrete, &be.dyson, &grid, None).unwrap();
    let same = wasserstein_upper_bound(&be.dyson, &be.dyson, &grid, None).unwrap();
    assert!(w.bound.is_finite() && w.bound > 0.0);
    assert!(same.bound <= w.bound);
    assert!(w.per_t.iter().all(|(_, b)| *b >= 0.0));
}

#[test]
fn dyson_coefficients_are_fourier_multipliers() {
    let params = HeatParams::new(0.0, 0.5, 0.7).unwrap();
    let start = vec![0.4, -0.4];
    let law = TorusLaw::Dyson { start: start.clone(), params };
    for j in [[2i64, 0], [3, 1], [4, 0]] {
        let c = law.coefficient(&j).unwrap();
        let want = bkn::schur::schur(&j, &start).unwrap() * bkn::heat::dyson_fourier_multiplier(&j, &params);
        assert!((c - want).norm() < 1e-12);
    }
}

#[test]
fn corollary_on_a_small_grassmannian() {
    let (k, n, m) = (2usize, 10usize, 100usize);
    let sd = SpectralData::build(k, n).unwrap();
    let one = CohomologyClass::schubert(&Partition::single_box(), k, n).unwrap();
    let end = CohomologyClass::schubert(&Partition::new(vec![2, 1]).unwrap(), k, n).unwrap();
    // 3 + 100 + 3 = 16 + 9·10.
    let mut classes = vec![end.clone()];
    classes.extend(std::iter::repeat_n(one, m));
    classes.push(end);
    let r = corollary_check(&classes, 9, &sd, GammaConvention::Standard).unwrap();
    assert!(r.balanced);
    let ratio = r.ratio.unwrap();
    assert!((ratio - 1.0).abs() < 0.05, "ratio {ratio}");
    let wrong = corollary_check(&classes, 8, &sd, GammaConvention::Standard).unwrap();
    assert!(!wrong.balanced && wrong.ratio.is_none());
}

#[test]
fn log_of_big_integers() {
    let x = BigInt::from(10).pow(400);
    assert!((ln_bigint(&x) - 400.0 * 10f64.ln()).abs() < 1e-9);
    assert_eq!(ln_bigint(&BigInt::from(0)), f64::NEG_INFINITY);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn wasserstein_bound_dominates_self_distance(t in 0.01f64..0.3, g in 0.2f64..2.0) {
        let a = TorusLaw::Dyson { start: vec![0.3, -0.3], params: HeatParams::new(0.1, g, t).unwrap() };
        let b = TorusLaw::Atoms { points: vec![vec![0.5, -0.5], vec![1.0, -1.0]], weights: vec![0.5, 0.5] };
        let grid = grid();
        let ab = wasserstein_upper_bound(&a, &b, &grid, None).unwrap();
        let aa = wasserstein_upper_bound(&a, &a, &grid, None).unwrap();
        prop_assert!(ab.bound >= 0.0);
        prop_assert!(ab.bound >= aa.bound);
    }
}
