mod common;

use std::collections::BTreeMap;

use bkn::configurations::{Configuration, Partition};
use bkn::qcoh::{
    class_stats, enumerative_count, multiply, qdim, qlr, verlinde_product, CohomologyClass,
};
use bkn::spectral::SpectralData;
use num_bigint::BigInt;
use proptest::prelude::*;

fn p(parts: &[i64]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

fn sigma(parts: &[i64], k: usize, n: usize) -> CohomologyClass {
    CohomologyClass::schubert(&p(parts), k, n).unwrap()
}

fn verlinde_at_q_one(factors: &[Configuration], sd: &SpectralData) -> (BTreeMap<Vec<i64>, u64>, f64) {
    let v = verlinde_product(factors, sd).unwrap();
    let map = v
        .as_map(sd)
        .into_iter()
        .map(|(c, x)| (c.to_partition().parts().to_vec(), x))
        .collect();
    (map, v.max_residual)
}

#[test]
fn verlinde_single_box_powers_match_quantum_pieri() {
    for (k, n) in [(2, 4), (2, 5), (2, 6), (3, 6)] {
        let sd = SpectralData::build(k, n).unwrap();
        let one = Configuration::first_step(k, n).unwrap();
        for power in 1..=4 {
            let factors = vec![one.clone(); power];
            let (got, res) = verlinde_at_q_one(&factors, &sd);
            assert!(res <= 1e-6);
            assert_eq!(got, common::at_q_one(&common::pieri_power(power, k, n)), "(k,n)=({k},{n}) p={power}");
        }
    }
}

#[test]
fn verlinde_single_box_times_any_class() {
    for (k, n) in [(2, 5), (3, 6)] {
        let sd = SpectralData::build(k, n).unwrap();
        let one = Configuration::first_step(k, n).unwrap();
        for lambda in common::box_partitions(k, (n - k) as i64) {
            let start = Configuration::from_partition(&p(&lambda), k, n).unwrap();
            let (got, _) = verlinde_at_q_one(&[start, one.clone()], &sd);
            assert_eq!(got, common::at_q_one(&common::quantum_pieri(&lambda, 0, k, n)), "λ={lambda:?}");
        }
    }
}

#[test]
fn qlr_degree_zero_is_littlewood_richardson() {
    for (k, n) in [(2, 5), (3, 6)] {
        let sd = SpectralData::build(k, n).unwrap();
        let shapes = common::box_partitions(k, (n - k) as i64);
        for a in &shapes {
            for b in &shapes {
                let table = qlr(&p(a), &p(b), &sd).unwrap();
                for nu in &shapes {
                    let mut nu_full = nu.clone();
                    nu_full.resize(k, 0);
                    let want = common::lr_coefficient(a, b, &nu_full);
                    assert_eq!(table.get(&p(nu), 0), want, "{a:?}·{b:?} → {nu:?}");
                }
            }
        }
    }
}

#[test]
fn qlr_example_tables() {
    let sd = SpectralData::build(2, 4).unwrap();
    // σ_1·σ_1 = σ_2 + σ_11 in G(2,4).
    let t = qlr(&p(&[1]), &p(&[1]), &sd).unwrap();
    assert_eq!(t.entries.len(), 2);
    assert_eq!(t.get(&p(&[2]), 0), 1);
    assert_eq!(t.get(&p(&[1, 1]), 0), 1);
    // σ_1³ = 2σ_21 here, so σ_21² = σ_1⁶/4.
    let t = qlr(&p(&[2, 1]), &p(&[2, 1]), &sd).unwrap();
    let six = common::pieri_power(6, 2, 4);
    assert_eq!(t.entries.len(), six.len());
    for ((nu, d), c) in &six {
        assert_eq!(c % 4, 0);
        assert_eq!(t.get(&p(nu), *d), c / 4);
    }
    // P¹: σ_1² = q.
    let sd = SpectralData::build(1, 2).unwrap();
    let t = qlr(&p(&[1]), &p(&[1]), &sd).unwrap();
    assert_eq!(t.entries.len(), 1);
    assert_eq!(t.get(&p(&[]), 1), 1);
}

#[test]
fn exact_products_match_pieri_iteration_with_degrees() {
    for (k, n) in [(2, 5), (3, 6), (2, 7)] {
        let sd = SpectralData::build(k, n).unwrap();
        for a in 1..=4 {
            for b in 1..=4 {
                let x = common::pieri_power(a, k, n);
                let y = common::pieri_power(b, k, n);
                let to_class = |poly: &common::Poly| {
                    let terms: Vec<_> = poly
                        .iter()
                        .map(|((l, d), c)| ((p(l), *d), BigInt::from(*c)))
                        .collect();
                    CohomologyClass::from_terms(k, n, terms).unwrap()
                };
                let got = multiply(&to_class(&x), &to_class(&y), &sd).unwrap();
                assert_eq!(got, to_class(&common::pieri_power(a + b, k, n)), "(k,n)=({k},{n}) a={a} b={b}");
            }
        }
    }
}

#[test]
fn projective_line_counts() {
    let sd = SpectralData::build(1, 2).unwrap();
    for pp in 1..=6u32 {
        let classes = vec![sigma(&[1], 1, 2); 2 * pp as usize + 1];
        let r = enumerative_count(&classes, pp, &sd).unwrap();
        assert!(r.balanced);
        assert_eq!(r.count, BigInt::from(1));
    }
}

#[test]
fn four_lines_meet_two_lines() {
    let sd = SpectralData::build(2, 4).unwrap();
    let r = enumerative_count(&vec![sigma(&[1], 2, 4); 4], 0, &sd).unwrap();
    assert_eq!(r.count, BigInt::from(2));
}

#[test]
fn counts_match_pieri_oracle() {
    for (k, n) in [(2, 4), (2, 5), (3, 6)] {
        let sd = SpectralData::build(k, n).unwrap();
        let dim = k * (n - k);
        let point = vec![(n - k) as i64; k];
        for d in 0..=2u32 {
            let m = dim + d as usize * n;
            let r = enumerative_count(&vec![sigma(&[1], k, n); m], d, &sd).unwrap();
            let want = common::pieri_power(m, k, n).get(&(point.clone(), d)).copied().unwrap_or(0);
            assert_eq!(r.count, BigInt::from(want), "(k,n)=({k},{n}) d={d}");
        }
    }
}

#[test]
fn unbalanced_count_is_zero() {
    let sd = SpectralData::build(2, 5).unwrap();
    let r = enumerative_count(&vec![sigma(&[1], 2, 5); 5], 0, &sd).unwrap();
    assert!(!r.balanced);
    assert_eq!(r.count, BigInt::from(0));
}

#[test]
fn ring_relation_for_projective_space() {
    // In QH*(ℙ^{n−1}), σ_1^n = q.
    for n in 2..=7 {
        let sd = SpectralData::build(1, n).unwrap();
        let mut x = CohomologyClass::one(1, n);
        for _ in 0..n {
            x = multiply(&x, &sigma(&[1], 1, n), &sd).unwrap();
        }
        assert_eq!(x, CohomologyClass::from_terms(1, n, BTreeMap::from([((p(&[]), 1), BigInt::from(1))])).unwrap());
    }
}

#[test]
fn quantum_dimensions() {
    let sd = SpectralData::build(2, 4).unwrap();
    assert!((qdim(&sigma(&[1], 2, 4), &sd).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert!((qdim(&CohomologyClass::one(2, 4), &sd).unwrap() - 1.0).abs() < 1e-12);
    let stats = class_stats(&sigma(&[1], 2, 4), &sd).unwrap();
    assert!((stats.law.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    // qDim is multiplicative on products of plain classes at q = 1.
    let x = multiply(&sigma(&[1], 2, 5), &sigma(&[1], 2, 5), &sd_for(2, 5)).unwrap();
    let sd5 = sd_for(2, 5);
    assert!((qdim(&x, &sd5).unwrap() - qdim(&sigma(&[1], 2, 5), &sd5).unwrap().powi(2)).abs() < 1e-12);
    let mut q = CohomologyClass::zero(2, 4);
    q.add_term(p(&[]), 1, BigInt::from(1)).unwrap();
    assert!(qdim(&q, &sd).is_err());
}

fn sd_for(k: usize, n: usize) -> SpectralData {
    SpectralData::build(k, n).unwrap()
}

#[test]
fn malformed_classes_are_rejected() {
    assert!(CohomologyClass::schubert(&p(&[3]), 2, 4).is_err());
    let sd = SpectralData::build(2, 4).unwrap();
    assert!(multiply(&sigma(&[1], 2, 4), &sigma(&[1], 2, 5), &sd).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn products_commute(a in 0usize..6, b in 0usize..6) {
        let (k, n) = (2usize, 5usize);
        let sd = SpectralData::build(k, n).unwrap();
        let shapes = common::box_partitions(k, (n - k) as i64);
        let x = sigma(&shapes[a % shapes.len()], k, n);
        let y = sigma(&shapes[(b + 3) % shapes.len()], k, n);
        prop_assert_eq!(multiply(&x, &y, &sd).unwrap(), multiply(&y, &x, &sd).unwrap());
        let t = qlr(&p(&shapes[a % shapes.len()]), &p(&shapes[(b + 3) % shapes.len()]), &sd).unwrap();
        let total = shapes[a % shapes.len()].iter().sum::<i64>() + shapes[(b + 3) % shapes.len()].iter().sum::<i64>();
        for ((nu, deg), _) in &t.entries {
            prop_assert_eq!(nu.size() + *deg as i64 * n as i64, total);
        }
    }
}
