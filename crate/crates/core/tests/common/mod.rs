//! Independent oracles shared by the integration tests. Nothing here calls
//! into the spectral machinery: everything is brute force or textbook
//! combinatorics.

#![allow(dead_code)]

use std::collections::BTreeMap;

/// `k`-subsets of `{0, …, n−1}` as decreasing vectors, via bitmasks.
pub fn subsets(k: usize, n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize == k {
            let mut v: Vec<i64> = (0..n as i64).filter(|i| mask >> i & 1 == 1).collect();
            v.reverse();
            out.push(v);
        }
    }
    out
}

/// Edge `I → J`: exactly one site `a ∈ I` is replaced by `a + 1 mod n ∉ I`.
pub fn subset_edge(i: &[i64], j: &[i64], n: usize) -> bool {
    let gone: Vec<i64> = i.iter().copied().filter(|x| !j.contains(x)).collect();
    let new: Vec<i64> = j.iter().copied().filter(|x| !i.contains(x)).collect();
    gone.len() == 1 && new.len() == 1 && (gone[0] + 1).rem_euclid(n as i64) == new[0]
}

pub type Poly = BTreeMap<(Vec<i64>, u32), u64>;

/// Padded partition to a trimmed key.
fn key(mut p: Vec<i64>) -> Vec<i64> {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

/// `σ_(1) · σ_λ q^d` in `QH*(G(k,n))` by the quantum Pieri rule.
pub fn quantum_pieri(lambda: &[i64], d: u32, k: usize, n: usize) -> Poly {
    let w = (n - k) as i64;
    let mut p: Vec<i64> = lambda.to_vec();
    p.resize(k, 0);
    let mut out = Poly::new();
    for i in 0..k {
        if p[i] < w && (i == 0 || p[i - 1] > p[i]) {
            let mut q = p.clone();
            q[i] += 1;
            *out.entry((key(q), d)).or_default() += 1;
        }
    }
    if p[0] == w && p[k - 1] > 0 {
        let q: Vec<i64> = p[1..].iter().map(|x| x - 1).collect();
        *out.entry((key(q), d + 1)).or_default() += 1;
    }
    out
}

/// `σ_(1)^p` from the unit.
pub fn pieri_power(p: usize, k: usize, n: usize) -> Poly {
    let mut cur = Poly::from([((vec![], 0), 1)]);
    for _ in 0..p {
        let mut next = Poly::new();
        for ((lambda, d), c) in &cur {
            for (kk, v) in quantum_pieri(lambda, *d, k, n) {
                *next.entry(kk).or_default() += c * v;
            }
        }
        cur = next;
    }
    cur
}

/// Coefficients at `q = 1`.
pub fn at_q_one(p: &Poly) -> BTreeMap<Vec<i64>, u64> {
    let mut out = BTreeMap::new();
    for ((lambda, _), c) in p {
        *out.entry(lambda.clone()).or_default() += c;
    }
    out
}

/// Classical Littlewood–Richardson coefficient `c^ν_{λμ}` by enumerating
/// semistandard fillings of `ν/λ` with content `μ` whose reverse reading word
/// is a lattice word.
pub fn lr_coefficient(lambda: &[i64], mu: &[i64], nu: &[i64]) -> u64 {
    let rows = nu.len();
    let lam: Vec<i64> = (0..rows).map(|i| lambda.get(i).copied().unwrap_or(0)).collect();
    if lambda.len() > rows || lam.iter().zip(nu).any(|(a, b)| a > b) {
        return 0;
    }
    if lam.iter().sum::<i64>() + mu.iter().sum::<i64>() != nu.iter().sum::<i64>() {
        return 0;
    }
    let cells: Vec<(usize, i64)> = (0..rows)
        .flat_map(|r| (lam[r]..nu[r]).map(move |c| (r, c)))
        .collect();
    let mut grid: BTreeMap<(usize, i64), usize> = BTreeMap::new();
    let mut used = vec![0i64; mu.len()];
    fn go(
        idx: usize,
        cells: &[(usize, i64)],
        grid: &mut BTreeMap<(usize, i64), usize>,
        used: &mut Vec<i64>,
        mu: &[i64],
        nu: &[i64],
    ) -> u64 {
        if idx == cells.len() {
            // Reverse reading word: rows top to bottom, each right to left.
            let mut count = vec![0i64; mu.len()];
            for r in 0..nu.len() {
                for (&(rr, _), &v) in grid.iter().rev().filter(|((rr, _), _)| *rr == r) {
                    let _ = rr;
                    count[v] += 1;
                    if v > 0 && count[v] > count[v - 1] {
                        return 0;
                    }
                }
            }
            return 1;
        }
        let (r, c) = cells[idx];
        let mut total = 0;
        for v in 0..mu.len() {
            if used[v] >= mu[v] {
                continue;
            }
            if let Some(&left) = grid.get(&(r, c - 1)) {
                if left > v {
                    continue;
                }
            }
            if r > 0 {
                if let Some(&up) = grid.get(&(r - 1, c)) {
                    if up >= v {
                        continue;
                    }
                }
            }
            grid.insert((r, c), v);
            used[v] += 1;
            total += go(idx + 1, cells, grid, used, mu, nu);
            used[v] -= 1;
            grid.remove(&(r, c));
        }
        total
    }
    go(0, &cells, &mut grid, &mut used, mu, nu)
}

/// Partitions fitting in the `k × w` box.
pub fn box_partitions(k: usize, w: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    fn rec(k: usize, bound: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == k {
            out.push(key(cur.clone()));
            return;
        }
        for v in 0..=bound {
            cur.push(v);
            rec(k, v, cur, out);
            cur.pop();
        }
    }
    rec(k, w, &mut Vec::new(), &mut out);
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
