//! Vertices of `B_{k,n}`, the partition bijection and the circle embedding.
//!
//! Parts are stored strictly decreasing, so `λ_I = I − I_0` is a partition
//! without reordering.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::f64::consts::TAU;
use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// `C(n, k)` without overflow for the sizes used here.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `‖Ĩ_0‖² = k(k²−1)/12`.
pub fn ground_centered_norm_sq(k: usize) -> Rational {
    let k = k as i64;
    Rational::new(k * (k * k - 1), 12)
}

/// `K(x) = ‖x‖² − ‖Ĩ_0‖²`.
pub fn k_functional(x: &[f64]) -> f64 {
    let g = ground_centered_norm_sq(x.len());
    x.iter().map(|v| v * v).sum::<f64>() - *g.numer() as f64 / *g.denom() as f64
}

/// Exact `K(x)` on rational vectors.
pub fn k_functional_exact(x: &[Rational]) -> Rational {
    x.iter().fold(Rational::from_integer(0), |acc, v| acc + v * v)
        - ground_centered_norm_sq(x.len())
}

/// `K(x̃)` via the identity `K(x̃) = K(x) − ⟨x⟩²/k`.
pub fn k_functional_centered(x: &[f64]) -> f64 {
    let s: f64 = x.iter().sum();
    k_functional(x) - s * s / x.len() as f64
}

/// `x̃ = x − (⟨x⟩/k)·1` for an integer tuple, exactly.
pub fn centered(parts: &[i64]) -> Vec<Rational> {
    let k = parts.len() as i64;
    let s: i64 = parts.iter().sum();
    parts
        .iter()
        .map(|&p| Rational::new(k * p - s, k))
        .collect()
}

/// `K(J̃)` for any integer tuple `J` (not necessarily in `[0, n)`).
pub fn k_tilde(parts: &[i64]) -> Rational {
    k_functional_exact(&centered(parts))
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Checks that an integer tuple is strictly decreasing.
pub fn is_strictly_decreasing(parts: &[i64]) -> bool {
    parts.windows(2).all(|w| w[0] > w[1])
}

/// `I_0 = (k−1, …, 0)` as a plain tuple.
pub fn ground_parts(k: usize) -> Vec<i64> {
    (0..k as i64).rev().collect()
}

/// A vertex of `B_{k,n}`: `k` distinct sites of `Z/nZ`, stored decreasing.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    parts: Vec<i64>,
    n: usize,
}

impl Configuration {
    pub fn new(parts: Vec<i64>, n: usize) -> Result<Self> {
        let k = parts.len();
        let ok = k >= 1
            && k <= n
            && is_strictly_decreasing(&parts)
            && parts[k - 1] >= 0
            && parts[0] < n as i64;
        if !ok {
            return Err(Error::InvalidConfiguration { parts, k, n });
        }
        Ok(Self { parts, n })
    }

    /// Builds from an arbitrary set of sites, sorting them.
    pub fn from_sites(mut sites: Vec<i64>, n: usize) -> Result<Self> {
        sites.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(sites, n)
    }

    /// `I_0 = (k−1, …, 0)`.
    pub fn ground(k: usize, n: usize) -> Result<Self> {
        check_kn(k, n)?;
        Self::new(ground_parts(k), n)
    }

    /// `I_1 = (k, k−2, …, 0)`, the single-box configuration. Needs `k < n`.
    pub fn first_step(k: usize, n: usize) -> Result<Self> {
        check_kn(k, n)?;
        if k == n {
            return Err(Error::InvalidParameters(format!(
                "I_1 does not exist for k = n = {n}"
            )));
        }
        let mut parts = ground_parts(k);
        parts[0] += 1;
        Self::new(parts, n)
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    /// `⟨I⟩ = Σ I_j`.
    pub fn size(&self) -> i64 {
        self.parts.iter().sum()
    }

    pub fn is_ground(&self) -> bool {
        self.parts == ground_parts(self.k())
    }

    /// `λ_I = I − I_0`.
    pub fn to_partition(&self) -> Partition {
        let k = self.k() as i64;
        let raw = self
            .parts
            .iter()
            .enumerate()
            .map(|(i, p)| p - (k - 1 - i as i64))
            .collect();
        Partition::new(raw).expect("I − I_0 is always a partition")
    }

    pub fn from_partition(lambda: &Partition, k: usize, n: usize) -> Result<Self> {
        check_kn(k, n)?;
        if !lambda.fits_box(k, n) {
            return Err(Error::PartitionOutOfBox {
                parts: lambda.parts().to_vec(),
                k,
                width: n - k,
            });
        }
        let parts = lambda
            .padded(k)
            .iter()
            .enumerate()
            .map(|(i, l)| l + (k - 1 - i) as i64)
            .collect();
        Self::new(parts, n)
    }

    /// `Ĩ = I − (⟨I⟩/k)·1`, exact.
    pub fn centered(&self) -> Vec<Rational> {
        centered(&self.parts)
    }

    /// `K(Ĩ)`, exact.
    pub fn k_tilde(&self) -> Rational {
        k_tilde(&self.parts)
    }

    /// `Î = I − I_k·1`.
    pub fn hat(&self) -> Vec<i64> {
        let last = self.parts[self.k() - 1];
        self.parts.iter().map(|p| p - last).collect()
    }

    /// `I^c = (n−1−I_{k+1−j})_j`.
    pub fn dual(&self) -> Configuration {
        let n = self.n as i64;
        let parts = self.parts.iter().rev().map(|p| n - 1 - p).collect();
        Configuration { parts, n: self.n }
    }

    /// `ξ_n(I)`: angles `2π(I_j − (k−1)/2)/n`, reduced mod 2π, sorted decreasing.
    pub fn embed(&self) -> AnglePoint {
        AnglePoint::new(self.raw_angles())
    }

    /// Unreduced angles `2π(I_j − (k−1)/2)/n`, in the order of `parts`.
    pub fn raw_angles(&self) -> Vec<f64> {
        let half = (self.k() as f64 - 1.0) / 2.0;
        self.parts
            .iter()
            .map(|&p| TAU * (p as f64 - half) / self.n as f64)
            .collect()
    }

    /// Out-neighbours by the subset rule: one particle moves one site forward.
    pub fn pieri_neighbors(&self) -> Vec<Configuration> {
        let n = self.n as i64;
        let mut out = Vec::new();
        for &a in &self.parts {
            let b = (a + 1) % n;
            if self.parts.contains(&b) {
                continue;
            }
            let sites = self
                .parts
                .iter()
                .map(|&p| if p == a { b } else { p })
                .collect();
            out.push(Configuration::from_sites(sites, self.n).expect("valid move"));
        }
        out.sort();
        debug_assert_eq!(out, {
            let mut viaparts: Vec<_> = pieri_neighbors_partition(&self.to_partition(), self.k(), self.n)
                .iter()
                .map(|l| Configuration::from_partition(l, self.k(), self.n).expect("in box"))
                .collect();
            viaparts.sort();
            viaparts
        });
        out
    }

    /// The edge rule literally: `⟨J⟩ ≡ ⟨I⟩+1 (mod n)` and `|I ∩ J| = k−1`.
    pub fn is_edge_to(&self, other: &Configuration) -> bool {
        if self.k() != other.k() || self.n != other.n {
            return false;
        }
        let n = self.n as i64;
        let common = self
            .parts
            .iter()
            .filter(|p| other.parts.contains(p))
            .count();
        common + 1 == self.k() && (other.size() - self.size() - 1).rem_euclid(n) == 0
    }
}

impl PartialOrd for Configuration {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Configuration {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, &self.parts).cmp(&(other.n, &other.parts))
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.parts)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

fn check_kn(k: usize, n: usize) -> Result<()> {
    if k == 0 || n == 0 || k > n {
        return Err(Error::InvalidParameters(format!(
            "need 1 ≤ k ≤ n, got k={k}, n={n}"
        )));
    }
    Ok(())
}

/// All of `B_{k,n}`, lexicographic on the decreasing parts, so `I_0` comes first.
pub fn enumerate(k: usize, n: usize) -> Result<Vec<Configuration>> {
    check_kn(k, n)?;
    let mut out = Vec::with_capacity(binomial(n, k) as usize);
    let mut cur = vec![0i64; k];
    fill(0, k, n as i64, &mut cur, &mut out, n);
    Ok(out)
}

fn fill(
    pos: usize,
    k: usize,
    upper: i64,
    cur: &mut Vec<i64>,
    out: &mut Vec<Configuration>,
    n: usize,
) {
    if pos == k {
        out.push(Configuration { parts: cur.clone(), n });
        return;
    }
    let lowest = (k - 1 - pos) as i64;
    for v in lowest..upper {
        cur[pos] = v;
        fill(pos + 1, k, v, cur, out, n);
    }
}

/// Breadth-first search from `I_0`; returns the set of reached vertices.
pub fn reachable_from_ground(k: usize, n: usize) -> Result<Vec<Configuration>> {
    let start = Configuration::ground(k, n)?;
    let mut seen = std::collections::BTreeSet::new();
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start);
    while let Some(v) = queue.pop_front() {
        for w in v.pieri_neighbors() {
            if seen.insert(w.clone()) {
                queue.push_back(w);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// A weakly decreasing tuple of nonnegative integers, trailing zeros dropped.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<i64>,
}

impl Partition {
    pub fn new(mut parts: Vec<i64>) -> Result<Self> {
        if parts.iter().any(|&p| p < 0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameters(format!(
                "{parts:?} is not a partition"
            )));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The single box `(1)`.
    pub fn single_box() -> Self {
        Self { parts: vec![1] }
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `⟨λ⟩ = Σ λ_i`.
    pub fn size(&self) -> i64 {
        self.parts.iter().sum()
    }

    /// Part `i` (0-based), zero beyond the length.
    pub fn part(&self, i: usize) -> i64 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Membership in `R_{k,n}`: at most `k` parts, each at most `n−k`.
    pub fn fits_box(&self, k: usize, n: usize) -> bool {
        k <= n && self.parts.len() <= k && self.part(0) <= (n - k) as i64
    }

    pub fn padded(&self, k: usize) -> Vec<i64> {
        (0..k).map(|i| self.part(i)).collect()
    }

    /// `λ^c` with `λ^c_{k−i+1} = n−k−λ_i`.
    pub fn complement(&self, k: usize, n: usize) -> Result<Partition> {
        if !self.fits_box(k, n) {
            return Err(Error::PartitionOutOfBox {
                parts: self.parts.clone(),
                k,
                width: n.saturating_sub(k),
            });
        }
        let w = (n - k) as i64;
        Partition::new(self.padded(k).iter().rev().map(|l| w - l).collect())
    }

    /// `λ̃ = (λ_2−1, …, λ_k−1, 0)`; defined when `λ_k > 0`.
    pub fn wrap(&self, k: usize) -> Option<Partition> {
        if self.part(k - 1) == 0 {
            return None;
        }
        let mut parts: Vec<i64> = (1..k).map(|i| self.part(i) - 1).collect();
        parts.push(0);
        Partition::new(parts).ok()
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "()");
        }
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

/// Neighbours on the partition side: add one box inside the `k×(n−k)` box, plus
/// the wrap move `λ ↦ λ̃` when `λ_1 = n−k` and `λ_k > 0`.
pub fn pieri_neighbors_partition(lambda: &Partition, k: usize, n: usize) -> Vec<Partition> {
    let w = (n - k) as i64;
    let mut out = Vec::new();
    for i in 0..k {
        let li = lambda.part(i);
        let room_left = i == 0 || lambda.part(i - 1) > li;
        if room_left && li < w {
            let mut p = lambda.padded(k);
            p[i] += 1;
            out.push(Partition::new(p).expect("box addition keeps order"));
        }
    }
    if lambda.part(0) == w {
        if let Some(t) = lambda.wrap(k) {
            out.push(t);
        }
    }
    out
}

/// A point of `T_k`: `k` angles in `[0, 2π)`, weakly decreasing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnglePoint {
    angles: Vec<f64>,
}

impl AnglePoint {
    /// Reduces each angle mod 2π and sorts decreasingly.
    pub fn new(raw: Vec<f64>) -> Self {
        let mut angles: Vec<f64> = raw.into_iter().map(reduce_angle).collect();
        angles.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        Self { angles }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn k(&self) -> usize {
        self.angles.len()
    }

    /// `u ↦ Sort(u_i − angle)`. Callers pass the angle as written at each use
    /// site; `R_t` in turn units is `rotate(2π t)`.
    pub fn rotate(&self, angle: f64) -> Self {
        Self::new(self.angles.iter().map(|u| u - angle).collect())
    }

    pub fn total(&self) -> f64 {
        self.angles.iter().sum()
    }
}

/// Maps an angle to `[0, 2π)`.
pub fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = reduce_angle(a - b);
    d.min(TAU - d)
}

/// Whether two totals agree mod 2π within `tol`.
pub fn congruent_mod_tau(a: f64, b: f64, tol: f64) -> bool {
    circle_distance(a, b) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_order_starts_at_ground() {
        let v = enumerate(2, 4).unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(v[0].parts(), &[1, 0]);
        assert_eq!(v[5].parts(), &[3, 2]);
    }

    #[test]
    fn wrap_move() {
        let l = Partition::new(vec![2, 1]).unwrap();
        let nb = pieri_neighbors_partition(&l, 2, 4);
        assert!(nb.contains(&Partition::empty()));
        assert!(nb.contains(&Partition::new(vec![2, 2]).unwrap()));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(64, 32), 1832624140942590534);
    }
}
