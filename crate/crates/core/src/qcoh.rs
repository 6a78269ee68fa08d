//! Small quantum cohomology of the Grassmannian `G(k,n)`.
//!
//! Classes are finite sums `Σ c_{λ,d} q^d σ_λ` with `λ` in the `k×(n−k)` box and
//! exact integer coefficients. Products are available two ways: the quantum
//! Pieri rule iterated box by box (exact, used as an oracle and for long
//! single-box products), and the Verlinde formula over the Schur eigendata
//! (floating point, rounded, then split by degree).

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::configurations::{pieri_neighbors_partition, Configuration, Partition};
use crate::error::{Error, Result};
use crate::harmonic::{moments, HMeasure, MomentSummary};
use crate::spectral::{round_structure_constant, SpectralData};

/// `Σ c_{λ,d} q^d σ_λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    k: usize,
    n: usize,
    terms: BTreeMap<(Partition, u32), BigInt>,
}

impl CohomologyClass {
    pub fn zero(k: usize, n: usize) -> Self {
        Self { k, n, terms: BTreeMap::new() }
    }

    /// The identity `σ_∅`.
    pub fn one(k: usize, n: usize) -> Self {
        Self::schubert(&Partition::empty(), k, n).expect("empty partition fits")
    }

    /// The Schubert class `σ_λ`.
    pub fn schubert(lambda: &Partition, k: usize, n: usize) -> Result<Self> {
        let mut c = Self::zero(k, n);
        c.add_term(lambda.clone(), 0, BigInt::from(1))?;
        Ok(c)
    }

    pub fn from_terms(
        k: usize,
        n: usize,
        terms: impl IntoIterator<Item = ((Partition, u32), BigInt)>,
    ) -> Result<Self> {
        let mut c = Self::zero(k, n);
        for ((lambda, d), coef) in terms {
            c.add_term(lambda, d, coef)?;
        }
        Ok(c)
    }

    pub fn add_term(&mut self, lambda: Partition, d: u32, coef: BigInt) -> Result<()> {
        if !lambda.fits_box(self.k, self.n) {
            return Err(Error::PartitionOutOfBox {
                parts: lambda.parts().to_vec(),
                k: self.k,
                width: self.n.saturating_sub(self.k),
            });
        }
        if coef.is_zero() {
            return Ok(());
        }
        let key = (lambda, d);
        let slot = self.terms.entry(key.clone()).or_insert_with(BigInt::zero);
        *slot += coef;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<(Partition, u32), BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `q^d σ_λ`.
    pub fn coefficient(&self, lambda: &Partition, d: u32) -> BigInt {
        self.terms.get(&(lambda.clone(), d)).cloned().unwrap_or_default()
    }

    /// Cohomological degree `⟨λ⟩ + dn` if all terms agree.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|(l, d)| l.size() + *d as i64 * self.n as i64);
        let first = it.next()?;
        it.all(|x| x == first).then_some(first)
    }

    /// Specialisation `q = 1`.
    pub fn at_q_one(&self) -> BTreeMap<Partition, BigInt> {
        let mut out: BTreeMap<Partition, BigInt> = BTreeMap::new();
        for ((lambda, _), c) in &self.terms {
            *out.entry(lambda.clone()).or_default() += c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// `σ_(1) · x` by the quantum Pieri rule.
    pub fn pieri_multiply(&self) -> Self {
        let (k, n) = (self.k, self.n);
        let w = (n - k) as i64;
        let mut out: BTreeMap<(Partition, u32), BigInt> = BTreeMap::new();
        for ((lambda, d), c) in &self.terms {
            let wraps = lambda.part(0) == w && lambda.part(k - 1) > 0;
            for mu in pieri_neighbors_partition(lambda, k, n) {
                // the wrap move is the only neighbour that shrinks the partition
                let dd = if wraps && mu.size() < lambda.size() { d + 1 } else { *d };
                *out.entry((mu, dd)).or_default() += c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Self { k, n, terms: out }
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.k != other.k || self.n != other.n {
            return Err(Error::InvalidParameters(format!(
                "classes live in G({},{}) and G({},{})",
                self.k, self.n, other.k, other.n
            )));
        }
        Ok(())
    }

    /// Whether the class is exactly `σ_(1)`.
    fn is_single_box(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|((l, d), c)| *l == Partition::single_box() && *d == 0 && *c == BigInt::from(1))
    }
}

/// Output of the Verlinde formula for one product.
#[derive(Clone, Debug)]
pub struct VerlindeProduct {
    /// Synthesised coefficients in canonical vertex order.
    pub raw: Vec<Complex64>,
    pub rounded: Vec<u64>,
    /// Largest distance of a raw coefficient from its rounded value.
    pub max_residual: f64,
}

impl VerlindeProduct {
    pub fn as_map(&self, sd: &SpectralData) -> BTreeMap<Configuration, u64> {
        self.rounded
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, c)| (sd.vertex(i).clone(), *c))
            .collect()
    }
}

/// `c^v_{v_1,…,v_p} = Σ_L μ^h(L) Π_j S_{v_j}(ξ_n(L)) · conj S_v(ξ_n(L))`,
/// the coefficient of `s_v` in `s_{v_1}⋯s_{v_p}` at `q = 1`.
pub fn verlinde_product(factors: &[Configuration], sd: &SpectralData) -> Result<VerlindeProduct> {
    let idx: Vec<usize> = factors.iter().map(|f| sd.require_index(f)).collect::<Result<_>>()?;
    let t = sd.s_table();
    let weights: Vec<Complex64> = (0..sd.len())
        .map(|l| {
            idx.iter()
                .fold(Complex64::new(sd.mu_h()[l], 0.0), |acc, &j| acc * t[(j, l)])
        })
        .collect();
    let raw: Vec<Complex64> = (0..sd.len())
        .into_par_iter()
        .map(|v| (0..sd.len()).map(|l| t[(v, l)].conj() * weights[l]).sum())
        .collect();
    let mut rounded = Vec::with_capacity(raw.len());
    let mut max_residual = 0.0f64;
    for (v, z) in raw.iter().enumerate() {
        match round_structure_constant(*z) {
            Ok(c) => {
                max_residual = max_residual.max((z - c as f64).norm());
                rounded.push(c);
            }
            Err(res) => {
                return Err(Error::Numerical(format!(
                    "Verlinde coefficient at {:?} is {z}, off a nonnegative integer by {res:e}",
                    sd.vertex(v)
                )))
            }
        }
    }
    Ok(VerlindeProduct { raw, rounded, max_residual })
}

/// `⟨λ, μ, ν^c⟩_d` indexed by `(ν, d)`; zero entries omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QlrResult {
    pub entries: BTreeMap<(Partition, u32), u64>,
}

impl QlrResult {
    pub fn get(&self, nu: &Partition, d: u32) -> u64 {
        self.entries.get(&(nu.clone(), d)).copied().unwrap_or(0)
    }
}

/// Quantum Littlewood–Richardson coefficients of `σ_λ σ_μ`.
///
/// The Verlinde output lives at `q = 1`; the degree of each term is recovered
/// from `⟨λ⟩ + ⟨μ⟩ = ⟨ν⟩ + dn`, whose integrality is checked.
pub fn qlr(lambda: &Partition, mu: &Partition, sd: &SpectralData) -> Result<QlrResult> {
    let (k, n) = (sd.k(), sd.n());
    let a = Configuration::from_partition(lambda, k, n)?;
    let b = Configuration::from_partition(mu, k, n)?;
    let prod = verlinde_product(&[a, b], sd)?;
    let total = lambda.size() + mu.size();
    let mut entries = BTreeMap::new();
    for (v, &c) in prod.rounded.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let nu = sd.vertex(v).to_partition();
        let gap = total - nu.size();
        if gap < 0 || gap % n as i64 != 0 {
            return Err(Error::Consistency(format!(
                "σ_{lambda}·σ_{mu} has coefficient {c} at σ_{nu}, at non-integral degree {gap}/{n}"
            )));
        }
        entries.insert((nu, (gap / n as i64) as u32), c);
    }
    Ok(QlrResult { entries })
}

/// Exact products through cached quantum Littlewood–Richardson tables.
pub struct Multiplier<'a> {
    sd: &'a SpectralData,
    cache: HashMap<(Partition, Partition), QlrResult>,
}

impl<'a> Multiplier<'a> {
    pub fn new(sd: &'a SpectralData) -> Self {
        Self { sd, cache: HashMap::new() }
    }

    fn table(&mut self, a: &Partition, b: &Partition) -> Result<&QlrResult> {
        let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        if !self.cache.contains_key(&key) {
            let r = qlr(&key.0, &key.1, self.sd)?;
            self.cache.insert(key.clone(), r);
        }
        Ok(&self.cache[&key])
    }

    pub fn multiply(&mut self, x: &CohomologyClass, y: &CohomologyClass) -> Result<CohomologyClass> {
        x.check_ring(y)?;
        if x.k != self.sd.k() || x.n != self.sd.n() {
            return Err(Error::InvalidParameters("class and spectral data disagree on (k,n)".into()));
        }
        if x.is_single_box() {
            return Ok(y.pieri_multiply());
        }
        if y.is_single_box() {
            return Ok(x.pieri_multiply());
        }
        let mut out: BTreeMap<(Partition, u32), BigInt> = BTreeMap::new();
        for ((a, da), ca) in &x.terms {
            for ((b, db), cb) in &y.terms {
                let coef = ca * cb;
                for ((nu, d), c) in &self.table(a, b)?.entries {
                    *out.entry((nu.clone(), da + db + d)).or_default() += &coef * BigInt::from(*c);
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(CohomologyClass { k: x.k, n: x.n, terms: out })
    }
}

/// `x · y` with exact integer coefficients.
pub fn multiply(x: &CohomologyClass, y: &CohomologyClass, sd: &SpectralData) -> Result<CohomologyClass> {
    Multiplier::new(sd).multiply(x, y)
}

fn require_plain(m: &CohomologyClass) -> Result<()> {
    if m.is_zero() {
        return Err(Error::Domain("the zero class has no quantum dimension".into()));
    }
    if m.terms.keys().any(|(_, d)| *d != 0) {
        return Err(Error::Domain("class carries powers of q".into()));
    }
    if m.degree().is_none() {
        return Err(Error::Domain("class is not homogeneous".into()));
    }
    if m.terms.values().any(|c| c.is_negative()) {
        return Err(Error::Domain("class has negative coefficients".into()));
    }
    Ok(())
}

/// `qDim(M) = Σ_I c_I^M S_I(ξ_n(I_0))`.
pub fn qdim(m: &CohomologyClass, sd: &SpectralData) -> Result<f64> {
    require_plain(m)?;
    let mut acc = 0.0;
    for ((lambda, _), c) in &m.terms {
        let i = sd.require_index(&Configuration::from_partition(lambda, m.k, m.n)?)?;
        acc += c.to_f64().unwrap_or(f64::INFINITY) * sd.perron_eigenvalue(i);
    }
    Ok(acc)
}

/// Law `p^M` of a homogeneous class together with its moments.
#[derive(Clone, Debug)]
pub struct ClassStats {
    pub qdim: f64,
    /// `p_I^M = c_I^M S_I(ξ_n(I_0))/qDim(M)`.
    pub law: HMeasure,
    pub moments: MomentSummary,
}

impl ClassStats {
    /// `‖M‖_2 = Σ_I p_I^M ‖Ĩ‖²`.
    pub fn norm2(&self) -> f64 {
        self.moments.norm2
    }

    /// `‖M‖_3 = Σ_I p_I^M ‖Ĩ‖³`.
    pub fn norm3(&self) -> f64 {
        self.moments.norm3
    }
}

pub fn class_stats(m: &CohomologyClass, sd: &SpectralData) -> Result<ClassStats> {
    let q = qdim(m, sd)?;
    let mut weights = vec![0.0; sd.len()];
    for ((lambda, _), c) in &m.terms {
        let i = sd.require_index(&Configuration::from_partition(lambda, m.k, m.n)?)?;
        weights[i] += c.to_f64().unwrap_or(f64::INFINITY) * sd.perron_eigenvalue(i) / q;
    }
    let law = HMeasure::new(weights, sd)?;
    let moments = moments(&law, sd)?;
    Ok(ClassStats { qdim: q, law, moments })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerativeCount {
    pub count: BigInt,
    /// Whether `Σ deg M_i = k(n−k) + dn`; the count is zero otherwise.
    pub balanced: bool,
}

/// `#M = ⟨M_1, …, M_p, M_{p+1}⟩_d`: the coefficient of `q^d [pt]` in the
/// product, read off by pairing the product of the first `p` classes with the
/// last one through `σ_λ ↦ σ_{λ^c}`.
pub fn enumerative_count(
    classes: &[CohomologyClass],
    d: u32,
    sd: &SpectralData,
) -> Result<EnumerativeCount> {
    let (k, n) = (sd.k(), sd.n());
    let Some((last, first)) = classes.split_last() else {
        return Err(Error::InvalidParameters("no classes given".into()));
    };
    let mut total = 0i64;
    for c in classes {
        if c.k != k || c.n != n {
            return Err(Error::InvalidParameters("class and spectral data disagree on (k,n)".into()));
        }
        match c.degree() {
            Some(deg) => total += deg,
            None => return Err(Error::Domain("class is not homogeneous".into())),
        }
    }
    let target = (k * (n - k)) as i64 + d as i64 * n as i64;
    if total != target {
        return Ok(EnumerativeCount { count: BigInt::zero(), balanced: false });
    }
    let mut mult = Multiplier::new(sd);
    let mut prod = CohomologyClass::one(k, n);
    for c in first {
        prod = mult.multiply(&prod, c)?;
    }
    let mut count = BigInt::zero();
    for ((mu, dl), c) in &last.terms {
        if *dl > d {
            continue;
        }
        count += c * prod.coefficient(&mu.complement(k, n)?, d - dl);
    }
    Ok(EnumerativeCount { count, balanced: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[i64]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn pieri_wrap_term() {
        let x = CohomologyClass::schubert(&p(&[2, 1]), 2, 4).unwrap().pieri_multiply();
        assert_eq!(x.coefficient(&p(&[2, 2]), 0), BigInt::from(1));
        assert_eq!(x.coefficient(&p(&[]), 1), BigInt::from(1));
        assert_eq!(x.terms().len(), 2);
    }

    #[test]
    fn projective_line() {
        let x = CohomologyClass::schubert(&p(&[1]), 1, 2).unwrap().pieri_multiply();
        assert_eq!(x.coefficient(&p(&[]), 1), BigInt::from(1));
        assert_eq!(x.terms().len(), 1);
    }
}
