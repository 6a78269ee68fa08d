//! h-probability measures, the discrete Fourier transform `Φ_n` and the
//! convolution it diagonalises.
//!
//! A measure is stored as the law `p(I) = P(I_μ = I)`; the e-basis
//! coefficients `μ(I) = p(I)/μ^h(I)` are a view.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::configurations::{ground_centered_norm_sq, rational_to_f64, Configuration};
use crate::error::{Error, Result};
use crate::spectral::SpectralData;
use crate::EPS_NUM;

#[derive(Clone, Debug, PartialEq)]
pub struct HMeasure {
    k: usize,
    n: usize,
    weights: Vec<f64>,
}

impl HMeasure {
    /// Validates a probability vector over the canonical vertex order.
    ///
    /// Round-off negatives down to `−ε_num` are clamped and the vector is
    /// renormalised; anything worse is an error.
    pub fn new(weights: Vec<f64>, sd: &SpectralData) -> Result<Self> {
        if weights.len() != sd.len() {
            return Err(Error::DimensionMismatch { expected: sd.len(), got: weights.len() });
        }
        if let Some(bad) = weights.iter().find(|w| !w.is_finite() || **w < -EPS_NUM) {
            return Err(Error::InvalidParameters(format!("weight {bad} is not a probability")));
        }
        let total: f64 = weights.iter().map(|w| w.max(0.0)).sum();
        if (total - 1.0).abs() > EPS_NUM {
            return Err(Error::InvalidParameters(format!("weights sum to {total}")));
        }
        Ok(Self::normalized(weights, sd))
    }

    /// Clamps negatives and rescales any nonnegative vector to total mass one.
    pub fn from_unnormalized(weights: Vec<f64>, sd: &SpectralData) -> Result<Self> {
        if weights.len() != sd.len() {
            return Err(Error::DimensionMismatch { expected: sd.len(), got: weights.len() });
        }
        let total: f64 = weights.iter().map(|w| w.max(0.0)).sum();
        if !(total > 0.0) || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameters("no positive mass".into()));
        }
        Ok(Self::normalized(weights, sd))
    }

    fn normalized(weights: Vec<f64>, sd: &SpectralData) -> Self {
        let clamped: Vec<f64> = weights.into_iter().map(|w| w.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        Self {
            k: sd.k(),
            n: sd.n(),
            weights: clamped.into_iter().map(|w| w / total).collect(),
        }
    }

    /// `δ_I`, the h-probability concentrated at `I`.
    pub fn dirac(i: &Configuration, sd: &SpectralData) -> Result<Self> {
        Ok(Self::dirac_index(sd.require_index(i)?, sd))
    }

    pub fn dirac_index(i: usize, sd: &SpectralData) -> Self {
        let mut weights = vec![0.0; sd.len()];
        weights[i] = 1.0;
        Self { k: sd.k(), n: sd.n(), weights }
    }

    /// The invariant law `p = μ^h` (density identically one).
    pub fn invariant(sd: &SpectralData) -> Self {
        Self { k: sd.k(), n: sd.n(), weights: sd.mu_h().to_vec() }
    }

    /// From e-basis coefficients `μ(I)`, i.e. `p = μ·μ^h`.
    pub fn from_density(x: &[f64], sd: &SpectralData) -> Result<Self> {
        let w = x.iter().zip(sd.mu_h()).map(|(a, m)| a * m).collect();
        Self::new(w, sd)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `μ(I) = p(I)/μ^h(I)`.
    pub fn density(&self, sd: &SpectralData) -> Vec<f64> {
        self.weights.iter().zip(sd.mu_h()).map(|(p, m)| p / m).collect()
    }

    /// `{ "3,0": weight, … }` over the support.
    pub fn to_map(&self, sd: &SpectralData) -> BTreeMap<String, f64> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, w)| (sd.vertex(i).to_string(), *w))
            .collect()
    }

    pub fn from_map(map: &BTreeMap<String, f64>, sd: &SpectralData) -> Result<Self> {
        let mut weights = vec![0.0; sd.len()];
        for (key, w) in map {
            let parts = parse_parts(key)?;
            let c = Configuration::from_sites(parts, sd.n())?;
            weights[sd.require_index(&c)?] += w;
        }
        Self::new(weights, sd)
    }

    fn check(&self, sd: &SpectralData) -> Result<()> {
        if self.k != sd.k() || self.n != sd.n() {
            return Err(Error::DimensionMismatch { expected: sd.len(), got: self.weights.len() });
        }
        Ok(())
    }
}

/// Parses `"3,0"`, `"3 0"` or `"[3,0]"`.
pub fn parse_parts(s: &str) -> Result<Vec<i64>> {
    let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| Error::InvalidParameters(format!("bad integer {t:?} in {s:?}")))
        })
        .collect()
}

/// `Φ_n[μ](J)` for every `J` in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoeffs {
    pub values: Vec<Complex64>,
}

impl FourierCoeffs {
    pub fn ones(len: usize) -> Self {
        Self { values: vec![Complex64::new(1.0, 0.0); len] }
    }

    pub fn at(&self, j: usize) -> Complex64 {
        self.values[j]
    }

    pub fn pointwise(&self, other: &Self) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn powu(&self, m: u32) -> Self {
        Self { values: self.values.iter().map(|z| z.powu(m)).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `Φ_n[μ](J) = Σ_I p(I) S_I(ξ_n(J))/S_I(ξ_n(I_0))`.
pub fn fourier(mu: &HMeasure, sd: &SpectralData) -> Result<FourierCoeffs> {
    mu.check(sd)?;
    let t = sd.s_table();
    let support: Vec<(usize, f64)> = mu
        .weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != 0.0)
        .map(|(i, w)| (i, w / sd.perron_eigenvalue(i)))
        .collect();
    let values = (0..sd.len())
        .into_par_iter()
        .map(|j| support.iter().map(|&(i, w)| t[(i, j)] * w).sum())
        .collect();
    Ok(FourierCoeffs { values })
}

/// The transform of an arbitrary e-basis vector:
/// `Φ_n[x](J) = Σ_I h_r(I) S_I(ξ_n(J)) x(I)`.
pub fn fourier_density(x: &[Complex64], sd: &SpectralData) -> Result<FourierCoeffs> {
    if x.len() != sd.len() {
        return Err(Error::DimensionMismatch { expected: sd.len(), got: x.len() });
    }
    let t = sd.s_table();
    let h_r = sd.h_r();
    let values = (0..sd.len())
        .into_par_iter()
        .map(|j| (0..sd.len()).map(|i| t[(i, j)] * h_r[i] * x[i]).sum())
        .collect();
    Ok(FourierCoeffs { values })
}

/// Result of inverting `Φ_n`.
#[derive(Clone, Debug)]
pub enum Inverse {
    Measure(HMeasure),
    /// Not an h-probability; the e-basis coefficients are returned as is.
    Signed(Vec<Complex64>),
}

impl Inverse {
    pub fn measure(self) -> Result<HMeasure> {
        match self {
            Inverse::Measure(m) => Ok(m),
            Inverse::Signed(_) => Err(Error::Numerical(
                "inverse transform is not an h-probability measure".into(),
            )),
        }
    }
}

/// e-basis coefficients `x = Σ_J c(J) ũ^{(J)}` with `ũ^{(J)} = u^{(J)}/h_r`.
pub fn inverse_fourier_density(c: &FourierCoeffs, sd: &SpectralData) -> Result<Vec<Complex64>> {
    if c.values.len() != sd.len() {
        return Err(Error::DimensionMismatch { expected: sd.len(), got: c.values.len() });
    }
    let t = sd.s_table();
    let mu_h = sd.mu_h();
    let h_r = sd.h_r();
    let scaled: Vec<Complex64> = c.values.iter().zip(mu_h).map(|(z, m)| z * m).collect();
    Ok((0..sd.len())
        .into_par_iter()
        .map(|i| {
            let acc: Complex64 = (0..sd.len()).map(|j| scaled[j] * t[(i, j)].conj()).sum();
            acc / h_r[i]
        })
        .collect())
}

/// Inverts `Φ_n`, returning an [`HMeasure`] when the result is one.
pub fn inverse_fourier(c: &FourierCoeffs, sd: &SpectralData) -> Result<Inverse> {
    let x = inverse_fourier_density(c, sd)?;
    let p: Vec<Complex64> = x.iter().zip(sd.mu_h()).map(|(z, m)| z * m).collect();
    let is_measure = (c.values[sd.ground_index()] - 1.0).norm() <= EPS_NUM
        && p.iter().all(|z| z.im.abs() <= EPS_NUM && z.re >= -EPS_NUM);
    if is_measure {
        let w = p.iter().map(|z| z.re).collect();
        Ok(Inverse::Measure(HMeasure::new(w, sd)?))
    } else {
        Ok(Inverse::Signed(x))
    }
}

/// `μ ∗ ν` through the Fourier domain.
pub fn convolve(mu: &HMeasure, nu: &HMeasure, sd: &SpectralData) -> Result<HMeasure> {
    let c = fourier(mu, sd)?.pointwise(&fourier(nu, sd)?);
    inverse_fourier(&c, sd)?.measure()
}

/// `μ_1 ∗ … ∗ μ_m ∗ base` with one inverse transform.
pub fn convolve_sequence(seq: &[HMeasure], base: &HMeasure, sd: &SpectralData) -> Result<HMeasure> {
    let mut c = fourier(base, sd)?;
    for mu in seq {
        c = c.pointwise(&fourier(mu, sd)?);
    }
    inverse_fourier(&c, sd)?.measure()
}

/// `μ ∗ ν` from the definition `x ∗ y = Σ_I μ^h(I) x(I) P^I(y)` on densities.
///
/// Builds one Markov kernel per support point of `μ`; meant as an oracle.
pub fn convolve_direct(mu: &HMeasure, nu: &HMeasure, sd: &SpectralData) -> Result<HMeasure> {
    mu.check(sd)?;
    nu.check(sd)?;
    let x = mu.density(sd);
    let y = nu.density(sd);
    let mut out = vec![0.0; sd.len()];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        let p = sd.markov_kernel(i)?;
        let coef = sd.mu_h()[i] * xi;
        for (r, slot) in out.iter_mut().enumerate() {
            let py: f64 = (0..sd.len()).map(|c| p.matrix[(r, c)] * y[c]).sum();
            *slot += coef * py;
        }
    }
    HMeasure::from_density(&out, sd)
}

/// Moment statistics of one measure, or the centred aggregate of a sequence.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MomentSummary {
    /// `⟨μ⟩ = E⟨I_μ⟩`.
    pub mean: f64,
    /// `Var_2(μ) = E|⟨I_μ⟩ − ⟨μ⟩|²`.
    pub var2: f64,
    /// `Var_3(μ) = E|⟨I_μ⟩ − ⟨μ⟩|³`.
    pub var3: f64,
    /// `‖μ̃‖_2 = E‖Ĩ_μ‖²`.
    pub norm2: f64,
    /// `‖μ̃‖_3 = E‖Ĩ_μ‖³`.
    pub norm3: f64,
    /// `K(μ) = ‖μ̃‖_2 − ‖Ĩ_0‖²`.
    pub k_value: f64,
    /// `⟨μ̂ − I_0⟩_3 = E(⟨Î_μ⟩ − ⟨I_0⟩)³`.
    pub hat3: f64,
}

impl MomentSummary {
    /// Statistics of `δ_{I_0}`, subtracted when aggregating sequences.
    pub fn ground(k: usize) -> Self {
        let g = rational_to_f64(ground_centered_norm_sq(k));
        Self {
            mean: (k * (k - 1) / 2) as f64,
            var2: 0.0,
            var3: 0.0,
            norm2: g,
            norm3: g.powf(1.5),
            k_value: 0.0,
            hat3: 0.0,
        }
    }
}

pub fn moments(mu: &HMeasure, sd: &SpectralData) -> Result<MomentSummary> {
    mu.check(sd)?;
    let k = sd.k();
    let ground_size = (k * (k - 1) / 2) as f64;
    let g = rational_to_f64(ground_centered_norm_sq(k));
    let mut mean = 0.0;
    let mut norm2 = 0.0;
    let mut norm3 = 0.0;
    let mut hat3 = 0.0;
    for (i, &p) in mu.weights.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let v = sd.vertex(i);
        let sq = rational_to_f64(v.k_tilde()) + g;
        mean += p * v.size() as f64;
        norm2 += p * sq;
        norm3 += p * sq.powf(1.5);
        let hat: i64 = v.hat().iter().sum();
        hat3 += p * (hat as f64 - ground_size).powi(3);
    }
    let mut var2 = 0.0;
    let mut var3 = 0.0;
    for (i, &p) in mu.weights.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let d = (sd.vertex(i).size() as f64 - mean).abs();
        var2 += p * d * d;
        var3 += p * d * d * d;
    }
    Ok(MomentSummary { mean, var2, var3, norm2, norm3, k_value: norm2 - g, hat3 })
}

/// `X(𝐦) = (1/m)Σ X(μ_i) − X(I_0)` with per-measure multiplicities.
pub fn aggregate(items: &[(MomentSummary, usize)], k: usize) -> Result<MomentSummary> {
    let m: usize = items.iter().map(|(_, c)| c).sum();
    if m == 0 {
        return Err(Error::InvalidParameters("empty measure sequence".into()));
    }
    let mf = m as f64;
    let avg = |f: &dyn Fn(&MomentSummary) -> f64| {
        items.iter().map(|(s, c)| f(s) * *c as f64).sum::<f64>() / mf
    };
    let g = MomentSummary::ground(k);
    Ok(MomentSummary {
        mean: avg(&|s| s.mean) - g.mean,
        var2: avg(&|s| s.var2) - g.var2,
        var3: avg(&|s| s.var3) - g.var3,
        norm2: avg(&|s| s.norm2) - g.norm2,
        norm3: avg(&|s| s.norm3) - g.norm3,
        k_value: avg(&|s| s.k_value) - g.k_value,
        hat3: avg(&|s| s.hat3) - g.hat3,
    })
}
