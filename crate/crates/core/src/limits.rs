//! Numerical checks of the asymptotic results: Fourier decay of long
//! convolutions, the local limit theorem, a Fourier-side Wasserstein bound
//! against the Dyson Brownian motion, and the enumerative corollary.
//!
//! Rotations follow one convention throughout: `R_a(u) = u − 2πa·1`.

use std::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::configurations::{
    ground_centered_norm_sq, ground_parts, is_strictly_decreasing, k_tilde, rational_to_f64,
    Configuration,
};
use crate::error::{Error, Result};
use crate::harmonic::{
    aggregate, fourier, inverse_fourier_density, moments, FourierCoeffs, HMeasure, MomentSummary,
};
use crate::heat::{heat_kernel_suk, kappa, kappa_unitary, shell, HeatParams};
use crate::qcoh::{class_stats, enumerative_count, CohomologyClass};
use crate::schur::{alternant, vandermonde_abs_config, weyl_dimension_f64};
use crate::spectral::SpectralData;
use crate::EPS_NUM;

/// Default tolerance for heat-kernel evaluations inside the checks.
pub const KERNEL_TOL: f64 = 1e-12;

/// `t_0 = (2π)² m / n²`.
pub fn t0(m: usize, n: usize) -> f64 {
    TAU * TAU * m as f64 / (n * n) as f64
}

/// Which normalisation of the drift constant `γ` to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum GammaConvention {
    /// `γ = kK(𝐦)/(2(k²−1))`; matches the exponents of the Fourier asymptotics.
    #[default]
    Standard,
    /// `γ = kK(𝐦)/(k²−1)`, as printed in the local limit statement.
    Doubled,
}

impl GammaConvention {
    pub fn gamma(self, k: usize, k_value: f64) -> f64 {
        let kf = k as f64;
        let g = kf * k_value / (kf * kf - 1.0);
        match self {
            GammaConvention::Standard => g / 2.0,
            GammaConvention::Doubled => g,
        }
    }
}

/// A finite sequence `𝐦 = (μ_1, …, μ_m)` stored as runs of repeated measures.
#[derive(Clone, Debug)]
pub struct MeasureSequence {
    runs: Vec<(HMeasure, usize)>,
}

impl MeasureSequence {
    pub fn new(runs: Vec<(HMeasure, usize)>) -> Result<Self> {
        let runs: Vec<_> = runs.into_iter().filter(|(_, c)| *c > 0).collect();
        if runs.is_empty() {
            return Err(Error::InvalidParameters("empty measure sequence".into()));
        }
        if runs.windows(2).any(|w| w[0].0.k() != w[1].0.k() || w[0].0.n() != w[1].0.n()) {
            return Err(Error::InvalidParameters("measures on different graphs".into()));
        }
        Ok(Self { runs })
    }

    pub fn runs(&self) -> &[(HMeasure, usize)] {
        &self.runs
    }

    /// `m`, the number of measures.
    pub fn len(&self) -> usize {
        self.runs.iter().map(|(_, c)| c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Φ_n[∗𝐦] = Π_r Φ_n[μ_r]`.
    pub fn fourier_product(&self, sd: &SpectralData) -> Result<FourierCoeffs> {
        let mut acc = FourierCoeffs::ones(sd.len());
        for (mu, count) in &self.runs {
            let exp = u32::try_from(*count)
                .map_err(|_| Error::InvalidParameters(format!("run length {count} too large")))?;
            acc = acc.pointwise(&fourier(mu, sd)?.powu(exp));
        }
        Ok(acc)
    }

    /// Per-measure moments and the centred aggregate `X(𝐦)`.
    pub fn moments(&self, sd: &SpectralData) -> Result<(Vec<MomentSummary>, MomentSummary)> {
        let per: Vec<MomentSummary> =
            self.runs.iter().map(|(mu, _)| moments(mu, sd)).collect::<Result<_>>()?;
        let items: Vec<_> = per.iter().copied().zip(self.runs.iter().map(|(_, c)| *c)).collect();
        let agg = aggregate(&items, sd.k())?;
        Ok((per, agg))
    }
}

/// `m` copies of `δ_{I_1}`, i.e. `m` steps of the single-box Pieri walk.
pub fn pieri_sequence(sd: &SpectralData, m: usize) -> Result<MeasureSequence> {
    let i1 = sd.first_step_index().ok_or_else(|| {
        Error::Domain(format!("B_{{{},{}}} has no Pieri step", sd.k(), sd.n()))
    })?;
    MeasureSequence::new(vec![(HMeasure::dirac_index(i1, sd), m)])
}

/// Aggregate statistics of a sequence, including the candidate constants `M`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SequenceStats {
    pub m: usize,
    /// `⟨𝐦⟩`.
    pub mean: f64,
    /// `K(𝐦)`.
    pub k_value: f64,
    /// `Var(𝐦) = Var_2(𝐦)`.
    pub var2: f64,
    pub var3: f64,
    /// `⟨𝐦̂⟩_3`.
    pub hat3: f64,
    /// `Var_3/Var^{3/2}`, undefined when `Var = 0`.
    pub m_var: Option<f64>,
    /// `⟨𝐦̂⟩_3/K^{3/2}`.
    pub m_hat: f64,
    /// `‖𝐦̃‖_3/(k³‖𝐦̃‖_2^{3/2})`.
    pub m_simplified: f64,
    /// Smallest `M` satisfying both hypotheses of the Fourier asymptotics.
    pub m_effective: f64,
}

pub fn sequence_stats(seq: &MeasureSequence, sd: &SpectralData) -> Result<SequenceStats> {
    let (_, agg) = seq.moments(sd)?;
    let k = sd.k() as f64;
    let m_var = (agg.var2 > EPS_NUM).then(|| agg.var3 / agg.var2.powf(1.5));
    let m_hat = if agg.k_value > 0.0 { agg.hat3 / agg.k_value.powf(1.5) } else { f64::INFINITY };
    let m_simplified = agg.norm3 / (k.powi(3) * agg.norm2.powf(1.5));
    Ok(SequenceStats {
        m: seq.len(),
        mean: agg.mean,
        k_value: agg.k_value,
        var2: agg.var2,
        var3: agg.var3,
        hat3: agg.hat3,
        m_var,
        m_hat,
        m_simplified,
        m_effective: m_var.map_or(m_hat, |v| v.max(m_hat)),
    })
}

/// One `J` of the Fourier-decay comparison.
#[derive(Clone, Debug, Serialize)]
pub struct FourierDecayEntry {
    pub j: Vec<i64>,
    pub predicted: Complex64,
    pub actual: Complex64,
    pub error: f64,
    pub in_window: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FourierDecayReport {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub stats: SequenceStats,
    /// Constant `c` of the validity window.
    pub window_constant: f64,
    /// Bound on `‖J̃‖_∞` defining the window.
    pub window_sup: f64,
    /// Bound on `|⟨λ_J⟩|`, absent when `Var(𝐦) = 0`.
    pub window_size: Option<f64>,
    pub entries: Vec<FourierDecayEntry>,
    /// Largest error over in-window `J`.
    pub max_error: f64,
}

fn window_bounds(stats: &SequenceStats, k: usize, n: usize, c: f64) -> (f64, Option<f64>) {
    let scale = (stats.m as f64 * stats.m_effective).cbrt();
    let sup = c * n as f64 / (scale * stats.k_value.sqrt());
    let size = (stats.var2 > EPS_NUM).then(|| c * (k * n) as f64 / (scale * stats.var2.sqrt()));
    (sup, size)
}

/// Predicted `Φ_n[∗𝐦](J^{(n)})` from the second-order expansion.
pub fn predicted_fourier(j: &[i64], n: usize, stats: &SequenceStats) -> Complex64 {
    let k = j.len();
    let kf = k as f64;
    let lam = (j.iter().sum::<i64>() - ground_parts(k).iter().sum::<i64>()) as f64;
    let m = stats.m as f64;
    let nf = n as f64;
    let phase = TAU * m * stats.mean * lam / (kf * nf);
    let decay = m * TAU * TAU / (2.0 * nf * nf)
        * (stats.k_value * rational_to_f64(k_tilde(j)) / (kf * kf - 1.0)
            + stats.var2 * lam * lam / (kf * kf));
    Complex64::from_polar((-decay).exp(), phase)
}

/// `J^{(n)}`, the vertex with the sites of `J` reduced mod `n`.
pub fn reduce_lift(j: &[i64], n: usize) -> Result<Configuration> {
    if !is_strictly_decreasing(j) || j[0] >= j[j.len() - 1] + n as i64 {
        return Err(Error::InvalidParameters(format!(
            "{j:?} is not a decreasing tuple with J_1 < J_k + n"
        )));
    }
    Configuration::from_sites(j.iter().map(|x| x.rem_euclid(n as i64)).collect(), n)
}

fn sup_centered(j: &[i64]) -> f64 {
    let k = j.len() as f64;
    let mean = j.iter().sum::<i64>() as f64 / k;
    j.iter().map(|&x| (x as f64 - mean).abs()).fold(0.0, f64::max)
}

/// Compares `Φ_n[∗𝐦](J^{(n)})` with its predicted value for one lift `J`.
pub fn fourier_decay_check(
    seq: &MeasureSequence,
    j: &[i64],
    sd: &SpectralData,
    window_constant: f64,
) -> Result<FourierDecayEntry> {
    let stats = sequence_stats(seq, sd)?;
    let actual = seq.fourier_product(sd)?;
    decay_entry(j, sd, &stats, &actual, window_constant)
}

fn decay_entry(
    j: &[i64],
    sd: &SpectralData,
    stats: &SequenceStats,
    actual: &FourierCoeffs,
    c: f64,
) -> Result<FourierDecayEntry> {
    if j.len() != sd.k() {
        return Err(Error::DimensionMismatch { expected: sd.k(), got: j.len() });
    }
    let idx = sd.require_index(&reduce_lift(j, sd.n())?)?;
    let predicted = predicted_fourier(j, sd.n(), stats);
    let actual = actual.at(idx);
    let (sup, size) = window_bounds(stats, sd.k(), sd.n(), c);
    let lam = (j.iter().sum::<i64>() - ground_parts(sd.k()).iter().sum::<i64>()).abs() as f64;
    let in_window = sup_centered(j) <= sup && size.map_or(true, |s| lam <= s);
    Ok(FourierDecayEntry { j: j.to_vec(), predicted, actual, error: (actual - predicted).norm(), in_window })
}

/// The comparison over every vertex `J ∈ B_{k,n}`, taken as its own lift.
pub fn fourier_decay_report(
    seq: &MeasureSequence,
    sd: &SpectralData,
    window_constant: f64,
) -> Result<FourierDecayReport> {
    let stats = sequence_stats(seq, sd)?;
    let actual = seq.fourier_product(sd)?;
    let entries: Vec<FourierDecayEntry> = sd
        .vertices()
        .iter()
        .map(|v| decay_entry(v.parts(), sd, &stats, &actual, window_constant))
        .collect::<Result<_>>()?;
    let max_error = entries.iter().filter(|e| e.in_window).map(|e| e.error).fold(0.0, f64::max);
    let (window_sup, window_size) = window_bounds(&stats, sd.k(), sd.n(), window_constant);
    Ok(FourierDecayReport {
        k: sd.k(),
        n: sd.n(),
        m: seq.len(),
        stats,
        window_constant,
        window_sup,
        window_size,
        entries,
        max_error,
    })
}

/// How `(∗𝐦) ∗ δ_I` is computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum ConvolutionMethod {
    /// Product of Fourier transforms, one inverse transform.
    Fourier,
    /// Repeated application of the averaged kernels `Σ_J p(J) P^J`; exact
    /// support and no cancellation, at one kernel build per support point.
    #[default]
    Propagate,
}

/// Supports larger than this fall back to the Fourier method.
pub const PROPAGATE_MAX_SUPPORT: usize = 8;

/// e-basis coefficients of `(∗𝐦) ∗ δ_I`.
pub fn convolved_density(
    seq: &MeasureSequence,
    start: &Configuration,
    sd: &SpectralData,
    method: ConvolutionMethod,
) -> Result<Vec<f64>> {
    match method {
        ConvolutionMethod::Fourier => {
            let c = seq
                .fourier_product(sd)?
                .pointwise(&fourier(&HMeasure::dirac(start, sd)?, sd)?);
            Ok(inverse_fourier_density(&c, sd)?.iter().map(|z| z.re).collect())
        }
        ConvolutionMethod::Propagate => {
            let size = sd.len();
            let mut x = HMeasure::dirac(start, sd)?.density(sd);
            for (mu, count) in seq.runs() {
                // Q = Σ_J μ^h(J) μ(J) P^J, stored sparsely by rows
                let mut q = nalgebra::DMatrix::<f64>::zeros(size, size);
                for (j, &w) in mu.weights().iter().enumerate() {
                    if w != 0.0 {
                        q += sd.markov_kernel(j)?.matrix * w;
                    }
                }
                let rows: Vec<Vec<(usize, f64)>> = (0..size)
                    .map(|r| (0..size).filter(|&c| q[(r, c)] != 0.0).map(|c| (c, q[(r, c)])).collect())
                    .collect();
                for _ in 0..*count {
                    x = rows.iter().map(|row| row.iter().map(|&(c, v)| v * x[c]).sum()).collect();
                }
            }
            Ok(x)
        }
    }
}

fn default_method(seq: &MeasureSequence) -> ConvolutionMethod {
    let small = seq
        .runs()
        .iter()
        .all(|(mu, _)| mu.weights().iter().filter(|w| **w != 0.0).count() <= PROPAGATE_MAX_SUPPORT);
    if small {
        ConvolutionMethod::Propagate
    } else {
        ConvolutionMethod::Fourier
    }
}

/// Which congruence formula the supported size class agrees with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClassFormula {
    /// `⟨I′⟩ ≡ ⟨I⟩ + m⟨𝐦⟩ (mod n)`.
    Full,
    /// `⟨I′⟩ ≡ ⟨I⟩ + m⟨𝐦⟩/k (mod n)`.
    DividedByK,
    Both,
    Neither,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalLimitEntry {
    pub target: Configuration,
    pub lhs: f64,
    pub rhs: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalLimitReport {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub start: Configuration,
    pub stats: SequenceStats,
    pub gamma_convention: GammaConvention,
    pub method: ConvolutionMethod,
    pub gamma: f64,
    pub t0: f64,
    /// Rotation `θ = m⟨𝐦⟩/(kn)` applied as `R_{−θ}` to `ξ_n(I)`.
    pub theta: f64,
    /// Residue `⟨I′⟩ mod n` carrying the mass.
    pub supported_residue: i64,
    pub class_formula: ClassFormula,
    /// `Σ |p(I′)|` over vertices outside the supported class.
    pub off_class_mass: f64,
    pub sup_error: f64,
    pub mean_error: f64,
    pub entries: Vec<LocalLimitEntry>,
}

/// Local limit comparison for a sequence with `Var_2(μ_r) = 0` for every `r`.
///
/// `LHS(I′) = n^{−1}((∗𝐦) ∗ δ_I)[I′]` in the e-basis against
/// `K^{SU(k)}_{γt_0}(ξ_n(I′), R_{−θ}ξ_n(I))` on the supported size class.
pub fn local_limit_check(
    seq: &MeasureSequence,
    start: &Configuration,
    sd: &SpectralData,
    convention: GammaConvention,
    method: Option<ConvolutionMethod>,
) -> Result<LocalLimitReport> {
    let (k, n) = (sd.k(), sd.n());
    if k < 2 {
        return Err(Error::Domain("the SU(k) kernel needs k ≥ 2".into()));
    }
    let (per, _) = seq.moments(sd)?;
    if let Some(bad) = per.iter().find(|s| s.var2 > EPS_NUM) {
        return Err(Error::Domain(format!("Var_2 = {} ≠ 0 in the sequence", bad.var2)));
    }
    let stats = sequence_stats(seq, sd)?;
    let m = seq.len();
    let method = method.unwrap_or_else(|| default_method(seq));
    let x = convolved_density(seq, start, sd, method)?;
    let p: Vec<f64> = x.iter().zip(sd.mu_h()).map(|(z, w)| z * w).collect();

    let mut by_residue = vec![0.0; n];
    for (i, v) in sd.vertices().iter().enumerate() {
        by_residue[v.size().rem_euclid(n as i64) as usize] += p[i].abs();
    }
    let supported = (0..n)
        .max_by(|&a, &b| by_residue[a].total_cmp(&by_residue[b]))
        .expect("n ≥ 1") as i64;
    let off_class_mass: f64 = by_residue
        .iter()
        .enumerate()
        .filter(|(r, _)| *r as i64 != supported)
        .map(|(_, v)| v)
        .sum();

    let shift = (m as f64 * stats.mean).round() as i64;
    let full = (start.size() + shift).rem_euclid(n as i64) == supported;
    let divided = shift % k as i64 == 0
        && (start.size() + shift / k as i64).rem_euclid(n as i64) == supported;
    let class_formula = match (full, divided) {
        (true, true) => ClassFormula::Both,
        (true, false) => ClassFormula::Full,
        (false, true) => ClassFormula::DividedByK,
        (false, false) => ClassFormula::Neither,
    };

    let gamma = convention.gamma(k, stats.k_value);
    let time = t0(m, n);
    let theta = shift as f64 / (k * n) as f64;
    let target: Vec<f64> = start.raw_angles().iter().map(|a| a + TAU * theta).collect();
    let mut entries = Vec::new();
    for (i, v) in sd.vertices().iter().enumerate() {
        if v.size().rem_euclid(n as i64) != supported {
            continue;
        }
        let lhs = x[i] / n as f64;
        let rhs = heat_kernel_suk(&v.raw_angles(), &target, gamma, time, KERNEL_TOL)?.value;
        entries.push(LocalLimitEntry { target: v.clone(), lhs, rhs, error: (lhs - rhs).abs() });
    }
    let sup_error = entries.iter().map(|e| e.error).fold(0.0, f64::max);
    let mean_error = entries.iter().map(|e| e.error).sum::<f64>() / entries.len().max(1) as f64;
    Ok(LocalLimitReport {
        k,
        n,
        m,
        start: start.clone(),
        stats,
        gamma_convention: convention,
        method,
        gamma,
        t0: time,
        theta,
        supported_residue: supported,
        class_formula,
        off_class_mass,
        sup_error,
        mean_error,
        entries,
    })
}

/// A conjugation-invariant law on `U(k)`, described through its angles.
#[derive(Clone, Debug)]
pub enum TorusLaw {
    /// Finitely many angle vectors with probabilities.
    Atoms { points: Vec<Vec<f64>>, weights: Vec<f64> },
    /// The Dyson Brownian motion started at `start`, observed at `params.t`.
    Dyson { start: Vec<f64>, params: HeatParams },
}

impl TorusLaw {
    pub fn k(&self) -> usize {
        match self {
            TorusLaw::Atoms { points, .. } => points.first().map_or(0, |p| p.len()),
            TorusLaw::Dyson { start, .. } => start.len(),
        }
    }

    /// `Φ[law](J) = E[S_J(U)]` for any decreasing integer tuple `J`.
    pub fn coefficient(&self, j: &[i64]) -> Result<Complex64> {
        Ok(self.coefficient_row(j, &[0])?[0])
    }

    /// `Φ[law](Ĵ + ℓ·1)` for each `ℓ` in `ells`.
    fn coefficient_row(&self, jhat: &[i64], ells: &[i64]) -> Result<Vec<Complex64>> {
        let den = |u: &[f64]| alternant(&ground_parts(u.len()), u);
        match self {
            TorusLaw::Atoms { points, weights } => {
                // atoms sharing a total angle share the phase e^{iℓΣu}
                let mut groups: Vec<(f64, Complex64)> = Vec::new();
                for (u, w) in points.iter().zip(weights) {
                    if *w == 0.0 {
                        continue;
                    }
                    let c = alternant(jhat, u) / den(u) * *w;
                    let total = u.iter().sum::<f64>().rem_euclid(TAU);
                    match groups.iter_mut().find(|(t, _)| (t - total).abs() < 1e-12) {
                        Some(g) => g.1 += c,
                        None => groups.push((total, c)),
                    }
                }
                Ok(ells
                    .iter()
                    .map(|&l| {
                        groups
                            .iter()
                            .map(|(t, c)| c * Complex64::from_polar(1.0, l as f64 * t))
                            .sum()
                    })
                    .collect())
            }
            TorusLaw::Dyson { start, params } => {
                let s = alternant(jhat, start) / den(start);
                let total: f64 = start.iter().sum();
                Ok(ells
                    .iter()
                    .map(|&l| {
                        let j: Vec<i64> = jhat.iter().map(|x| x + l).collect();
                        let decay = (-kappa(&j, params.alpha, params.gamma) * params.t).exp();
                        s * Complex64::from_polar(decay, l as f64 * total)
                    })
                    .collect())
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WassersteinBound {
    /// `min_t` of the certified bound over the grid.
    pub bound: f64,
    pub t_best: f64,
    /// Last shell `L = Ĵ_1` summed explicitly.
    pub radius: i64,
    /// `(t, bound(t))` for every grid point.
    pub per_t: Vec<(f64, f64)>,
}

/// Upper bound on `W_1` between two conjugation-invariant laws:
/// `min_t 2√(2t)k + (Σ_{J≠I_0} e^{−2κ(J)t}/κ(J)|c_1(J) − c_2(J)|²)^{1/2}`,
/// `κ = κ_{k,k}`.
///
/// The series over `J = Ĵ + ℓ·1` is summed over the shells `Ĵ_1 ≤ radius` and a
/// window of `ℓ`; dropped terms are bounded using `|c_i(J)| ≤ d_J` and added
/// under the square root, so every grid value is an upper bound.
pub fn wasserstein_upper_bound(
    c1: &TorusLaw,
    c2: &TorusLaw,
    t_grid: &[f64],
    radius: Option<i64>,
) -> Result<WassersteinBound> {
    let k = c1.k();
    if k == 0 || c2.k() != k {
        return Err(Error::DimensionMismatch { expected: k, got: c2.k() });
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidParameters("t grid must be nonempty and positive".into()));
    }
    let kf = k as f64;
    let g = rational_to_f64(ground_centered_norm_sq(k));
    let t_min = t_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let radius = radius.unwrap_or_else(|| default_radius(k, t_min));
    // ℓ-window half-width: e^{−2t k X²} negligible at the smallest t
    let reach = (45.0 / (2.0 * t_min * kf)).sqrt() + 1.0;
    let ground: i64 = ground_parts(k).iter().sum();

    struct Term {
        kappa: f64,
        diff2: f64,
    }
    let mut terms: Vec<Term> = Vec::new();
    // per-Ĵ data for the dropped-ℓ bound: (d_J², K(Ĵ̃))
    let mut shells: Vec<(f64, f64)> = Vec::new();
    let lowest = if k == 1 { 0 } else { k as i64 - 1 };
    for l in lowest..=radius.max(lowest) {
        for jhat in shell(k, l) {
            let c = (jhat.iter().sum::<i64>() - ground) as f64 / kf;
            let ells: Vec<i64> = ((-c - reach).floor() as i64..=(-c + reach).ceil() as i64).collect();
            let a = c1.coefficient_row(&jhat, &ells)?;
            let b = c2.coefficient_row(&jhat, &ells)?;
            for (idx, &ell) in ells.iter().enumerate() {
                let j: Vec<i64> = jhat.iter().map(|x| x + ell).collect();
                let kap = kappa_unitary(&j);
                if kap <= 0.0 {
                    continue; // J = I_0
                }
                terms.push(Term { kappa: kap, diff2: (a[idx] - b[idx]).norm_sqr() });
            }
            let d = weyl_dimension_f64(&jhat);
            shells.push((d * d, rational_to_f64(k_tilde(&jhat))));
        }
    }
    let mut per_t = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let main: f64 = terms.iter().map(|x| (-2.0 * x.kappa * t).exp() / x.kappa * x.diff2).sum();
        // ℓ outside the window: κ ≥ kX², Gaussian tail on both sides
        let q = (-2.0 * t * kf * reach * reach).exp() * 2.0 / (1.0 - (-4.0 * t * kf * reach).exp());
        let ell_tail: f64 = shells
            .iter()
            .map(|(d2, kt)| 4.0 * d2 * (-2.0 * t * kt).exp() * q / (kf * reach * reach))
            .sum();
        let shell_tail = shells_tail(k, radius, t, g);
        let value = 2.0 * (2.0 * t).sqrt() * kf + (main + ell_tail + shell_tail).sqrt();
        per_t.push((t, value));
    }
    let (t_best, bound) = per_t
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is nonempty");
    Ok(WassersteinBound { bound, t_best, radius, per_t })
}

/// Shell radius making the dropped shells negligible at time `t`.
fn default_radius(k: usize, t: f64) -> i64 {
    if k == 1 {
        return 0;
    }
    let g = rational_to_f64(ground_centered_norm_sq(k));
    let power = (k - 2 + k * (k - 1)) as f64;
    let mut l = (2.0 * (1.0 + g)).sqrt().ceil() as i64 + k as i64;
    while l < 20_000 {
        let lf = l as f64;
        let log_term = power * lf.ln() - 2.0 * t * (lf * lf / 2.0 - g);
        let ratio = ((lf + 1.0) / lf).powf(power) * (-t * (2.0 * lf + 1.0)).exp();
        if log_term < -50.0 && ratio < 0.5 {
            return l;
        }
        l += 1;
    }
    l
}

/// Bound on `Σ_{Ĵ_1 > R} Σ_ℓ 4 d_J² e^{−2κ(J)t}/κ(J)` using
/// `κ ≥ K(Ĵ̃) ≥ L²/2 − ‖Ĩ_0‖² ≥ 1` and `Σ_ℓ e^{−2tk(ℓ+c)²} ≤ 1 + √(π/(2tk))`.
fn shells_tail(k: usize, radius: i64, t: f64, g: f64) -> f64 {
    if k == 1 {
        return 0.0;
    }
    let power = (k - 2 + k * (k - 1)) as f64;
    let bound = |l: i64| {
        let lf = l as f64;
        (power * lf.ln() - 2.0 * t * (lf * lf / 2.0 - g)).exp()
    };
    let first = bound(radius + 1);
    let lf = (radius + 1) as f64;
    let ratio = ((lf + 1.0) / lf).powf(power) * (-t * (2.0 * lf + 1.0)).exp();
    if ratio >= 1.0 || lf * lf / 2.0 - g < 1.0 {
        return f64::INFINITY;
    }
    let theta = 1.0 + (PI / (2.0 * t * k as f64)).sqrt();
    4.0 * theta * first / (1.0 - ratio)
}

/// The two laws compared in the Berry–Esseen bound.
#[derive(Clone, Debug)]
pub struct BerryEsseenSetup {
    /// `R_θ ξ_n((∗𝐦) ∗ δ_I)` with `θ = m⟨𝐦⟩/(kn)`.
    pub discrete: TorusLaw,
    /// `B^{α,γ}_{ξ_n(I)}(t_0)` with `α = Var(𝐦)/2`.
    pub dyson: TorusLaw,
    pub params: HeatParams,
    pub theta: f64,
}

pub fn berry_esseen_setup(
    seq: &MeasureSequence,
    start: &Configuration,
    sd: &SpectralData,
    convention: GammaConvention,
) -> Result<BerryEsseenSetup> {
    let (k, n) = (sd.k(), sd.n());
    let stats = sequence_stats(seq, sd)?;
    let m = seq.len();
    let x = convolved_density(seq, start, sd, default_method(seq))?;
    let theta = m as f64 * stats.mean / (k * n) as f64;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (i, v) in sd.vertices().iter().enumerate() {
        let p = x[i] * sd.mu_h()[i];
        if p.abs() <= 1e-300 {
            continue;
        }
        points.push(v.raw_angles().iter().map(|a| a - TAU * theta).collect());
        weights.push(p);
    }
    let params = HeatParams::new(stats.var2 / 2.0, convention.gamma(k, stats.k_value), t0(m, n))?;
    Ok(BerryEsseenSetup {
        discrete: TorusLaw::Atoms { points, weights },
        dyson: TorusLaw::Dyson { start: start.raw_angles(), params },
        params,
        theta,
    })
}

/// Exact count, its asymptotic prediction and their ratio.
#[derive(Clone, Debug, Serialize)]
pub struct CorollaryReport {
    pub k: usize,
    pub n: usize,
    /// Number of middle constraints `M_1, …, M_m`.
    pub m: usize,
    pub d: u32,
    pub balanced: bool,
    /// Decimal expansion of the exact count.
    pub exact: String,
    pub ln_exact: f64,
    pub ln_asymptotic: Option<f64>,
    pub ratio: Option<f64>,
    pub gamma: f64,
    pub t0: f64,
    /// `Σ_{I,I′} p_I^{M_0} p_{I′}^{M_{m+1}} K^{SU(k)}_{γt_0}(x_I, y_{I′})`.
    pub kernel_sum: f64,
}

/// Natural logarithm of a positive big integer.
pub fn ln_bigint(x: &BigInt) -> f64 {
    if !x.is_positive() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 60;
    let top: BigInt = x >> shift;
    top.to_f64().expect("60 bits fit").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Counts degree-`d` curves through `M_0, …, M_{m+1}` exactly and compares
/// with the local-limit asymptotics.
pub fn corollary_check(
    classes: &[CohomologyClass],
    d: u32,
    sd: &SpectralData,
    convention: GammaConvention,
) -> Result<CorollaryReport> {
    let (k, n) = (sd.k(), sd.n());
    if classes.len() < 3 {
        return Err(Error::InvalidParameters("need M_0, at least one constraint and M_{m+1}".into()));
    }
    let m = classes.len() - 2;
    let exact = enumerative_count(classes, d, sd)?;
    let ln_exact = ln_bigint(&exact.count);
    let time = t0(m, n);
    let mut report = CorollaryReport {
        k,
        n,
        m,
        d,
        balanced: exact.balanced,
        exact: exact.count.to_string(),
        ln_exact,
        ln_asymptotic: None,
        ratio: None,
        gamma: f64::NAN,
        t0: time,
        kernel_sum: f64::NAN,
    };
    if !exact.balanced || k < 2 {
        return Ok(report);
    }

    // statistics of the middle constraints, one evaluation per run of equal classes
    let middle = &classes[1..=m];
    let mut items: Vec<(MomentSummary, usize)> = Vec::new();
    let mut ln_qdim = 0.0;
    let mut shift = 0i64;
    let mut r = 0;
    while r < middle.len() {
        let mut e = r + 1;
        while e < middle.len() && middle[e] == middle[r] {
            e += 1;
        }
        let s = class_stats(&middle[r], sd)?;
        ln_qdim += (e - r) as f64 * s.qdim.ln();
        shift += (e - r) as i64 * middle[r].degree().expect("homogeneous");
        items.push((s.moments, e - r));
        r = e;
    }
    let agg = aggregate(&items, k)?;
    let gamma = convention.gamma(k, agg.k_value);
    let first = class_stats(&classes[0], sd)?;
    let last = class_stats(&classes[m + 1], sd)?;
    ln_qdim += first.qdim.ln() + last.qdim.ln();

    let rot = TAU * shift as f64 / (k * n) as f64;
    let mut kernel_sum = 0.0;
    for (i, &pi) in first.law.weights().iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        let x: Vec<f64> = sd.vertex(i).raw_angles().iter().map(|a| a + rot).collect();
        for (j, &pj) in last.law.weights().iter().enumerate() {
            if pj == 0.0 {
                continue;
            }
            let y = sd.vertex(j).dual().raw_angles();
            kernel_sum += pi * pj * heat_kernel_suk(&x, &y, gamma, time, KERNEL_TOL)?.value;
        }
    }
    let v0 = vandermonde_abs_config(sd.vertex(sd.ground_index()));
    report.gamma = gamma;
    report.kernel_sum = kernel_sum;
    if kernel_sum > 0.0 {
        let ln_asym = 2.0 * v0.ln() + ln_qdim - (k as f64 - 1.0) * (n as f64).ln() + kernel_sum.ln();
        report.ln_asymptotic = Some(ln_asym);
        if !exact.count.is_zero() {
            report.ratio = Some((ln_exact - ln_asym).exp());
        }
    }
    Ok(report)
}
