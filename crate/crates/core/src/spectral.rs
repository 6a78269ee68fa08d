//! Closed-form eigendata of `B_{k,n}` and the operators built from it.
//!
//! Column `I` of the table `T[J, I] = S_J(ξ_n(I))` is, after conjugation, the
//! common eigenvector `w^{(I)}` of every `A_J`, with eigenvalue `S_J(ξ_n(I))`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configurations::{binomial, enumerate, Configuration};
use crate::error::{Error, Result};
use crate::schur::{alternant, vandermonde_abs_config};
use crate::{EPS_NUM, ROUNDING_TOL};

pub const DEFAULT_CAP: usize = 5000;
pub const CACHE_FORMAT_VERSION: u32 = 1;
/// Environment variable overriding the spectral cache directory.
pub const CACHE_DIR_ENV: &str = "BKN_CACHE_DIR";

/// Above this many vertices the build-time orthogonality check samples columns.
const FULL_CHECK_LIMIT: usize = 1000;

#[derive(Clone, Debug)]
pub struct SpectralData {
    k: usize,
    n: usize,
    vertices: Vec<Configuration>,
    index: HashMap<Configuration, usize>,
    s_table: DMatrix<Complex64>,
    vmod: Vec<f64>,
    mu_h: Vec<f64>,
    h_l: Vec<f64>,
    h_r: Vec<f64>,
}

impl SpectralData {
    pub fn build(k: usize, n: usize) -> Result<Self> {
        Self::build_with_cap(k, n, DEFAULT_CAP)
    }

    pub fn build_with_cap(k: usize, n: usize, cap: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParameters(format!(
                "need 1 ≤ k ≤ n, got k={k}, n={n}"
            )));
        }
        let count = binomial(n, k);
        if count > cap as u128 {
            return Err(Error::TooLarge { k, n, count, cap });
        }
        let vertices = enumerate(k, n)?;
        let size = vertices.len();
        let angles: Vec<Vec<f64>> = vertices.iter().map(|v| v.raw_angles()).collect();
        let columns: Vec<Vec<Complex64>> = angles
            .par_iter()
            .map(|u| {
                let x: Vec<Complex64> = u.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
                let mut den = Complex64::new(1.0, 0.0);
                for l in 0..k {
                    for lp in l + 1..k {
                        den *= x[l] - x[lp];
                    }
                }
                vertices.iter().map(|j| alternant(j.parts(), u) / den).collect()
            })
            .collect();
        let s_table = DMatrix::from_fn(size, size, |j, i| columns[i][j]);
        let vmod: Vec<f64> = vertices.iter().map(vandermonde_abs_config).collect();
        Self::assemble(k, n, vertices, s_table, vmod)
    }

    fn assemble(
        k: usize,
        n: usize,
        vertices: Vec<Configuration>,
        s_table: DMatrix<Complex64>,
        vmod: Vec<f64>,
    ) -> Result<Self> {
        let nk = (n as f64).powi(k as i32);
        let v0 = vmod[0];
        let mu_h = vmod.iter().map(|v| v * v / nk).collect();
        let h_r = vmod.iter().map(|v| v0 * v / nk).collect();
        let h_l = (0..vertices.len()).map(|i| s_table[(i, 0)].re).collect();
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let sd = Self { k, n, vertices, index, s_table, vmod, mu_h, h_l, h_r };
        sd.verify()?;
        Ok(sd)
    }

    /// Perron identities and orthogonality; fails fast on numerical trouble.
    pub fn verify(&self) -> Result<()> {
        let total: f64 = self.mu_h.iter().sum();
        if (total - 1.0).abs() > EPS_NUM {
            return Err(Error::Numerical(format!("Σ μ^h = {total}")));
        }
        if (self.h_l[0] - 1.0).abs() > EPS_NUM {
            return Err(Error::Numerical(format!("h_l(I_0) = {}", self.h_l[0])));
        }
        let pairing: f64 = self.h_l.iter().zip(&self.h_r).map(|(a, b)| a * b).sum();
        if (pairing - 1.0).abs() > EPS_NUM {
            return Err(Error::Numerical(format!("⟨h_l, h_r⟩ = {pairing}")));
        }
        for i in 0..self.len() {
            if (self.h_l[i] * self.h_r[i] - self.mu_h[i]).abs() > EPS_NUM {
                return Err(Error::Numerical(format!(
                    "h_l·h_r ≠ μ^h at {:?}",
                    self.vertices[i]
                )));
            }
        }
        let cols: Vec<usize> = if self.len() <= FULL_CHECK_LIMIT {
            (0..self.len()).collect()
        } else {
            let step = self.len() / 64;
            (0..64).map(|i| i * step).collect()
        };
        let dev = self.orthogonality_residual_on(&cols);
        if dev > 1e-8 {
            return Err(Error::Numerical(format!(
                "orthogonality residual {dev:e} on build"
            )));
        }
        Ok(())
    }

    /// `max |Σ_J S_J(ξ(I)) conj S_J(ξ(I')) · √(μ^h(I)μ^h(I')) − δ_{II'}|`.
    ///
    /// The scaling turns the relation `Σ_J … = δ n^k/|V(ξ(I))|²` into an
    /// identity between numbers of order one.
    pub fn orthogonality_residual(&self) -> f64 {
        let all: Vec<usize> = (0..self.len()).collect();
        self.orthogonality_residual_on(&all)
    }

    fn orthogonality_residual_on(&self, cols: &[usize]) -> f64 {
        let size = self.len();
        cols.par_iter()
            .map(|&i| {
                let mut worst = 0.0f64;
                for ip in 0..size {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..size {
                        acc += self.s_table[(j, i)] * self.s_table[(j, ip)].conj();
                    }
                    acc *= (self.mu_h[i] * self.mu_h[ip]).sqrt();
                    let target = if i == ip { 1.0 } else { 0.0 };
                    worst = worst.max((acc - target).norm());
                }
                worst
            })
            .reduce(|| 0.0, f64::max)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vertices `C(n, k)`.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Configuration] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Configuration {
        &self.vertices[i]
    }

    pub fn index_of(&self, c: &Configuration) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn require_index(&self, c: &Configuration) -> Result<usize> {
        self.index_of(c).ok_or_else(|| Error::InvalidConfiguration {
            parts: c.parts().to_vec(),
            k: self.k,
            n: self.n,
        })
    }

    /// Index of `I_0` (always 0 in the canonical order).
    pub fn ground_index(&self) -> usize {
        0
    }

    /// Index of `I_1`, if `k < n`.
    pub fn first_step_index(&self) -> Option<usize> {
        Configuration::first_step(self.k, self.n)
            .ok()
            .and_then(|c| self.index_of(&c))
    }

    /// `S_J(ξ_n(I))` by indices.
    pub fn s(&self, j: usize, i: usize) -> Complex64 {
        self.s_table[(j, i)]
    }

    pub fn s_table(&self) -> &DMatrix<Complex64> {
        &self.s_table
    }

    /// `|V(ξ_n(I))|`.
    pub fn vmod(&self) -> &[f64] {
        &self.vmod
    }

    /// `μ^h(I) = |V(ξ_n(I))|²/n^k`.
    pub fn mu_h(&self) -> &[f64] {
        &self.mu_h
    }

    /// `h_l(I) = S_I(ξ_n(I_0))`.
    pub fn h_l(&self) -> &[f64] {
        &self.h_l
    }

    /// `h_r(I) = |V(ξ_n(I_0))|·|V(ξ_n(I))|/n^k`.
    pub fn h_r(&self) -> &[f64] {
        &self.h_r
    }

    /// `w^{(I)} = Σ_J conj S_J(ξ_n(I)) e_J`.
    pub fn w(&self, i: usize) -> Vec<Complex64> {
        (0..self.len()).map(|j| self.s_table[(j, i)].conj()).collect()
    }

    /// `u^{(I)} = (|V(ξ_n(I))|²/n^k)·w^{(I)}`, the dual basis of the `w^{(I)}`.
    pub fn u(&self, i: usize) -> Vec<Complex64> {
        let m = self.mu_h[i];
        self.w(i).into_iter().map(|z| z * m).collect()
    }

    /// `S_J(ξ_n(I_0))`, the Perron–Frobenius eigenvalue of `A_J`.
    pub fn perron_eigenvalue(&self, j: usize) -> f64 {
        self.s_table[(j, 0)].re
    }

    /// `A_J` synthesised spectrally, before rounding:
    /// `(A_J)_{I',I} = Σ_L S_J(ξ(L)) S_I(ξ(L)) u^{(L)}(I')`.
    pub fn adjacency_raw(&self, j: usize) -> DMatrix<Complex64> {
        let size = self.len();
        let conj = self.s_table.map(|z| z.conj());
        let mut right = self.s_table.transpose();
        for l in 0..size {
            let d = self.s_table[(j, l)] * self.mu_h[l];
            right.row_mut(l).iter_mut().for_each(|z| *z *= d);
        }
        conj * right
    }

    /// `A_J` with entries rounded to the quantum Littlewood–Richardson integers.
    pub fn adjacency(&self, j: usize) -> Result<DMatrix<f64>> {
        let raw = self.adjacency_raw(j);
        let mut out = DMatrix::zeros(raw.nrows(), raw.ncols());
        for c in 0..raw.ncols() {
            for r in 0..raw.nrows() {
                out[(r, c)] = round_structure_constant(raw[(r, c)]).map_err(|res| {
                    Error::Numerical(format!(
                        "A_{:?} entry ({:?}, {:?}) = {} off an integer by {res:e}",
                        self.vertices[j], self.vertices[r], self.vertices[c], raw[(r, c)]
                    ))
                })? as f64;
            }
        }
        Ok(out)
    }

    /// `P^J = diag(1/h_r)·A_J·diag(h_r) / S_J(ξ_n(I_0))`.
    pub fn markov_kernel(&self, j: usize) -> Result<MarkovKernel> {
        let a = self.adjacency(j)?;
        let lambda = self.perron_eigenvalue(j);
        let size = self.len();
        let matrix = DMatrix::from_fn(size, size, |r, c| {
            a[(r, c)] * self.h_r[c] / (self.h_r[r] * lambda)
        });
        let kernel = MarkovKernel { matrix, label: self.vertices[j].clone() };
        let dev = kernel.row_sum_deviation();
        if dev > EPS_NUM {
            return Err(Error::Numerical(format!(
                "P^{:?} rows deviate from 1 by {dev:e}",
                self.vertices[j]
            )));
        }
        Ok(kernel)
    }

    /// Serialises to the versioned JSON cache format.
    pub fn to_cache(&self) -> CacheFile {
        let size = self.len();
        let mut s_table = Vec::with_capacity(size * size);
        for j in 0..size {
            for i in 0..size {
                let z = self.s_table[(j, i)];
                s_table.push([z.re, z.im]);
            }
        }
        CacheFile {
            format_version: CACHE_FORMAT_VERSION,
            k: self.k,
            n: self.n,
            vertices: self.vertices.iter().map(|v| v.parts().to_vec()).collect(),
            s_table,
            vmod: self.vmod.clone(),
            mu_h: self.mu_h.clone(),
            h_l: self.h_l.clone(),
            h_r: self.h_r.clone(),
        }
    }

    /// Rebuilds from a cache file, validating version, vertex set and invariants.
    pub fn from_cache(file: CacheFile) -> Result<Self> {
        if file.format_version != CACHE_FORMAT_VERSION {
            return Err(Error::Consistency(format!(
                "cache format version {} (expected {CACHE_FORMAT_VERSION})",
                file.format_version
            )));
        }
        let vertices = enumerate(file.k, file.n)?;
        let listed: Vec<Vec<i64>> = vertices.iter().map(|v| v.parts().to_vec()).collect();
        if listed != file.vertices {
            return Err(Error::Consistency("cached vertex list differs".into()));
        }
        let size = vertices.len();
        if file.s_table.len() != size * size {
            return Err(Error::DimensionMismatch { expected: size * size, got: file.s_table.len() });
        }
        let s_table = DMatrix::from_fn(size, size, |j, i| {
            let [re, im] = file.s_table[j * size + i];
            Complex64::new(re, im)
        });
        let sd = Self::assemble(file.k, file.n, vertices, s_table, file.vmod)?;
        let same = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= EPS_NUM);
        if !same(&sd.mu_h, &file.mu_h) || !same(&sd.h_l, &file.h_l) || !same(&sd.h_r, &file.h_r) {
            return Err(Error::Consistency("cached Perron data inconsistent".into()));
        }
        Ok(sd)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), &self.to_cache())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let cache: CacheFile = serde_json::from_reader(std::io::BufReader::new(file))?;
        Self::from_cache(cache)
    }

    /// Loads `(k, n)` from the cache directory, building and storing it on a miss.
    pub fn load_or_build(k: usize, n: usize, dir: &Path) -> Result<Self> {
        let path = cache_path(dir, k, n);
        if path.exists() {
            if let Ok(sd) = Self::load(&path) {
                return Ok(sd);
            }
        }
        let sd = Self::build(k, n)?;
        sd.save(&path)?;
        Ok(sd)
    }
}

/// On-disk representation; complex numbers are `[re, im]` pairs, the table is
/// row-major in `(J, I)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheFile {
    pub format_version: u32,
    pub k: usize,
    pub n: usize,
    pub vertices: Vec<Vec<i64>>,
    pub s_table: Vec<[f64; 2]>,
    pub vmod: Vec<f64>,
    pub mu_h: Vec<f64>,
    pub h_l: Vec<f64>,
    pub h_r: Vec<f64>,
}

pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".bkn-cache"))
}

pub fn cache_path(dir: &Path, k: usize, n: usize) -> PathBuf {
    dir.join(format!("v{CACHE_FORMAT_VERSION}"))
        .join(format!("spectral_k{k}_n{n}.json"))
}

/// Rounds a synthesised structure constant; `Err` carries the residual.
///
/// Values in `[−1e−6, 0]` are clamped to zero; anything further from a
/// nonnegative integer is rejected.
pub fn round_structure_constant(z: Complex64) -> std::result::Result<u64, f64> {
    let r = z.re.round();
    let res = (z.re - r).abs().max(z.im.abs());
    if res > ROUNDING_TOL || r < 0.0 {
        return Err(res.max(-r));
    }
    Ok(r as u64)
}

/// A row-stochastic matrix over the vertex set; `P[I', I]` is the weight the
/// row of `I'` puts on `I`.
#[derive(Clone, Debug)]
pub struct MarkovKernel {
    pub matrix: DMatrix<f64>,
    pub label: Configuration,
}

impl MarkovKernel {
    pub fn row_sum_deviation(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Time reversal with respect to `μ^h`: `Q[I, I'] = μ^h(I')P[I', I]/μ^h(I)`.
    ///
    /// For `J = I_1`, rows of `P` step backwards along edges; rows of the
    /// reversal step forwards.
    pub fn reversed(&self, mu_h: &[f64]) -> MarkovKernel {
        let size = self.matrix.nrows();
        let matrix = DMatrix::from_fn(size, size, |r, c| {
            mu_h[c] * self.matrix[(c, r)] / mu_h[r]
        });
        MarkovKernel { matrix, label: self.label.clone() }
    }

    /// `‖μ P − μ‖_∞` for a row vector `μ`.
    pub fn stationarity_residual(&self, mu: &[f64]) -> f64 {
        let size = self.matrix.nrows();
        (0..size)
            .map(|c| {
                let acc: f64 = (0..size).map(|r| mu[r] * self.matrix[(r, c)]).sum();
                (acc - mu[c]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// A trajectory drawn from the rows of `kernel`, reproducible from `seed`.
pub fn sample_path(
    kernel: &MarkovKernel,
    sd: &SpectralData,
    start: &Configuration,
    steps: usize,
    seed: u64,
) -> Result<Vec<Configuration>> {
    Ok(sample_indices(kernel, sd.require_index(start)?, steps, seed)?
        .into_iter()
        .map(|i| sd.vertex(i).clone())
        .collect())
}

/// Index form of [`sample_path`].
pub fn sample_indices(
    kernel: &MarkovKernel,
    start: usize,
    steps: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    let size = kernel.matrix.nrows();
    if start >= size {
        return Err(Error::DimensionMismatch { expected: size, got: start });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: HashMap<usize, WeightedIndex<f64>> = HashMap::new();
    let mut path = Vec::with_capacity(steps + 1);
    let mut cur = start;
    path.push(cur);
    for _ in 0..steps {
        let dist = match rows.get(&cur) {
            Some(d) => d,
            None => {
                let w: Vec<f64> = kernel.matrix.row(cur).iter().map(|v| v.max(0.0)).collect();
                let d = WeightedIndex::new(w)
                    .map_err(|e| Error::Numerical(format!("row {cur}: {e}")))?;
                rows.entry(cur).or_insert(d)
            }
        };
        cur = dist.sample(&mut rng);
        path.push(cur);
    }
    Ok(path)
}

/// `|Σ_{a=1}^k e^{2iπ(k+1−a)/n}|`, the modulus of the closed form quoted for
/// the Perron eigenvalue of the single-box operator.
pub fn quoted_perron_modulus(k: usize, n: usize) -> f64 {
    (1..=k)
        .map(|a| Complex64::from_polar(1.0, std::f64::consts::TAU * (k + 1 - a) as f64 / n as f64))
        .sum::<Complex64>()
        .norm()
}
