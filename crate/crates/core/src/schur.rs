//! Schur polynomials `S_J(u) = s_{λ_J}(e^{iu_1}, …, e^{iu_k})` as ratios of
//! generalised Vandermonde determinants, plus Weyl dimensions and the
//! second-order expansion of normalised Schur ratios near `Ĩ_0`.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::configurations::{
    is_strictly_decreasing, k_functional, k_tilde, rational_to_f64, Configuration, Partition,
};
use crate::error::{Error, Result};

/// Minimal chord `|e^{iu_j} − e^{iu_j'}|` accepted before declaring `u` singular.
pub const SINGULAR_CHORD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchurValue {
    pub value: Complex64,
    /// Hadamard bound `k^{k/2}` on the numerator divided by `|a_{I_0}(u)|`;
    /// large values flag cancellation-prone evaluations.
    pub condition_estimate: f64,
}

/// `V(u) = Π_{j<j'} (e^{iu_{j'}} − e^{iu_j})`.
pub fn vandermonde(u: &[f64]) -> Complex64 {
    let x: Vec<Complex64> = u.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    let mut acc = Complex64::new(1.0, 0.0);
    for j in 0..x.len() {
        for jp in j + 1..x.len() {
            acc *= x[jp] - x[j];
        }
    }
    acc
}

/// `|V(ξ_n(I))| = 2^{k(k−1)/2} Π_{j<j'} sin(π(I_j − I_{j'})/n)`.
pub fn vandermonde_abs_config(i: &Configuration) -> f64 {
    let p = i.parts();
    let n = i.n() as f64;
    let mut acc = 1.0;
    for j in 0..p.len() {
        for jp in j + 1..p.len() {
            acc *= 2.0 * (PI * (p[j] - p[jp]) as f64 / n).sin();
        }
    }
    acc
}

/// `a_{I_0}(u) = det(e^{iu_l(k−1−m)}) = Π_{l<l'} (x_l − x_{l'})`.
fn ground_alternant(x: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for l in 0..x.len() {
        for lp in l + 1..x.len() {
            acc *= x[l] - x[lp];
        }
    }
    acc
}

fn min_chord(x: &[Complex64]) -> f64 {
    let mut m = f64::INFINITY;
    for l in 0..x.len() {
        for lp in l + 1..x.len() {
            m = m.min((x[l] - x[lp]).norm());
        }
    }
    m
}

/// `S_J(u) = a_J(u)/a_{I_0}(u)` for a strictly decreasing integer tuple `J`.
///
/// Entries of `J` may be negative or exceed `n`; the alternant is evaluated
/// directly by LU with partial pivoting.
pub fn schur_at(j: &[i64], u: &[f64]) -> Result<SchurValue> {
    let k = j.len();
    if u.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: u.len() });
    }
    if !is_strictly_decreasing(j) {
        return Err(Error::InvalidParameters(format!(
            "{j:?} is not strictly decreasing"
        )));
    }
    let x: Vec<Complex64> = u.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    if min_chord(&x) < SINGULAR_CHORD {
        return Err(Error::Singular(format!("coinciding angles in {u:?}")));
    }
    let den = ground_alternant(&x);
    let num = alternant(j, u);
    Ok(SchurValue {
        value: num / den,
        condition_estimate: (k as f64).powf(k as f64 / 2.0) / den.norm(),
    })
}

/// Shorthand for the value of [`schur_at`].
pub fn schur(j: &[i64], u: &[f64]) -> Result<Complex64> {
    schur_at(j, u).map(|s| s.value)
}

/// `a_J(u) = det(e^{i u_l J_m})`.
pub fn alternant(j: &[i64], u: &[f64]) -> Complex64 {
    let k = j.len();
    match k {
        1 => Complex64::from_polar(1.0, j[0] as f64 * u[0]),
        2 => {
            let e = |l: usize, m: usize| Complex64::from_polar(1.0, j[m] as f64 * u[l]);
            e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0)
        }
        _ => DMatrix::from_fn(k, k, |l, m| Complex64::from_polar(1.0, j[m] as f64 * u[l]))
            .lu()
            .determinant(),
    }
}

/// `d_J = Π_{i<j} (J_i − J_j)/(j − i)`, the dimension of the `U(k)` irrep.
pub fn weyl_dimension(j: &[i64]) -> BigUint {
    let k = j.len();
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for a in 0..k {
        for b in a + 1..k {
            let diff = j[a] - j[b];
            if diff <= 0 {
                return BigUint::zero();
            }
            num *= diff as u64;
            den *= (b - a) as u64;
        }
    }
    num / den
}

pub fn weyl_dimension_f64(j: &[i64]) -> f64 {
    let k = j.len();
    let mut acc = 1.0;
    for a in 0..k {
        for b in a + 1..k {
            acc *= (j[a] - j[b]) as f64 / (b - a) as f64;
        }
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticRatio {
    /// `1 − (2π)²/(2(k²−1)n²)·K(Ĩ_λ)·K(u)`.
    pub main: f64,
    /// `s_λ(e^{2πiu/n}) / s_λ(e^{2πiĨ_0/n})`.
    pub exact: Complex64,
    /// Whether `⟨λ⟩·max(‖u‖_∞, k/3) ≤ n`.
    pub in_window: bool,
}

impl AsymptoticRatio {
    pub fn error(&self) -> f64 {
        (self.exact - self.main).norm()
    }
}

/// Second-order expansion of a normalised Schur ratio.
///
/// `u` must sum to zero and `k ≥ 2`. A partition with `λ_k > 0` is accepted:
/// the factor `(x_1⋯x_k)^{λ_k}` equals one on both evaluation points.
pub fn asymptotic_schur_ratio(lambda: &Partition, u: &[f64], n: usize) -> Result<AsymptoticRatio> {
    let k = u.len();
    if k < 2 {
        return Err(Error::Domain("the expansion needs k ≥ 2".into()));
    }
    if lambda.len() > k {
        return Err(Error::InvalidParameters(format!(
            "{lambda:?} has more than {k} parts"
        )));
    }
    let total: f64 = u.iter().sum();
    if total.abs() > 1e-9 {
        return Err(Error::Domain(format!("Σu = {total}, expected 0")));
    }
    let j: Vec<i64> = lambda
        .padded(k)
        .iter()
        .enumerate()
        .map(|(i, l)| l + (k - 1 - i) as i64)
        .collect();
    let nf = n as f64;
    let half = (k as f64 - 1.0) / 2.0;
    let ground: Vec<f64> = (0..k).map(|i| TAU * (half - i as f64) / nf).collect();
    let at: Vec<f64> = u.iter().map(|v| TAU * v / nf).collect();
    let exact = schur(&j, &at)? / schur(&j, &ground)?;
    let kf = k as f64;
    let main = 1.0
        - TAU * TAU / (2.0 * (kf * kf - 1.0) * nf * nf)
            * rational_to_f64(k_tilde(&j))
            * k_functional(u);
    let sup = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let in_window = lambda.size() as f64 * sup.max(kf / 3.0) <= nf;
    Ok(AsymptoticRatio { main, exact, in_window })
}

/// `S_J(ξ_n(I))` for configurations of the same `(k, n)`.
pub fn schur_config(j: &Configuration, i: &Configuration) -> Result<Complex64> {
    schur(j.parts(), &i.raw_angles())
}

/// Exact `d_J` as `u128` when it fits.
pub fn weyl_dimension_u128(j: &[i64]) -> Option<u128> {
    weyl_dimension(j).to_u128()
}
