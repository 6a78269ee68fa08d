//! Heat kernels of the unitary Dyson Brownian motion on `T_k`.
//!
//! Kernels are evaluated by their character series
//! `Σ_J e^{−κ_{α,γ}(J)t} conj(S_J(u)) S_J(v)`, summed shell by shell in
//! `L = J_1` (with `J_k = 0`) until a rigorous bound on the dropped terms falls
//! below the requested tolerance. Kernels are densities with respect to the
//! Weyl measure `|V(v)|² dv/(k!(2π)^k)` on `[0, 2π)^k` (restricted to the slice
//! `Σv ≡ Σu` for `SU(k)`).

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::configurations::{ground_centered_norm_sq, ground_parts, k_tilde, rational_to_f64};
use crate::error::{Error, Result};
use crate::schur::{alternant, vandermonde, SINGULAR_CHORD};

/// Largest shell index `L = J_1` explored before giving up.
pub const MAX_SHELL: i64 = 4000;

/// Tolerance used when testing `Σu ≡ Σv (mod 2π)`.
pub const CONGRUENCE_TOL: f64 = 1e-9;

/// `κ_{α,γ}(J) = (γ/k)K(J̃) + (α/k²)(⟨J⟩ − ⟨I_0⟩)²`.
pub fn kappa(j: &[i64], alpha: f64, gamma: f64) -> f64 {
    let k = j.len() as f64;
    let shift = (j.iter().sum::<i64>() - ground_parts(j.len()).iter().sum::<i64>()) as f64;
    gamma / k * rational_to_f64(k_tilde(j)) + alpha / (k * k) * shift * shift
}

/// `κ(J) = κ_{k,k}(J) = K(J̃) + (⟨J⟩ − ⟨I_0⟩)²/k`.
pub fn kappa_unitary(j: &[i64]) -> f64 {
    let k = j.len() as f64;
    kappa(j, k, k)
}

/// Diffusion parameters `(α, γ)` and time `t`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct HeatParams {
    pub alpha: f64,
    pub gamma: f64,
    pub t: f64,
}

impl HeatParams {
    pub fn new(alpha: f64, gamma: f64, t: f64) -> Result<Self> {
        let ok = alpha >= 0.0 && gamma >= 0.0 && alpha + gamma > 0.0 && t > 0.0;
        if !ok || !(alpha.is_finite() && gamma.is_finite() && t.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "need α, γ ≥ 0 not both zero and t > 0; got α={alpha}, γ={gamma}, t={t}"
            )));
        }
        Ok(Self { alpha, gamma, t })
    }
}

/// `e^{−κ_{α,γ}(J)t}`, the Fourier multiplier of the Dyson Brownian motion.
pub fn dyson_fourier_multiplier(j: &[i64], params: &HeatParams) -> f64 {
    (-kappa(j, params.alpha, params.gamma) * params.t).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct KernelEvaluation {
    pub value: f64,
    /// Last shell `L = J_1` included in the sum.
    pub truncation_radius: i64,
    /// Rigorous bound on the absolute value of all dropped terms.
    pub tail_bound: f64,
}

/// Decreasing tuples `(L, j_2, …, j_{k−1}, 0)`, i.e. the `J_k = 0` shell at `J_1 = L`.
pub fn shell(k: usize, l: i64) -> Vec<Vec<i64>> {
    match k {
        0 => Vec::new(),
        1 => {
            if l == 0 {
                vec![vec![0]]
            } else {
                Vec::new()
            }
        }
        _ => {
            if l < k as i64 - 1 {
                return Vec::new();
            }
            let mut out = Vec::new();
            let mut middle = Vec::with_capacity(k - 2);
            fill_middle(k - 2, l - 1, &mut middle, &mut |m| {
                let mut j = Vec::with_capacity(k);
                j.push(l);
                j.extend_from_slice(m);
                j.push(0);
                out.push(j);
            });
            out
        }
    }
}

/// Visits all strictly decreasing `count`-tuples with entries in `[1, top]`.
fn fill_middle(count: usize, top: i64, cur: &mut Vec<i64>, visit: &mut dyn FnMut(&[i64])) {
    if cur.len() == count {
        visit(cur);
        return;
    }
    let remaining = (count - cur.len()) as i64;
    let hi = cur.last().map_or(top, |&x| x - 1);
    for v in (remaining..=hi).rev() {
        cur.push(v);
        fill_middle(count, top, cur, visit);
        cur.pop();
    }
}

/// Bound on `Σ_{J ∈ shell(L)} d_J² e^{−rate·K(J̃)}` using `|shell| ≤ L^{k−2}`,
/// `d_J ≤ L^{k(k−1)/2}` and `K(J̃) ≥ L²/2 − ‖Ĩ_0‖²`.
fn shell_bound(k: usize, l: i64, rate: f64) -> f64 {
    let lf = l as f64;
    let g = rational_to_f64(ground_centered_norm_sq(k));
    let power = (k - 2) as f64 + (k * (k - 1)) as f64;
    (power * lf.ln() - rate * (lf * lf / 2.0 - g)).exp()
}

/// Tail `Σ_{L' > L} shell_bound(L')`, or `None` while the bound is not yet
/// geometrically decaying with ratio ≤ 1/2.
fn tail_after(k: usize, l: i64, rate: f64) -> Option<f64> {
    let first = shell_bound(k, l + 1, rate);
    let ratio = shell_bound(k, l + 2, rate) / first;
    // ratios of consecutive bounds decrease in L, so this is a geometric majorant
    (ratio <= 0.5).then(|| first / (1.0 - ratio))
}

fn check_angles(u: &[f64], v: &[f64]) -> Result<usize> {
    let k = u.len();
    if k == 0 {
        return Err(Error::InvalidParameters("empty angle vector".into()));
    }
    if v.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: v.len() });
    }
    Ok(k)
}

fn ground_alternant(u: &[f64]) -> Result<Complex64> {
    let a = alternant(&ground_parts(u.len()), u);
    if a.norm() < SINGULAR_CHORD {
        return Err(Error::Singular(format!("coinciding angles in {u:?}")));
    }
    Ok(a)
}

/// `Σu ≡ Σv (mod 2π)`.
pub fn totals_congruent(u: &[f64], v: &[f64]) -> bool {
    let d = (v.iter().sum::<f64>() - u.iter().sum::<f64>()).rem_euclid(TAU);
    d.min(TAU - d) <= CONGRUENCE_TOL
}

/// Sum over `J_k = 0` of `weight(J) · conj S_J(u) S_J(v)`, where
/// `|weight(J)| ≤ factor·e^{−rate·K(J̃)}`, truncated with a certified tail.
fn shell_series(
    u: &[f64],
    v: &[f64],
    rate: f64,
    factor: f64,
    tol: f64,
    weight: &dyn Fn(&[i64]) -> Complex64,
) -> Result<KernelEvaluation> {
    let k = u.len();
    let du = ground_alternant(u)?;
    let dv = ground_alternant(v)?;
    let term = |j: &[i64]| (alternant(j, u) / du).conj() * (alternant(j, v) / dv) * weight(j);
    if k == 1 {
        return Ok(KernelEvaluation { value: term(&[0]).re, truncation_radius: 0, tail_bound: 0.0 });
    }
    if rate <= 0.0 {
        return Err(Error::InvalidParameters("γt must be positive".into()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut last_tail = f64::INFINITY;
    let mut l = k as i64 - 1;
    while l <= MAX_SHELL {
        for j in shell(k, l) {
            acc += term(&j);
        }
        if let Some(tail) = tail_after(k, l, rate) {
            last_tail = factor * tail;
            if last_tail <= tol {
                return Ok(KernelEvaluation { value: acc.re, truncation_radius: l, tail_bound: last_tail });
            }
        }
        l += 1;
    }
    Err(Error::Truncation { achieved: last_tail, tol })
}

/// Same series cut at a fixed radius, without a tail estimate.
fn shell_series_radius(
    u: &[f64],
    v: &[f64],
    radius: i64,
    weight: &dyn Fn(&[i64]) -> Complex64,
) -> Result<Complex64> {
    let k = u.len();
    let du = ground_alternant(u)?;
    let dv = ground_alternant(v)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 0..=radius {
        for j in shell(k, l) {
            acc += (alternant(&j, u) / du).conj() * (alternant(&j, v) / dv) * weight(&j);
        }
    }
    Ok(acc)
}

/// `K^{SU(k),γ}_t(u, v) = Σ_{J_k=0} e^{−γtK(J̃)/k} conj(S_J(u)) S_J(v)`.
///
/// The kernel is supported on `Σv ≡ Σu (mod 2π)`; off that slice the value is 0.
pub fn heat_kernel_suk(u: &[f64], v: &[f64], gamma: f64, t: f64, tol: f64) -> Result<KernelEvaluation> {
    let k = check_angles(u, v)?;
    if !(gamma * t > 0.0) && k > 1 {
        return Err(Error::InvalidParameters(format!("need γt > 0, got γ={gamma}, t={t}")));
    }
    if !totals_congruent(u, v) {
        return Ok(KernelEvaluation { value: 0.0, truncation_radius: 0, tail_bound: 0.0 });
    }
    let rate = gamma * t / k as f64;
    shell_series(u, v, rate, 1.0, tol, &|j| {
        Complex64::new((-kappa(j, 0.0, gamma) * t).exp(), 0.0)
    })
}

/// [`heat_kernel_suk`] summed over the shells `L ≤ radius` only.
pub fn heat_kernel_suk_at_radius(u: &[f64], v: &[f64], gamma: f64, t: f64, radius: i64) -> Result<f64> {
    check_angles(u, v)?;
    if !totals_congruent(u, v) {
        return Ok(0.0);
    }
    Ok(shell_series_radius(u, v, radius, &|j| {
        Complex64::new((-kappa(j, 0.0, gamma) * t).exp(), 0.0)
    })?
    .re)
}

/// `Σ_{ℓ∈Z} e^{−a(ℓ + c)²} e^{iℓφ}`, summed to relative accuracy far below 1e−16.
fn gaussian_theta(a: f64, c: f64, phi: f64) -> Complex64 {
    let reach = (40.0 / a).sqrt() + 1.0;
    let lo = (-c - reach).floor() as i64;
    let hi = (-c + reach).ceil() as i64;
    (lo..=hi)
        .map(|l| {
            let x = l as f64 + c;
            Complex64::from_polar((-a * x * x).exp(), l as f64 * phi)
        })
        .sum()
}

/// `K^{U(k),α,γ}_t(u, v) = Σ_{J∈B_k} e^{−κ_{α,γ}(J)t} conj(S_J(u)) S_J(v)`.
///
/// Writing `J = Ĵ + ℓ·1` with `Ĵ_k = 0`, the sum over `ℓ` is a Gaussian theta
/// series evaluated in closed range; the outer sum over `Ĵ` is truncated by shells.
pub fn heat_kernel_uk(u: &[f64], v: &[f64], params: &HeatParams, tol: f64) -> Result<KernelEvaluation> {
    let k = check_angles(u, v)?;
    let HeatParams { alpha, gamma, t } = *params;
    if !(alpha > 0.0) || (k > 1 && !(gamma > 0.0)) {
        return Err(Error::InvalidParameters(format!(
            "the U(k) kernel needs α, γ > 0; got α={alpha}, γ={gamma}"
        )));
    }
    let a = alpha * t;
    let phi = v.iter().sum::<f64>() - u.iter().sum::<f64>();
    let ground: i64 = ground_parts(k).iter().sum();
    let kf = k as f64;
    // |θ| ≤ 1 + √(π/(αt)) uniformly in the shift
    let factor = 1.0 + (PI / a).sqrt();
    shell_series(u, v, gamma * t / kf, factor, tol, &|j| {
        let shift = (j.iter().sum::<i64>() - ground) as f64 / kf;
        let radial = (-gamma / kf * rational_to_f64(k_tilde(j)) * t).exp();
        gaussian_theta(a, shift, phi) * radial
    })
}

/// `P_t(x, y) = √(k/(2πt)) Σ_ℓ (−1)^{ℓ(k+1)} e^{−k(y−x+2πℓ)²/(2t)}`, `|ℓ| ≤ terms`.
pub fn wrapped_gaussian(x: f64, y: f64, t: f64, k: usize, terms: u32) -> f64 {
    let kf = k as f64;
    let terms = terms as i64;
    let s: f64 = (-terms..=terms)
        .map(|l| {
            let sign = if (l * (k as i64 + 1)).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let d = y - x + TAU * l as f64;
            sign * (-kf * d * d / (2.0 * t)).exp()
        })
        .sum();
    (kf / (TAU * t)).sqrt() * s
}

/// `Δ(x) = Π_{i<j} 2 sin((x_i − x_j)/2)`: `±|V(x)|`, alternating under
/// permutations and under `x_i ↦ x_i + 2π` exactly as the rows of `det P_t`.
fn signed_chords(x: &[f64]) -> f64 {
    let mut acc = 1.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            acc *= 2.0 * ((x[i] - x[j]) / 2.0).sin();
        }
    }
    acc
}

/// `Δ(v)/Δ(u) · det(P_t(u_i, v_j))` with `|Δ| = |V|`, the `(α, γ) = (1, 1)`
/// kernel as a density with respect to Lebesgue measure on the ordered alcove.
/// The signed chord products make the value independent of how `u` and `v`
/// are ordered.
pub fn determinantal_kernel_11(u: &[f64], v: &[f64], t: f64, theta_terms: u32) -> Result<f64> {
    let k = check_angles(u, v)?;
    if !(t > 0.0) || theta_terms == 0 {
        return Err(Error::InvalidParameters(format!("need t > 0 and θ-terms ≥ 1; got {t}, {theta_terms}")));
    }
    let vu = signed_chords(u);
    if vu.abs() < SINGULAR_CHORD {
        return Err(Error::Singular(format!("|V(u)| = {vu:e}; use the series kernel")));
    }
    let m = nalgebra::DMatrix::from_fn(k, k, |i, j| wrapped_gaussian(u[i], v[j], t, k, theta_terms));
    Ok(signed_chords(v) / vu * m.determinant())
}

/// The determinantal kernel converted to the normalisation of
/// [`heat_kernel_uk`] at `(α, γ) = (1, 1)`:
/// `e^{‖Ĩ_0‖² t/k} (2π)^k/|V(v)|² · det-kernel(u, v, 2t)`.
pub fn determinantal_as_series(u: &[f64], v: &[f64], t: f64, theta_terms: u32) -> Result<f64> {
    let k = check_angles(u, v)?;
    let vv = vandermonde(v).norm_sqr();
    if vv < SINGULAR_CHORD {
        return Err(Error::Singular("target point has coinciding angles".into()));
    }
    let g = rational_to_f64(ground_centered_norm_sq(k));
    let det = determinantal_kernel_11(u, v, 2.0 * t, theta_terms)?;
    Ok((g * t / k as f64).exp() * TAU.powi(k as i32) / vv * det)
}

/// `(1/k!) ⨍ f(v)|V(v)|² ` over the slice `Σv = total`, by the tensor trapezoid
/// rule with `points` nodes per free angle `v_1, …, v_{k−1}` on `[0, 2π)`.
///
/// With this normalisation the `SU(k)` heat kernel integrates to one. The rule
/// is spectrally accurate for the trigonometric integrands arising here.
pub fn slice_quadrature<F>(k: usize, total: f64, points: usize, f: F) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    if k == 1 {
        return f(&[total]);
    }
    let free = k - 1;
    let h = TAU / points as f64;
    let mut idx = vec![0usize; free];
    let mut v = vec![0.0; k];
    let mut acc = 0.0;
    loop {
        let mut s = 0.0;
        for (slot, &i) in v.iter_mut().zip(&idx) {
            *slot = i as f64 * h + 0.5 * h;
            s += *slot;
        }
        v[k - 1] = total - s;
        let w = vandermonde(&v).norm_sqr();
        if w > 1e-24 {
            acc += f(&v) * w;
        }
        // odometer over the grid
        let mut d = 0;
        while d < free {
            idx[d] += 1;
            if idx[d] < points {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == free {
            break;
        }
    }
    let factorial: f64 = (1..=k).map(|x| x as f64).product();
    acc / (points as f64).powi(free as i32) / factorial
}
