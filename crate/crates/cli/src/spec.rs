//! Parsing of the textual measure and class specs accepted on the command line.

use bkn::configurations::{Configuration, Partition};
use bkn::harmonic::{parse_parts, HMeasure};
use bkn::qcoh::CohomologyClass;
use bkn::spectral::SpectralData;

#[derive(Debug, thiserror::Error)]
#[error("bad spec {spec:?}: {reason}")]
pub struct SpecError {
    pub spec: String,
    pub reason: String,
}

fn bad(spec: &str, reason: impl Into<String>) -> anyhow::Error {
    SpecError { spec: spec.to_string(), reason: reason.into() }.into()
}

/// Splits a trailing `@COUNT`.
fn split_count(s: &str) -> anyhow::Result<(&str, usize)> {
    match s.rsplit_once('@') {
        Some((body, c)) => {
            let count = c.trim().parse::<usize>().map_err(|_| bad(s, "count must be a non-negative integer"))?;
            Ok((body, count))
        }
        None => Ok((s, 1)),
    }
}

/// `dirac:<parts> | uniform-neighbors:<parts> | pieri | mix:w*SPEC+…`, optionally followed by `@COUNT`.
pub fn measure(s: &str, sd: &SpectralData) -> anyhow::Result<(HMeasure, usize)> {
    let (body, count) = split_count(s)?;
    Ok((single(body.trim(), sd)?, count))
}

fn single(s: &str, sd: &SpectralData) -> anyhow::Result<HMeasure> {
    if s == "pieri" {
        let j = sd.first_step_index().ok_or_else(|| bad(s, "B_{k,n} has no Pieri step"))?;
        return Ok(HMeasure::dirac_index(j, sd));
    }
    if let Some(parts) = s.strip_prefix("dirac:") {
        let v = Configuration::from_sites(parse_parts(parts)?, sd.n())?;
        return Ok(HMeasure::dirac(&v, sd)?);
    }
    if let Some(parts) = s.strip_prefix("uniform-neighbors:") {
        let v = Configuration::from_sites(parse_parts(parts)?, sd.n())?;
        let mut w = vec![0.0; sd.len()];
        for u in v.pieri_neighbors() {
            w[sd.require_index(&u)?] = 1.0;
        }
        return Ok(HMeasure::from_unnormalized(w, sd)?);
    }
    if let Some(rest) = s.strip_prefix("mix:") {
        let mut acc = vec![0.0; sd.len()];
        for term in rest.split('+') {
            let (w, inner) = term.split_once('*').ok_or_else(|| bad(s, "mixture terms look like w*SPEC"))?;
            let w: f64 = w.trim().parse().map_err(|_| bad(s, format!("bad weight {w:?}")))?;
            if !(w >= 0.0) {
                return Err(bad(s, "weights must be non-negative"));
            }
            let mu = single(inner.trim(), sd)?;
            for (a, b) in acc.iter_mut().zip(mu.weights()) {
                *a += w * b;
            }
        }
        return Ok(HMeasure::from_unnormalized(acc, sd)?);
    }
    Err(bad(s, "expected dirac:<parts>, uniform-neighbors:<parts>, pieri or mix:…"))
}

/// `<parts>[@COUNT]` as a Schubert class.
pub fn class(s: &str, k: usize, n: usize) -> anyhow::Result<(CohomologyClass, usize)> {
    let (body, count) = split_count(s)?;
    let lambda = Partition::new(parse_parts(body)?)?;
    Ok((CohomologyClass::schubert(&lambda, k, n)?, count))
}

/// End classes `σ_λ, σ_λ` and the smallest degree making
/// `2|λ| + m = k(n−k) + dn` solvable, with `λ` as close to rectangular as possible.
pub fn balanced_ends(k: usize, n: usize, m: usize) -> anyhow::Result<(CohomologyClass, CohomologyClass, u32)> {
    let dim = (k * (n - k)) as i64;
    let (n_i, m_i) = (n as i64, m as i64);
    let mut d = ((m_i - dim).max(0) + n_i - 1) / n_i;
    loop {
        let s = dim + d * n_i - m_i;
        if s > 2 * dim {
            return Err(bad(&format!("k={k},n={n},m={m}"), "no balanced end classes"));
        }
        if s >= 0 && s % 2 == 0 {
            let size = s / 2;
            let (q, r) = (size / k as i64, size % k as i64);
            let parts: Vec<i64> = (0..k as i64).map(|i| q + i64::from(i < r)).collect();
            let lambda = Partition::new(parts)?;
            let c = CohomologyClass::schubert(&lambda, k, n)?;
            return Ok((c.clone(), c, d as u32));
        }
        d += 1;
    }
}
