//! Shannon entropy of teleportation noise and the hashing-bound solvers.

use super::bisect;
use crate::codes::entropy_term;
use crate::noise_models::NoiseFamily;
use crate::pauli_algebra::PauliDist;
use crate::postselect::Pipeline;
use crate::{Error, Result};

/// `-Σ p log₂ p` over the four Pauli outcomes.
pub fn shannon_entropy(d: &PauliDist) -> f64 {
    d.as_array().iter().map(|p| entropy_term(*p)).sum()
}

pub fn binary_entropy(p: f64) -> f64 {
    entropy_term(p) + entropy_term(1.0 - p)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HashingResult {
    pub family: NoiseFamily,
    pub p_threshold: f64,
    pub dist: PauliDist,
    pub entropy: f64,
}

fn default_bracket(family: &NoiseFamily) -> (f64, f64) {
    match family {
        NoiseFamily::Forward | NoiseFamily::Independent { .. } => (0.005, 0.08),
        _ => (0.005, 0.12),
    }
}

fn output_entropy(family: &NoiseFamily, p: f64) -> Result<f64> {
    Ok(shannon_entropy(&Pipeline::run(&family.at(p))?.output))
}

/// Noise level at which the teleportation output carries one bit of entropy.
pub fn hashing_threshold(family: &NoiseFamily, tol: f64) -> Result<HashingResult> {
    let (lo, hi) = default_bracket(family);
    hashing_threshold_in(family, lo, hi, tol)
}

pub fn hashing_threshold_in(
    family: &NoiseFamily,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<HashingResult> {
    // the solver relies on the entropy growing with the noise
    const GRID: usize = 12;
    let mut last = f64::NEG_INFINITY;
    for i in 0..=GRID {
        let p = lo + (hi - lo) * i as f64 / GRID as f64;
        let h = output_entropy(family, p)?;
        if h < last {
            return Err(Error::BracketFailure {
                lo,
                hi,
                reason: format!("entropy not monotone near p = {p}"),
            });
        }
        last = h;
    }
    let p = bisect(|p| Ok(output_entropy(family, p)? - 1.0), lo, hi, 1e-15, tol)?;
    let dist = Pipeline::run(&family.at(p))?.output;
    Ok(HashingResult {
        family: *family,
        p_threshold: p,
        dist,
        entropy: shannon_entropy(&dist),
    })
}

/// One-type reference noise for the capacity comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OneTypeKind {
    /// Phase flips only, `(1 - p, 0, 0, p)`: each sector carries half a bit.
    PhaseOnly,
    /// `(1 - 3p, p, p, p)`.
    Symmetric,
}

pub fn capacity_hashing_one_type(kind: OneTypeKind) -> Result<f64> {
    match kind {
        OneTypeKind::PhaseOnly => bisect(|p| Ok(binary_entropy(p) - 0.5), 1e-6, 0.5, 1e-15, 1e-13),
        OneTypeKind::Symmetric => bisect(
            |p| Ok(shannon_entropy(&PauliDist::new(1.0 - 3.0 * p, p, p, p)?) - 1.0),
            1e-6,
            0.2,
            1e-15,
            1e-13,
        ),
    }
}

/// Hashing threshold of depolarizing noise for each measurement-error
/// fraction `r`.
pub fn sweep_r(grid: &[f64], tol: f64) -> Vec<(f64, Result<HashingResult>)> {
    grid.iter()
        .map(|&r| {
            let res = if r < 0.0 || !r.is_finite() {
                Err(Error::InvalidParameter(format!("r = {r}")))
            } else {
                hashing_threshold(&NoiseFamily::Depolarizing { r }, tol)
            };
            (r, res)
        })
        .collect()
}
