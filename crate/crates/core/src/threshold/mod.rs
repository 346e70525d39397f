//! Threshold estimates: hashing bounds, Monte Carlo concatenation, entropy
//! matching for the [[23,1,7]] code, fixed-fidelity points and overhead.

mod analysis;
mod hashing;
mod montecarlo;

pub use analysis::{
    convergence_delta, corrected_first_level_fidelity, crash_difference_threshold, crash_gap,
    entropy_equivalent_p, entropy_match_threshold, first_level_entropy, fixed_fidelity_point,
    forward_calibration, overhead_estimate, Calibration, FixedFidelity, OverheadEstimate, ALPHA,
    REPORTED_CONVERGENCE_RATE, REPORTED_OVERHEAD_COEFFICIENT,
};
pub use hashing::{
    binary_entropy, capacity_hashing_one_type, hashing_threshold, hashing_threshold_in,
    shannon_entropy, sweep_r, HashingResult, OneTypeKind,
};
pub use montecarlo::{
    concat_threshold_mc, run_population, ConcatNoise, McConfig, McEstimate, PopulationRun, Verdict,
};

use crate::{Error, Result};

/// Bisection on a sign change of `f` over `[lo, hi]`. Stops when
/// `|f(mid)| < f_tol` or the bracket is narrower than `x_tol`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, x_tol: f64, f_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::BracketFailure {
            lo,
            hi,
            reason: format!("no sign change ({f_lo:e}, {f_hi:e})"),
        });
    }
    let lo_negative = f_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.abs() < f_tol || hi - lo < x_tol {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
