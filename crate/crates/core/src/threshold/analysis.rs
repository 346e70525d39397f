//! First-level analysis for the larger codes: entropy matching against a
//! forward-noise calibration, crash-probability differences, fixed-fidelity
//! points and the overhead and convergence estimates.

use super::{binary_entropy, bisect, shannon_entropy};
use crate::codes::{
    block_table_713, crash_poly, degeneracy_correction, golay, Code, DegeneracyCase,
};
use crate::noise_models::NoiseFamily;
use crate::pauli_algebra::PauliDist;
use crate::postselect::Pipeline;
use crate::{Error, Result};

/// `log₂ log₂ e`.
pub const ALPHA: f64 = 0.528_766_372_944_897_6;
/// Observed per-level rate of entropy convergence, kept as reference data.
pub const REPORTED_CONVERGENCE_RATE: f64 = 0.766;
/// Reported coefficient of `N` in the overhead exponent, kept as reference data.
pub const REPORTED_OVERHEAD_COEFFICIENT: f64 = 0.665;

/// Forward-noise reference point for entropy matching.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub p_e: f64,
    /// Combined one-type noise `1 - 2(p_X + p_Y)` of the teleportation output.
    pub x_combined: f64,
    /// Equivalent one-type flip probability.
    pub one_type_p: f64,
    /// Logical entropy of the [[23,1,7]] code after one level.
    pub e1: f64,
}

/// One-type flip probability whose two independent sectors carry the same
/// Shannon entropy as `d`.
pub fn entropy_equivalent_p(d: &PauliDist) -> Result<f64> {
    let half = shannon_entropy(d) / 2.0;
    if half >= 1.0 {
        return Ok(0.5);
    }
    bisect(|p| Ok(binary_entropy(p) - half), 0.0, 0.5, 1e-16, 0.0)
}

/// Logical entropy of the [[23,1,7]] code after one level, bit and phase
/// sectors summed, for the entropy-equivalent one-type noise of `d`.
pub fn first_level_entropy(d: &PauliDist) -> Result<f64> {
    let p = entropy_equivalent_p(d)?;
    Ok(golay::logical_entropy(p, p))
}

pub fn forward_calibration(p_e: f64) -> Result<Calibration> {
    let run = Pipeline::run(&NoiseFamily::Forward.at(p_e))?;
    let x = run.combined_x();
    Ok(Calibration {
        p_e,
        x_combined: x,
        one_type_p: (1.0 - x) / 2.0,
        e1: first_level_entropy(&run.output)?,
    })
}

fn family_bracket(family: &NoiseFamily) -> (f64, f64) {
    match family {
        NoiseFamily::Depolarizing { .. } => (0.06, 0.11),
        NoiseFamily::Knill => (0.05, 0.09),
        NoiseFamily::Forward | NoiseFamily::Independent { .. } => (0.03, 0.07),
    }
}

/// Noise level of `family` whose [[23,1,7]] first-level entropy equals
/// `target_e1`.
pub fn entropy_match_threshold(family: &NoiseFamily, target_e1: f64, tol: f64) -> Result<f64> {
    let (lo, hi) = family_bracket(family);
    bisect(
        |p| Ok(first_level_entropy(&Pipeline::run(&family.at(p))?.output)? - target_e1),
        lo,
        hi,
        tol,
        0.0,
    )
}

/// Half the difference in logical channel coefficient between two one-type
/// noise levels, i.e. the change in crash probability going from `x_a` to `x_b`.
pub fn crash_gap(code: Code, x_a: f64, x_b: f64) -> f64 {
    let f = crash_poly(code);
    (f.eval(x_a) - f.eval(x_b)) / 2.0
}

fn combined_x(family: &NoiseFamily, p: f64) -> Result<f64> {
    Ok(Pipeline::run(&family.at(p))?.combined_x())
}

/// Lower noise level at which the crash probability is `delta` below its
/// value at `p_base`.
pub fn crash_difference_threshold(
    code: Code,
    family: &NoiseFamily,
    p_base: f64,
    delta: f64,
    tol: f64,
) -> Result<f64> {
    if delta < 0.0 {
        return Err(Error::InvalidParameter(format!("delta = {delta}")));
    }
    if delta == 0.0 {
        return Ok(p_base);
    }
    let x_base = combined_x(family, p_base)?;
    bisect(
        |p| Ok(crash_gap(code, combined_x(family, p)?, x_base) - delta),
        p_base / 2.0,
        p_base,
        tol,
        0.0,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedFidelity {
    pub p: f64,
    /// Fidelity of the teleportation output, equal to the first-level value.
    pub fidelity: f64,
}

/// First-level logical fidelity of `code` with every qubit carrying `run`'s
/// teleportation noise, less the estimated loss from undetected errors that
/// differ from a low-weight stabilizer.
pub fn corrected_first_level_fidelity(code: Code, run: &Pipeline) -> f64 {
    let d = run.output;
    let p_g = run.undetected().p_g;
    match code {
        Code::Steane713 => {
            block_table_713(&[d; 7]).success_probability()
                - 2.0 * degeneracy_correction(DegeneracyCase::Steane713Level1, p_g)
        }
        Code::Golay2317 => {
            let f = crash_poly(code);
            let bit = (1.0 + f.eval(1.0 - 2.0 * d.bit_flip())) / 2.0;
            let phase = (1.0 + f.eval(1.0 - 2.0 * d.phase_flip_prob())) / 2.0;
            bit * phase - 2.0 * degeneracy_correction(DegeneracyCase::Golay2317, p_g)
        }
    }
}

/// Noise level at which one level of encoding neither helps nor hurts.
pub fn fixed_fidelity_point(code: Code, family: &NoiseFamily, tol: f64) -> Result<FixedFidelity> {
    let (lo, hi) = match family {
        NoiseFamily::Forward | NoiseFamily::Independent { .. } => (0.01, 0.045),
        _ => (0.01, 0.06),
    };
    let gap = |p: f64| -> Result<f64> {
        let run = Pipeline::run(&family.at(p))?;
        Ok(corrected_first_level_fidelity(code, &run) - run.output.fidelity())
    };
    let p = bisect(gap, lo, hi, tol, 0.0)?;
    Ok(FixedFidelity {
        p,
        fidelity: Pipeline::run(&family.at(p))?.output.fidelity(),
    })
}

/// Distance from the converged entropy after `l` levels of a code of distance
/// `d`, starting from entropy `t` below the critical value `t_c`.
pub fn convergence_delta(t: f64, t_c: f64, d: u32, l: u32) -> Result<f64> {
    if d < 2 || t > t_c || t_c <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "t = {t}, t_c = {t_c}, d = {d}"
        )));
    }
    Ok((t_c - t) * (d as f64).powf(l as f64 * ALPHA) / t_c)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverheadEstimate {
    pub n: u32,
    pub p: f64,
    pub r: f64,
    pub eps: f64,
    /// Probability that no qubit in a block of `n` is rejected.
    pub p_k: f64,
    /// Exponent of `eps` in the overhead.
    pub exponent: f64,
    /// `n · eps^exponent`.
    pub order: f64,
}

pub fn overhead_estimate(n: u32, p: f64, r: f64, eps: f64) -> Result<OverheadEstimate> {
    if !(0.0..1.0).contains(&p) || !(r > 0.0 && r < 1.0) || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p = {p}, r = {r}, eps = {eps}"
        )));
    }
    let p_k = (1.0 - p).powi(n as i32);
    let exponent = -(n as f64) * (1.0 - p).ln() / r.ln();
    // -0.0 for p = 0 reads badly in reports
    let exponent = if exponent == 0.0 { 0.0 } else { exponent };
    Ok(OverheadEstimate {
        n,
        p,
        r,
        eps,
        p_k,
        exponent,
        order: n as f64 * eps.powf(exponent),
    })
}
