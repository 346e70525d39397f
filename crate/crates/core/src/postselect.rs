//! Repeated post-selection of ancilla qubits and the noise left behind after
//! teleporting through them.
//!
//! A post-selection round applies a noisy CNOT between two copies of the
//! current ancilla, measures the destination (with measurement noise `m`) and
//! keeps the source only when no error is seen. Rounds alternate between bit
//! and phase flips, which is the Hadamard swap at the end of [`post_step`].

use crate::noise_models::{diagonal_q, measurement_m, NoiseModel};
use crate::pauli::Pauli;
use crate::pauli_algebra::{channel_to_dist, DiagonalChannel, PauliDist, TwoQubitDiagonalNoise};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-14;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// `(x1 + x2)/(1 + x1 x2)`: keep the first of two one-type noisy bits when
/// their parity check passes.
pub fn scalar_post(x1: f64, x2: f64) -> Result<f64> {
    let den = 1.0 + x1 * x2;
    if den == 0.0 {
        return Err(Error::Singular);
    }
    Ok((x1 + x2) / den)
}

/// One post-selection round on channel `c` with CNOT noise `q` and
/// measurement noise `m`, returned with bit and phase sectors swapped.
pub fn post_step(c: DiagonalChannel, q: &TwoQubitDiagonalNoise, m: f64) -> Result<DiagonalChannel> {
    let g = |s, d| q.get(s, d);
    let (x, y, z) = (c.x, c.y, c.z);
    let den = 1.0 + m * z * z * g(Pauli::I, Pauli::Z);
    if den <= 0.0 {
        return Err(Error::DegenerateAcceptance(den / 2.0));
    }
    let x_out = (x * x * g(Pauli::X, Pauli::I) + m * y * y * g(Pauli::X, Pauli::Z)) / den;
    let y_out = x * y * (g(Pauli::Y, Pauli::I) + m * g(Pauli::Y, Pauli::Z)) / den;
    let z_out = z * (g(Pauli::Z, Pauli::I) + m * g(Pauli::Z, Pauli::Z)) / den;
    Ok(DiagonalChannel::new(z_out, y_out, x_out))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointResult {
    pub channel: DiagonalChannel,
    pub iterations: usize,
    pub residual: f64,
}

/// Iterate [`post_step`] from the perfect channel until successive channels
/// differ by less than `tol` in max-norm.
pub fn fixed_point(
    q: &TwoQubitDiagonalNoise,
    m: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol}")));
    }
    let mut c = DiagonalChannel::IDENTITY;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let next = post_step(c, q, m)?;
        residual = next.max_abs_diff(&c);
        c = next;
        if residual < tol {
            c.validate()?;
            return Ok(FixedPointResult {
                channel: c,
                iterations: it,
                residual,
            });
        }
        if !residual.is_finite() {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Largest violation of the closed-form fixed-point conditions.
///
/// With `D = 1 + m z² Q_IZ`, `A = Q_YI + m Q_YZ` and `B = Q_ZI + m Q_ZZ`:
/// `D² = z A B`, `x = D / A` and `z D = x² Q_XI + m y² Q_XZ`.
pub fn fixed_point_residual(c: DiagonalChannel, q: &TwoQubitDiagonalNoise, m: f64) -> f64 {
    let g = |s, d| q.get(s, d);
    let (x, y, z) = (c.x, c.y, c.z);
    let d = 1.0 + m * z * z * g(Pauli::I, Pauli::Z);
    let a = g(Pauli::Y, Pauli::I) + m * g(Pauli::Y, Pauli::Z);
    let b = g(Pauli::Z, Pauli::I) + m * g(Pauli::Z, Pauli::Z);
    let r1 = d * d - z * a * b;
    let r2 = x - d / a;
    let r3 = z * d - x * x * g(Pauli::X, Pauli::I) - m * y * y * g(Pauli::X, Pauli::Z);
    r1.abs().max(r2.abs()).max(r3.abs())
}

/// One-type noise just after (`x_g`) and just before (`x_b`) post-selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndepFixedPoint {
    pub x_g: f64,
    pub x_b: f64,
    pub iterations: usize,
}

/// Joint fixed point of `x_g = b·post(x_b, x_b f m)` and `x_b = x_g² f`.
pub fn indep_fixed_point(f: f64, b: f64, m: f64, tol: f64) -> Result<IndepFixedPoint> {
    for (name, v) in [("f", f), ("b", b), ("m", m)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} = {v} outside (0, 1]"
            )));
        }
    }
    let mut x_g = 1.0;
    let mut residual = f64::INFINITY;
    for it in 1..=DEFAULT_MAX_ITER {
        let x_b = x_g * x_g * f;
        let next = b * scalar_post(x_b, x_b * f * m)?;
        residual = (next - x_g).abs();
        x_g = next;
        if residual < tol {
            return Ok(IndepFixedPoint {
                x_g,
                x_b: x_g * x_g * f,
                iterations: it,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: DEFAULT_MAX_ITER,
        residual,
    })
}

/// `x = x_g³ f² m`.
pub fn combined_noise(x_g: f64, f: f64, m: f64) -> f64 {
    x_g * x_g * x_g * f * f * m
}

/// Pauli distribution of the noise left on a teleported qubit when source and
/// destination ancillas were post-selected last for opposite error types.
pub fn teleport_output(c: DiagonalChannel, q: &TwoQubitDiagonalNoise, m: f64) -> Result<PauliDist> {
    let (x, y, z) = (c.x, c.y, c.z);
    let ch = DiagonalChannel::new(
        m * x * z * q.get(Pauli::X, Pauli::I),
        m * m * y * y * q.get(Pauli::X, Pauli::Z),
        m * x * z * q.get(Pauli::I, Pauli::Z),
    );
    channel_to_dist(ch).map_err(|e| match e {
        Error::InvalidChannel { label, value } => {
            Error::InvalidDistribution(format!("teleport output p_{label} = {value}"))
        }
        other => other,
    })
}

/// Error probabilities around the last post-selection of a sector: source
/// `p_s` and destination `p_d` before the check, undetected `p_g` after it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UndetectedError {
    pub p_s: f64,
    pub p_d: f64,
    pub p_g: f64,
}

pub fn undetected_error(c: DiagonalChannel, q: &TwoQubitDiagonalNoise, m: f64) -> UndetectedError {
    let p_s = (1.0 - c.z) / 2.0;
    let p_d = (1.0 - c.z * q.get(Pauli::I, Pauli::Z) * m) / 2.0;
    let bad = p_s * p_d;
    let p_g = bad / ((1.0 - p_s) * (1.0 - p_d) + bad);
    UndetectedError { p_s, p_d, p_g }
}

/// Everything derived from one noise model: `Q`, `m`, the post-selection fixed
/// point and the teleportation output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pipeline {
    pub model: NoiseModel,
    pub q: TwoQubitDiagonalNoise,
    pub m: f64,
    pub fixed: FixedPointResult,
    pub output: PauliDist,
}

impl Pipeline {
    pub fn run(model: &NoiseModel) -> Result<Pipeline> {
        Self::run_with(model, DEFAULT_TOL, DEFAULT_MAX_ITER)
    }

    pub fn run_with(model: &NoiseModel, tol: f64, max_iter: usize) -> Result<Pipeline> {
        let q = diagonal_q(model)?;
        let m = measurement_m(model);
        let fixed = fixed_point(&q, m, tol, max_iter)?;
        let output = teleport_output(fixed.channel, &q, m)?;
        Ok(Pipeline {
            model: *model,
            q,
            m,
            fixed,
            output,
        })
    }

    pub fn undetected(&self) -> UndetectedError {
        undetected_error(self.fixed.channel, &self.q, self.m)
    }

    /// One-type combined teleportation noise `1 - 2(p_X + p_Y)`.
    pub fn combined_x(&self) -> f64 {
        1.0 - 2.0 * self.output.bit_flip()
    }
}
