//! Crash polynomials and degeneracy corrections.
//!
//! A crash polynomial maps i.i.d. one-type noise `x` on every qubit to the
//! logical noise of the block. It has support on the weights of the
//! undetected distance classes, equals 1 at `x = 1`, and its first `t`
//! derivatives vanish there for a code that corrects `t` errors. Those
//! constraints pin the coefficients, which are solved for exactly.

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use super::Code;

pub type Rational = Ratio<i128>;

#[derive(Clone, Debug, PartialEq)]
pub struct CrashPolynomial {
    terms: Vec<(u32, Rational)>,
}

impl CrashPolynomial {
    pub fn new(terms: Vec<(u32, Rational)>) -> Self {
        CrashPolynomial { terms }
    }

    /// Solve `f(1) = 1` and `f^{(k)}(1) = 0` for `k = 1..weights.len()`.
    pub fn from_constraints(weights: &[u32]) -> Self {
        let n = weights.len();
        // row k: Σ_w c_w · w(w-1)…(w-k+1)
        let mut a: Vec<Vec<Rational>> = (0..n)
            .map(|k| {
                let mut row: Vec<Rational> =
                    weights.iter().map(|&w| falling(w, k as u32)).collect();
                row.push(if k == 0 {
                    Rational::one()
                } else {
                    Rational::zero()
                });
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .expect("weights must be distinct");
            a.swap(col, pivot);
            let inv = Rational::one() / a[col][col];
            for v in a[col].iter_mut() {
                *v *= inv;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let factor = a[r][col];
                    for c in col..=n {
                        let sub = factor * a[col][c];
                        a[r][c] -= sub;
                    }
                }
            }
        }
        CrashPolynomial {
            terms: weights.iter().zip(a).map(|(&w, row)| (w, row[n])).collect(),
        }
    }

    pub fn terms(&self) -> &[(u32, Rational)] {
        &self.terms
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|(w, c)| c.to_f64().unwrap() * x.powi(*w as i32))
            .sum()
    }

    /// Exact `k`-th derivative at `x = 1`.
    pub fn derivative_at_one(&self, k: u32) -> Rational {
        self.terms.iter().map(|(w, c)| *c * falling(*w, k)).sum()
    }

    /// Logical crash probability `(1 - f(x))/2`.
    pub fn crash_probability(&self, x: f64) -> f64 {
        0.5 * (1.0 - self.eval(x))
    }

    pub fn is_normalised(&self) -> bool {
        self.derivative_at_one(0) == Rational::one()
    }
}

fn falling(w: u32, k: u32) -> Rational {
    let mut v: i128 = 1;
    for j in 0..k {
        v *= w as i128 - j as i128;
    }
    Rational::from_integer(v)
}

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

/// Crash polynomial of a code under i.i.d. one-type noise.
pub fn crash_poly(code: Code) -> CrashPolynomial {
    match code {
        Code::Steane713 => CrashPolynomial::new(vec![(3, r(7, 4)), (7, r(-3, 4))]),
        Code::Golay2317 => CrashPolynomial::new(vec![
            (7, r(3795, 512)),
            (11, r(-805, 64)),
            (15, r(1771, 256)),
            (23, r(-385, 512)),
        ]),
    }
}

/// Which undetected-stabilizer coincidence a correction estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegeneracyCase {
    /// Weight-4 stabilizers of one [[7,1,3]] block.
    Steane713Level1,
    /// Weight-12 stabilizers spanning four [[7,1,3]] sub-blocks.
    Steane713Level2,
    /// Weight-8 stabilizers of the [[23,1,7]] code.
    Golay2317,
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Estimated change in crash probability from undetected errors that differ
/// from a low-weight stabilizer, counted three times for the teleportation.
pub fn degeneracy_correction(case: DegeneracyCase, p_g: f64) -> f64 {
    match case {
        DegeneracyCase::Steane713Level1 => 3.0 * 7.0 * binomial(4, 2) * p_g.powi(2),
        DegeneracyCase::Steane713Level2 => 3.0 * 7f64.powi(5) * binomial(12, 6) * p_g.powi(6),
        DegeneracyCase::Golay2317 => 3.0 * binomial(8, 4) * 506.0 * p_g.powi(4),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{distance_classes_from_x, golay};

    #[test]
    fn steane_values() {
        let f = crash_poly(Code::Steane713);
        assert_eq!(f.eval(1.0), 1.0);
        assert!((f.eval(0.78795) - 0.7147).abs() < 5e-4);
        assert!((f.eval(0.780736) - 0.7002).abs() < 5e-4);
    }

    #[test]
    fn steane_matches_classes() {
        let f = crash_poly(Code::Steane713);
        for x in [0.2, 0.5, 0.78, 0.95] {
            let m = distance_classes_from_x(x).0;
            assert!((f.eval(x) - (m[0] + m[1] - m[2] - m[3])).abs() < 1e-14);
        }
        assert_eq!(CrashPolynomial::from_constraints(&[3, 7]), f);
    }

    #[test]
    fn golay_constraints_exact() {
        let f = crash_poly(Code::Golay2317);
        assert_eq!(f.derivative_at_one(0), Rational::one());
        for k in 1..=3 {
            assert!(f.derivative_at_one(k).is_zero());
        }
        assert_eq!(CrashPolynomial::from_constraints(&[7, 11, 15, 23]), f);
        assert!(f.is_normalised());
    }

    #[test]
    fn golay_matches_enumeration() {
        let f = crash_poly(Code::Golay2317);
        for x in [0.3, 0.78064, 0.9] {
            assert!((f.eval(x) - golay::leader_decoded_logical_x(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn degeneracy_values() {
        assert!(
            (degeneracy_correction(DegeneracyCase::Steane713Level1, 0.007)
                - 126.0 * 0.007f64.powi(2))
            .abs()
                < 1e-15
        );
        assert!(
            (degeneracy_correction(DegeneracyCase::Golay2317, 0.01) - 3.0 * 70.0 * 506.0 * 1e-8)
                .abs()
                < 1e-15
        );
        assert!(
            (degeneracy_correction(DegeneracyCase::Steane713Level2, 0.01)
                - 3.0 * 16807.0 * 924.0 * 1e-12)
                .abs()
                < 1e-15
        );
        assert_eq!(degeneracy_correction(DegeneracyCase::Golay2317, 0.0), 0.0);
    }
}
