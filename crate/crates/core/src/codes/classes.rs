//! Distance classes of one-type errors for the [7,4,3] Hamming code.
//!
//! An error's distance is the least weight it can be brought to by adding a
//! stabilizer (an even codeword). Classes 0 and 3 have the trivial syndrome;
//! classes 1 and 2 share each of the seven others.

use num_traits::Num;

use super::entropy_term;
use crate::{Error, Result, VALIDITY_TOL};

/// Parity checks; entry `i` of a row is qubit `i + 1`, stored as bit `i`.
pub const HAMMING_CHECKS: [[u8; 7]; 3] = [
    [0, 0, 0, 1, 1, 1, 1],
    [0, 1, 1, 0, 0, 1, 1],
    [1, 0, 1, 0, 1, 0, 1],
];

pub(crate) fn check_masks() -> [u8; 3] {
    HAMMING_CHECKS.map(|row| {
        row.iter()
            .enumerate()
            .fold(0u8, |acc, (i, b)| acc | (b << i))
    })
}

fn syndrome(e: u8) -> u8 {
    check_masks().iter().enumerate().fold(0, |acc, (k, m)| {
        acc | ((((e & m).count_ones() & 1) as u8) << k)
    })
}

fn even_codewords() -> Vec<u8> {
    (0..128u8)
        .filter(|&c| syndrome(c) == 0 && c.count_ones() % 2 == 0)
        .collect()
}

/// Distance class of a 7-bit error pattern, by minimising over stabilizers.
pub fn hamming_distance_class(e: u8) -> usize {
    even_codewords()
        .iter()
        .map(|s| (e ^ s).count_ones() as usize)
        .min()
        .unwrap()
}

/// Counts of errors of each weight (rows 0..=7) in each distance class.
pub fn distance_table_713() -> [[usize; 4]; 8] {
    let mut t = [[0; 4]; 8];
    for e in 0..128u8 {
        t[e.count_ones() as usize][hamming_distance_class(e)] += 1;
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceClassDist(pub [f64; 4]);

impl DistanceClassDist {
    pub const NO_ERROR: DistanceClassDist = DistanceClassDist([1.0, 0.0, 0.0, 0.0]);

    pub fn new(a: [f64; 4]) -> Result<Self> {
        if a.iter().any(|v| !v.is_finite() || *v < -VALIDITY_TOL) {
            return Err(Error::InvalidDistribution(format!(
                "negative class weight in {a:?}"
            )));
        }
        let s: f64 = a.iter().sum();
        if (s - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::InvalidDistribution(format!(
                "class weights sum to {s}"
            )));
        }
        Ok(DistanceClassDist(a))
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Class probabilities under i.i.d. one-type noise `x = 1 - 2p`.
pub fn distance_classes_from_x(x: f64) -> DistanceClassDist {
    let v = [1.0, x.powi(3), x.powi(4), x.powi(7)];
    const M: [[f64; 4]; 4] = [
        [1.0, 7.0, 7.0, 1.0],
        [7.0, 7.0, -7.0, -7.0],
        [7.0, -7.0, -7.0, 7.0],
        [1.0, -7.0, 7.0, -1.0],
    ];
    DistanceClassDist(M.map(|row| row.iter().zip(v).map(|(m, t)| m * t).sum::<f64>() / 16.0))
}

fn small<T: Num + Copy>(n: u8) -> T {
    (0..n).fold(T::zero(), |acc, _| acc + T::one())
}

/// Class of `a ⊕ b` for independent class distributions, over any field.
pub fn combine_classes_generic<T: Num + Copy>(a: [T; 4], b: [T; 4]) -> [T; 4] {
    let seven: T = small(7);
    let six: T = small(6);
    let [b0, b1, b2, b3] = b;
    let m = [
        [b0, b1 / seven, b2 / seven, b3],
        [b1, b0 + six * b2 / seven, b3 + six * b1 / seven, b2],
        [b2, b3 + six * b1 / seven, b0 + six * b2 / seven, b1],
        [b3, b2 / seven, b1 / seven, b0],
    ];
    m.map(|row| {
        row.iter()
            .zip(a)
            .fold(T::zero(), |acc, (r, x)| acc + *r * x)
    })
}

pub fn combine_classes(a: DistanceClassDist, b: DistanceClassDist) -> DistanceClassDist {
    DistanceClassDist(combine_classes_generic(a.0, b.0))
}

/// Acceptance probability and normalised class distribution of the source
/// when the combined error must be a stabilizer.
pub fn postselect_classes_generic<T: Num + Copy>(a: [T; 4], b: [T; 4]) -> Option<(T, [T; 4])> {
    let seven: T = small(7);
    let kept = [
        a[0] * b[0],
        a[1] * b[1] / seven,
        a[2] * b[2] / seven,
        a[3] * b[3],
    ];
    let pk = kept.iter().fold(T::zero(), |acc, v| acc + *v);
    if pk == T::zero() {
        return None;
    }
    Some((pk, kept.map(|v| v / pk)))
}

pub fn postselect_classes(
    a: DistanceClassDist,
    b: DistanceClassDist,
) -> Result<(f64, DistanceClassDist)> {
    match postselect_classes_generic(a.0, b.0) {
        Some((pk, out)) if pk > 0.0 => Ok((pk, DistanceClassDist(out))),
        Some((pk, _)) => Err(Error::DegenerateAcceptance(pk)),
        None => Err(Error::DegenerateAcceptance(0.0)),
    }
}

/// Entropy of the logical class given the syndrome.
pub fn syndrome_class_entropy(a: DistanceClassDist) -> f64 {
    let [a0, a1, a2, a3] = a.0;
    a.0.iter().map(|v| entropy_term(*v)).sum::<f64>()
        - entropy_term(a0 + a3)
        - entropy_term(a1 + a2)
}
