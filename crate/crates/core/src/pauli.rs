//! Pauli labels in the fixed `(I, X, Y, Z)` order.
//!
//! Two-qubit labels are ordered source-major: `II, IX, IY, IZ, XI, ...`, so
//! the index of `σσ'` is `4·σ + σ'`. Commutation is decided by the symplectic
//! inner product of the `(x, z)` bit pairs, and every sign table in the crate
//! comes from here.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Pauli {
        Self::ALL[i & 3]
    }

    /// Bit-flip component (`X` or `Y`).
    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Phase-flip component (`Z` or `Y`).
    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Product up to phase.
    pub fn mul(self, other: Pauli) -> Pauli {
        Pauli::from_bits(self.x_bit() ^ other.x_bit(), self.z_bit() ^ other.z_bit())
    }

    pub fn commutes(self, other: Pauli) -> bool {
        !symplectic(self, other)
    }

    /// `+1` if the two operators commute, `-1` otherwise.
    pub fn sign(self, other: Pauli) -> f64 {
        if self.commutes(other) {
            1.0
        } else {
            -1.0
        }
    }
}

fn symplectic(a: Pauli, b: Pauli) -> bool {
    (a.x_bit() & b.z_bit()) ^ (a.z_bit() & b.x_bit())
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// A two-qubit Pauli label `σσ'` (source, destination).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TwoPauli {
    pub source: Pauli,
    pub dest: Pauli,
}

impl TwoPauli {
    pub const fn new(source: Pauli, dest: Pauli) -> Self {
        TwoPauli { source, dest }
    }

    pub fn index(self) -> usize {
        4 * self.source.index() + self.dest.index()
    }

    pub fn from_index(i: usize) -> Self {
        TwoPauli::new(Pauli::from_index(i >> 2), Pauli::from_index(i))
    }

    pub fn all() -> impl Iterator<Item = TwoPauli> {
        (0..16).map(TwoPauli::from_index)
    }

    pub fn commutes(self, other: TwoPauli) -> bool {
        symplectic(self.source, other.source) == symplectic(self.dest, other.dest)
    }

    pub fn sign(self, other: TwoPauli) -> f64 {
        if self.commutes(other) {
            1.0
        } else {
            -1.0
        }
    }

    /// Parse labels such as `"XZ"`.
    pub fn parse(s: &str) -> Option<TwoPauli> {
        let mut it = s.chars().map(|c| match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        });
        let a = it.next()??;
        let b = it.next()??;
        if it.next().is_some() {
            return None;
        }
        Some(TwoPauli::new(a, b))
    }
}

impl fmt::Display for TwoPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.source, self.dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_qubit_signs_match_pauli_superoperators() {
        // rows are O(I), O(X), O(Y), O(Z) in (I, X, Y, Z) order
        let expect = [
            [1.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, 1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0],
        ];
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                assert_eq!(a.sign(b), expect[a.index()][b.index()]);
            }
        }
    }

    #[test]
    fn two_qubit_index_roundtrip() {
        for i in 0..16 {
            assert_eq!(TwoPauli::from_index(i).index(), i);
        }
        assert_eq!(TwoPauli::parse("XZ").unwrap().index(), 7);
        assert_eq!(TwoPauli::from_index(7).to_string(), "XZ");
        assert!(TwoPauli::parse("XQ").is_none());
    }

    #[test]
    fn two_qubit_commutation() {
        let xx = TwoPauli::parse("XX").unwrap();
        let zz = TwoPauli::parse("ZZ").unwrap();
        let zi = TwoPauli::parse("ZI").unwrap();
        assert!(xx.commutes(zz));
        assert!(!xx.commutes(zi));
    }
}
