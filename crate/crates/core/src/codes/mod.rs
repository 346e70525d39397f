//! Code-level machinery for the [[7,1,3]] and [[23,1,7]] CSS codes.

mod classes;
mod crash;
pub mod golay;
mod steane;

pub use classes::{
    combine_classes, combine_classes_generic, distance_classes_from_x, distance_table_713,
    hamming_distance_class, postselect_classes, postselect_classes_generic, syndrome_class_entropy,
    DistanceClassDist, HAMMING_CHECKS,
};
pub use crash::{crash_poly, degeneracy_correction, CrashPolynomial, DegeneracyCase};
pub use steane::{
    block_decompose_713, block_table_713, first_level_fidelity, BlockTable, StabilizerCode7,
    SyndromeDecomposition, SyndromeRecord,
};

use std::fmt;
use std::str::FromStr;

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Code {
    /// [[7,1,3]] Steane code.
    Steane713,
    /// [[23,1,7]] Golay code.
    Golay2317,
}

impl Code {
    pub fn label(&self) -> &'static str {
        match self {
            Code::Steane713 => "713",
            Code::Golay2317 => "2317",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Code {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "713" => Ok(Code::Steane713),
            "2317" => Ok(Code::Golay2317),
            other => Err(Error::Parse(format!(
                "unknown code `{other}` (expected 713 or 2317)"
            ))),
        }
    }
}

/// `-x log₂ x` with `0 log 0 = 0`.
pub(crate) fn entropy_term(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}
