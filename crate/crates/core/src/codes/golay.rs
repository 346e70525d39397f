//! The [23,12,7] Golay code behind the [[23,1,7]] CSS code.
//!
//! Even-weight codewords are the stabilizers of one error type and odd-weight
//! codewords the logical operators. The code is perfect, so every syndrome has
//! a unique leader of weight at most 3 and the coset weight enumerators only
//! depend on that weight.

use std::sync::OnceLock;

use super::entropy_term;

pub const LENGTH: u32 = 23;

/// `1 + x² + x⁴ + x⁵ + x⁶ + x¹⁰ + x¹¹`.
pub const GENERATOR: u32 = 0b1100_0111_0101;

fn poly_mul(mut a: u32, mut b: u32) -> u32 {
    let mut r = 0;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        a <<= 1;
        b >>= 1;
    }
    r
}

/// All 4096 codewords as 23-bit masks.
pub fn codewords() -> &'static [u32] {
    static WORDS: OnceLock<Vec<u32>> = OnceLock::new();
    WORDS.get_or_init(|| (0..1u32 << 12).map(|m| poly_mul(m, GENERATOR)).collect())
}

/// Number of codewords of each weight `0..=23`.
pub fn weight_distribution() -> [usize; 24] {
    let mut w = [0; 24];
    for c in codewords() {
        w[c.count_ones() as usize] += 1;
    }
    w
}

/// Weight counts of `leader ⊕ c` over even (`.0`) and odd (`.1`) codewords.
pub fn coset_enumerators(leader: u32) -> ([u64; 24], [u64; 24]) {
    let mut even = [0; 24];
    let mut odd = [0; 24];
    for c in codewords() {
        let w = (leader ^ c).count_ones() as usize;
        if c.count_ones() % 2 == 0 {
            even[w] += 1;
        } else {
            odd[w] += 1;
        }
    }
    (even, odd)
}

struct LeaderTable {
    /// Number of cosets whose leader has weight `w`.
    multiplicity: [f64; 4],
    even: [[u64; 24]; 4],
    odd: [[u64; 24]; 4],
}

fn leader_table() -> &'static LeaderTable {
    static TABLE: OnceLock<LeaderTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = LeaderTable {
            multiplicity: [1.0, 23.0, 253.0, 1771.0],
            even: [[0; 24]; 4],
            odd: [[0; 24]; 4],
        };
        for w in 0..4 {
            let (e, o) = coset_enumerators((1u32 << w) - 1);
            t.even[w] = e;
            t.odd[w] = o;
        }
        t
    })
}

fn enumerate(counts: &[u64; 24], p: f64) -> f64 {
    counts
        .iter()
        .enumerate()
        .filter(|(_, n)| **n > 0)
        .map(|(k, n)| *n as f64 * p.powi(k as i32) * (1.0 - p).powi(LENGTH as i32 - k as i32))
        .sum()
}

/// Per-coset probabilities of no logical error (`.0`) and a logical error
/// (`.1`) relative to the leader, for each leader weight.
fn coset_probabilities(p: f64) -> [(f64, f64); 4] {
    let t = leader_table();
    std::array::from_fn(|w| (enumerate(&t.even[w], p), enumerate(&t.odd[w], p)))
}

/// Logical one-type noise after decoding to the coset leader, for i.i.d.
/// noise `x = 1 - 2p` on every qubit.
pub fn leader_decoded_logical_x(x: f64) -> f64 {
    let p = (1.0 - x) / 2.0;
    let t = leader_table();
    coset_probabilities(p)
        .iter()
        .zip(t.multiplicity)
        .map(|((good, bad), n)| n * (good - bad))
        .sum()
}

/// Entropy of the logical error of one sector given the full syndrome, for
/// i.i.d. flip probability `p`.
pub fn sector_entropy(p: f64) -> f64 {
    let t = leader_table();
    coset_probabilities(p)
        .iter()
        .zip(t.multiplicity)
        .map(|((good, bad), n)| {
            n * (entropy_term(*good) + entropy_term(*bad) - entropy_term(good + bad))
        })
        .sum()
}

/// Sum of bit- and phase-sector entropies.
pub fn logical_entropy(p_bit: f64, p_phase: f64) -> f64 {
    sector_entropy(p_bit) + sector_entropy(p_phase)
}
