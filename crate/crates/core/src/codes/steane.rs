//! Syndrome decomposition of one [[7,1,3]] block built from seven noisy
//! sub-blocks, with maximum-likelihood coset recovery.
//!
//! Syndrome bits 0–2 come from the X-type generators (they see the phase
//! component of an error), bits 3–5 from the Z-type generators. Inside a
//! syndrome, the logical class of an error is read off the parities of its
//! bit and phase components, since `X̄ = X^⊗7` and `Z̄ = Z^⊗7`.

use super::classes::check_masks;
use crate::pauli::Pauli;
use crate::pauli_algebra::{dist_to_channel, DiagonalChannel, PauliDist};

pub const SYNDROMES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StabilizerCode7 {
    /// Supports of `g₁..g₃` (X-type) as 7-bit masks.
    pub x_generators: [u8; 3],
    /// Supports of `g₄..g₆` (Z-type).
    pub z_generators: [u8; 3],
    pub logical_x: u8,
    pub logical_z: u8,
}

impl StabilizerCode7 {
    pub fn steane() -> Self {
        let h = check_masks();
        StabilizerCode7 {
            x_generators: h,
            z_generators: h,
            logical_x: 0x7f,
            logical_z: 0x7f,
        }
    }

    /// Symplectic rows `(x, z)` of the six generators.
    pub fn generators(&self) -> [(u8, u8); 6] {
        let g = |i: usize| {
            if i < 3 {
                (self.x_generators[i], 0)
            } else {
                (0, self.z_generators[i - 3])
            }
        };
        std::array::from_fn(g)
    }

    /// Syndrome of an error with bit part `x` and phase part `z`.
    pub fn syndrome(&self, x: u8, z: u8) -> u8 {
        let mut s = 0;
        for k in 0..3 {
            s |= (((z & self.x_generators[k]).count_ones() & 1) as u8) << k;
            s |= (((x & self.z_generators[k]).count_ones() & 1) as u8) << (3 + k);
        }
        s
    }

    /// Logical class of an error relative to the syndrome's canonical frame.
    pub fn logical_class(&self, x: u8, z: u8) -> Pauli {
        Pauli::from_bits(
            (x & self.logical_z).count_ones() % 2 == 1,
            (z & self.logical_x).count_ones() % 2 == 1,
        )
    }

    /// All 64 stabilizer elements as `(x, z)` masks.
    pub fn stabilizer_group(&self) -> Vec<(u8, u8)> {
        (0..64u8)
            .map(|sel| {
                let mut x = 0;
                let mut z = 0;
                for k in 0..3 {
                    if sel >> k & 1 == 1 {
                        x ^= self.x_generators[k];
                    }
                    if sel >> (3 + k) & 1 == 1 {
                        z ^= self.z_generators[k];
                    }
                }
                (x, z)
            })
            .collect()
    }
}

fn symplectic(a: (u8, u8), b: (u8, u8)) -> bool {
    ((a.0 & b.1).count_ones() + (a.1 & b.0).count_ones()) % 2 == 1
}

impl StabilizerCode7 {
    /// True if the generators commute, the logicals anticommute with each
    /// other and commute with every generator.
    pub fn is_consistent(&self) -> bool {
        let gens = self.generators();
        let lx = (self.logical_x, 0);
        let lz = (0, self.logical_z);
        gens.iter()
            .all(|a| gens.iter().all(|b| !symplectic(*a, *b)))
            && gens
                .iter()
                .all(|g| !symplectic(*g, lx) && !symplectic(*g, lz))
            && symplectic(lx, lz)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyndromeRecord {
    pub syndrome: u8,
    /// Probability of observing this syndrome.
    pub weight: f64,
    /// Unnormalised weight of each logical coset, `(I, X, Y, Z)` order.
    pub cosets: [f64; 4],
    /// Coset whose representative is applied as the recovery.
    pub recovery: Pauli,
    /// Logical error left after recovery, conditioned on the syndrome.
    pub logical: PauliDist,
}

impl SyndromeRecord {
    pub fn channel(&self) -> DiagonalChannel {
        dist_to_channel(self.logical)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyndromeDecomposition {
    pub records: Vec<SyndromeRecord>,
}

impl SyndromeDecomposition {
    pub fn total_weight(&self) -> f64 {
        self.records.iter().map(|r| r.weight).sum()
    }

    /// Syndrome-averaged logical error distribution.
    pub fn average(&self) -> [f64; 4] {
        let mut avg = [0.0; 4];
        for r in &self.records {
            for (a, v) in avg.iter_mut().zip(r.logical.as_array()) {
                *a += r.weight * v;
            }
        }
        avg
    }

    pub fn get(&self, syndrome: u8) -> Option<&SyndromeRecord> {
        self.records.iter().find(|r| r.syndrome == syndrome)
    }
}

/// Most likely coset, earliest in `(I, X, Y, Z)` order on ties.
fn best_coset(q: &[f64; 4]) -> usize {
    let mut best = 0;
    for i in 1..4 {
        if q[i] > q[best] {
            best = i;
        }
    }
    best
}

fn record(syndrome: u8, cosets: [f64; 4]) -> Option<SyndromeRecord> {
    let weight: f64 = cosets.iter().sum();
    if weight <= 0.0 {
        return None;
    }
    let best = Pauli::from_index(best_coset(&cosets));
    let mut rel = [0.0; 4];
    for l in Pauli::ALL {
        rel[l.mul(best).index()] += cosets[l.index()] / weight;
    }
    let logical = PauliDist::from_array(rel).expect("normalised coset weights");
    Some(SyndromeRecord {
        syndrome,
        weight,
        cosets,
        recovery: best,
        logical,
    })
}

/// Exhaustive decomposition over all 4⁷ Pauli errors.
pub fn block_decompose_713(children: &[PauliDist; 7]) -> SyndromeDecomposition {
    let code = StabilizerCode7::steane();
    let mut q = [[0.0; 4]; SYNDROMES];
    for e in 0..(1usize << 14) {
        let mut prob = 1.0;
        let (mut x, mut z) = (0u8, 0u8);
        for (i, child) in children.iter().enumerate() {
            let p = Pauli::from_index(e >> (2 * i));
            prob *= child.get(p);
            x |= (p.x_bit() as u8) << i;
            z |= (p.z_bit() as u8) << i;
        }
        if prob == 0.0 {
            continue;
        }
        q[code.syndrome(x, z) as usize][code.logical_class(x, z).index()] += prob;
    }
    SyndromeDecomposition {
        records: (0..SYNDROMES)
            .filter_map(|s| record(s as u8, q[s]))
            .collect(),
    }
}

/// Coset weights for every syndrome, `q[syndrome][logical]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockTable {
    pub q: [[f64; 4]; SYNDROMES],
}

/// 8-bit label of a single-qubit Pauli on qubit `i`: syndrome bits 0–5,
/// bit-flip parity in bit 6 and phase-flip parity in bit 7.
fn qubit_labels(code: &StabilizerCode7, i: usize) -> [u8; 4] {
    Pauli::ALL.map(|p| {
        let x = (p.x_bit() as u8) << i;
        let z = (p.z_bit() as u8) << i;
        code.syndrome(x, z) | ((p.x_bit() as u8) << 6) | ((p.z_bit() as u8) << 7)
    })
}

/// Coset weights by XOR-convolving per-qubit label distributions; the fast
/// path used by the Monte Carlo estimator.
pub fn block_table_713(children: &[PauliDist; 7]) -> BlockTable {
    use std::sync::OnceLock;
    static LABELS: OnceLock<[[u8; 4]; 7]> = OnceLock::new();
    let labels = LABELS.get_or_init(|| {
        let code = StabilizerCode7::steane();
        std::array::from_fn(|i| qubit_labels(&code, i))
    });
    let mut dist = [0.0f64; 256];
    dist[0] = 1.0;
    for (child, lab) in children.iter().zip(labels) {
        let p = child.as_array();
        let mut next = [0.0f64; 256];
        for (l, w) in dist.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            for k in 0..4 {
                if p[k] != 0.0 {
                    next[l ^ lab[k] as usize] += w * p[k];
                }
            }
        }
        dist = next;
    }
    let mut q = [[0.0; 4]; SYNDROMES];
    for (l, w) in dist.iter().enumerate() {
        let logical = Pauli::from_bits(l >> 6 & 1 == 1, l >> 7 & 1 == 1);
        q[l & 63][logical.index()] += w;
    }
    BlockTable { q }
}

impl BlockTable {
    pub fn syndrome_weight(&self, s: usize) -> f64 {
        self.q[s].iter().sum()
    }

    pub fn record(&self, s: usize) -> Option<SyndromeRecord> {
        record(s as u8, self.q[s])
    }

    pub fn decompose(&self) -> SyndromeDecomposition {
        SyndromeDecomposition {
            records: (0..SYNDROMES).filter_map(|s| self.record(s)).collect(),
        }
    }

    /// Probability that recovery leaves no logical error.
    pub fn success_probability(&self) -> f64 {
        self.q.iter().map(|c| c[best_coset(c)]).sum()
    }
}

/// Probability of no logical error after one level of decoding.
pub fn first_level_fidelity(children: &[PauliDist; 7]) -> f64 {
    block_table_713(children).success_probability()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::distance_classes_from_x;
    use proptest::prelude::*;

    fn dist() -> impl Strategy<Value = PauliDist> {
        (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.5..4.0f64).prop_map(|(a, b, c, d)| {
            PauliDist::from_weights([d, a * 0.3, b * 0.3, c * 0.3]).unwrap()
        })
    }

    #[test]
    fn code_structure() {
        let code = StabilizerCode7::steane();
        assert!(code.is_consistent());
        assert_eq!(code.x_generators[0], 0b1111000);
        let group = code.stabilizer_group();
        let mut distinct = group.clone();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct.len(), 64);
        for (x, z) in group {
            assert_eq!(code.syndrome(x, z), 0);
            assert_eq!(code.logical_class(x, z), Pauli::I);
        }
        // single-qubit errors give distinct nonzero syndromes per type
        let mut seen = std::collections::HashSet::new();
        for i in 0..7 {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let s = code.syndrome((p.x_bit() as u8) << i, (p.z_bit() as u8) << i);
                assert!(s != 0 && seen.insert(s));
            }
        }
    }

    #[test]
    fn perfect_children() {
        let d = block_decompose_713(&[PauliDist::PERFECT; 7]);
        assert_eq!(d.records.len(), 1);
        let r = d.records[0];
        assert_eq!((r.syndrome, r.weight), (0, 1.0));
        assert_eq!(r.channel(), DiagonalChannel::IDENTITY);
        assert_eq!(first_level_fidelity(&[PauliDist::PERFECT; 7]), 1.0);
    }

    #[test]
    fn trivial_syndrome_reproduces_classes() {
        let p = 0.08;
        let child = PauliDist::new(1.0 - p, p, 0.0, 0.0).unwrap();
        let d = block_decompose_713(&[child; 7]);
        let m = distance_classes_from_x(1.0 - 2.0 * p);
        let r = d.get(0).unwrap();
        assert!((r.cosets[Pauli::I.index()] - m.0[0]).abs() < 1e-15);
        assert!((r.cosets[Pauli::X.index()] - m.0[3]).abs() < 1e-15);
        // other syndromes carry the distance-1 and -2 classes
        let rest: [f64; 2] =
            d.records
                .iter()
                .filter(|r| r.syndrome != 0)
                .fold([0.0, 0.0], |acc, r| {
                    let lo = r.cosets[0].max(r.cosets[1]);
                    let hi = r.cosets[0].min(r.cosets[1]);
                    [acc[0] + lo, acc[1] + hi]
                });
        assert!((rest[0] - m.0[1]).abs() < 1e-14);
        assert!((rest[1] - m.0[2]).abs() < 1e-14);
    }

    #[test]
    fn one_type_fidelity_matches_crash_polynomial() {
        use crate::codes::{crash_poly, Code};
        let p = 0.06;
        let child = PauliDist::new(1.0 - p, p, 0.0, 0.0).unwrap();
        let f = crash_poly(Code::Steane713).eval(1.0 - 2.0 * p);
        assert!((first_level_fidelity(&[child; 7]) - (1.0 + f) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn fidelity_decreases_with_noise() {
        let mut last = 1.0;
        for i in 1..30 {
            let p = 0.005 * i as f64;
            let child = PauliDist::new(1.0 - 3.0 * p, p, p, p).unwrap();
            let f = first_level_fidelity(&[child; 7]);
            assert!(f < last);
            last = f;
        }
    }

    /// Unnormalised logical channel on the trivial syndrome, averaged over
    /// the stabilizer group.
    fn trivial_syndrome_channel(children: &[PauliDist; 7], logical: Pauli) -> f64 {
        let code = StabilizerCode7::steane();
        let lx = if logical.x_bit() { code.logical_x } else { 0 };
        let lz = if logical.z_bit() { code.logical_z } else { 0 };
        let channels: Vec<DiagonalChannel> = children.iter().map(|c| dist_to_channel(*c)).collect();
        let group = code.stabilizer_group();
        group
            .iter()
            .map(|(gx, gz)| {
                let (x, z) = (gx ^ lx, gz ^ lz);
                (0..7)
                    .map(|i| channels[i].get(Pauli::from_bits(x >> i & 1 == 1, z >> i & 1 == 1)))
                    .product::<f64>()
            })
            .sum::<f64>()
            / group.len() as f64
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fast_path_matches_enumeration(children in proptest::array::uniform7(dist())) {
            let full = block_decompose_713(&children);
            let fast = block_table_713(&children);
            prop_assert!((full.total_weight() - 1.0).abs() < 1e-12);
            for r in &full.records {
                let q = fast.q[r.syndrome as usize];
                for k in 0..4 {
                    prop_assert!((q[k] - r.cosets[k]).abs() < 1e-14);
                }
                prop_assert!(r.channel().validate().is_ok());
            }
            let success: f64 = full.records.iter().map(|r| r.weight * r.logical.fidelity()).sum();
            prop_assert!((success - fast.success_probability()).abs() < 1e-12);
        }

        #[test]
        fn trivial_syndrome_matches_code_projection(children in proptest::array::uniform7(dist())) {
            let d = block_decompose_713(&children);
            let r = d.get(0).unwrap();
            for logical in Pauli::ALL {
                let from_cosets: f64 = Pauli::ALL.iter().map(|l| r.cosets[l.index()] * l.sign(logical)).sum();
                prop_assert!((from_cosets - trivial_syndrome_channel(&children, logical)).abs() < 1e-13);
            }
        }
    }
}
