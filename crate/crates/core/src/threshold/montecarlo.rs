//! Population-dynamics estimate of the [[7,1,3]] concatenation threshold.
//!
//! Each level holds a population of logical error distributions. A member of
//! the next level is built from seven random members of the current one: the
//! block is decomposed by syndrome, a syndrome is drawn with its probability,
//! and the maximum-likelihood recovered logical distribution for that
//! syndrome becomes the new member. Every member has its own ChaCha stream
//! keyed by `(seed, level, index)`, so results do not depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codes::{block_table_713, SyndromeRecord};
use crate::noise_models::NoiseFamily;
use crate::pauli_algebra::PauliDist;
use crate::postselect::Pipeline;
use crate::{Error, Result};

/// Physical noise fed into the first level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConcatNoise {
    /// `(1 - p, 0, 0, p)` on every qubit, no gate or measurement noise.
    OneType,
    /// Teleportation output of a CNOT noise family.
    Family(NoiseFamily),
}

impl ConcatNoise {
    pub fn level_zero(&self, p: f64) -> Result<PauliDist> {
        match self {
            ConcatNoise::OneType => PauliDist::phase_flip(p),
            ConcatNoise::Family(f) => Ok(Pipeline::run(&f.at(p))?.output),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ConcatNoise::OneType => "one-type".to_string(),
            ConcatNoise::Family(f) => f.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub population: usize,
    pub levels: usize,
    pub seed: u64,
    /// Independent bisections, one per derived seed.
    pub seeds: usize,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    /// Mean infidelity that counts as having converged to zero.
    pub below: f64,
    /// The divergence mark is the largest mean infidelity among the first
    /// `mark_levels` levels, starting at level 0.
    pub mark_levels: usize,
    /// Consecutive levels that sit above the divergence mark and do not fall
    /// below the previous level; that many in a row count as divergence.
    pub rise_levels: usize,
    /// Growth is only counted at levels after this one.
    pub rise_after: usize,
}

impl McConfig {
    pub fn new(seed: u64, lo: f64, hi: f64) -> Self {
        McConfig {
            population: 10_000,
            levels: 40,
            seed,
            seeds: 10,
            lo,
            hi,
            tol: 2e-4,
            below: 1e-6,
            mark_levels: 2,
            rise_levels: 3,
            rise_after: 4,
        }
    }

    /// Default bracket around each known regime.
    pub fn for_noise(noise: &ConcatNoise, seed: u64) -> Self {
        let (lo, hi) = match noise {
            ConcatNoise::OneType => (0.105, 0.115),
            ConcatNoise::Family(NoiseFamily::Depolarizing { .. }) => (0.078, 0.087),
            ConcatNoise::Family(NoiseFamily::Knill) => (0.064, 0.073),
            ConcatNoise::Family(_) => (0.044, 0.052),
        };
        Self::new(seed, lo, hi)
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 7 || self.levels == 0 || self.seeds == 0 || self.mark_levels == 0 {
            return Err(Error::InvalidParameter(
                "population ≥ 7 and at least one level, seed and mark level required".into(),
            ));
        }
        if !(self.lo < self.hi && self.lo >= 0.0 && self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bracket [{}, {}] tol {}",
                self.lo, self.hi, self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Below,
    Above,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PopulationRun {
    /// Mean infidelity per level, starting at level 0.
    pub infidelity: Vec<f64>,
    pub verdict: Verdict,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn member_rng(seed: u64, level: usize, index: usize) -> ChaCha8Rng {
    let key = splitmix(splitmix(splitmix(seed) ^ level as u64) ^ index as u64);
    ChaCha8Rng::seed_from_u64(key)
}

fn infidelity(d: &PauliDist) -> f64 {
    let [_, x, y, z] = d.as_array();
    x + y + z
}

fn next_member(pop: &[PauliDist], rng: &mut ChaCha8Rng) -> PauliDist {
    let children: [PauliDist; 7] = std::array::from_fn(|_| pop[rng.gen_range(0..pop.len())]);
    let table = block_table_713(&children);
    let total: f64 = (0..64).map(|s| table.syndrome_weight(s)).sum();
    let mut u = rng.gen::<f64>() * total;
    let mut chosen = 63;
    for s in 0..64 {
        let w = table.syndrome_weight(s);
        if u < w {
            chosen = s;
            break;
        }
        u -= w;
    }
    // a zero-weight fallback can only be hit through rounding at the very end
    while table.syndrome_weight(chosen) == 0.0 {
        chosen -= 1;
    }
    let rec: SyndromeRecord = table.record(chosen).expect("positive weight");
    rec.logical
}

/// Evolve one population through the levels and classify the run.
pub fn run_population(
    noise: &ConcatNoise,
    p: f64,
    cfg: &McConfig,
    seed: u64,
) -> Result<PopulationRun> {
    let start = noise.level_zero(p)?;
    let e0 = infidelity(&start);
    let mut pop = vec![start; cfg.population];
    let mut trace = vec![e0];
    let mut rising = 0;
    for level in 1..=cfg.levels {
        pop = (0..cfg.population)
            .into_par_iter()
            .map(|i| next_member(&pop, &mut member_rng(seed, level, i)))
            .collect();
        let mean = pop.iter().map(infidelity).sum::<f64>() / cfg.population as f64;
        trace.push(mean);
        if mean < cfg.below {
            return Ok(PopulationRun {
                infidelity: trace,
                verdict: Verdict::Below,
            });
        }
        let mark = trace[..cfg.mark_levels.min(level)]
            .iter()
            .copied()
            .fold(0.0, f64::max);
        // a saturated population stops growing but must still count
        let not_falling = mean >= trace[level - 1] - 1e-12;
        if level > cfg.rise_after && mean > mark && not_falling {
            rising += 1;
            if rising >= cfg.rise_levels {
                return Ok(PopulationRun {
                    infidelity: trace,
                    verdict: Verdict::Above,
                });
            }
        } else {
            rising = 0;
        }
    }
    Ok(PopulationRun {
        infidelity: trace,
        verdict: Verdict::Inconclusive,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub threshold: f64,
    /// Bootstrap standard error of the mean over seeds.
    pub error_bar: f64,
    pub per_seed: Vec<f64>,
    pub population: usize,
    pub levels: usize,
    pub seed: u64,
}

fn bisect_seed(noise: &ConcatNoise, cfg: &McConfig, seed: u64) -> Result<f64> {
    let (mut lo, mut hi) = (cfg.lo, cfg.hi);
    let (mut moved_lo, mut moved_hi) = (false, false);
    while hi - lo > cfg.tol {
        let mid = 0.5 * (lo + hi);
        match run_population(noise, mid, cfg, seed)?.verdict {
            Verdict::Below => {
                lo = mid;
                moved_lo = true;
            }
            Verdict::Above => {
                hi = mid;
                moved_hi = true;
            }
            Verdict::Inconclusive => {
                return Err(Error::Inconclusive(format!(
                    "{} at p = {mid} (seed {seed}, {} levels)",
                    noise.name(),
                    cfg.levels
                )))
            }
        }
    }
    if !moved_lo || !moved_hi {
        return Err(Error::BracketFailure {
            lo: cfg.lo,
            hi: cfg.hi,
            reason: format!("threshold estimate sits at the bracket edge for seed {seed}"),
        });
    }
    Ok(0.5 * (lo + hi))
}

fn bootstrap_error(values: &[f64], seed: u64) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    const RESAMPLES: usize = 2000;
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ 0xB007));
    let n = values.len();
    let means: Vec<f64> = (0..RESAMPLES)
        .map(|_| (0..n).map(|_| values[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    let mu = means.iter().sum::<f64>() / RESAMPLES as f64;
    (means.iter().map(|m| (m - mu).powi(2)).sum::<f64>() / (RESAMPLES - 1) as f64).sqrt()
}

/// Threshold of the concatenated [[7,1,3]] code, averaged over independent
/// seeds with a bootstrap error bar.
pub fn concat_threshold_mc(noise: &ConcatNoise, cfg: &McConfig) -> Result<McEstimate> {
    cfg.validate()?;
    let per_seed = (0..cfg.seeds)
        .map(|k| bisect_seed(noise, cfg, splitmix(cfg.seed.wrapping_add(k as u64))))
        .collect::<Result<Vec<f64>>>()?;
    let threshold = per_seed.iter().sum::<f64>() / per_seed.len() as f64;
    Ok(McEstimate {
        threshold,
        error_bar: bootstrap_error(&per_seed, cfg.seed),
        per_seed,
        population: cfg.population,
        levels: cfg.levels,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> McConfig {
        McConfig {
            population: 300,
            levels: 8,
            seeds: 2,
            ..McConfig::new(seed, 0.09, 0.13)
        }
    }

    #[test]
    fn clear_cases() {
        let cfg = small(3);
        let low = run_population(&ConcatNoise::OneType, 0.02, &cfg, 1).unwrap();
        assert_eq!(low.verdict, Verdict::Below);
        let high = run_population(&ConcatNoise::OneType, 0.2, &cfg, 1).unwrap();
        assert_eq!(high.verdict, Verdict::Above);
        assert!(high.infidelity.last().unwrap() > &0.2);
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = small(5);
        let a = run_population(&ConcatNoise::OneType, 0.1, &cfg, 9).unwrap();
        let b = run_population(&ConcatNoise::OneType, 0.1, &cfg, 9).unwrap();
        assert_eq!(a, b);
        let c = run_population(&ConcatNoise::OneType, 0.1, &cfg, 10).unwrap();
        assert_ne!(a.infidelity, c.infidelity);
    }

    #[test]
    fn config_validation() {
        let mut cfg = small(1);
        cfg.hi = cfg.lo;
        assert!(concat_threshold_mc(&ConcatNoise::OneType, &cfg).is_err());
    }

    #[test]
    fn bootstrap_of_constant_is_zero() {
        assert!(bootstrap_error(&[0.1, 0.1, 0.1], 4) < 1e-13);
    }
}
