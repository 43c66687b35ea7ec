//! Stochastic sampling of herald outcomes, for checking the exact branch
//! probabilities. Trials are split into fixed-size chunks, each with its
//! own ChaCha stream derived from the seed, so results do not depend on the
//! number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use super::{
    concentration_round, iterate_concentration, Generation, ProtoResult, ProtocolError,
    SingleRailPair, Tag,
};

const CHUNK: u64 = 8192;

/// Empirical outcome frequencies of a single concentration round.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundStatistics {
    pub trials: u64,
    pub successes: u64,
    pub recycles: u64,
    pub failures: u64,
    pub success_frequency: f64,
    pub recycle_frequency: f64,
    pub failure_frequency: f64,
    pub success_stderr: f64,
    pub recycle_stderr: f64,
    pub failure_stderr: f64,
}

/// Samples `trials` independent rounds on two copies of `pair`.
pub fn run_monte_carlo(
    pair: &SingleRailPair,
    trials: u64,
    qnd_theta: f64,
    seed: u64,
) -> ProtoResult<RoundStatistics> {
    if trials == 0 {
        return Err(ProtocolError::Parameter("trials must be >= 1".into()));
    }
    let results = concentration_round(
        &pair.with_modes("a1", "b1")?, &pair.with_modes("a2", "b2")?, qnd_theta)?;
    let weights: Vec<(Tag, f64)> = results.iter().map(|r| (r.tag, r.probability)).collect();
    let counts = chunked(trials, seed, |rng, n| {
        let mut c = [0u64; 3];
        for _ in 0..n {
            let slot = match sample(rng, &weights) {
                Some(Tag::Success) => 0,
                Some(Tag::Recyclable) => 1,
                _ => 2,
            };
            c[slot] += 1;
        }
        c.to_vec()
    }, 3);
    let freq = |k: usize| counts[k] as f64 / trials as f64;
    let se = |k: usize| binomial_stderr(freq(k), trials);
    Ok(RoundStatistics {
        trials,
        successes: counts[0],
        recycles: counts[1],
        failures: counts[2],
        success_frequency: freq(0),
        recycle_frequency: freq(1),
        failure_frequency: freq(2),
        success_stderr: se(0),
        recycle_stderr: se(1),
        failure_stderr: se(2),
    })
}

/// Monte Carlo estimate of the per-source-pair yield of one round.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YieldEstimate {
    pub round: usize,
    /// Lineages that succeeded in this round.
    pub successes: u64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Samples `trials` attempt lineages through up to `rounds` rounds. A
/// lineage stops at its first success or failure and continues on a
/// recycle; a success in round `n` counts `1/2ⁿ` per source pair.
pub fn sample_yield(
    pair: &SingleRailPair,
    rounds: usize,
    qnd_theta: f64,
    trials: u64,
    seed: u64,
) -> ProtoResult<Vec<YieldEstimate>> {
    if trials == 0 {
        return Err(ProtocolError::Parameter("trials must be >= 1".into()));
    }
    let ledger = iterate_concentration(pair, rounds, qnd_theta)?;
    let steps: Vec<(f64, f64)> = ledger.entries.iter()
        .map(|e| (e.success_probability, e.recycle_probability))
        .collect();
    let counts = chunked(trials, seed, |rng, n| {
        let mut c = vec![0u64; rounds];
        for _ in 0..n {
            for (k, &(s, r)) in steps.iter().enumerate() {
                let u: f64 = rng.gen();
                if u < s {
                    c[k] += 1;
                    break;
                } else if u >= s + r {
                    break;
                }
            }
        }
        c
    }, rounds);
    Ok(counts.iter().enumerate().map(|(k, &successes)| {
        let scale = 2f64.powi(k as i32 + 1);
        let f = successes as f64 / trials as f64;
        YieldEstimate {
            round: k + 1,
            successes,
            estimate: f / scale,
            stderr: binomial_stderr(f, trials) / scale,
        }
    }).collect())
}

/// Empirical single-click rate of a generation attempt.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeraldEstimate {
    pub trials: u64,
    pub clicks: u64,
    pub frequency: f64,
    pub stderr: f64,
}

/// Samples `trials` generation attempts against the exact click probability.
pub fn sample_heralds(generation: &Generation, trials: u64, seed: u64) -> ProtoResult<HeraldEstimate> {
    if trials == 0 {
        return Err(ProtocolError::Parameter("trials must be >= 1".into()));
    }
    let p = generation.click_probability;
    let counts = chunked(trials, seed, |rng, n| {
        vec![(0..n).filter(|_| rng.gen::<f64>() < p).count() as u64]
    }, 1);
    let frequency = counts[0] as f64 / trials as f64;
    Ok(HeraldEstimate {
        trials,
        clicks: counts[0],
        frequency,
        stderr: binomial_stderr(frequency, trials),
    })
}

pub(crate) fn binomial_stderr(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

fn sample(rng: &mut ChaCha8Rng, weights: &[(Tag, f64)]) -> Option<Tag> {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(tag, w) in weights {
        acc += w;
        if u < acc {
            return Some(tag);
        }
    }
    None
}

fn chunked<F>(trials: u64, seed: u64, run: F, width: usize) -> Vec<u64>
where F: Fn(&mut ChaCha8Rng, u64) -> Vec<u64> + Sync
{
    let chunks = trials.div_ceil(CHUNK);
    let partial: Vec<Vec<u64>> = (0..chunks).into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let n = CHUNK.min(trials - k * CHUNK);
            run(&mut rng, n)
        })
        .collect();
    partial.into_iter().fold(vec![0; width], |mut acc, c| {
        acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn deterministic_given_seed() {
        let p = SingleRailPair::from_alpha_sq(0.7, 0.2, "a", "b").unwrap();
        let x = run_monte_carlo(&p, 20_000, PI, 11).unwrap();
        let y = run_monte_carlo(&p, 20_000, PI, 11).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.successes + x.recycles + x.failures, 20_000);
        let z = run_monte_carlo(&p, 20_000, PI, 12).unwrap();
        assert_ne!(x, z);
    }

    #[test]
    fn recycle_frequency() {
        let p = SingleRailPair::from_alpha_sq(0.8, 0.0, "a", "b").unwrap();
        let s = run_monte_carlo(&p, 100_000, PI, 3).unwrap();
        let se = binomial_stderr(0.68, 100_000);
        assert!((s.recycle_frequency - 0.68).abs() < 3.0 * se);
        assert_eq!(s.failures, 0);
    }

    #[test]
    fn zero_trials_rejected() {
        let p = SingleRailPair::from_alpha_sq(0.8, 0.0, "a", "b").unwrap();
        assert!(run_monte_carlo(&p, 0, PI, 1).is_err());
    }
}
