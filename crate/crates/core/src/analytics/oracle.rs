//! Exhaustive enumeration of the iterated protocol's herald tree.
//!
//! Built directly on the state-vector and optics layers, independent of the
//! protocol orchestration and of any closed form. Each path of the tree is a
//! sequence of recorded outcomes (QND class, detector) and carries its own
//! post-measurement state; branch probabilities come from the simulation.

use std::f64::consts::PI;
use num_complex::Complex64 as C64;
use crate::fock::{superpose, FockState, ModeRegister};
use crate::optics::{
    apply_beam_splitter, detect_single_photon, phase_flip, qnd_measure, BeamSplitter,
    DetectionEvent, QndConfig,
};
use super::{check_coefficients, AnalyticsError, AnalyticsResult};

/// Tree size doubles with every round.
pub const MAX_ORACLE_ROUNDS: usize = 16;

/// Expected maximally entangled outputs per original source pair, for each
/// round `1..=n_rounds`, with a π-phase QND reader.
///
/// A round-`n` attempt pairs two copies of a round-`(n−1)` recycled pair and
/// so stands for 2ⁿ source pairs; the attempts reaching round `n` per source
/// pair are the recycling probabilities along the path divided by 2ⁿ.
pub fn yield_oracle(alpha: C64, beta: C64, n_rounds: usize) -> AnalyticsResult<Vec<f64>> {
    check_coefficients(alpha, beta)?;
    if n_rounds == 0 {
        return Err(AnalyticsError::Domain("n_rounds must be >= 1".into()));
    }
    if n_rounds > MAX_ORACLE_ROUNDS {
        return Err(AnalyticsError::Capacity(n_rounds));
    }
    let vac = FockState::vacuum(ModeRegister::new(["a", "b"])?)?;
    let start = superpose(&[(alpha, &vac.create("a")?), (beta, &vac.create("b")?)])?;
    let mut per_round = vec![0.0; n_rounds];
    explore(&start, 0, 1.0, &mut per_round)?;
    Ok(per_round)
}

fn explore(pair: &FockState, depth: usize, weight: f64, acc: &mut [f64]) -> AnalyticsResult<()> {
    if depth == acc.len() || weight == 0.0 {
        return Ok(());
    }
    let left = pair.relabel(&[("a", "a1"), ("b", "b1")])?;
    let right = pair.relabel(&[("a", "a2"), ("b", "b2")])?;
    let joint = left.tensor(&right)?;
    let source_pairs = 2f64.powi(depth as i32 + 1);
    let bs = BeamSplitter::concentration("a2", "b2", "c2", "d2");

    for q in qnd_measure(&joint, &QndConfig::new(["b1", "b2"], PI))? {
        let odd = q.class.iter().all(|n| n % 2 == 1);
        let even = q.class.iter().all(|n| n % 2 == 0);
        let mixed = apply_beam_splitter(&q.post_state, &bs)?;
        for d in detect_single_photon(&mixed, &["c2", "d2"])? {
            let DetectionEvent::Click(detector) = &d.event else { continue };
            let p = weight * q.probability * d.probability;
            if odd {
                acc[depth] += p / source_pairs;
            } else if even {
                let mut next = d.post_state.clone();
                if detector == "d2" {
                    next = phase_flip(&next, "b1")?;
                }
                let next = next.relabel(&[("a1", "a"), ("b1", "b")])?;
                explore(&next, depth + 1, p, acc)?;
            }
        }
    }
    Ok(())
}
