use serde::Serialize;
use super::{
    concentration_round, recyclable_to_pair, ProtoResult, ProtocolError, SingleRailPair, Tag,
};

/// One round of the lockstep iteration.
///
/// Probabilities are per attempt, where an attempt pairs two copies of the
/// round's input. `reach_probability` is the chance that a lineage of
/// attempts survives (recycles) through all earlier rounds.
#[derive(Clone, Debug, Serialize)]
pub struct RoundEntry {
    pub round: usize,
    pub reach_probability: f64,
    pub success_probability: f64,
    pub recycle_probability: f64,
    pub failure_probability: f64,
    /// Pair fed into this round; `None` when the round is unreachable.
    pub input: Option<SingleRailPair>,
    /// Corrected pair produced by the recyclable branch.
    pub recycled: Option<SingleRailPair>,
    /// Original source pairs consumed by one attempt in this round (2ⁿ).
    pub source_pairs_per_attempt: f64,
    /// Expected successes in this round per original source pair.
    pub yield_per_source_pair: f64,
    pub cumulative_yield: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationLedger {
    pub qnd_theta: f64,
    pub entries: Vec<RoundEntry>,
}

impl IterationLedger {
    pub fn total_yield(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.cumulative_yield)
    }
}

/// Exact probability propagation through `rounds` concentration rounds.
///
/// Recycled pairs are all identical after correction, so round `n + 1`
/// simply pairs two copies of round `n`'s recycled output.
pub fn iterate_concentration(
    pair: &SingleRailPair,
    rounds: usize,
    qnd_theta: f64,
) -> ProtoResult<IterationLedger> {
    if rounds == 0 {
        return Err(ProtocolError::Parameter("rounds must be >= 1".into()));
    }
    let mut entries = Vec::with_capacity(rounds);
    let mut input = Some(pair.with_modes("a1", "b1")?);
    let mut reach = 1.0;
    let mut cumulative = 0.0;
    for round in 1..=rounds {
        let source_pairs_per_attempt = 2f64.powi(round as i32);
        let Some(current) = input.take() else {
            entries.push(RoundEntry {
                round,
                reach_probability: 0.0,
                success_probability: 0.0,
                recycle_probability: 0.0,
                failure_probability: 0.0,
                input: None,
                recycled: None,
                source_pairs_per_attempt,
                yield_per_source_pair: 0.0,
                cumulative_yield: cumulative,
            });
            continue;
        };
        let copy = current.with_modes("a2", "b2")?;
        let results = concentration_round(&current, &copy, qnd_theta)?;
        let sum = |tag| results.iter().filter(|r| r.tag == tag).map(|r| r.probability).sum::<f64>();
        let (success, recycle, failure) = (sum(Tag::Success), sum(Tag::Recyclable), sum(Tag::Failure));
        let recycled = results.iter()
            .find(|r| r.tag == Tag::Recyclable)
            .map(recyclable_to_pair)
            .transpose()?;
        let yield_here = reach * success / source_pairs_per_attempt;
        cumulative += yield_here;
        entries.push(RoundEntry {
            round,
            reach_probability: reach,
            success_probability: success,
            recycle_probability: recycle,
            failure_probability: failure,
            input: Some(current),
            recycled: recycled.clone(),
            source_pairs_per_attempt,
            yield_per_source_pair: yield_here,
            cumulative_yield: cumulative,
        });
        reach *= recycle;
        input = recycled;
    }
    Ok(IterationLedger { qnd_theta, entries })
}
