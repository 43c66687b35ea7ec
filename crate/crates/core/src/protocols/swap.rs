use serde::Serialize;
use crate::fock::ModeRegister;
use crate::optics::{apply_beam_splitter, detect_single_photon, BeamSplitter, DetectionEvent};
use super::{Herald, ProtoResult, ProtocolError, ProtocolResult, SingleRailPair, Tag};

const D1: &str = "D1";
const D2: &str = "D2";

/// Entanglement swapping: mixes the inner modes `b` and `c` at the station
/// splitter and detects. A single click leaves `(a, d)` entangled with
/// coefficients `(α_ab α_cd, ±β_ab β_cd)`, `+` for D1 and `−` for D2. The
/// zero- and two-photon detector branches are returned as failures.
pub fn swap(pair_ab: &SingleRailPair, pair_cd: &SingleRailPair) -> ProtoResult<Vec<ProtocolResult>> {
    let (a, b) = (pair_ab.mode_a(), pair_ab.mode_b());
    let (c, d) = (pair_cd.mode_a(), pair_cd.mode_b());
    ModeRegister::new([a, b, c, d, D1, D2])
        .map_err(|_| ProtocolError::Parameter(format!(
            "swap needs distinct modes, got {a}, {b}, {c}, {d} and detectors {D1}, {D2}")))?;
    let state = pair_ab.to_state().tensor(&pair_cd.to_state())?;
    let mixed = apply_beam_splitter(&state, &BeamSplitter::swap_station(b, c, D1, D2))?;

    let mut results = Vec::new();
    let mut clicked = 0.0;
    for det in detect_single_photon(&mixed, &[D1, D2])? {
        clicked += det.probability;
        let herald = Herald::default().with("swap-detect", det.event.label(), det.probability);
        let (tag, pair) = match det.event {
            DetectionEvent::Click(_) => (Tag::Success, Some(SingleRailPair::from_state(&det.post_state)?)),
            DetectionEvent::MultiPhoton(_) => (Tag::Failure, None),
        };
        results.push(ProtocolResult {
            tag,
            herald,
            probability: det.probability,
            state: det.post_state,
            pending_flip: None,
            pair,
            modes: None,
        });
    }
    let none = mixed.project_photons(&[D1, D2], |n| n == 0)?;
    if let Some(state) = none.state {
        results.push(ProtocolResult {
            tag: Tag::Failure,
            herald: Herald::default().with("swap-detect", "none", none.probability),
            probability: none.probability,
            state: state.remove_definite_modes(&[D1, D2])?,
            pending_flip: None,
            pair: None,
            modes: None,
        });
    }
    debug_assert!((clicked + none.probability - 1.0).abs() < 1e-12);
    Ok(results)
}

/// Result of a chain of swaps along a given sequence of detector clicks.
#[derive(Clone, Debug, Serialize)]
pub struct ChainOutcome {
    pub pair: SingleRailPair,
    pub herald: Herald,
    /// Probability of observing this exact click sequence.
    pub probability: f64,
    /// Cumulative relative sign, `(−1)^(number of D2 clicks)`.
    pub sign: i8,
}

/// Extends `pair` across `clicks.len()` further identical links, keeping
/// the branch named at each step (`"D1"` or `"D2"`).
pub fn swap_chain_along(pair: &SingleRailPair, clicks: &[&str]) -> ProtoResult<ChainOutcome> {
    let (end_a, end_k) = (pair.mode_a().to_string(), pair.mode_b().to_string());
    let mut current = pair.with_modes("a", "b")?;
    let link = pair.with_modes("c", "d")?;
    let mut herald = Herald::default();
    let mut probability = 1.0;
    let mut sign = 1i8;
    for (step, &click) in clicks.iter().enumerate() {
        if click != D1 && click != D2 {
            return Err(ProtocolError::Parameter(format!("unknown detector '{click}'")));
        }
        let branch = swap(&current, &link)?
            .into_iter()
            .find(|r| r.tag == Tag::Success && r.herald.last_outcome() == Some(click))
            .ok_or_else(|| ProtocolError::Contract(format!("step {}: no {click} branch", step + 1)))?;
        probability *= branch.probability;
        herald.push("swap-detect", click, branch.probability);
        if click == D2 {
            sign = -sign;
        }
        let next = branch.pair.expect("single click yields a pair");
        current = next.with_modes("a", "b")?;
    }
    Ok(ChainOutcome {
        pair: current.with_modes(&end_a, &end_k)?,
        herald,
        probability,
        sign,
    })
}

/// `n` swaps with identical links, following D1 clicks throughout.
pub fn swap_chain(pair: &SingleRailPair, n: usize) -> ProtoResult<SingleRailPair> {
    if n == 0 {
        return Err(ProtocolError::Parameter("swap chain needs n >= 1".into()));
    }
    Ok(swap_chain_along(pair, &vec![D1; n])?.pair)
}

/// Closed form of `n` D1-heralded swaps: coefficients `(α^{n+1}, β^{n+1})`.
pub fn swap_chain_closed_form(pair: &SingleRailPair, n: usize) -> ProtoResult<SingleRailPair> {
    let k = n as u32 + 1;
    SingleRailPair::new(pair.alpha().powu(k), pair.beta().powu(k), pair.mode_a(), pair.mode_b())
}
