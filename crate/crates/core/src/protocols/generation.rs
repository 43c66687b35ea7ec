use num_complex::Complex64 as C64;
use serde::Serialize;
use crate::fock::{superpose, FockState, ModeRegister};
use crate::optics::{apply_beam_splitter, detect_single_photon, BeamSplitter, DetectionEvent};
use super::{Herald, ProtoResult, ProtocolError, SingleRailPair, SourceParams};

/// Heralded single-rail pair from two pair sources and a central station.
#[derive(Clone, Debug, Serialize)]
pub struct Generation {
    /// First-order heralding probability `(p_a + p_b)/2`.
    pub herald_probability: f64,
    /// Single-click probability of the simulated (normalized, first-order)
    /// source state, `q/(1+q)` with `q = (p_a + p_b)/2`.
    pub click_probability: f64,
    /// Pair heralded by a D1 click.
    pub pair: SingleRailPair,
    /// `false` when `p_a + p_b ≥ 1`, where dropping multi-pair terms is
    /// no longer a small correction.
    pub first_order_valid: bool,
    pub herald: Herald,
}

/// Builds the first-order source state `[1 + √(p_a/2) a†a'† + √(p_b/2) e^{iθ} b†b'†]|0⟩`,
/// mixes `a'` and `b'` on the swap-station splitter, and keeps the D1 click.
pub fn generate_entanglement(params: &SourceParams) -> ProtoResult<Generation> {
    let params = SourceParams::new(params.p_a, params.p_b, params.theta_ab)?;
    let first_order_valid = params.p_a + params.p_b < 1.0;
    if !first_order_valid {
        log::warn!("p_a + p_b = {} >= 1: first-order source approximation is invalid",
            params.p_a + params.p_b);
    }
    let reg = ModeRegister::new(["a", "a'", "b", "b'"])?;
    let vac = FockState::vacuum(reg)?;
    let pair_a = vac.create("a")?.create("a'")?;
    let pair_b = vac.create("b")?.create("b'")?;
    let source = superpose(&[
        (C64::new(1.0, 0.0), &vac),
        (C64::new((params.p_a / 2.0).sqrt(), 0.0), &pair_a),
        (C64::from_polar((params.p_b / 2.0).sqrt(), params.theta_ab), &pair_b),
    ])?;
    let mixed = apply_beam_splitter(&source, &BeamSplitter::swap_station("a'", "b'", "D1", "D2"))?;
    let outcomes = detect_single_photon(&mixed, &["D1", "D2"])?;
    let click_probability = outcomes.iter()
        .filter(|o| matches!(o.event, DetectionEvent::Click(_)))
        .map(|o| o.probability)
        .sum();
    let d1 = outcomes.iter()
        .find(|o| o.event == DetectionEvent::Click("D1".into()))
        .ok_or_else(|| ProtocolError::Contract("no D1 click branch".into()))?;
    let mut herald = Herald::default();
    herald.push("generate-detect", "D1", d1.probability);
    Ok(Generation {
        herald_probability: (params.p_a + params.p_b) / 2.0,
        click_probability,
        pair: SingleRailPair::from_state(&d1.post_state)?,
        first_order_valid,
        herald,
    })
}
