//! One concentration round on two identical single-rail pairs.
//!
//! The two `b` modes pass through a QND reader. A one-photon reading keeps
//! only the `a₁b₂`/`a₂b₁` terms, which carry equal coefficients; mixing `a₂`
//! and `b₂` on a beam splitter and detecting the output then heralds a
//! balanced pair on `(a₁, b₁)`. With a probe phase of π the 0- and 2-photon
//! readings are indistinguishable, and that branch is kept for recycling.

use std::f64::consts::PI;
use crate::fock::{FockState, ModeRegister};
use crate::optics::{
    apply_beam_splitter, detect_single_photon, phase_flip, qnd_measure, BeamSplitter,
    DetectionEvent, QndConfig,
};
use super::{Herald, ProtoResult, ProtocolError, ProtocolResult, SingleRailPair, Tag};

/// Coefficients of the two copies must agree to this for a round to run.
const IDENTICAL_COPIES: f64 = 1e-12;

/// Mode names used by a round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundModes {
    pub a1: String,
    pub b1: String,
    pub a2: String,
    pub b2: String,
    /// Beam-splitter outputs watched by the detectors D1 and D2.
    pub c2: String,
    pub d2: String,
}

impl RoundModes {
    fn from_pairs(pair1: &SingleRailPair, pair2: &SingleRailPair) -> ProtoResult<Self> {
        let modes = Self {
            a1: pair1.mode_a().into(),
            b1: pair1.mode_b().into(),
            a2: pair2.mode_a().into(),
            b2: pair2.mode_b().into(),
            c2: "c2".into(),
            d2: "d2".into(),
        };
        ModeRegister::new([&modes.a1, &modes.b1, &modes.a2, &modes.b2, &modes.c2, &modes.d2]
            .map(String::as_str))
            .map_err(|_| ProtocolError::Parameter(format!(
                "round needs six distinct modes, got {modes:?}")))?;
        Ok(modes)
    }

    fn splitter(&self) -> BeamSplitter {
        BeamSplitter::concentration(&self.a2, &self.b2, &self.c2, &self.d2)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundOptions {
    /// Cross-Kerr phase per photon.
    pub qnd_theta: f64,
    /// Apply the D2 phase flip to the state instead of recording it.
    pub eager_phase_flip: bool,
    /// Run on non-identical copies instead of rejecting them. Exploratory.
    pub allow_mismatched: bool,
}

impl Default for RoundOptions {
    fn default() -> Self {
        Self { qnd_theta: PI, eager_phase_flip: false, allow_mismatched: false }
    }
}

impl RoundOptions {
    pub fn with_theta(qnd_theta: f64) -> Self {
        Self { qnd_theta, ..Self::default() }
    }
}

/// Runs one round with default options at the given QND phase.
pub fn concentration_round(
    pair1: &SingleRailPair,
    pair2: &SingleRailPair,
    qnd_theta: f64,
) -> ProtoResult<Vec<ProtocolResult>> {
    concentration_round_with(pair1, pair2, &RoundOptions::with_theta(qnd_theta))
}

pub fn concentration_round_with(
    pair1: &SingleRailPair,
    pair2: &SingleRailPair,
    opts: &RoundOptions,
) -> ProtoResult<Vec<ProtocolResult>> {
    if !opts.allow_mismatched && !pair1.same_coefficients(pair2, IDENTICAL_COPIES) {
        return Err(ProtocolError::Precondition(
            "concentration needs two identical copies of the pair".into()));
    }
    let modes = RoundModes::from_pairs(pair1, pair2)?;
    let state = pair1.to_state().tensor(&pair2.to_state())?;
    let qnd = QndConfig::new([&modes.b1, &modes.b2], opts.qnd_theta);

    let mut results = Vec::new();
    for outcome in qnd_measure(&state, &qnd)? {
        let herald = Herald::default().with("qnd", class_label(&outcome.class), outcome.probability);
        match outcome.class.as_slice() {
            [1] => {
                let detected = detect_round(&outcome.post_state, &modes, &herald, outcome.probability,
                    Tag::Success, opts.eager_phase_flip)?;
                results.extend(detected);
            }
            [0, 2] => results.push(ProtocolResult {
                tag: Tag::Recyclable,
                herald,
                probability: outcome.probability,
                state: outcome.post_state,
                pending_flip: None,
                pair: None,
                modes: Some(modes.clone()),
            }),
            _ => results.push(ProtocolResult {
                tag: Tag::Failure,
                herald,
                probability: outcome.probability,
                state: outcome.post_state,
                pending_flip: None,
                pair: None,
                modes: None,
            }),
        }
    }
    Ok(results)
}

/// Mixes `(a₂, b₂)` on the beam splitter and detects its outputs. A D2 click
/// leaves a relative minus sign on `b₁`, recorded as a pending flip.
fn detect_round(
    state: &FockState,
    modes: &RoundModes,
    herald: &Herald,
    probability: f64,
    tag: Tag,
    eager_flip: bool,
) -> ProtoResult<Vec<ProtocolResult>> {
    let mixed = apply_beam_splitter(state, &modes.splitter())?;
    let detectors = [modes.c2.as_str(), modes.d2.as_str()];
    let mut results = Vec::new();
    let mut clicked = 0.0;
    for det in detect_single_photon(&mixed, &detectors)? {
        clicked += det.probability;
        let herald = herald.with("detect", det.event.label(), det.probability);
        let probability = probability * det.probability;
        match det.event {
            DetectionEvent::Click(ref d) => {
                let needs_flip = *d == modes.d2;
                let (state, pending_flip) = match (needs_flip, eager_flip) {
                    (true, true) => (phase_flip(&det.post_state, &modes.b1)?, None),
                    (true, false) => (det.post_state, Some(modes.b1.clone())),
                    (false, _) => (det.post_state, None),
                };
                let pair = Some(SingleRailPair::from_state(&state)?);
                results.push(ProtocolResult {
                    tag, herald, probability, state, pending_flip, pair, modes: None,
                });
            }
            DetectionEvent::MultiPhoton(_) => results.push(ProtocolResult {
                tag: Tag::Failure,
                herald,
                probability,
                state: det.post_state,
                pending_flip: None,
                pair: None,
                modes: None,
            }),
        }
    }
    let silent = 1.0 - clicked;
    if silent > 1e-15 {
        if let Some(state) = mixed.project(|occ| {
            let c = mixed.register().index_of(&modes.c2).expect("detector mode");
            let d = mixed.register().index_of(&modes.d2).expect("detector mode");
            occ.get(c) + occ.get(d) == 0
        }).state {
            results.push(ProtocolResult {
                tag: Tag::Failure,
                herald: herald.with("detect", "none", silent),
                probability: probability * silent,
                state,
                pending_flip: None,
                pair: None,
                modes: None,
            });
        }
    }
    Ok(results)
}

/// Reduces a recyclable two-photon branch to single-rail pairs on `(a₁, b₁)`,
/// one result per detector outcome.
pub fn recyclable_branches(result: &ProtocolResult) -> ProtoResult<Vec<ProtocolResult>> {
    if result.tag != Tag::Recyclable {
        return Err(ProtocolError::Contract(format!(
            "expected a Recyclable result, got {:?}", result.tag)));
    }
    let modes = result.modes.as_ref().ok_or_else(|| ProtocolError::Contract(
        "recyclable result has already been reduced to a pair".into()))?;
    let mut branches = detect_round(&result.state, modes, &result.herald, result.probability,
        Tag::Recyclable, false)?;
    for b in branches.iter_mut() {
        if let Some(last) = b.herald.0.last_mut() {
            last.stage = "recycle-detect".into();
        }
    }
    Ok(branches)
}

/// The corrected single-rail pair obtained from a recyclable branch.
pub fn recyclable_to_pair(result: &ProtocolResult) -> ProtoResult<SingleRailPair> {
    recyclable_branches(result)?
        .iter()
        .find(|b| b.pair.is_some())
        .map(|b| b.corrected_pair())
        .transpose()?
        .flatten()
        .ok_or_else(|| ProtocolError::Contract("recyclable branch produced no pair".into()))
}

fn class_label(class: &[u32]) -> String {
    let inner: Vec<String> = class.iter().map(u32::to_string).collect();
    format!("{{{}}}", inner.join(","))
}
