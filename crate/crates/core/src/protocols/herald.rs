use serde::Serialize;
use crate::fock::FockState;
use crate::optics::phase_flip;
use super::{concentration::RoundModes, ProtoResult, SingleRailPair};

/// One measurement stage in a herald record. `probability` is conditional on
/// the preceding events.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeraldEvent {
    pub stage: String,
    pub outcome: String,
    pub probability: f64,
}

/// Ordered classical measurement record.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Herald(pub Vec<HeraldEvent>);

impl Herald {
    pub fn push(&mut self, stage: &str, outcome: impl Into<String>, probability: f64) {
        self.0.push(HeraldEvent { stage: stage.into(), outcome: outcome.into(), probability });
    }

    pub fn with(&self, stage: &str, outcome: impl Into<String>, probability: f64) -> Self {
        let mut next = self.clone();
        next.push(stage, outcome, probability);
        next
    }

    pub fn events(&self) -> &[HeraldEvent] { &self.0 }

    pub fn last_outcome(&self) -> Option<&str> {
        self.0.last().map(|e| e.outcome.as_str())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Tag {
    Success,
    Recyclable,
    Failure,
}

/// One branch of a heralded procedure.
#[derive(Clone, Debug)]
pub struct ProtocolResult {
    pub tag: Tag,
    pub herald: Herald,
    /// Absolute probability of this branch.
    pub probability: f64,
    /// Post-measurement state, before any pending correction.
    pub state: FockState,
    /// Mode whose phase flip turns `state` into the intended state.
    pub pending_flip: Option<String>,
    /// `state` read back as a pair, when it is one.
    pub pair: Option<SingleRailPair>,
    pub(crate) modes: Option<RoundModes>,
}

impl ProtocolResult {
    pub fn corrected_state(&self) -> ProtoResult<FockState> {
        match &self.pending_flip {
            Some(mode) => Ok(phase_flip(&self.state, mode)?),
            None => Ok(self.state.clone()),
        }
    }

    pub fn corrected_pair(&self) -> ProtoResult<Option<SingleRailPair>> {
        if self.pair.is_none() {
            return Ok(None);
        }
        SingleRailPair::from_state(&self.corrected_state()?).map(Some)
    }
}
