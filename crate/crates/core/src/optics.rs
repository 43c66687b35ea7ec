//! Linear-optical elements and measurements acting on [`FockState`]s.
//!
//! The cross-Kerr QND reader is modelled as an ideal projective measurement
//! of the total photon number in its monitored modes. The coherent probe only
//! acts as a pointer: photon counts `n` and `m` are indistinguishable whenever
//! an X-quadrature homodyne readout sees the same `cos(nθ)`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use num_complex::Complex64 as C64;
use crate::fock::{FockError, FockResult, FockState, ModeRegister, Occupation};

/// Two probe phases are read as equal when their cosines agree to this.
pub const QND_DISTINGUISHABILITY: f64 = 1e-9;

/// Which input port of a 50:50 beam splitter picks up the minus sign on the
/// second output.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MinusOn {
    First,
    Second,
}

/// A 50:50 beam splitter mapping `input.k† → (out.0† ± out.1†)/√2`.
///
/// The output modes take over the slots of the input modes, so outputs may
/// either reuse the input names or introduce fresh ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeamSplitter {
    pub inputs: (String, String),
    pub outputs: (String, String),
    pub minus_on: MinusOn,
}

impl BeamSplitter {
    pub fn new(
        inputs: (&str, &str),
        outputs: (&str, &str),
        minus_on: MinusOn,
    ) -> Self {
        Self {
            inputs: (inputs.0.into(), inputs.1.into()),
            outputs: (outputs.0.into(), outputs.1.into()),
            minus_on,
        }
    }

    /// Concentration convention: `x† → (c† − d†)/√2`, `y† → (c† + d†)/√2`.
    pub fn concentration(x: &str, y: &str, c: &str, d: &str) -> Self {
        Self::new((x, y), (c, d), MinusOn::First)
    }

    /// Swap-station convention: `x† → (D1† + D2†)/√2`, `y† → (D1† − D2†)/√2`.
    pub fn swap_station(x: &str, y: &str, d1: &str, d2: &str) -> Self {
        Self::new((x, y), (d1, d2), MinusOn::Second)
    }

    /// Row `k` holds the output coefficients of input `k`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let h = FRAC_1_SQRT_2;
        match self.minus_on {
            MinusOn::First => [[h, -h], [h, h]],
            MinusOn::Second => [[h, h], [h, -h]],
        }
    }
}

/// Applies `bs` to every term of `state`.
pub fn apply_beam_splitter(state: &FockState, bs: &BeamSplitter) -> FockResult<FockState> {
    let reg = state.register();
    let i = state.index(&bs.inputs.0)?;
    let j = state.index(&bs.inputs.1)?;
    if i == j {
        return Err(FockError::Register("beam splitter inputs must differ".into()));
    }
    if bs.outputs.0 == bs.outputs.1 {
        return Err(FockError::Register("beam splitter outputs must differ".into()));
    }
    let mut names: Vec<String> = reg.names().to_vec();
    names[i] = bs.outputs.0.clone();
    names[j] = bs.outputs.1.clone();
    let out_reg = ModeRegister::with_cutoff(names, reg.cutoff())
        .map_err(|_| FockError::Register(format!(
            "beam splitter outputs {:?} collide with existing modes", bs.outputs)))?;

    let u = bs.matrix();
    let mut terms: BTreeMap<Occupation, C64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let (n1, n2) = (occ.get(i), occ.get(j));
        let total = n1 + n2;
        let norm_in = (factorial(n1) * factorial(n2)).sqrt();
        for k in 0..=n1 {
            for l in 0..=n2 {
                let coef = binomial(n1, k) * binomial(n2, l)
                    * u[0][0].powi(k as i32) * u[0][1].powi((n1 - k) as i32)
                    * u[1][0].powi(l as i32) * u[1][1].powi((n2 - l) as i32);
                let m = k + l;
                let norm_out = (factorial(m) * factorial(total - m)).sqrt();
                let mut next = occ.clone();
                next.0[i] = m;
                next.0[j] = total - m;
                if next.total() > reg.cutoff() {
                    return Err(FockError::Capacity { photons: next.total(), cutoff: reg.cutoff() });
                }
                *terms.entry(next).or_insert(C64::new(0.0, 0.0))
                    += amp * (coef * norm_out / norm_in);
            }
        }
    }
    Ok(state.with_terms(out_reg, terms))
}

/// Multiplies every term by `(−1)^n` where `n` is the photon number in `mode`.
pub fn phase_flip(state: &FockState, mode: &str) -> FockResult<FockState> {
    let k = state.index(mode)?;
    Ok(state.map_amplitudes(|occ, a| if occ.get(k) % 2 == 1 { -a } else { a }))
}

/// Cross-Kerr QND photon-number reader.
#[derive(Clone, Debug, PartialEq)]
pub struct QndConfig {
    pub monitored: Vec<String>,
    /// Probe phase shift per signal photon, in radians.
    pub theta: f64,
}

impl QndConfig {
    pub fn new<I, S>(monitored: I, theta: f64) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self { monitored: monitored.into_iter().map(Into::into).collect(), theta }
    }

    /// Partition of `0..=cutoff` into homodyne-indistinguishable classes,
    /// each sorted and listed in order of its smallest count.
    pub fn classes(&self, cutoff: u32) -> Vec<Vec<u32>> {
        let mut classes: Vec<(f64, Vec<u32>)> = Vec::new();
        for n in 0..=cutoff {
            let x = (f64::from(n) * self.theta).cos();
            match classes.iter_mut().find(|(rep, _)| (rep - x).abs() < QND_DISTINGUISHABILITY) {
                Some((_, members)) => members.push(n),
                None => classes.push((x, vec![n])),
            }
        }
        classes.into_iter().map(|(_, m)| m).collect()
    }
}

#[derive(Clone, Debug)]
pub struct QndOutcome {
    /// Photon counts consistent with the observed probe phase.
    pub class: Vec<u32>,
    pub probability: f64,
    pub post_state: FockState,
}

/// Nondemolition measurement of the monitored-mode photon number. Returns one
/// outcome per class with nonzero probability; the monitored photons stay in
/// the post-measurement state.
pub fn qnd_measure(state: &FockState, config: &QndConfig) -> FockResult<Vec<QndOutcome>> {
    let monitored: Vec<&str> = config.monitored.iter().map(String::as_str).collect();
    let idx = state.indices(&monitored)?;
    let mut outcomes = Vec::new();
    for class in config.classes(state.register().cutoff()) {
        let proj = state.project(|occ| class.contains(&occ.total_in(&idx)));
        if let Some(post_state) = proj.state {
            outcomes.push(QndOutcome { class, probability: proj.probability, post_state });
        }
    }
    Ok(outcomes)
}

/// What the detector bank reported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DetectionEvent {
    /// Exactly one photon, registered by the named detector.
    Click(String),
    /// Two or more photons across the bank, with per-detector counts. Kept
    /// separate so that protocol layers decide whether to discard it.
    MultiPhoton(Vec<(String, u32)>),
}

impl DetectionEvent {
    pub fn label(&self) -> String {
        match self {
            Self::Click(d) => d.clone(),
            Self::MultiPhoton(counts) => counts.iter()
                .map(|(d, n)| format!("{d}={n}"))
                .collect::<Vec<_>>()
                .join("+"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DetectionOutcome {
    pub event: DetectionEvent,
    pub probability: f64,
    /// Remaining state with the detector modes traced out.
    pub post_state: FockState,
}

/// Photon-counting detection on `detectors`. One outcome per nonzero
/// detector pattern with at least one photon; the no-click branch is not
/// reported.
pub fn detect_single_photon(state: &FockState, detectors: &[&str]) -> FockResult<Vec<DetectionOutcome>> {
    let idx = state.indices(detectors)?;
    let mut patterns: Vec<Vec<u32>> = state.terms()
        .map(|(occ, _)| idx.iter().map(|&k| occ.get(k)).collect::<Vec<u32>>())
        .filter(|p| p.iter().sum::<u32>() > 0)
        .collect();
    patterns.sort();
    patterns.dedup();
    // single clicks first, in detector order
    patterns.sort_by_key(|p| (p.iter().sum::<u32>(), std::cmp::Reverse(p.clone())));

    let mut outcomes = Vec::with_capacity(patterns.len());
    for pattern in patterns {
        let proj = state.project(|occ| idx.iter().zip(&pattern).all(|(&k, &n)| occ.get(k) == n));
        let Some(post) = proj.state else { continue };
        let event = if pattern.iter().sum::<u32>() == 1 {
            let which = pattern.iter().position(|&n| n == 1).expect("one photon");
            DetectionEvent::Click(detectors[which].to_string())
        } else {
            DetectionEvent::MultiPhoton(detectors.iter().zip(&pattern)
                .filter(|(_, &n)| n > 0)
                .map(|(d, &n)| (d.to_string(), n))
                .collect())
        };
        outcomes.push(DetectionOutcome {
            event,
            probability: proj.probability,
            post_state: post.remove_definite_modes(detectors)?,
        });
    }
    Ok(outcomes)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}
