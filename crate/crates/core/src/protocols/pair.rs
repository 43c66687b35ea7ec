use std::f64::consts::TAU;
use num_complex::Complex64 as C64;
use serde::Serialize;
use crate::fock::{FockState, ModeRegister, superpose};
use super::{ProtocolError, ProtoResult};

/// Coefficient normalization is checked against this.
pub const PAIR_NORM_TOLERANCE: f64 = 1e-12;

/// Pair-source excitation parameters for the two ends of a link.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct SourceParams {
    pub p_a: f64,
    pub p_b: f64,
    /// Relative phase between the two ends, in radians.
    pub theta_ab: f64,
}

impl SourceParams {
    pub fn new(p_a: f64, p_b: f64, theta_ab: f64) -> ProtoResult<Self> {
        for (name, p) in [("p_a", p_a), ("p_b", p_b)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(ProtocolError::Parameter(format!("{name} = {p} must lie in (0, 1)")));
            }
        }
        if !theta_ab.is_finite() {
            return Err(ProtocolError::Parameter("theta_ab must be finite".into()));
        }
        Ok(Self { p_a, p_b, theta_ab })
    }
}

/// `(α a† + β b†)|0⟩` with `|α|² + |β|² = 1`.
///
/// Stored in canonical form with `arg α = 0`, so the relative phase lives
/// entirely in `arg β`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingleRailPair {
    alpha: C64,
    beta: C64,
    mode_a: String,
    mode_b: String,
}

impl SingleRailPair {
    /// Normalizes and canonicalizes arbitrary (not both zero) coefficients.
    pub fn new(alpha: C64, beta: C64, mode_a: &str, mode_b: &str) -> ProtoResult<Self> {
        if mode_a == mode_b {
            return Err(ProtocolError::Parameter("pair modes must differ".into()));
        }
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(ProtocolError::Parameter("pair coefficients vanish".into()));
        }
        let reference = if alpha.norm() > 0.0 { alpha } else { beta };
        let phase = reference / reference.norm();
        Ok(Self {
            alpha: alpha / (phase * norm),
            beta: beta / (phase * norm),
            mode_a: mode_a.into(),
            mode_b: mode_b.into(),
        })
    }

    /// Pair with `|α|² = alpha_sq` and relative phase `theta`.
    pub fn from_alpha_sq(alpha_sq: f64, theta: f64, mode_a: &str, mode_b: &str) -> ProtoResult<Self> {
        if !(0.0..=1.0).contains(&alpha_sq) {
            return Err(ProtocolError::Parameter(format!("|alpha|^2 = {alpha_sq} outside [0, 1]")));
        }
        Self::new(
            C64::new(alpha_sq.sqrt(), 0.0),
            C64::from_polar((1.0 - alpha_sq).sqrt(), theta),
            mode_a,
            mode_b,
        )
    }

    /// Reads a pair back from a one-photon state on exactly two modes.
    pub fn from_state(state: &FockState) -> ProtoResult<Self> {
        let names = state.register().names();
        if names.len() != 2 {
            return Err(ProtocolError::Contract(format!(
                "pair state must live on two modes, found {names:?}")));
        }
        if state.terms().any(|(occ, _)| occ.total() != 1) {
            return Err(ProtocolError::Contract("pair state must carry exactly one photon".into()));
        }
        Self::new(state.amplitude(&[1, 0]), state.amplitude(&[0, 1]), &names[0], &names[1])
    }

    pub fn alpha(&self) -> C64 { self.alpha }

    pub fn beta(&self) -> C64 { self.beta }

    pub fn alpha_sq(&self) -> f64 { self.alpha.norm_sqr() }

    pub fn beta_sq(&self) -> f64 { self.beta.norm_sqr() }

    pub fn mode_a(&self) -> &str { &self.mode_a }

    pub fn mode_b(&self) -> &str { &self.mode_b }

    /// `arg β − arg α`, wrapped to `[0, 2π)`.
    pub fn theta(&self) -> f64 {
        (self.beta.arg() - self.alpha.arg()).rem_euclid(TAU)
    }

    pub fn with_modes(&self, mode_a: &str, mode_b: &str) -> ProtoResult<Self> {
        Self::new(self.alpha, self.beta, mode_a, mode_b)
    }

    /// Same coefficients with the `b` amplitude negated.
    pub fn flipped(&self) -> Self {
        Self { beta: -self.beta, ..self.clone() }
    }

    /// Equality of coefficients (modes ignored) within `tol`.
    pub fn same_coefficients(&self, other: &Self, tol: f64) -> bool {
        (self.alpha - other.alpha).norm() <= tol && (self.beta - other.beta).norm() <= tol
    }

    pub fn to_state(&self) -> FockState {
        let reg = ModeRegister::new([self.mode_a.as_str(), self.mode_b.as_str()])
            .expect("distinct pair modes");
        let vac = FockState::vacuum(reg).expect("two-mode register");
        let a = vac.create(&self.mode_a).expect("mode present");
        let b = vac.create(&self.mode_b).expect("mode present");
        superpose(&[(self.alpha, &a), (self.beta, &b)]).expect("normalized pair")
    }

    /// The balanced pair `(a† + b†)/√2 |0⟩` on the given modes.
    pub fn maximally_entangled(mode_a: &str, mode_b: &str) -> Self {
        Self::from_alpha_sq(0.5, 0.0, mode_a, mode_b).expect("valid modes")
    }
}
