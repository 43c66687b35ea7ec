//! Sparse state vectors over a small register of bosonic modes.
//!
//! A [`FockState`] stores only the nonzero amplitudes, keyed by the per-mode
//! photon numbers of each basis ket. Terms are kept in a `BTreeMap` so that
//! iteration (and therefore every serialized form) is in lexicographic order
//! of the occupation vector.
//!
//! Every operation returns a new state. Registers carry a photon-number
//! cutoff on the *total* photon number of a ket; exceeding it is an error
//! rather than a silent truncation.

use std::{
    collections::{BTreeMap, HashMap, HashSet},
    fmt,
};
use num_complex::Complex64 as C64;
use serde::{Serialize, Serializer, ser::SerializeStruct};
use thiserror::Error;

/// Default cutoff on the total photon number of any stored ket.
pub const DEFAULT_CUTOFF: u32 = 2;

/// Amplitudes with modulus below this are dropped.
pub const DEFAULT_PRUNE_TOLERANCE: f64 = 1e-15;

/// A combination whose norm falls below this cannot be normalized.
pub const DEGENERATE_NORM: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    /// Malformed register or state construction.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// Unknown, duplicated, or mismatched modes.
    #[error("register error: {0}")]
    Register(String),

    /// A ket would carry more photons than the register cutoff allows.
    #[error("capacity error: {photons} photons exceeds cutoff {cutoff}")]
    Capacity { photons: u32, cutoff: u32 },

    /// Normalization of a (near-)zero vector.
    #[error("degenerate state: norm {0:e} is too small to normalize")]
    Degenerate(f64),

    /// NaN or infinite amplitude.
    #[error("non-finite amplitude")]
    NonFinite,
}

pub type FockResult<T> = Result<T, FockError>;

/// A named mode together with its position in a [`ModeRegister`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModeId {
    pub name: String,
    pub index: usize,
}

/// Ordered set of uniquely named spatial modes plus the photon cutoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeRegister {
    names: Vec<String>,
    cutoff: u32,
}

impl ModeRegister {
    /// Register with the default cutoff of 2 photons.
    pub fn new<I, S>(names: I) -> FockResult<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_cutoff(names, DEFAULT_CUTOFF)
    }

    pub fn with_cutoff<I, S>(names: I, cutoff: u32) -> FockResult<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = HashSet::with_capacity(names.len());
        for name in names.iter() {
            if name.is_empty() {
                return Err(FockError::Register("empty mode name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(FockError::Register(format!("duplicate mode name '{name}'")));
            }
        }
        Ok(Self { names, cutoff })
    }

    pub fn len(&self) -> usize { self.names.len() }

    pub fn is_empty(&self) -> bool { self.names.is_empty() }

    pub fn cutoff(&self) -> u32 { self.cutoff }

    pub fn names(&self) -> &[String] { &self.names }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool { self.index_of(name).is_some() }

    pub fn mode(&self, name: &str) -> FockResult<ModeId> {
        self.index_of(name)
            .map(|index| ModeId { name: name.to_string(), index })
            .ok_or_else(|| FockError::Register(format!("unknown mode '{name}'")))
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeId> + '_ {
        self.names.iter().enumerate()
            .map(|(index, name)| ModeId { name: name.clone(), index })
    }

    /// `true` if both registers hold the same set of names, in any order.
    pub fn same_modes(&self, other: &Self) -> bool {
        self.len() == other.len() && self.names.iter().all(|n| other.contains(n))
    }
}

/// Per-mode photon numbers of one basis ket, ordered by register index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Occupation(pub Vec<u32>);

impl Occupation {
    pub fn vacuum(len: usize) -> Self { Self(vec![0; len]) }

    pub fn total(&self) -> u32 { self.0.iter().sum() }

    pub fn get(&self, index: usize) -> u32 { self.0[index] }

    pub fn counts(&self) -> &[u32] { &self.0 }

    /// Total photon number over the given register slots.
    pub fn total_in(&self, indices: &[usize]) -> u32 {
        indices.iter().map(|&k| self.0[k]).sum()
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(v: Vec<u32>) -> Self { Self(v) }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 { write!(f, ",")?; }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// Result of a projective post-selection.
#[derive(Clone, Debug)]
pub struct Projection {
    /// Σ|amp|² over the retained terms.
    pub probability: f64,
    /// Renormalized retained state; `None` flags an impossible branch.
    pub state: Option<FockState>,
}

impl Projection {
    pub fn is_empty(&self) -> bool { self.state.is_none() }
}

/// Sparse pure state over a [`ModeRegister`].
#[derive(Clone, Debug)]
pub struct FockState {
    register: ModeRegister,
    terms: BTreeMap<Occupation, C64>,
    tolerance: f64,
}

impl FockState {
    /// The vacuum ket over a non-empty register.
    pub fn vacuum(register: ModeRegister) -> FockResult<Self> {
        if register.is_empty() {
            return Err(FockError::Configuration(
                "vacuum requires a non-empty register".into()));
        }
        let mut terms = BTreeMap::new();
        terms.insert(Occupation::vacuum(register.len()), C64::new(1.0, 0.0));
        Ok(Self { register, terms, tolerance: DEFAULT_PRUNE_TOLERANCE })
    }

    /// Builds a state from explicit terms. Repeated occupations are summed.
    /// The result is not normalized.
    pub fn from_terms<I, O>(register: ModeRegister, terms: I) -> FockResult<Self>
    where
        I: IntoIterator<Item = (O, C64)>,
        O: Into<Occupation>,
    {
        let mut map: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ, amp) in terms {
            let occ = occ.into();
            if occ.0.len() != register.len() {
                return Err(FockError::Configuration(format!(
                    "occupation of length {} on a register of {} modes",
                    occ.0.len(), register.len())));
            }
            check_cutoff(&occ, register.cutoff)?;
            check_finite(amp)?;
            *map.entry(occ).or_insert(C64::new(0.0, 0.0)) += amp;
        }
        let mut state = Self { register, terms: map, tolerance: DEFAULT_PRUNE_TOLERANCE };
        state.prune();
        Ok(state)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> FockResult<Self> {
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(FockError::Configuration(
                format!("invalid pruning tolerance {tolerance}")));
        }
        self.tolerance = tolerance;
        self.prune();
        Ok(self)
    }

    pub fn register(&self) -> &ModeRegister { &self.register }

    pub fn tolerance(&self) -> f64 { self.tolerance }

    pub fn len(&self) -> usize { self.terms.len() }

    pub fn is_empty(&self) -> bool { self.terms.is_empty() }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &C64)> {
        self.terms.iter()
    }

    /// Amplitude of the ket with the given occupation (zero if absent).
    pub fn amplitude(&self, counts: &[u32]) -> C64 {
        self.terms.get(&Occupation(counts.to_vec()))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Amplitude addressed by mode name; unnamed modes are taken as empty.
    pub fn amplitude_of(&self, occupied: &[(&str, u32)]) -> FockResult<C64> {
        let mut counts = vec![0; self.register.len()];
        for &(name, n) in occupied {
            counts[self.index(name)?] = n;
        }
        Ok(self.amplitude(&counts))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&self) -> FockResult<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm < DEGENERATE_NORM {
            return Err(FockError::Degenerate(norm));
        }
        Ok(self.map_amplitudes(|_, a| a / norm))
    }

    /// Applies the bosonic creation operator on `mode`. Not normalized.
    pub fn create(&self, mode: &str) -> FockResult<Self> {
        let k = self.index(mode)?;
        let mut terms = BTreeMap::new();
        for (occ, amp) in self.terms.iter() {
            let mut next = occ.clone();
            let n = next.0[k];
            next.0[k] = n + 1;
            check_cutoff(&next, self.register.cutoff)?;
            terms.insert(next, amp * f64::from(n + 1).sqrt());
        }
        Ok(self.with_terms(self.register.clone(), terms))
    }

    /// Tensor product; the result register is `self`'s modes followed by
    /// `other`'s, with the larger of the two cutoffs.
    pub fn tensor(&self, other: &Self) -> FockResult<Self> {
        for name in other.register.names() {
            if self.register.contains(name) {
                return Err(FockError::Register(
                    format!("mode '{name}' present on both sides of a tensor product")));
            }
        }
        let names = self.register.names().iter().chain(other.register.names()).cloned();
        let cutoff = self.register.cutoff.max(other.register.cutoff);
        let register = ModeRegister::with_cutoff(names, cutoff)?;
        let mut terms = BTreeMap::new();
        for (lo, la) in self.terms.iter() {
            for (ro, ra) in other.terms.iter() {
                let mut counts = lo.0.clone();
                counts.extend_from_slice(&ro.0);
                let occ = Occupation(counts);
                check_cutoff(&occ, cutoff)?;
                terms.insert(occ, la * ra);
            }
        }
        Ok(self.with_terms(register, terms))
    }

    /// Keeps the terms whose occupation satisfies `keep`.
    pub fn project<P>(&self, keep: P) -> Projection
    where P: Fn(&Occupation) -> bool
    {
        let kept: BTreeMap<Occupation, C64> = self.terms.iter()
            .filter(|(occ, _)| keep(occ))
            .map(|(occ, amp)| (occ.clone(), *amp))
            .collect();
        let probability: f64 = kept.values().map(|a| a.norm_sqr()).sum();
        let total = self.norm_sqr();
        let probability = if total > 0.0 { probability / total } else { 0.0 };
        if kept.is_empty() || probability == 0.0 {
            return Projection { probability: 0.0, state: None };
        }
        let state = self.with_terms(self.register.clone(), kept);
        match state.normalize() {
            Ok(state) => Projection { probability, state: Some(state) },
            Err(_) => Projection { probability, state: None },
        }
    }

    /// Keeps the terms whose total photon number over `modes` satisfies `keep`.
    pub fn project_photons<P>(&self, modes: &[&str], keep: P) -> FockResult<Projection>
    where P: Fn(u32) -> bool
    {
        let idx = self.indices(modes)?;
        Ok(self.project(|occ| keep(occ.total_in(&idx))))
    }

    /// ⟨self|other⟩. Registers must hold the same modes; order may differ.
    pub fn inner(&self, other: &Self) -> FockResult<C64> {
        let other = other.aligned_to(&self.register)?;
        Ok(self.terms.iter()
            .filter_map(|(occ, a)| other.terms.get(occ).map(|b| a.conj() * b))
            .sum())
    }

    /// |⟨target|state⟩|² for normalized inputs, clamped to [0, 1].
    pub fn fidelity(&self, target: &Self) -> FockResult<f64> {
        let overlap = target.inner(self)?.norm_sqr();
        let norms = self.norm_sqr() * target.norm_sqr();
        if norms == 0.0 {
            return Ok(0.0);
        }
        Ok((overlap / norms).clamp(0.0, 1.0))
    }

    /// Renames modes. Unmapped modes keep their names; the final names must
    /// be unique. When the renaming only permutes existing names the slots
    /// are reordered so the register itself is unchanged.
    pub fn relabel(&self, mapping: &[(&str, &str)]) -> FockResult<Self> {
        let mut rename: HashMap<&str, &str> = HashMap::new();
        for &(old, new) in mapping {
            if !self.register.contains(old) {
                return Err(FockError::Register(format!("unknown mode '{old}' in relabeling")));
            }
            if rename.insert(old, new).is_some() {
                return Err(FockError::Register(format!("mode '{old}' mapped twice")));
            }
        }
        let names: Vec<String> = self.register.names().iter()
            .map(|n| rename.get(n.as_str()).map_or_else(|| n.clone(), |s| s.to_string()))
            .collect();
        let register = ModeRegister::with_cutoff(names, self.register.cutoff)
            .map_err(|_| FockError::Register("relabeling is not a bijection".into()))?;
        let renamed = Self {
            register,
            terms: self.terms.clone(),
            tolerance: self.tolerance,
        };
        if renamed.register.same_modes(&self.register) {
            renamed.aligned_to(&self.register)
        } else {
            Ok(renamed)
        }
    }

    /// Reorders the register slots to match `target`, which must hold the
    /// same set of mode names.
    pub fn aligned_to(&self, target: &ModeRegister) -> FockResult<Self> {
        if self.register.names() == target.names() {
            return Ok(self.clone());
        }
        if !self.register.same_modes(target) {
            return Err(FockError::Register(format!(
                "registers {:?} and {:?} hold different modes",
                self.register.names(), target.names())));
        }
        let perm: Vec<usize> = target.names().iter()
            .map(|n| self.register.index_of(n).expect("same modes"))
            .collect();
        let terms = self.terms.iter()
            .map(|(occ, amp)| (Occupation(perm.iter().map(|&k| occ.0[k]).collect()), *amp))
            .collect();
        let register = ModeRegister::with_cutoff(target.names().iter().cloned(), self.register.cutoff)?;
        Ok(self.with_terms(register, terms))
    }

    /// Drops `modes` from the register. Each dropped mode must hold the same
    /// photon number in every term (as it does after a projective detection).
    pub fn remove_definite_modes(&self, modes: &[&str]) -> FockResult<Self> {
        let idx = self.indices(modes)?;
        let mut fixed: Option<Vec<u32>> = None;
        for occ in self.terms.keys() {
            let vals: Vec<u32> = idx.iter().map(|&k| occ.0[k]).collect();
            match &fixed {
                None => fixed = Some(vals),
                Some(f) if *f != vals => {
                    return Err(FockError::Register(format!(
                        "modes {modes:?} are not in a definite Fock state")));
                }
                _ => {}
            }
        }
        let keep: Vec<usize> = (0..self.register.len()).filter(|k| !idx.contains(k)).collect();
        let names = keep.iter().map(|&k| self.register.names[k].clone());
        let register = ModeRegister::with_cutoff(names, self.register.cutoff)?;
        let terms = self.terms.iter()
            .map(|(occ, amp)| (Occupation(keep.iter().map(|&k| occ.0[k]).collect()), *amp))
            .collect();
        Ok(self.with_terms(register, terms))
    }

    /// Replaces the register and transforms each amplitude. Used by the
    /// optics layer for diagonal unitaries.
    pub fn map_amplitudes<F>(&self, f: F) -> Self
    where F: Fn(&Occupation, C64) -> C64
    {
        let terms = self.terms.iter().map(|(occ, amp)| (occ.clone(), f(occ, *amp))).collect();
        self.with_terms(self.register.clone(), terms)
    }

    /// Debug serialization: `(occupation, re, im)` in lexicographic order.
    pub fn triples(&self) -> Vec<(Vec<u32>, f64, f64)> {
        self.terms.iter().map(|(occ, a)| (occ.0.clone(), a.re, a.im)).collect()
    }

    pub(crate) fn index(&self, name: &str) -> FockResult<usize> {
        self.register.mode(name).map(|m| m.index)
    }

    pub(crate) fn indices(&self, names: &[&str]) -> FockResult<Vec<usize>> {
        names.iter().map(|n| self.index(n)).collect()
    }

    /// Builds a sibling state with the same tolerance, pruning dust.
    pub(crate) fn with_terms(&self, register: ModeRegister, terms: BTreeMap<Occupation, C64>) -> Self {
        let mut state = Self { register, terms, tolerance: self.tolerance };
        state.prune();
        state
    }

    fn prune(&mut self) {
        let tol = self.tolerance;
        self.terms.retain(|_, a| a.norm() >= tol && a.norm() > 0.0);
    }
}

/// Normalized linear combination of states over a common set of modes.
/// Later states are aligned to the first state's register ordering.
pub fn superpose(terms: &[(C64, &FockState)]) -> FockResult<FockState> {
    let Some((_, first)) = terms.first() else {
        return Err(FockError::Configuration("empty superposition".into()));
    };
    let register = first.register.clone();
    let mut acc: BTreeMap<Occupation, C64> = BTreeMap::new();
    for (coef, state) in terms {
        check_finite(*coef)?;
        let state = state.aligned_to(&register)?;
        for (occ, amp) in state.terms {
            *acc.entry(occ).or_insert(C64::new(0.0, 0.0)) += coef * amp;
        }
    }
    let combined = first.with_terms(register, acc);
    combined.normalize()
}

impl PartialEq for FockState {
    fn eq(&self, other: &Self) -> bool {
        self.register == other.register && self.terms == other.terms
    }
}

impl Serialize for FockState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FockState", 2)?;
        s.serialize_field("modes", self.register.names())?;
        s.serialize_field("terms", &self.triples())?;
        s.end()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (occ, amp)) in self.terms.iter().enumerate() {
            if k > 0 { write!(f, " + ")?; }
            write!(f, "({:.6}{:+.6}i){}", amp.re, amp.im, occ)?;
        }
        Ok(())
    }
}

fn check_cutoff(occ: &Occupation, cutoff: u32) -> FockResult<()> {
    let photons = occ.total();
    if photons > cutoff {
        Err(FockError::Capacity { photons, cutoff })
    } else {
        Ok(())
    }
}

fn check_finite(amp: C64) -> FockResult<()> {
    if amp.re.is_finite() && amp.im.is_finite() { Ok(()) } else { Err(FockError::NonFinite) }
}
