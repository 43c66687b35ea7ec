//! Few-mode bosonic state-vector simulation of single-rail (single-photon)
//! entanglement: heralded generation, entanglement swapping, and
//! entanglement concentration with a cross-Kerr QND reader.
//!
//! Layers, bottom to top:
//!
//! - [`fock`]: sparse state vectors over named modes.
//! - [`optics`]: beam splitters, the QND reader, photon detectors.
//! - [`protocols`]: generation, swapping, and the concentration round.
//! - [`analytics`]: the yield series and its enumeration oracle.

pub mod analytics;
pub mod fock;
pub mod optics;
pub mod protocols;

pub use num_complex::Complex64 as C64;
