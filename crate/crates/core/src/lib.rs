//! Certification of genuine high-dimensional quantum steering.
//!
//! Two-setting steering data (either a full assemblage or coincidence counts
//! from measurements in a pair of mutually unbiased bases) is turned into a
//! lower bound on the steering robustness, which in turn lower-bounds the
//! Schmidt number of the shared state. Small instances can be cross-checked
//! against an exact semidefinite computation of the robustness.
//!
//! Bipartite index convention used everywhere: the composite index of
//! `|j⟩_A ⊗ |k⟩_B` is `j * dim_b + k`.

pub mod assemblage;
pub mod error;
pub mod expdata;
pub mod mub;
pub mod qcore;
pub mod robustness;
pub mod sdp;

pub use error::{Error, Result};
pub use nalgebra::Complex;

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
