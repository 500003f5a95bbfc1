//! Operational entanglement of two independently prepared identical
//! particles probed by spatially localized measurements.
//!
//! States are handled in the no-label picture: a two-particle state is an
//! unordered pair of one-particle states combined with the exchange sign η.
//! On top of that the crate computes localized partial traces, the
//! conditioned pseudospin state and its entropy, the projected
//! one-particle-per-region state with its concurrence, a conditional
//! teleportation protocol that uses the pair as its resource, and a
//! distinguishable-particle baseline. Every quantity has an independent
//! counterpart in [`oracle`], which works with explicitly symmetrized
//! tensor-product vectors.

pub mod algebra;
pub mod baseline;
pub mod basis;
pub mod check;
pub mod cli;
pub mod density;
pub mod entanglement;
pub mod error;
pub mod exec;
pub mod oracle;
pub mod random;
pub mod teleport;

pub use algebra::{norm, overlap_two, partial_overlap, TwoParticleState};
pub use basis::{Alphabet, Pseudospin, Region, SingleParticleState, SpatialWavefunction, Spinor, Statistics};
pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use exec::Execution;

/// Default absolute tolerance for normalization and consistency checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
