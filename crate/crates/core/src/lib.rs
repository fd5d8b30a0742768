//! Lagrangian flow maps for the 2D incompressible Euler and Euler-α
//! (second-grade fluid) equations on the flat periodic torus.
//!
//! The Eulerian velocity is advanced pseudo-spectrally; passive particles
//! carry the flow map η, its tangent map Tη and an independently integrated
//! inverse tangent map, so that volume preservation and inverse consistency
//! can be checked directly.

pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod flowmap;
pub mod ic;
pub mod simulate;
pub mod snapshot;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
