//! Numerical deformation theory for matrix Lie groups.
//!
//! Given a smooth family of homomorphisms `φ_ε: H → G` (or of embedded
//! subgroups), this crate computes the deformation cocycles, searches for a
//! smooth transgression (Haar averaging for compact `H`, least squares
//! otherwise) and integrates the Moser flow that reconstructs the
//! conjugating path. The outcome is a [`homo::TrivialityCertificate`].

pub mod cohomology;
pub mod error;
pub mod flow;
pub mod homo;
pub mod lie;
pub mod subgroup;

pub use error::{LabError, Result};
