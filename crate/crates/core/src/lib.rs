//! Superradiant emission of two dipoles in a planar microcavity.
//!
//! * [`params`]: cavity and emitter parameters with their derived scales.
//! * [`decay`]: the cooperative decay rate Γ(R, t) from the image-dipole sum.
//! * [`correlation`]: F(τ), analyzer histograms and the decay-rate fit.
//! * [`partition`]: Bose-Einstein and Maxwell-Boltzmann photon partitions.
//! * [`hbt`]: Monte Carlo of the coincidence experiment.
//! * [`config`]: JSON configuration documents.

pub mod config;
pub mod correlation;
pub mod decay;
pub mod error;
pub mod hbt;
pub mod params;
pub mod partition;

pub use error::{Error, Result};
