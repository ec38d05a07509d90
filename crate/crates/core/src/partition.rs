//! Partition of a photon pair over the two counter-propagating output modes
//! k and k′ of the cavity.
//!
//! Raw probabilities cover the three occupation outcomes (2,0), (1,1) and
//! (0,2). The conditioned pair restricts to the event class {(2,0), (1,1)},
//! i.e. `P(2,0) + P(1,1) = 1`, which is how the one-sided and two-sided
//! coincidence measurements are compared.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{transverse_coherence_length, CavityParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionProbabilities {
    pub p20: f64,
    pub p11: f64,
    pub p02: f64,
    pub conditioned_p20: f64,
    pub conditioned_p11: f64,
}

impl PartitionProbabilities {
    /// Builds the record from a mirror-symmetric raw triple `(p20, p11, p20)`.
    fn from_raw(p20: f64, p11: f64, p02: f64) -> Self {
        let norm = p20 + p11;
        Self {
            p20,
            p11,
            p02,
            conditioned_p20: p20 / norm,
            conditioned_p11: p11 / norm,
        }
    }

    pub fn raw(&self) -> [f64; 3] {
        [self.p20, self.p11, self.p02]
    }
}

/// Indistinguishable photons: equal weight 1/3 on each occupation state of
/// `(|2,0⟩ + |1,1⟩ + |0,2⟩)/√3`.
pub fn bose_einstein() -> PartitionProbabilities {
    let third = 1.0 / 3.0;
    PartitionProbabilities::from_raw(third, third, third)
}

/// Distinguishable photons, each picking a mode independently with
/// probability 1/2.
pub fn maxwell_boltzmann() -> PartitionProbabilities {
    PartitionProbabilities::from_raw(0.25, 0.5, 0.25)
}

/// Mode-overlap parameter η = exp(−(R/ℓ_c)²).
pub fn indistinguishability(separation: f64, coherence_length: f64) -> Result<f64> {
    if !(separation >= 0.0) {
        return Err(Error::Domain(format!(
            "separation must be >= 0, got {separation}"
        )));
    }
    if !(coherence_length > 0.0) {
        return Err(Error::Domain(format!(
            "coherence length must be > 0, got {coherence_length}"
        )));
    }
    let x = separation / coherence_length;
    Ok((-x * x).exp())
}

/// Convex mixture `η·BE + (1−η)·MB` of the raw triples.
pub fn mixed_partition(eta: f64) -> Result<PartitionProbabilities> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta = {eta} is outside [0, 1]")));
    }
    let be = bose_einstein();
    let mb = maxwell_boltzmann();
    let mix = |a: f64, b: f64| eta * a + (1.0 - eta) * b;
    Ok(PartitionProbabilities::from_raw(
        mix(be.p20, mb.p20),
        mix(be.p11, mb.p11),
        mix(be.p02, mb.p02),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionPoint {
    pub r_over_lc: f64,
    pub conditioned_p20: f64,
    pub conditioned_p11: f64,
    pub eta: f64,
}

/// Conditioned partition probabilities along a list of separations.
pub fn partition_curve(cavity: &CavityParams, separations: &[f64]) -> Result<Vec<PartitionPoint>> {
    if separations.is_empty() {
        return Err(Error::Domain("separation grid is empty".into()));
    }
    cavity.validate()?;
    let lc = transverse_coherence_length(cavity);
    separations
        .iter()
        .map(|&sep| {
            let eta = indistinguishability(sep, lc)?;
            let p = mixed_partition(eta)?;
            Ok(PartitionPoint {
                r_over_lc: sep / lc,
                conditioned_p20: p.conditioned_p20,
                conditioned_p11: p.conditioned_p11,
                eta,
            })
        })
        .collect()
}

/// Writes `R_over_lc,p20_cond,p11_cond,eta` rows.
pub fn write_partition_csv<W: Write>(points: &[PartitionPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "R_over_lc,p20_cond,p11_cond,eta")?;
    for p in points {
        writeln!(
            out,
            "{:e},{:.15},{:.15},{:e}",
            p.r_over_lc, p.conditioned_p20, p.conditioned_p11, p.eta
        )?;
    }
    Ok(())
}
