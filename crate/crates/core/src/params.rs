//! Physical parameters of the microcavity and the emitters, plus the
//! closed-form quantities derived from them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Geometry and mirrors of a planar, symmetric, lossless Fabry-Perot microcavity.
///
/// The mirror reflectance is stored as the amplitude magnitude |r|; the
/// intensity reflectance |r|² is only ever derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Emitted wavelength λ in meters.
    pub emission_wavelength: f64,
    /// Longitudinal mode order m, cavity thickness d = mλ/2.
    pub mode_order: u32,
    /// Mirror amplitude reflectance |r| at normal incidence.
    pub mirror_amplitude_reflectance: f64,
    /// Cavity finesse f.
    pub finesse: f64,
}

impl CavityParams {
    pub fn new(
        emission_wavelength: f64,
        mode_order: u32,
        mirror_amplitude_reflectance: f64,
        finesse: f64,
    ) -> Result<Self> {
        let params = Self {
            emission_wavelength,
            mode_order,
            mirror_amplitude_reflectance,
            finesse,
        };
        params.validate()?;
        Ok(params)
    }

    /// The device described in the experiment: λ = 700 nm, m = 1,
    /// |r|² = 0.9990, f = 3000.
    pub fn experiment() -> Self {
        Self {
            emission_wavelength: 700e-9,
            mode_order: 1,
            mirror_amplitude_reflectance: 0.999_f64.sqrt(),
            finesse: 3000.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.emission_wavelength.is_finite() && self.emission_wavelength > 0.0) {
            return Err(invalid("emission_wavelength", "must be finite and > 0"));
        }
        if self.mode_order < 1 {
            return Err(invalid("mode_order", "must be >= 1"));
        }
        let r = self.mirror_amplitude_reflectance;
        if !(0.0..1.0).contains(&r) {
            return Err(invalid(
                "mirror_amplitude_reflectance",
                format!("{r} is outside [0, 1)"),
            ));
        }
        if !(self.finesse.is_finite() && self.finesse >= 0.0) {
            return Err(invalid("finesse", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Cavity thickness d = mλ/2.
    pub fn cavity_length(&self) -> f64 {
        f64::from(self.mode_order) * self.emission_wavelength / 2.0
    }

    /// Intensity reflectance |r|².
    pub fn intensity_reflectance(&self) -> f64 {
        self.mirror_amplitude_reflectance * self.mirror_amplitude_reflectance
    }

    /// Emission wavenumber k = 2π/λ.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.emission_wavelength
    }
}

/// Free-space spontaneous emission of a single dipole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterParams {
    /// Free-space lifetime T_SE in seconds.
    pub free_space_lifetime: f64,
}

impl EmitterParams {
    pub fn new(free_space_lifetime: f64) -> Result<Self> {
        if !(free_space_lifetime.is_finite() && free_space_lifetime > 0.0) {
            return Err(invalid("free_space_lifetime", "must be finite and > 0"));
        }
        Ok(Self {
            free_space_lifetime,
        })
    }

    /// γ = T_SE⁻¹ / 2.
    pub fn free_space_rate(&self) -> f64 {
        0.5 / self.free_space_lifetime
    }
}

impl Default for EmitterParams {
    fn default() -> Self {
        Self {
            free_space_lifetime: 1e-12,
        }
    }
}

/// Transverse coherence length ℓ_c = 2λ√(f·m), the radius of the cavity's
/// Gaussian-like mode.
pub fn transverse_coherence_length(params: &CavityParams) -> f64 {
    2.0 * params.emission_wavelength * (params.finesse * f64::from(params.mode_order)).sqrt()
}

/// Fabry-Perot finesse π√R/(1 − R) for intensity reflectance R.
pub fn finesse_from_reflectance(intensity_reflectance: f64) -> Result<f64> {
    let r = intensity_reflectance;
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!(
            "intensity reflectance {r} is outside [0, 1)"
        )));
    }
    Ok(PI * r.sqrt() / (1.0 - r))
}

/// Photon storage time τ_c = f·d/(π·c).
pub fn storage_time(params: &CavityParams) -> f64 {
    params.finesse * params.cavity_length() / (PI * SPEED_OF_LIGHT)
}

/// Magnitude of the output-field prefactor from the multiple-reflection sum,
/// (1+|r|)·√(1−|r|²)·Σ|r|^{2n} = (1+|r|)/√(1−|r|²), with the overall
/// amplitude constant set to one.
pub fn cavity_output_factor(amplitude_reflectance: f64) -> Result<f64> {
    let r = amplitude_reflectance;
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!(
            "amplitude reflectance {r} is outside [0, 1)"
        )));
    }
    Ok((1.0 + r) / (1.0 - r * r).sqrt())
}
