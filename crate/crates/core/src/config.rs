//! Flat JSON configuration shared by every front end.
//!
//! Every key is optional; missing keys take the values of
//! [`SimulationConfig::default`], which describe the experimental device.
//! Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::correlation::{HistogramNormalization, McaLayout, DEFAULT_CHANNELS};
use crate::decay::{KernelNormalization, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::hbt::{ExperimentConfig, HbtConfiguration, PartitionModel, PhotonSource, RateModel};
use crate::params::{transverse_coherence_length, CavityParams, EmitterParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    // cavity and emitter
    pub emission_wavelength_m: f64,
    pub mode_order: u32,
    pub mirror_amplitude_reflectance: f64,
    pub finesse: f64,
    pub free_space_lifetime_s: f64,

    // decay rate
    pub normalization: KernelNormalization,
    pub tolerance: f64,
    /// Separations for `gamma` and `partition`, in units of ℓ_c.
    pub r_grid_over_lc: Vec<f64>,
    /// Observation times for `gamma`; `null` entries mean steady state.
    pub t_grid_s: Vec<Option<f64>>,

    // correlation and experiment
    pub separation_over_lc: f64,
    pub configuration: HbtConfiguration,
    pub pulse_pairs: u64,
    pub expected_coincidences: f64,
    pub accidental_floor: f64,
    pub fit_window_s: Option<(f64, f64)>,
    pub histogram_normalization: HistogramNormalization,
    pub detector_efficiency: f64,
    pub accidental_coincidence_ratio: f64,
    pub tac_range_s: f64,
    pub mca_channels: usize,
    pub rate_model: RateModel,
    pub partition_model: PartitionModel,
    pub eta: Option<f64>,
    pub source: PhotonSource,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        let cavity = CavityParams::experiment();
        let emitter = EmitterParams::default();
        Self {
            emission_wavelength_m: cavity.emission_wavelength,
            mode_order: cavity.mode_order,
            mirror_amplitude_reflectance: cavity.mirror_amplitude_reflectance,
            finesse: cavity.finesse,
            free_space_lifetime_s: emitter.free_space_lifetime,
            normalization: KernelNormalization::StandardHalf,
            tolerance: DEFAULT_TOLERANCE,
            r_grid_over_lc: vec![0.0, 0.33, 1.0, 2.9, 7.2],
            t_grid_s: vec![None],
            separation_over_lc: 0.33,
            configuration: HbtConfiguration::SameMode,
            pulse_pairs: 1_000_000,
            expected_coincidences: 1e6,
            accidental_floor: 0.0,
            fit_window_s: None,
            histogram_normalization: HistogramNormalization::Peak,
            detector_efficiency: 0.70,
            accidental_coincidence_ratio: 1e-4,
            tac_range_s: 40e-12,
            mca_channels: DEFAULT_CHANNELS,
            rate_model: RateModel::Overlap,
            partition_model: PartitionModel::Mixed,
            eta: None,
            source: PhotonSource::Pair,
            seed: 1,
        }
    }
}

impl SimulationConfig {
    /// Parses a JSON document and applies `KEY=VALUE` overrides. Values are
    /// read as JSON when possible and as bare strings otherwise.
    pub fn from_json_with_overrides(text: Option<&str>, overrides: &[(String, String)]) -> Result<Self> {
        let mut doc = match text {
            Some(t) => serde_json::from_str::<Value>(t)
                .map_err(|e| Error::Configuration(format!("invalid JSON: {e}")))?,
            None => Value::Object(Map::new()),
        };
        let Value::Object(map) = &mut doc else {
            return Err(Error::Configuration("top-level JSON value must be an object".into()));
        };
        for (key, raw) in overrides {
            let value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.clone()));
            map.insert(key.clone(), value);
        }
        let config: Self = serde_json::from_value(doc)
            .map_err(|e| Error::Configuration(e.to_string()))?;
        config.cavity()?;
        config.emitter()?;
        Ok(config)
    }

    pub fn cavity(&self) -> Result<CavityParams> {
        CavityParams::new(
            self.emission_wavelength_m,
            self.mode_order,
            self.mirror_amplitude_reflectance,
            self.finesse,
        )
    }

    pub fn emitter(&self) -> Result<EmitterParams> {
        EmitterParams::new(self.free_space_lifetime_s)
    }

    pub fn coherence_length(&self) -> Result<f64> {
        Ok(transverse_coherence_length(&self.cavity()?))
    }

    pub fn layout(&self) -> Result<McaLayout> {
        McaLayout::centered(self.mca_channels, self.tac_range_s)
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let cfg = ExperimentConfig {
            configuration: self.configuration,
            pulse_pairs: self.pulse_pairs,
            separation: self.separation_over_lc * self.coherence_length()?,
            detector_efficiency: self.detector_efficiency,
            accidental_coincidence_ratio: self.accidental_coincidence_ratio,
            tac_range: self.tac_range_s,
            mca_channels: self.mca_channels,
            seed: self.seed,
            rate_model: self.rate_model,
            partition_model: self.partition_model,
            eta: self.eta,
            normalization: self.normalization,
            source: self.source,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_document_takes_defaults() {
        let cfg = SimulationConfig::from_json_with_overrides(Some(r#"{"finesse": 1000}"#), &[])
            .unwrap();
        assert_eq!(cfg.finesse, 1000.0);
        assert_eq!(cfg.mode_order, 1);
        assert_eq!(cfg.mca_channels, 2048);
    }

    #[test]
    fn overrides_win() {
        let cfg = SimulationConfig::from_json_with_overrides(
            Some(r#"{"finesse": 1000, "normalization": "verbatim"}"#),
            &[
                ("finesse".into(), "2000".into()),
                ("configuration".into(), "B_opposite_modes".into()),
                ("t_grid_s".into(), "[1e-15, null]".into()),
            ],
        )
        .unwrap();
        assert_eq!(cfg.finesse, 2000.0);
        assert_eq!(cfg.normalization, KernelNormalization::Verbatim);
        assert_eq!(cfg.configuration, HbtConfiguration::OppositeModes);
        assert_eq!(cfg.t_grid_s, vec![Some(1e-15), None]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = SimulationConfig::from_json_with_overrides(Some("{\n  \"finesse\": ,\n}"), &[])
            .unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn unknown_and_invalid_keys_rejected() {
        assert!(SimulationConfig::from_json_with_overrides(Some(r#"{"finess": 1}"#), &[]).is_err());
        assert!(SimulationConfig::from_json_with_overrides(
            Some(r#"{"mirror_amplitude_reflectance": 1.0}"#),
            &[]
        )
        .is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let cfg = SimulationConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back = SimulationConfig::from_json_with_overrides(Some(&text), &[]).unwrap();
        assert_eq!(cfg, back);
    }
}
