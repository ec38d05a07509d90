use std::fs;

use anyhow::{Context, Result};
use serde_json::json;

use superradiance::config::SimulationConfig;
use superradiance::correlation::{fit_gamma, synthesize_histogram, FitOptions};
use superradiance::decay::{gamma_infinity, DecayRateProfile, EvalTime};
use superradiance::hbt::{fit_run, histogram_from_run, simulate_run};
use superradiance::params::{
    cavity_output_factor, finesse_from_reflectance, storage_time, transverse_coherence_length,
};
use superradiance::partition::{partition_curve, write_partition_csv};
use superradiance::Error;

use crate::manifest::{file_name, RunManifest};
use crate::plot;
use crate::CommonArgs;

#[derive(Debug, Clone, Copy)]
pub enum Kind {
    Params,
    Gamma,
    Decay,
    Partition,
    Simulate,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Params => "params",
            Kind::Gamma => "gamma",
            Kind::Decay => "decay",
            Kind::Partition => "partition",
            Kind::Simulate => "simulate",
        }
    }
}

/// 2 for numerical or model failures, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::InvalidParameter { .. }) | Some(Error::Configuration(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn load_config(common: &CommonArgs) -> Result<SimulationConfig> {
    let text = match &common.config {
        Some(path) => Some(
            fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?,
        ),
        None => None,
    };
    let mut overrides = common.overrides.clone();
    if let Some(seed) = common.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    let config = SimulationConfig::from_json_with_overrides(text.as_deref(), &overrides)
        .with_context(|| match &common.config {
            Some(p) => format!("in config {}", p.display()),
            None => "in configuration overrides".to_string(),
        })?;
    Ok(config)
}

pub fn run(kind: Kind, common: &CommonArgs) -> Result<()> {
    let config = load_config(common)?;
    let manifest = RunManifest {
        command: kind.name().into(),
        config_path: common.config.clone(),
        overrides: common.overrides.clone(),
        output_dir: common.out.clone(),
        seed: config.seed,
        timestamp: chrono::Utc::now().to_rfc3339(),
    };
    match kind {
        Kind::Params => params(&config, &manifest),
        Kind::Gamma => gamma(&config, &manifest),
        Kind::Decay => decay(&config, &manifest),
        Kind::Partition => partition(&config, &manifest),
        Kind::Simulate => simulate(&config, &manifest),
    }
}

fn params(config: &SimulationConfig, manifest: &RunManifest) -> Result<()> {
    let cavity = config.cavity()?;
    let emitter = config.emitter()?;
    let reflectance_finesse = finesse_from_reflectance(cavity.intensity_reflectance())?;
    let single = gamma_infinity(
        &cavity,
        &emitter,
        EvalTime::SteadyState,
        config.normalization,
        config.tolerance,
    )?;
    let report = json!({
        "config": config,
        "cavity_length_m": cavity.cavity_length(),
        "intensity_reflectance": cavity.intensity_reflectance(),
        "transverse_coherence_length_m": transverse_coherence_length(&cavity),
        "storage_time_s": storage_time(&cavity),
        "finesse": cavity.finesse,
        "finesse_from_reflectance": reflectance_finesse,
        "finesse_relative_mismatch": reflectance_finesse / cavity.finesse - 1.0,
        "cavity_output_factor": cavity_output_factor(cavity.mirror_amplitude_reflectance)?,
        "free_space_rate_s_inv": emitter.free_space_rate(),
        "single_dipole_rate_s_inv": single,
    });
    let report = manifest.embed(report);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn gamma(config: &SimulationConfig, manifest: &RunManifest) -> Result<()> {
    let cavity = config.cavity()?;
    let emitter = config.emitter()?;
    let lc = transverse_coherence_length(&cavity);
    let separations: Vec<f64> = config.r_grid_over_lc.iter().map(|r| r * lc).collect();
    let times: Vec<EvalTime> = config
        .t_grid_s
        .iter()
        .map(|t| t.map_or(EvalTime::SteadyState, EvalTime::from_seconds))
        .collect();
    let profile = DecayRateProfile::compute(
        &cavity,
        &emitter,
        &separations,
        &times,
        config.normalization,
        config.tolerance,
    )?;
    manifest.prepare_output_dir()?;
    let mut body = Vec::new();
    profile.write_csv(&mut body)?;
    let csv = manifest.write_commented("gamma.csv", &body)?;
    let script = manifest.write_commented(
        "gamma.gp",
        plot::gamma_script(&file_name(&csv)).as_bytes(),
    )?;
    eprintln!("wrote {} and {}", csv.display(), script.display());
    Ok(())
}

fn decay(config: &SimulationConfig, manifest: &RunManifest) -> Result<()> {
    let cavity = config.cavity()?;
    let emitter = config.emitter()?;
    let experiment = config.experiment()?;
    let rate = experiment.decay_rate(&cavity, &emitter)?;
    let layout = config.layout()?;
    let hist = synthesize_histogram(
        rate,
        layout,
        config.expected_coincidences,
        config.seed,
        config.accidental_floor,
    )?;
    manifest.prepare_output_dir()?;
    let mut body = Vec::new();
    hist.write_csv(&mut body, config.histogram_normalization)?;
    let csv = manifest.write_commented("histogram.csv", &body)?;

    let floor = config.accidental_floor * config.expected_coincidences;
    let fit = fit_gamma(
        &hist,
        &FitOptions {
            window: config.fit_window_s,
            accidental_floor: (floor > 0.0).then_some(floor),
            ..Default::default()
        },
    )?;
    let mut report = serde_json::to_value(fit)?;
    if let serde_json::Value::Object(map) = &mut report {
        map.insert("model_gamma_s_inv".into(), json!(rate));
        map.insert("separation_over_lc".into(), json!(config.separation_over_lc));
        map.insert("rate_model".into(), serde_json::to_value(config.rate_model)?);
    }
    let fit_path = manifest.write_json("fit.json", report)?;
    let peak = hist.counts.iter().copied().max().unwrap_or(1) as f64;
    let script = manifest.write_commented(
        "decay.gp",
        plot::decay_script(&file_name(&csv), fit.rate, peak, config.separation_over_lc)
            .as_bytes(),
    )?;
    eprintln!(
        "Gamma = {:.4e} +/- {:.1e} s^-1 (model {:.4e}); wrote {}, {}, {}",
        fit.rate,
        fit.standard_error,
        rate,
        csv.display(),
        fit_path.display(),
        script.display()
    );
    Ok(())
}

fn partition(config: &SimulationConfig, manifest: &RunManifest) -> Result<()> {
    let cavity = config.cavity()?;
    let lc = transverse_coherence_length(&cavity);
    let separations: Vec<f64> = config.r_grid_over_lc.iter().map(|r| r * lc).collect();
    let curve = partition_curve(&cavity, &separations)?;
    manifest.prepare_output_dir()?;
    let mut body = Vec::new();
    write_partition_csv(&curve, &mut body)?;
    let csv = manifest.write_commented("partition.csv", &body)?;
    let script = manifest.write_commented(
        "partition.gp",
        plot::partition_script(&file_name(&csv)).as_bytes(),
    )?;
    eprintln!("wrote {} and {}", csv.display(), script.display());
    Ok(())
}

fn simulate(config: &SimulationConfig, manifest: &RunManifest) -> Result<()> {
    let cavity = config.cavity()?;
    let emitter = config.emitter()?;
    let experiment = config.experiment()?;
    let result = simulate_run(&experiment, &cavity, &emitter)?;
    manifest.prepare_output_dir()?;
    let mut body = Vec::new();
    histogram_from_run(&result).write_csv(&mut body, config.histogram_normalization)?;
    let csv = manifest.write_commented("histogram.csv", &body)?;

    let mut report = serde_json::to_value(&result)?;
    if let serde_json::Value::Object(map) = &mut report {
        let fit = match fit_run(&result, config.fit_window_s) {
            Ok(fit) => serde_json::to_value(fit)?,
            Err(e) => json!({ "error": e.to_string() }),
        };
        map.insert("fit".into(), fit);
        map.insert("seed".into(), json!(experiment.seed));
    }
    let json_path = manifest.write_json("run.json", report)?;
    eprintln!(
        "{} coincidences / {} starts; wrote {} and {}",
        result.coincidences,
        result.starts,
        csv.display(),
        json_path.display()
    );
    Ok(())
}
