//! Event-level Monte Carlo of the two-pulse Hanbury Brown-Twiss experiment.
//!
//! Each pulse pair excites two dipoles. Their photons leave through the
//! output modes k and k′ according to a partition model and reach the
//! detectors:
//!
//! * configuration A: D₁ and D₂ share mode k through a balanced splitter;
//! * configuration B: D₁ watches k and D₃ watches k′.
//!
//! D₁ starts the time-to-amplitude converter and the other detector stops
//! it. Accidental stops arrive uniformly over the converter range, and the
//! first stop to arrive ends the conversion, so every start yields at most
//! one coincidence.
//!
//! Pulse pairs are processed in blocks of [`BLOCK_SIZE`]. Block `b` draws
//! from `ChaCha8Rng::seed_from_u64(seed)` switched to stream `b`, so the
//! random numbers a block sees depend only on `(seed, b)` and the result is
//! the same for any number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{
    fit_gamma, CoincidenceHistogram, FitOptions, FitReport, McaLayout, DEFAULT_CHANNELS,
};
use crate::decay::{gamma_pair, gamma_overlap, EvalTime, KernelNormalization, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::params::{transverse_coherence_length, CavityParams, EmitterParams};
use crate::partition::{
    bose_einstein, indistinguishability, maxwell_boltzmann, mixed_partition,
    PartitionProbabilities,
};

/// Pulse pairs per random-number block.
pub const BLOCK_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HbtConfiguration {
    /// D₁/D₂ on mode k behind a balanced splitter.
    #[serde(rename = "A_same_mode", alias = "A")]
    SameMode,
    /// D₁ on k, D₃ on k′.
    #[serde(rename = "B_opposite_modes", alias = "B")]
    OppositeModes,
}

impl HbtConfiguration {
    fn label(self) -> &'static str {
        match self {
            HbtConfiguration::SameMode => "A",
            HbtConfiguration::OppositeModes => "B",
        }
    }

    /// Probability that an outcome of the measured kind leaves photons on
    /// both the start and the stop detector, before detector efficiency.
    fn routing_factor(self) -> f64 {
        match self {
            HbtConfiguration::SameMode => 0.5,
            HbtConfiguration::OppositeModes => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateModel {
    ImageSeries,
    Overlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionModel {
    Be,
    Mb,
    /// Mixture weighted by the mode overlap at the configured separation,
    /// or by an explicit `eta`.
    Mixed,
}

/// What each excitation produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonSource {
    /// Two excited dipoles, one photon each.
    #[default]
    Pair,
    /// One photon per excitation: any recorded coincidence is accidental.
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub configuration: HbtConfiguration,
    pub pulse_pairs: u64,
    /// Inter-dipole distance R in meters.
    pub separation: f64,
    pub detector_efficiency: f64,
    /// Probability per start that an accidental stop falls in the range.
    pub accidental_coincidence_ratio: f64,
    /// Full converter range in seconds, centered on τ = 0.
    pub tac_range: f64,
    pub mca_channels: usize,
    pub seed: u64,
    pub rate_model: RateModel,
    pub partition_model: PartitionModel,
    /// Overrides the overlap-derived η; only valid with `Mixed`.
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub normalization: KernelNormalization,
    #[serde(default)]
    pub source: PhotonSource,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            configuration: HbtConfiguration::SameMode,
            pulse_pairs: 1_000_000,
            separation: 25e-6,
            detector_efficiency: 0.70,
            accidental_coincidence_ratio: 1e-4,
            tac_range: 40e-12,
            mca_channels: DEFAULT_CHANNELS,
            seed: 1,
            rate_model: RateModel::Overlap,
            partition_model: PartitionModel::Mixed,
            eta: None,
            normalization: KernelNormalization::StandardHalf,
            source: PhotonSource::Pair,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Configuration(format!("{name} = {v} is outside [0, 1]")))
            }
        };
        prob("detector_efficiency", self.detector_efficiency)?;
        prob("accidental_coincidence_ratio", self.accidental_coincidence_ratio)?;
        if self.accidental_coincidence_ratio >= 1.0 {
            return Err(Error::Configuration(
                "accidental_coincidence_ratio must be < 1".into(),
            ));
        }
        if self.pulse_pairs == 0 {
            return Err(Error::Configuration("pulse_pairs must be >= 1".into()));
        }
        if !(self.tac_range > 0.0 && self.tac_range.is_finite()) {
            return Err(Error::Configuration(format!(
                "tac_range must be finite and > 0, got {}",
                self.tac_range
            )));
        }
        if self.mca_channels == 0 {
            return Err(Error::Configuration("mca_channels must be >= 1".into()));
        }
        if !(self.separation >= 0.0) {
            return Err(Error::Configuration(format!(
                "separation must be >= 0, got {}",
                self.separation
            )));
        }
        if let Some(eta) = self.eta {
            if self.partition_model != PartitionModel::Mixed {
                return Err(Error::Configuration(format!(
                    "eta is only meaningful with the mixed partition model, not {:?}",
                    self.partition_model
                )));
            }
            prob("eta", eta)?;
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<McaLayout> {
        McaLayout::centered(self.mca_channels, self.tac_range)
    }

    /// Decay rate Γ(R) driving both emission times.
    pub fn decay_rate(&self, cavity: &CavityParams, emitter: &EmitterParams) -> Result<f64> {
        let rate = match self.rate_model {
            RateModel::ImageSeries => gamma_pair(
                cavity,
                emitter,
                self.separation,
                EvalTime::SteadyState,
                self.normalization,
                DEFAULT_TOLERANCE,
            )?,
            RateModel::Overlap => {
                gamma_overlap(cavity, emitter, self.separation, self.normalization)?
            }
        };
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::Configuration(format!(
                "rate model {:?} gives non-positive decay rate {rate}",
                self.rate_model
            )));
        }
        Ok(rate)
    }

    /// Partition probabilities used to assign output modes.
    pub fn partition(&self, cavity: &CavityParams) -> Result<PartitionProbabilities> {
        match self.partition_model {
            PartitionModel::Be => Ok(bose_einstein()),
            PartitionModel::Mb => Ok(maxwell_boltzmann()),
            PartitionModel::Mixed => {
                let eta = match self.eta {
                    Some(eta) => eta,
                    None => {
                        indistinguishability(self.separation, transverse_coherence_length(cavity))?
                    }
                };
                mixed_partition(eta)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    #[serde(skip_serializing)]
    pub histogram: CoincidenceHistogram,
    pub coincidences: u64,
    pub starts: u64,
    pub pulse_pairs: u64,
    /// Raw P(2,0) inferred from a configuration-A run.
    pub estimated_p20: Option<f64>,
    /// Raw P(1,1) inferred from a configuration-B run.
    pub estimated_p11: Option<f64>,
    /// Binomial standard error of whichever estimate is present.
    pub binomial_stderr: f64,
    /// Γ(R) used for the emission times, s⁻¹.
    pub decay_rate: f64,
    pub config: ExperimentConfig,
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    starts: u64,
}

/// Photon arrival at a detector, or none.
type Click = Option<f64>;

fn earliest(a: Click, b: Click) -> Click {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

struct Simulator {
    configuration: HbtConfiguration,
    source: PhotonSource,
    efficiency: f64,
    accidental: f64,
    p20: f64,
    p11: f64,
    emission: Exp<f64>,
    layout: McaLayout,
}

impl Simulator {
    fn detect(&self, rng: &mut ChaCha8Rng, time: f64) -> Click {
        (rng.random::<f64>() < self.efficiency).then_some(time)
    }

    /// Start and stop clicks produced by one excitation.
    fn pulse(&self, rng: &mut ChaCha8Rng) -> (Click, Click) {
        // photons on mode k and mode k′, in emission order
        let (in_k, in_kp) = match self.source {
            PhotonSource::Single => {
                if rng.random::<bool>() {
                    (1, 0)
                } else {
                    (0, 1)
                }
            }
            PhotonSource::Pair => {
                let u: f64 = rng.random();
                if u < self.p20 {
                    (2, 0)
                } else if u < self.p20 + self.p11 {
                    (1, 1)
                } else {
                    (0, 2)
                }
            }
        };
        let mut start: Click = None;
        let mut stop: Click = None;
        match self.configuration {
            HbtConfiguration::SameMode => {
                for _ in 0..in_k {
                    let to_start = rng.random::<bool>();
                    let t = self.emission.sample(rng);
                    let click = self.detect(rng, t);
                    if to_start {
                        start = earliest(start, click);
                    } else {
                        stop = earliest(stop, click);
                    }
                }
            }
            HbtConfiguration::OppositeModes => {
                for _ in 0..in_k {
                    let t = self.emission.sample(rng);
                    start = earliest(start, self.detect(rng, t));
                }
                for _ in 0..in_kp {
                    let t = self.emission.sample(rng);
                    stop = earliest(stop, self.detect(rng, t));
                }
            }
        }
        (start, stop)
    }

    fn run_block(&self, seed: u64, block: u64, pairs: u64, hist: &mut CoincidenceHistogram) -> Tally {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block);
        let (lo, hi) = self.layout.span();
        let mut tally = Tally::default();
        for _ in 0..pairs {
            let (start, stop) = self.pulse(&mut rng);
            let Some(t_start) = start else {
                continue;
            };
            tally.starts += 1;
            let real = stop
                .map(|t| t - t_start)
                .filter(|&tau| tau >= lo && tau < hi);
            let accidental =
                (rng.random::<f64>() < self.accidental).then(|| lo + (hi - lo) * rng.random::<f64>());
            let first = earliest(real, accidental);
            if let Some(channel) = first.and_then(|tau| self.layout.channel_of(tau)) {
                hist.counts[channel] += 1;
            }
        }
        hist.total_starts = tally.starts;
        tally
    }
}

/// Runs the experiment for `config.pulse_pairs` excitations.
pub fn simulate_run(
    config: &ExperimentConfig,
    cavity: &CavityParams,
    emitter: &EmitterParams,
) -> Result<RunResult> {
    config.validate()?;
    cavity.validate()?;
    let layout = config.layout()?;
    let decay_rate = config.decay_rate(cavity, emitter)?;
    let partition = config.partition(cavity)?;
    let sim = Simulator {
        configuration: config.configuration,
        source: config.source,
        efficiency: config.detector_efficiency,
        accidental: config.accidental_coincidence_ratio,
        p20: partition.p20,
        p11: partition.p11,
        emission: Exp::new(decay_rate).map_err(|e| Error::Configuration(e.to_string()))?,
        layout,
    };

    let blocks = config.pulse_pairs.div_ceil(BLOCK_SIZE);
    let partial: Vec<(Tally, CoincidenceHistogram)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let pairs = BLOCK_SIZE.min(config.pulse_pairs - b * BLOCK_SIZE);
            let mut hist = CoincidenceHistogram::empty(layout);
            let tally = sim.run_block(config.seed, b, pairs, &mut hist);
            (tally, hist)
        })
        .collect();

    let mut histogram = CoincidenceHistogram::empty(layout);
    let mut starts = 0;
    for (tally, hist) in &partial {
        starts += tally.starts;
        histogram.merge(hist)?;
    }
    let coincidences = histogram.total_counts();

    let mut result = RunResult {
        histogram,
        coincidences,
        starts,
        pulse_pairs: config.pulse_pairs,
        estimated_p20: None,
        estimated_p11: None,
        binomial_stderr: f64::NAN,
        decay_rate,
        config: config.clone(),
    };
    let (estimate, stderr) = raw_estimate(&result);
    result.binomial_stderr = stderr;
    match config.configuration {
        HbtConfiguration::SameMode => result.estimated_p20 = Some(estimate),
        HbtConfiguration::OppositeModes => result.estimated_p11 = Some(estimate),
    }
    Ok(result)
}

/// Real coincidences after removing the expected accidentals. A start with
/// no real stop in range is converted by an accidental with probability
/// `p`; a start with one keeps exactly one coincidence either way, so
/// `C = R + p·(S − R)`.
fn real_coincidences(result: &RunResult) -> f64 {
    let p = result.config.accidental_coincidence_ratio;
    let c = result.coincidences as f64;
    let s = result.starts as f64;
    ((c - p * s) / (1.0 - p)).max(0.0)
}

/// Raw outcome probability measured by one run (P(2,0) for A, P(1,1) for
/// B), corrected for splitter and detector efficiency, with its binomial
/// standard error.
fn raw_estimate(result: &RunResult) -> (f64, f64) {
    let cfg = &result.config;
    let factor = cfg.configuration.routing_factor() * cfg.detector_efficiency.powi(2);
    let n = result.pulse_pairs as f64;
    let q = real_coincidences(result) / n;
    if factor == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let se = (q * (1.0 - q) / n).max(0.0).sqrt();
    (q / factor, se / factor)
}

/// Conditioned partition pair from a configuration-A and a configuration-B
/// run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionEstimate {
    pub p20_cond: f64,
    pub p11_cond: f64,
    pub stderr: f64,
}

/// Combines the two runs: A counts are corrected by the splitter factor 2,
/// both by the squared detector efficiency, and the pair is normalized to
/// `p20 + p11 = 1`. The error is propagated to first order from the two
/// binomial errors.
pub fn estimate_partition(result_a: &RunResult, result_b: &RunResult) -> Result<PartitionEstimate> {
    let (ca, cb) = (&result_a.config, &result_b.config);
    if ca.configuration != HbtConfiguration::SameMode
        || cb.configuration != HbtConfiguration::OppositeModes
    {
        return Err(Error::Configuration(
            "estimate_partition needs a configuration-A run and a configuration-B run".into(),
        ));
    }
    if ca.detector_efficiency != cb.detector_efficiency
        || ca.separation != cb.separation
        || ca.partition_model != cb.partition_model
        || ca.eta != cb.eta
    {
        return Err(Error::Configuration(
            "runs A and B differ in physical parameters or efficiency".into(),
        ));
    }
    for r in [result_a, result_b] {
        if r.coincidences == 0 {
            return Err(Error::ZeroCoincidences(r.config.configuration.label()));
        }
    }
    let (a, sa) = raw_estimate(result_a);
    let (b, sb) = raw_estimate(result_b);
    let sum = a + b;
    if !(sum > 0.0) {
        return Err(Error::Domain("no real coincidences left after accidental removal".into()));
    }
    let stderr = (b * b * sa * sa + a * a * sb * sb).sqrt() / (sum * sum);
    Ok(PartitionEstimate {
        p20_cond: a / sum,
        p11_cond: b / sum,
        stderr,
    })
}

/// The accumulated analyzer histogram of a run.
pub fn histogram_from_run(result: &RunResult) -> CoincidenceHistogram {
    result.histogram.clone()
}

/// Fits the decay rate of a run, removing the expected flat accidental
/// floor first.
pub fn fit_run(result: &RunResult, window: Option<(f64, f64)>) -> Result<FitReport> {
    let hist = histogram_from_run(result);
    let p = result.config.accidental_coincidence_ratio;
    let floor = if p > 0.0 {
        let real = real_coincidences(result);
        Some(p * (result.starts as f64 - real) / hist.channel_count as f64)
    } else {
        None
    };
    fit_gamma(
        &hist,
        &FitOptions {
            window,
            accidental_floor: floor,
            ..Default::default()
        },
    )
}
