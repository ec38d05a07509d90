//! Second-order correlation F(τ), start-stop coincidence histograms in the
//! layout of a multichannel analyzer, and the log-linear decay-rate fit.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Channel count of the analyzer used in the experiment.
pub const DEFAULT_CHANNELS: usize = 2048;

/// Two-photon correlation `exp(−Γ|τ|)`, normalized to one at τ = 0.
pub fn f_tau(rate: f64, tau: f64) -> f64 {
    (-rate * tau.abs()).exp()
}

/// Probability mass of the two-sided exponential density `(Γ/2)·exp(−Γ|τ|)`
/// on `[lo, hi]`.
pub fn laplace_mass(rate: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(lo <= hi);
    let tail = |x: f64| 0.5 * (-rate * x).exp();
    if lo >= 0.0 {
        // ½(e^{−Γlo} − e^{−Γhi}) without cancellation
        -tail(lo) * (-rate * (hi - lo)).exp_m1()
    } else if hi <= 0.0 {
        -tail(-hi) * (-rate * (hi - lo)).exp_m1()
    } else {
        1.0 - tail(-lo) - tail(hi)
    }
}

/// Channel geometry of the analyzer. Channel `i` collects delays in
/// `[(i − zero − ½)·w, (i − zero + ½)·w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McaLayout {
    pub channel_count: usize,
    pub bin_width: f64,
    pub zero_channel: usize,
}

impl McaLayout {
    pub fn new(channel_count: usize, bin_width: f64, zero_channel: usize) -> Result<Self> {
        let layout = Self {
            channel_count,
            bin_width,
            zero_channel,
        };
        layout.validate()?;
        Ok(layout)
    }

    /// `channel_count` channels spanning `range` seconds, τ = 0 in the middle.
    pub fn centered(channel_count: usize, range: f64) -> Result<Self> {
        if channel_count == 0 {
            return Err(Error::Layout("channel_count must be >= 1".into()));
        }
        Self::new(channel_count, range / channel_count as f64, channel_count / 2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.channel_count == 0 {
            return Err(Error::Layout("channel_count must be >= 1".into()));
        }
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(Error::Layout(format!(
                "bin_width must be finite and > 0, got {}",
                self.bin_width
            )));
        }
        if self.zero_channel >= self.channel_count {
            return Err(Error::Layout(format!(
                "zero_channel {} outside [0, {})",
                self.zero_channel, self.channel_count
            )));
        }
        Ok(())
    }

    pub fn channel_center(&self, channel: usize) -> f64 {
        (channel as f64 - self.zero_channel as f64) * self.bin_width
    }

    pub fn channel_edges(&self, channel: usize) -> (f64, f64) {
        let c = self.channel_center(channel);
        (c - 0.5 * self.bin_width, c + 0.5 * self.bin_width)
    }

    pub fn channel_of(&self, tau: f64) -> Option<usize> {
        let idx = (tau / self.bin_width + 0.5).floor() + self.zero_channel as f64;
        if idx >= 0.0 && idx < self.channel_count as f64 {
            Some(idx as usize)
        } else {
            None
        }
    }

    /// Delays covered by the full channel range.
    pub fn span(&self) -> (f64, f64) {
        (self.channel_edges(0).0, self.channel_edges(self.channel_count - 1).1)
    }
}

/// Peak or area normalization for displaying a histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramNormalization {
    #[default]
    Peak,
    Area,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceHistogram {
    pub channel_count: usize,
    pub bin_width: f64,
    pub zero_channel: usize,
    pub counts: Vec<u64>,
    pub total_starts: u64,
}

impl CoincidenceHistogram {
    pub fn empty(layout: McaLayout) -> Self {
        Self {
            channel_count: layout.channel_count,
            bin_width: layout.bin_width,
            zero_channel: layout.zero_channel,
            counts: vec![0; layout.channel_count],
            total_starts: 0,
        }
    }

    pub fn layout(&self) -> McaLayout {
        McaLayout {
            channel_count: self.channel_count,
            bin_width: self.bin_width,
            zero_channel: self.zero_channel,
        }
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        self.layout().validate()?;
        if self.counts.len() != self.channel_count {
            return Err(Error::Layout(format!(
                "{} counts for {} channels",
                self.counts.len(),
                self.channel_count
            )));
        }
        if self.total_counts() > self.total_starts {
            return Err(Error::Layout(format!(
                "{} coincidences exceed {} starts",
                self.total_counts(),
                self.total_starts
            )));
        }
        Ok(())
    }

    /// Channel-wise sum; both histograms must share a layout.
    pub fn merge(&mut self, other: &CoincidenceHistogram) -> Result<()> {
        if self.layout() != other.layout() {
            return Err(Error::Layout("cannot merge histograms with different layouts".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total_starts += other.total_starts;
        Ok(())
    }

    pub fn normalized(&self, mode: HistogramNormalization) -> Vec<f64> {
        let scale = match mode {
            HistogramNormalization::Peak => self.counts.iter().copied().max().unwrap_or(0) as f64,
            HistogramNormalization::Area => self.total_counts() as f64,
        };
        if scale == 0.0 {
            return vec![0.0; self.counts.len()];
        }
        self.counts.iter().map(|&c| c as f64 / scale).collect()
    }

    /// Writes `channel,tau_s,counts,normalized` rows.
    pub fn write_csv<W: Write>(
        &self,
        mut out: W,
        normalization: HistogramNormalization,
    ) -> std::io::Result<()> {
        let layout = self.layout();
        let scaled = self.normalized(normalization);
        writeln!(out, "channel,tau_s,counts,normalized")?;
        for (i, (c, s)) in self.counts.iter().zip(&scaled).enumerate() {
            writeln!(out, "{},{:e},{},{:e}", i, layout.channel_center(i), c, s)?;
        }
        Ok(())
    }
}

/// Draws a coincidence histogram whose channel means follow the
/// bin-integrated two-sided exponential of rate `rate`, scaled to
/// `expected_coincidences`, on top of a flat floor of
/// `accidental_floor · expected_coincidences` per channel. Each channel is
/// Poisson distributed; the draw order is channel order.
pub fn synthesize_histogram(
    rate: f64,
    layout: McaLayout,
    expected_coincidences: f64,
    seed: u64,
    accidental_floor: f64,
) -> Result<CoincidenceHistogram> {
    layout.validate()?;
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Domain(format!("rate must be finite and > 0, got {rate}")));
    }
    if !(expected_coincidences > 0.0 && expected_coincidences.is_finite()) {
        return Err(Error::Domain(format!(
            "expected_coincidences must be finite and > 0, got {expected_coincidences}"
        )));
    }
    if !(accidental_floor >= 0.0 && accidental_floor.is_finite()) {
        return Err(Error::Domain(format!(
            "accidental_floor must be finite and >= 0, got {accidental_floor}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = CoincidenceHistogram::empty(layout);
    let floor = accidental_floor * expected_coincidences;
    let mut in_window = 0.0;
    for (i, slot) in hist.counts.iter_mut().enumerate() {
        let (lo, hi) = layout.channel_edges(i);
        let mass = laplace_mass(rate, lo, hi);
        in_window += mass;
        *slot = poisson(&mut rng, expected_coincidences * mass + floor);
    }
    let outside = expected_coincidences * (1.0 - in_window).max(0.0);
    hist.total_starts = hist.total_counts() + poisson(&mut rng, outside);
    Ok(hist)
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let draw: f64 = Poisson::new(mean)
        .expect("finite positive Poisson mean")
        .sample(rng);
    draw as u64
}

/// How the log-linear start is finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    /// Single weighted least-squares pass on `ln(counts)`.
    LogLinear,
    /// Log-linear start refined by iteratively reweighted least squares
    /// (Fisher scoring) to the Poisson maximum-likelihood rate.
    #[default]
    PoissonRefined,
}

/// Fit controls. The window applies to |τ| of the channel centers.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FitOptions {
    pub window: Option<(f64, f64)>,
    /// Flat background, in counts per channel, removed before the fit.
    pub accidental_floor: Option<f64>,
    #[serde(default)]
    pub method: FitMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    #[serde(rename = "gamma_s_inv")]
    pub rate: f64,
    #[serde(rename = "stderr_s_inv")]
    pub standard_error: f64,
    #[serde(rename = "window_s")]
    pub window: (f64, f64),
    pub channels_used: usize,
}

/// Minimum significance, in standard errors, for a slope to count as a decay.
const DECAY_SIGNIFICANCE: f64 = 3.0;

const MAX_SCORING_STEPS: usize = 100;

#[derive(Debug, Clone, Copy)]
struct Line {
    intercept: f64,
    slope: f64,
    stderr: f64,
}

/// Weighted straight line through `(x, y, weight)` points.
fn weighted_line(points: &[(f64, f64, f64)]) -> Result<Line> {
    let usable = points.len();
    if usable < 2 {
        return Err(Error::InsufficientData { usable });
    }
    let sw: f64 = points.iter().map(|p| p.2).sum();
    let x_mean = points.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let y_mean = points.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = points.iter().map(|p| p.2 * (p.0 - x_mean).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|p| p.2 * (p.0 - x_mean) * (p.1 - y_mean))
        .sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData { usable });
    }
    let slope = sxy / sxx;
    Ok(Line {
        intercept: y_mean - slope * x_mean,
        slope,
        stderr: sxx.recip().sqrt(),
    })
}

/// Poisson log-likelihood (up to a constant) of `counts` under
/// `μ = exp(a + b·x) + floor`.
fn log_likelihood(channels: &[(f64, f64)], floor: f64, a: f64, b: f64) -> f64 {
    channels
        .iter()
        .map(|&(x, c)| {
            let mu = (a + b * x).exp() + floor;
            if c > 0.0 {
                c * mu.ln() - mu
            } else {
                -mu
            }
        })
        .sum()
}

/// Fisher scoring for `(a, b)` starting from the log-linear line. Returns
/// the refined line with the standard error of `b` from the inverse
/// Fisher information.
fn poisson_refine(channels: &[(f64, f64)], floor: f64, start: Line) -> Line {
    let (mut a, mut b) = (start.intercept, start.slope);
    let mut ll = log_likelihood(channels, floor, a, b);
    let mut info = [[0.0; 2]; 2];
    for _ in 0..MAX_SCORING_STEPS {
        let mut score = [0.0; 2];
        info = [[0.0; 2]; 2];
        for &(x, c) in channels {
            let signal = (a + b * x).exp();
            let mu = signal + floor;
            let resid = (c - mu) / mu;
            score[0] += resid * signal;
            score[1] += resid * signal * x;
            let w = signal * signal / mu;
            info[0][0] += w;
            info[0][1] += w * x;
            info[1][1] += w * x * x;
        }
        info[1][0] = info[0][1];
        let det = info[0][0] * info[1][1] - info[0][1] * info[1][0];
        if !(det > 0.0) {
            break;
        }
        let da = (info[1][1] * score[0] - info[0][1] * score[1]) / det;
        let db = (info[0][0] * score[1] - info[1][0] * score[0]) / det;
        // step halving keeps the likelihood from decreasing
        let mut step = 1.0;
        let mut accepted = false;
        while step > 1e-6 {
            let (na, nb) = (a + step * da, b + step * db);
            let nll = log_likelihood(channels, floor, na, nb);
            // near the optimum the likelihood only moves by rounding noise
            if nll >= ll - 1e-12 * ll.abs().max(1.0) {
                a = na;
                b = nb;
                ll = nll;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || (db.abs() <= 1e-13 * b.abs() && da.abs() <= 1e-13 * a.abs().max(1.0)) {
            break;
        }
    }
    let det = info[0][0] * info[1][1] - info[0][1] * info[1][0];
    let stderr = if det > 0.0 {
        (info[0][0] / det).sqrt()
    } else {
        start.stderr
    };
    Line {
        intercept: a,
        slope: b,
        stderr,
    }
}

/// Decay rate from a coincidence histogram, both signs of τ pooled by |τ|.
///
/// The starting point is a weighted least-squares fit of `ln(counts)`
/// against |τ| with Poisson weights, zero-count channels excluded. With
/// [`FitMethod::PoissonRefined`] the line is then iterated to the Poisson
/// maximum-likelihood solution over every channel in the window, which
/// removes the small-count bias of the log transform and stays invariant
/// under a rescaling of all counts.
///
/// The channel straddling τ = 0 is skipped. Every other channel lies on one
/// side of zero, where the bin-integrated model is exactly log-linear in the
/// channel's |τ| with slope −Γ, so the fit carries no binning bias.
pub fn fit_gamma(hist: &CoincidenceHistogram, options: &FitOptions) -> Result<FitReport> {
    hist.validate()?;
    let layout = hist.layout();
    let (w_lo, w_hi) = options.window.unwrap_or((0.0, f64::INFINITY));
    if !(w_lo >= 0.0 && w_hi > w_lo) {
        return Err(Error::Domain(format!(
            "fit window ({w_lo}, {w_hi}) must satisfy 0 <= lo < hi"
        )));
    }
    let floor = options.accidental_floor.unwrap_or(0.0);
    if !(floor >= 0.0 && floor.is_finite()) {
        return Err(Error::Domain(format!("accidental floor {floor} must be >= 0")));
    }

    // (|τ|, counts) for every channel in the window
    let channels: Vec<(f64, f64)> = hist
        .counts
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            let (lo, hi) = layout.channel_edges(i);
            !(lo < 0.0 && hi > 0.0)
        })
        .map(|(i, &c)| (layout.channel_center(i).abs(), c as f64))
        .filter(|&(x, _)| x >= w_lo && x <= w_hi)
        .collect();

    let points: Vec<(f64, f64, f64)> = channels
        .iter()
        .filter_map(|&(x, c)| {
            let signal = c - floor;
            // var(ln(c − f)) ≈ c/(c − f)²
            (signal > 0.0).then(|| (x, signal.ln(), signal * signal / c))
        })
        .collect();
    let usable = points.len();
    let start = weighted_line(&points)?;
    if !(-start.slope > DECAY_SIGNIFICANCE * start.stderr) {
        return Err(Error::NonDecay {
            slope: start.slope,
            stderr: start.stderr,
        });
    }

    let (line, used, x_max) = match options.method {
        FitMethod::LogLinear => {
            let x_max = points.iter().map(|p| p.0).fold(0.0, f64::max);
            (start, usable, x_max)
        }
        FitMethod::PoissonRefined => {
            let x_max = channels.iter().map(|p| p.0).fold(0.0, f64::max);
            (poisson_refine(&channels, floor, start), channels.len(), x_max)
        }
    };
    if !(-line.slope > DECAY_SIGNIFICANCE * line.stderr) {
        return Err(Error::NonDecay {
            slope: line.slope,
            stderr: line.stderr,
        });
    }
    Ok(FitReport {
        rate: -line.slope,
        standard_error: line.stderr,
        window: (w_lo, w_hi.min(x_max)),
        channels_used: used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const PS: f64 = 1e-12;

    fn layout() -> McaLayout {
        McaLayout::centered(DEFAULT_CHANNELS, 40.0 * PS).unwrap()
    }

    fn noiseless(rate: f64, layout: McaLayout, n: f64) -> CoincidenceHistogram {
        let mut h = CoincidenceHistogram::empty(layout);
        for (i, c) in h.counts.iter_mut().enumerate() {
            let (lo, hi) = layout.channel_edges(i);
            *c = (n * laplace_mass(rate, lo, hi)).round() as u64;
        }
        h.total_starts = h.total_counts();
        h
    }

    #[test]
    fn f_tau_examples() {
        assert_eq!(f_tau(1e12, 0.0), 1.0);
        assert_relative_eq!(f_tau(1e12, PS), (-1.0f64).exp(), max_relative = 1e-15);
        assert_eq!(f_tau(1e12, PS), f_tau(1e12, -PS));
    }

    #[test]
    fn laplace_mass_integrates_density() {
        let rate = 2.0;
        for (lo, hi) in [(0.0, 0.3), (-0.7, -0.1), (-0.2, 0.5), (1.0, 1.0 + 1e-9)] {
            // midpoint quadrature
            let n = 20_000;
            let h = (hi - lo) / n as f64;
            let q: f64 = (0..n)
                .map(|i| 0.5 * rate * (-rate * (lo + (i as f64 + 0.5) * h).abs()).exp() * h)
                .sum();
            assert_relative_eq!(laplace_mass(rate, lo, hi), q, max_relative = 1e-8);
        }
        assert_relative_eq!(laplace_mass(rate, -1e3, 1e3), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn layout_mapping() {
        let l = McaLayout::new(10, 1.0, 4).unwrap();
        assert_eq!(l.channel_of(0.0), Some(4));
        assert_eq!(l.channel_of(0.49), Some(4));
        assert_eq!(l.channel_of(-0.51), Some(3));
        assert_eq!(l.channel_of(5.4), Some(9));
        assert_eq!(l.channel_of(5.6), None);
        assert_eq!(l.channel_of(-4.6), None);
        assert_eq!(l.span(), (-4.5, 5.5));
        assert!(McaLayout::new(10, 1.0, 10).is_err());
        assert!(McaLayout::new(10, 0.0, 1).is_err());
    }

    #[test]
    fn noiseless_recovery_is_exact() {
        let rate = 2.0 / PS;
        let mut h = CoincidenceHistogram::empty(layout());
        let l = layout();
        for (i, c) in h.counts.iter_mut().enumerate() {
            let (lo, hi) = l.channel_edges(i);
            // exact expectation scaled up so rounding is irrelevant
            *c = (1e15 * laplace_mass(rate, lo, hi)) as u64;
        }
        h.total_starts = h.total_counts();
        let fit = fit_gamma(&h, &FitOptions { window: Some((0.0, 5.0 * PS)), ..Default::default() })
            .unwrap();
        assert_relative_eq!(fit.rate, rate, max_relative = 1e-6);
    }

    #[test]
    fn wide_bins_stay_unbiased() {
        let rate = 1.0;
        let l = McaLayout::centered(21, 10.0).unwrap();
        let mut h = CoincidenceHistogram::empty(l);
        for (i, c) in h.counts.iter_mut().enumerate() {
            let (lo, hi) = l.channel_edges(i);
            *c = (1e15 * laplace_mass(rate, lo, hi)) as u64;
        }
        h.total_starts = h.total_counts();
        let fit = fit_gamma(&h, &FitOptions::default()).unwrap();
        assert_relative_eq!(fit.rate, rate, max_relative = 1e-6);
    }

    #[test]
    fn flat_histogram_is_not_a_decay() {
        let mut h = CoincidenceHistogram::empty(layout());
        h.counts.iter_mut().for_each(|c| *c = 50);
        h.total_starts = h.total_counts();
        assert!(matches!(
            fit_gamma(&h, &FitOptions::default()),
            Err(Error::NonDecay { .. })
        ));
    }

    #[test]
    fn too_few_channels() {
        let mut h = CoincidenceHistogram::empty(layout());
        h.counts[h.zero_channel + 3] = 10;
        h.total_starts = 10;
        assert_eq!(
            fit_gamma(&h, &FitOptions::default()),
            Err(Error::InsufficientData { usable: 1 })
        );
    }

    #[test]
    fn synthesis_preconditions() {
        assert!(synthesize_histogram(1e12, layout(), 0.0, 1, 0.0).is_err());
        assert!(synthesize_histogram(0.0, layout(), 1e3, 1, 0.0).is_err());
        let bad = McaLayout {
            channel_count: 16,
            bin_width: 1.0,
            zero_channel: 16,
        };
        assert!(matches!(
            synthesize_histogram(1.0, bad, 1e3, 1, 0.0),
            Err(Error::Layout(_))
        ));
    }

    #[test]
    fn synthesis_is_deterministic() {
        let a = synthesize_histogram(1e12, layout(), 1e5, 42, 1e-5).unwrap();
        let b = synthesize_histogram(1e12, layout(), 1e5, 42, 1e-5).unwrap();
        let c = synthesize_histogram(1e12, layout(), 1e5, 43, 1e-5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        a.validate().unwrap();
    }

    #[test]
    fn large_samples_converge_to_binned_exponential() {
        let rate = 1.0 / PS;
        let l = McaLayout::centered(64, 10.0 * PS).unwrap();
        let n = 1e10;
        let h = synthesize_histogram(rate, l, n, 7, 0.0).unwrap();
        let exact = noiseless(rate, l, n);
        let obs = h.normalized(HistogramNormalization::Area);
        let exp = exact.normalized(HistogramNormalization::Area);
        for (o, e) in obs.iter().zip(&exp) {
            if *e > 1e-4 {
                assert_relative_eq!(*o, *e, max_relative = 1e-3);
            }
        }
    }

    #[test]
    fn synthesize_then_fit_recovers_rate() {
        let rate = 2.0 / PS;
        let h = synthesize_histogram(rate, layout(), 1e6, 11, 0.0).unwrap();
        let fit = fit_gamma(&h, &FitOptions::default()).unwrap();
        assert!((fit.rate / rate - 1.0).abs() < 0.02, "{fit:?}");
    }

    #[test]
    fn floor_subtraction() {
        let rate = 1.0 / PS;
        let floor = 1e-4;
        let n = 1e6;
        let h = synthesize_histogram(rate, layout(), n, 5, floor).unwrap();
        let fit = fit_gamma(
            &h,
            &FitOptions {
                window: None,
                accidental_floor: Some(floor * n),
                ..Default::default()
            },
        )
        .unwrap();
        assert!((fit.rate / rate - 1.0).abs() < 0.03, "{fit:?}");
    }

    #[test]
    fn normalizations() {
        let h = noiseless(1.0 / PS, layout(), 1e6);
        let peak = h.normalized(HistogramNormalization::Peak);
        assert_eq!(peak.iter().cloned().fold(0.0, f64::max), 1.0);
        let area: f64 = h.normalized(HistogramNormalization::Area).iter().sum();
        assert_relative_eq!(area, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn report_json_keys() {
        let h = noiseless(1.0 / PS, layout(), 1e8);
        let fit = fit_gamma(&h, &FitOptions::default()).unwrap();
        let v = serde_json::to_value(fit).unwrap();
        for key in ["gamma_s_inv", "stderr_s_inv", "window_s", "channels_used"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }

    proptest! {
        #[test]
        fn f_tau_properties(rate in 1e9f64..1e13, t1 in 0.0f64..5e-12, t2 in 0.0f64..5e-12) {
            let f = f_tau(rate, t1);
            prop_assert!(f > 0.0 && f <= 1.0);
            prop_assert_eq!(f, f_tau(rate, -t1));
            let prod = f_tau(rate, t1) * f_tau(rate, t2);
            prop_assert!((prod - f_tau(rate, t1 + t2)).abs() < 1e-14);
            prop_assert!((f.ln() + rate * t1).abs() < 1e-12 * (1.0 + rate * t1));
        }

        #[test]
        fn fit_is_scale_equivariant(seed in 0u64..1000, scale in 2u64..50) {
            let h = synthesize_histogram(1.5 / PS, layout(), 1e5, seed, 0.0).unwrap();
            let mut scaled = h.clone();
            scaled.counts.iter_mut().for_each(|c| *c *= scale);
            scaled.total_starts *= scale;
            let a = fit_gamma(&h, &FitOptions::default()).unwrap();
            let b = fit_gamma(&scaled, &FitOptions::default()).unwrap();
            prop_assert!((a.rate / b.rate - 1.0).abs() < 1e-12, "{} vs {}", a.rate, b.rate);
        }
    }
}
