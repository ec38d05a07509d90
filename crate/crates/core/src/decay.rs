//! Cooperative spontaneous-emission rate of two parallel dipoles on the
//! mid-plane of a planar microcavity.
//!
//! The rate is the free-space rate γ dressed by the direct dipole-dipole
//! kernel and by the infinite ladder of mirror images at distances `n·d`
//! (self-images) and `R_n = √(R² + (n·d)²)` (images of the partner). Every
//! term is switched on by a step function `θ(ct − x)` once light has had
//! time to cross the corresponding distance.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{transverse_coherence_length, CavityParams, EmitterParams, SPEED_OF_LIGHT};
use crate::partition::indistinguishability;

/// Below this value of `k·x` the kernel switches to its Taylor expansion.
pub const SMALL_ARGUMENT_THRESHOLD: f64 = 5e-2;

/// Default steady-state truncation tolerance, relative to γ.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Prefactor applied to the dipole kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelNormalization {
    /// `3/k³`, exactly as the rate formula is usually printed.
    Verbatim,
    /// `3/(2k³)`; the resonant cavity then doubles the single-dipole rate at R = 0.
    #[default]
    StandardHalf,
}

impl KernelNormalization {
    pub fn factor(self) -> f64 {
        match self {
            KernelNormalization::Verbatim => 1.0,
            KernelNormalization::StandardHalf => 0.5,
        }
    }
}

impl fmt::Display for KernelNormalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelNormalization::Verbatim => "verbatim",
            KernelNormalization::StandardHalf => "standard_half",
        })
    }
}

impl std::str::FromStr for KernelNormalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "verbatim" => Ok(KernelNormalization::Verbatim),
            "standard_half" | "half" => Ok(KernelNormalization::StandardHalf),
            other => Err(Error::Configuration(format!(
                "unknown normalization `{other}` (expected verbatim or standard_half)"
            ))),
        }
    }
}

/// Observation time after the instantaneous excitation at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalTime {
    Elapsed(f64),
    /// t → ∞: every interaction has been switched on.
    SteadyState,
}

impl EvalTime {
    /// Infinite input maps to [`EvalTime::SteadyState`].
    pub fn from_seconds(t: f64) -> Self {
        if t.is_infinite() && t > 0.0 {
            EvalTime::SteadyState
        } else {
            EvalTime::Elapsed(t)
        }
    }

    pub fn as_seconds(self) -> f64 {
        match self {
            EvalTime::Elapsed(t) => t,
            EvalTime::SteadyState => f64::INFINITY,
        }
    }

    /// Heaviside gate θ(ct − x), zero at the light cone itself.
    fn reached(self, distance: f64) -> bool {
        match self {
            EvalTime::Elapsed(t) => SPEED_OF_LIGHT * t > distance,
            EvalTime::SteadyState => true,
        }
    }
}

/// Dipole-dipole kernel
/// `c·(3/k³)·[sin(kx)(−1/x³ + k²/x) + cos(kx)·k/x²]`, with `c` set by `norm`.
///
/// For `kx` below [`SMALL_ARGUMENT_THRESHOLD`] the series
/// `c·(2 − 2u²/5 + 3u⁴/140 − u⁶/1890)`, `u = kx`, is used instead; it tends
/// to `2c` at x = 0.
pub fn dipole_kernel(wavenumber: f64, distance: f64, norm: KernelNormalization) -> f64 {
    let c = norm.factor();
    let u = wavenumber * distance;
    if u < SMALL_ARGUMENT_THRESHOLD {
        kernel_series(u, c)
    } else {
        kernel_direct(u, c)
    }
}

fn kernel_series(u: f64, c: f64) -> f64 {
    let u2 = u * u;
    c * (2.0 + u2 * (-2.0 / 5.0 + u2 * (3.0 / 140.0 - u2 / 1890.0)))
}

fn kernel_direct(u: f64, c: f64) -> f64 {
    let (s, co) = u.sin_cos();
    3.0 * c * (s * (1.0 / u - 1.0 / (u * u * u)) + co / (u * u))
}

/// Upper bound on |kernel| at any distance ≥ x (each bracket term bounded
/// separately; the bound decreases with x).
fn kernel_bound(wavenumber: f64, distance: f64, norm: KernelNormalization) -> f64 {
    let u = wavenumber * distance;
    3.0 * norm.factor() * (1.0 / (u * u * u) + 1.0 / u + 1.0 / (u * u))
}

/// Which partner terms enter the image sum.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Partner {
    /// Second dipole at transverse distance R.
    At(f64),
    /// Single dipole (R → ∞).
    Absent,
}

/// One evaluation of the rate together with its truncation metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEvaluation {
    /// Γ in s⁻¹.
    pub rate: f64,
    /// Γ/γ.
    pub relative_rate: f64,
    /// Highest image order n included.
    pub truncation_order: usize,
    /// Bound on the omitted tail of Γ/γ.
    pub residual_bound: f64,
}

/// Image order needed so the geometric tail `C·|r|^{N+1}/(1−|r|)` stays below
/// `tolerance`, where `C` bounds the sum of both image kernels for n ≥ 1.
pub fn steady_state_order(
    cavity: &CavityParams,
    norm: KernelNormalization,
    tolerance: f64,
) -> Result<usize> {
    let r = cavity.mirror_amplitude_reflectance;
    if r >= 1.0 {
        return Err(Error::NonConvergent(r));
    }
    if !(tolerance > 0.0) {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tolerance}")));
    }
    if r == 0.0 {
        return Ok(0);
    }
    let bound = 2.0 * kernel_bound(cavity.wavenumber(), cavity.cavity_length(), norm);
    let order = ((tolerance * (1.0 - r) / bound).ln() / r.ln()).ceil();
    Ok(order.max(1.0) as usize)
}

fn tail_bound(cavity: &CavityParams, norm: KernelNormalization, order: usize) -> f64 {
    let r = cavity.mirror_amplitude_reflectance;
    if r == 0.0 {
        return 0.0;
    }
    if r >= 1.0 {
        return f64::INFINITY;
    }
    let bound = 2.0 * kernel_bound(cavity.wavenumber(), cavity.cavity_length(), norm);
    bound * r.powf(order as f64 + 1.0) / (1.0 - r)
}

/// Neumaier compensated sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn evaluate(
    cavity: &CavityParams,
    partner: Partner,
    time: EvalTime,
    norm: KernelNormalization,
    tolerance: f64,
) -> Result<RateEvaluation> {
    let k = cavity.wavenumber();
    let d = cavity.cavity_length();
    let r = cavity.mirror_amplitude_reflectance;
    if let Partner::At(sep) = partner {
        if !(sep >= 0.0) {
            return Err(Error::Domain(format!("separation must be >= 0, got {sep}")));
        }
    }
    if let EvalTime::Elapsed(t) = time {
        if t.is_nan() {
            return Err(Error::Domain("time is NaN".into()));
        }
    }

    // Image orders with n·d < ct are causally connected.
    let causal_order = match time {
        EvalTime::Elapsed(t) if t <= 0.0 => Some(0usize),
        EvalTime::Elapsed(t) => {
            let reach = SPEED_OF_LIGHT * t / d;
            Some(if reach.is_finite() {
                (reach.ceil() as usize).saturating_sub(1)
            } else {
                usize::MAX
            })
        }
        EvalTime::SteadyState => None,
    };
    let (order, residual_bound) = match causal_order {
        Some(n) if r >= 1.0 => (n, 0.0),
        Some(n) => {
            let n_tol = steady_state_order(cavity, norm, tolerance)?;
            if n <= n_tol {
                (n, 0.0)
            } else {
                (n_tol, tail_bound(cavity, norm, n_tol))
            }
        }
        None => {
            let n_tol = steady_state_order(cavity, norm, tolerance)?;
            (n_tol, tail_bound(cavity, norm, n_tol))
        }
    };

    let mut acc = CompensatedSum::default();
    acc.add(1.0);
    if let Partner::At(sep) = partner {
        if time.reached(sep) {
            acc.add(dipole_kernel(k, sep, norm));
        }
    }
    let mut weight = 1.0;
    for n in 1..=order {
        weight *= -r;
        let nd = n as f64 * d;
        if !time.reached(nd) {
            break;
        }
        let mut term = dipole_kernel(k, nd, norm);
        if let Partner::At(sep) = partner {
            let rn = sep.hypot(nd);
            if time.reached(rn) {
                term += dipole_kernel(k, rn, norm);
            }
        }
        acc.add(weight * term);
    }
    let relative_rate = acc.value();
    Ok(RateEvaluation {
        rate: f64::NAN,
        relative_rate,
        truncation_order: order,
        residual_bound,
    })
}

/// Γ(R, t) for two parallel dipoles, with full truncation metadata.
pub fn gamma_pair_detailed(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    separation: f64,
    time: EvalTime,
    norm: KernelNormalization,
    tolerance: f64,
) -> Result<RateEvaluation> {
    let mut eval = evaluate(cavity, Partner::At(separation), time, norm, tolerance)?;
    eval.rate = emitter.free_space_rate() * eval.relative_rate;
    Ok(eval)
}

/// Γ(R, t) in s⁻¹.
pub fn gamma_pair(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    separation: f64,
    time: EvalTime,
    norm: KernelNormalization,
    tolerance: f64,
) -> Result<f64> {
    gamma_pair_detailed(cavity, emitter, separation, time, norm, tolerance).map(|e| e.rate)
}

/// Single-dipole cavity rate Γ_∞ with metadata: the two-dipole rate with
/// every partner term removed.
pub fn gamma_infinity_detailed(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    time: EvalTime,
    norm: KernelNormalization,
    tolerance: f64,
) -> Result<RateEvaluation> {
    let mut eval = evaluate(cavity, Partner::Absent, time, norm, tolerance)?;
    eval.rate = emitter.free_space_rate() * eval.relative_rate;
    Ok(eval)
}

/// Γ_∞ in s⁻¹.
pub fn gamma_infinity(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    time: EvalTime,
    norm: KernelNormalization,
    tolerance: f64,
) -> Result<f64> {
    gamma_infinity_detailed(cavity, emitter, time, norm, tolerance).map(|e| e.rate)
}

/// Self-image sum `Σ_{n≥1} (−|r|)ⁿ·G(nd)` at steady state, i.e. Γ_∞/γ − 1.
pub fn self_image_sum(
    cavity: &CavityParams,
    norm: KernelNormalization,
    tolerance: f64,
) -> Result<f64> {
    evaluate(cavity, Partner::Absent, EvalTime::SteadyState, norm, tolerance)
        .map(|e| e.relative_rate - 1.0)
}

/// Phenomenological mode-overlap rate `Γ_∞·(1 + η(R))` with
/// `η = exp(−(R/ℓ_c)²)`. Used where the dipoles sit at mesoscopic distances
/// on the scale of the cavity mode, which the image sum alone cannot
/// resolve.
pub fn gamma_overlap(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    separation: f64,
    norm: KernelNormalization,
) -> Result<f64> {
    if !(separation >= 0.0) {
        return Err(Error::Domain(format!(
            "separation must be >= 0, got {separation}"
        )));
    }
    let g_inf = gamma_infinity(
        cavity,
        emitter,
        EvalTime::SteadyState,
        norm,
        DEFAULT_TOLERANCE,
    )?;
    let eta = indistinguishability(separation, transverse_coherence_length(cavity))?;
    Ok(g_inf * (1.0 + eta))
}

/// Γ tabulated over a grid of separations and observation times.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRateProfile {
    pub separations: Vec<f64>,
    pub times: Vec<EvalTime>,
    /// `rates[i][j]` is Γ at `times[i]`, `separations[j]`, in s⁻¹.
    pub rates: Vec<Vec<f64>>,
    /// Γ_∞ at each time.
    pub single_rates: Vec<f64>,
    /// Image order used per cell.
    pub orders: Vec<Vec<usize>>,
    /// Largest order used anywhere in the grid.
    pub truncation_order: usize,
    /// Largest tail bound on Γ/γ anywhere in the grid.
    pub truncation_residual_bound: f64,
    pub coherence_length: f64,
}

impl DecayRateProfile {
    /// Evaluates every grid cell independently (in parallel).
    pub fn compute(
        cavity: &CavityParams,
        emitter: &EmitterParams,
        separations: &[f64],
        times: &[EvalTime],
        norm: KernelNormalization,
        tolerance: f64,
    ) -> Result<Self> {
        if separations.is_empty() || times.is_empty() {
            return Err(Error::Domain("profile grids must be non-empty".into()));
        }
        cavity.validate()?;
        let cells: Vec<(usize, usize)> = (0..times.len())
            .flat_map(|i| (0..separations.len()).map(move |j| (i, j)))
            .collect();
        let evaluations = cells
            .par_iter()
            .map(|&(i, j)| {
                gamma_pair_detailed(cavity, emitter, separations[j], times[i], norm, tolerance)
            })
            .collect::<Result<Vec<_>>>()?;
        let single_rates = times
            .par_iter()
            .map(|&t| gamma_infinity(cavity, emitter, t, norm, tolerance))
            .collect::<Result<Vec<_>>>()?;

        let n_sep = separations.len();
        let mut rates = vec![vec![0.0; n_sep]; times.len()];
        let mut orders = vec![vec![0; n_sep]; times.len()];
        let mut truncation_order = 0;
        let mut truncation_residual_bound: f64 = 0.0;
        for (&(i, j), eval) in cells.iter().zip(&evaluations) {
            if !(eval.rate > 0.0) {
                return Err(Error::Domain(format!(
                    "non-positive rate {} at R = {}, t = {}",
                    eval.rate,
                    separations[j],
                    times[i].as_seconds()
                )));
            }
            rates[i][j] = eval.rate;
            orders[i][j] = eval.truncation_order;
            truncation_order = truncation_order.max(eval.truncation_order);
            truncation_residual_bound = truncation_residual_bound.max(eval.residual_bound);
        }
        Ok(Self {
            separations: separations.to_vec(),
            times: times.to_vec(),
            rates,
            single_rates,
            orders,
            truncation_order,
            truncation_residual_bound,
            coherence_length: transverse_coherence_length(cavity),
        })
    }

    /// Writes `R_m,R_over_lc,t_s,gamma_s_inv,gamma_over_gamma_inf,truncation_order`
    /// rows; steady state is written as `inf`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "R_m,R_over_lc,t_s,gamma_s_inv,gamma_over_gamma_inf,truncation_order"
        )?;
        for (i, t) in self.times.iter().enumerate() {
            for (j, &sep) in self.separations.iter().enumerate() {
                let rate = self.rates[i][j];
                writeln!(
                    out,
                    "{:e},{:e},{:e},{:e},{:e},{}",
                    sep,
                    sep / self.coherence_length,
                    t.as_seconds(),
                    rate,
                    rate / self.single_rates[i],
                    self.orders[i][j]
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const HALF: KernelNormalization = KernelNormalization::StandardHalf;
    const VERBATIM: KernelNormalization = KernelNormalization::Verbatim;

    fn resonant(r: f64) -> CavityParams {
        CavityParams::new(0.7e-6, 1, r, 3000.0).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let k = 1.0;
        assert_relative_eq!(
            dipole_kernel(k, PI, VERBATIM),
            -3.0 / (PI * PI),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            dipole_kernel(k, PI / 2.0, VERBATIM),
            3.0 * (2.0 / PI - 8.0 / PI.powi(3)),
            max_relative = 1e-14
        );
        assert_eq!(dipole_kernel(k, 0.0, VERBATIM), 2.0);
        assert_eq!(dipole_kernel(k, 0.0, HALF), 1.0);
    }

    #[test]
    fn kernel_is_linear_in_normalization() {
        for x in [0.0, 1e-4, 0.3, 2.0, 17.5, 1e4] {
            assert_relative_eq!(
                dipole_kernel(2.0, x, VERBATIM),
                2.0 * dipole_kernel(2.0, x, HALF),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn kernel_branches_agree_near_threshold() {
        for i in 0..=40 {
            let u = SMALL_ARGUMENT_THRESHOLD * (0.5 + 0.05 * i as f64);
            let a = kernel_series(u, 1.0);
            let b = kernel_direct(u, 1.0);
            assert!(((a - b) / a).abs() < 1e-10, "u = {u}: {a} vs {b}");
        }
    }

    #[test]
    fn free_dipole_at_large_separation() {
        let cav = CavityParams::new(0.7e-6, 1, 0.0, 3000.0).unwrap();
        let em = EmitterParams::default();
        let g = gamma_pair(&cav, &em, 570e-6, EvalTime::SteadyState, HALF, 1e-9).unwrap();
        let gamma = em.free_space_rate();
        assert!(((g - gamma) / gamma).abs() < 3e-4);
        assert_eq!(
            gamma_infinity(&cav, &em, EvalTime::SteadyState, HALF, 1e-9).unwrap(),
            gamma
        );
    }

    #[test]
    fn before_light_crossing_rate_is_free_space() {
        let cav = resonant(0.9995);
        let em = EmitterParams::default();
        let d = cav.cavity_length();
        let t = 0.99 * d / SPEED_OF_LIGHT;
        let g = gamma_pair(&cav, &em, 25e-6, EvalTime::Elapsed(t), HALF, 1e-9).unwrap();
        assert_eq!(g, em.free_space_rate());
        // at t = 0 nothing has switched on, not even the direct R = 0 term
        let g0 = gamma_pair(&cav, &em, 0.0, EvalTime::Elapsed(0.0), HALF, 1e-9).unwrap();
        assert_eq!(g0, em.free_space_rate());
    }

    #[test]
    fn finite_time_counts_causal_images() {
        let cav = resonant(0.9);
        let em = EmitterParams::default();
        let d = cav.cavity_length();
        // 3.5 cavity crossings: images n = 1, 2, 3
        let t = 3.5 * d / SPEED_OF_LIGHT;
        let e = gamma_infinity_detailed(&cav, &em, EvalTime::Elapsed(t), HALF, 1e-9).unwrap();
        assert_eq!(e.truncation_order, 3);
        let k = cav.wavenumber();
        let expected: f64 = 1.0
            + (1..=3)
                .map(|n| (-0.9f64).powi(n) * dipole_kernel(k, n as f64 * d, HALF))
                .sum::<f64>();
        assert_relative_eq!(e.relative_rate, expected, max_relative = 1e-14);
    }

    #[test]
    fn long_times_approach_steady_state() {
        let cav = resonant(0.99);
        let em = EmitterParams::default();
        let ss = gamma_pair(&cav, &em, 1e-6, EvalTime::SteadyState, HALF, 1e-12).unwrap();
        let late = gamma_pair(&cav, &em, 1e-6, EvalTime::Elapsed(1e-6), HALF, 1e-12).unwrap();
        assert_relative_eq!(ss, late, max_relative = 1e-11);
    }

    #[test]
    fn zero_separation_doubles_single_rate_with_half_norm() {
        let cav = resonant(0.9995);
        let em = EmitterParams::default();
        let g0 = gamma_pair(&cav, &em, 0.0, EvalTime::SteadyState, HALF, 1e-12).unwrap();
        let ginf = gamma_infinity(&cav, &em, EvalTime::SteadyState, HALF, 1e-12).unwrap();
        assert_relative_eq!(g0 / ginf, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn steady_state_requires_sub_unit_reflectance() {
        let mut cav = resonant(0.5);
        cav.mirror_amplitude_reflectance = 1.0;
        let em = EmitterParams::default();
        assert_eq!(
            gamma_pair(&cav, &em, 1e-6, EvalTime::SteadyState, HALF, 1e-9),
            Err(Error::NonConvergent(1.0))
        );
        // a finite time is a finite sum and remains well defined
        let t = 10.0 * cav.cavity_length() / SPEED_OF_LIGHT;
        assert!(gamma_pair(&cav, &em, 1e-6, EvalTime::Elapsed(t), HALF, 1e-9).is_ok());
    }

    #[test]
    fn overlap_model_examples() {
        let cav = CavityParams::experiment();
        let em = EmitterParams::default();
        let lc = transverse_coherence_length(&cav);
        let ginf = gamma_infinity(&cav, &em, EvalTime::SteadyState, HALF, DEFAULT_TOLERANCE)
            .unwrap();
        assert_relative_eq!(
            gamma_overlap(&cav, &em, 0.0, HALF).unwrap(),
            2.0 * ginf,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            gamma_overlap(&cav, &em, 0.33 * lc, HALF).unwrap() / ginf,
            1.896_820_095,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            gamma_overlap(&cav, &em, 7.2 * lc, HALF).unwrap(),
            ginf,
            max_relative = 1e-20
        );
        assert!(gamma_overlap(&cav, &em, -1.0, HALF).is_err());
    }

    #[test]
    fn profile_shape_and_csv() {
        let cav = CavityParams::experiment();
        let em = EmitterParams::default();
        let seps = [0.0, 25e-6, 570e-6];
        let times = [EvalTime::Elapsed(1e-15), EvalTime::SteadyState];
        let p = DecayRateProfile::compute(&cav, &em, &seps, &times, HALF, 1e-9).unwrap();
        assert_eq!(p.rates.len(), 2);
        assert!(p.rates.iter().flatten().all(|&g| g > 0.0));
        assert!(p.truncation_order > 0);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(
            lines[0],
            "R_m,R_over_lc,t_s,gamma_s_inv,gamma_over_gamma_inf,truncation_order"
        );
        assert_eq!(lines.len(), 7);
        assert!(lines[4].contains(",inf,"));
        assert!(DecayRateProfile::compute(&cav, &em, &[], &times, HALF, 1e-9).is_err());
    }

    #[test]
    fn doubling_the_order_changes_little() {
        for r in [0.5, 0.9, 0.999] {
            let cav = resonant(r);
            let tol = 1e-9;
            let n = steady_state_order(&cav, HALF, tol).unwrap();
            let base = evaluate(&cav, Partner::At(3e-6), EvalTime::SteadyState, HALF, tol)
                .unwrap()
                .relative_rate;
            let k = cav.wavenumber();
            let d = cav.cavity_length();
            let extra: f64 = (n + 1..=2 * n)
                .map(|m| {
                    let nd = m as f64 * d;
                    (-r).powi(m as i32)
                        * (dipole_kernel(k, nd, HALF) + dipole_kernel(k, 3e-6f64.hypot(nd), HALF))
                })
                .sum();
            assert!(extra.abs() < tol, "r = {r}: tail {extra}");
            assert!(base.is_finite());
        }
    }

    proptest! {
        #[test]
        fn causality_gate(
            r in 0.0f64..0.9999,
            sep in 0.0f64..1e-3,
            frac in 0.0f64..1.0,
            m in 1u32..4,
        ) {
            let cav = CavityParams::new(0.7e-6, m, r, 3000.0).unwrap();
            let em = EmitterParams::default();
            let limit = sep.min(cav.cavity_length());
            let t = frac * limit / SPEED_OF_LIGHT;
            let g = gamma_pair(&cav, &em, sep, EvalTime::Elapsed(t), HALF, 1e-9).unwrap();
            prop_assert_eq!(g, em.free_space_rate());
        }

        #[test]
        fn large_separation_limit(r in 0.0f64..0.999, kr in 1e6f64..1e8) {
            let cav = CavityParams::new(0.7e-6, 1, r, 3000.0).unwrap();
            let em = EmitterParams::default();
            let sep = kr / cav.wavenumber();
            let g = gamma_pair(&cav, &em, sep, EvalTime::SteadyState, HALF, 1e-9).unwrap();
            let gi = gamma_infinity(&cav, &em, EvalTime::SteadyState, HALF, 1e-9).unwrap();
            prop_assert!(((g - gi) / gi).abs() < 1e-5);
        }
    }
}
