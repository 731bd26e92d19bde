//! Oscillatory line integrals along torus curves and frequency-decay fits.
//!
//! The central object is
//!
//! I(λ, ξ) = ∫₀^L A(t) · e^{i λ ⟨ξ, γ(t)⟩} dt,
//!
//! where γ is a unit-speed curve from [`crate::curve`], A is a smooth real
//! amplitude, λ > 0 a frequency scale, and ξ a unit direction. The rate at
//! which sup_ξ |I(λ, ξ)| decays as λ → ∞ is controlled by the curvature and
//! torsion of γ:
//!
//! * straight segments with ⟨ξ, v⟩ ≠ 0 give |I| ~ λ⁻¹ (closed form),
//! * curves with nonvanishing curvature and torsion give |I| ≲ λ^(−1/3)
//!   (in practice closer to λ^(−1/2) for a helix),
//! * a planar circle probed along its binormal has constant phase, so |I| = L
//!   for every λ — curvature alone does not force decay in all directions.
//!
//! [`oscillatory_integral`] evaluates I(λ, ξ) by adaptive composite
//! Gauss–Legendre quadrature resolving the phase (one 16-node panel per phase
//! period 2π/λ, at least 64 nodes, doubled until the value is stable to
//! 1e−8 · L · sup|A|). [`decay_fit`] sweeps a frequency grid, records
//! max_ξ |I(λ, ξ)| over a fixed sample of directions, and fits the log–log
//! slope by ordinary least squares. Directions are drawn uniformly on the
//! sphere by default; [`decay_fit_with_directions`] accepts an explicit
//! direction set instead, e.g. normalized difference vectors μ − μ′ of
//! lattice points on a shell.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::curve::Curve;
use crate::Vec3;

/// Tolerance on ||ξ| − 1| for direction vectors.
pub const UNIT_DIRECTION_TOL: f64 = 1e-12;
/// Quadrature is refined until doubling the grid moves the value by less
/// than this fraction of the trivial bound L · sup|A|.
pub const QUADRATURE_REL_TOL: f64 = 1e-8;
/// Minimum number of quadrature nodes regardless of frequency.
pub const MIN_NODES: usize = 64;

const NODES_PER_PANEL: usize = 16;
const MAX_REFINEMENTS: usize = 16;

/// 16-node Gauss–Legendre rule on [−1, 1]: (abscissa, weight).
const GL16: [(f64, f64); 16] = [
    (-9.894_009_349_916_499_4e-1, 2.715_245_941_175_403_7e-2),
    (-9.445_750_230_732_326_0e-1, 6.225_352_393_864_770_6e-2),
    (-8.656_312_023_878_317_6e-1, 9.515_851_168_249_259_1e-2),
    (-7.554_044_083_550_030_0e-1, 1.246_289_712_555_340_3e-1),
    (-6.178_762_444_026_437_7e-1, 1.495_959_888_165_767_6e-1),
    (-4.580_167_776_572_273_7e-1, 1.691_565_193_950_026_2e-1),
    (-2.816_035_507_792_589_2e-1, 1.826_034_150_449_236_1e-1),
    (-9.501_250_983_763_745_4e-2, 1.894_506_104_550_685_9e-1),
    (9.501_250_983_763_745_4e-2, 1.894_506_104_550_685_9e-1),
    (2.816_035_507_792_589_2e-1, 1.826_034_150_449_236_1e-1),
    (4.580_167_776_572_273_7e-1, 1.691_565_193_950_026_2e-1),
    (6.178_762_444_026_437_7e-1, 1.495_959_888_165_767_6e-1),
    (7.554_044_083_550_030_0e-1, 1.246_289_712_555_340_3e-1),
    (8.656_312_023_878_317_6e-1, 9.515_851_168_249_259_1e-2),
    (9.445_750_230_732_326_0e-1, 6.225_352_393_864_770_6e-2),
    (9.894_009_349_916_499_4e-1, 2.715_245_941_175_403_7e-2),
];

/// Errors from oscillatory integration and decay fitting.
#[derive(Debug, Error, PartialEq)]
pub enum OscillatoryError {
    /// The frequency scale λ must be strictly positive.
    #[error("frequency scale must be positive, got {0}")]
    NonPositiveLambda(f64),
    /// Direction vectors must be unit length within 1e−12.
    #[error("direction must be a unit vector, got norm {0}")]
    NonUnitDirection(f64),
    /// A decay fit needs at least four frequencies.
    #[error("decay fit needs at least 4 frequencies, got {0}")]
    TooFewLambdas(usize),
    /// Frequency grids must be strictly increasing.
    #[error("frequency grid must be strictly increasing")]
    LambdasNotIncreasing,
    /// Frequency grids must span at least two decades.
    #[error("frequency grid must span at least two decades, got ratio {0}")]
    SpanTooNarrow(f64),
    /// Random-direction fits need at least 32 samples.
    #[error("decay fit needs at least 32 direction samples, got {0}")]
    TooFewDirections(usize),
    /// An explicit direction set must be nonempty.
    #[error("direction set is empty")]
    NoDirections,
}

/// A smooth real amplitude t ↦ A(t) entering the oscillatory integrand.
pub trait Amplitude {
    /// A(t).
    fn value(&self, t: f64) -> f64;
    /// A′(t).
    fn derivative(&self, t: f64) -> f64;
}

/// The constant amplitude A ≡ 1 used for decay fits.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitAmplitude;

impl Amplitude for UnitAmplitude {
    fn value(&self, _t: f64) -> f64 {
        1.0
    }

    fn derivative(&self, _t: f64) -> f64 {
        0.0
    }
}

/// Result of a least-squares fit of log max_ξ |I(λ, ξ)| against log λ.
#[derive(Debug, Clone)]
pub struct DecayFit {
    /// Frequency grid, strictly increasing.
    pub lambdas: Vec<f64>,
    /// max over the direction sample of |I(λ, ξ)|, per frequency.
    pub max_abs: Vec<f64>,
    /// Ordinary-least-squares slope of ln max_abs against ln λ.
    pub exponent: f64,
    /// Number of directions in the sample.
    pub directions: usize,
    /// Seed used to draw random directions (0 for explicit direction sets).
    pub seed: u64,
}

fn validate_lambda(lambda: f64) -> Result<(), OscillatoryError> {
    if !(lambda > 0.0) {
        return Err(OscillatoryError::NonPositiveLambda(lambda));
    }
    Ok(())
}

fn validate_direction(xi: &Vec3) -> Result<(), OscillatoryError> {
    let norm = xi.norm();
    if !((norm - 1.0).abs() <= UNIT_DIRECTION_TOL) {
        return Err(OscillatoryError::NonUnitDirection(norm));
    }
    Ok(())
}

/// Number of Gauss–Legendre panels resolving the phase at frequency λ: one
/// 16-node panel per phase period 2π/λ (since |d/dt ⟨ξ, γ(t)⟩| ≤ 1 for unit
/// ξ and unit-speed γ), with at least `MIN_NODES` nodes overall.
fn initial_panels(length: f64, lambda: f64) -> usize {
    let per_phase = (length * lambda / (2.0 * PI)).ceil() as usize;
    per_phase.max(MIN_NODES / NODES_PER_PANEL).max(1)
}

/// Quadrature nodes (t, γ(t), weight) for a composite 16-node Gauss–Legendre
/// rule with `panels` equal panels on [0, L]. Weights sum to L.
fn panel_nodes(curve: &Curve, panels: usize) -> Vec<(f64, Vec3, f64)> {
    let h = curve.length() / panels as f64;
    let mut nodes = Vec::with_capacity(panels * NODES_PER_PANEL);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for &(x, w) in &GL16 {
            let t = mid + 0.5 * h * x;
            nodes.push((t, curve.position(t), 0.5 * h * w));
        }
    }
    nodes
}

/// Weighted phase sum Σ w · A(t) · e^{iλ⟨ξ, γ(t)⟩} over precomputed nodes,
/// together with the max of |A| over the nodes.
fn integral_on_nodes(
    nodes: &[(f64, Vec3, f64)],
    amplitude: &dyn Amplitude,
    lambda: f64,
    xi: &Vec3,
) -> (Complex64, f64) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut sup_amp = 0.0f64;
    for &(t, ref pos, w) in nodes {
        let a = amplitude.value(t);
        sup_amp = sup_amp.max(a.abs());
        acc += Complex64::from_polar(w * a, lambda * xi.dot(pos));
    }
    (acc, sup_amp)
}

/// Evaluates I(λ, ξ) = ∫₀^L A(t) e^{iλ⟨ξ, γ(t)⟩} dt by adaptive composite
/// Gauss–Legendre quadrature.
///
/// The grid places one 16-node panel per phase period 2π/λ (at least 64
/// nodes) and doubles until the value moves by less than
/// 1e−8 · L · sup|A|. The trivial bound |I| ≤ L · sup|A| is asserted on the
/// returned value.
///
/// # Errors
///
/// [`OscillatoryError::NonPositiveLambda`] if λ ≤ 0,
/// [`OscillatoryError::NonUnitDirection`] if ||ξ| − 1| > 1e−12.
pub fn oscillatory_integral(
    curve: &Curve,
    amplitude: &impl Amplitude,
    lambda: f64,
    xi: Vec3,
) -> Result<Complex64, OscillatoryError> {
    validate_lambda(lambda)?;
    validate_direction(&xi)?;

    let length = curve.length();
    let mut panels = initial_panels(length, lambda);
    let (mut coarse, mut sup_amp) = integral_on_nodes(&panel_nodes(curve, panels), amplitude, lambda, &xi);
    for _ in 0..MAX_REFINEMENTS {
        let (fine, sup_fine) = integral_on_nodes(&panel_nodes(curve, 2 * panels), amplitude, lambda, &xi);
        sup_amp = sup_amp.max(sup_fine);
        if (fine - coarse).norm() <= QUADRATURE_REL_TOL * length * sup_amp {
            let bound = length * sup_amp;
            assert!(
                fine.norm() <= bound * (1.0 + 1e-9),
                "oscillatory integral {} exceeds trivial bound {bound}",
                fine.norm()
            );
            return Ok(fine);
        }
        coarse = fine;
        panels *= 2;
    }
    panic!("oscillatory quadrature did not stabilize after {MAX_REFINEMENTS} refinements; is the amplitude smooth?");
}

/// max over `directions` of |I(λ, ξ)| with A ≡ 1, sharing quadrature nodes
/// across directions and refining until every direction is stable.
fn max_abs_over_directions(curve: &Curve, lambda: f64, directions: &[Vec3]) -> f64 {
    let length = curve.length();
    let amplitude = UnitAmplitude;
    let mut panels = initial_panels(length, lambda);
    let mut coarse: Vec<Complex64> = {
        let nodes = panel_nodes(curve, panels);
        directions
            .iter()
            .map(|xi| integral_on_nodes(&nodes, &amplitude, lambda, xi).0)
            .collect()
    };
    for _ in 0..MAX_REFINEMENTS {
        let nodes = panel_nodes(curve, 2 * panels);
        let fine: Vec<Complex64> = directions
            .iter()
            .map(|xi| integral_on_nodes(&nodes, &amplitude, lambda, xi).0)
            .collect();
        let worst = fine
            .iter()
            .zip(&coarse)
            .map(|(f, c)| (f - c).norm())
            .fold(0.0f64, f64::max);
        if worst <= QUADRATURE_REL_TOL * length {
            let max_abs = fine.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            assert!(
                max_abs <= length * (1.0 + 1e-9),
                "oscillatory integral {max_abs} exceeds trivial bound {length}"
            );
            return max_abs;
        }
        coarse = fine;
        panels *= 2;
    }
    panic!("oscillatory quadrature did not stabilize after {MAX_REFINEMENTS} refinements");
}

/// Draws `count` directions uniformly on the unit sphere (normalized
/// standard Gaussian triples, deterministic in `seed`).
pub fn sphere_directions(count: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut directions = Vec::with_capacity(count);
    while directions.len() < count {
        let v = Vec3::new(
            normal.sample(&mut rng),
            normal.sample(&mut rng),
            normal.sample(&mut rng),
        );
        let norm = v.norm();
        if norm > 1e-6 {
            directions.push(v / norm);
        }
    }
    directions
}

pub(crate) fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let x_bar = xs.iter().sum::<f64>() / n;
    let y_bar = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - x_bar) * (y - y_bar);
        sxx += (x - x_bar) * (x - x_bar);
    }
    sxy / sxx
}

/// Fits the decay exponent of max_ξ |I(λ, ξ)| on `lambda_grid` using
/// `xi_samples` directions drawn uniformly on the sphere from `seed`.
///
/// The amplitude is A ≡ 1. The same directions are reused for every
/// frequency, so the fit is deterministic in `seed`.
///
/// # Errors
///
/// [`OscillatoryError::TooFewDirections`] if `xi_samples` < 32, plus the
/// grid errors of [`decay_fit_with_directions`].
pub fn decay_fit(
    curve: &Curve,
    lambda_grid: &[f64],
    xi_samples: usize,
    seed: u64,
) -> Result<DecayFit, OscillatoryError> {
    if xi_samples < 32 {
        return Err(OscillatoryError::TooFewDirections(xi_samples));
    }
    let directions = sphere_directions(xi_samples, seed);
    let mut fit = decay_fit_with_directions(curve, lambda_grid, &directions)?;
    fit.seed = seed;
    Ok(fit)
}

/// [`decay_fit`] with an explicit direction set instead of random sphere
/// samples — e.g. normalized differences μ − μ′ of lattice points on a
/// shell, which probe exactly the phases arising in second moments of
/// restricted waves.
///
/// # Errors
///
/// [`OscillatoryError::TooFewLambdas`] for fewer than 4 frequencies,
/// [`OscillatoryError::NonPositiveLambda`] / [`LambdasNotIncreasing`] /
/// [`SpanTooNarrow`] for a malformed grid (two decades are required),
/// [`OscillatoryError::NoDirections`] / [`NonUnitDirection`] for a bad
/// direction set.
///
/// [`LambdasNotIncreasing`]: OscillatoryError::LambdasNotIncreasing
/// [`SpanTooNarrow`]: OscillatoryError::SpanTooNarrow
/// [`NonUnitDirection`]: OscillatoryError::NonUnitDirection
pub fn decay_fit_with_directions(
    curve: &Curve,
    lambda_grid: &[f64],
    directions: &[Vec3],
) -> Result<DecayFit, OscillatoryError> {
    if lambda_grid.len() < 4 {
        return Err(OscillatoryError::TooFewLambdas(lambda_grid.len()));
    }
    validate_lambda(lambda_grid[0])?;
    if lambda_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(OscillatoryError::LambdasNotIncreasing);
    }
    let span = lambda_grid[lambda_grid.len() - 1] / lambda_grid[0];
    if span < 100.0 * (1.0 - 1e-9) {
        return Err(OscillatoryError::SpanTooNarrow(span));
    }
    if directions.is_empty() {
        return Err(OscillatoryError::NoDirections);
    }
    for xi in directions {
        validate_direction(xi)?;
    }

    let max_abs: Vec<f64> = lambda_grid
        .iter()
        .map(|&lambda| max_abs_over_directions(curve, lambda, directions))
        .collect();
    for &m in &max_abs {
        assert!(m > 0.0, "oscillatory maximum vanished; decay fit undefined");
    }
    let log_lambda: Vec<f64> = lambda_grid.iter().map(|l| l.ln()).collect();
    let log_max: Vec<f64> = max_abs.iter().map(|m| m.ln()).collect();
    let exponent = ols_slope(&log_lambda, &log_max);
    assert!(exponent.is_finite(), "decay exponent is not finite");

    Ok(DecayFit {
        lambdas: lambda_grid.to_vec(),
        max_abs,
        exponent,
        directions: directions.len(),
        seed: 0,
    })
}
