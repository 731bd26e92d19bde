//! Kac-Rice intensities for zeros of restricted waves, the covariance
//! second-moment functional, and the singular-cube diagnostic.
//!
//! For a unit-variance Gaussian process with derivative variance α = 4π²E/3,
//! the one-point zero intensity is K₁ = √α/π = (2/√3)√E, so the expected
//! zero count on a length-L curve is L·(2/√3)√E — exactly, for every E and
//! every unit-speed curve. The two-point intensity K₂ follows from the
//! conditional distribution of (f′(t₁), f′(t₂)) given f(t₁) = f(t₂) = 0 and
//! degrades only where |r| → 1 (near-diagonal pairs). Variance analysis
//! therefore splits [0,L]² into ~1/E-sized cubes, discards the singular ones
//! (where |r| > 1/2 somewhere), and bounds the remainder by the second
//! moment R₂(E) = ∬ r² + (r₁/√E)² + (r₂/√E)² + (r₁₂/E)² dt₁dt₂, which acts
//! as the variance proxy for Z/√E.

use crate::curve::Curve;
use crate::lattice::LatticeShell;
use crate::wave::{CovarianceJet, HalfShell};
use rayon::prelude::*;

/// Errors from Kac-Rice evaluation.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum KacRiceError {
    #[error("energy must be ≥ 1, got {0}")]
    NonPositiveEnergy(i64),
    /// |r| ≥ 1: the two evaluation points are perfectly correlated and the
    /// two-point density is undefined.
    #[error("degenerate pair: |r| = {r} ≥ 1")]
    DegeneratePair { r: f64 },
    /// Conditional derivative variance vanished while the conditional
    /// cross-moment did not; ρ is undefined.
    #[error("degenerate ρ: M = 0 with nonzero numerator {numerator}")]
    DegenerateRho { numerator: f64 },
    #[error("grid_per_wavelength must be ≥ 4, got {0}")]
    GridTooCoarse(usize),
    #[error("c0 must lie in (0, 1], got {0}")]
    C0OutOfRange(f64),
    #[error("shell at energy {0} is empty")]
    EmptyShell(i64),
}

/// Fixed scalar data of the Kac-Rice densities at energy E in dimension 3:
/// α = 4π²E/3 is the variance of f′ for any unit-speed restriction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KacRiceParams {
    energy: i64,
    alpha: f64,
}

impl KacRiceParams {
    pub fn new(energy: i64) -> Result<Self, KacRiceError> {
        if energy < 1 {
            return Err(KacRiceError::NonPositiveEnergy(energy));
        }
        Ok(Self {
            energy,
            alpha: 4.0 * std::f64::consts::PI.powi(2) * energy as f64 / 3.0,
        })
    }

    pub fn energy(&self) -> i64 {
        self.energy
    }

    /// α = 4π²E/3.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// One-point zero intensity K₁ = √α/π = 2√(E/3), constant along the curve.
pub fn k1_density(energy: i64) -> f64 {
    assert!(energy >= 1, "energy must be ≥ 1");
    2.0 * (energy as f64 / 3.0).sqrt()
}

/// Expected number of zeros of a restricted wave: L·2√(E/3).
pub fn expected_count(curve: &Curve, energy: i64) -> f64 {
    curve.length() * k1_density(energy)
}

/// Intermediate quantities of the two-point intensity, exposed so callers
/// can monitor how hard the ρ clamp works on their inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K2Breakdown {
    /// K₂ itself.
    pub value: f64,
    /// M = √(α(1−r²)−r₁²)·√(α(1−r²)−r₂²), the geometric mean of the
    /// conditional derivative variances (times 1−r²).
    pub m: f64,
    /// ρ before clamping; analytically |ρ| ≤ 1, numerically it may overshoot
    /// by roundoff.
    pub rho_raw: f64,
    /// ρ clamped to [−1, 1], as used in the density.
    pub rho: f64,
}

/// Two-point zero intensity
///   K₂ = M·(√(1−ρ²) + ρ·arcsin ρ) / (π²(1−r²)^{3/2}),
///   ρ = (r₁₂(1−r²) + r·r₁·r₂)/M,
/// with the M radicands clamped at zero within roundoff and ρ clamped to
/// [−1, 1] (both are nonnegative/bounded analytically).
pub fn k2_correlation(
    jet: &CovarianceJet,
    params: &KacRiceParams,
) -> Result<f64, KacRiceError> {
    Ok(k2_breakdown(jet, params)?.value)
}

/// [`k2_correlation`] with its intermediate quantities.
pub fn k2_breakdown(
    jet: &CovarianceJet,
    params: &KacRiceParams,
) -> Result<K2Breakdown, KacRiceError> {
    let u = 1.0 - jet.r * jet.r;
    if u <= 0.0 {
        return Err(KacRiceError::DegeneratePair { r: jet.r });
    }
    let alpha = params.alpha;
    let scale = alpha.max(1.0);
    let rad1 = alpha * u - jet.r1 * jet.r1;
    let rad2 = alpha * u - jet.r2 * jet.r2;
    assert!(
        rad1 >= -1e-12 * scale && rad2 >= -1e-12 * scale,
        "covariance jet violates Cauchy-Schwarz: radicands {rad1}, {rad2}"
    );
    let m = rad1.max(0.0).sqrt() * rad2.max(0.0).sqrt();
    let numerator = jet.r12 * u + jet.r * jet.r1 * jet.r2;
    let (rho_raw, rho) = if m == 0.0 {
        if numerator.abs() > 1e-12 * scale {
            return Err(KacRiceError::DegenerateRho { numerator });
        }
        (0.0, 0.0)
    } else {
        let raw = numerator / m;
        (raw, raw.clamp(-1.0, 1.0))
    };
    let g = (1.0 - rho * rho).max(0.0).sqrt() + rho * rho.asin();
    let value = m * g / (std::f64::consts::PI.powi(2) * u * u.sqrt());
    Ok(K2Breakdown {
        value,
        m,
        rho_raw,
        rho,
    })
}

/// Neumaier compensated accumulator: keeps quadrature row sums exact to a
/// few ulps so parallel row order cannot leak into results.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Tensor trapezoid quadrature over [0,L]² of either the full second-moment
/// integrand or the r² term alone, on a wavelength-resolved grid of
/// ⌈L√E⌉·gpw intervals per axis. Rows run in parallel; each row and the
/// row-total use compensated summation in fixed index order, so the result
/// is independent of scheduling.
fn second_moment_quadrature(
    shell: &LatticeShell,
    curve: &Curve,
    grid_per_wavelength: usize,
    full_integrand: bool,
) -> Result<f64, KacRiceError> {
    if grid_per_wavelength < 4 {
        return Err(KacRiceError::GridTooCoarse(grid_per_wavelength));
    }
    let half =
        HalfShell::new(shell).map_err(|_| KacRiceError::EmptyShell(shell.energy()))?;
    let energy = shell.energy() as f64;
    let length = curve.length();
    let n = (length * energy.sqrt()).ceil().max(1.0) as usize * grid_per_wavelength;
    let h = length / n as f64;
    let nodes: Vec<(crate::Vec3, crate::Vec3)> = (0..=n)
        .map(|i| {
            let jet = curve.jet(i as f64 * h);
            (jet.position, jet.velocity)
        })
        .collect();
    let inv_sqrt_e = 1.0 / energy.sqrt();
    let inv_e = 1.0 / energy;
    let rows: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let (pos_i, vel_i) = nodes[i];
            let mut row = CompensatedSum::default();
            for (j, (pos_j, vel_j)) in nodes.iter().enumerate() {
                let jet = half.jet_between(pos_i - pos_j, vel_i, *vel_j);
                let g = if full_integrand {
                    jet.r * jet.r
                        + (jet.r1 * inv_sqrt_e).powi(2)
                        + (jet.r2 * inv_sqrt_e).powi(2)
                        + (jet.r12 * inv_e).powi(2)
                } else {
                    jet.r * jet.r
                };
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                row.add(w * g);
            }
            let w_i = if i == 0 || i == n { 0.5 } else { 1.0 };
            w_i * row.value()
        })
        .collect();
    let mut total = CompensatedSum::default();
    for v in rows {
        total.add(v);
    }
    Ok(total.value() * h * h)
}

/// R₂(E) = ∬_{[0,L]²} r² + (r₁/√E)² + (r₂/√E)² + (r₁₂/E)² dt₁ dt₂.
pub fn r2_moment(
    shell: &LatticeShell,
    curve: &Curve,
    grid_per_wavelength: usize,
) -> Result<f64, KacRiceError> {
    second_moment_quadrature(shell, curve, grid_per_wavelength, true)
}

/// The ∬ r² term of R₂ alone.
pub fn r_squared_moment(
    shell: &LatticeShell,
    curve: &Curve,
    grid_per_wavelength: usize,
) -> Result<f64, KacRiceError> {
    second_moment_quadrature(shell, curve, grid_per_wavelength, false)
}

/// R₂ read as the upper proxy for Var(Z/√E): the variance of the normalized
/// zero count is O(R₂(E)) outside the singular set, so scaling of this proxy
/// in E tracks scaling of the Monte Carlo variance. No explicit constant is
/// attached.
pub fn variance_upper_proxy(
    shell: &LatticeShell,
    curve: &Curve,
    grid_per_wavelength: usize,
) -> Result<f64, KacRiceError> {
    r2_moment(shell, curve, grid_per_wavelength)
}

/// Result of the singular-cube subdivision of [0,L]².
#[derive(Debug, Clone, PartialEq)]
pub struct SingularReport {
    /// Subdivision constant: cube side targets c₀/√E.
    pub c0: f64,
    /// Number of subintervals per axis, k = ⌊L√E/c₀⌋ + 1.
    pub k: usize,
    /// Cube side δ₀ = L/k (≤ c₀/√E by construction).
    pub delta0: f64,
    /// Ordered index pairs (i, j) of cubes containing a probe point with
    /// |r| > 1/2. The diagonal (i, i) is always singular since r(t,t) = 1.
    pub singular_pairs: Vec<(usize, usize)>,
    /// ∬ r² by trapezoid quadrature (8 points per wavelength), the quantity
    /// the singular count is compared against.
    pub r_sq_integral: f64,
}

impl SingularReport {
    pub fn singular_count(&self) -> usize {
        self.singular_pairs.len()
    }

    /// count / (E·∬r²): the dimensionless ratio that a fixed constant C is
    /// asserted to bound.
    pub fn bound_ratio(&self, energy: i64) -> f64 {
        self.singular_pairs.len() as f64 / (energy as f64 * self.r_sq_integral)
    }

    /// Whether count ≤ C·E·∬r² for the given constant.
    pub fn within_bound(&self, energy: i64, c: f64) -> bool {
        self.bound_ratio(energy) <= c
    }
}

/// Subdivide [0,L]² into k² cubes of side δ₀ = L/k with k = ⌊L√E/c₀⌋ + 1 and
/// mark each cube singular if any point of its 5×5 probe grid (global grid
/// of step δ₀/4, cube corners included) has |r| > 1/2.
///
/// Detection is a diagnostic, not a proof: a cube whose |r| exceeds 1/2 only
/// between probe points is missed. Phases are tabulated once per probe point
/// so each probe pair costs one dot product over the half shell.
pub fn singular_cubes(
    shell: &LatticeShell,
    curve: &Curve,
    c0: f64,
) -> Result<SingularReport, KacRiceError> {
    if !(c0 > 0.0 && c0 <= 1.0) {
        return Err(KacRiceError::C0OutOfRange(c0));
    }
    let half =
        HalfShell::new(shell).map_err(|_| KacRiceError::EmptyShell(shell.energy()))?;
    let energy = shell.energy() as f64;
    let length = curve.length();
    let k = (length * energy.sqrt() / c0).floor() as usize + 1;
    let delta0 = length / k as f64;
    let probes = 4 * k + 1;
    let pairs = half.pair_count();
    let step = delta0 / 4.0;

    // Phase tables: row m holds cos/sin of 2π⟨μ, γ(m·step)⟩ over the half
    // shell, so r(m, n) = (⟨cos_m, cos_n⟩ + ⟨sin_m, sin_n⟩)/pairs.
    let mut cos_t = vec![0.0f64; probes * pairs];
    let mut sin_t = vec![0.0f64; probes * pairs];
    for m in 0..probes {
        let pos = curve.position(m as f64 * step);
        for (p, mu) in half.frequency_vectors().iter().enumerate() {
            let (s, c) = mu.dot(&pos).sin_cos();
            cos_t[m * pairs + p] = c;
            sin_t[m * pairs + p] = s;
        }
    }
    let inv_pairs = 1.0 / pairs as f64;
    let mut hot = vec![false; probes * probes];
    for m in 0..probes {
        let (cm, sm) = (
            &cos_t[m * pairs..(m + 1) * pairs],
            &sin_t[m * pairs..(m + 1) * pairs],
        );
        for n in m..probes {
            let (cn, sn) = (
                &cos_t[n * pairs..(n + 1) * pairs],
                &sin_t[n * pairs..(n + 1) * pairs],
            );
            let mut acc = 0.0;
            for p in 0..pairs {
                acc += cm[p] * cn[p] + sm[p] * sn[p];
            }
            let is_hot = (acc * inv_pairs).abs() > 0.5;
            hot[m * probes + n] = is_hot;
            hot[n * probes + m] = is_hot;
        }
    }

    let mut singular_pairs = Vec::new();
    for i in 0..k {
        for j in 0..k {
            'cube: for a in 0..5 {
                for b in 0..5 {
                    if hot[(4 * i + a) * probes + (4 * j + b)] {
                        singular_pairs.push((i, j));
                        break 'cube;
                    }
                }
            }
        }
    }
    let r_sq_integral = r_squared_moment(shell, curve, 8)?;
    Ok(SingularReport {
        c0,
        k,
        delta0,
        singular_pairs,
        r_sq_integral,
    })
}
