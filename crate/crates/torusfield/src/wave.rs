//! Gaussian random waves on the 3-torus: sampling, pointwise jets, curve
//! restriction, and the exact covariance jet of the restricted process.
//!
//! A wave with energy E is F(x) = N⁻¹ᐟ² Σ_{μ∈shell} a_μ e^{2πi⟨μ,x⟩} with
//! a_{−μ} = conj(a_μ) and E|a_μ|² = 1 (real and imaginary parts independent
//! N(0, 1/2)), making F real-valued with unit pointwise variance. Storage and
//! evaluation work on a half shell — one lexicographically positive
//! representative per ±pair — so realness is exact by construction: each pair
//! contributes 2·Re(a_μ e^{2πi⟨μ,x⟩}).
//!
//! The covariance of the restriction f(t) = F(γ(t)) is
//! r(t₁,t₂) = N⁻¹ Σ cos(2π⟨μ, γ(t₁)−γ(t₂)⟩), and its derivative jet
//! (r₁, r₂, r₁₂) follows by exact termwise differentiation. At coincident
//! arguments r = 1 and r₁₂ = α = 4π²E/3 (the one-dimensional derivative
//! variance of a unit-speed restriction).

use crate::curve::Curve;
use crate::lattice::{LatticePoint, LatticeShell};
use crate::{Mat3, Vec3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Errors from wave sampling and manual coefficient assignment.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum WaveError {
    /// Sampling needs a nonempty shell.
    #[error("shell at energy {0} is empty; cannot sample a wave")]
    EmptyShell(i64),
    /// Manual coefficients must target lexicographically positive
    /// representatives of the shell.
    #[error("({0}, {1}, {2}) is not a half-shell representative of this shell")]
    NotARepresentative(i64, i64, i64),
}

/// Derive an independent stream seed from a master seed and a trial index.
///
/// SplitMix64-style finalizer over master ⊕ golden-ratio-spread index:
/// deterministic, collision-resistant, and independent of scheduling order,
/// so parallel Monte Carlo trials reproduce bit-identically.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// True for the chosen half-shell representative of each ±pair: the
/// lexicographically positive member (first nonzero coordinate positive).
fn lex_positive(p: &LatticePoint) -> bool {
    (p.x, p.y, p.z) > (0, 0, 0)
}

/// A lattice shell reduced to one representative per ±pair, with the 2πμ
/// frequency vectors cached for evaluation and covariance sums.
#[derive(Debug, Clone)]
pub struct HalfShell {
    energy: i64,
    full_count: usize,
    reps: Vec<LatticePoint>,
    two_pi_mu: Vec<Vec3>,
}

impl HalfShell {
    pub fn new(shell: &LatticeShell) -> Result<Self, WaveError> {
        if shell.is_empty() {
            return Err(WaveError::EmptyShell(shell.energy()));
        }
        let reps: Vec<LatticePoint> = shell
            .points()
            .iter()
            .filter(|p| lex_positive(p))
            .copied()
            .collect();
        let two_pi = 2.0 * std::f64::consts::PI;
        let two_pi_mu = reps.iter().map(|p| two_pi * p.to_vec3()).collect();
        Ok(Self {
            energy: shell.energy(),
            full_count: shell.count(),
            reps,
            two_pi_mu,
        })
    }

    pub fn energy(&self) -> i64 {
        self.energy
    }

    /// Number of points in the full shell (N, twice the pair count).
    pub fn full_count(&self) -> usize {
        self.full_count
    }

    pub fn pair_count(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[LatticePoint] {
        &self.reps
    }

    /// The cached frequency vectors 2πμ, one per representative, in the same
    /// order as [`HalfShell::representatives`].
    pub fn frequency_vectors(&self) -> &[Vec3] {
        &self.two_pi_mu
    }

    /// Covariance jet between two curve points given their separation
    /// Δ = γ(t₁) − γ(t₂) and unit tangents v₁ = γ′(t₁), v₂ = γ′(t₂):
    ///   r   = N⁻¹ Σ cos θ_μ,                 θ_μ = 2π⟨μ, Δ⟩
    ///   r₁  = −N⁻¹ Σ 2π⟨μ,v₁⟩ sin θ_μ        (∂/∂t₁)
    ///   r₂  = +N⁻¹ Σ 2π⟨μ,v₂⟩ sin θ_μ        (∂/∂t₂)
    ///   r₁₂ = N⁻¹ Σ 4π²⟨μ,v₁⟩⟨μ,v₂⟩ cos θ_μ  (∂²/∂t₁∂t₂)
    /// evaluated over the half shell with weight 2 folded into the 1/N
    /// normalization (every summand is even under μ → −μ).
    pub fn jet_between(&self, delta: Vec3, v1: Vec3, v2: Vec3) -> CovarianceJet {
        let (mut r, mut r1, mut r2, mut r12) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for m in &self.two_pi_mu {
            let theta = m.dot(&delta);
            let (s, c) = theta.sin_cos();
            let d1 = m.dot(&v1);
            let d2 = m.dot(&v2);
            r += c;
            r1 -= s * d1;
            r2 += s * d2;
            r12 += c * d1 * d2;
        }
        let pairs = self.reps.len() as f64;
        CovarianceJet {
            r: r / pairs,
            r1: r1 / pairs,
            r2: r2 / pairs,
            r12: r12 / pairs,
        }
    }

    /// The plain correlation r(Δ) = N⁻¹ Σ cos(2π⟨μ, Δ⟩), without derivatives.
    pub fn value_correlation(&self, delta: Vec3) -> f64 {
        let sum: f64 = self.two_pi_mu.iter().map(|m| m.dot(&delta).cos()).sum();
        sum / self.reps.len() as f64
    }
}

/// Covariance jet of the restricted process at a pair of parameters:
/// r = E[f(t₁)f(t₂)], r₁ = ∂r/∂t₁, r₂ = ∂r/∂t₂, r₁₂ = ∂²r/∂t₁∂t₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceJet {
    pub r: f64,
    pub r1: f64,
    pub r2: f64,
    pub r12: f64,
}

/// Exact covariance jet for a shell and curve at parameters (t₁, t₂), both
/// expected in [0, L].
pub fn covariance_jet(
    shell: &LatticeShell,
    curve: &Curve,
    t1: f64,
    t2: f64,
) -> Result<CovarianceJet, WaveError> {
    let half = HalfShell::new(shell)?;
    let j1 = curve.jet(t1);
    let j2 = curve.jet(t2);
    Ok(half.jet_between(j1.position - j2.position, j1.velocity, j2.velocity))
}

/// Value, gradient, and Hessian of a wave at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldJet {
    pub value: f64,
    pub gradient: Vec3,
    pub hessian: Mat3,
}

/// One sampled wave: a half shell plus one complex Gaussian coefficient per
/// ±pair (the other member of the pair is the implicit conjugate).
#[derive(Debug, Clone)]
pub struct WaveSample {
    half: HalfShell,
    coeffs: Vec<Complex64>,
    seed: u64,
}

/// Draw a wave on `shell` with independent standard complex Gaussian
/// coefficients (E|a_μ|² = 1), deterministically from `seed`.
pub fn sample_wave(shell: &LatticeShell, seed: u64) -> Result<WaveSample, WaveError> {
    let half = HalfShell::new(shell)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let component = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).unwrap();
    let coeffs = (0..half.pair_count())
        .map(|_| Complex64::new(component.sample(&mut rng), component.sample(&mut rng)))
        .collect();
    Ok(WaveSample { half, coeffs, seed })
}

impl WaveSample {
    /// Deterministic wave with caller-chosen coefficients (all unset pairs
    /// zero); for analytically tractable oracles such as separable waves.
    /// Assignments must target half-shell representatives. Records seed 0.
    pub fn from_coefficients(
        shell: &LatticeShell,
        assignments: &[(LatticePoint, Complex64)],
    ) -> Result<Self, WaveError> {
        let half = HalfShell::new(shell)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); half.pair_count()];
        for (p, a) in assignments {
            let idx = half
                .reps
                .binary_search(p)
                .map_err(|_| WaveError::NotARepresentative(p.x, p.y, p.z))?;
            coeffs[idx] = *a;
        }
        Ok(Self {
            half,
            coeffs,
            seed: 0,
        })
    }

    pub fn energy(&self) -> i64 {
        self.half.energy
    }

    /// N, the number of points in the full shell.
    pub fn full_count(&self) -> usize {
        self.half.full_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn half_shell(&self) -> &HalfShell {
        &self.half
    }

    /// Stored coefficient of a half-shell representative.
    pub fn coefficient(&self, p: &LatticePoint) -> Option<Complex64> {
        self.half.reps.binary_search(p).ok().map(|i| self.coeffs[i])
    }

    /// Coefficient of any full-shell point, applying a_{−μ} = conj(a_μ) for
    /// the non-representative member of each pair.
    pub fn full_coefficient(&self, p: &LatticePoint) -> Option<Complex64> {
        if lex_positive(p) {
            self.coefficient(p)
        } else {
            self.coefficient(&p.neg()).map(|a| a.conj())
        }
    }

    /// F(x) = (2/√N) Σ_pairs Re(a_μ e^{2πi⟨μ,x⟩}): real by construction.
    pub fn eval_value(&self, x: Vec3) -> f64 {
        let mut value = 0.0;
        for (m, a) in self.half.two_pi_mu.iter().zip(&self.coeffs) {
            let (s, c) = m.dot(&x).sin_cos();
            value += 2.0 * (a.re * c - a.im * s);
        }
        value / (self.half.full_count as f64).sqrt()
    }

    /// F(x) and ∇F(x), sharing the trigonometric work.
    pub fn eval_value_and_gradient(&self, x: Vec3) -> (f64, Vec3) {
        let mut value = 0.0;
        let mut grad = Vec3::zeros();
        for (m, a) in self.half.two_pi_mu.iter().zip(&self.coeffs) {
            let (s, c) = m.dot(&x).sin_cos();
            let re = a.re * c - a.im * s;
            let im = a.re * s + a.im * c;
            value += 2.0 * re;
            grad -= 2.0 * im * m;
        }
        let scale = 1.0 / (self.half.full_count as f64).sqrt();
        (value * scale, grad * scale)
    }

    /// Full second-order jet. Termwise differentiation of the pair form:
    /// each ±pair contributes 2Re(z), −2Im(z)·(2πμ), and −2Re(z)·(2πμ)(2πμ)ᵀ
    /// with z = a_μ e^{2πi⟨μ,x⟩}, so trace(hessian) = −4π²E·value identically.
    pub fn eval_field_jet(&self, x: Vec3) -> FieldJet {
        let mut value = 0.0;
        let mut grad = Vec3::zeros();
        let mut hess = Mat3::zeros();
        for (m, a) in self.half.two_pi_mu.iter().zip(&self.coeffs) {
            let (s, c) = m.dot(&x).sin_cos();
            let re = a.re * c - a.im * s;
            let im = a.re * s + a.im * c;
            value += 2.0 * re;
            grad -= 2.0 * im * m;
            hess -= 2.0 * re * (m * m.transpose());
        }
        let scale = 1.0 / (self.half.full_count as f64).sqrt();
        FieldJet {
            value: value * scale,
            gradient: grad * scale,
            hessian: hess * scale,
        }
    }

    /// The restriction f(t) = F(γ(t)) as a one-dimensional process handle.
    pub fn restrict<'a>(&'a self, curve: &'a Curve) -> Restriction<'a> {
        Restriction { wave: self, curve }
    }
}

/// A real process on an interval [0, L], as consumed by the zero counter:
/// values, the derivative along the parameter, and enough geometry (length,
/// closedness, characteristic frequency) to pick grid resolutions.
pub trait RestrictedProcess {
    /// Domain length L.
    fn length(&self) -> f64;
    /// Whether t = 0 and t = L are the same point of the underlying curve.
    fn is_closed(&self) -> bool;
    /// Characteristic frequency: oscillations occur on scale ~1/frequency,
    /// so grids use ⌈L·frequency·points_per_wavelength⌉ nodes.
    fn frequency(&self) -> f64;
    /// f(t).
    fn value(&self, t: f64) -> f64;
    /// f′(t).
    fn derivative(&self, t: f64) -> f64;
}

/// A wave restricted to a curve: f(t) = F(γ(t)), f′(t) = ⟨∇F(γ(t)), γ′(t)⟩.
pub struct Restriction<'a> {
    wave: &'a WaveSample,
    curve: &'a Curve,
}

impl Restriction<'_> {
    pub fn wave(&self) -> &WaveSample {
        self.wave
    }

    pub fn curve(&self) -> &Curve {
        self.curve
    }
}

impl RestrictedProcess for Restriction<'_> {
    fn length(&self) -> f64 {
        self.curve.length()
    }

    fn is_closed(&self) -> bool {
        self.curve.is_closed()
    }

    fn frequency(&self) -> f64 {
        (self.wave.energy() as f64).sqrt()
    }

    fn value(&self, t: f64) -> f64 {
        self.wave.eval_value(self.curve.position(t))
    }

    fn derivative(&self, t: f64) -> f64 {
        let jet = self.curve.jet(t);
        let (_, grad) = self.wave.eval_value_and_gradient(jet.position);
        grad.dot(&jet.velocity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeShell;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn shell(energy: i64) -> LatticeShell {
        LatticeShell::enumerate(energy).unwrap()
    }

    /// The wave F(x) = sin(2πk·x₁), expressed in shell coefficients: the
    /// single pair ±(k,0,0) with a = −i√N/2 gives
    /// (2/√N)·Re(−i√N/2 · e^{iθ}) = sin θ.
    fn separable_sine(k: i64) -> WaveSample {
        let sh = shell(k * k);
        let n = sh.count() as f64;
        WaveSample::from_coefficients(
            &sh,
            &[(
                LatticePoint::new(k, 0, 0),
                Complex64::new(0.0, -n.sqrt() / 2.0),
            )],
        )
        .unwrap()
    }

    #[test]
    fn unit_shell_has_three_pairs() {
        let w = sample_wave(&shell(1), 42).unwrap();
        assert_eq!(w.half_shell().pair_count(), 3);
        assert_eq!(w.full_count(), 6);
        // Representatives are the three positive axis points.
        assert_eq!(
            w.half_shell().representatives(),
            &[
                LatticePoint::new(0, 0, 1),
                LatticePoint::new(0, 1, 0),
                LatticePoint::new(1, 0, 0),
            ]
        );
    }

    #[test]
    fn sampling_is_deterministic() {
        let sh = shell(101);
        let a = sample_wave(&sh, 7).unwrap();
        let b = sample_wave(&sh, 7).unwrap();
        let c = sample_wave(&sh, 8).unwrap();
        assert_eq!(a.coeffs, b.coeffs);
        assert_ne!(a.coeffs, c.coeffs);
        let x = Vec3::new(0.2, 0.4, 0.8);
        assert_eq!(a.eval_value(x), a.eval_value(x));
    }

    #[test]
    fn empty_shell_rejected() {
        let sh = LatticeShell::enumerate(7).unwrap();
        assert_eq!(
            sample_wave(&sh, 1).map(|_| ()),
            Err(WaveError::EmptyShell(7))
        );
    }

    #[test]
    fn derive_seed_spreads() {
        let seeds: Vec<u64> = (0..100).map(|i| derive_seed(12345, i)).collect();
        let mut unique = seeds.clone();
        unique.sort_unstable();
        unique.dedup();
        assert_eq!(unique.len(), seeds.len());
        assert_eq!(derive_seed(12345, 50), seeds[50]);
        assert_ne!(derive_seed(12346, 0), derive_seed(12345, 0));
    }

    #[test]
    fn half_shell_eval_matches_naive_full_sum() {
        // Realness is structural: the naive full-shell complex sum must have
        // vanishing imaginary part and real part equal to the half-shell form.
        let sh = shell(101);
        let w = sample_wave(&sh, 2024).unwrap();
        let scale = 1.0 / (sh.count() as f64).sqrt();
        for x in [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(0.31, 0.77, 0.13),
            Vec3::new(-1.2, 3.4, 0.65),
        ] {
            let mut full = Complex64::new(0.0, 0.0);
            for p in sh.points() {
                let a = w.full_coefficient(p).unwrap();
                let theta = 2.0 * std::f64::consts::PI * p.to_vec3().dot(&x);
                full += a * Complex64::new(theta.cos(), theta.sin());
            }
            full *= scale;
            assert!(full.im.abs() < 1e-12);
            assert!((full.re - w.eval_value(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_pair_cosine_zero() {
        let sh = shell(1);
        let w = WaveSample::from_coefficients(
            &sh,
            &[(LatticePoint::new(1, 0, 0), Complex64::new(1.0, 0.0))],
        )
        .unwrap();
        // value = (2/√6)·Re(e^{iπ/2}) = 0 at x = (1/4, 0, 0).
        assert!(w.eval_value(Vec3::new(0.25, 0.0, 0.0)).abs() < 1e-15);
        // Off-representative assignments are rejected.
        assert!(matches!(
            WaveSample::from_coefficients(
                &sh,
                &[(LatticePoint::new(-1, 0, 0), Complex64::new(1.0, 0.0))]
            ),
            Err(WaveError::NotARepresentative(-1, 0, 0))
        ));
    }

    #[test]
    fn eigenfunction_identity() {
        // trace(Hessian) = −4π²E·value at 100 random points per sample.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for energy in [11i64, 101] {
            let sh = shell(energy);
            let w = sample_wave(&sh, derive_seed(5, energy as u64)).unwrap();
            let lambda = 4.0 * std::f64::consts::PI.powi(2) * energy as f64;
            for _ in 0..100 {
                let x = Vec3::new(rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>());
                let jet = w.eval_field_jet(x);
                let residual = jet.hessian.trace() + lambda * jet.value;
                assert!(residual.abs() <= 1e-9 * lambda * jet.value.abs().max(1.0));
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let w = sample_wave(&shell(11), 31).unwrap();
        let h = 1e-6;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = Vec3::new(rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>());
            let jet = w.eval_field_jet(x);
            for i in 0..3 {
                let mut e = Vec3::zeros();
                e[i] = h;
                let d = (w.eval_value(x + e) - w.eval_value(x - e)) / (2.0 * h);
                assert!((d - jet.gradient[i]).abs() <= 1e-5 * jet.gradient.norm().max(1.0));
            }
        }
    }

    #[test]
    fn empirical_variance_is_unit() {
        let sh = shell(11);
        let x = Vec3::new(0.3, 0.7, 0.2);
        let n = 10_000u64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n {
            let v = sample_wave(&sh, derive_seed(777, i)).unwrap().eval_value(x);
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!((var - 1.0).abs() < 0.05, "empirical variance {var}");
    }

    #[test]
    fn restriction_derivative_matches_finite_difference() {
        let sh = shell(101);
        let w = sample_wave(&sh, 11).unwrap();
        let curve = Curve::torus_helix(0.25, Curve::DEFAULT_CLIMB).unwrap();
        let f = w.restrict(&curve);
        assert_eq!(f.frequency(), (101.0f64).sqrt());
        assert!(f.is_closed());
        let h = 1e-6;
        for i in 1..12 {
            let t = curve.length() * i as f64 / 12.0;
            let fd = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
            let d = f.derivative(t);
            assert!((fd - d).abs() <= 1e-5 * d.abs().max(1.0));
            assert_eq!(f.value(t), f.value(t));
        }
    }

    #[test]
    fn separable_wave_constant_on_transverse_plane() {
        // F = sin(2π·2·x₁) restricted to a segment in the plane x₁ = 1/(2π)
        // is the constant sin(2) ≠ 0: a nowhere-zero restriction.
        let w = separable_sine(2);
        let x1 = 1.0 / (2.0 * std::f64::consts::PI);
        let seg = Curve::straight_segment(
            Vec3::new(x1, 0.1, 0.1),
            Vec3::new(x1, 0.9, 0.1),
        )
        .unwrap();
        let f = w.restrict(&seg);
        for i in 0..=8 {
            let t = seg.length() * i as f64 / 8.0;
            assert_relative_eq!(f.value(t), 2.0f64.sin(), max_relative = 1e-12);
            assert!(f.derivative(t).abs() < 1e-12);
        }
        // And along the x₁ axis itself the restriction is sin(4πt).
        let axis =
            Curve::straight_segment(Vec3::new(0.0, 0.5, 0.5), Vec3::new(1.0, 0.5, 0.5)).unwrap();
        let g = w.restrict(&axis);
        for i in 0..=16 {
            let t = i as f64 / 16.0;
            assert_relative_eq!(
                g.value(t),
                (4.0 * std::f64::consts::PI * t).sin(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn coincident_covariance_jet() {
        let curve = Curve::planar_circle(0.25, 0.25).unwrap();
        for energy in [1i64, 11, 101] {
            let sh = shell(energy);
            for i in 0..5 {
                let t = curve.length() * i as f64 / 5.0;
                let jet = covariance_jet(&sh, &curve, t, t).unwrap();
                assert_eq!(jet.r, 1.0);
                assert_eq!(jet.r1, 0.0);
                assert_eq!(jet.r2, 0.0);
                let alpha = 4.0 * std::f64::consts::PI.powi(2) * energy as f64 / 3.0;
                assert_relative_eq!(jet.r12, alpha, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn unit_shell_segment_covariance_closed_form() {
        // E = 1 along the x₁ axis: r(s) = (2cos(2πs) + 4)/6 from the
        // explicit 6-term shell sum.
        let sh = shell(1);
        let seg =
            Curve::straight_segment(Vec3::new(0.0, 0.2, 0.9), Vec3::new(1.0, 0.2, 0.9)).unwrap();
        for (t1, t2) in [(0.3, 0.1), (0.9, 0.25), (0.5, 0.5), (1.0, 0.0)] {
            let s = t1 - t2;
            let jet = covariance_jet(&sh, &seg, t1, t2).unwrap();
            let two_pi = 2.0 * std::f64::consts::PI;
            assert_relative_eq!(
                jet.r,
                (2.0 * (two_pi * s).cos() + 4.0) / 6.0,
                epsilon = 1e-14
            );
            assert_relative_eq!(
                jet.r1,
                -(two_pi / 3.0) * (two_pi * s).sin(),
                epsilon = 1e-14
            );
            assert_relative_eq!(
                jet.r2,
                (two_pi / 3.0) * (two_pi * s).sin(),
                epsilon = 1e-14
            );
            assert_relative_eq!(
                jet.r12,
                two_pi.powi(2) / 3.0 * (two_pi * s).cos(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn mixed_derivative_matches_finite_difference() {
        // Step chosen so O(h²·(2π√E)⁴) truncation stays well under the 1e−4
        // relative bound while h² still dominates f64 roundoff.
        let sh = shell(101);
        let curve = Curve::torus_helix(0.25, Curve::DEFAULT_CLIMB).unwrap();
        let h = 2e-5;
        for (t1, t2) in [(0.8, 0.3), (1.4, 1.1), (0.2, 1.7)] {
            let jet = covariance_jet(&sh, &curve, t1, t2).unwrap();
            let rr = |a: f64, b: f64| covariance_jet(&sh, &curve, a, b).unwrap().r;
            let fd12 = (rr(t1 + h, t2 + h) - rr(t1 + h, t2 - h) - rr(t1 - h, t2 + h)
                + rr(t1 - h, t2 - h))
                / (4.0 * h * h);
            assert!((fd12 - jet.r12).abs() <= 1e-4 * jet.r12.abs().max(1.0));
            let fd1 = (rr(t1 + h, t2) - rr(t1 - h, t2)) / (2.0 * h);
            let fd2 = (rr(t1, t2 + h) - rr(t1, t2 - h)) / (2.0 * h);
            assert!((fd1 - jet.r1).abs() <= 1e-5 * jet.r1.abs().max(1.0));
            assert!((fd2 - jet.r2).abs() <= 1e-5 * jet.r2.abs().max(1.0));
        }
    }

    #[test]
    fn covariance_is_stationary() {
        // Translating the curve by a fixed vector leaves every covariance
        // quantity unchanged: r depends only on γ(t₁) − γ(t₂).
        let sh = shell(101);
        let base = Curve::planar_circle(0.25, 0.25).unwrap();
        let shift = Vec3::new(0.37, -0.21, 0.55);
        let length = base.length();
        let circle_jets = move |t: f64| Curve::planar_circle(0.25, 0.25).unwrap().jet(t);
        let translated = Curve::custom(length, true, move |t| {
            let mut jet = circle_jets(t);
            jet.position += shift;
            jet
        })
        .unwrap();
        for (t1, t2) in [(0.1, 0.9), (1.2, 0.4), (0.0, 1.5)] {
            let a = covariance_jet(&sh, &base, t1, t2).unwrap();
            let b = covariance_jet(&sh, &translated, t1, t2).unwrap();
            assert!((a.r - b.r).abs() < 1e-12);
            assert!((a.r1 - b.r1).abs() < 1e-12);
            assert!((a.r2 - b.r2).abs() < 1e-12);
            assert!((a.r12 - b.r12).abs() < 1e-12 * a.r12.abs().max(1.0));
        }
    }

    #[test]
    fn correlation_is_bounded() {
        let sh = shell(101);
        let half = HalfShell::new(&sh).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let delta = Vec3::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            );
            let r = half.value_correlation(delta);
            assert!(r.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn empirical_covariance_matches_analytic() {
        // Sample covariance of (f(t₁), f(t₂)) over 2·10⁴ waves within three
        // standard errors (SE² = (1+r²)/n for a bivariate Gaussian pair) at
        // ten random parameter pairs.
        let sh = shell(11);
        let curve = Curve::torus_helix(0.25, Curve::DEFAULT_CLIMB).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let pairs: Vec<(f64, f64)> = (0..10)
            .map(|_| {
                (
                    rng.random::<f64>() * curve.length(),
                    rng.random::<f64>() * curve.length(),
                )
            })
            .collect();
        let n = 20_000u64;
        let mut sums = vec![(0.0f64, 0.0f64, 0.0f64); pairs.len()];
        for i in 0..n {
            let w = sample_wave(&sh, derive_seed(4242, i)).unwrap();
            let f = w.restrict(&curve);
            for (k, (t1, t2)) in pairs.iter().enumerate() {
                let (v1, v2) = (f.value(*t1), f.value(*t2));
                sums[k].0 += v1;
                sums[k].1 += v2;
                sums[k].2 += v1 * v2;
            }
        }
        for (k, (t1, t2)) in pairs.iter().enumerate() {
            let analytic = covariance_jet(&sh, &curve, *t1, *t2).unwrap().r;
            let (s1, s2, s12) = sums[k];
            let cov = s12 / n as f64 - (s1 / n as f64) * (s2 / n as f64);
            let se = ((1.0 + analytic * analytic) / n as f64).sqrt();
            assert!(
                (cov - analytic).abs() <= 3.0 * se,
                "pair {k}: cov {cov} vs analytic {analytic} (SE {se})"
            );
        }
    }
}
