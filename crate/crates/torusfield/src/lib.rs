//! torusfield: a simulation laboratory for nodal intersections of Gaussian
//! random waves on the flat 3-torus ℝ³/ℤ³.
//!
//! The model: for a shell of lattice points E(E) = {μ ∈ ℤ³ : |μ|² = E}, the
//! random wave F(x) = N_E^{−1/2} Σ_μ a_μ e^{2πi⟨μ,x⟩} (with a_{−μ} = conj a_μ
//! and standard complex Gaussian coefficients) is a real eigenfunction of −Δ
//! with eigenvalue 4π²E. Restricting F to a fixed smooth curve γ of length L
//! and counting the zeros of f(t) = F(γ(t)) gives the nodal-intersection
//! count Z. This crate measures Z's statistics against the analytic
//! predictions: E[Z] = L·(2/√3)·√E, variance decay controlled by the second
//! moment R₂(E) of the restricted covariance jet, spherical equidistribution
//! of shells (Riesz energies, cap discrepancies), and the oscillatory-integral
//! decay that separates curves with nonvanishing torsion from planar ones.
//!
//! Modules mirror the pipeline: [`lattice`] (shells on spheres), [`curve`]
//! (unit-speed reference curves with exact jets), [`wave`] (seeded Gaussian
//! samples and field evaluation), [`kacrice`] (K₁/K₂ densities, R₂, singular
//! cubes), [`zeros`] (sign-change counting with bisection refinement),
//! [`oscillatory`] (phase-resolved quadrature and decay fits), and [`harness`]
//! (reproducible experiment running, records, CLI plumbing).

pub mod curve;
pub mod harness;
pub mod kacrice;
pub mod lattice;
pub mod oscillatory;
pub mod wave;
pub mod zeros;

/// Shared floating 3-vector type.
pub type Vec3 = nalgebra::Vector3<f64>;
/// Shared 3×3 matrix type (field Hessians).
pub type Mat3 = nalgebra::Matrix3<f64>;
