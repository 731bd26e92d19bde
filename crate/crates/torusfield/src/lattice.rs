//! Integer lattice points on spheres and their spherical statistics.
//!
//! The central object is the shell E(E) = {μ ∈ ℤ³ : |μ|² = E} with cardinality
//! N_E. A shell is nonempty exactly when E is a sum of three squares, i.e. not
//! of the form 4^a(8b+7). Energies with E ≢ 0, 4, 7 (mod 8) are *admissible*:
//! they carry a primitive lattice point and are the energies the statistical
//! experiments run on.
//!
//! On top of enumeration this module provides Riesz s-energies of the
//! projected points μ/√E ∈ S², a dyadic majorant for those energies, spherical
//! cap counts, and a seeded cap-discrepancy diagnostic for equidistribution.

use crate::Vec3;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Errors from shell construction and energy computations.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum LatticeError {
    /// Shell energies must be at least 1.
    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(i64),
    /// A manually supplied point set failed validation.
    #[error("point ({x}, {y}, {z}) has squared norm {got}, expected {expected}")]
    WrongNorm {
        x: i64,
        y: i64,
        z: i64,
        got: i64,
        expected: i64,
    },
    /// A manually supplied point set is not closed under negation.
    #[error("point set is not closed under negation: missing -({x}, {y}, {z})")]
    NotNegationClosed { x: i64, y: i64, z: i64 },
    /// Riesz energy needs at least one pair of distinct points.
    #[error("Riesz energy undefined: shell has {0} point(s), need at least 2")]
    UndefinedEnergy(usize),
    /// The Riesz exponent must lie in the open interval (0, 2).
    #[error("Riesz exponent must lie in (0, 2), got {0}")]
    ExponentOutOfRange(f64),
}

/// A lattice point μ = (x, y, z) ∈ ℤ³ on some shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl LatticePoint {
    pub fn new(x: i64, y: i64, z: i64) -> Self {
        Self { x, y, z }
    }

    /// Squared Euclidean norm x² + y² + z², exact in integers.
    pub fn norm_sq(&self) -> i64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// The antipode −μ.
    pub fn neg(&self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }

    /// The point as a floating 3-vector.
    pub fn to_vec3(&self) -> Vec3 {
        Vec3::new(self.x as f64, self.y as f64, self.z as f64)
    }

    /// Squared distance |μ − ν|², exact in integers.
    pub fn dist_sq(&self, other: &Self) -> i64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }
}

impl std::fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// True iff n (≥ 1) is a sum of three integer squares, i.e. not of the form
/// 4^a(8b+7). Factors of 4 are stripped before the residue test.
pub fn is_sum_of_three_squares(n: i64) -> bool {
    assert!(n >= 1, "is_sum_of_three_squares requires n >= 1, got {n}");
    let mut m = n;
    while m % 4 == 0 {
        m /= 4;
    }
    m % 8 != 7
}

/// True iff n (≥ 1) is admissible: n ≢ 0, 4, 7 (mod 8). Admissible energies
/// carry a primitive lattice point, and in particular a nonempty shell.
pub fn is_admissible(n: i64) -> bool {
    assert!(n >= 1, "is_admissible requires n >= 1, got {n}");
    !matches!(n % 8, 0 | 4 | 7)
}

/// Riesz s-energy report for one shell: the raw ordered-pair energy of the
/// projected points, its N²-normalization, and the dyadic majorant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub s: f64,
    pub value: f64,
    pub normalized: f64,
    pub dyadic_bound: f64,
}

/// The full set of lattice points with squared norm E, sorted and
/// negation-closed. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeShell {
    energy: i64,
    points: Vec<LatticePoint>,
}

impl LatticeShell {
    /// Exhaustively enumerate E(E). For each (x, y) with x² + y² ≤ E the
    /// remainder E − x² − y² is tested for squareness with integer square
    /// roots; both signs of z are included. Non-representable E yields an
    /// empty shell (not an error).
    pub fn enumerate(energy: i64) -> Result<Self, LatticeError> {
        if energy < 1 {
            return Err(LatticeError::NonPositiveEnergy(energy));
        }
        let r = energy.isqrt();
        let mut points = Vec::new();
        for x in -r..=r {
            let rem_x = energy - x * x;
            let ry = rem_x.isqrt();
            for y in -ry..=ry {
                let rem = rem_x - y * y;
                let z = rem.isqrt();
                if z * z == rem {
                    points.push(LatticePoint::new(x, y, z));
                    if z != 0 {
                        points.push(LatticePoint::new(x, y, -z));
                    }
                }
            }
        }
        points.sort_unstable();
        Ok(Self { energy, points })
    }

    /// Build a shell from an explicit point set (e.g. a two-point pair
    /// {μ, −μ}). Validates the common squared norm and negation closure;
    /// does not require exhaustiveness.
    pub fn from_points(
        energy: i64,
        mut points: Vec<LatticePoint>,
    ) -> Result<Self, LatticeError> {
        if energy < 1 {
            return Err(LatticeError::NonPositiveEnergy(energy));
        }
        points.sort_unstable();
        points.dedup();
        for p in &points {
            if p.norm_sq() != energy {
                return Err(LatticeError::WrongNorm {
                    x: p.x,
                    y: p.y,
                    z: p.z,
                    got: p.norm_sq(),
                    expected: energy,
                });
            }
            if points.binary_search(&p.neg()).is_err() {
                return Err(LatticeError::NotNegationClosed {
                    x: p.x,
                    y: p.y,
                    z: p.z,
                });
            }
        }
        Ok(Self { energy, points })
    }

    pub fn energy(&self) -> i64 {
        self.energy
    }

    /// N_E, the number of lattice points on the shell.
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    fn require_pairs(&self, s: f64) -> Result<(), LatticeError> {
        if !(s > 0.0 && s < 2.0) {
            return Err(LatticeError::ExponentOutOfRange(s));
        }
        if self.count() < 2 {
            return Err(LatticeError::UndefinedEnergy(self.count()));
        }
        Ok(())
    }

    /// Riesz s-energy of the projected points μ/√E on the unit sphere:
    /// Σ over ordered pairs of distinct points of |μ/√E − ν/√E|^(−s).
    /// Distances come from exact integer differences, then one square root.
    pub fn riesz_energy(&self, s: f64) -> Result<EnergyReport, LatticeError> {
        self.require_pairs(s)?;
        let sqrt_e = (self.energy as f64).sqrt();
        let mut value = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                let dist = (p.dist_sq(q) as f64).sqrt() / sqrt_e;
                // Ordered pairs: each unordered pair contributes twice.
                value += 2.0 * dist.powf(-s);
            }
        }
        let n = self.count() as f64;
        Ok(EnergyReport {
            s,
            value,
            normalized: value / (n * n),
            dyadic_bound: self.riesz_dyadic_bound(s)?,
        })
    }

    /// Dyadic majorant of the Riesz energy: pairs are binned in dyadic bands
    /// 2^k ≤ |μ−ν| < 2^(k+1) of unprojected distance (band index by exact
    /// integer comparison on |μ−ν|²), each band contributing 2^(−ks) per
    /// pair, rescaled by E^(s/2) to the projected normalization.
    pub fn riesz_dyadic_bound(&self, s: f64) -> Result<f64, LatticeError> {
        self.require_pairs(s)?;
        // counts[k] = number of ordered pairs in band k; distinct shell points
        // satisfy 2 ≤ |μ−ν|² ≤ 4E, so k ranges over 0 ..= log₂(2√E).
        let mut counts: Vec<u64> = Vec::new();
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                let d_sq = p.dist_sq(q) as u64;
                let k = ((u64::BITS - 1 - d_sq.leading_zeros()) / 2) as usize;
                if counts.len() <= k {
                    counts.resize(k + 1, 0);
                }
                counts[k] += 2;
            }
        }
        let bound: f64 = counts
            .iter()
            .enumerate()
            .map(|(k, &c)| 2f64.powf(-(k as f64) * s) * c as f64)
            .sum();
        Ok((self.energy as f64).powf(s / 2.0) * bound)
    }

    /// Number of shell points ν with |ν − √E·direction| < radius (strict),
    /// i.e. lattice points in the spherical cap of chordal radius `radius`
    /// around the point √E·direction of the radius-√E sphere.
    pub fn cap_count(&self, direction: Vec3, radius: f64) -> usize {
        assert!(
            (direction.norm() - 1.0).abs() <= 1e-12,
            "cap direction must be a unit vector, |d| = {}",
            direction.norm()
        );
        assert!(!self.is_empty(), "cap_count requires a nonempty shell");
        let center = direction * (self.energy as f64).sqrt();
        self.points
            .iter()
            .filter(|p| (p.to_vec3() - center).norm() < radius)
            .count()
    }

    /// Discrepancy of a single cap of chordal radius `radius` on the unit
    /// sphere: |fraction of projected shell points inside − cap area
    /// fraction|. The area fraction of {x : |x − p| < ρ} on S² is ρ²/4.
    pub fn cap_discrepancy(&self, direction: Vec3, radius: f64) -> f64 {
        let inside = self.cap_count(direction, radius * (self.energy as f64).sqrt());
        let empirical = inside as f64 / self.count() as f64;
        let area = (radius * radius / 4.0).min(1.0);
        (empirical - area).abs()
    }

    /// Maximum cap discrepancy over `cap_samples` seeded random caps:
    /// directions uniform on the sphere (normalized Gaussian triples), chordal
    /// radii uniform in (0, 2). Deterministic given the seed.
    pub fn equidistribution_discrepancy(&self, cap_samples: usize, rng_seed: u64) -> f64 {
        assert!(!self.is_empty(), "discrepancy requires a nonempty shell");
        assert!(cap_samples >= 1, "need at least one cap sample");
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut worst = 0.0f64;
        for _ in 0..cap_samples {
            let direction = loop {
                let v = Vec3::new(
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                );
                let n = v.norm();
                if n > 1e-6 {
                    break v / n;
                }
            };
            // Uniform in the open interval (0, 2).
            let radius = 2.0 * rng.sample::<f64, _>(rand::distr::Open01);
            worst = worst.max(self.cap_discrepancy(direction, radius));
        }
        worst
    }
}
