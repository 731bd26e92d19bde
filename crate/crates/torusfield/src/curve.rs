//! Unit-speed reference curves in the 3-torus with exact derivative jets.
//!
//! Curves are represented by closed-form jets (γ, γ′, γ″, γ‴), not splines:
//! downstream oscillatory integrals and Frenet invariants need exact
//! curvature κ and torsion τ, free of interpolation noise. The catalog
//! realizes the two statistical regimes — the `torus-helix` (constant κ, τ
//! both nonzero) and the `planar-circle` (κ > 0, τ ≡ 0) — plus the
//! `straight-segment`, an oracle-only curve that experiments requiring
//! positive curvature reject. Curves live in the fundamental-domain lift of
//! ℝ³/ℤ³; wave evaluation applies e^{2πi⟨μ,x⟩}, which is ℤ³-periodic, so no
//! reduction is ever needed.

use crate::Vec3;

/// Errors from curve construction and frame evaluation.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum CurveError {
    /// Circle/helix radii must lie in (0, 1/2) to avoid self-intersection in
    /// the torus.
    #[error("radius must lie in (0, 1/2), got {0}")]
    RadiusOutOfRange(f64),
    /// Helix axial climb must be positive (zero climb degenerates to a
    /// planar circle with the wrong kind tag).
    #[error("helix climb must be positive, got {0}")]
    NonPositiveClimb(f64),
    /// Straight segments need two distinct endpoints.
    #[error("straight segment has zero length")]
    ZeroLengthSegment,
    /// Segment endpoints must lie in the closed unit cell [0,1]³.
    #[error("segment endpoint ({0}, {1}, {2}) lies outside the unit cell")]
    EndpointOutsideCell(f64, f64, f64),
    /// Custom curves must declare a positive length.
    #[error("curve length must be positive, got {0}")]
    NonPositiveLength(f64),
    /// The Frenet frame is undefined where curvature vanishes.
    #[error("Frenet frame undefined at t = {t}: curvature {kappa} ≈ 0")]
    FrenetUndefined { t: f64, kappa: f64 },
    /// Unrecognized kind tag in a plain-text curve spec.
    #[error("unknown curve kind '{0}' (expected planar-circle, torus-helix, or straight-segment)")]
    UnknownKind(String),
    /// Wrong parameter count in a plain-text curve spec.
    #[error("curve kind '{kind}' expects {expected} parameter(s), got {got}")]
    BadParamCount {
        kind: &'static str,
        expected: &'static str,
        got: usize,
    },
}

/// Curve family tag. `Custom` curves are API-only; the other three are
/// constructible from plain-text specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    PlanarCircle,
    TorusHelix,
    StraightSegment,
    Custom,
}

impl CurveKind {
    pub fn tag(&self) -> &'static str {
        match self {
            CurveKind::PlanarCircle => "planar-circle",
            CurveKind::TorusHelix => "torus-helix",
            CurveKind::StraightSegment => "straight-segment",
            CurveKind::Custom => "custom",
        }
    }
}

impl std::fmt::Display for CurveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// The derivative jet of a curve at one parameter value: position and the
/// first three t-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub position: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
    pub jerk: Vec3,
}

/// Frenet-Serret data at one point: the orthonormal frame (T, N, B),
/// curvature κ = |γ″| and torsion τ = ⟨γ‴, B⟩/κ (the sign convention that
/// makes B′ = −τN for unit-speed curves).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetData {
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
    pub kappa: f64,
    pub tau: f64,
}

/// Curvature below this threshold counts as vanishing for frame purposes.
const KAPPA_FLOOR: f64 = 1e-12;

enum Form {
    /// Circle of radius ρ in the plane z = offset, centered at (1/2, 1/2, ·).
    PlanarCircle { radius: f64, offset: f64 },
    /// Helix of radius ρ about the vertical axis through (1/2, 1/2) with
    /// axial climb c per unit angle; w = √(ρ² + c²) is arc length per angle.
    TorusHelix { radius: f64, climb: f64, w: f64 },
    /// Unit-speed segment start + t·dir.
    StraightSegment { start: Vec3, dir: Vec3 },
    /// Caller-provided jets.
    Custom {
        jets: Box<dyn Fn(f64) -> Jet + Send + Sync>,
        closed: bool,
    },
}

/// A unit-speed curve γ: [0, L] → ℝ³ (lift of a torus curve) with exact jets.
pub struct Curve {
    form: Form,
    length: f64,
}

impl std::fmt::Debug for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Curve")
            .field("kind", &self.kind().tag())
            .field("length", &self.length)
            .finish()
    }
}

impl Curve {
    /// Circle of radius ρ ∈ (0, 1/2) in the horizontal plane z = offset,
    /// centered in the cell: κ = 1/ρ, τ ≡ 0, L = 2πρ.
    pub fn planar_circle(radius: f64, offset: f64) -> Result<Self, CurveError> {
        if !(radius > 0.0 && radius < 0.5) {
            return Err(CurveError::RadiusOutOfRange(radius));
        }
        Ok(Self {
            form: Form::PlanarCircle { radius, offset },
            length: 2.0 * std::f64::consts::PI * radius,
        })
    }

    /// Helix of radius ρ ∈ (0, 1/2) and axial climb c > 0 per unit angle:
    /// κ = ρ/(ρ²+c²) and τ = c/(ρ²+c²), both constant and nonzero;
    /// L = 2π√(ρ²+c²). With the default climb 1/(2π) the z-coordinate winds
    /// around the torus exactly once, closing the curve.
    pub fn torus_helix(radius: f64, climb: f64) -> Result<Self, CurveError> {
        if !(radius > 0.0 && radius < 0.5) {
            return Err(CurveError::RadiusOutOfRange(radius));
        }
        if climb <= 0.0 {
            return Err(CurveError::NonPositiveClimb(climb));
        }
        let w = radius.hypot(climb);
        Ok(Self {
            form: Form::TorusHelix { radius, climb, w },
            length: 2.0 * std::f64::consts::PI * w,
        })
    }

    /// The default helix climb: one vertical winding per revolution.
    pub const DEFAULT_CLIMB: f64 = 1.0 / (2.0 * std::f64::consts::PI);

    /// Unit-speed straight segment between two points of the closed unit
    /// cell. κ = 0 everywhere: admitted as an oracle curve only; experiments
    /// that require positive minimum curvature reject it.
    pub fn straight_segment(start: Vec3, end: Vec3) -> Result<Self, CurveError> {
        for p in [start, end] {
            if p.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(CurveError::EndpointOutsideCell(p.x, p.y, p.z));
            }
        }
        let length = (end - start).norm();
        if length == 0.0 {
            return Err(CurveError::ZeroLengthSegment);
        }
        Ok(Self {
            form: Form::StraightSegment {
                start,
                dir: (end - start) / length,
            },
            length,
        })
    }

    /// Curve from caller-provided jets. The caller asserts unit speed
    /// (checkable with [`Curve::validate_unit_speed`]) and declares whether
    /// the curve closes on the torus.
    pub fn custom(
        length: f64,
        closed: bool,
        jets: impl Fn(f64) -> Jet + Send + Sync + 'static,
    ) -> Result<Self, CurveError> {
        if !(length > 0.0) {
            return Err(CurveError::NonPositiveLength(length));
        }
        Ok(Self {
            form: Form::Custom {
                jets: Box::new(jets),
                closed,
            },
            length,
        })
    }

    /// Build a catalog curve from a plain-text spec: a kind tag plus numeric
    /// parameters. `planar-circle` takes radius [+ plane offset, default
    /// 0.25]; `torus-helix` takes radius [+ climb, default 1/(2π)];
    /// `straight-segment` takes the six endpoint coordinates.
    pub fn from_spec(kind: &str, params: &[f64]) -> Result<Self, CurveError> {
        match kind {
            "planar-circle" => match params {
                [radius] => Self::planar_circle(*radius, 0.25),
                [radius, offset] => Self::planar_circle(*radius, *offset),
                _ => Err(CurveError::BadParamCount {
                    kind: "planar-circle",
                    expected: "radius [offset]",
                    got: params.len(),
                }),
            },
            "torus-helix" => match params {
                [radius] => Self::torus_helix(*radius, Self::DEFAULT_CLIMB),
                [radius, climb] => Self::torus_helix(*radius, *climb),
                _ => Err(CurveError::BadParamCount {
                    kind: "torus-helix",
                    expected: "radius [climb]",
                    got: params.len(),
                }),
            },
            "straight-segment" => match params {
                [ax, ay, az, bx, by, bz] => Self::straight_segment(
                    Vec3::new(*ax, *ay, *az),
                    Vec3::new(*bx, *by, *bz),
                ),
                _ => Err(CurveError::BadParamCount {
                    kind: "straight-segment",
                    expected: "x0 y0 z0 x1 y1 z1",
                    got: params.len(),
                }),
            },
            other => Err(CurveError::UnknownKind(other.to_string())),
        }
    }

    pub fn kind(&self) -> CurveKind {
        match &self.form {
            Form::PlanarCircle { .. } => CurveKind::PlanarCircle,
            Form::TorusHelix { .. } => CurveKind::TorusHelix,
            Form::StraightSegment { .. } => CurveKind::StraightSegment,
            Form::Custom { .. } => CurveKind::Custom,
        }
    }

    /// Arc length L.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Whether the curve closes on the torus (γ(L) ≡ γ(0) mod ℤ³). The
    /// circle always closes; the helix closes when its total climb 2πc is an
    /// integer (true for the default climb); a segment closes exactly when
    /// its displacement is a nonzero integer vector (e.g. a unit axis
    /// segment), since torus points are identified mod ℤ³.
    pub fn is_closed(&self) -> bool {
        match &self.form {
            Form::PlanarCircle { .. } => true,
            Form::TorusHelix { climb, .. } => {
                let total = 2.0 * std::f64::consts::PI * climb;
                (total - total.round()).abs() < 1e-9
            }
            Form::StraightSegment { dir, .. } => {
                let disp = self.length * dir;
                disp.iter().all(|c| (c - c.round()).abs() < 1e-9)
                    && disp.iter().any(|c| c.round() != 0.0)
            }
            Form::Custom { closed, .. } => *closed,
        }
    }

    /// Exact minimum curvature where closed forms exist; for custom curves a
    /// sampled lower estimate over `samples` grid points.
    pub fn min_curvature(&self, samples: usize) -> f64 {
        match &self.form {
            Form::PlanarCircle { radius, .. } => 1.0 / radius,
            Form::TorusHelix { radius, w, .. } => radius / (w * w),
            Form::StraightSegment { .. } => 0.0,
            Form::Custom { .. } => (0..samples.max(2))
                .map(|i| {
                    let t = self.length * i as f64 / (samples.max(2) - 1) as f64;
                    self.jet(t).acceleration.norm()
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// The full derivative jet at t.
    pub fn jet(&self, t: f64) -> Jet {
        match &self.form {
            Form::PlanarCircle { radius, offset } => {
                let (s, c) = (t / radius).sin_cos();
                let r = *radius;
                Jet {
                    position: Vec3::new(0.5 + r * c, 0.5 + r * s, *offset),
                    velocity: Vec3::new(-s, c, 0.0),
                    acceleration: Vec3::new(-c / r, -s / r, 0.0),
                    jerk: Vec3::new(s / (r * r), -c / (r * r), 0.0),
                }
            }
            Form::TorusHelix { radius, climb, w } => {
                let (s, c) = (t / w).sin_cos();
                let (r, a) = (*radius, *climb);
                Jet {
                    position: Vec3::new(0.5 + r * c, 0.5 + r * s, a * t / w),
                    velocity: Vec3::new(-r / w * s, r / w * c, a / w),
                    acceleration: Vec3::new(-r / (w * w) * c, -r / (w * w) * s, 0.0),
                    jerk: Vec3::new(
                        r / (w * w * w) * s,
                        -r / (w * w * w) * c,
                        0.0,
                    ),
                }
            }
            Form::StraightSegment { start, dir } => Jet {
                position: start + t * dir,
                velocity: *dir,
                acceleration: Vec3::zeros(),
                jerk: Vec3::zeros(),
            },
            Form::Custom { jets, .. } => jets(t),
        }
    }

    /// γ(t).
    pub fn position(&self, t: f64) -> Vec3 {
        self.jet(t).position
    }

    /// γ′(t).
    pub fn velocity(&self, t: f64) -> Vec3 {
        self.jet(t).velocity
    }

    /// Frenet-Serret data at t. Errors where curvature vanishes (the normal
    /// is undefined), e.g. everywhere on a straight segment.
    pub fn frenet(&self, t: f64) -> Result<FrenetData, CurveError> {
        let jet = self.jet(t);
        let kappa = jet.acceleration.norm();
        if kappa <= KAPPA_FLOOR {
            return Err(CurveError::FrenetUndefined { t, kappa });
        }
        let tangent = jet.velocity;
        let normal = jet.acceleration / kappa;
        let binormal = tangent.cross(&normal);
        let tau = jet.jerk.dot(&binormal) / kappa;
        Ok(FrenetData {
            tangent,
            normal,
            binormal,
            kappa,
            tau,
        })
    }

    /// Max over an equispaced grid (including both endpoints) of ||γ′| − 1|.
    pub fn validate_unit_speed(&self, samples: usize) -> f64 {
        assert!(samples >= 2, "need at least two samples");
        (0..samples)
            .map(|i| {
                let t = self.length * i as f64 / (samples - 1) as f64;
                (self.jet(t).velocity.norm() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}
