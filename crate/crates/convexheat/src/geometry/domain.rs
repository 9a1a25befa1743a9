//! The catalog of convex domains and their construction-time metadata.
//!
//! Every domain is analytically defined, so boundary distances and tangent
//! half-spaces are exact (or iteratively converged far below test
//! tolerances). Handles are immutable after construction and all operations
//! are pure, so they can be shared freely across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::halfspace::HalfSpace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DomainKind {
    /// Axis-aligned open box; an interval when `n = 1`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    HalfSpace(HalfSpace),
    /// Intersection of two half-spaces.
    Wedge { h1: HalfSpace, h2: HalfSpace },
    /// Cylinder of radius `radius` over `(0, length)` with a hemisphere
    /// glued at the `x1 = 0` base and a flat disc at `x1 = length`.
    HalfCapsule { radius: f64, length: f64, dim: usize },
    /// `{ x : x_n > a * |(x_1..x_{n-1})|^p }`.
    Power { a: f64, p: f64, dim: usize },
    /// The square `(-1,1)^2` with unit semicircles on its left and right sides.
    Stadium,
    /// `{ (x, y) : x^2/a^2 + y^2/b^2 < 1 }`.
    Ellipse { a: f64, b: f64 },
}

/// An immutable convex-domain handle: shape parameters plus the metadata the
/// bound evaluators consume.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Domain {
    kind: DomainKind,
    dim: usize,
    /// Radius of the interior tangent-ball condition; `0` when the boundary
    /// has corners, `inf` for a half-space.
    inner_ball_radius: f64,
    strictly_convex: bool,
    bounded: bool,
}

impl Domain {
    pub fn new(kind: DomainKind) -> Result<Self> {
        match &kind {
            DomainKind::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::InvalidParameter("box needs matching non-empty lo/hi".into()));
                }
                if lo.iter().zip(hi).any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
                    return Err(Error::InvalidParameter("box needs lo < hi per coordinate".into()));
                }
                let dim = lo.len();
                let min_side = lo.iter().zip(hi).map(|(l, h)| h - l).fold(f64::INFINITY, f64::min);
                Ok(Domain {
                    kind,
                    dim,
                    // boxes in n >= 2 have corners, so no inner tangent ball
                    inner_ball_radius: if dim == 1 { min_side / 2.0 } else { 0.0 },
                    strictly_convex: dim == 1,
                    bounded: true,
                })
            }
            DomainKind::Ball { center, radius } => {
                if center.is_empty() || !radius.is_finite() || *radius <= 0.0 {
                    return Err(Error::InvalidParameter("ball needs a center and radius > 0".into()));
                }
                Ok(Domain {
                    dim: center.len(),
                    inner_ball_radius: *radius,
                    strictly_convex: true,
                    bounded: true,
                    kind,
                })
            }
            DomainKind::HalfSpace(h) => Ok(Domain {
                dim: h.dim(),
                inner_ball_radius: f64::INFINITY,
                strictly_convex: false,
                bounded: false,
                kind,
            }),
            DomainKind::Wedge { h1, h2 } => {
                if h1.dim() != h2.dim() {
                    return Err(Error::DimensionMismatch { expected: h1.dim(), got: h2.dim() });
                }
                if h1.dim() < 2 {
                    return Err(Error::InvalidParameter("wedge needs dimension >= 2".into()));
                }
                Ok(Domain {
                    dim: h1.dim(),
                    inner_ball_radius: 0.0,
                    strictly_convex: false,
                    bounded: false,
                    kind,
                })
            }
            DomainKind::HalfCapsule { radius, length, dim } => {
                if !(radius.is_finite() && length.is_finite()) || *radius <= 0.0 {
                    return Err(Error::InvalidParameter("half-capsule needs radius > 0".into()));
                }
                if length < radius {
                    return Err(Error::InvalidParameter("half-capsule needs length >= radius".into()));
                }
                if *dim < 2 {
                    return Err(Error::InvalidParameter("half-capsule needs dimension >= 2".into()));
                }
                Ok(Domain {
                    dim: *dim,
                    // hemisphere radius; the flat-end rim is a corner and is
                    // excluded from tangent-ball sampling
                    inner_ball_radius: *radius,
                    strictly_convex: false,
                    bounded: true,
                    kind,
                })
            }
            DomainKind::Power { a, p, dim } => {
                if !(a.is_finite() && p.is_finite()) || *a <= 0.0 {
                    return Err(Error::InvalidParameter("power domain needs a > 0".into()));
                }
                if *p < 2.0 {
                    return Err(Error::InvalidParameter("power domain needs p >= 2".into()));
                }
                if *dim < 2 {
                    return Err(Error::InvalidParameter("power domain needs dimension >= 2".into()));
                }
                let r = power_inner_ball_radius(*a, *p, *dim);
                Ok(Domain {
                    dim: *dim,
                    inner_ball_radius: r,
                    strictly_convex: true,
                    bounded: false,
                    kind,
                })
            }
            DomainKind::Stadium => Ok(Domain {
                kind,
                dim: 2,
                inner_ball_radius: 1.0,
                strictly_convex: false,
                bounded: true,
            }),
            DomainKind::Ellipse { a, b } => {
                if !(a.is_finite() && b.is_finite()) || *a <= 0.0 || *b <= 0.0 {
                    return Err(Error::InvalidParameter("ellipse needs semi-axes > 0".into()));
                }
                let (lo, hi) = (a.min(*b), a.max(*b));
                Ok(Domain {
                    kind,
                    dim: 2,
                    inner_ball_radius: lo * lo / hi,
                    strictly_convex: true,
                    bounded: true,
                })
            }
        }
    }

    // -- catalog shorthands ------------------------------------------------

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Domain::new(DomainKind::Box { lo: vec![a], hi: vec![b] })
    }

    pub fn box_domain(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Domain::new(DomainKind::Box { lo, hi })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Domain::new(DomainKind::Ball { center, radius })
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Domain::ball(vec![0.0; dim.max(1)], 1.0)
    }

    pub fn halfspace(h: HalfSpace) -> Result<Self> {
        Domain::new(DomainKind::HalfSpace(h))
    }

    pub fn wedge(h1: HalfSpace, h2: HalfSpace) -> Result<Self> {
        Domain::new(DomainKind::Wedge { h1, h2 })
    }

    pub fn half_capsule(radius: f64, length: f64, dim: usize) -> Result<Self> {
        Domain::new(DomainKind::HalfCapsule { radius, length, dim })
    }

    pub fn power(a: f64, p: f64, dim: usize) -> Result<Self> {
        Domain::new(DomainKind::Power { a, p, dim })
    }

    pub fn stadium() -> Self {
        Domain::new(DomainKind::Stadium).expect("stadium is parameter-free")
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Domain::new(DomainKind::Ellipse { a, b })
    }

    // -- metadata ------------------------------------------------------------

    #[inline]
    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn inner_ball_radius(&self) -> f64 {
        self.inner_ball_radius
    }

    #[inline]
    pub fn strictly_convex(&self) -> bool {
        self.strictly_convex
    }

    #[inline]
    pub fn bounded(&self) -> bool {
        self.bounded
    }

    /// Compact identifier used in reports.
    pub fn id_string(&self) -> String {
        match &self.kind {
            DomainKind::Box { lo, hi } => format!("box{:?}x{:?}", lo, hi),
            DomainKind::Ball { center, radius } => format!("ball(c={:?},r={})", center, radius),
            DomainKind::HalfSpace(h) => format!("halfspace(n={:?},b={})", h.normal(), h.offset()),
            DomainKind::Wedge { h1, h2 } => format!(
                "wedge(n1={:?},b1={},n2={:?},b2={})",
                h1.normal(),
                h1.offset(),
                h2.normal(),
                h2.offset()
            ),
            DomainKind::HalfCapsule { radius, length, dim } => {
                format!("half_capsule(R={},L={},n={})", radius, length, dim)
            }
            DomainKind::Power { a, p, dim } => format!("power(a={},p={},n={})", a, p, dim),
            DomainKind::Stadium => "stadium".into(),
            DomainKind::Ellipse { a, b } => format!("ellipse(a={},b={})", a, b),
        }
    }

    /// The image of the domain under `x -> lambda x`, when the catalog is
    /// closed under that scaling. The stadium is a fixed shape, so it is not.
    pub fn scaled(&self, lambda: f64) -> Option<Domain> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return None;
        }
        let kind = match &self.kind {
            DomainKind::Box { lo, hi } => DomainKind::Box {
                lo: lo.iter().map(|c| c * lambda).collect(),
                hi: hi.iter().map(|c| c * lambda).collect(),
            },
            DomainKind::Ball { center, radius } => DomainKind::Ball {
                center: center.iter().map(|c| c * lambda).collect(),
                radius: radius * lambda,
            },
            DomainKind::HalfSpace(h) => DomainKind::HalfSpace(
                HalfSpace::new(h.normal().to_vec(), h.offset() * lambda).ok()?,
            ),
            DomainKind::Wedge { h1, h2 } => DomainKind::Wedge {
                h1: HalfSpace::new(h1.normal().to_vec(), h1.offset() * lambda).ok()?,
                h2: HalfSpace::new(h2.normal().to_vec(), h2.offset() * lambda).ok()?,
            },
            DomainKind::HalfCapsule { radius, length, dim } => DomainKind::HalfCapsule {
                radius: radius * lambda,
                length: length * lambda,
                dim: *dim,
            },
            // lambda*{x_n > a|u|^p} = {x_n > a lambda^{1-p} |u|^p}
            DomainKind::Power { a, p, dim } => DomainKind::Power {
                a: a * lambda.powf(1.0 - p),
                p: *p,
                dim: *dim,
            },
            DomainKind::Stadium => return None,
            DomainKind::Ellipse { a, b } => DomainKind::Ellipse { a: a * lambda, b: b * lambda },
        };
        Domain::new(kind).ok()
    }
}

/// JSON surface for domain construction: `{"kind": "...", "params": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DomainSpec {
    Interval { a: f64, b: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Halfspace { normal: Vec<f64>, offset: f64 },
    Wedge { normal1: Vec<f64>, offset1: f64, normal2: Vec<f64>, offset2: f64 },
    HalfCapsule { radius: f64, length: f64, dim: usize },
    #[serde(alias = "power")]
    PowerDomain { a: f64, p: f64, dim: usize },
    Stadium {},
    Ellipse { a: f64, b: f64 },
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        match self.clone() {
            DomainSpec::Interval { a, b } => Domain::interval(a, b),
            DomainSpec::Box { lo, hi } => Domain::box_domain(lo, hi),
            DomainSpec::Ball { center, radius } => Domain::ball(center, radius),
            DomainSpec::Halfspace { normal, offset } => {
                Domain::halfspace(HalfSpace::new(normal, offset)?)
            }
            DomainSpec::Wedge { normal1, offset1, normal2, offset2 } => Domain::wedge(
                HalfSpace::new(normal1, offset1)?,
                HalfSpace::new(normal2, offset2)?,
            ),
            DomainSpec::HalfCapsule { radius, length, dim } => {
                Domain::half_capsule(radius, length, dim)
            }
            DomainSpec::PowerDomain { a, p, dim } => Domain::power(a, p, dim),
            DomainSpec::Stadium {} => Ok(Domain::stadium()),
            DomainSpec::Ellipse { a, b } => Domain::ellipse(a, b),
        }
    }

    pub fn from_json(json: &str) -> Result<DomainSpec> {
        Ok(serde_json::from_str(json)?)
    }
}

/// Parses a domain from JSON text.
pub fn make_domain(json: &str) -> Result<Domain> {
    DomainSpec::from_json(json)?.build()
}

/// Inner tangent-ball radius of the power domain from the maximal principal
/// curvature of the profile `y = a s^p` (meridian and, for n >= 3, parallel).
fn power_inner_ball_radius(a: f64, p: f64, dim: usize) -> f64 {
    let meridian = |s: f64| {
        let fp = a * p * s.powf(p - 1.0);
        a * p * (p - 1.0) * s.powf(p - 2.0) / (1.0 + fp * fp).powf(1.5)
    };
    let parallel = |s: f64| {
        let fp = a * p * s.powf(p - 1.0);
        fp / (s * (1.0 + fp * fp).sqrt())
    };
    let mut kappa_max: f64 = if p == 2.0 { 2.0 * a } else { 0.0 };
    // log-spaced scan; the curvature of the profile vanishes at 0 (p > 2)
    // and at infinity, so the max is interior and a scan is enough
    let mut s = 1e-8;
    while s < 1e8 {
        kappa_max = kappa_max.max(meridian(s));
        if dim >= 3 {
            kappa_max = kappa_max.max(parallel(s));
        }
        s *= 1.05;
    }
    if kappa_max > 0.0 {
        1.0 / kappa_max
    } else {
        f64::INFINITY
    }
}
