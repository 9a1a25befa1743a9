//! Half-spaces with inward unit normals and the boundary-distance functional.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::point::{dot, norm, Point};

/// Tolerance on the unit-normal invariant.
pub const UNIT_NORMAL_TOL: f64 = 1e-12;

/// An open half-space `{ u : normal . u > offset }` with `|normal| = 1`.
///
/// `signed_dist(x) = normal . x - offset` is the distance of an interior
/// point to the boundary hyperplane, negative outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    normal: Vec<f64>,
    offset: f64,
}

impl HalfSpace {
    /// Builds a half-space from any nonzero inward normal; the normal is
    /// normalized so the unit invariant holds exactly.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if normal.is_empty() {
            return Err(Error::InvalidParameter("half-space normal must be non-empty".into()));
        }
        if normal.iter().any(|c| !c.is_finite()) || !offset.is_finite() {
            return Err(Error::InvalidParameter("half-space parameters must be finite".into()));
        }
        let len = norm(&normal);
        if len < UNIT_NORMAL_TOL {
            return Err(Error::InvalidParameter("half-space normal must be nonzero".into()));
        }
        let normal: Vec<f64> = normal.iter().map(|c| c / len).collect();
        Ok(HalfSpace { normal, offset: offset / len })
    }

    /// Half-space through `w` with inward normal `normal`.
    pub fn through(normal: Vec<f64>, w: &Point) -> Result<Self> {
        let mut h = HalfSpace::new(normal, 0.0)?;
        if h.normal.len() != w.dim() {
            return Err(Error::DimensionMismatch { expected: h.normal.len(), got: w.dim() });
        }
        h.offset = dot(&h.normal, w.coords());
        Ok(h)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    #[inline]
    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    #[inline]
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// The functional `delta_H(x) = normal . x - offset`; positive iff interior.
    #[inline]
    pub fn signed_dist(&self, x: &Point) -> f64 {
        self.signed_dist_slice(x.coords())
    }

    #[inline]
    pub(crate) fn signed_dist_slice(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    #[inline]
    pub fn contains(&self, x: &Point) -> bool {
        self.signed_dist(x) > 0.0
    }

    /// Mirror image of `y` across the boundary hyperplane.
    pub fn reflect(&self, y: &Point) -> Point {
        let d = self.signed_dist(y);
        Point::from_vec(
            y.coords()
                .iter()
                .zip(&self.normal)
                .map(|(c, n)| c - 2.0 * d * n)
                .collect(),
        )
    }

    /// Orthogonal projection of `x` onto the boundary hyperplane.
    pub fn project(&self, x: &Point) -> Point {
        let d = self.signed_dist(x);
        Point::from_vec(
            x.coords()
                .iter()
                .zip(&self.normal)
                .map(|(c, n)| c - d * n)
                .collect(),
        )
    }
}

/// Angle between two half-spaces measured inside `H1 ∩ H2`: `pi` minus the
/// angle between the inward normals. Identical half-spaces give `pi`, a slab
/// (opposite normals) gives `0`, perpendicular normals give `pi/2`.
pub fn angle_between(h1: &HalfSpace, h2: &HalfSpace) -> Result<f64> {
    if h1.dim() != h2.dim() {
        return Err(Error::DimensionMismatch { expected: h1.dim(), got: h2.dim() });
    }
    let c = dot(&h1.normal, &h2.normal).clamp(-1.0, 1.0);
    Ok(std::f64::consts::PI - c.acos())
}
