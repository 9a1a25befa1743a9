//! Boundary-distance operations on the domain catalog: membership, `delta_D`,
//! boundary projection, supporting half-spaces, boundary charts and sampling.
//!
//! The per-kind distance formulas are exact closed forms except for the power
//! domain and the ellipse, whose projections are solved iteratively to
//! `PROJ_REL_TOL` relative accuracy. Non-unique nearest boundary points are
//! resolved to the lexicographically smallest projection.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::domain::{Domain, DomainKind};
use crate::geometry::halfspace::HalfSpace;
use crate::geometry::point::{dist, dot, norm, normalize, Point};

/// Absolute slack when deciding whether a point sits on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Relative convergence target of the iterative projections.
pub const PROJ_REL_TOL: f64 = 1e-10;
const MAX_PROJ_ITERS: usize = 100;
/// Catalog dimension cap; sampling and quadrature budgets assume small `n`.
pub const MAX_DIM: usize = 8;

/// A supporting half-space stored inline so Monte Carlo sub-steps stay
/// allocation-free.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SupportPlane {
    normal: [f64; MAX_DIM],
    offset: f64,
    dim: usize,
}

impl SupportPlane {
    fn through(normal: [f64; MAX_DIM], dim: usize, w: &[f64]) -> Self {
        let offset = dot(&normal[..dim], w);
        SupportPlane { normal, offset, dim }
    }

    #[inline]
    pub fn signed_dist(&self, x: &[f64]) -> f64 {
        dot(&self.normal[..self.dim], x) - self.offset
    }

    pub fn to_halfspace(&self) -> HalfSpace {
        HalfSpace::new(self.normal[..self.dim].to_vec(), self.offset)
            .expect("support planes carry unit normals")
    }
}

impl Domain {
    fn check_point(&self, x: &Point) -> Result<()> {
        x.check_dim(self.dim())
    }

    /// True iff `x` lies in the open set `D`.
    pub fn contains(&self, x: &Point) -> Result<bool> {
        self.check_point(x)?;
        Ok(self.contains_slice(x.coords()))
    }

    pub(crate) fn contains_slice(&self, x: &[f64]) -> bool {
        match self.kind() {
            DomainKind::Box { lo, hi } => {
                x.iter().zip(lo.iter().zip(hi)).all(|(c, (l, h))| *l < *c && *c < *h)
            }
            DomainKind::Ball { center, radius } => dist(x, center) < *radius,
            DomainKind::HalfSpace(h) => h.signed_dist_slice(x) > 0.0,
            DomainKind::Wedge { h1, h2 } => {
                h1.signed_dist_slice(x) > 0.0 && h2.signed_dist_slice(x) > 0.0
            }
            DomainKind::HalfCapsule { radius, length, .. } => {
                if x[0] <= 0.0 {
                    norm(x) < *radius
                } else {
                    x[0] < *length && norm(&x[1..]) < *radius
                }
            }
            DomainKind::Power { a, p, .. } => {
                let u = &x[..x.len() - 1];
                x[x.len() - 1] > a * norm(u).powf(*p)
            }
            DomainKind::Stadium => stadium_core_dist(x) < 1.0,
            DomainKind::Ellipse { a, b } => {
                (x[0] / a).powi(2) + (x[1] / b).powi(2) < 1.0
            }
        }
    }

    /// `delta_D(x)`: Euclidean distance of `x` to the boundary.
    ///
    /// Errors when `x` lies outside the closure (beyond [`BOUNDARY_TOL`]).
    pub fn dist_to_boundary(&self, x: &Point) -> Result<f64> {
        self.check_point(x)?;
        let d = self.signed_dist_slice(x.coords());
        if d < -BOUNDARY_TOL {
            return Err(Error::OutsideDomain { excess: -d });
        }
        Ok(d.max(0.0))
    }

    /// Signed boundary distance: `delta_D(x)` inside, negative outside.
    /// Exact inside; outside it is a local linearization adequate near the
    /// boundary (only the sign and near-boundary magnitude are used).
    pub(crate) fn signed_dist_slice(&self, x: &[f64]) -> f64 {
        match self.kind() {
            DomainKind::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(c, (l, h))| (c - l).min(h - c))
                .fold(f64::INFINITY, f64::min),
            DomainKind::Ball { center, radius } => radius - dist(x, center),
            DomainKind::HalfSpace(h) => h.signed_dist_slice(x),
            DomainKind::Wedge { h1, h2 } => {
                h1.signed_dist_slice(x).min(h2.signed_dist_slice(x))
            }
            DomainKind::HalfCapsule { radius, length, .. } => {
                if x[0] <= 0.0 {
                    radius - norm(x)
                } else {
                    (radius - norm(&x[1..])).min(length - x[0])
                }
            }
            DomainKind::Power { a, p, .. } => {
                let n = x.len();
                let rho = norm(&x[..n - 1]);
                let y = x[n - 1];
                let gap = y - a * rho.powf(*p);
                if gap >= 0.0 {
                    power_project_profile(*a, *p, rho, y).1
                } else {
                    // local linearization of the vertical gap
                    let fp = a * p * rho.powf(p - 1.0);
                    gap / (1.0 + fp * fp).sqrt()
                }
            }
            DomainKind::Stadium => 1.0 - stadium_core_dist(x),
            DomainKind::Ellipse { a, b } => {
                let g = (x[0] / a).powi(2) + (x[1] / b).powi(2) - 1.0;
                if g <= 0.0 {
                    ellipse_project(*a, *b, x[0], x[1]).1
                } else {
                    let grad = 2.0 * ((x[0] / (a * a)).powi(2) + (x[1] / (b * b)).powi(2)).sqrt();
                    -g / grad.max(1e-300)
                }
            }
        }
    }

    /// Nearest boundary point and its distance. Ties are broken toward the
    /// lexicographically smallest projection.
    pub fn project_to_boundary(&self, x: &Point) -> Result<(Point, f64)> {
        self.check_point(x)?;
        let d = self.signed_dist_slice(x.coords());
        if d < -BOUNDARY_TOL {
            return Err(Error::OutsideDomain { excess: -d });
        }
        let (z, delta) = self.project_slice(x.coords());
        Ok((Point::from_vec(z), delta.max(0.0)))
    }

    pub(crate) fn project_slice(&self, x: &[f64]) -> (Vec<f64>, f64) {
        match self.kind() {
            DomainKind::Box { lo, hi } => {
                let mut best: Option<(f64, Vec<f64>)> = None;
                for i in 0..x.len() {
                    for (side, val) in [(0, lo[i]), (1, hi[i])] {
                        let _ = side;
                        let d = if val == lo[i] { x[i] - lo[i] } else { hi[i] - x[i] };
                        let mut z = x.to_vec();
                        z[i] = val;
                        match &mut best {
                            None => best = Some((d, z)),
                            Some((bd, bz)) => {
                                if d < *bd - 0.0 || (d == *bd && lex_less(&z, bz)) {
                                    *bd = d;
                                    *bz = z;
                                }
                            }
                        }
                    }
                }
                let (d, z) = best.expect("box has faces");
                (z, d)
            }
            DomainKind::Ball { center, radius } => {
                let r = dist(x, center);
                if r == 0.0 {
                    // whole sphere ties; smallest first coordinate
                    let mut z = center.clone();
                    z[0] -= radius;
                    (z, *radius)
                } else {
                    let z = x
                        .iter()
                        .zip(center)
                        .map(|(c, cc)| cc + (c - cc) * radius / r)
                        .collect();
                    (z, radius - r)
                }
            }
            DomainKind::HalfSpace(h) => {
                let d = h.signed_dist_slice(x);
                let z = x.iter().zip(h.normal()).map(|(c, n)| c - d * n).collect();
                (z, d)
            }
            DomainKind::Wedge { h1, h2 } => {
                let d1 = h1.signed_dist_slice(x);
                let d2 = h2.signed_dist_slice(x);
                let proj = |h: &HalfSpace, d: f64| -> Vec<f64> {
                    x.iter().zip(h.normal()).map(|(c, n)| c - d * n).collect()
                };
                if d1 < d2 {
                    (proj(h1, d1), d1)
                } else if d2 < d1 {
                    (proj(h2, d2), d2)
                } else {
                    let z1 = proj(h1, d1);
                    let z2 = proj(h2, d2);
                    if lex_less(&z1, &z2) {
                        (z1, d1)
                    } else {
                        (z2, d2)
                    }
                }
            }
            DomainKind::HalfCapsule { radius, length, .. } => {
                capsule_project(x, *radius, *length)
            }
            DomainKind::Power { a, p, .. } => {
                let n = x.len();
                let rho = norm(&x[..n - 1]);
                let y = x[n - 1];
                let (s, delta) = power_project_profile(*a, *p, rho, y);
                let mut z = vec![0.0; n];
                if rho > 0.0 {
                    for i in 0..n - 1 {
                        z[i] = x[i] * s / rho;
                    }
                } else if s > 0.0 {
                    // axis point projecting to a ring; smallest first coordinate
                    z[0] = -s;
                }
                z[n - 1] = a * s.powf(*p);
                (z, delta)
            }
            DomainKind::Stadium => {
                let q1 = x[0].clamp(-1.0, 1.0);
                let dx = x[0] - q1;
                let d = (dx * dx + x[1] * x[1]).sqrt();
                if d > 0.0 {
                    (vec![q1 + dx / d, x[1] / d], 1.0 - d)
                } else if x[0] > -1.0 && x[0] < 1.0 {
                    (vec![x[0], -1.0], 1.0)
                } else if x[0] <= -1.0 {
                    (vec![-2.0, 0.0], 1.0)
                } else {
                    (vec![1.0, -1.0], 1.0)
                }
            }
            DomainKind::Ellipse { a, b } => {
                let (q, delta) = ellipse_project(*a, *b, x[0], x[1]);
                (q.to_vec(), delta)
            }
        }
    }

    /// The supporting half-space `H` with `D ⊆ H`, tangent at the boundary
    /// point nearest to `x` (or at `x` itself when `x` is on the boundary),
    /// so `delta_H(x) = delta_D(x)` for interior `x`.
    ///
    /// Errors where the tangent is not unique: wedge apex, box edges and
    /// corners, the half-capsule rim.
    pub fn supporting_halfspace(&self, x: &Point) -> Result<HalfSpace> {
        self.check_point(x)?;
        let d = self.signed_dist_slice(x.coords());
        if d < -BOUNDARY_TOL {
            return Err(Error::OutsideDomain { excess: -d });
        }
        Ok(self.support_plane(x.coords())?.to_halfspace())
    }

    /// Tangent plane at the projection of `x`; errors at corner inputs.
    pub(crate) fn support_plane(&self, x: &[f64]) -> Result<SupportPlane> {
        let n = self.dim();
        let mut nv = [0.0_f64; MAX_DIM];
        match self.kind() {
            DomainKind::Box { lo, hi } => {
                let d = self.signed_dist_slice(x);
                if d <= BOUNDARY_TOL {
                    // boundary input: demand a unique active face
                    let mut active = None;
                    for i in 0..n {
                        for (sgn, val) in [(1.0, lo[i]), (-1.0, hi[i])] {
                            if (x[i] - val).abs() <= BOUNDARY_TOL {
                                if active.is_some() {
                                    return Err(Error::UndefinedTangent(
                                        "box edge or corner".into(),
                                    ));
                                }
                                active = Some((i, sgn, val));
                            }
                        }
                    }
                    let (i, sgn, val) =
                        active.ok_or_else(|| Error::UndefinedTangent("box face lookup".into()))?;
                    nv[i] = sgn;
                    return Ok(SupportPlane { normal: nv, offset: sgn * val, dim: n });
                }
                let (z, _) = self.project_slice(x);
                // identify the face of the projection
                for i in 0..n {
                    if (z[i] - lo[i]).abs() <= BOUNDARY_TOL * (1.0 + lo[i].abs()) {
                        nv[i] = 1.0;
                        return Ok(SupportPlane { normal: nv, offset: lo[i], dim: n });
                    }
                    if (z[i] - hi[i]).abs() <= BOUNDARY_TOL * (1.0 + hi[i].abs()) {
                        nv[i] = -1.0;
                        return Ok(SupportPlane { normal: nv, offset: -hi[i], dim: n });
                    }
                }
                Err(Error::UndefinedTangent("box face lookup".into()))
            }
            DomainKind::Ball { center, radius } => {
                let r = dist(x, center);
                if r == 0.0 {
                    nv[0] = 1.0; // tangent at the tie-break projection (-R, 0, ..)
                } else {
                    for i in 0..n {
                        nv[i] = (center[i] - x[i]) / r;
                    }
                }
                let w: Vec<f64> = (0..n).map(|i| center[i] - radius * nv[i]).collect();
                Ok(SupportPlane::through(nv, n, &w))
            }
            DomainKind::HalfSpace(h) => {
                nv[..n].copy_from_slice(h.normal());
                Ok(SupportPlane { normal: nv, offset: h.offset(), dim: n })
            }
            DomainKind::Wedge { h1, h2 } => {
                let d1 = h1.signed_dist_slice(x);
                let d2 = h2.signed_dist_slice(x);
                let scale = 1.0 + norm(x);
                if d1.abs() <= BOUNDARY_TOL * scale && d2.abs() <= BOUNDARY_TOL * scale {
                    return Err(Error::UndefinedTangent("wedge apex".into()));
                }
                let (hn, dn, other) =
                    if d1 <= d2 { (h1, d1, h2) } else { (h2, d2, h1) };
                // interior points whose nearest boundary point lies on the
                // edge have no unique tangent either
                let foot_other: f64 = other.signed_dist_slice(x)
                    - dn * dot(hn.normal(), other.normal());
                if foot_other <= BOUNDARY_TOL * scale {
                    return Err(Error::UndefinedTangent("wedge apex".into()));
                }
                nv[..n].copy_from_slice(hn.normal());
                Ok(SupportPlane { normal: nv, offset: hn.offset(), dim: n })
            }
            DomainKind::HalfCapsule { radius, length, .. } => {
                let (z, _) = self.project_slice(x);
                let on_disc = (z[0] - length).abs() <= BOUNDARY_TOL;
                let on_side = z[0] > BOUNDARY_TOL
                    && (norm(&z[1..]) - radius).abs() <= BOUNDARY_TOL * (1.0 + radius);
                if on_disc && on_side {
                    return Err(Error::UndefinedTangent("half-capsule rim".into()));
                }
                if on_disc {
                    nv[0] = -1.0;
                    return Ok(SupportPlane { normal: nv, offset: -length, dim: n });
                }
                if z[0] <= BOUNDARY_TOL {
                    // hemispherical cap (includes the equator, where the cap
                    // and cylinder normals agree)
                    let r = norm(&z);
                    for i in 0..n {
                        nv[i] = -z[i] / r;
                    }
                } else {
                    let rt = norm(&z[1..]);
                    for i in 1..n {
                        nv[i] = -z[i] / rt;
                    }
                }
                Ok(SupportPlane::through(nv, n, &z))
            }
            DomainKind::Power { a, p, .. } => {
                let (z, _) = self.project_slice(x);
                let s = norm(&z[..n - 1]);
                let fp = a * p * s.powf(p - 1.0);
                let scale = (1.0 + fp * fp).sqrt();
                if s > 0.0 {
                    for i in 0..n - 1 {
                        nv[i] = -fp * z[i] / s / scale;
                    }
                }
                nv[n - 1] = 1.0 / scale;
                Ok(SupportPlane::through(nv, n, &z))
            }
            DomainKind::Stadium => {
                let (z, _) = self.project_slice(x);
                // flat sides for |z1| < 1, arcs otherwise; tangent is
                // continuous across the junctions
                if z[0].abs() < 1.0 {
                    nv[1] = -z[1].signum();
                    Ok(SupportPlane { normal: nv, offset: -1.0, dim: 2 })
                } else {
                    let cx = z[0].signum();
                    let dx = z[0] - cx;
                    let r = (dx * dx + z[1] * z[1]).sqrt();
                    nv[0] = -dx / r;
                    nv[1] = -z[1] / r;
                    Ok(SupportPlane::through(nv, 2, &z))
                }
            }
            DomainKind::Ellipse { a, b } => {
                let (z, _) = self.project_slice(x);
                nv[0] = -z[0] / (a * a);
                nv[1] = -z[1] / (b * b);
                let len = norm(&nv[..2]);
                nv[0] /= len;
                nv[1] /= len;
                Ok(SupportPlane::through(nv, 2, &z))
            }
        }
    }

    /// Supporting half-space for Monte Carlo sub-steps: identical to
    /// [`Self::support_plane`] except that corner projections (wedge edge,
    /// capsule rim, box edges) fall back to the nearer smooth piece instead
    /// of erroring, so the killing weight stays defined on a null set.
    pub(crate) fn support_plane_mc(&self, x: &[f64]) -> SupportPlane {
        let n = self.dim();
        match self.kind() {
            DomainKind::Wedge { h1, h2 } => {
                let mut nv = [0.0_f64; MAX_DIM];
                let h = if h1.signed_dist_slice(x) <= h2.signed_dist_slice(x) { h1 } else { h2 };
                nv[..n].copy_from_slice(h.normal());
                SupportPlane { normal: nv, offset: h.offset(), dim: n }
            }
            DomainKind::Box { lo, hi } => {
                let mut nv = [0.0_f64; MAX_DIM];
                let mut best = f64::INFINITY;
                let mut plane = (0usize, 1.0, lo[0]);
                for i in 0..n {
                    if x[i] - lo[i] < best {
                        best = x[i] - lo[i];
                        plane = (i, 1.0, lo[i]);
                    }
                    if hi[i] - x[i] < best {
                        best = hi[i] - x[i];
                        plane = (i, -1.0, hi[i]);
                    }
                }
                nv[plane.0] = plane.1;
                SupportPlane { normal: nv, offset: plane.1 * plane.2, dim: n }
            }
            DomainKind::HalfCapsule { radius, length, .. } => {
                let mut nv = [0.0_f64; MAX_DIM];
                if x[0] <= 0.0 {
                    let r = norm(x);
                    if r == 0.0 {
                        nv[0] = 1.0;
                        return SupportPlane { normal: nv, offset: -radius, dim: n };
                    }
                    for i in 0..n {
                        nv[i] = -x[i] / r;
                    }
                    // through the radial projection: nv . (R x / r) = -R
                    return SupportPlane { normal: nv, offset: -radius, dim: n };
                }
                let rt = norm(&x[1..]);
                if length - x[0] < radius - rt {
                    nv[0] = -1.0;
                    SupportPlane { normal: nv, offset: -length, dim: n }
                } else if rt == 0.0 {
                    nv[1] = -1.0;
                    SupportPlane { normal: nv, offset: -radius, dim: n }
                } else {
                    for i in 1..n {
                        nv[i] = -x[i] / rt;
                    }
                    SupportPlane { normal: nv, offset: -radius, dim: n }
                }
            }
            DomainKind::Ball { center, radius } => {
                let mut nv = [0.0_f64; MAX_DIM];
                let r = dist(x, center);
                if r == 0.0 {
                    nv[0] = 1.0;
                } else {
                    for i in 0..n {
                        nv[i] = (center[i] - x[i]) / r;
                    }
                }
                let w: Vec<f64> = (0..n).map(|i| center[i] - radius * nv[i]).collect();
                SupportPlane::through(nv, n, &w)
            }
            DomainKind::Stadium => {
                let mut nv = [0.0_f64; MAX_DIM];
                let q1 = x[0].clamp(-1.0, 1.0);
                let dx = x[0] - q1;
                let d = (dx * dx + x[1] * x[1]).sqrt();
                if d == 0.0 {
                    nv[1] = -1.0;
                    return SupportPlane { normal: nv, offset: -1.0, dim: 2 };
                }
                nv[0] = -dx / d;
                nv[1] = -x[1] / d;
                // plane through the boundary point q + (x - q)/d
                let b = [q1 + dx / d, x[1] / d];
                SupportPlane::through(nv, 2, &b)
            }
            _ => self
                .support_plane(x)
                .expect("smooth kinds have a tangent at every interior projection"),
        }
    }

    /// A deterministic interior point used as the anchor of boundary charts
    /// and rejection sampling.
    pub fn interior_anchor(&self) -> Point {
        let v = match self.kind() {
            DomainKind::Box { lo, hi } => {
                lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect()
            }
            DomainKind::Ball { center, .. } => center.clone(),
            DomainKind::HalfSpace(h) => {
                h.normal().iter().map(|c| c * (h.offset() + 1.0)).collect()
            }
            DomainKind::Wedge { h1, h2 } => {
                // the point with delta_1 = delta_2 = 1
                let c = dot(h1.normal(), h2.normal());
                let det = 1.0 - c * c;
                let (b1, b2) = (h1.offset() + 1.0, h2.offset() + 1.0);
                let (alpha, beta) = if det.abs() < 1e-12 {
                    (b1, 0.0)
                } else {
                    ((b1 - c * b2) / det, (b2 - c * b1) / det)
                };
                h1.normal()
                    .iter()
                    .zip(h2.normal())
                    .map(|(n1, n2)| alpha * n1 + beta * n2)
                    .collect()
            }
            DomainKind::HalfCapsule { length, dim, .. } => {
                let mut v = vec![0.0; *dim];
                v[0] = 0.5 * length;
                v
            }
            DomainKind::Power { a, dim, .. } => {
                let mut v = vec![0.0; *dim];
                v[*dim - 1] = 1.0_f64.max(2.0 * a);
                v
            }
            DomainKind::Stadium => vec![0.0, 0.0],
            DomainKind::Ellipse { .. } => vec![0.0, 0.0],
        };
        Point::from_vec(v)
    }

    /// Dimension of the boundary chart used by derivative-free refinement,
    /// when the kind has one (half-spaces and wedges do not).
    pub fn chart_dim(&self) -> Option<usize> {
        match self.kind() {
            DomainKind::HalfSpace(_) | DomainKind::Wedge { .. } => None,
            DomainKind::Power { dim, .. } => Some(dim - 1),
            _ => Some(self.dim()),
        }
    }

    /// Maps chart parameters to a boundary point. For bounded kinds the chart
    /// is a ray direction from the interior anchor; for the power domain it
    /// is the graph coordinate itself.
    pub fn boundary_from_chart(&self, params: &[f64]) -> Option<Point> {
        if params.len() != self.chart_dim()? {
            return None;
        }
        match self.kind() {
            DomainKind::Ball { center, radius } => {
                let mut d = params.to_vec();
                if normalize(&mut d) < 1e-12 {
                    return None;
                }
                Some(Point::from_vec(
                    center.iter().zip(&d).map(|(c, u)| c + radius * u).collect(),
                ))
            }
            DomainKind::Ellipse { a, b } => {
                let mut d = params.to_vec();
                if normalize(&mut d) < 1e-12 {
                    return None;
                }
                Some(Point::from_vec(vec![a * d[0], b * d[1]]))
            }
            DomainKind::Power { a, p, dim } => {
                let mut z = params.to_vec();
                let rho = norm(&z);
                z.push(a * rho.powf(*p));
                debug_assert_eq!(z.len(), *dim);
                Some(Point::from_vec(z))
            }
            _ => {
                let mut d = params.to_vec();
                if normalize(&mut d) < 1e-12 {
                    return None;
                }
                let anchor = self.interior_anchor().into_vec();
                let s = self.ray_exit(&anchor, &d)?;
                Some(Point::from_vec(
                    anchor.iter().zip(&d).map(|(c, u)| c + s * u).collect(),
                ))
            }
        }
    }

    /// Draws a boundary point. `window` bounds the patch explored on
    /// unbounded kinds and is ignored on bounded ones.
    pub fn sample_boundary<R: Rng>(&self, rng: &mut R, window: f64) -> Point {
        match self.kind() {
            DomainKind::HalfSpace(h) => {
                let n = self.dim();
                let mut t: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let along = dot(&t, h.normal());
                for (c, nc) in t.iter_mut().zip(h.normal()) {
                    *c -= along * nc;
                }
                Point::from_vec(
                    h.normal()
                        .iter()
                        .zip(&t)
                        .map(|(nc, tc)| h.offset() * nc + window * tc)
                        .collect(),
                )
            }
            DomainKind::Wedge { h1, h2 } => loop {
                let (face, other) = if rng.gen::<bool>() { (h1, h2) } else { (h2, h1) };
                let n = self.dim();
                let mut t: Vec<f64> =
                    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let along = dot(&t, face.normal());
                for (c, nc) in t.iter_mut().zip(face.normal()) {
                    *c -= along * nc;
                }
                let p: Vec<f64> = face
                    .normal()
                    .iter()
                    .zip(&t)
                    .map(|(nc, tc)| face.offset() * nc + window * tc)
                    .collect();
                if other.signed_dist_slice(&p) >= 0.0 {
                    return Point::from_vec(p);
                }
            },
            DomainKind::Power { a, p, dim } => {
                let m = dim - 1;
                // mix of uniform and log-radial draws so both the apex
                // neighbourhood and the far boundary are covered
                let mut u: Vec<f64> =
                    (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let nrm = normalize(&mut u).max(1e-300);
                let _ = nrm;
                let r = if rng.gen::<bool>() {
                    window * rng.gen::<f64>().powf(1.0 / m as f64)
                } else {
                    window * (1e-4_f64).powf(rng.gen::<f64>())
                };
                let mut z: Vec<f64> = u.iter().map(|c| c * r).collect();
                z.push(a * r.powf(*p));
                Point::from_vec(z)
            }
            _ => loop {
                let n = self.dim();
                let d: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                if let Some(pt) = self.boundary_from_chart(&d) {
                    return pt;
                }
            },
        }
    }

    /// Draws an interior point by rejection inside [`Self::bounding_box`].
    pub fn sample_interior<R: Rng>(&self, rng: &mut R, window: f64) -> Point {
        let (lo, hi) = self.bounding_box(window);
        loop {
            let x: Vec<f64> = lo
                .iter()
                .zip(&hi)
                .map(|(l, h)| l + (h - l) * rng.gen::<f64>())
                .collect();
            if self.contains_slice(&x) {
                return Point::from_vec(x);
            }
        }
    }

    /// A box containing the domain (bounded kinds) or the `window`-sized
    /// patch around the anchor (unbounded kinds).
    pub fn bounding_box(&self, window: f64) -> (Vec<f64>, Vec<f64>) {
        match self.kind() {
            DomainKind::Box { lo, hi } => (lo.clone(), hi.clone()),
            DomainKind::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            DomainKind::HalfCapsule { radius, length, dim } => {
                let mut lo = vec![-radius; *dim];
                let mut hi = vec![*radius; *dim];
                lo[0] = -radius;
                hi[0] = *length;
                (lo, hi)
            }
            DomainKind::Stadium => (vec![-2.0, -1.0], vec![2.0, 1.0]),
            DomainKind::Ellipse { a, b } => (vec![-a, -b], vec![*a, *b]),
            DomainKind::Power { a, p, dim } => {
                let mut lo = vec![-window; *dim];
                let mut hi = vec![window; *dim];
                lo[*dim - 1] = 0.0;
                hi[*dim - 1] = a * window.powf(*p) + window;
                (lo, hi)
            }
            DomainKind::HalfSpace(_) | DomainKind::Wedge { .. } => {
                let anchor = self.interior_anchor().into_vec();
                (
                    anchor.iter().map(|c| c - window).collect(),
                    anchor.iter().map(|c| c + window).collect(),
                )
            }
        }
    }

    /// Distance along `dir` (unit) from the interior point `anchor` to the
    /// boundary, by doubling and bisection on membership. `None` when the ray
    /// never exits (unbounded kinds).
    pub(crate) fn ray_exit(&self, anchor: &[f64], dir: &[f64]) -> Option<f64> {
        debug_assert!(self.contains_slice(anchor));
        let mut probe = vec![0.0; anchor.len()];
        let eval = |s: f64, probe: &mut Vec<f64>| {
            for i in 0..anchor.len() {
                probe[i] = anchor[i] + s * dir[i];
            }
            self.contains_slice(probe)
        };
        let mut hi = 1.0;
        let mut lo = 0.0;
        while eval(hi, &mut probe) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e12 {
                return None;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if eval(mid, &mut probe) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

#[inline]
fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Distance of `x` to the stadium's core segment `[-1,1] x {0}`.
#[inline]
fn stadium_core_dist(x: &[f64]) -> f64 {
    let dx = x[0] - x[0].clamp(-1.0, 1.0);
    (dx * dx + x[1] * x[1]).sqrt()
}

/// Projection within the half-capsule, handled piecewise.
fn capsule_project(x: &[f64], radius: f64, length: f64) -> (Vec<f64>, f64) {
    let n = x.len();
    if x[0] <= 0.0 {
        let r = norm(x);
        if r == 0.0 {
            let mut z = vec![0.0; n];
            z[0] = -radius;
            return (z, radius);
        }
        let z: Vec<f64> = x.iter().map(|c| c * radius / r).collect();
        return (z, radius - r);
    }
    let rt = norm(&x[1..]);
    let d_side = radius - rt;
    let d_end = length - x[0];
    if d_side < d_end || (d_side == d_end && rt > 0.0 && {
        // side projection is lexicographically smaller iff its first
        // differing coordinate is; compare explicitly
        let side: Vec<f64> = side_proj(x, radius, rt);
        let mut end = x.to_vec();
        end[0] = length;
        lex_less(&side, &end)
    }) {
        (side_proj(x, radius, rt), d_side)
    } else {
        let mut z = x.to_vec();
        z[0] = length;
        (z, d_end)
    }
}

fn side_proj(x: &[f64], radius: f64, rt: f64) -> Vec<f64> {
    let mut z = x.to_vec();
    if rt == 0.0 {
        // axis tie: all side directions equal; smallest second coordinate
        z[1] = -radius;
        for c in z.iter_mut().skip(2) {
            *c = 0.0;
        }
    } else {
        for c in z.iter_mut().skip(1) {
            *c *= radius / rt;
        }
    }
    z
}

/// Projection onto the profile curve `(s, a s^p)`, `s >= 0`, from the point
/// `(rho, y)` with `y >= a rho^p`. Returns `(s*, distance)`.
///
/// The distance-squared derivative `g'(s) = 2(s - rho) + 2 a p s^{p-1}
/// (a s^p - y)` is scanned on a log-spaced grid to bracket the global
/// minimum and then polished by safeguarded Newton iterations.
fn power_project_profile(a: f64, p: f64, rho: f64, y: f64) -> (f64, f64) {
    let g = |s: f64| {
        let d1 = s - rho;
        let d2 = a * s.powf(p) - y;
        d1 * d1 + d2 * d2
    };
    if y <= 0.0 {
        // apex or boundary contact
        return (rho, 0.0);
    }
    let s_top = (y / a).powf(1.0 / p);
    let s_hi = rho.max(s_top) * 1.5 + 1e-6;

    // coarse bracket of the global minimum
    let grid = 32;
    let mut best_i = 0;
    let mut best_g = g(0.0);
    for i in 1..=grid {
        let s = s_hi * (i as f64 / grid as f64).powi(2);
        let gs = g(s);
        if gs < best_g {
            best_g = gs;
            best_i = i;
        }
    }
    let s_of = |i: f64| s_hi * (i / grid as f64).powi(2);
    let mut lo = s_of((best_i as f64 - 1.0).max(0.0));
    let mut hi = s_of((best_i as f64 + 1.0).min(grid as f64));

    // golden-section squeeze, then Newton on g'
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    for _ in 0..16 {
        let m1 = lo + phi * (hi - lo);
        let m2 = hi - phi * (hi - lo);
        if g(m1) < g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mut s = 0.5 * (lo + hi);
    let gp = |s: f64| 2.0 * (s - rho) + 2.0 * a * p * s.powf(p - 1.0) * (a * s.powf(p) - y);
    let gpp = |s: f64| {
        let f1 = a * p * s.powf(p - 1.0);
        let f2 = a * p * (p - 1.0) * s.powf(p - 2.0);
        2.0 + 2.0 * (f1 * f1 + f2 * (a * s.powf(p) - y))
    };
    if s > 0.0 {
        for _ in 0..MAX_PROJ_ITERS {
            let d2 = gpp(s);
            if d2 <= 0.0 {
                break;
            }
            let step = gp(s) / d2;
            let next = (s - step).clamp(lo, hi);
            let done = (next - s).abs() <= PROJ_REL_TOL * s.abs().max(1e-300);
            s = next;
            if done {
                break;
            }
        }
    }
    (s, g(s).sqrt())
}

/// Projection onto the ellipse `x^2/a^2 + y^2/b^2 = 1` from an interior
/// point. Works in the first quadrant and maps signs back, breaking exact
/// axis ties toward the lexicographically smaller point.
fn ellipse_project(a: f64, b: f64, x: f64, y: f64) -> ([f64; 2], f64) {
    let xx = x.abs();
    let yy = y.abs();
    // squared distance to the boundary point at angle theta
    let d2 = |t: f64| {
        let (s, c) = t.sin_cos();
        let dx = a * c - xx;
        let dy = b * s - yy;
        dx * dx + dy * dy
    };
    let grid = 24;
    let mut best_i = 0;
    let mut best = d2(0.0);
    for i in 1..=grid {
        let t = std::f64::consts::FRAC_PI_2 * i as f64 / grid as f64;
        let v = d2(t);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let step = std::f64::consts::FRAC_PI_2 / grid as f64;
    let mut lo = step * (best_i as f64 - 1.0).max(0.0);
    let mut hi = step * (best_i as f64 + 1.0).min(grid as f64);
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    for _ in 0..12 {
        let m1 = lo + phi * (hi - lo);
        let m2 = hi - phi * (hi - lo);
        if d2(m1) < d2(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    // Newton on h(t) = (b^2-a^2) sin t cos t + a xx sin t - b yy cos t
    let h = |t: f64| {
        let (s, c) = t.sin_cos();
        (b * b - a * a) * s * c + a * xx * s - b * yy * c
    };
    let hp = |t: f64| {
        let (s, c) = t.sin_cos();
        (b * b - a * a) * (c * c - s * s) + a * xx * c + b * yy * s
    };
    let mut t = 0.5 * (lo + hi);
    for _ in 0..MAX_PROJ_ITERS {
        let d = hp(t);
        if d.abs() < 1e-300 {
            break;
        }
        let next = (t - h(t) / d).clamp(lo, hi);
        let done = (next - t).abs() <= PROJ_REL_TOL * t.abs().max(1e-3);
        t = next;
        if done {
            break;
        }
    }
    let (s, c) = t.sin_cos();
    let (qx, qy) = (a * c, b * s);
    let delta = ((qx - xx).powi(2) + (qy - yy).powi(2)).sqrt();
    // restore signs; on an exact axis the negative representative is the
    // lexicographically smaller minimizer
    let sx = if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else if qx > 0.0 { -1.0 } else { 1.0 };
    let sy = if y > 0.0 { 1.0 } else if y < 0.0 { -1.0 } else if qy > 0.0 { -1.0 } else { 1.0 };
    ([sx * qx, sy * qy], delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn membership_catalog_examples() {
        let ball = Domain::unit_ball(2).unwrap();
        assert!(ball.contains(&pt(&[0.0, 0.0])).unwrap());
        assert!(!ball.contains(&pt(&[1.0, 0.0])).unwrap()); // open set
        let power = Domain::power(1.0, 2.0, 2).unwrap();
        assert!(power.contains(&pt(&[1.0, 1.5])).unwrap());
        assert!(!power.contains(&pt(&[1.0, 1.0])).unwrap());
        assert!(ball.contains(&pt(&[0.0])).is_err()); // dimension mismatch
    }

    #[test]
    fn interval_and_ball_distances() {
        let ball = Domain::unit_ball(2).unwrap();
        assert!((ball.dist_to_boundary(&pt(&[0.0, 0.0])).unwrap() - 1.0).abs() < 1e-15);
        let iv = Domain::interval(0.0, 1.0).unwrap();
        assert!((iv.dist_to_boundary(&pt(&[0.3])).unwrap() - 0.3).abs() < 1e-15);
        assert!(iv.dist_to_boundary(&pt(&[1.5])).is_err());
    }

    #[test]
    fn ball_projection_is_radial() {
        let ball = Domain::unit_ball(2).unwrap();
        let (z, d) = ball.project_to_boundary(&pt(&[0.5, 0.0])).unwrap();
        assert!(z.dist(&pt(&[1.0, 0.0])) < 1e-14);
        assert!((d - 0.5).abs() < 1e-14);
    }

    #[test]
    fn box_center_tie_breaks_lexicographically() {
        let sq = Domain::box_domain(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let (z, d) = sq.project_to_boundary(&pt(&[0.0, 0.0])).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        assert!(z.dist(&pt(&[-1.0, 0.0])) < 1e-15);
    }

    /// Brute-force oracle: minimize |x - (s, s^2)| on a fine grid with local
    /// refinement, independently of the Newton path.
    fn power_grid_oracle(a: f64, p: f64, x: &[f64], s_max: f64) -> f64 {
        let g = |s: f64| {
            let d1 = s - x[0].abs();
            let d2 = a * s.powf(p) - x[1];
            (d1 * d1 + d2 * d2).sqrt()
        };
        let mut best = f64::INFINITY;
        let mut best_s = 0.0;
        let n = 400_000;
        for i in 0..=n {
            let s = s_max * i as f64 / n as f64;
            let v = g(s);
            if v < best {
                best = v;
                best_s = s;
            }
        }
        // local golden refinement
        let (mut lo, mut hi) = (best_s - s_max / n as f64, best_s + s_max / n as f64);
        let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
        for _ in 0..80 {
            let m1 = lo + phi * (hi - lo);
            let m2 = hi - phi * (hi - lo);
            if g(m1) < g(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        g(0.5 * (lo + hi))
    }

    #[test]
    fn power_projection_matches_grid_oracle() {
        let dom = Domain::power(1.0, 2.0, 2).unwrap();
        // frozen oracle value for the contract example x = (0, 0.5)
        let d = dom.dist_to_boundary(&pt(&[0.0, 0.5])).unwrap();
        let oracle = power_grid_oracle(1.0, 2.0, &[0.0, 0.5], 3.0);
        assert!((d - oracle).abs() < 1e-8, "{d} vs oracle {oracle}");
        // a few more interior points
        for x in [[0.3, 1.0], [0.0, 2.0], [1.0, 4.0], [-0.7, 0.6]] {
            let d = dom.dist_to_boundary(&pt(&x)).unwrap();
            let oracle = power_grid_oracle(1.0, 2.0, &x, 5.0);
            assert!((d - oracle).abs() < 1e-8, "{x:?}: {d} vs {oracle}");
        }
    }

    /// Dense-grid + golden-section oracle for the ellipse projection.
    fn ellipse_grid_oracle(a: f64, b: f64, x: &[f64]) -> f64 {
        let g = |t: f64| {
            let dx = a * t.cos() - x[0];
            let dy = b * t.sin() - x[1];
            (dx * dx + dy * dy).sqrt()
        };
        let n = 200_000;
        let mut best = f64::INFINITY;
        let mut best_t = 0.0;
        for i in 0..n {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let v = g(t);
            if v < best {
                best = v;
                best_t = t;
            }
        }
        let w = 2.0 * std::f64::consts::PI / n as f64;
        let (mut lo, mut hi) = (best_t - w, best_t + w);
        let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
        for _ in 0..80 {
            let m1 = lo + phi * (hi - lo);
            let m2 = hi - phi * (hi - lo);
            if g(m1) < g(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        g(0.5 * (lo + hi))
    }

    #[test]
    fn ellipse_projection_matches_grid_oracle() {
        let dom = Domain::ellipse(2.0, 1.0).unwrap();
        let (z, d) = dom.project_to_boundary(&pt(&[1.0, 0.0])).unwrap();
        let oracle = ellipse_grid_oracle(2.0, 1.0, &[1.0, 0.0]);
        assert!((d - oracle).abs() < 1e-8, "{d} vs {oracle}");
        // boundary point satisfies the implicit equation
        let g = (z[0] / 2.0).powi(2) + z[1].powi(2);
        assert!((g - 1.0).abs() < 1e-10);
        // axis tie resolves to negative y
        assert!(z[1] < 0.0);
        for x in [[0.5, 0.3], [-1.2, -0.1], [0.0, 0.0], [1.9, 0.0]] {
            let d = dom.dist_to_boundary(&pt(&x)).unwrap();
            let oracle = ellipse_grid_oracle(2.0, 1.0, &x);
            assert!((d - oracle).abs() < 1e-8, "{x:?}: {d} vs {oracle}");
        }
    }

    #[test]
    fn supporting_halfspace_examples() {
        let ball = Domain::unit_ball(2).unwrap();
        let h = ball.supporting_halfspace(&pt(&[0.5, 0.0])).unwrap();
        assert!((h.normal()[0] + 1.0).abs() < 1e-12);
        assert!(h.normal()[1].abs() < 1e-12);
        assert!((h.offset() + 1.0).abs() < 1e-12);

        // a half-space supports itself everywhere
        let hs = HalfSpace::new(vec![0.0, 1.0], 0.0).unwrap();
        let dom = Domain::halfspace(hs.clone()).unwrap();
        let got = dom.supporting_halfspace(&pt(&[3.0, 2.0])).unwrap();
        assert_eq!(got, hs);

        // tangent to the power domain at w = (1,1): normal ~ (-2,1)/sqrt(5)
        let dom = Domain::power(1.0, 2.0, 2).unwrap();
        let h = dom.supporting_halfspace(&pt(&[1.0, 1.0])).unwrap();
        let s5 = 5.0_f64.sqrt();
        assert!((h.normal()[0] + 2.0 / s5).abs() < 1e-9);
        assert!((h.normal()[1] - 1.0 / s5).abs() < 1e-9);
        let d = h.signed_dist(&pt(&[0.0, 1.0]));
        assert!((d - 2.0 / s5).abs() < 1e-9, "delta = {d}");
    }

    #[test]
    fn wedge_apex_has_no_tangent() {
        let h1 = HalfSpace::new(vec![1.0, 0.0], 0.0).unwrap();
        let h2 = HalfSpace::new(vec![0.0, 1.0], 0.0).unwrap();
        let dom = Domain::wedge(h1, h2).unwrap();
        assert!(matches!(
            dom.supporting_halfspace(&pt(&[0.0, 0.0])),
            Err(Error::UndefinedTangent(_))
        ));
        // generic interior points are fine
        let h = dom.supporting_halfspace(&pt(&[0.5, 2.0])).unwrap();
        assert!((h.signed_dist(&pt(&[0.5, 2.0])) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn capsule_distances_by_region() {
        let dom = Domain::half_capsule(1.0, 3.0, 2).unwrap();
        // cap region
        assert!((dom.dist_to_boundary(&pt(&[-0.5, 0.0])).unwrap() - 0.5).abs() < 1e-14);
        // cylinder side vs end disc
        assert!((dom.dist_to_boundary(&pt(&[1.0, 0.2])).unwrap() - 0.8).abs() < 1e-14);
        assert!((dom.dist_to_boundary(&pt(&[2.9, 0.0])).unwrap() - 0.1).abs() < 1e-14);
        // rim has no tangent
        assert!(matches!(
            dom.supporting_halfspace(&pt(&[3.0, 1.0])),
            Err(Error::UndefinedTangent(_))
        ));
    }

    #[test]
    fn stadium_distance_is_one_minus_core_distance() {
        let dom = Domain::stadium();
        assert!((dom.dist_to_boundary(&pt(&[0.0, 0.0])).unwrap() - 1.0).abs() < 1e-15);
        assert!((dom.dist_to_boundary(&pt(&[1.5, 0.0])).unwrap() - 0.5).abs() < 1e-15);
        let h = dom.supporting_halfspace(&pt(&[0.3, 0.9])).unwrap();
        assert!((h.normal()[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn interior_delta_h_equals_delta_d() {
        // spec invariant: delta_H(x) = delta_D(x) for H supporting at x
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let domains = [
            Domain::unit_ball(3).unwrap(),
            Domain::box_domain(vec![-1.0, 0.0], vec![2.0, 1.0]).unwrap(),
            Domain::half_capsule(1.0, 4.0, 3).unwrap(),
            Domain::stadium(),
            Domain::ellipse(2.0, 1.0).unwrap(),
            Domain::power(1.0, 2.0, 2).unwrap(),
            Domain::power(0.5, 3.0, 3).unwrap(),
        ];
        for dom in &domains {
            for _ in 0..200 {
                let x = dom.sample_interior(&mut rng, 4.0);
                let dd = dom.dist_to_boundary(&x).unwrap();
                let h = match dom.supporting_halfspace(&x) {
                    Ok(h) => h,
                    // measure-zero corner projections are allowed to fail
                    Err(Error::UndefinedTangent(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                assert!(
                    (h.signed_dist(&x) - dd).abs() < 1e-9,
                    "{}: dH={} dD={}",
                    dom.id_string(),
                    h.signed_dist(&x),
                    dd
                );
            }
        }
    }

    #[test]
    fn support_plane_contains_domain_samples() {
        // spec invariant: D lies inside every sampled supporting half-space
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let domains = [
            Domain::unit_ball(2).unwrap(),
            Domain::stadium(),
            Domain::ellipse(2.0, 1.0).unwrap(),
            Domain::power(1.0, 2.0, 2).unwrap(),
            Domain::half_capsule(1.0, 3.0, 2).unwrap(),
        ];
        for dom in &domains {
            for _ in 0..50 {
                let w = dom.sample_boundary(&mut rng, 5.0);
                let h = match dom.supporting_halfspace(&w) {
                    Ok(h) => h,
                    Err(Error::UndefinedTangent(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                for _ in 0..50 {
                    let x = dom.sample_interior(&mut rng, 4.0);
                    assert!(
                        h.signed_dist(&x) >= -1e-9,
                        "{}: interior point outside supporting half-space",
                        dom.id_string()
                    );
                }
            }
        }
    }

    #[test]
    fn projection_distance_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let domains = [
            Domain::unit_ball(2).unwrap(),
            Domain::box_domain(vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 3.0]).unwrap(),
            Domain::stadium(),
            Domain::ellipse(2.0, 1.0).unwrap(),
            Domain::power(1.0, 2.0, 2).unwrap(),
            Domain::half_capsule(0.5, 2.0, 2).unwrap(),
        ];
        for dom in &domains {
            for _ in 0..300 {
                let x = dom.sample_interior(&mut rng, 4.0);
                let dd = dom.dist_to_boundary(&x).unwrap();
                let (z, d) = dom.project_to_boundary(&x).unwrap();
                assert!((x.dist(&z) - dd).abs() < 1e-9, "{}", dom.id_string());
                assert!((d - dd).abs() < 1e-12);
                // the projection sits on the boundary
                let bd = dom.signed_dist_slice(z.coords());
                assert!(bd.abs() < 1e-8, "{}: boundary residual {bd}", dom.id_string());
            }
        }
    }

    #[test]
    fn convexity_sampling_across_catalog() {
        // spec invariant: segments between interior samples stay interior
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let domains = [
            Domain::unit_ball(3).unwrap(),
            Domain::box_domain(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(),
            Domain::stadium(),
            Domain::ellipse(2.0, 1.0).unwrap(),
            Domain::power(1.0, 2.0, 2).unwrap(),
            Domain::half_capsule(1.0, 3.0, 3).unwrap(),
        ];
        for dom in &domains {
            for _ in 0..10_000 {
                let x = dom.sample_interior(&mut rng, 3.0);
                let y = dom.sample_interior(&mut rng, 3.0);
                let lambda = rng.gen::<f64>();
                let m = x.lerp(&y, lambda);
                assert!(
                    dom.signed_dist_slice(m.coords()) > -1e-12,
                    "{}: convex combination left the domain",
                    dom.id_string()
                );
            }
        }
    }

    #[test]
    fn inner_ball_sampling_at_declared_radius() {
        // spec invariant: the tangent ball of the declared radius fits, on the
        // smooth part of the boundary (the capsule rim neighbourhood is the
        // one corner and is excluded)
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let domains = [
            Domain::unit_ball(2).unwrap(),
            Domain::stadium(),
            Domain::ellipse(2.0, 1.0).unwrap(),
            Domain::power(1.0, 2.0, 2).unwrap(),
            Domain::half_capsule(1.0, 3.0, 2).unwrap(),
        ];
        for dom in &domains {
            let r = dom.inner_ball_radius();
            assert!(r > 0.0);
            let mut checked = 0;
            while checked < 1000 {
                let w = dom.sample_boundary(&mut rng, 3.0);
                if let DomainKind::HalfCapsule { radius, length, .. } = dom.kind() {
                    if w[0] > length - radius {
                        continue; // flat-end corner region
                    }
                }
                let h = match dom.supporting_halfspace(&w) {
                    Ok(h) => h,
                    Err(_) => continue,
                };
                // center of the tangent ball
                let c: Vec<f64> =
                    w.coords().iter().zip(h.normal()).map(|(a, n)| a + r * n).collect();
                // random points of the ball must stay in the closure
                for _ in 0..20 {
                    let mut v: Vec<f64> =
                        (0..dom.dim()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                    normalize(&mut v);
                    let rho = r * rng.gen::<f64>().powf(1.0 / dom.dim() as f64);
                    let p: Vec<f64> = c.iter().zip(&v).map(|(a, b)| a + rho * b).collect();
                    assert!(
                        dom.signed_dist_slice(&p) > -1e-7 * (1.0 + r),
                        "{}: inner tangent ball pokes out at {:?}",
                        dom.id_string(),
                        w.coords()
                    );
                }
                checked += 1;
            }
        }
    }

    #[test]
    fn chart_round_trip_lands_on_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let domains = [
            Domain::unit_ball(2).unwrap(),
            Domain::stadium(),
            Domain::ellipse(2.0, 1.0).unwrap(),
            Domain::power(1.0, 2.0, 2).unwrap(),
            Domain::box_domain(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            Domain::half_capsule(1.0, 3.0, 2).unwrap(),
        ];
        for dom in &domains {
            let k = dom.chart_dim().unwrap();
            for _ in 0..100 {
                let params: Vec<f64> =
                    (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                if let Some(w) = dom.boundary_from_chart(&params) {
                    let d = dom.signed_dist_slice(w.coords());
                    assert!(d.abs() < 1e-9, "{}: chart point off-boundary {d}", dom.id_string());
                }
            }
        }
    }
}
