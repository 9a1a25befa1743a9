//! Convex-domain geometry: points, half-spaces, the domain catalog, and the
//! boundary-distance quantities every bound formula consumes.

mod domain;
mod halfspace;
mod ops;
mod point;

pub use domain::{make_domain, Domain, DomainKind, DomainSpec};
pub use halfspace::{angle_between, HalfSpace, UNIT_NORMAL_TOL};
pub use ops::{BOUNDARY_TOL, MAX_DIM, PROJ_REL_TOL};
pub use point::{dist, dist_sq, dot, norm, normalize, Point};

