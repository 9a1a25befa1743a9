//! Dirichlet heat-kernel estimates on convex domains.
//!
//! The crate provides, layer by layer:
//!
//! - [`geometry`]: a catalog of analytically-defined convex domains with
//!   exact boundary distances, projections, and supporting half-spaces;
//! - [`kernels`]: closed-form reference kernels (whole space, half-space by
//!   reflection, interval/box image series) and comparison factors;
//! - [`bounds`]: the two-sided kernel bounds as auditable factor products;
//! - [`characteristics`]: estimators of the boundary-pair ratio infima that
//!   decide when the bounds are two-sided;
//! - [`oracle`]: an independent Brownian-bridge Monte Carlo kernel estimator
//!   plus quadrature checks of the semigroup identities;
//! - [`harness`]: experiment presets, reports, and the command-line surface.

pub mod bounds;
pub mod characteristics;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod kernels;
pub mod oracle;
pub mod quad;

pub use error::{Error, Result};

/// The narrative guide, rendered by `mdbook build book`. The chapters are
/// included here so `cargo test --doc` compiles and runs every code snippet
/// in the book, keeping it in sync with the API.
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    pub mod geometry {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    pub mod kernels {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub mod bounds {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    pub mod oracle {}
    #[doc = include_str!("../../../book/src/characteristics.md")]
    pub mod characteristics {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
}
