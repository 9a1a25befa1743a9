//! Closed-form reference kernels for the heat equation `u_t = Δu`: the whole
//! space Gaussian, the half-space kernel by reflection, interval/box image
//! series, the unit-ball comparison factor, and the not-feeling-the-boundary
//! envelope.
//!
//! All routines are pure and thread-safe.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{HalfSpace, Point};

/// Relative truncation target of the image/eigenfunction series.
const SERIES_TOL: f64 = 1e-16;

/// A kernel evaluation tagged with its time and dimension. The constructor
/// enforces domain monotonicity against the whole space: any Dirichlet kernel
/// is dominated by the Gaussian.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub t: f64,
    pub dim: usize,
}

impl KernelValue {
    pub fn checked(value: f64, t: f64, x: &Point, y: &Point) -> Result<Self> {
        let cap = gauss_kernel(t, x, y)?;
        if !(0.0..=f64::INFINITY).contains(&value) || value > cap * (1.0 + 1e-9) + 1e-300 {
            return Err(Error::InvalidParameter(format!(
                "kernel value {value} outside [0, gauss = {cap}]"
            )));
        }
        Ok(KernelValue { value, t, dim: x.dim() })
    }
}

/// `p(t,x,y) = (4 pi t)^{-n/2} exp(-|x-y|^2 / 4t)`.
pub fn gauss_kernel(t: f64, x: &Point, y: &Point) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    x.check_dim(y.dim())?;
    let n = x.dim() as f64;
    let r2 = x.dist_sq(y);
    Ok((4.0 * std::f64::consts::PI * t).powf(-0.5 * n) * (-r2 / (4.0 * t)).exp())
}

/// Half-space kernel in product form,
/// `p(t,x,y) (1 - exp(-delta_H(x) delta_H(y) / t))`.
///
/// Algebraically identical to the reflection difference
/// [`halfspace_kernel_reflection`]; the product form is evaluated through
/// `exp_m1` and is the numerically preferred route near the boundary.
pub fn halfspace_kernel(t: f64, x: &Point, y: &Point, h: &HalfSpace) -> Result<f64> {
    let p = gauss_kernel(t, x, y)?;
    x.check_dim(h.dim())?;
    let dx = h.signed_dist(x);
    let dy = h.signed_dist(y);
    if dx < 0.0 || dy < 0.0 {
        return Err(Error::OutsideDomain { excess: (-dx).max(-dy) });
    }
    Ok(p * (-(-dx * dy / t).exp_m1()))
}

/// Half-space kernel as the reflection difference `p(t,x,y) - p(t,x,ybar)`.
pub fn halfspace_kernel_reflection(t: f64, x: &Point, y: &Point, h: &HalfSpace) -> Result<f64> {
    let dx = h.signed_dist(x);
    let dy = h.signed_dist(y);
    if dx < 0.0 || dy < 0.0 {
        return Err(Error::OutsideDomain { excess: (-dx).max(-dy) });
    }
    let ybar = h.reflect(y);
    Ok(gauss_kernel(t, x, y)? - gauss_kernel(t, x, &ybar)?)
}

/// Dirichlet kernel of the interval `(a, b)`.
///
/// Method of images for `t < (b-a)^2 / pi`, the eigenfunction series beyond;
/// the two series agree far below the truncation with terms summed until
/// they drop under `1e-16` of the running sum.
pub fn interval_kernel(t: f64, x: f64, y: f64, a: f64, b: f64) -> Result<f64> {
    check_interval_args(t, x, y, a, b)?;
    if x == a || x == b || y == a || y == b {
        return Ok(0.0); // Dirichlet condition, exactly
    }
    if t < (b - a) * (b - a) / std::f64::consts::PI {
        Ok(interval_kernel_images(t, x, y, a, b))
    } else {
        Ok(interval_kernel_eigen(t, x, y, a, b))
    }
}

fn check_interval_args(t: f64, x: f64, y: f64, a: f64, b: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    if !(a < b) {
        return Err(Error::InvalidParameter("interval needs a < b".into()));
    }
    let excess = (a - x).max(x - b).max(a - y).max(y - b);
    if excess > 0.0 {
        return Err(Error::OutsideDomain { excess });
    }
    Ok(())
}

/// Image-charge series; efficient for small `t`.
pub fn interval_kernel_images(t: f64, x: f64, y: f64, a: f64, b: f64) -> f64 {
    let l = b - a;
    let g = |u: f64| (-u * u / (4.0 * t)).exp();
    let mut sum = g(x - y) - g(x + y - 2.0 * a);
    for k in 1..1000 {
        let kk = 2.0 * k as f64 * l;
        let term = g(x - y - kk) + g(x - y + kk) - g(x + y - 2.0 * a - kk)
            - g(x + y - 2.0 * a + kk);
        sum += term;
        if term.abs() <= SERIES_TOL * sum.abs().max(1e-300) && (kk - (x - y).abs()) > 0.0 {
            break;
        }
    }
    (4.0 * std::f64::consts::PI * t).powf(-0.5) * sum.max(0.0)
}

/// Eigenfunction (Poisson-dual) series; efficient for large `t`.
pub fn interval_kernel_eigen(t: f64, x: f64, y: f64, a: f64, b: f64) -> f64 {
    let l = b - a;
    let base = std::f64::consts::PI / l;
    let mut sum = 0.0_f64;
    for m in 1..100_000 {
        let mf = m as f64;
        let envelope = (-mf * mf * base * base * t).exp();
        // the sine product is grouped first so the kernel is exactly
        // symmetric under swapping x and y
        sum += envelope * ((mf * base * (x - a)).sin() * (mf * base * (y - a)).sin());
        // the sine factors can vanish at individual m, so the stopping rule
        // uses the envelope
        if (mf * mf * base * base * t) > 3.0 && envelope <= SERIES_TOL * sum.abs().max(1e-300) {
            break;
        }
    }
    (2.0 / l * sum).max(0.0)
}

/// Dirichlet kernel of an axis-aligned box as the product of the coordinate
/// interval kernels.
pub fn box_kernel(t: f64, x: &Point, y: &Point, lo: &[f64], hi: &[f64]) -> Result<f64> {
    x.check_dim(y.dim())?;
    x.check_dim(lo.len())?;
    let mut prod = 1.0;
    for i in 0..lo.len() {
        prod *= interval_kernel(t, x[i], y[i], lo[i], hi[i])?;
    }
    Ok(prod)
}

/// The unit-ball comparison factor
/// `(1 ∧ δ(x)δ(y)/t) + (1 ∧ δ(x)|x-y|^2/t)(1 ∧ δ(y)|x-y|^2/t)`
/// with `δ` the distance to the unit sphere. Always in `(0, 2]`.
pub fn ball_h_factor(t: f64, x: &Point, y: &Point) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    x.check_dim(y.dim())?;
    let dx = 1.0 - crate::geometry::norm(x.coords());
    let dy = 1.0 - crate::geometry::norm(y.coords());
    if dx < 0.0 || dy < 0.0 {
        return Err(Error::OutsideDomain { excess: (-dx).max(-dy) });
    }
    let r2 = x.dist_sq(y);
    Ok(min1(dx * dy / t) + min1(dx * r2 / t) * min1(dy * r2 / t))
}

#[inline]
pub(crate) fn min1(u: f64) -> f64 {
    u.min(1.0)
}

/// Not-feeling-the-boundary factor: `max(0, 1 - e^{-u} Σ_{k=1}^{n}
/// 2^k/(k-1)! u^{k-1})` with `u = rho^2/t`. The raw series can go negative
/// for small `u`, where a density lower bound of zero is the useful content.
pub fn vdb_factor(rho_sq_over_t: f64, dim: usize) -> f64 {
    let u = rho_sq_over_t;
    let mut series = 0.0;
    let mut pow2 = 1.0;
    let mut fact = 1.0; // (k-1)!
    let mut upow = 1.0; // u^{k-1}
    for k in 1..=dim {
        pow2 *= 2.0;
        if k > 1 {
            fact *= (k - 1) as f64;
            upow *= u;
        }
        series += pow2 / fact * upow;
    }
    (1.0 - (-u).exp() * series).max(0.0)
}

/// Whole-space Gaussian times [`vdb_factor`]: a lower bound for the Dirichlet
/// kernel when the segment `xy` keeps distance `rho` from the boundary.
pub fn vdb_lower(t: f64, x: &Point, y: &Point, rho: f64) -> Result<f64> {
    if rho < 0.0 {
        return Err(Error::InvalidParameter(format!("rho must be >= 0, got {rho}")));
    }
    Ok(gauss_kernel(t, x, y)? * vdb_factor(rho * rho / t, x.dim()))
}

/// Exact kernels the verification oracle can integrate against.
#[derive(Clone, Debug)]
pub enum ReferenceKernel {
    Gauss { dim: usize },
    HalfSpace(HalfSpace),
    Interval { a: f64, b: f64 },
}

impl ReferenceKernel {
    pub fn dim(&self) -> usize {
        match self {
            ReferenceKernel::Gauss { dim } => *dim,
            ReferenceKernel::HalfSpace(h) => h.dim(),
            ReferenceKernel::Interval { .. } => 1,
        }
    }

    pub fn eval(&self, t: f64, x: &Point, y: &Point) -> Result<f64> {
        match self {
            ReferenceKernel::Gauss { .. } => gauss_kernel(t, x, y),
            ReferenceKernel::HalfSpace(h) => halfspace_kernel(t, x, y, h),
            ReferenceKernel::Interval { a, b } => interval_kernel(t, x[0], y[0], *a, *b),
        }
    }

    /// Evaluation from raw slices, used inside quadrature loops.
    pub(crate) fn eval_slice(&self, t: f64, x: &[f64], y: &[f64]) -> f64 {
        match self {
            ReferenceKernel::Gauss { .. } => {
                let n = x.len() as f64;
                let r2 = crate::geometry::dist_sq(x, y);
                (4.0 * std::f64::consts::PI * t).powf(-0.5 * n) * (-r2 / (4.0 * t)).exp()
            }
            ReferenceKernel::HalfSpace(h) => {
                let dx = h.signed_dist_slice(x);
                let dy = h.signed_dist_slice(y);
                if dx < 0.0 || dy < 0.0 {
                    return 0.0;
                }
                let n = x.len() as f64;
                let r2 = crate::geometry::dist_sq(x, y);
                (4.0 * std::f64::consts::PI * t).powf(-0.5 * n)
                    * (-r2 / (4.0 * t)).exp()
                    * (-(-dx * dy / t).exp_m1())
            }
            ReferenceKernel::Interval { a, b } => {
                if x[0] <= *a || x[0] >= *b || y[0] <= *a || y[0] >= *b {
                    return 0.0;
                }
                if t < (b - a) * (b - a) / std::f64::consts::PI {
                    interval_kernel_images(t, x[0], y[0], *a, *b)
                } else {
                    interval_kernel_eigen(t, x[0], y[0], *a, *b)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn gauss_normalizing_time() {
        let x = pt(&[0.25]);
        let v = gauss_kernel(1.0 / (4.0 * std::f64::consts::PI), &x, &x).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_closed_form_2d() {
        let v = gauss_kernel(0.25, &pt(&[0.0, 0.0]), &pt(&[1.0, 0.0])).unwrap();
        assert!((v - 0.11709966304863832).abs() < 1e-15);
        assert!(gauss_kernel(0.0, &pt(&[0.0]), &pt(&[0.0])).is_err());
    }

    #[test]
    fn gauss_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x = pt(&[rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()]);
            let y = pt(&[rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()]);
            let t = 0.01 + rng.gen::<f64>();
            assert_eq!(gauss_kernel(t, &x, &y).unwrap(), gauss_kernel(t, &y, &x).unwrap());
        }
    }

    #[test]
    fn halfspace_dirichlet_condition_and_closed_form() {
        let h = HalfSpace::new(vec![0.0, 1.0], 0.0).unwrap();
        // y on the boundary kills the kernel
        let v = halfspace_kernel(1.0, &pt(&[0.0, 1.0]), &pt(&[2.0, 0.0]), &h).unwrap();
        assert_eq!(v, 0.0);
        // (4 pi)^{-1} e^{-9/4} (1 - e^{-1})
        let v = halfspace_kernel(1.0, &pt(&[0.0, 1.0]), &pt(&[3.0, 1.0]), &h).unwrap();
        let expect = (4.0 * std::f64::consts::PI).recip() * (-2.25_f64).exp()
            * (1.0 - (-1.0_f64).exp());
        assert!((v - expect).abs() < 1e-15);
        assert!((v - 0.0053019).abs() < 1e-7);
        // outside the closure errors
        assert!(halfspace_kernel(1.0, &pt(&[0.0, -0.1]), &pt(&[0.0, 1.0]), &h).is_err());
    }

    #[test]
    fn halfspace_routes_agree_to_1e12_relative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let mut normal = vec![rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5];
            if crate::geometry::norm(&normal) < 1e-3 {
                normal = vec![1.0, 0.0];
            }
            let h = HalfSpace::new(normal, rng.gen::<f64>() - 0.5).unwrap();
            let anchor: Vec<f64> = h.normal().iter().map(|c| c * (h.offset() + 1.0)).collect();
            let mk = |rng: &mut ChaCha8Rng| {
                let d: Vec<f64> = anchor
                    .iter()
                    .map(|c| c + 2.0 * (rng.gen::<f64>() - 0.5))
                    .collect();
                let p = Point::from(d);
                if h.signed_dist(&p) >= 0.0 {
                    Some(p)
                } else {
                    None
                }
            };
            let (x, y) = match (mk(&mut rng), mk(&mut rng)) {
                (Some(x), Some(y)) => (x, y),
                _ => continue,
            };
            let t = 0.01 + rng.gen::<f64>();
            let a = halfspace_kernel(t, &x, &y, &h).unwrap();
            let b = halfspace_kernel_reflection(t, &x, &y, &h).unwrap();
            let scale = a.abs().max(b.abs()).max(1e-300);
            assert!((a - b).abs() / scale < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn interval_boundary_and_frozen_value() {
        // boundary point gives zero
        assert_eq!(interval_kernel(0.1, 0.0, 0.5, 0.0, 1.0).unwrap(), 0.0);
        // frozen dual-series oracle value at t = 0.02, x = y = 0.5
        let v = interval_kernel(0.02, 0.5, 0.5, 0.0, 1.0).unwrap();
        assert!((v - 1.994696534812016).abs() < 1e-12, "{v}");
        // and the independent eigen route agrees
        let w = interval_kernel_eigen(0.02, 0.5, 0.5, 0.0, 1.0);
        assert!((v - w).abs() / v < 1e-12);
        assert!(interval_kernel(0.1, 1.5, 0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn interval_series_agree_at_switchover() {
        let t = 1.0 / std::f64::consts::PI;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = rng.gen::<f64>();
            let y = rng.gen::<f64>();
            let a = interval_kernel_images(t, x, y, 0.0, 1.0);
            let b = interval_kernel_eigen(t, x, y, 0.0, 1.0);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300), "{a} vs {b}");
        }
        // frozen value at the switchover
        let v = interval_kernel(t, 0.3, 0.7, 0.0, 1.0).unwrap();
        assert!((v - 0.05656144473932058).abs() < 1e-13, "{v}");
    }

    #[test]
    fn interval_symmetries_exact() {
        let t = 0.07;
        for (x, y) in [(0.3, 0.8), (0.1, 0.2), (0.45, 0.9)] {
            let v = interval_kernel(t, x, y, 0.0, 1.0).unwrap();
            let sym = interval_kernel(t, y, x, 0.0, 1.0).unwrap();
            let refl = interval_kernel(t, 1.0 - x, 1.0 - y, 0.0, 1.0).unwrap();
            assert_eq!(v, sym);
            assert!((v - refl).abs() < 1e-15 * v.max(1.0));
        }
    }

    #[test]
    fn kernels_below_gauss_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = HalfSpace::new(vec![1.0], 0.0).unwrap();
        for _ in 0..300 {
            let t = 0.01 + rng.gen::<f64>();
            let x = rng.gen::<f64>();
            let y = rng.gen::<f64>();
            let g = gauss_kernel(t, &pt(&[x]), &pt(&[y])).unwrap();
            let hs = halfspace_kernel(t, &pt(&[x]), &pt(&[y]), &h).unwrap();
            let iv = interval_kernel(t, x, y, 0.0, 1.0).unwrap();
            assert!(hs <= g * (1.0 + 1e-14));
            assert!(iv <= g * (1.0 + 1e-14));
            assert!(hs >= 0.0 && iv >= 0.0);
            // interval sits inside the half-line too
            assert!(iv <= hs * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn interval_monotone_under_inclusion() {
        for t in [0.02, 0.1, 0.5] {
            for (x, y) in [(0.2, 0.8), (0.5, 0.5), (0.05, 0.4)] {
                let small = interval_kernel(t, x, y, 0.0, 1.0).unwrap();
                let large = interval_kernel(t, x, y, -1.0, 2.0).unwrap();
                assert!(small <= large * (1.0 + 1e-13), "t={t} x={x} y={y}");
            }
        }
    }

    #[test]
    fn ball_h_factor_named_values() {
        let o = pt(&[0.0, 0.0]);
        assert!((ball_h_factor(1.0, &o, &o).unwrap() - 1.0).abs() < 1e-15);
        assert!((ball_h_factor(4.0, &o, &o).unwrap() - 0.25).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let mut x = [rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5];
            let mut y = [rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5];
            x.iter_mut().for_each(|c| *c *= 1.4);
            y.iter_mut().for_each(|c| *c *= 1.4);
            if crate::geometry::norm(&x) >= 1.0 || crate::geometry::norm(&y) >= 1.0 {
                continue;
            }
            let t = 0.01 + 2.0 * rng.gen::<f64>();
            let hf = ball_h_factor(t, &pt(&x), &pt(&y)).unwrap();
            assert!(hf > 0.0 && hf <= 2.0);
        }
        assert!(ball_h_factor(1.0, &pt(&[1.1, 0.0]), &o).is_err());
    }

    #[test]
    fn vdb_named_values() {
        // n = 1, u = ln 4: 1 - 2/4 = 1/2
        assert!((vdb_factor(4.0_f64.ln(), 1) - 0.5).abs() < 1e-15);
        // deep interior: factor -> 1
        assert!(vdb_factor(200.0, 3) > 1.0 - 1e-12);
        // tiny separation clamps to zero
        assert_eq!(vdb_factor(1e-4, 2), 0.0);
        assert!(vdb_lower(1.0, &pt(&[0.0]), &pt(&[0.0]), -1.0).is_err());
    }

    #[test]
    fn vdb_below_exact_halfspace_kernel() {
        // 1-d half-line: vdb with rho = delta(x) = delta(y) must sit below
        // the exact reflection kernel at x = y
        let h = HalfSpace::new(vec![1.0], 0.0).unwrap();
        for t in [0.01, 0.1, 1.0] {
            for delta in [0.5, 1.0, 2.0, 5.0] {
                let x = pt(&[delta]);
                let lower = vdb_lower(t, &x, &x, delta).unwrap();
                let exact = halfspace_kernel(t, &x, &x, &h).unwrap();
                assert!(lower <= exact * (1.0 + 1e-12), "t={t} delta={delta}");
            }
        }
    }

    #[test]
    fn kernel_value_enforces_gauss_cap() {
        let x = pt(&[0.0]);
        let y = pt(&[0.3]);
        let g = gauss_kernel(0.5, &x, &y).unwrap();
        assert!(KernelValue::checked(g * 0.7, 0.5, &x, &y).is_ok());
        assert!(KernelValue::checked(g * 1.1, 0.5, &x, &y).is_err());
        assert!(KernelValue::checked(-0.1, 0.5, &x, &y).is_err());
    }
}
