//! Independent numerical ground truth: Brownian-bridge Monte Carlo
//! estimation of the Dirichlet kernel, quadrature verification of the
//! semigroup identities, and domain-monotonicity checks.
//!
//! The bridge estimator simulates discrete Brownian bridges (per-coordinate
//! variance `2 dt` per step, matching `u_t = Δu`) and multiplies per-sub-step
//! survival weights `1 - exp(-d(z_i) d(z_{i+1}) / dt)` computed against the
//! supporting half-space at the boundary projection of the nearer endpoint.
//! For a half-space domain the weight is the exact bridge non-exit
//! probability; for general convex `D ⊆ H` it over-estimates survival, with
//! the bias vanishing as steps grow.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, Domain, DomainKind, HalfSpace, Point};
use crate::kernels::{box_kernel, gauss_kernel, halfspace_kernel, min1, ReferenceKernel};
use crate::quad::{integrate, integrate_nested};

/// Paths per reduction chunk; fixed so the chunked sums merge in the same
/// order regardless of the worker count.
const CHUNK: u64 = 4096;
/// Path count above which progress lines go to standard error.
const PROGRESS_THRESHOLD: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasNote {
    /// Killing is computed against a containing half-space, so the mean
    /// over-estimates survival; the bias vanishes as steps grow.
    UpperBiased,
    /// Exact in distribution at every step count (half-space domains).
    UnbiasedLimit,
}

/// A Monte Carlo answer with its provenance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub paths: u64,
    pub steps: u32,
    pub seed: u64,
    pub bias_note: BiasNote,
}

/// Probability that the Brownian bridge from `x` to `y` over `[0, t]` stays
/// in `domain`, estimated from `paths` discrete bridges of `steps` sub-steps.
///
/// Deterministic for fixed `(seed, paths, steps)`: every path owns the
/// counter-based stream `(seed, path index)` and chunk sums merge in fixed
/// order.
pub fn bridge_survival(
    domain: &Domain,
    t: f64,
    x: &Point,
    y: &Point,
    steps: u32,
    paths: u64,
    seed: u64,
) -> Result<McEstimate> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    if steps < 2 || !steps.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "steps must be a power of two >= 2, got {steps}"
        )));
    }
    if paths < 100 {
        return Err(Error::InvalidParameter(format!("paths must be >= 100, got {paths}")));
    }
    x.check_dim(domain.dim())?;
    y.check_dim(domain.dim())?;
    let dx = domain.signed_dist_slice(x.coords());
    let dy = domain.signed_dist_slice(y.coords());
    let tol = crate::geometry::BOUNDARY_TOL;
    if dx < -tol || dy < -tol {
        return Err(Error::OutsideDomain { excess: (-dx).max(-dy) });
    }
    let bias_note = match domain.kind() {
        DomainKind::HalfSpace(_) => BiasNote::UnbiasedLimit,
        _ => BiasNote::UpperBiased,
    };
    // an endpoint on the boundary kills the bridge immediately
    if dx <= 0.0 || dy <= 0.0 {
        return Ok(McEstimate { mean: 0.0, stderr: 0.0, paths, steps, seed, bias_note });
    }

    let n_chunks = paths.div_ceil(CHUNK);
    let progress = paths >= PROGRESS_THRESHOLD;
    let done = std::sync::atomic::AtomicU64::new(0);

    let partials: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(paths);
            let mut sum = 0.0_f64;
            let mut sumsq = 0.0_f64;
            let mut cur = vec![0.0_f64; x.dim()];
            let mut next = vec![0.0_f64; x.dim()];
            for p in lo..hi {
                let w = simulate_bridge(domain, t, x, y, steps, seed, p, &mut cur, &mut next);
                sum += w;
                sumsq += w * w;
            }
            if progress {
                let total = done.fetch_add(hi - lo, std::sync::atomic::Ordering::Relaxed) + hi - lo;
                if c % 64 == 0 || total == paths {
                    eprintln!("bridge_survival: {total}/{paths} paths");
                }
            }
            (sum, sumsq)
        })
        .collect();

    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for (s, s2) in partials {
        sum += s;
        sumsq += s2;
    }
    let mean = sum / paths as f64;
    let var = ((sumsq - sum * sum / paths as f64) / (paths as f64 - 1.0)).max(0.0);
    let stderr = (var / paths as f64).sqrt();
    Ok(McEstimate { mean, stderr, paths, steps, seed, bias_note })
}

fn simulate_bridge(
    domain: &Domain,
    t: f64,
    x: &Point,
    y: &Point,
    steps: u32,
    seed: u64,
    path: u64,
    cur: &mut [f64],
    next: &mut [f64],
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    let dt = t / steps as f64;
    cur.copy_from_slice(x.coords());
    let mut d_cur = domain.signed_dist_slice(cur);
    let mut weight = 1.0_f64;
    for i in 0..steps {
        let remaining = t - i as f64 * dt;
        if i + 1 == steps {
            next.copy_from_slice(y.coords());
        } else {
            let frac = dt / remaining;
            let sd = (2.0 * dt * (remaining - dt) / remaining).sqrt();
            for (k, yk) in y.coords().iter().enumerate() {
                let g: f64 = rng.sample(StandardNormal);
                next[k] = cur[k] + (yk - cur[k]) * frac + sd * g;
            }
        }
        let d_next = domain.signed_dist_slice(next);
        if d_next <= 0.0 {
            return 0.0;
        }
        // supporting half-space at the projection of the nearer endpoint
        let plane = if d_cur <= d_next {
            domain.support_plane_mc(cur)
        } else {
            domain.support_plane_mc(next)
        };
        let a = plane.signed_dist(cur).max(0.0);
        let b = plane.signed_dist(next).max(0.0);
        weight *= -(-a * b / dt).exp_m1();
        if weight == 0.0 {
            return 0.0;
        }
        cur.copy_from_slice(next);
        d_cur = d_next;
    }
    weight
}

/// `p_D(t,x,y)` estimated as `p(t,x,y)` times the bridge survival
/// probability; mean and standard error carry the Gaussian prefactor.
pub fn mc_kernel(
    domain: &Domain,
    t: f64,
    x: &Point,
    y: &Point,
    steps: u32,
    paths: u64,
    seed: u64,
) -> Result<McEstimate> {
    let g = gauss_kernel(t, x, y)?;
    let mut est = bridge_survival(domain, t, x, y, steps, paths, seed)?;
    est.mean *= g;
    est.stderr *= g;
    Ok(est)
}

/// Relative Chapman–Kolmogorov residual
/// `|∫ k(at,x,z) k((1-a)t,z,y) dz - k(t,x,y)| / k(t,x,y)`
/// by adaptive Gauss–Kronrod quadrature (tensorized, `n <= 3`).
pub fn ck_residual(
    kernel: &ReferenceKernel,
    t: f64,
    x: &Point,
    y: &Point,
    alpha: f64,
    quadrature_tol: f64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must be in (0,1), got {alpha}")));
    }
    let n = kernel.dim();
    if n > 3 {
        return Err(Error::Unsupported("quadrature capped at dimension 3".into()));
    }
    x.check_dim(n)?;
    y.check_dim(n)?;
    let target = kernel.eval(t, x, y)?;
    if target <= 0.0 {
        return Err(Error::InvalidParameter("kernel vanishes at (t,x,y)".into()));
    }
    let spread = (alpha * (1.0 - alpha) * t).sqrt();
    let half_width = 14.0 * spread;
    let mid: Vec<f64> = x
        .coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| (1.0 - alpha) * a + alpha * b)
        .collect();

    let integral = match kernel {
        ReferenceKernel::Gauss { .. } => {
            let limits =
                |i: usize, _: &[f64]| (mid[i] - half_width, mid[i] + half_width);
            let f = |z: &[f64]| {
                kernel.eval_slice(alpha * t, x.coords(), z)
                    * kernel.eval_slice((1.0 - alpha) * t, z, y.coords())
            };
            integrate_nested(n, &limits, &f, quadrature_tol * target, quadrature_tol)?
        }
        ReferenceKernel::HalfSpace(h) => {
            // frame with the inward normal first, so the half-space is an
            // exact coordinate limit and the integrand has no kink
            let frame = orthonormal_frame(h.normal());
            let mid_frame: Vec<f64> =
                frame.iter().map(|e| dot(e, &mid)).collect();
            let b = h.offset();
            let limits = move |i: usize, _: &[f64]| {
                if i == 0 {
                    (b, (mid_frame[0] + half_width).max(b))
                } else {
                    (mid_frame[i] - half_width, mid_frame[i] + half_width)
                }
            };
            let fr = &frame;
            let f = move |zf: &[f64]| {
                let mut z = vec![0.0; zf.len()];
                for (coef, e) in zf.iter().zip(fr) {
                    for (zi, ei) in z.iter_mut().zip(e) {
                        *zi += coef * ei;
                    }
                }
                kernel.eval_slice(alpha * t, x.coords(), &z)
                    * kernel.eval_slice((1.0 - alpha) * t, &z, y.coords())
            };
            integrate_nested(n, &limits, &f, quadrature_tol * target, quadrature_tol)?
        }
        ReferenceKernel::Interval { a, b } => {
            let (a, b) = (*a, *b);
            integrate(
                |z| {
                    kernel.eval_slice(alpha * t, x.coords(), &[z])
                        * kernel.eval_slice((1.0 - alpha) * t, &[z], y.coords())
                },
                a,
                b,
                quadrature_tol * target,
                quadrature_tol,
            )?
        }
    };
    Ok((integral - target).abs() / target)
}

/// Completes `first = normal` to an orthonormal basis of `R^n`.
fn orthonormal_frame(normal: &[f64]) -> Vec<Vec<f64>> {
    let n = normal.len();
    let mut frame: Vec<Vec<f64>> = vec![normal.to_vec()];
    for i in 0..n {
        if frame.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for e in &frame {
            let c = dot(&v, e);
            for (vk, ek) in v.iter_mut().zip(e) {
                *vk -= c * ek;
            }
        }
        let len = norm(&v);
        if len > 1e-8 {
            for vk in v.iter_mut() {
                *vk /= len;
            }
            frame.push(v);
        }
    }
    debug_assert_eq!(frame.len(), n);
    frame
}

/// Which semigroup proposition to verify.
#[derive(Clone, Debug)]
pub enum CkProp {
    /// Concentration of the intermediate point: the integral over `B(a, r)`
    /// with `|a - ((1-alpha)x + alpha y)| = d` dominates an explicit fraction
    /// of `p(t,x,y)`.
    CkLow { t: f64, x: Point, y: Point, alpha: f64, r: f64, a_center: Point },
    /// Moment bound over an intersection of two half-spaces (dimension 2):
    /// the weighted integral is controlled by the midpoint distances, up to
    /// the frozen constant [`ckhh_constant`].
    CkHh { t: f64, x: Point, y: Point, h1: HalfSpace, h2: HalfSpace, alpha_exp: f64, beta_exp: f64 },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CkPropResult {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Gaussian absolute moment `E|G|^gamma` for the density `pi^{-n/2}
/// e^{-|z|^2}`: `Gamma((n+gamma)/2) / Gamma(n/2)`.
fn gauss_abs_moment(exponent: f64, n: usize) -> f64 {
    use statrs::function::gamma::gamma;
    gamma((n as f64 + exponent) / 2.0) / gamma(n as f64 / 2.0)
}

/// The frozen constant of the half-space moment bound:
/// `2^{a+b} (m_{a+b} + m_a + m_b + 1)` with `m_g` the Gaussian moment above.
/// Derived once from the sub-additivity of `u -> u^g`; never re-fitted.
pub fn ckhh_constant(alpha_exp: f64, beta_exp: f64, n: usize) -> f64 {
    2.0_f64.powf(alpha_exp + beta_exp)
        * (gauss_abs_moment(alpha_exp + beta_exp, n)
            + gauss_abs_moment(alpha_exp, n)
            + gauss_abs_moment(beta_exp, n)
            + 1.0)
}

pub fn ck_prop_check(prop: &CkProp, quadrature_tol: f64) -> Result<CkPropResult> {
    match prop {
        CkProp::CkLow { t, x, y, alpha, r, a_center } => {
            let (t, alpha, r) = (*t, *alpha, *r);
            let n = x.dim();
            if n > 3 {
                return Err(Error::Unsupported("quadrature capped at dimension 3".into()));
            }
            let mid: Vec<f64> = x
                .coords()
                .iter()
                .zip(y.coords())
                .map(|(a, b)| (1.0 - alpha) * a + alpha * b)
                .collect();
            let d = crate::geometry::dist(a_center.coords(), &mid);
            let p = gauss_kernel(t, x, y)?;
            use statrs::function::gamma::gamma;
            let rhs = (-d * d / (2.0 * alpha * (1.0 - alpha) * t) - 1.0).exp()
                / (2.0_f64.powi(n as i32) * gamma((n as f64 + 2.0) / 2.0))
                * min1(r * r / (alpha * (1.0 - alpha) * t)).powf(n as f64 / 2.0)
                * p;
            // clip the ball to the region where the integrand is non-negligible
            let spread = 14.0 * (alpha * (1.0 - alpha) * t).sqrt();
            let c = a_center.coords().to_vec();
            let r_eff = r.min(crate::geometry::dist(&c, &mid) + spread + r.min(spread));
            let limits = move |i: usize, z: &[f64]| {
                let mut rem = r_eff * r_eff;
                for (k, zk) in z.iter().enumerate() {
                    rem -= (zk - c[k]) * (zk - c[k]);
                }
                if rem <= 0.0 {
                    return (0.0, -1.0); // empty slice
                }
                let w = rem.sqrt();
                (c[i] - w, c[i] + w)
            };
            let gk = ReferenceKernel::Gauss { dim: n };
            let f = |z: &[f64]| {
                gk.eval_slice(alpha * t, x.coords(), z)
                    * gk.eval_slice((1.0 - alpha) * t, z, y.coords())
            };
            let lhs = integrate_nested(n, &limits, &f, quadrature_tol * rhs.max(1e-300), quadrature_tol)?;
            Ok(CkPropResult { lhs, rhs, pass: lhs >= rhs * (1.0 - 1e-9) })
        }
        CkProp::CkHh { t, x, y, h1, h2, alpha_exp, beta_exp } => {
            let (t, ae, be) = (*t, *alpha_exp, *beta_exp);
            let n = x.dim();
            if n != 2 {
                return Err(Error::Unsupported(
                    "the half-space moment check integrates in dimension 2".into(),
                ));
            }
            if ae < 0.0 || be < 0.0 {
                return Err(Error::InvalidParameter("exponents must be >= 0".into()));
            }
            let mid = x.midpoint(y);
            let d1m = h1.signed_dist(&mid);
            let d2m = h2.signed_dist(&mid);
            if d1m < 0.0 || d2m < 0.0 {
                return Err(Error::InvalidParameter(
                    "midpoint must lie inside both half-spaces".into(),
                ));
            }
            let p = gauss_kernel(t, x, y)?;
            let rhs = ckhh_constant(ae, be, n)
                * p
                * (t.sqrt() + d1m).powf(ae)
                * (t.sqrt() + d2m).powf(be);

            // frame aligned with h1: first coordinate along its inward normal
            let frame = orthonormal_frame(h1.normal());
            let mid_f: Vec<f64> = frame.iter().map(|e| dot(e, mid.coords())).collect();
            let w = 14.0 * (0.5 * t).sqrt() + crate::geometry::dist(x.coords(), y.coords());
            // h2 in frame coordinates: nu2f . zf >= b2
            let nu2f: Vec<f64> = frame.iter().map(|e| dot(e, h2.normal())).collect();
            let b1 = h1.offset();
            let b2 = h2.offset();
            let limits = move |i: usize, z: &[f64]| {
                if i == 0 {
                    (b1.max(mid_f[0] - w), mid_f[0] + w)
                } else {
                    let lo = mid_f[1] - w;
                    let hi = mid_f[1] + w;
                    // solve nu2f[0] z0 + nu2f[1] z1 >= b2 for z1
                    let c = b2 - nu2f[0] * z[0];
                    if nu2f[1].abs() < 1e-14 {
                        if nu2f[0] * z[0] >= b2 {
                            (lo, hi)
                        } else {
                            (0.0, -1.0)
                        }
                    } else if nu2f[1] > 0.0 {
                        ((c / nu2f[1]).max(lo), hi)
                    } else {
                        (lo, (c / nu2f[1]).min(hi))
                    }
                }
            };
            let gk = ReferenceKernel::Gauss { dim: 2 };
            let fr = frame.clone();
            let f = move |zf: &[f64]| {
                let z = [
                    zf[0] * fr[0][0] + zf[1] * fr[1][0],
                    zf[0] * fr[0][1] + zf[1] * fr[1][1],
                ];
                let dd1 = h1.signed_dist_slice(&z).max(0.0);
                let dd2 = h2.signed_dist_slice(&z).max(0.0);
                gk.eval_slice(0.5 * t, x.coords(), &z)
                    * gk.eval_slice(0.5 * t, &z, y.coords())
                    * dd1.powf(ae)
                    * dd2.powf(be)
            };
            let lhs =
                integrate_nested(2, &limits, &f, quadrature_tol * rhs.max(1e-300), quadrature_tol)?;
            Ok(CkPropResult { lhs, rhs, pass: lhs <= rhs * (1.0 + 1e-9) })
        }
    }
}

/// Exact-kernel evaluation for the domains that have one.
pub fn exact_kernel(domain: &Domain, t: f64, x: &Point, y: &Point) -> Result<f64> {
    match domain.kind() {
        DomainKind::Box { lo, hi } => box_kernel(t, x, y, lo, hi),
        DomainKind::HalfSpace(h) => halfspace_kernel(t, x, y, h),
        _ => Err(Error::Unsupported(format!(
            "no exact kernel for {}",
            domain.id_string()
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonotonicityMode {
    Exact,
    Mc { steps: u32, paths: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MonotonicityResult {
    pub p_small: f64,
    pub p_large: f64,
    pub pass: bool,
}

/// Checks `p_{D1} <= p_{D2}` for `D1 ⊆ D2` (containment verified by
/// sampling), in exact or Monte Carlo mode.
pub fn monotonicity_check(
    d1: &Domain,
    d2: &Domain,
    t: f64,
    x: &Point,
    y: &Point,
    mode: MonotonicityMode,
) -> Result<MonotonicityResult> {
    if d1.dim() != d2.dim() {
        return Err(Error::DimensionMismatch { expected: d1.dim(), got: d2.dim() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    for _ in 0..1000 {
        let p = d1.sample_interior(&mut rng, 4.0);
        if d2.signed_dist_slice(p.coords()) < -crate::geometry::BOUNDARY_TOL {
            return Err(Error::InvalidParameter(
                "containment violated: sampled point of D1 escapes D2".into(),
            ));
        }
    }
    match mode {
        MonotonicityMode::Exact => {
            let p1 = exact_kernel(d1, t, x, y)?;
            let p2 = exact_kernel(d2, t, x, y)?;
            Ok(MonotonicityResult { p_small: p1, p_large: p2, pass: p1 <= p2 * (1.0 + 1e-12) })
        }
        MonotonicityMode::Mc { steps, paths, seed } => {
            let e1 = mc_kernel(d1, t, x, y, steps, paths, seed)?;
            let e2 = mc_kernel(d2, t, x, y, steps, paths, seed ^ 0x9e3779b97f4a7c15)?;
            let slack = 3.0 * (e1.stderr * e1.stderr + e2.stderr * e2.stderr).sqrt();
            Ok(MonotonicityResult {
                p_small: e1.mean,
                p_large: e2.mean,
                pass: e1.mean <= e2.mean + slack,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn survival_is_deterministic_and_bounded() {
        let dom = Domain::unit_ball(2).unwrap();
        let x = pt(&[0.3, 0.0]);
        let y = pt(&[0.0, 0.4]);
        let a = bridge_survival(&dom, 0.1, &x, &y, 64, 2000, 42).unwrap();
        let b = bridge_survival(&dom, 0.1, &x, &y, 64, 2000, 42).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.stderr, b.stderr);
        assert!(a.mean >= 0.0 && a.mean <= 1.0);
        assert_eq!(a.bias_note, BiasNote::UpperBiased);
        // different seed moves the estimate
        let c = bridge_survival(&dom, 0.1, &x, &y, 64, 2000, 43).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn survival_edge_cases() {
        let dom = Domain::unit_ball(2).unwrap();
        // deep interior, tiny time: not feeling the boundary
        let o = pt(&[0.0, 0.0]);
        let est = bridge_survival(&dom, 0.001, &o, &o, 8, 500, 1).unwrap();
        assert!(est.mean > 1.0 - 1e-9);
        // boundary start is killed exactly
        let est = bridge_survival(&dom, 0.1, &pt(&[1.0, 0.0]), &o, 8, 500, 1).unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.stderr, 0.0);
        // argument validation
        assert!(bridge_survival(&dom, 0.1, &o, &o, 3, 500, 1).is_err());
        assert!(bridge_survival(&dom, 0.1, &o, &o, 8, 10, 1).is_err());
        assert!(bridge_survival(&dom, 0.1, &pt(&[2.0, 0.0]), &o, 8, 500, 1).is_err());
    }

    #[test]
    fn halfspace_survival_matches_reflection_formula() {
        // the correction is exact for half-spaces at any step count
        let h = HalfSpace::new(vec![0.0, 1.0], 0.0).unwrap();
        let dom = Domain::halfspace(h).unwrap();
        let t = 0.5;
        for (dx, dy) in [(0.2, 0.6), (1.0, 1.0)] {
            let x = pt(&[0.0, dx]);
            let y = pt(&[0.7, dy]);
            let est = bridge_survival(&dom, t, &x, &y, 64, 40_000, 7).unwrap();
            assert_eq!(est.bias_note, BiasNote::UnbiasedLimit);
            let exact = 1.0 - (-dx * dy / t as f64).exp();
            assert!(
                (est.mean - exact).abs() <= (3.0 * est.stderr).max(0.01 * exact),
                "survival {} vs exact {exact} (stderr {})",
                est.mean,
                est.stderr
            );
        }
    }

    #[test]
    fn interval_mc_matches_series_kernel() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let (t, x, y) = (0.1, pt(&[0.3]), pt(&[0.7]));
        let est = mc_kernel(&dom, t, &x, &y, 128, 50_000, 11).unwrap();
        let exact = crate::kernels::interval_kernel(t, 0.3, 0.7, 0.0, 1.0).unwrap();
        assert!(
            (est.mean - exact).abs() <= (3.0 * est.stderr).max(0.01 * exact),
            "mc {} vs exact {exact} (stderr {})",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn mc_symmetry_in_endpoints() {
        let dom = Domain::unit_ball(2).unwrap();
        let (x, y) = (pt(&[0.5, 0.0]), pt(&[0.0, -0.3]));
        let a = mc_kernel(&dom, 0.2, &x, &y, 64, 30_000, 3).unwrap();
        let b = mc_kernel(&dom, 0.2, &y, &x, 64, 30_000, 4).unwrap();
        let slack = 3.0 * (a.stderr * a.stderr + b.stderr * b.stderr).sqrt();
        assert!((a.mean - b.mean).abs() <= slack);
    }

    #[test]
    fn richardson_bias_shrinks_with_steps() {
        // half-capsule cap curvature: the half-space correction over-counts;
        // doubling steps must shrink the gap to the interval oracle
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let (t, x, y) = (0.15, pt(&[0.1]), pt(&[0.35]));
        let exact = crate::kernels::interval_kernel(t, 0.1, 0.35, 0.0, 1.0).unwrap();
        let mut errs = Vec::new();
        for steps in [4_u32, 16, 64] {
            let est = mc_kernel(&dom, t, &x, &y, steps, 400_000, 5).unwrap();
            // upper bias: estimate exceeds the truth (within noise)
            assert!(est.mean >= exact - 3.0 * est.stderr, "steps={steps}");
            errs.push((est.mean - exact).abs());
        }
        assert!(errs[2] < errs[0], "bias did not shrink: {errs:?}");
    }

    #[test]
    fn ck_residual_gauss_small() {
        for n in 1..=3usize {
            let x = pt(&vec![0.1; n]);
            let y = pt(&vec![-0.2; n]);
            let k = ReferenceKernel::Gauss { dim: n };
            let r = ck_residual(&k, 0.3, &x, &y, 0.4, 1e-10).unwrap();
            assert!(r < 1e-8, "n={n}: residual {r}");
        }
    }

    #[test]
    fn ck_residual_halfspace_and_interval() {
        let h = HalfSpace::new(vec![1.0, 1.0], -0.3).unwrap();
        let k = ReferenceKernel::HalfSpace(h.clone());
        let x = pt(&[0.5, 0.2]);
        let y = pt(&[0.1, 0.9]);
        assert!(h.signed_dist(&x) > 0.0 && h.signed_dist(&y) > 0.0);
        let r = ck_residual(&k, 0.2, &x, &y, 0.25, 1e-10).unwrap();
        assert!(r < 1e-8, "halfspace residual {r}");

        let k = ReferenceKernel::Interval { a: 0.0, b: 1.0 };
        let r = ck_residual(&k, 0.1, &pt(&[0.3]), &pt(&[0.7]), 0.5, 1e-10).unwrap();
        assert!(r < 1e-8, "interval residual {r}");
    }

    #[test]
    fn cklow_full_space_case() {
        // d = 0 and huge radius: the integral recovers p(t,x,y) and the
        // right-hand side is the explicit fraction of it
        let t = 0.3;
        let x = pt(&[0.2, -0.1]);
        let y = pt(&[-0.4, 0.3]);
        let alpha = 0.5;
        let mid = x.lerp(&y, alpha);
        let prop = CkProp::CkLow {
            t,
            x: x.clone(),
            y: y.clone(),
            alpha,
            r: 1e6 * t.sqrt(),
            a_center: mid,
        };
        let res = ck_prop_check(&prop, 1e-9).unwrap();
        assert!(res.pass);
        let p = gauss_kernel(t, &x, &y).unwrap();
        assert!((res.lhs - p).abs() < 1e-7 * p, "lhs {} vs p {}", res.lhs, p);
    }

    #[test]
    fn ckhh_zero_exponents() {
        let h1 = HalfSpace::new(vec![0.0, 1.0], 0.0).unwrap();
        let h2 = HalfSpace::new(vec![1.0, 0.3], -0.1).unwrap();
        let x = pt(&[0.4, 0.5]);
        let y = pt(&[0.8, 0.7]);
        let prop = CkProp::CkHh {
            t: 0.2,
            x: x.clone(),
            y: y.clone(),
            h1,
            h2,
            alpha_exp: 0.0,
            beta_exp: 0.0,
        };
        let res = ck_prop_check(&prop, 1e-9).unwrap();
        assert!(res.pass);
        // with zero exponents the integral is at most p(t,x,y)
        let p = gauss_kernel(0.2, &x, &y).unwrap();
        assert!(res.lhs <= p * (1.0 + 1e-9));
    }

    #[test]
    fn monotonicity_exact_and_mc() {
        let small = Domain::interval(0.0, 1.0).unwrap();
        let large = Domain::interval(-1.0, 2.0).unwrap();
        let x = pt(&[0.3]);
        let y = pt(&[0.6]);
        let r = monotonicity_check(&small, &large, 0.1, &x, &y, MonotonicityMode::Exact).unwrap();
        assert!(r.pass && r.p_small < r.p_large);

        let b1 = Domain::unit_ball(2).unwrap();
        let b2 = Domain::ball(vec![0.0, 0.0], 1.5).unwrap();
        let x = pt(&[0.4, 0.0]);
        let y = pt(&[0.0, 0.2]);
        let r = monotonicity_check(
            &b1,
            &b2,
            0.2,
            &x,
            &y,
            MonotonicityMode::Mc { steps: 64, paths: 20_000, seed: 9 },
        )
        .unwrap();
        assert!(r.pass);

        // equal domains pass with equality in exact mode
        let x1 = pt(&[0.3]);
        let y1 = pt(&[0.6]);
        let r = monotonicity_check(&small, &small, 0.1, &x1, &y1, MonotonicityMode::Exact).unwrap();
        assert_eq!(r.p_small, r.p_large);

        // violated containment is detected
        assert!(monotonicity_check(&large, &small, 0.1, &x1, &y1, MonotonicityMode::Exact).is_err());
    }
}
