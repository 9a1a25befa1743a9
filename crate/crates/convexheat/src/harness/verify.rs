//! Spot-check invariant suites behind `convexheat verify`. Each check prints
//! one pass/fail line; the exhaustive gate lives in the acceptance tests.

use rand::Rng;

use crate::bounds::{lower_bound_basic, lower_bound_improved, upper_bound_main};
use crate::error::{Error, Result};
use crate::geometry::{Domain, HalfSpace, Point};
use crate::kernels::{
    halfspace_kernel, halfspace_kernel_reflection, interval_kernel_eigen,
    interval_kernel_images, ReferenceKernel,
};
use crate::oracle::{ck_prop_check, ck_residual, CkProp};

use super::{stream_rng, uniform_in};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Geometry,
    Kernels,
    Bounds,
    Ck,
    All,
}

impl Suite {
    pub fn from_name(name: &str) -> Option<Suite> {
        match name {
            "geometry" => Some(Suite::Geometry),
            "kernels" => Some(Suite::Kernels),
            "bounds" => Some(Suite::Bounds),
            "ck" => Some(Suite::Ck),
            "all" => Some(Suite::All),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn catalog() -> Vec<Domain> {
    vec![
        Domain::unit_ball(2).unwrap(),
        Domain::box_domain(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(),
        Domain::stadium(),
        Domain::ellipse(2.0, 1.0).unwrap(),
        Domain::power(1.0, 2.0, 2).unwrap(),
        Domain::half_capsule(1.0, 3.0, 2).unwrap(),
    ]
}

fn geometry_suite(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = stream_rng(seed, 1);
    for dom in catalog() {
        let mut worst = 0.0_f64;
        let mut convex_ok = true;
        for _ in 0..500 {
            let x = dom.sample_interior(&mut rng, 3.0);
            let y = dom.sample_interior(&mut rng, 3.0);
            let m = x.lerp(&y, rng.gen::<f64>());
            if dom.signed_dist_slice(m.coords()) < -1e-12 {
                convex_ok = false;
            }
            if let Ok(h) = dom.supporting_halfspace(&x) {
                let dd = dom.dist_to_boundary(&x).unwrap_or(f64::NAN);
                worst = worst.max((h.signed_dist(&x) - dd).abs());
            }
        }
        out.push(CheckResult {
            name: format!("geometry/support-distance/{}", dom.id_string()),
            pass: worst < 1e-9,
            detail: format!("max |delta_H - delta_D| = {worst:.3e}"),
        });
        out.push(CheckResult {
            name: format!("geometry/convexity/{}", dom.id_string()),
            pass: convex_ok,
            detail: "500 sampled segments stayed interior".into(),
        });
    }
    out
}

fn kernels_suite(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = stream_rng(seed, 2);
    // two half-space evaluation routes
    let h = HalfSpace::new(vec![0.3, 1.0], -0.2).unwrap();
    let mut worst = 0.0_f64;
    for _ in 0..300 {
        let base: Vec<f64> = h.normal().iter().map(|c| c * (h.offset() + 1.0)).collect();
        let x = Point::from(vec![base[0] + rng.gen::<f64>() - 0.5, base[1] + rng.gen::<f64>()]);
        let y = Point::from(vec![base[0] + rng.gen::<f64>() - 0.5, base[1] + rng.gen::<f64>()]);
        if h.signed_dist(&x) < 0.0 || h.signed_dist(&y) < 0.0 {
            continue;
        }
        let t = 0.02 + rng.gen::<f64>();
        let a = halfspace_kernel(t, &x, &y, &h).unwrap();
        let b = halfspace_kernel_reflection(t, &x, &y, &h).unwrap();
        worst = worst.max((a - b).abs() / a.abs().max(1e-300));
    }
    out.push(CheckResult {
        name: "kernels/halfspace-two-routes".into(),
        pass: worst < 1e-12,
        detail: format!("max relative gap = {worst:.3e}"),
    });

    // image and eigenfunction series at the switchover time
    let t_switch = 1.0 / std::f64::consts::PI;
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let x = uniform_in(&mut rng, 0.01, 0.99);
        let y = uniform_in(&mut rng, 0.01, 0.99);
        let a = interval_kernel_images(t_switch, x, y, 0.0, 1.0);
        let b = interval_kernel_eigen(t_switch, x, y, 0.0, 1.0);
        worst = worst.max((a - b).abs() / a.abs().max(1e-300));
    }
    out.push(CheckResult {
        name: "kernels/interval-series-switchover".into(),
        pass: worst < 1e-12,
        detail: format!("max relative gap = {worst:.3e}"),
    });
    out
}

fn bounds_suite(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = stream_rng(seed, 3);
    let mut recompose_ok = true;
    let mut range_ok = true;
    for dom in catalog() {
        if dom.inner_ball_radius() <= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let x = dom.sample_interior(&mut rng, 3.0);
            let y = dom.sample_interior(&mut rng, 3.0);
            let t = 0.01 + rng.gen::<f64>();
            let ub = upper_bound_main(&dom, t, &x, &y, 2.0).unwrap();
            let lb = lower_bound_basic(&dom, t, &x, &y).unwrap();
            let (lp, ls) = lower_bound_improved(&dom, t, &x, &y).unwrap();
            for b in [&ub, &lb, &lp, &ls] {
                if (b.value - b.recompose()).abs() > 1e-12 * b.value.abs().max(1e-300) {
                    recompose_ok = false;
                }
                if b.factors.iter().any(|f| !(0.0..=1.0).contains(&f.value)) {
                    range_ok = false;
                }
            }
        }
    }
    out.push(CheckResult {
        name: "bounds/recompose-1e-12".into(),
        pass: recompose_ok,
        detail: "value = constant * gaussian * factor composition".into(),
    });
    out.push(CheckResult {
        name: "bounds/min-terms-in-unit-interval".into(),
        pass: range_ok,
        detail: "every min-term in [0,1]".into(),
    });

    // exact half-space sandwich with explicit constants
    let h = HalfSpace::new(vec![0.0, 1.0], 0.0).unwrap();
    let dom = Domain::halfspace(h.clone()).unwrap();
    let c = 1.0 - (-1.0_f64).exp();
    let mut ok = true;
    for _ in 0..500 {
        let x = Point::from(vec![rng.gen::<f64>(), rng.gen::<f64>() * 2.0 + 1e-9]);
        let y = Point::from(vec![rng.gen::<f64>(), rng.gen::<f64>() * 2.0 + 1e-9]);
        let t = 0.02 + rng.gen::<f64>();
        let exact = halfspace_kernel(t, &x, &y, &h).unwrap();
        let lo = lower_bound_basic(&dom, t, &x, &y).unwrap().value;
        let hi = upper_bound_main(&dom, t, &x, &y, 2.0).unwrap().value;
        if c * lo > exact * (1.0 + 1e-12) || exact > hi * (1.0 + 1e-12) {
            ok = false;
        }
    }
    out.push(CheckResult {
        name: "bounds/halfspace-exact-sandwich".into(),
        pass: ok,
        detail: format!("(1 - 1/e) lower <= exact <= upper, c = {c:.6}"),
    });
    out
}

fn ck_suite_quick(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = stream_rng(seed, 4);
    let mut max_res = 0.0_f64;
    for n in 1..=3usize {
        for _ in 0..3 {
            let t = uniform_in(&mut rng, 0.05, 0.4);
            let alpha = uniform_in(&mut rng, 0.2, 0.8);
            let x: Vec<f64> = (0..n).map(|_| uniform_in(&mut rng, -0.5, 0.5)).collect();
            let y: Vec<f64> = x.iter().map(|c| c + 0.5 * t.sqrt()).collect();
            let r = ck_residual(
                &ReferenceKernel::Gauss { dim: n },
                t,
                &Point::from(x),
                &Point::from(y),
                alpha,
                1e-10,
            )
            .unwrap();
            max_res = max_res.max(r);
        }
    }
    let h = HalfSpace::new(vec![0.0, 1.0], 0.0).unwrap();
    for _ in 0..3 {
        let t = uniform_in(&mut rng, 0.05, 0.4);
        let x = Point::from(vec![0.0, uniform_in(&mut rng, 0.2, 1.0)]);
        let y = Point::from(vec![0.3, uniform_in(&mut rng, 0.2, 1.0)]);
        let r = ck_residual(&ReferenceKernel::HalfSpace(h.clone()), t, &x, &y, 0.5, 1e-10).unwrap();
        max_res = max_res.max(r);
        let r = ck_residual(
            &ReferenceKernel::Interval { a: 0.0, b: 1.0 },
            0.08,
            &Point::from(vec![0.3]),
            &Point::from(vec![0.6]),
            0.3,
            1e-10,
        )
        .unwrap();
        max_res = max_res.max(r);
    }
    out.push(CheckResult {
        name: "ck/residuals-quick".into(),
        pass: max_res < 1e-8,
        detail: format!("max residual = {max_res:.3e}"),
    });

    let mut pass = true;
    for k in 0..10 {
        let n = 1 + k % 3;
        let t = uniform_in(&mut rng, 0.05, 0.5);
        let alpha = uniform_in(&mut rng, 0.15, 0.85);
        let x = Point::from(vec![0.1; n]);
        let y = Point::from(vec![-0.2; n]);
        let mid = x.lerp(&y, alpha);
        let res = ck_prop_check(
            &CkProp::CkLow {
                t,
                x,
                y,
                alpha,
                r: uniform_in(&mut rng, 0.3, 3.0) * t.sqrt(),
                a_center: mid,
            },
            1e-10,
        )
        .unwrap();
        pass &= res.pass;
    }
    out.push(CheckResult {
        name: "ck/concentration-quick".into(),
        pass,
        detail: "10 random concentration configurations".into(),
    });
    out
}

/// Runs a suite, returning the individual check results.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    match suite {
        Suite::Geometry => out.extend(geometry_suite(seed)),
        Suite::Kernels => out.extend(kernels_suite(seed)),
        Suite::Bounds => out.extend(bounds_suite(seed)),
        Suite::Ck => out.extend(ck_suite_quick(seed)),
        Suite::All => {
            out.extend(geometry_suite(seed));
            out.extend(kernels_suite(seed));
            out.extend(bounds_suite(seed));
            out.extend(ck_suite_quick(seed));
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("suite produced no checks".into()));
    }
    Ok(out)
}
