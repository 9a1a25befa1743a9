//! Adaptive Gauss–Kronrod quadrature (G7–K15), one-dimensional and
//! tensorized over nested variable limits for up to three dimensions.

use crate::error::{Error, Result};

// G7-K15 abscissae and weights on [-1, 1] (positive half; the rule is
// symmetric). Kronrod points interleave the Gauss points.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One G7/K15 evaluation over `[a, b]`: returns `(kronrod, |kronrod - gauss|)`.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = 0.0;
    let mut g = 0.0;
    for (i, (&x, &wk)) in XGK.iter().zip(&WGK).enumerate() {
        let (flo, fhi) = if x == 0.0 {
            let v = f(c);
            (v, 0.0)
        } else {
            (f(c - h * x), f(c + h * x))
        };
        let pair = if x == 0.0 { flo } else { flo + fhi };
        k += wk * pair;
        if i % 2 == 1 {
            // odd Kronrod indices are the embedded Gauss points (incl. center)
            g += WG[i / 2] * pair;
        }
    }
    (k * h, (k - g).abs() * h)
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// Adaptively integrates `f` over `[a, b]` until the error estimate drops
/// below `max(abs_tol, rel_tol * |integral|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature("non-finite limits".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    let (value, err) = gk15(&mut f, a, b);
    let mut segs = vec![Segment { a, b, value, err }];
    for _ in 0..4000 {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.err).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        // split the worst segment
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("non-empty");
        let s = segs.swap_remove(worst);
        let m = 0.5 * (s.a + s.b);
        if m == s.a || m == s.b {
            segs.push(s); // cannot split further; accept
            return Ok(segs.iter().map(|s| s.value).sum());
        }
        let (v1, e1) = gk15(&mut f, s.a, m);
        let (v2, e2) = gk15(&mut f, m, s.b);
        segs.push(Segment { a: s.a, b: m, value: v1, err: e1 });
        segs.push(Segment { a: m, b: s.b, value: v2, err: e2 });
    }
    Err(Error::Quadrature(format!(
        "adaptive refinement exhausted with error {:.3e}",
        segs.iter().map(|s| s.err).sum::<f64>()
    )))
}

/// Tensorized integral over a region described by nested limits:
/// coordinate `i` runs over `limits(i, &z[..i])`. Inner levels get a tighter
/// tolerance so the outer estimate stays reliable.
pub fn integrate_nested(
    dim: usize,
    limits: &dyn Fn(usize, &[f64]) -> (f64, f64),
    f: &dyn Fn(&[f64]) -> f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    if dim == 0 || dim > 3 {
        return Err(Error::Quadrature(format!(
            "nested quadrature supports 1 <= n <= 3, got {dim}"
        )));
    }
    let mut z = vec![0.0; dim];
    nested_level(0, dim, limits, f, abs_tol, rel_tol, &mut z)
}

fn nested_level(
    level: usize,
    dim: usize,
    limits: &dyn Fn(usize, &[f64]) -> (f64, f64),
    f: &dyn Fn(&[f64]) -> f64,
    abs_tol: f64,
    rel_tol: f64,
    z: &mut Vec<f64>,
) -> Result<f64> {
    let (lo, hi) = limits(level, &z[..level]);
    if !(lo <= hi) {
        return Ok(0.0);
    }
    let mut failure: Option<Error> = None;
    let value = if level + 1 == dim {
        integrate(
            |x| {
                z[level] = x;
                f(z)
            },
            lo,
            hi,
            abs_tol,
            rel_tol,
        )
    } else {
        integrate(
            |x| {
                z[level] = x;
                match nested_level(level + 1, dim, limits, f, abs_tol * 0.1, rel_tol * 0.1, z) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            lo,
            hi,
            abs_tol,
            rel_tol,
        )
    };
    if let Some(e) = failure {
        return Err(e);
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        // K15 integrates degree <= 22 exactly; x^10 over [0,1]
        let v = integrate(|x| x.powi(10), 0.0, 1.0, 1e-14, 1e-14).unwrap();
        assert!((v - 1.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn gaussians_and_kinks() {
        let v = integrate(|x| (-x * x).exp(), -8.0, 8.0, 1e-12, 1e-12).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        // |x| has a kink; the error estimate is slightly optimistic there,
        // so ask for a little more than the obtained accuracy
        let v = integrate(|x| x.abs(), -1.0, 2.0, 1e-12, 1e-12).unwrap();
        assert!((v - 2.5).abs() < 1e-10);
    }

    #[test]
    fn nested_ball_volume() {
        // area of the unit disc via nested limits
        let limits = |i: usize, z: &[f64]| -> (f64, f64) {
            if i == 0 {
                (-1.0, 1.0)
            } else {
                let w = (1.0 - z[0] * z[0]).max(0.0).sqrt();
                (-w, w)
            }
        };
        let v = integrate_nested(2, &limits, &|_| 1.0, 1e-10, 1e-10).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-8, "{v}");
    }

    #[test]
    fn nested_3d_gaussian() {
        let limits = |_: usize, _: &[f64]| (-7.0, 7.0);
        let f = |z: &[f64]| (-(z[0] * z[0] + z[1] * z[1] + z[2] * z[2])).exp();
        let v = integrate_nested(3, &limits, &f, 1e-9, 1e-9).unwrap();
        assert!((v - std::f64::consts::PI.powf(1.5)).abs() < 1e-7, "{v}");
    }
}
