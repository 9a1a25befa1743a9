//! Estimators of the boundary-pair ratio infima that decide two-sidedness.
//!
//! For boundary points `w != z` the midpoint ratio is
//! `delta_D((w+z)/2) / delta_{H_w}((w+z)/2)`; its infimum over pairs is the
//! Q characteristic. The R characteristic relaxes pairs whose midpoint is
//! deeper than 1: there the supremum of the segment ratio over points with
//! `delta_D > 1` is taken — by ratio monotonicity along the segment, that
//! supremum sits at the `w`-nearest admissible point, found by bisection on
//! the concave `delta_D`.
//!
//! The estimator samples boundary pairs in parallel chunks with
//! counter-based RNG streams, keeps a running infimum trace, and refines the
//! best samples with multi-start Nelder–Mead in the boundary chart.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Domain, DomainKind, Point};

/// Pairs per reduction chunk (fixed for reproducibility).
const CHUNK: u64 = 2048;
/// Degenerate-pair cutoff: pairs with `delta_{H_w}(mid)` below this are 0/0
/// artifacts (flat faces) and are skipped, with a counter.
const DEGENERATE_TOL: f64 = 1e-12;
/// Candidate starts refined by Nelder–Mead (at most; the best 1% below this).
const MAX_REFINE_STARTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    SQ,
    SR,
    Neither,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TracePoint {
    pub samples: u64,
    pub running_inf: f64,
}

/// The estimator's statistical answer for one domain and budget.
#[derive(Clone, Debug, Serialize)]
pub struct CharacteristicReport {
    pub domain_id: String,
    pub q_hat: f64,
    pub r_hat: f64,
    pub argmin_pair: (Point, Point),
    pub samples: u64,
    pub skipped_pairs: u64,
    pub refinement_trace: Vec<TracePoint>,
    pub classification: Classification,
    pub threshold: f64,
    /// Boundary truncation radius used on unbounded domains.
    pub truncation_window: Option<f64>,
}

/// Ratio profile along the segment from `w` to `z`:
/// `delta_D / delta_{H_w}` at `alpha = k/grid`, `k = 1..grid-1`.
/// Degenerate 0/0 entries (flat faces) are skipped; the remaining sequence
/// is non-increasing for convex domains.
pub fn ratio_profile(domain: &Domain, w: &Point, z: &Point, grid: usize) -> Result<Vec<f64>> {
    if grid < 2 {
        return Err(Error::InvalidParameter("grid must be >= 2".into()));
    }
    w.check_dim(domain.dim())?;
    z.check_dim(domain.dim())?;
    if w.dist(z) < 1e-12 {
        return Err(Error::InvalidParameter("profile endpoints must differ".into()));
    }
    for (name, p) in [("w", w), ("z", z)] {
        let d = domain.signed_dist_slice(p.coords()).abs();
        if d > crate::geometry::BOUNDARY_TOL {
            return Err(Error::InvalidParameter(format!(
                "{name} is off the boundary by {d:.3e}"
            )));
        }
    }
    let plane = domain.support_plane(w.coords())?;
    let mut vals = Vec::with_capacity(grid - 1);
    for k in 1..grid {
        let alpha = k as f64 / grid as f64;
        let m = w.lerp(z, alpha);
        let dh = plane.signed_dist(m.coords());
        if dh < DEGENERATE_TOL {
            continue;
        }
        let dd = domain.signed_dist_slice(m.coords()).max(0.0);
        vals.push(dd / dh);
    }
    Ok(vals)
}

/// Chart-parameter draw for one boundary point.
fn draw_params<R: Rng>(domain: &Domain, rng: &mut R, window: f64) -> Vec<f64> {
    let k = domain.chart_dim().expect("estimator needs a boundary chart");
    match domain.kind() {
        DomainKind::Power { .. } => {
            // mix uniform-in-ball with log-radial draws so both the apex
            // neighbourhood and the far boundary get explored
            let mut u: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let nrm = crate::geometry::norm(&u).max(1e-300);
            let r = if rng.gen::<bool>() {
                window * rng.gen::<f64>().powf(1.0 / k as f64)
            } else {
                window * (1e-4_f64).powf(rng.gen::<f64>())
            };
            u.iter_mut().for_each(|c| *c *= r / nrm);
            u
        }
        _ => (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
    }
}

/// Midpoint ratio and R-branch value for the pair given by chart parameters.
/// `None` marks a skipped (degenerate or invalid) pair.
fn pair_values(domain: &Domain, pw: &[f64], pz: &[f64]) -> Option<(f64, f64)> {
    let w = domain.boundary_from_chart(pw)?;
    let z = domain.boundary_from_chart(pz)?;
    if w.dist(&z) < 1e-9 {
        return None;
    }
    let plane = domain.support_plane(w.coords()).ok()?;
    let mid = w.midpoint(&z);
    let dh = plane.signed_dist(mid.coords());
    if dh < DEGENERATE_TOL {
        return None;
    }
    let dmid = domain.signed_dist_slice(mid.coords()).max(0.0);
    let q = (dmid / dh).clamp(0.0, 1.0);
    let r = if dmid <= 1.0 {
        q
    } else {
        // leftmost admissible point of {delta_D > 1} on the segment:
        // delta_D is concave with delta(0) = 0, so bisection applies
        let mut lo = 0.0_f64;
        let mut hi = 0.5_f64;
        for _ in 0..24 {
            let m = 0.5 * (lo + hi);
            let d = domain.signed_dist_slice(w.lerp(&z, m).coords());
            if d > 1.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        let m = w.lerp(&z, hi);
        let dhm = plane.signed_dist(m.coords());
        let ddm = domain.signed_dist_slice(m.coords()).max(0.0);
        (ddm / dhm).clamp(0.0, 1.0)
    };
    Some((q, r))
}

struct ScanChunk {
    pairs: u64,
    skipped: u64,
    min_q: f64,
    min_r: f64,
    argmin_q: Option<(Vec<f64>, Vec<f64>)>,
    argmin_r: Option<(Vec<f64>, Vec<f64>)>,
    // (q value, concatenated params) candidates for refinement
    best: Vec<(f64, Vec<f64>)>,
}

fn default_window(domain: &Domain) -> Option<f64> {
    match domain.kind() {
        DomainKind::Power { a, p, .. } => Some(10.0 * 1.0_f64.max(a.powf(-1.0 / (p - 1.0)))),
        _ if domain.bounded() => None,
        _ => Some(10.0),
    }
}

fn scan(
    domain: &Domain,
    budget: u64,
    seed: u64,
    window: f64,
    keep_per_chunk: usize,
) -> (Vec<ScanChunk>, Vec<TracePoint>, Vec<TracePoint>) {
    let n_chunks = budget.div_ceil(CHUNK);
    let chunks: Vec<ScanChunk> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(budget);
            let mut out = ScanChunk {
                pairs: hi - lo,
                skipped: 0,
                min_q: f64::INFINITY,
                min_r: f64::INFINITY,
                argmin_q: None,
                argmin_r: None,
                best: Vec::new(),
            };
            for _ in lo..hi {
                let pw = draw_params(domain, &mut rng, window);
                let pz = draw_params(domain, &mut rng, window);
                match pair_values(domain, &pw, &pz) {
                    None => out.skipped += 1,
                    Some((q, r)) => {
                        if q < out.min_q {
                            out.min_q = q;
                            out.argmin_q = Some((pw.clone(), pz.clone()));
                        }
                        if r < out.min_r {
                            out.min_r = r;
                            out.argmin_r = Some((pw.clone(), pz.clone()));
                        }
                        let mut cat = pw;
                        cat.extend_from_slice(&pz);
                        out.best.push((q, cat));
                        if out.best.len() > keep_per_chunk * 2 {
                            out.best.sort_by(|a, b| a.0.total_cmp(&b.0));
                            out.best.truncate(keep_per_chunk);
                        }
                    }
                }
            }
            out.best.sort_by(|a, b| a.0.total_cmp(&b.0));
            out.best.truncate(keep_per_chunk);
            out
        })
        .collect();

    // running infima in chunk order, recorded at geometric checkpoints
    let mut q_trace = Vec::new();
    let mut r_trace = Vec::new();
    let mut seen = 0_u64;
    let mut next_mark = CHUNK;
    let mut run_q = f64::INFINITY;
    let mut run_r = f64::INFINITY;
    for ch in &chunks {
        seen += ch.pairs;
        run_q = run_q.min(ch.min_q);
        run_r = run_r.min(ch.min_r);
        if seen >= next_mark || seen == budget {
            q_trace.push(TracePoint { samples: seen, running_inf: run_q });
            r_trace.push(TracePoint { samples: seen, running_inf: run_r });
            next_mark = (next_mark * 2).max(seen + 1);
        }
    }
    (chunks, q_trace, r_trace)
}

/// Standard Nelder–Mead on an objective that may return `+inf` for invalid
/// parameters. Returns the best vertex and its value.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    scale: f64,
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64) {
    let d = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..d {
        let mut v = start.to_vec();
        v[i] += scale * (1.0 + v[i].abs());
        let fv = f(&v);
        simplex.push((v, fv));
    }
    let centroid = |sx: &[(Vec<f64>, f64)]| -> Vec<f64> {
        let mut c = vec![0.0; d];
        for (v, _) in sx.iter().take(d) {
            for (ck, vk) in c.iter_mut().zip(v) {
                *ck += vk / d as f64;
            }
        }
        c
    };
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diam: f64 = simplex[1..]
            .iter()
            .map(|(v, _)| crate::geometry::dist(v, &simplex[0].0))
            .fold(0.0, f64::max);
        if diam < tol * (1.0 + crate::geometry::norm(&simplex[0].0)) {
            break;
        }
        let c = centroid(&simplex);
        let worst = simplex[d].clone();
        let reflect: Vec<f64> =
            c.iter().zip(&worst.0).map(|(ck, wk)| ck + (ck - wk)).collect();
        let fr = f(&reflect);
        if fr < simplex[0].1 {
            let expand: Vec<f64> =
                c.iter().zip(&worst.0).map(|(ck, wk)| ck + 2.0 * (ck - wk)).collect();
            let fe = f(&expand);
            simplex[d] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (reflect, fr);
        } else {
            let contract: Vec<f64> =
                c.iter().zip(&worst.0).map(|(ck, wk)| ck + 0.5 * (wk - ck)).collect();
            let fc = f(&contract);
            if fc < simplex[d].1 {
                simplex[d] = (contract, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = best
                        .iter()
                        .zip(&entry.0)
                        .map(|(bk, vk)| bk + 0.5 * (vk - bk))
                        .collect();
                    let fv = f(&v);
                    *entry = (v, fv);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Which {
    Q,
    R,
}

fn estimate(domain: &Domain, budget: u64, seed: u64, which: Which) -> Result<CharacteristicReport> {
    if budget < 1000 {
        return Err(Error::InvalidParameter("budget must be >= 1000".into()));
    }
    // 1-d intervals are exact: one boundary pair
    if let DomainKind::Box { lo, hi } = domain.kind() {
        if domain.dim() == 1 {
            let w = Point::from(vec![lo[0]]);
            let z = Point::from(vec![hi[0]]);
            return Ok(CharacteristicReport {
                domain_id: domain.id_string(),
                q_hat: 1.0,
                r_hat: 1.0,
                argmin_pair: (w, z),
                samples: 1,
                skipped_pairs: 0,
                refinement_trace: vec![TracePoint { samples: 1, running_inf: 1.0 }],
                classification: Classification::Inconclusive,
                threshold: 0.0,
                truncation_window: None,
            });
        }
    }
    if domain.chart_dim().is_none() {
        return Err(Error::Unsupported(format!(
            "{} has no boundary chart for pair estimation",
            domain.id_string()
        )));
    }

    let window = default_window(domain);
    match (window, which) {
        // unbounded domains: double the truncation until the R estimate
        // settles within 5%
        (Some(w0), Which::R) => {
            let mut window = w0;
            let mut report = estimate_at_window(domain, budget, seed, window)?;
            for _ in 0..3 {
                let next = estimate_at_window(domain, budget, seed ^ 0xabcd, window * 2.0)?;
                let change = (next.r_hat - report.r_hat).abs() / report.r_hat.max(1e-300);
                window *= 2.0;
                report = next;
                if change < 0.05 {
                    break;
                }
            }
            Ok(report)
        }
        (w, _) => estimate_at_window(domain, budget, seed, w.unwrap_or(1.0)),
    }
}

fn estimate_at_window(
    domain: &Domain,
    budget: u64,
    seed: u64,
    window: f64,
) -> Result<CharacteristicReport> {
    let keep = ((budget / 100) as usize / (budget.div_ceil(CHUNK) as usize).max(1)).clamp(2, 64);
    let (chunks, q_trace, mut r_trace) = scan(domain, budget, seed, window, keep);

    let mut skipped = 0;
    let mut min_q = f64::INFINITY;
    let mut min_r = f64::INFINITY;
    let mut argmin_q: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut argmin_r: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    for ch in chunks {
        skipped += ch.skipped;
        if ch.min_q < min_q {
            min_q = ch.min_q;
            argmin_q = ch.argmin_q;
        }
        if ch.min_r < min_r {
            min_r = ch.min_r;
            argmin_r = ch.argmin_r;
        }
        candidates.extend(ch.best);
    }
    if argmin_q.is_none() {
        return Err(Error::InvalidParameter(
            "no admissible boundary pairs (all degenerate)".into(),
        ));
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    candidates.truncate(MAX_REFINE_STARTS.min((budget / 100).max(4) as usize));

    let k = domain.chart_dim().expect("checked above");
    let objective = |which: Which| {
        move |params: &[f64]| -> f64 {
            let (pw, pz) = params.split_at(k);
            match pair_values(domain, pw, pz) {
                Some((q, r)) => {
                    if which == Which::Q {
                        q
                    } else {
                        r
                    }
                }
                None => f64::INFINITY,
            }
        }
    };

    // multi-start simplex refinement around the best samples
    let refine = |which: Which, seed_best: f64| -> f64 {
        let obj = objective(which);
        let refined = candidates
            .par_iter()
            .map(|(_, start)| nelder_mead(&obj, start, 0.05, 250, 1e-10).1)
            .reduce(|| f64::INFINITY, f64::min);
        refined.min(seed_best)
    };
    let q_ref = refine(Which::Q, min_q);
    let r_ref = refine(Which::R, min_r);

    // cross-evaluate so q_hat <= r_hat holds on the shared sample set
    let obj_q = objective(Which::Q);
    let q_cross = argmin_r
        .as_ref()
        .map(|(pw, pz)| {
            let mut cat = pw.clone();
            cat.extend_from_slice(pz);
            obj_q(&cat)
        })
        .unwrap_or(f64::INFINITY);
    let q_hat = q_ref.min(q_cross);
    let r_hat = r_ref.max(q_hat);

    let (pw, pz) = argmin_q.expect("present");
    let w = domain.boundary_from_chart(&pw).expect("argmin came from a valid pair");
    let z = domain.boundary_from_chart(&pz).expect("argmin came from a valid pair");

    let mut trace = q_trace;
    if let Some(last) = trace.last().copied() {
        if q_hat < last.running_inf {
            trace.push(TracePoint { samples: last.samples, running_inf: q_hat });
        }
    }
    if let Some(last) = r_trace.last().copied() {
        if r_hat < last.running_inf {
            r_trace.push(TracePoint { samples: last.samples, running_inf: r_hat });
        }
    }

    Ok(CharacteristicReport {
        domain_id: domain.id_string(),
        q_hat,
        r_hat,
        argmin_pair: (w, z),
        samples: budget,
        skipped_pairs: skipped,
        refinement_trace: trace,
        classification: Classification::Inconclusive,
        threshold: 0.0,
        truncation_window: if domain.bounded() { None } else { Some(window) },
    })
}

/// Estimates the midpoint-ratio infimum (the Q characteristic).
/// Non-strictly-convex domains are estimated all the same; the
/// classification step flags them.
pub fn qd_estimate(domain: &Domain, budget: u64, seed: u64) -> Result<CharacteristicReport> {
    estimate(domain, budget, seed, Which::Q)
}

/// Estimates the relaxed segment characteristic (the R characteristic),
/// with truncation-doubling stabilization on unbounded domains.
pub fn rd_estimate(domain: &Domain, budget: u64, seed: u64) -> Result<CharacteristicReport> {
    estimate(domain, budget, seed, Which::R)
}

/// Default positivity threshold for classification.
pub const DEFAULT_THRESHOLD: f64 = 0.02;
/// Relative change regarded as stable when the budget grows 4x.
const STABLE_REL_CHANGE: f64 = 0.05;

/// Classifies a domain from reports at increasing budgets.
///
/// The positive classes require strict convexity; `q` additionally requires
/// boundedness (an unbounded domain has vanishing midpoint-ratio infimum).
/// A refinement trace still falling geometrically at the largest budget
/// reads as "no positive floor": `Neither`.
pub fn classify(
    domain: &Domain,
    threshold: f64,
    reports: &[CharacteristicReport],
) -> Result<Classification> {
    if reports.len() < 2 {
        return Err(Error::InvalidParameter("classification needs >= 2 budgets".into()));
    }
    let id = domain.id_string();
    if reports.iter().any(|r| r.domain_id != id) {
        return Err(Error::InvalidParameter("reports describe different domains".into()));
    }
    let mut sorted: Vec<&CharacteristicReport> = reports.iter().collect();
    sorted.sort_by_key(|r| r.samples);
    let lo = sorted[sorted.len() - 2];
    let hi = sorted[sorted.len() - 1];

    let stable = |a: f64, b: f64| (a - b).abs() <= STABLE_REL_CHANGE * a.abs().max(1e-300);

    if !domain.strictly_convex() {
        return Ok(Classification::Neither);
    }
    if domain.bounded() && hi.q_hat > threshold && stable(lo.q_hat, hi.q_hat) {
        return Ok(Classification::SQ);
    }
    if domain.inner_ball_radius() > 0.0 && hi.r_hat > threshold && stable(lo.r_hat, hi.r_hat) {
        return Ok(Classification::SR);
    }
    // geometric decrease at the tail of the biggest trace: no floor in sight
    let tr = &hi.refinement_trace;
    if tr.len() >= 3 {
        let a = tr[tr.len() - 3].running_inf;
        let b = tr[tr.len() - 2].running_inf;
        let c = tr[tr.len() - 1].running_inf;
        if c < 0.9 * b && b < 0.9 * a {
            return Ok(Classification::Neither);
        }
    }
    if hi.q_hat <= threshold && hi.r_hat <= threshold {
        return Ok(Classification::Neither);
    }
    Ok(Classification::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn profile_ball_antipodal_closed_form() {
        // delta_D = 1 - |1 - 2a|, delta_Hw = 2a: ratio 1 for a <= 1/2,
        // (1-a)/a beyond; at a = 0.75 the value is 1/3
        let ball = Domain::unit_ball(2).unwrap();
        let w = pt(&[1.0, 0.0]);
        let z = pt(&[-1.0, 0.0]);
        let vals = ratio_profile(&ball, &w, &z, 4).unwrap();
        assert_eq!(vals.len(), 3);
        assert!((vals[0] - 1.0).abs() < 1e-9);
        assert!((vals[1] - 1.0).abs() < 1e-9);
        assert!((vals[2] - 1.0 / 3.0).abs() < 1e-9);

        // endpoint errors
        assert!(ratio_profile(&ball, &w, &w, 4).is_err());
        assert!(ratio_profile(&ball, &pt(&[0.5, 0.0]), &z, 4).is_err());
    }

    #[test]
    fn profile_non_increasing_across_catalog() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let domains = [
            Domain::unit_ball(3).unwrap(),
            Domain::box_domain(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap(),
            Domain::stadium(),
            Domain::ellipse(2.0, 1.0).unwrap(),
            Domain::power(1.0, 2.0, 2).unwrap(),
            Domain::half_capsule(1.0, 3.0, 2).unwrap(),
        ];
        for dom in &domains {
            let mut tested = 0;
            while tested < 100 {
                let w = dom.sample_boundary(&mut rng, 5.0);
                let z = dom.sample_boundary(&mut rng, 5.0);
                if w.dist(&z) < 1e-9 || dom.support_plane(w.coords()).is_err() {
                    continue;
                }
                let vals = match ratio_profile(dom, &w, &z, 64) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                for win in vals.windows(2) {
                    assert!(
                        win[1] <= win[0] + 1e-8,
                        "{}: ratio increased {} -> {}",
                        dom.id_string(),
                        win[0],
                        win[1]
                    );
                }
                tested += 1;
            }
        }
    }

    #[test]
    fn interval_is_exact() {
        let iv = Domain::interval(0.0, 1.0).unwrap();
        let rep = qd_estimate(&iv, 1000, 1).unwrap();
        assert_eq!(rep.q_hat, 1.0);
        assert_eq!(rep.r_hat, 1.0);
        assert_eq!(rep.samples, 1);
        // budget validation
        assert!(qd_estimate(&iv, 10, 1).is_err());
    }

    #[test]
    fn ball_q_converges_to_half() {
        let ball = Domain::unit_ball(2).unwrap();
        let rep = qd_estimate(&ball, 20_000, 7).unwrap();
        // the infimum 1/2 is approached in the nearly-degenerate limit, where
        // boundary-distance cancellation leaves ~3e-4 of noise; the contract
        // band is [0.497, 0.503]
        assert!(
            rep.q_hat >= 0.497 && rep.q_hat <= 0.503,
            "q_hat = {} (analytic value 1/2)",
            rep.q_hat
        );
        assert!(rep.q_hat <= rep.r_hat + 1e-9);
        // trace is non-increasing
        for win in rep.refinement_trace.windows(2) {
            assert!(win[1].running_inf <= win[0].running_inf + 1e-15);
        }
    }

    #[test]
    fn stadium_q_collapses() {
        let stadium = Domain::stadium();
        let rep = qd_estimate(&stadium, 20_000, 11).unwrap();
        assert!(rep.q_hat < 0.05, "q_hat = {}", rep.q_hat);
    }

    #[test]
    fn q_scale_invariant_on_balls() {
        let ball = Domain::unit_ball(2).unwrap();
        let scaled = ball.scaled(3.0).unwrap();
        let a = qd_estimate(&ball, 8_000, 3).unwrap();
        let b = qd_estimate(&scaled, 8_000, 3).unwrap();
        assert!((a.q_hat - b.q_hat).abs() < 2e-3, "{} vs {}", a.q_hat, b.q_hat);
    }

    #[test]
    fn power_domain_r_positive_q_small() {
        let power = Domain::power(1.0, 2.0, 2).unwrap();
        let rep = rd_estimate(&power, 8_000, 5).unwrap();
        assert!(rep.r_hat > 0.02, "r_hat = {}", rep.r_hat);
        assert!(rep.truncation_window.is_some());
        assert!(rep.q_hat <= rep.r_hat + 1e-9);
    }

    #[test]
    fn classify_catalog_examples() {
        let ball = Domain::unit_ball(2).unwrap();
        let reports = [
            qd_estimate(&ball, 4_000, 1).unwrap(),
            qd_estimate(&ball, 16_000, 2).unwrap(),
        ];
        assert_eq!(classify(&ball, DEFAULT_THRESHOLD, &reports).unwrap(), Classification::SQ);

        let stadium = Domain::stadium();
        let reports = [
            qd_estimate(&stadium, 4_000, 1).unwrap(),
            qd_estimate(&stadium, 16_000, 2).unwrap(),
        ];
        assert_eq!(
            classify(&stadium, DEFAULT_THRESHOLD, &reports).unwrap(),
            Classification::Neither
        );

        let power = Domain::power(1.0, 2.0, 2).unwrap();
        let reports =
            [rd_estimate(&power, 4_000, 1).unwrap(), rd_estimate(&power, 16_000, 2).unwrap()];
        // unbounded: never SQ, but R-stable
        assert_eq!(classify(&power, DEFAULT_THRESHOLD, &reports).unwrap(), Classification::SR);

        // mixed domains are rejected
        let bad = [reports[0].clone(), qd_estimate(&ball, 4_000, 1).unwrap()];
        assert!(classify(&power, DEFAULT_THRESHOLD, &bad).is_err());
    }

    #[test]
    fn power_local_ratio_floor() {
        // pairs with close graph coordinates keep the midpoint ratio above a
        // positive floor; record the observed floor
        let power = Domain::power(1.0, 2.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut floor = f64::INFINITY;
        let mut tested = 0;
        while tested < 2000 {
            let base: f64 = 4.0 * rng.gen::<f64>() + 1e-3;
            let delta: f64 = (rng.gen::<f64>() - 0.5) * base * 0.9;
            let (uw, uz) = (base, base + delta);
            if (uw - uz).abs() >= 0.5 * uw.abs() || (uw - uz).abs() < 1e-9 {
                continue;
            }
            let (q, _) = match pair_values(&power, &[uw], &[uz]) {
                Some(v) => v,
                None => continue,
            };
            floor = floor.min(q);
            tested += 1;
        }
        assert!(floor > 0.05, "local ratio floor {floor}");
        println!("power(1,2,2) local midpoint-ratio floor: {floor:.4}");
    }

    #[test]
    fn lemma_dh_dd_comparability_on_ball() {
        // delta_D(mid) <= delta_Hx(mid) <= (3/q) delta_D(mid) for sampled
        // interior pairs of an SQ domain
        let ball = Domain::unit_ball(2).unwrap();
        let q = qd_estimate(&ball, 8_000, 13).unwrap().q_hat;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..2000 {
            let x = ball.sample_interior(&mut rng, 2.0);
            let y = ball.sample_interior(&mut rng, 2.0);
            let mid = x.midpoint(&y);
            let h = ball.supporting_halfspace(&x).unwrap();
            let dd = ball.dist_to_boundary(&mid).unwrap();
            let dh = h.signed_dist(&mid);
            assert!(dd <= dh + 1e-9);
            assert!(dh <= (3.0 / q) * dd + 1e-9, "dh={dh} dd={dd} q={q}");
        }
    }

    use rand::Rng;
    use rand_chacha::ChaCha8Rng;
}
