//! Named experiment presets, each reproducing one of the worked example
//! configurations at desk scale with explicit seeds and declared budgets.

use std::path::Path;

use rand_distr::StandardNormal;
use rand::Rng;

use crate::bounds::{lower_bound_improved, upper_bound_main};
use crate::characteristics::{qd_estimate, rd_estimate};
use crate::error::Result;
use crate::geometry::{Domain, DomainSpec, HalfSpace, Point};
use crate::kernels::{gauss_kernel, min1, ReferenceKernel};
use crate::oracle::{bridge_survival, ck_prop_check, ck_residual, mc_kernel, CkProp};

use super::{
    emit_report, fold_max, fold_min, run_experiment, stream_rng, uniform_in, ExperimentSpec,
    OracleBudget, Outputs, PairPolicy, Report, Series, Summary,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    BallSharpness,
    StadiumRegimes,
    PowerSr,
    EllipseSq,
    HalfcapsuleS1l,
    CkSuite,
}

impl Preset {
    pub fn from_name(name: &str) -> Option<Preset> {
        match name {
            "ball-sharpness" => Some(Preset::BallSharpness),
            "stadium-regimes" => Some(Preset::StadiumRegimes),
            "power-sr" => Some(Preset::PowerSr),
            "ellipse-sq" => Some(Preset::EllipseSq),
            "halfcapsule-s1l" => Some(Preset::HalfcapsuleS1l),
            "ck-suite" => Some(Preset::CkSuite),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::BallSharpness => "ball-sharpness",
            Preset::StadiumRegimes => "stadium-regimes",
            Preset::PowerSr => "power-sr",
            Preset::EllipseSq => "ellipse-sq",
            Preset::HalfcapsuleS1l => "halfcapsule-s1l",
            Preset::CkSuite => "ck-suite",
        }
    }

    pub const ALL: [Preset; 6] = [
        Preset::BallSharpness,
        Preset::StadiumRegimes,
        Preset::PowerSr,
        Preset::EllipseSq,
        Preset::HalfcapsuleS1l,
        Preset::CkSuite,
    ];
}

fn outputs_for(name: &str, out_dir: Option<&Path>) -> Outputs {
    match out_dir {
        None => Outputs::default(),
        Some(dir) => Outputs {
            json: Some(dir.join(format!("{name}.json"))),
            csv: Some(dir.join(format!("{name}.csv"))),
            plotdata: Some(dir.join(format!("{name}.dat"))),
        },
    }
}

/// Runs a preset with the given master seed, optionally writing reports.
pub fn run_preset(preset: Preset, seed: u64, out_dir: Option<&Path>) -> Result<Report> {
    let mut report = match preset {
        Preset::BallSharpness => ball_sharpness(seed)?,
        Preset::StadiumRegimes => stadium_regimes(seed)?,
        Preset::PowerSr => power_sr(seed)?,
        Preset::EllipseSq => ellipse_sq(seed)?,
        Preset::HalfcapsuleS1l => halfcapsule_s1l(seed)?,
        Preset::CkSuite => ck_suite(seed)?,
    };
    report.summary.finalize();
    emit_report(&report, &outputs_for(preset.name(), out_dir))?;
    Ok(report)
}

/// Ball bracketing grid: 3 times x 4 delta-scale pairs x 5 direction draws.
fn ball_sharpness(seed: u64) -> Result<Report> {
    let spec = ExperimentSpec {
        name: "ball-sharpness".into(),
        domain: DomainSpec::Ball { center: vec![0.0, 0.0], radius: 1.0 },
        times: vec![0.05, 0.1, 0.5],
        pair_policy: PairPolicy::NearBoundary {
            delta_pairs: vec![(0.05, 0.05), (0.2, 0.2), (1.0, 1.0), (0.05, 1.0)],
            pairs_each: 5,
        },
        oracle: OracleBudget { steps: 128, paths: 20_000, seed },
        outputs: Outputs::default(),
        horizon: 1.0,
    };
    let mut report = run_experiment(&spec)?;
    let c = report.summary.entry("calibrated_c").unwrap_or(f64::NAN);
    let big_c = report.summary.entry("calibrated_C").unwrap_or(f64::NAN);
    let spread = report.summary.entry("h_ratio_spread").unwrap_or(f64::NAN);
    report.summary.push_criterion(
        "bracketing_C_over_c_le_100",
        c > 0.0 && big_c / c <= 100.0,
        format!("c = {c:.6e}, C = {big_c:.6e}, C/c = {:.6e}", big_c / c),
    );
    report.summary.push_criterion(
        "h_factor_spread_le_50",
        spread <= 50.0,
        format!("mc/(gauss*h) spread = {spread:.6e}"),
    );
    Ok(report)
}

/// The stadium configuration of the flat-face regime: boundary offsets
/// `delta = t^{1+gamma}/2` at height `1 - t^gamma`, with `x` on the left cap
/// past the square (`x_1 < -1`) and `y` mirrored on the right.
pub(crate) fn stadium_config(gamma: f64, t: f64) -> (Point, Point, f64) {
    let delta = 0.5 * t.powf(1.0 + gamma);
    let sin_psi = (1.0 - t.powf(gamma)) / (1.0 - delta);
    let cos_psi = (1.0 - sin_psi * sin_psi).max(0.0).sqrt();
    let x = Point::from(vec![-1.0 - (1.0 - delta) * cos_psi, (1.0 - delta) * sin_psi]);
    let y = Point::from(vec![1.0 + (1.0 - delta) * cos_psi, (1.0 - delta) * sin_psi]);
    (x, y, delta)
}

/// Deterministic factor displays of the flat-face example plus a best-effort
/// Monte Carlo exponent fit at the moderate configuration.
fn stadium_regimes(seed: u64) -> Result<Report> {
    let stadium = Domain::stadium();
    let gammas = [0.55, 0.6, 0.7];
    let times = [1e-2, 1e-3];
    let columns: Vec<String> = [
        "gamma", "t", "delta", "sq_factor", "sr_factor", "disp_sq", "disp_sr", "ratio_sq",
        "ratio_sr", "sr_over_sq", "t_pow_gm1",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();

    let mut rows = Vec::new();
    let mut series: Vec<Series> = Vec::new();
    for &gamma in &gammas {
        let mut pts = Vec::new();
        for &t in &times {
            let (x, y, delta) = stadium_config(gamma, t);
            let sq = lower_bound_improved(&stadium, t, &x, &y)?.1.factor();
            let sr = upper_bound_main(&stadium, t, &x, &y, 1.0)?.factor();
            let disp_sq = delta * delta / t;
            let disp_sr = delta * delta / t.powf(2.0 - gamma);
            rows.push(vec![
                gamma,
                t,
                delta,
                sq,
                sr,
                disp_sq,
                disp_sr,
                sq / disp_sq,
                sr / disp_sr,
                sr / sq,
                t.powf(gamma - 1.0),
            ]);
            pts.push((t.log10(), (sr / sq).log10()));
        }
        series.push(Series { label: format!("gamma={gamma}"), points: pts });
    }

    let mut summary = Summary::default();
    let row_at = |g: f64, t: f64| {
        rows.iter().find(|r| r[0] == g && r[1] == t).expect("grid row present")
    };
    let r = row_at(0.6, 1e-3);
    summary.push_criterion(
        "gamma06_t1e3_sr_display_within_32",
        r[8] >= 1.0 / 32.0 && r[8] <= 32.0,
        format!("sr_factor / (dd/t^(2-gamma)) = {:.6e}", r[8]),
    );
    summary.push_criterion(
        "gamma06_t1e3_sq_display_within_32",
        r[7] >= 1.0 / 32.0 && r[7] <= 32.0,
        format!("sq_factor / (dd/t) = {:.6e}", r[7]),
    );
    let target = 10.0_f64.powf(1.2);
    summary.push_criterion(
        "gamma06_t1e3_sr_over_sq_theta_t_gm1",
        r[9] >= target / 32.0 && r[9] <= target * 32.0,
        format!("sr/sq = {:.6e}, t^(gamma-1) = {target:.6e}", r[9]),
    );

    // Monte Carlo exponent fit at gamma = 0.55 over t in {10^-1.5, 10^-2};
    // the flat-face regime survival is ~1e-4, so this is best-effort: when
    // the variance budget is insufficient the fit is marked infeasible.
    let gamma = 0.55;
    let t_fit = [10f64.powf(-1.5), 1e-2];
    let paths = [200_000u64, 600_000u64];
    let mut v = [0.0_f64; 2];
    let mut rel = [0.0_f64; 2];
    let mut feasible = true;
    for (i, (&t, &p)) in t_fit.iter().zip(&paths).enumerate() {
        let (x, y, delta) = stadium_config(gamma, t);
        let est = bridge_survival(&stadium, t, &x, &y, 512, p, seed ^ (i as u64 + 1))?;
        summary.entries.push((format!("survival_t{i}"), est.mean));
        summary.entries.push((format!("survival_t{i}_stderr"), est.stderr));
        v[i] = est.mean / (delta * delta);
        rel[i] = est.stderr / est.mean.max(1e-300);
        if est.mean < 6.0 * est.stderr {
            feasible = false;
        }
    }
    let slope = (v[1].ln() - v[0].ln()) / (t_fit[1].ln() - t_fit[0].ln());
    let target_slope = -3.0 * (1.0 - gamma);
    summary.entries.push(("mc_slope".into(), slope));
    summary.entries.push(("mc_slope_target".into(), target_slope));
    summary.entries.push(("mc_feasible".into(), if feasible { 1.0 } else { 0.0 }));
    summary.push_criterion(
        "mc_exponent_fit_or_infeasible",
        !feasible || (slope - target_slope).abs() <= 0.5,
        if feasible {
            format!("slope = {slope:.4}, target {target_slope:.4} +/- 0.5")
        } else {
            format!(
                "marked infeasible: relative stderr {:.3}/{:.3} exceeds the variance budget",
                rel[0], rel[1]
            )
        },
    );

    Ok(Report {
        name: "stadium-regimes".into(),
        domain_id: Some(stadium.id_string()),
        seed,
        budget_seconds: 240.0,
        columns,
        rows,
        summary,
        plot_series: series,
    })
}

/// Characteristic-estimate stability preset for one domain; shared by the
/// power-domain and ellipse presets.
fn characteristic_stability(
    name: &str,
    domain: Domain,
    budgets: [u64; 2],
    seed: u64,
    use_r: bool,
    threshold: f64,
) -> Result<Report> {
    let columns: Vec<String> =
        ["budget", "q_hat", "r_hat", "window", "skipped"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    let mut vals = Vec::new();
    for (i, &budget) in budgets.iter().enumerate() {
        let rep = if use_r {
            rd_estimate(&domain, budget, seed ^ i as u64)?
        } else {
            qd_estimate(&domain, budget, seed ^ i as u64)?
        };
        vals.push(if use_r { rep.r_hat } else { rep.q_hat });
        rows.push(vec![
            budget as f64,
            rep.q_hat,
            rep.r_hat,
            rep.truncation_window.unwrap_or(f64::NAN),
            rep.skipped_pairs as f64,
        ]);
    }
    let mut summary = Summary::default();
    let which = if use_r { "r" } else { "q" };
    summary.entries.push((format!("{which}_hat"), vals[1]));
    summary.push_criterion(
        &format!("{which}_hat_above_threshold"),
        vals[1] > threshold,
        format!("{which}_hat = {:.6e} > {threshold}", vals[1]),
    );
    summary.push_criterion(
        &format!("{which}_hat_stable_4x_budget"),
        (vals[1] - vals[0]).abs() <= 0.05 * vals[0].abs().max(1e-300),
        format!("{:.6e} -> {:.6e}", vals[0], vals[1]),
    );
    Ok(Report {
        name: name.into(),
        domain_id: Some(domain.id_string()),
        seed,
        budget_seconds: 180.0,
        columns,
        rows,
        summary,
        plot_series: Vec::new(),
    })
}

fn power_sr(seed: u64) -> Result<Report> {
    let domain = Domain::power(1.0, 2.0, 2)?;
    characteristic_stability("power-sr", domain, [20_000, 80_000], seed, true, 0.02)
}

fn ellipse_sq(seed: u64) -> Result<Report> {
    let domain = Domain::ellipse(2.0, 1.0)?;
    let mut report =
        characteristic_stability("ellipse-sq", domain.clone(), [20_000, 80_000], seed, false, 0.1)?;
    // the comparability lemma on sampled interior pairs:
    // delta_D(mid) <= delta_Hx(mid) <= (3/q) delta_D(mid)
    let q = report.summary.entry("q_hat").unwrap_or(f64::NAN);
    let mut rng = stream_rng(seed, 999);
    let mut worst = 0.0_f64;
    let mut ok = true;
    for _ in 0..10_000 {
        let x = domain.sample_interior(&mut rng, 3.0);
        let y = domain.sample_interior(&mut rng, 3.0);
        let mid = x.midpoint(&y);
        let h = domain.supporting_halfspace(&x)?;
        let dd = domain.dist_to_boundary(&mid)?;
        let dh = h.signed_dist(&mid);
        if dd > dh + 1e-9 || dh > (3.0 / q) * dd + 1e-9 {
            ok = false;
        }
        if dd > 0.0 {
            worst = worst.max(dh / dd);
        }
    }
    report.summary.entries.push(("max_dh_over_dd".into(), worst));
    report.summary.push_criterion(
        "lemma_dh_dd_comparability",
        ok,
        format!("max delta_Hx(mid)/delta_D(mid) = {worst:.4} <= 3/q = {:.4}", 3.0 / q),
    );
    Ok(report)
}

/// Half-capsule tube bound: for `J(sqrt(t), 5 sqrt(t))`, `x = (L - sqrt(t),
/// 0)` and cap points `y` with `y_1 <= 0`, the kernel dominates
/// `p * (1 ∧ delta(y) sqrt(t) / s)` for `s <= t` up to a recorded constant.
fn halfcapsule_s1l(seed: u64) -> Result<Report> {
    let t = 0.04_f64;
    let st = t.sqrt();
    let length = 5.0 * st;
    let domain = Domain::half_capsule(st, length, 2)?;
    let x = Point::from(vec![length - st, 0.0]);

    // ten cap positions: five angles x two depths, all with y_1 <= 0
    let mut ys = Vec::new();
    for (i, &frac) in [0.25_f64, 0.6].iter().enumerate() {
        for k in 0..5 {
            let phi = std::f64::consts::PI / 2.0 + std::f64::consts::PI * (k as f64 + 0.5) / 5.0;
            let r = st * (1.0 - frac);
            let y = Point::from(vec![r * phi.cos(), r * phi.sin()]);
            debug_assert!(y[0] <= 0.0);
            ys.push((i * 5 + k, y));
        }
    }

    let columns: Vec<String> =
        ["s", "y_index", "y0", "y1", "delta_y", "gauss", "factor", "mc_mean", "mc_stderr", "ratio"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    let mut rows = Vec::new();
    for (si, s) in [t / 4.0, t / 2.0, t].into_iter().enumerate() {
        for (yi, y) in &ys {
            let delta_y = domain.dist_to_boundary(y)?;
            let g = gauss_kernel(s, &x, y)?;
            let factor = min1(delta_y * st / s);
            let est = mc_kernel(
                &domain,
                s,
                &x,
                y,
                256,
                20_000,
                seed ^ ((si as u64) << 16) ^ *yi as u64,
            )?;
            rows.push(vec![
                s,
                *yi as f64,
                y[0],
                y[1],
                delta_y,
                g,
                factor,
                est.mean,
                est.stderr,
                est.mean / (g * factor),
            ]);
        }
    }

    let mut summary = Summary::default();
    let ratios: Vec<f64> = rows.iter().map(|r| r[9]).collect();
    let min_ratio = fold_min(&ratios);
    let significant = rows.iter().all(|r| r[7] > 3.0 * r[8]);
    summary.entries.push(("min_ratio".into(), min_ratio));
    summary.entries.push(("max_ratio".into(), fold_max(&ratios)));
    summary.push_criterion(
        "tube_bound_ratio_positive",
        min_ratio > 0.0 && significant,
        format!("min mc / (p * (1 ∧ delta sqrt(t)/s)) = {min_ratio:.6e}, all means > 3 stderr: {significant}"),
    );

    Ok(Report {
        name: "halfcapsule-s1l".into(),
        domain_id: Some(domain.id_string()),
        seed,
        budget_seconds: 120.0,
        columns,
        rows,
        summary,
        plot_series: Vec::new(),
    })
}

/// Semigroup verification suite: kernel residuals at 20 random
/// configurations each, 100 concentration-inequality configurations, 50
/// wedge moment-bound configurations.
fn ck_suite(seed: u64) -> Result<Report> {
    let columns: Vec<String> =
        ["group", "index", "value_a", "value_b", "pass"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    let mut summary = Summary::default();
    let tol = 1e-10;

    // group 0..2: Chapman-Kolmogorov residuals for gauss/halfspace/interval
    let mut max_residual = 0.0_f64;
    for (group, which) in ["gauss", "halfspace", "interval"].iter().enumerate() {
        let mut rng = stream_rng(seed, group as u64 + 1);
        for index in 0..20 {
            let t = uniform_in(&mut rng, 0.02, 0.5);
            let alpha = uniform_in(&mut rng, 0.1, 0.9);
            let (kernel, x, y) = match *which {
                "gauss" => {
                    let n = 1 + index % 3;
                    let x: Vec<f64> = (0..n).map(|_| uniform_in(&mut rng, -1.0, 1.0)).collect();
                    let y: Vec<f64> = x
                        .iter()
                        .map(|c| c + uniform_in(&mut rng, -1.0, 1.0) * t.sqrt())
                        .collect();
                    (ReferenceKernel::Gauss { dim: n }, Point::from(x), Point::from(y))
                }
                "halfspace" => {
                    let n = 1 + index % 3;
                    let mut normal: Vec<f64> =
                        (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                    if crate::geometry::norm(&normal) < 1e-6 {
                        normal[0] = 1.0;
                    }
                    let h = HalfSpace::new(normal, uniform_in(&mut rng, -0.5, 0.5))?;
                    let base: Vec<f64> =
                        h.normal().iter().map(|c| c * (h.offset() + 0.0)).collect();
                    let mk = |rng: &mut rand_chacha::ChaCha8Rng, depth: f64| {
                        Point::from(
                            base.iter()
                                .zip(h.normal())
                                .enumerate()
                                .map(|(k, (b, nc))| {
                                    b + depth * nc + 0.3 * t.sqrt() * ((k + 1) as f64)
                                        * (rng.gen::<f64>() - 0.5)
                                })
                                .collect::<Vec<f64>>(),
                        )
                    };
                    let depth_x = uniform_in(&mut rng, 0.1, 2.0) * t.sqrt();
                    let depth_y = uniform_in(&mut rng, 0.1, 2.0) * t.sqrt();
                    let x = mk(&mut rng, depth_x);
                    let y = mk(&mut rng, depth_y);
                    if h.signed_dist(&x) <= 0.0 || h.signed_dist(&y) <= 0.0 {
                        continue;
                    }
                    (ReferenceKernel::HalfSpace(h), x, y)
                }
                _ => {
                    let x = uniform_in(&mut rng, 0.1, 0.9);
                    let y = uniform_in(&mut rng, 0.1, 0.9);
                    (
                        ReferenceKernel::Interval { a: 0.0, b: 1.0 },
                        Point::from(vec![x]),
                        Point::from(vec![y]),
                    )
                }
            };
            let r = ck_residual(&kernel, t, &x, &y, alpha, tol)?;
            max_residual = max_residual.max(r);
            rows.push(vec![group as f64, index as f64, r, 1e-8, (r < 1e-8) as u8 as f64]);
        }
    }
    summary.entries.push(("max_ck_residual".into(), max_residual));
    summary.push_criterion(
        "ck_residuals_below_1e-8",
        max_residual < 1e-8,
        format!("max residual = {max_residual:.3e}"),
    );

    // group 3: concentration lower bound, 100 random configurations
    let mut rng = stream_rng(seed, 11);
    let mut low_pass = 0;
    let mut low_total = 0;
    while low_total < 100 {
        let n = 1 + low_total % 3;
        let t = uniform_in(&mut rng, 0.05, 1.0);
        let alpha = uniform_in(&mut rng, 0.1, 0.9);
        let x: Vec<f64> = (0..n).map(|_| uniform_in(&mut rng, -1.0, 1.0)).collect();
        let y: Vec<f64> =
            x.iter().map(|c| c + uniform_in(&mut rng, -2.0, 2.0) * t.sqrt()).collect();
        let (x, y) = (Point::from(x), Point::from(y));
        let mid = x.lerp(&y, alpha);
        let d = uniform_in(&mut rng, 0.0, 3.0) * t.sqrt();
        let mut dir: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let len = crate::geometry::norm(&dir).max(1e-12);
        dir.iter_mut().for_each(|c| *c *= d / len);
        let a_center =
            Point::from(mid.coords().iter().zip(&dir).map(|(m, o)| m + o).collect::<Vec<f64>>());
        let r = uniform_in(&mut rng, 0.2, 5.0) * t.sqrt();
        let prop = CkProp::CkLow { t, x, y, alpha, r, a_center };
        let res = ck_prop_check(&prop, tol)?;
        if res.pass {
            low_pass += 1;
        }
        rows.push(vec![3.0, low_total as f64, res.lhs, res.rhs, res.pass as u8 as f64]);
        low_total += 1;
    }
    summary.push_criterion(
        "cklow_100_random_configs",
        low_pass == low_total,
        format!("{low_pass}/{low_total} passed"),
    );

    // group 4: wedge moment bound, 50 random configurations with frozen
    // exponent constants
    let exps = [0.0, 0.5, 1.0, 1.5, 2.0];
    let mut rng = stream_rng(seed, 12);
    let mut hh_pass = 0;
    let mut hh_total = 0;
    while hh_total < 50 {
        let t = uniform_in(&mut rng, 0.05, 1.0);
        let ang1 = uniform_in(&mut rng, 0.0, std::f64::consts::TAU);
        let spread = uniform_in(&mut rng, 0.3, 2.8);
        let ang2 = ang1 + spread;
        let h1 = HalfSpace::new(vec![ang1.cos(), ang1.sin()], uniform_in(&mut rng, -0.4, 0.1))?;
        let h2 = HalfSpace::new(vec![ang2.cos(), ang2.sin()], uniform_in(&mut rng, -0.4, 0.1))?;
        let wedge = Domain::wedge(h1.clone(), h2.clone())?;
        let anchor = wedge.interior_anchor();
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            Point::from(
                anchor
                    .coords()
                    .iter()
                    .map(|c| c + uniform_in(rng, -1.5, 1.5) * t.sqrt())
                    .collect::<Vec<f64>>(),
            )
        };
        let (x, y) = (mk(&mut rng), mk(&mut rng));
        let mid = x.midpoint(&y);
        if h1.signed_dist(&mid) < 0.0 || h2.signed_dist(&mid) < 0.0 {
            continue;
        }
        let ae = exps[hh_total % exps.len()];
        let be = exps[(hh_total / exps.len()) % exps.len()];
        let prop = CkProp::CkHh { t, x, y, h1, h2, alpha_exp: ae, beta_exp: be };
        let res = ck_prop_check(&prop, tol)?;
        if res.pass {
            hh_pass += 1;
        }
        rows.push(vec![4.0, hh_total as f64, res.lhs, res.rhs, res.pass as u8 as f64]);
        hh_total += 1;
    }
    summary.push_criterion(
        "ckhh_50_random_configs",
        hh_pass == hh_total,
        format!("{hh_pass}/{hh_total} passed"),
    );

    Ok(Report {
        name: "ck-suite".into(),
        domain_id: None,
        seed,
        budget_seconds: 300.0,
        columns,
        rows,
        summary,
        plot_series: Vec::new(),
    })
}
