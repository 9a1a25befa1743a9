//! Command-line surface: evaluate bounds, run the Monte Carlo oracle,
//! estimate characteristics, execute experiments, verify invariants.
//!
//! Exit codes: 0 success, 1 check/experiment failure, 2 usage error.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bounds::{
    lower_bound_basic, lower_bound_improved, two_sided_factor, upper_bound_main,
    upper_bound_midpoint, TwoSidedVariant,
};
use crate::characteristics::{qd_estimate, rd_estimate};
use crate::error::Result;
use crate::geometry::{make_domain, Domain, HalfSpace, Point};
use crate::kernels::gauss_kernel;
use crate::oracle::bridge_survival;

use super::{run_preset, run_suite, ExperimentSpec, Preset, Suite};

#[derive(Parser)]
#[command(
    name = "convexheat",
    version,
    about = "Dirichlet heat-kernel bounds on convex domains: evaluation, Monte Carlo, diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct PairArgs {
    /// Domain: a catalog name (ball, interval, square, stadium, ellipse,
    /// power, halfspace, halfline, halfcapsule, wedge), inline JSON, or a
    /// path to a JSON spec
    #[arg(long)]
    domain: String,
    /// Time argument
    #[arg(long)]
    t: f64,
    /// First point, comma-separated coordinates
    #[arg(long)]
    x: String,
    /// Second point, comma-separated coordinates
    #[arg(long)]
    y: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a bound breakdown for a (domain, bound kind, t, x, y)
    Eval {
        #[command(flatten)]
        pair: PairArgs,
        /// Bound kind: upper-main, upper-midpoint, lower-basic,
        /// lower-improved, two-sided-sq, two-sided-sr
        #[arg(long)]
        bound: String,
        /// Horizon T of the upper bounds
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
    },
    /// Estimate the Dirichlet kernel by bridge Monte Carlo
    Mc {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 256)]
        steps: u32,
        #[arg(long, default_value_t = 100_000)]
        paths: u64,
        /// Master seed (reruns with the same seed reproduce bitwise)
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Estimate the Q/R boundary-pair characteristics
    Characteristic {
        #[arg(long)]
        domain: String,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Which characteristic: q, r, or both
        #[arg(long, default_value = "both")]
        which: String,
    },
    /// Run a named preset or an experiment spec file
    Experiment {
        /// Preset name: ball-sharpness, stadium-regimes, power-sr,
        /// ellipse-sq, halfcapsule-s1l, ck-suite
        #[arg(long, conflicts_with = "spec")]
        preset: Option<String>,
        /// JSON experiment spec file
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Directory for preset outputs (json/csv/plotdata)
        #[arg(long, default_value = "reports")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run an invariant suite: geometry, kernels, bounds, ck, or all
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn parse_point(text: &str) -> Result<Point> {
    let coords: std::result::Result<Vec<f64>, _> =
        text.split(',').map(|c| c.trim().parse::<f64>()).collect();
    match coords {
        Ok(v) if !v.is_empty() => Point::new(v),
        _ => Err(crate::error::Error::InvalidParameter(format!(
            "cannot parse point from {text:?}"
        ))),
    }
}

fn parse_domain(text: &str) -> Result<Domain> {
    match text {
        "ball" => Domain::unit_ball(2),
        "ball3" => Domain::unit_ball(3),
        "interval" => Domain::interval(0.0, 1.0),
        "square" => Domain::box_domain(vec![-1.0, -1.0], vec![1.0, 1.0]),
        "stadium" => Ok(Domain::stadium()),
        "ellipse" => Domain::ellipse(2.0, 1.0),
        "power" => Domain::power(1.0, 2.0, 2),
        "halfspace" => Domain::halfspace(HalfSpace::new(vec![0.0, 1.0], 0.0)?),
        "halfline" => Domain::halfspace(HalfSpace::new(vec![1.0], 0.0)?),
        "halfcapsule" | "half-capsule" => Domain::half_capsule(1.0, 3.0, 2),
        "wedge" => Domain::wedge(
            HalfSpace::new(vec![1.0, 0.0], 0.0)?,
            HalfSpace::new(vec![0.0, 1.0], 0.0)?,
        ),
        _ if text.trim_start().starts_with('{') => make_domain(text),
        path => {
            let body = std::fs::read_to_string(path)?;
            make_domain(&body)
        }
    }
}

#[derive(Serialize)]
struct McOutput {
    gauss: f64,
    survival_mean: f64,
    survival_stderr: f64,
    kernel_mean: f64,
    kernel_stderr: f64,
    paths: u64,
    steps: u32,
    seed: u64,
    bias_note: crate::oracle::BiasNote,
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Eval { pair, bound, horizon } => {
            let domain = parse_domain(&pair.domain)?;
            let x = parse_point(&pair.x)?;
            let y = parse_point(&pair.y)?;
            let t = pair.t;
            let json = match bound.as_str() {
                "upper-main" => {
                    serde_json::to_string_pretty(&upper_bound_main(&domain, t, &x, &y, horizon)?)?
                }
                "upper-midpoint" => serde_json::to_string_pretty(&upper_bound_midpoint(
                    &domain, t, &x, &y, horizon,
                )?)?,
                "lower-basic" => {
                    serde_json::to_string_pretty(&lower_bound_basic(&domain, t, &x, &y)?)?
                }
                "lower-improved" => {
                    let (p, s) = lower_bound_improved(&domain, t, &x, &y)?;
                    serde_json::to_string_pretty(&vec![p, s])?
                }
                "two-sided-sq" => serde_json::to_string_pretty(&two_sided_factor(
                    &domain,
                    t,
                    &x,
                    &y,
                    TwoSidedVariant::Sq,
                )?)?,
                "two-sided-sr" => serde_json::to_string_pretty(&two_sided_factor(
                    &domain,
                    t,
                    &x,
                    &y,
                    TwoSidedVariant::Sr,
                )?)?,
                other => {
                    eprintln!("unknown bound kind {other:?}; see --help");
                    return Ok(2);
                }
            };
            println!("{json}");
            Ok(0)
        }
        Cmd::Mc { pair, steps, paths, seed } => {
            let domain = parse_domain(&pair.domain)?;
            let x = parse_point(&pair.x)?;
            let y = parse_point(&pair.y)?;
            let survival = bridge_survival(&domain, pair.t, &x, &y, steps, paths, seed)?;
            let g = gauss_kernel(pair.t, &x, &y)?;
            let out = McOutput {
                gauss: g,
                survival_mean: survival.mean,
                survival_stderr: survival.stderr,
                kernel_mean: g * survival.mean,
                kernel_stderr: g * survival.stderr,
                paths: survival.paths,
                steps: survival.steps,
                seed: survival.seed,
                bias_note: survival.bias_note,
            };
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(0)
        }
        Cmd::Characteristic { domain, budget, seed, which } => {
            let domain = parse_domain(&domain)?;
            let out = match which.as_str() {
                "q" => serde_json::to_string_pretty(&qd_estimate(&domain, budget, seed)?)?,
                "r" => serde_json::to_string_pretty(&rd_estimate(&domain, budget, seed)?)?,
                "both" => {
                    let q = qd_estimate(&domain, budget, seed)?;
                    let r = rd_estimate(&domain, budget, seed)?;
                    serde_json::to_string_pretty(&vec![q, r])?
                }
                other => {
                    eprintln!("unknown characteristic {other:?}; expected q, r, or both");
                    return Ok(2);
                }
            };
            println!("{out}");
            Ok(0)
        }
        Cmd::Experiment { preset, spec, out_dir, seed } => {
            let started = Instant::now();
            let report = match (preset, spec) {
                (Some(name), None) => match Preset::from_name(&name) {
                    Some(p) => run_preset(p, seed, Some(&out_dir))?,
                    None => {
                        eprintln!(
                            "unknown preset {name:?}; known: ball-sharpness, stadium-regimes, \
                             power-sr, ellipse-sq, halfcapsule-s1l, ck-suite"
                        );
                        return Ok(2);
                    }
                },
                (None, Some(path)) => {
                    let body = std::fs::read_to_string(&path)?;
                    let spec: ExperimentSpec = serde_json::from_str(&body)?;
                    super::run_experiment(&spec)?
                }
                _ => {
                    eprintln!("experiment needs exactly one of --preset or --spec");
                    return Ok(2);
                }
            };
            let elapsed = started.elapsed().as_secs_f64();
            eprintln!(
                "experiment {} finished in {elapsed:.1}s (declared budget {}s)",
                report.name, report.budget_seconds
            );
            println!("{}", serde_json::to_string_pretty(&report.summary)?);
            Ok(if report.summary.pass { 0 } else { 1 })
        }
        Cmd::Verify { suite, seed } => {
            let suite = match Suite::from_name(&suite) {
                Some(s) => s,
                None => {
                    eprintln!("unknown suite {suite:?}; known: geometry, kernels, bounds, ck, all");
                    return Ok(2);
                }
            };
            let results = run_suite(suite, seed)?;
            let mut ok = true;
            for r in &results {
                println!("{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
                ok &= r.pass;
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own usage text; --help/--version are successes
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(crate::error::Error::InvalidParameter(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_ball_center_exits_zero() {
        let code = cli([
            "convexheat", "eval", "--domain", "ball", "--bound", "upper-main", "--t", "1", "--x",
            "0,0", "--y", "0,0",
        ]);
        assert_eq!(code, 0);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(cli(["convexheat", "nonsense"]), 2);
        assert_eq!(
            cli([
                "convexheat", "eval", "--domain", "ball", "--bound", "no-such", "--t", "1", "--x",
                "0,0", "--y", "0,0",
            ]),
            2
        );
        assert_eq!(
            cli(["convexheat", "experiment", "--preset", "no-such-preset"]),
            2
        );
        assert_eq!(cli(["convexheat", "verify", "--suite", "bogus"]), 2);
        // malformed point
        assert_eq!(
            cli([
                "convexheat", "eval", "--domain", "ball", "--bound", "upper-main", "--t", "1",
                "--x", "zero", "--y", "0,0",
            ]),
            2
        );
    }

    #[test]
    fn mc_small_run_succeeds() {
        let code = cli([
            "convexheat",
            "mc",
            "--domain",
            "interval",
            "--t",
            "0.1",
            "--x",
            "0.3",
            "--y",
            "0.7",
            "--steps",
            "16",
            "--paths",
            "500",
            "--seed",
            "7",
        ]);
        assert_eq!(code, 0);
    }

    #[test]
    fn verify_kernels_suite_passes() {
        assert_eq!(cli(["convexheat", "verify", "--suite", "kernels"]), 0);
    }

    #[test]
    fn inline_json_domain_parses() {
        let code = cli([
            "convexheat",
            "eval",
            "--domain",
            r#"{"kind":"ball","params":{"center":[0,0],"radius":2}}"#,
            "--bound",
            "lower-basic",
            "--t",
            "0.5",
            "--x",
            "0,0",
            "--y",
            "0.5,0",
        ]);
        assert_eq!(code, 0);
    }
}
