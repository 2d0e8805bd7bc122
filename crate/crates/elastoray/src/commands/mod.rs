//! Subcommand drivers. Each returns a [`Report`] whose `failures` list the
//! asserted checks that did not hold.

mod boundary;
mod rays;
mod selftest;
mod validate;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use elastoray_core::boundary::{BoundaryCovector, ModeQuadratic};
use elastoray_core::linalg::tangent_frame;
use elastoray_core::medium::{ClassParams, Medium};
use elastoray_core::sampling::{gamma_delta_covector, SampleRng};
use elastoray_core::{Mode, Vec3};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::{Cli, Command};
use crate::medium_file::load_medium;
use crate::report::{Failures, Report};

/// Samples whose normalized discriminants are this close to zero are
/// redrawn by the sampling commands.
pub const SAMPLE_GLANCING_MARGIN: f64 = 1e-3;

/// Shared state of one invocation.
pub struct Context {
    pub medium: Medium,
    pub params: ClassParams,
    pub digest: String,
    pub seed: u64,
    pub tol: Option<f64>,
    pub csv: Option<PathBuf>,
}

impl Context {
    pub fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn delta(&self, delta: Option<f64>) -> f64 {
        delta.unwrap_or(self.params.delta)
    }
}

/// Output of a driver before the report envelope is added.
pub struct Outcome {
    pub results: Value,
    pub failures: Failures,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        bail!("--{name} must be finite and positive, got {v}");
    }
    Ok(())
}

fn at_least_one(name: &str, n: usize) -> Result<()> {
    if n == 0 {
        bail!("--{name} must be at least 1");
    }
    Ok(())
}

fn nonzero_tau(tau: f64) -> Result<()> {
    if !(tau.is_finite() && tau != 0.0) {
        bail!("--tau must be finite and nonzero, got {tau}");
    }
    Ok(())
}

fn check_delta(delta: Option<f64>) -> Result<()> {
    delta.map_or(Ok(()), |d| positive("delta", d))
}

fn check_args(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Validate(a) => at_least_one("grid", a.grid),
        Command::Classify(a) => {
            at_least_one("fan-n", a.fan_n)?;
            at_least_one("directions", a.directions)?;
            at_least_one("magnitudes", a.magnitudes)?;
            nonzero_tau(a.tau)?;
            check_delta(a.delta)
        }
        Command::Roots(a) => {
            at_least_one("fan-n", a.fan_n)?;
            at_least_one("samples", a.samples)?;
            nonzero_tau(a.tau)?;
            check_delta(a.delta)?;
            if let Some(s) = a.smax {
                positive("smax", s)?;
            }
            if a.ratios
                .as_ref()
                .is_some_and(|r| r.iter().any(|v| !(v.is_finite() && *v >= 0.0)))
            {
                bail!("--ratios must be finite and non-negative");
            }
            Ok(())
        }
        Command::Dn(a) | Command::Frame(a) => {
            at_least_one("fan-n", a.fan_n)?;
            check_delta(a.delta)
        }
        Command::Trace(a) => {
            nonzero_tau(a.tau)?;
            positive("tmax", a.tmax)?;
            if !(0.0..90.0).contains(&a.angle) {
                bail!("--angle must lie in [0, 90) degrees");
            }
            Ok(())
        }
        Command::Lensmap(a) => {
            at_least_one("fan-n", a.fan_n)?;
            nonzero_tau(a.tau)?;
            if !(0.0..90.0).contains(&a.max_angle) {
                bail!("--max-angle must lie in [0, 90) degrees");
            }
            Ok(())
        }
        Command::Distance(a) => {
            if a.fan_n < 2 {
                bail!("--fan-n must be at least 2 for a distance matrix");
            }
            at_least_one("starts", a.starts)
        }
        Command::Recover(a) => {
            at_least_one("fan-n", a.fan_n)?;
            nonzero_tau(a.tau)?;
            positive("tmax", a.tmax)?;
            if !(0.0..90.0).contains(&a.max_angle) {
                bail!("--max-angle must lie in [0, 90) degrees");
            }
            Ok(())
        }
        Command::Selftest(a) => {
            at_least_one("fan-n", a.fan_n)?;
            check_delta(a.delta)
        }
    }
}

fn params_value<T: Serialize>(cli: &Cli, args: &T) -> Result<Value> {
    let mut v = serde_json::to_value(args).context("cannot encode parameters")?;
    if let Value::Object(map) = &mut v {
        map.insert("seed".into(), json!(cli.seed));
        map.insert("tol".into(), json!(cli.tol));
        map.insert(
            "medium".into(),
            json!(cli.medium.as_ref().map(|p| p.display().to_string())),
        );
    }
    Ok(v)
}

/// Parses the medium, runs the subcommand and assembles the report.
pub fn run(cli: &Cli) -> Result<Report> {
    let path: &Path = cli.medium.as_deref().context("--medium <path> is required")?;
    if let Some(t) = cli.tol {
        positive("tol", t)?;
    }
    check_args(&cli.command)?;
    let loaded = load_medium(path)?;
    let ctx = Context {
        medium: loaded.medium,
        params: loaded.params,
        digest: loaded.digest,
        seed: cli.seed,
        tol: cli.tol,
        csv: cli.csv.clone(),
    };
    let (params, outcome) = match &cli.command {
        Command::Validate(a) => (params_value(cli, a)?, validate::validate(&ctx, a)?),
        Command::Classify(a) => (params_value(cli, a)?, boundary::classify(&ctx, a)?),
        Command::Roots(a) => (params_value(cli, a)?, boundary::roots(&ctx, a)?),
        Command::Dn(a) => (params_value(cli, a)?, boundary::dn(&ctx, a)?),
        Command::Frame(a) => (params_value(cli, a)?, boundary::frame(&ctx, a)?),
        Command::Trace(a) => (params_value(cli, a)?, rays::trace(&ctx, a)?),
        Command::Lensmap(a) => (params_value(cli, a)?, rays::lensmap(&ctx, a)?),
        Command::Distance(a) => (params_value(cli, a)?, rays::distance(&ctx, a)?),
        Command::Recover(a) => (params_value(cli, a)?, rays::recover(&ctx, a)?),
        Command::Selftest(a) => (params_value(cli, a)?, selftest::selftest(&ctx, a)?),
    };
    Ok(Report {
        command: cli.command.name().into(),
        medium_digest: ctx.digest.clone(),
        params,
        results: outcome.results,
        failures: outcome.failures.0,
    })
}

/// Boundary point `point`, or the south pole of the domain, with its exterior normal.
fn boundary_point(m: &Medium, point: Option<[f64; 3]>) -> Result<(Vec3, Vec3)> {
    let x = match point {
        Some(p) => Vec3::from(p),
        None => m.domain.boundary_point(&-Vec3::z()),
    };
    let nu = m.domain.require_boundary(&x).context("--point")?;
    Ok((x, nu))
}

/// Unit launch direction at angle `angle` from `−ν` in the plane at `azimuth`.
fn launch_direction(nu: &Vec3, angle_deg: f64, azimuth_deg: f64) -> Vec3 {
    let (e1, e2) = tangent_frame(nu);
    let (a, b) = (angle_deg.to_radians(), azimuth_deg.to_radians());
    -nu * a.cos() + (e1 * b.cos() + e2 * b.sin()) * a.sin()
}

fn glancing_margin(m: &Medium, g: &BoundaryCovector) -> f64 {
    let c = m.coefficients(&g.x());
    Mode::BOTH
        .iter()
        .map(|&mode| ModeQuadratic::new(&c, mode, g).normalized_disc().abs())
        .fold(f64::INFINITY, f64::min)
}

/// `Γ_δ` covector away from both glancing sets, with `ξ_| ≠ 0`.
fn non_glancing_sample(m: &Medium, delta: f64, rng: &mut SampleRng) -> BoundaryCovector {
    loop {
        let g = gamma_delta_covector(&m.domain, delta, rng);
        if glancing_margin(m, &g) >= SAMPLE_GLANCING_MARGIN && g.xi().norm() > 1e-3 * g.frequency() {
            return g;
        }
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot create CSV file {}", path.display()))
}

fn covector_fields(g: &BoundaryCovector) -> [String; 8] {
    let (x, xi) = (g.x(), g.xi());
    [g.t(), x.x, x.y, x.z, g.tau(), xi.x, xi.y, xi.z].map(|v| v.to_string())
}

const COVECTOR_HEADER: [&str; 8] = ["t", "x1", "x2", "x3", "tau", "xi1", "xi2", "xi3"];
