//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use elastoray_core::Mode;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "elastoray",
    version,
    about = "Symbol and ray experiments for stressed elastic media"
)]
pub struct Cli {
    /// Medium description file (JSON).
    #[arg(long, global = true)]
    pub medium: Option<PathBuf>,
    /// Report path; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV export path for plot data.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Seed for all sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the command's asserted tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Class membership, divergence and positivity on a grid.
    Validate(ValidateArgs),
    /// Region labels over a boundary covector grid.
    Classify(ClassifyArgs),
    /// Characteristic roots along a tangential fan and Lopatinski margins.
    Roots(RootsArgs),
    /// DN principal symbol by both routes.
    Dn(SampleArgs),
    /// Polarization ranks, projector residuals and muting.
    Frame(SampleArgs),
    /// A single leg or a broken ray.
    Trace(TraceArgs),
    /// Lens-map table over a launch fan.
    Lensmap(LensmapArgs),
    /// Boundary distance matrix between boundary sample points.
    Distance(DistanceArgs),
    /// Lens-map recovery from transport events.
    Recover(RecoverArgs),
    /// Full invariant suite.
    Selftest(SelftestArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Classify(_) => "classify",
            Command::Roots(_) => "roots",
            Command::Dn(_) => "dn",
            Command::Frame(_) => "frame",
            Command::Trace(_) => "trace",
            Command::Lensmap(_) => "lensmap",
            Command::Distance(_) => "distance",
            Command::Recover(_) => "recover",
            Command::Selftest(_) => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ModeArg {
    S,
    P,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::S => Mode::S,
            ModeArg::P => Mode::P,
        }
    }
}

pub fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, c] if parts.iter().all(|v| v.is_finite()) => Ok([a, b, c]),
        _ => Err("expected three finite comma-separated numbers".into()),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    /// Grid points per axis.
    #[arg(long, default_value_t = elastoray_core::medium::CLASS_GRID)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    /// Boundary points (Fibonacci directions).
    #[arg(long, default_value_t = 16)]
    pub fan_n: usize,
    /// Tangential directions per point.
    #[arg(long, default_value_t = 8)]
    pub directions: usize,
    /// Tangential magnitudes per direction, from 0 to the edge of the cone.
    #[arg(long, default_value_t = 9)]
    pub magnitudes: usize,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Cone aperture; defaults to the medium's class parameter.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RootsArgs {
    /// Fan members with `|ξ|/τ` evenly spaced in `[0, smax]`.
    #[arg(long, default_value_t = 9)]
    pub fan_n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Largest `|ξ|/τ`; defaults to `1/δ`.
    #[arg(long)]
    pub smax: Option<f64>,
    /// Explicit comma-separated `|ξ|/τ` values, replacing the even fan.
    #[arg(long, value_delimiter = ',')]
    pub ratios: Option<Vec<f64>>,
    /// Boundary point; defaults to the south pole.
    #[arg(long, value_parser = parse_vec3)]
    pub point: Option<[f64; 3]>,
    /// Lopatinski samples over the cone.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    /// Number of non-glancing sample covectors.
    #[arg(long, default_value_t = 20)]
    pub fan_n: usize,
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TraceArgs {
    #[arg(long, value_enum, default_value = "s")]
    pub mode: ModeArg,
    /// Launch angle from the inward normal, degrees.
    #[arg(long, default_value_t = 30.0)]
    pub angle: f64,
    /// Azimuth of the launch plane, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub azimuth: f64,
    #[arg(long, value_parser = parse_vec3)]
    pub point: Option<[f64; 3]>,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Reflections to follow; 0 traces a single leg.
    #[arg(long, default_value_t = 0)]
    pub depth: usize,
    #[arg(long, default_value_t = 100.0)]
    pub tmax: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LensmapArgs {
    #[arg(long, value_enum, default_value = "s")]
    pub mode: ModeArg,
    /// Fan members with launch angles evenly spaced in `[0, max_angle]`.
    #[arg(long, default_value_t = 16)]
    pub fan_n: usize,
    #[arg(long, default_value_t = 80.0)]
    pub max_angle: f64,
    #[arg(long, default_value_t = 0.0)]
    pub azimuth: f64,
    #[arg(long, value_parser = parse_vec3)]
    pub point: Option<[f64; 3]>,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DistanceArgs {
    #[arg(long, value_enum, default_value = "s")]
    pub mode: ModeArg,
    /// Boundary sample points.
    #[arg(long, default_value_t = 6)]
    pub fan_n: usize,
    /// Shooting starts per pair.
    #[arg(long, default_value_t = 64)]
    pub starts: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RecoverArgs {
    /// Number of probes.
    #[arg(long, default_value_t = 10)]
    pub fan_n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Largest probe launch angle from the normal, degrees.
    #[arg(long, default_value_t = 30.0)]
    pub max_angle: f64,
    #[arg(long, default_value_t = elastoray_core::rays::DEFAULT_DEPTH)]
    pub depth: usize,
    #[arg(long, default_value_t = 100.0)]
    pub tmax: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelftestArgs {
    /// Base sample count; heavier checks use fractions of it.
    #[arg(long, default_value_t = 50)]
    pub fan_n: usize,
    #[arg(long)]
    pub delta: Option<f64>,
}
