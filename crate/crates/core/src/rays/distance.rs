//! Boundary distance by multi-start shooting.

use alloc::vec::Vec;

use nalgebra::{Matrix2, Vector2};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;

use super::flow::StepControl;
use super::leg::{trace_leg, LensMapEntry};
use crate::boundary::BoundaryCovector;
use crate::linalg::tangent_frame;
use crate::medium::Medium;
use crate::sampling::seeded;
use crate::{Error, Mode, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    pub n_starts: usize,
    pub seed: u64,
    /// Required exit miss `|x_exit − y|`.
    pub miss_tol: f64,
    /// Number of best starts that are refined.
    pub refine: usize,
    pub max_simplex_evals: usize,
    pub tau: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            n_starts: 64,
            seed: 0,
            miss_tol: 1e-9,
            refine: 4,
            max_simplex_evals: 200,
            tau: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceResult {
    pub connected: bool,
    /// Travel time of the best connecting ray, first-order corrected for the
    /// residual miss; `NaN` when not connected.
    pub distance: f64,
    pub leg: Option<LensMapEntry>,
    /// Chart coordinates of the launch direction.
    pub chart: [f64; 2],
    pub miss: f64,
    pub starts: usize,
    pub connecting_starts: usize,
}

/// Launch directions `u e₁ + v e₂ + √(1−u²−v²)(−ν)` over the unit disc.
struct Chart {
    x: Vec3,
    nu: Vec3,
    e1: Vec3,
    e2: Vec3,
}

impl Chart {
    fn new(m: &Medium, x: &Vec3) -> Result<Self> {
        let nu = m.domain.require_boundary(x)?;
        let (e1, e2) = tangent_frame(&nu);
        Ok(Chart { x: *x, nu, e1, e2 })
    }

    fn direction(&self, p: &[f64; 2]) -> Option<Vec3> {
        let r2 = p[0] * p[0] + p[1] * p[1];
        (r2 < 1.0).then(|| self.e1 * p[0] + self.e2 * p[1] - self.nu * (1.0 - r2).sqrt())
    }

    fn coordinates(&self, dir: &Vec3) -> [f64; 2] {
        let d = dir.normalize();
        [d.dot(&self.e1), d.dot(&self.e2)]
    }
}

struct Shooter<'a> {
    m: &'a Medium,
    mode: Mode,
    chart: Chart,
    y: Vec3,
    tau: f64,
    ctrl: &'a StepControl,
    evals: usize,
}

impl Shooter<'_> {
    fn shoot(&mut self, p: &[f64; 2]) -> Option<LensMapEntry> {
        self.evals += 1;
        let dir = self.chart.direction(p)?;
        let g = BoundaryCovector::from_direction(self.m, self.mode, 0.0, self.chart.x, self.tau, &dir).ok()?;
        trace_leg(self.m, &g, self.mode, self.ctrl).ok()
    }

    fn miss(&mut self, p: &[f64; 2]) -> f64 {
        match self.shoot(p) {
            Some(e) => (e.gamma_out.x() - self.y).norm(),
            None => 10.0 + p[0].hypot(p[1]),
        }
    }

    fn nelder_mead(&mut self, start: [f64; 2], size: f64, f_tol: f64, max_evals: usize) -> ([f64; 2], f64) {
        let mut simplex = [start, [start[0] + size, start[1]], [start[0], start[1] + size]];
        let mut fv = [self.miss(&simplex[0]), self.miss(&simplex[1]), self.miss(&simplex[2])];
        let budget = self.evals + max_evals;
        while self.evals < budget {
            let mut idx = [0, 1, 2];
            idx.sort_by(|&a, &b| fv[a].total_cmp(&fv[b]));
            simplex = [simplex[idx[0]], simplex[idx[1]], simplex[idx[2]]];
            fv = [fv[idx[0]], fv[idx[1]], fv[idx[2]]];
            if fv[0] < f_tol {
                break;
            }
            let diam = (0..2)
                .map(|k| {
                    (simplex[1][k] - simplex[0][k])
                        .abs()
                        .max((simplex[2][k] - simplex[0][k]).abs())
                })
                .fold(0.0, f64::max);
            if diam < 1e-14 {
                break;
            }
            let c = [
                (simplex[0][0] + simplex[1][0]) / 2.0,
                (simplex[0][1] + simplex[1][1]) / 2.0,
            ];
            let along = |t: f64| [c[0] + t * (simplex[2][0] - c[0]), c[1] + t * (simplex[2][1] - c[1])];
            let xr = along(-1.0);
            let fr = self.miss(&xr);
            if fr < fv[0] {
                let xe = along(-2.0);
                let fe = self.miss(&xe);
                if fe < fr {
                    simplex[2] = xe;
                    fv[2] = fe;
                } else {
                    simplex[2] = xr;
                    fv[2] = fr;
                }
            } else if fr < fv[1] {
                simplex[2] = xr;
                fv[2] = fr;
            } else {
                let (xc, fc) = if fr < fv[2] {
                    let xc = along(-0.5);
                    (xc, self.miss(&xc))
                } else {
                    let xc = along(0.5);
                    (xc, self.miss(&xc))
                };
                if fc < fv[2].min(fr) {
                    simplex[2] = xc;
                    fv[2] = fc;
                } else {
                    for i in 1..3 {
                        simplex[i] = [
                            simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                            simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                        ];
                        fv[i] = self.miss(&simplex[i]);
                    }
                }
            }
        }
        let best = (0..3).min_by(|&a, &b| fv[a].total_cmp(&fv[b])).unwrap_or(0);
        (simplex[best], fv[best])
    }

    /// Gauss–Newton on the exit residual with a finite-difference Jacobian.
    fn polish(&mut self, mut p: [f64; 2], tol: f64) -> Option<([f64; 2], LensMapEntry)> {
        let mut entry = self.shoot(&p)?;
        for _ in 0..30 {
            let r = entry.gamma_out.x() - self.y;
            if r.norm() < tol {
                return Some((p, entry));
            }
            let h = 1e-6;
            let mut jac = [Vec3::zeros(); 2];
            for k in 0..2 {
                let mut pp = p;
                let mut pm = p;
                pp[k] += h;
                pm[k] -= h;
                let a = self.shoot(&pp)?.gamma_out.x();
                let b = self.shoot(&pm)?.gamma_out.x();
                jac[k] = (a - b) / (2.0 * h);
            }
            let jtj = Matrix2::new(
                jac[0].dot(&jac[0]),
                jac[0].dot(&jac[1]),
                jac[1].dot(&jac[0]),
                jac[1].dot(&jac[1]),
            );
            let jtr = Vector2::new(jac[0].dot(&r), jac[1].dot(&r));
            let step = jtj.try_inverse()? * jtr;
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..20 {
                let q = [p[0] - lambda * step[0], p[1] - lambda * step[1]];
                if let Some(e) = self.shoot(&q) {
                    if (e.gamma_out.x() - self.y).norm() < r.norm() {
                        p = q;
                        entry = e;
                        improved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        ((entry.gamma_out.x() - self.y).norm() < tol).then_some((p, entry))
    }
}

fn corrected_time(entry: &LensMapEntry, y: &Vec3) -> f64 {
    let out = entry.gamma_out;
    // ∂d/∂y = −ξ_out/τ on the tangent plane
    entry.travel_time - out.xi().dot(&(y - out.x())) / out.tau()
}

/// Shortest connecting `mode` ray from `x` to `y` found by shooting.
pub fn boundary_distance(
    m: &Medium,
    mode: Mode,
    x: &Vec3,
    y: &Vec3,
    opts: &ShootingOptions,
    ctrl: &StepControl,
) -> Result<DistanceResult> {
    let chart = Chart::new(m, x)?;
    m.domain.require_boundary(y)?;
    if (x - y).norm() < 1e-9 {
        return Err(Error::InvalidParameter("boundary points must differ"));
    }
    let mut starts: Vec<[f64; 2]> = Vec::with_capacity(opts.n_starts.max(1));
    starts.push(chart.coordinates(&(y - x)));
    let mut rng = seeded(opts.seed);
    while starts.len() < opts.n_starts.max(1) {
        let r = 0.98 * rng.random_range(0.0f64..1.0).sqrt();
        let a = rng.random_range(0.0..core::f64::consts::TAU);
        starts.push([r * a.cos(), r * a.sin()]);
    }
    refine_starts(m, mode, chart, y, &starts, opts, ctrl)
}

/// Refinement from a known chart point, used for nearby endpoint pairs.
pub fn boundary_distance_from(
    m: &Medium,
    mode: Mode,
    x: &Vec3,
    y: &Vec3,
    chart_start: [f64; 2],
    opts: &ShootingOptions,
    ctrl: &StepControl,
) -> Result<DistanceResult> {
    let chart = Chart::new(m, x)?;
    m.domain.require_boundary(y)?;
    refine_starts(m, mode, chart, y, &[chart_start], opts, ctrl)
}

fn refine_starts(
    m: &Medium,
    mode: Mode,
    chart: Chart,
    y: &Vec3,
    starts: &[[f64; 2]],
    opts: &ShootingOptions,
    ctrl: &StepControl,
) -> Result<DistanceResult> {
    let mut sh = Shooter {
        m,
        mode,
        chart,
        y: *y,
        tau: opts.tau,
        ctrl,
        evals: 0,
    };
    let mut scored: Vec<([f64; 2], f64)> = starts.iter().map(|p| (*p, sh.miss(p))).collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut best: Option<([f64; 2], LensMapEntry, f64)> = None;
    let mut connecting = 0;
    for &(p0, f0) in scored.iter().take(opts.refine.max(1)) {
        if f0 >= 10.0 {
            continue;
        }
        let (p1, _) = sh.nelder_mead(p0, 0.02, 1e-5, opts.max_simplex_evals);
        let Some((p2, entry)) = sh.polish(p1, opts.miss_tol) else {
            continue;
        };
        connecting += 1;
        let d = corrected_time(&entry, y);
        if best.as_ref().is_none_or(|b| d < b.2 - 1e-12) {
            best = Some((p2, entry, d));
        }
    }
    Ok(match best {
        Some((p, entry, d)) => DistanceResult {
            connected: true,
            distance: d,
            leg: Some(entry),
            chart: p,
            miss: (entry.gamma_out.x() - y).norm(),
            starts: starts.len(),
            connecting_starts: connecting,
        },
        None => DistanceResult {
            connected: false,
            distance: f64::NAN,
            leg: None,
            chart: scored.first().map_or([0.0; 2], |s| s.0),
            miss: scored.first().map_or(f64::INFINITY, |s| s.1),
            starts: starts.len(),
            connecting_starts: 0,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    /// Central differences of `d(x, ·)` along the tangent frame at `y`.
    pub finite_difference: [f64; 2],
    /// `−ξ_out/τ` in the same frame.
    pub predicted: [f64; 2],
    pub relative_error: f64,
}

/// Generating-function check of `∂d/∂y = −ξ_out/τ` by moving `y` along the
/// boundary by `±h`.
pub fn distance_gradient_check(
    m: &Medium,
    mode: Mode,
    x: &Vec3,
    y: &Vec3,
    h: f64,
    opts: &ShootingOptions,
    ctrl: &StepControl,
) -> Result<GradientCheck> {
    let base = boundary_distance(m, mode, x, y, opts, ctrl)?;
    let leg = base
        .leg
        .ok_or(Error::InvalidParameter("boundary points are not connected"))?;
    let nu = m.domain.normal(y);
    let (e1, e2) = tangent_frame(&nu);
    let g = -leg.gamma_out.xi() / leg.gamma_out.tau();
    let predicted = [g.dot(&e1), g.dot(&e2)];
    let mut fd = [0.0; 2];
    for (k, e) in [e1, e2].iter().enumerate() {
        let yp = m.domain.boundary_point(&(y + e * h));
        let ym = m.domain.boundary_point(&(y - e * h));
        let dp = boundary_distance_from(m, mode, x, &yp, base.chart, opts, ctrl)?;
        let dm = boundary_distance_from(m, mode, x, &ym, base.chart, opts, ctrl)?;
        if !(dp.connected && dm.connected) {
            return Err(Error::InvalidParameter("perturbed boundary points are not connected"));
        }
        fd[k] = (dp.distance - dm.distance) / (2.0 * h);
    }
    let diff = Vector2::new(fd[0] - predicted[0], fd[1] - predicted[1]).norm();
    let scale = Vector2::new(predicted[0], predicted[1]).norm();
    Ok(GradientCheck {
        finite_difference: fd,
        predicted,
        relative_error: diff / scale,
    })
}
