//! Hamilton flow of `H = τ² − g_mode^{-1}(x, ξ)` with Dormand–Prince 5(4)
//! stepping and boundary-exit localization.

use alloc::vec::Vec;

use nalgebra::SVector;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::medium::Medium;
use crate::symbols::metric_inv_at;
use crate::{Error, Mode, Result, Vec3};

/// Packed `(x, ξ, t)`.
pub type FlowVector = SVector<f64, 7>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayState {
    pub s: f64,
    pub t: f64,
    pub x: Vec3,
    pub xi: Vec3,
    pub tau: f64,
    pub mode: Mode,
}

impl RayState {
    pub fn pack(&self) -> FlowVector {
        FlowVector::from_column_slice(&[self.x.x, self.x.y, self.x.z, self.xi.x, self.xi.y, self.xi.z, self.t])
    }

    fn unpack(&self, s: f64, y: &FlowVector) -> RayState {
        RayState {
            s,
            t: y[6],
            x: Vec3::new(y[0], y[1], y[2]),
            xi: Vec3::new(y[3], y[4], y[5]),
            tau: self.tau,
            mode: self.mode,
        }
    }

    /// `|τ² − g^{-1}(x, ξ)|`.
    pub fn hamiltonian_residual(&self, m: &Medium) -> f64 {
        let g = metric_inv_at(&m.coefficients(&self.x), self.mode, &self.xi);
        (self.tau * self.tau - g.value).abs()
    }

    /// `dx/ds`.
    pub fn velocity(&self, m: &Medium) -> Vec3 {
        -metric_inv_at(&m.coefficients(&self.x), self.mode, &self.xi).grad_xi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Allowed `|τ² − g^{-1}|` relative to `τ²`.
    pub drift_tol: f64,
    /// Target `|φ|` at the localized exit.
    pub event_tol: f64,
    /// Exits with `|dφ/ds| < glancing_tol·|∇φ|·|dx/ds|` are tangential.
    pub glancing_tol: f64,
    /// Largest displacement per step relative to the smallest half-extent.
    pub max_step_fraction: f64,
    pub dense: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-12,
            atol: 1e-13,
            max_steps: 200_000,
            drift_tol: 1e-9,
            event_tol: 1e-12,
            glancing_tol: 1e-6,
            max_step_fraction: 0.05,
            dense: false,
        }
    }
}

impl StepControl {
    pub fn dense(mut self) -> Self {
        self.dense = true;
        self
    }
}

fn rhs(m: &Medium, mode: Mode, tau: f64, y: &FlowVector) -> FlowVector {
    let x = Vec3::new(y[0], y[1], y[2]);
    let xi = Vec3::new(y[3], y[4], y[5]);
    let g = metric_inv_at(&m.coefficients(&x), mode, &xi);
    FlowVector::from_column_slice(&[
        -g.grad_xi.x,
        -g.grad_xi.y,
        -g.grad_xi.z,
        g.grad_x.x,
        g.grad_x.y,
        g.grad_x.z,
        2.0 * tau,
    ])
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns the fifth-order solution and the
/// embedded error vector.
fn dp_step(m: &Medium, mode: Mode, tau: f64, y: &FlowVector, h: f64) -> (FlowVector, FlowVector) {
    let mut k = [FlowVector::zeros(); 7];
    for i in 0..7 {
        let mut yi = *y;
        for j in 0..i {
            yi += k[j] * (h * A[i][j]);
        }
        k[i] = rhs(m, mode, tau, &yi);
    }
    let mut y5 = *y;
    let mut err = FlowVector::zeros();
    for i in 0..7 {
        y5 += k[i] * (h * B5[i]);
        err += k[i] * (h * (B5[i] - B4[i]));
    }
    (y5, err)
}

fn error_norm(err: &FlowVector, y0: &FlowVector, y1: &FlowVector, ctrl: &StepControl) -> f64 {
    let mut acc = 0.0;
    for i in 0..7 {
        let sc = ctrl.atol + ctrl.rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / 7.0).sqrt()
}

/// Result of integrating until the ray leaves the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowExit {
    pub exit: RayState,
    pub steps: usize,
    pub max_drift: f64,
    pub samples: Vec<RayState>,
}

/// Integrates from `start` (on or inside `∂Ω`) until `φ` changes sign from
/// negative to positive, then bisects the last step to `|φ| ≤ event_tol`.
pub fn integrate_to_exit(m: &Medium, start: &RayState, ctrl: &StepControl) -> Result<FlowExit> {
    let tau = start.tau;
    let mode = start.mode;
    let sign = tau.signum();
    let tau2 = tau * tau;
    let dom = &m.domain;
    let ext = dom.half_extents();
    let max_disp = ctrl.max_step_fraction * ext.x.min(ext.y).min(ext.z);

    let mut y = start.pack();
    let mut s = start.s;
    let mut state = *start;
    let mut inside_seen = false;
    let speed0 = start.velocity(m).norm().max(f64::MIN_POSITIVE);
    let mut h = 1e-3 * max_disp / speed0;
    let mut max_drift: f64 = start.hamiltonian_residual(m);
    let mut samples = Vec::new();
    if ctrl.dense {
        samples.push(state);
    }

    for steps in 1..=ctrl.max_steps {
        let speed = state.velocity(m).norm().max(f64::MIN_POSITIVE);
        h = h.min(max_disp / speed);
        let h_min = 1e-14 * (1.0 + s.abs()).max(max_disp / speed);
        let (y_new, err) = dp_step(m, mode, tau, &y, sign * h);
        let en = error_norm(&err, &y, &y_new, ctrl);
        let cand = state.unpack(s + sign * h, &y_new);
        let drift = cand.hamiltonian_residual(m);
        if en > 1.0 || drift > ctrl.drift_tol * tau2 {
            if h < h_min {
                return Err(Error::StepControl { drift: drift / tau2 });
            }
            h *= if en > 1.0 { (0.9 * en.powf(-0.2)).max(0.2) } else { 0.5 };
            continue;
        }
        let phi = dom.level(&cand.x);
        if phi > 0.0 && (inside_seen || steps > 1) {
            let exit = localize_exit(m, &state, &y, h, ctrl)?;
            max_drift = max_drift.max(exit.hamiltonian_residual(m));
            if ctrl.dense {
                samples.push(exit);
            }
            return Ok(FlowExit {
                exit,
                steps,
                max_drift: max_drift / tau2,
                samples,
            });
        }
        if phi > 0.0 {
            // left immediately: retry the first step shorter
            h *= 0.1;
            if h < h_min {
                return Err(Error::GlancingExit);
            }
            continue;
        }
        inside_seen = true;
        max_drift = max_drift.max(drift);
        y = y_new;
        s += sign * h;
        state = cand;
        if ctrl.dense {
            samples.push(state);
        }
        let grow = if en == 0.0 {
            5.0
        } else {
            (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= grow;
    }
    Err(Error::MaxStepsExceeded(ctrl.max_steps))
}

fn localize_exit(m: &Medium, state: &RayState, y: &FlowVector, h: f64, ctrl: &StepControl) -> Result<RayState> {
    let sign = state.tau.signum();
    let dom = &m.domain;
    let eval = |hh: f64| {
        let (yy, _) = dp_step(m, state.mode, state.tau, y, sign * hh);
        state.unpack(state.s + sign * hh, &yy)
    };
    let (mut lo, mut hi) = (0.0, h);
    let mut best = eval(hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let cand = eval(mid);
        let phi = dom.level(&cand.x);
        if phi.abs() <= ctrl.event_tol {
            best = cand;
            break;
        }
        if phi > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        best = cand;
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    if dom.level(&best.x).abs() > ctrl.event_tol.max(1e-14) {
        return Err(Error::GlancingExit);
    }
    let grad = dom.level_gradient(&best.x);
    let v = best.velocity(m);
    if grad.dot(&v).abs() < ctrl.glancing_tol * grad.norm() * v.norm() {
        return Err(Error::GlancingExit);
    }
    Ok(best)
}
