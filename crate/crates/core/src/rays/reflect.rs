//! Reflection with mode conversion at a boundary arrival.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::flow::RayState;
use super::leg::exit_covector;
use crate::boundary::{mode_roots, BoundaryCovector};
use crate::medium::Medium;
use crate::{Error, Mode, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchKind {
    /// Real forward root; the state starts the reflected leg.
    Traced(RayState),
    /// Complex roots; recorded but not traced.
    Evanescent,
    /// Double root within the glancing tolerance.
    Glancing { discriminant: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectedBranch {
    pub incident: Mode,
    pub mode: Mode,
    pub kind: BranchKind,
}

impl ReflectedBranch {
    pub fn is_conversion(&self) -> bool {
        self.incident != self.mode
    }

    pub fn state(&self) -> Option<&RayState> {
        match &self.kind {
            BranchKind::Traced(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reflection {
    pub gamma: BoundaryCovector,
    pub branches: Vec<ReflectedBranch>,
}

impl Reflection {
    pub fn traced(&self) -> impl Iterator<Item = &RayState> {
        self.branches.iter().filter_map(|b| b.state())
    }

    /// Largest deviation of the emitted `(t, x, τ, ξ_|)` from the arrival
    /// covector.
    pub fn invariant_residual(&self) -> f64 {
        let g = &self.gamma;
        self.traced()
            .map(|s| {
                let nu = g.nu();
                let tangential = s.xi - nu * s.xi.dot(&nu);
                (s.t - g.t())
                    .abs()
                    .max((s.x - g.x()).norm())
                    .max((s.tau - g.tau()).abs())
                    .max((tangential - g.xi()).norm())
            })
            .fold(0.0, f64::max)
    }
}

/// Reflected and converted branches at the arrival `exit`.
pub fn reflect(m: &Medium, exit: &RayState) -> Result<Reflection> {
    let gamma = exit_covector(m, exit)?;
    reflect_covector(m, &gamma, exit.mode)
}

pub fn reflect_covector(m: &Medium, gamma: &BoundaryCovector, incident: Mode) -> Result<Reflection> {
    let mut branches = Vec::with_capacity(2);
    for mode in Mode::BOTH {
        let kind = match mode_roots(m, gamma, mode) {
            Ok(r) => match r.forward() {
                Some(z) => BranchKind::Traced(RayState {
                    s: 0.0,
                    t: gamma.t(),
                    x: gamma.x(),
                    xi: gamma.xi() - gamma.nu() * z,
                    tau: gamma.tau(),
                    mode,
                }),
                None => BranchKind::Evanescent,
            },
            Err(Error::Glancing { discriminant, .. }) => {
                if mode == incident {
                    return Err(Error::GlancingReflection { mode, discriminant });
                }
                BranchKind::Glancing { discriminant }
            }
            Err(e) => return Err(e),
        };
        if mode == incident && kind == BranchKind::Evanescent {
            return Err(Error::NotHyperbolic { mode });
        }
        branches.push(ReflectedBranch { incident, mode, kind });
    }
    Ok(Reflection {
        gamma: *gamma,
        branches,
    })
}

/// Angle between the ray direction `dx/dt` and the inward normal.
pub fn ray_angle(m: &Medium, state: &RayState, nu: &crate::Vec3) -> f64 {
    let v = state.velocity(m) * state.tau.signum();
    let c = (v.dot(&-nu) / v.norm()).clamp(-1.0, 1.0);
    c.acos()
}
