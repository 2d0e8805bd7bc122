//! Single interior legs and lens-map tables.

use alloc::vec::Vec;

use super::flow::{integrate_to_exit, RayState, StepControl};
use crate::boundary::{mode_roots, BoundaryCovector};
use crate::medium::Medium;
use crate::{Error, Mode, Result};

/// One lens-map value `γ_in ↦ γ_out` for a mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensMapEntry {
    pub gamma_in: BoundaryCovector,
    pub gamma_out: BoundaryCovector,
    pub mode: Mode,
    pub travel_time: f64,
}

/// A traced leg with integration diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RayLeg {
    pub entry: LensMapEntry,
    pub start: RayState,
    pub exit: RayState,
    pub steps: usize,
    /// Largest `|τ² − g^{-1}| / τ²` over accepted states.
    pub max_drift: f64,
    pub samples: Vec<RayState>,
}

/// Initial state for the `mode` leg entering at `γ`, using the forward root.
pub fn launch_state(m: &Medium, gamma: &BoundaryCovector, mode: Mode) -> Result<RayState> {
    let roots = mode_roots(m, gamma, mode)?;
    let z = roots.forward().ok_or(Error::NotHyperbolic { mode })?;
    Ok(RayState {
        s: 0.0,
        t: gamma.t(),
        x: gamma.x(),
        xi: gamma.xi() - gamma.nu() * z,
        tau: gamma.tau(),
        mode,
    })
}

/// Tangential restriction of a boundary state.
pub fn exit_covector(m: &Medium, state: &RayState) -> Result<BoundaryCovector> {
    BoundaryCovector::restrict(&m.domain, state.t, state.x, state.tau, &state.xi)
}

pub fn trace_ray(m: &Medium, gamma: &BoundaryCovector, mode: Mode, ctrl: &StepControl) -> Result<RayLeg> {
    let start = launch_state(m, gamma, mode)?;
    let flow = integrate_to_exit(m, &start, ctrl)?;
    let gamma_out = exit_covector(m, &flow.exit)?;
    Ok(RayLeg {
        entry: LensMapEntry {
            gamma_in: *gamma,
            gamma_out,
            mode,
            travel_time: flow.exit.t - start.t,
        },
        start,
        exit: flow.exit,
        steps: flow.steps,
        max_drift: flow.max_drift,
        samples: flow.samples,
    })
}

pub fn trace_leg(m: &Medium, gamma: &BoundaryCovector, mode: Mode, ctrl: &StepControl) -> Result<LensMapEntry> {
    trace_ray(m, gamma, mode, ctrl).map(|leg| leg.entry)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LensMapRow {
    pub gamma_in: BoundaryCovector,
    pub result: Result<LensMapEntry>,
}

/// Lens map over a fan; per-entry failures are kept in the table.
pub fn lens_map_table(m: &Medium, mode: Mode, fan: &[BoundaryCovector], ctrl: &StepControl) -> Vec<LensMapRow> {
    fan.iter()
        .map(|g| LensMapRow {
            gamma_in: *g,
            result: trace_leg(m, g, mode, ctrl),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneityReport {
    pub factor: f64,
    pub position_difference: f64,
    pub time_difference: f64,
    /// `|ξ_out(kγ) − k ξ_out(γ)| / (k |ξ_out(γ)|)` (absolute when `ξ_out = 0`).
    pub covector_difference: f64,
}

/// Compares the leg from `γ` with the leg from `(τ, ξ_|)` scaled by `k`.
pub fn homogeneity_check(
    m: &Medium,
    gamma: &BoundaryCovector,
    mode: Mode,
    k: f64,
    ctrl: &StepControl,
) -> Result<HomogeneityReport> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter("scaling factor must be positive"));
    }
    let a = trace_leg(m, gamma, mode, ctrl)?;
    let b = trace_leg(m, &gamma.scaled(k), mode, ctrl)?;
    let dxi = (b.gamma_out.xi() - a.gamma_out.xi() * k).norm();
    let scale = k * a.gamma_out.xi().norm();
    Ok(HomogeneityReport {
        factor: k,
        position_difference: (b.gamma_out.x() - a.gamma_out.x()).norm(),
        time_difference: (b.travel_time - a.travel_time).abs(),
        covector_difference: if scale > 0.0 { dxi / scale } else { dxi },
    })
}
