//! Reconstruction of the shear and compressional lens maps from first
//! arrivals of mode-isolated transport.

use alloc::vec::Vec;

use super::flow::StepControl;
use super::leg::{trace_leg, LensMapEntry};
use super::transport::{broken_transport, DEFAULT_DEPTH};
use crate::boundary::BoundaryCovector;
use crate::medium::Medium;
use crate::polarization::muting_annihilation_check;
use crate::{Error, Mode, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    pub depth: usize,
    pub t_max: f64,
    /// Largest accepted discrepancy between reconstructed and direct tables.
    pub tol: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions {
            depth: DEFAULT_DEPTH,
            t_max: 100.0,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRecovery {
    pub probe: BoundaryCovector,
    /// `‖π_P diag(m, m)‖` at the probe; shear-only launches rely on it vanishing.
    pub muting_residual: Result<f64>,
    pub shear: Result<LensMapEntry>,
    pub compressional: Result<LensMapEntry>,
    pub direct_shear: Result<LensMapEntry>,
    pub direct_compressional: Result<LensMapEntry>,
}

/// Largest of the exit position, tangential covector and time differences.
pub fn entry_discrepancy(a: &LensMapEntry, b: &LensMapEntry) -> f64 {
    (a.gamma_out.x() - b.gamma_out.x())
        .norm()
        .max((a.gamma_out.xi() - b.gamma_out.xi()).norm())
        .max((a.travel_time - b.travel_time).abs())
}

impl ProbeRecovery {
    pub fn discrepancy(&self, mode: Mode) -> Option<f64> {
        let (rec, dir) = match mode {
            Mode::S => (&self.shear, &self.direct_shear),
            Mode::P => (&self.compressional, &self.direct_compressional),
        };
        match (rec, dir) {
            (Ok(a), Ok(b)) => Some(entry_discrepancy(a, b)),
            _ => None,
        }
    }

    /// `|t_S − t_P|` when both maps were recovered.
    pub fn mode_gap(&self) -> Option<f64> {
        match (&self.shear, &self.compressional) {
            (Ok(a), Ok(b)) => Some((a.travel_time - b.travel_time).abs()),
            _ => None,
        }
    }
}

fn first_arrival(
    m: &Medium,
    probe: &BoundaryCovector,
    mode: Mode,
    opts: &RecoveryOptions,
    ctrl: &StepControl,
) -> Result<LensMapEntry> {
    let t = broken_transport(m, probe, &[mode], opts.depth, opts.t_max, ctrl);
    let ev = t.first_arrival().ok_or_else(|| {
        t.notes
            .iter()
            .find_map(|n| match n {
                super::transport::BranchNote::Failed { error, .. } => Some(error.clone()),
                _ => None,
            })
            .unwrap_or(Error::NotHyperbolic { mode })
    })?;
    Ok(LensMapEntry {
        gamma_in: *probe,
        gamma_out: ev.covector,
        mode: ev.mode,
        travel_time: ev.covector.t() - probe.t(),
    })
}

/// Runs the recovery for one probe: mode-isolated launches observed only
/// through their transport events, compared with direct legs.
pub fn recover_probe(
    m: &Medium,
    probe: &BoundaryCovector,
    opts: &RecoveryOptions,
    ctrl: &StepControl,
) -> ProbeRecovery {
    ProbeRecovery {
        probe: *probe,
        muting_residual: muting_annihilation_check(m, probe),
        shear: first_arrival(m, probe, Mode::S, opts, ctrl),
        compressional: first_arrival(m, probe, Mode::P, opts, ctrl),
        direct_shear: trace_leg(m, probe, Mode::S, ctrl),
        direct_compressional: trace_leg(m, probe, Mode::P, ctrl),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    pub probes: Vec<ProbeRecovery>,
    pub tol: f64,
}

impl RecoveryReport {
    pub fn from_probes(probes: Vec<ProbeRecovery>, tol: f64) -> Self {
        RecoveryReport { probes, tol }
    }

    pub fn max_discrepancy(&self) -> f64 {
        self.probes
            .iter()
            .flat_map(|p| [p.discrepancy(Mode::S), p.discrepancy(Mode::P)])
            .flatten()
            .fold(0.0, f64::max)
    }

    pub fn max_mode_gap(&self) -> f64 {
        self.probes.iter().filter_map(|p| p.mode_gap()).fold(0.0, f64::max)
    }

    /// Probes where a recovered entry is missing or a direct entry failed
    /// while the recovered one exists (or the reverse).
    pub fn failures(&self) -> usize {
        self.probes
            .iter()
            .filter(|p| {
                p.shear.is_err() != p.direct_shear.is_err()
                    || p.compressional.is_err() != p.direct_compressional.is_err()
            })
            .count()
    }

    pub fn recovered(&self, mode: Mode) -> usize {
        self.probes
            .iter()
            .filter(|p| match mode {
                Mode::S => p.shear.is_ok(),
                Mode::P => p.compressional.is_ok(),
            })
            .count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0 && self.max_discrepancy() <= self.tol
    }
}

pub fn recover_lens_maps(
    m: &Medium,
    probes: &[BoundaryCovector],
    opts: &RecoveryOptions,
    ctrl: &StepControl,
) -> RecoveryReport {
    let rows = probes.iter().map(|p| recover_probe(m, p, opts, ctrl)).collect();
    RecoveryReport::from_probes(rows, opts.tol)
}
