//! Breadth-first transport of boundary singularities along broken
//! bicharacteristics.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::flow::{integrate_to_exit, RayState, StepControl};
use super::leg::{exit_covector, launch_state, LensMapEntry};
use super::reflect::{reflect, BranchKind};
use crate::boundary::BoundaryCovector;
use crate::medium::Medium;
use crate::{Error, Mode};

pub const DEFAULT_DEPTH: usize = 3;

/// Boundary arrival of a transported singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WfEvent {
    pub covector: BoundaryCovector,
    pub mode: Mode,
    /// Position in the time-sorted event list.
    pub order: usize,
    /// Index of the leg that produced the arrival.
    pub leg: usize,
    pub reflections: usize,
}

/// One interior leg of the transport tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportLeg {
    pub entry: LensMapEntry,
    pub parent: Option<usize>,
    /// `(incident, reflected)` modes at the reflection that started the leg.
    pub conversion: Option<(Mode, Mode)>,
    pub max_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BranchNote {
    Evanescent {
        after_leg: usize,
        mode: Mode,
    },
    Glancing {
        after_leg: usize,
        mode: Mode,
        discriminant: f64,
    },
    Failed {
        after_leg: Option<usize>,
        mode: Mode,
        error: Error,
    },
}

/// Legs joined by reflections, first leg first.
#[derive(Debug, Clone, PartialEq)]
pub struct BrokenRay {
    pub legs: Vec<TransportLeg>,
}

impl BrokenRay {
    pub fn conversions(&self) -> Vec<(Mode, Mode)> {
        self.legs.iter().filter_map(|l| l.conversion).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transport {
    pub events: Vec<WfEvent>,
    pub legs: Vec<TransportLeg>,
    pub notes: Vec<BranchNote>,
}

impl Transport {
    pub fn first_arrival(&self) -> Option<&WfEvent> {
        self.events.first()
    }

    pub fn broken_ray(&self, leg: usize) -> BrokenRay {
        let mut chain = Vec::new();
        let mut cur = Some(leg);
        while let Some(i) = cur {
            chain.push(self.legs[i].clone());
            cur = self.legs[i].parent;
        }
        chain.reverse();
        BrokenRay { legs: chain }
    }
}

struct Pending {
    start: RayState,
    parent: Option<usize>,
    conversion: Option<(Mode, Mode)>,
    reflections: usize,
}

/// Launches forward legs from `γ_in` in each of `modes` and follows every
/// non-evanescent reflected branch up to `depth` reflections or time `t_max`.
pub fn broken_transport(
    m: &Medium,
    gamma_in: &BoundaryCovector,
    modes: &[Mode],
    depth: usize,
    t_max: f64,
    ctrl: &StepControl,
) -> Transport {
    let mut queue = VecDeque::new();
    let mut notes = Vec::new();
    for &mode in modes {
        match launch_state(m, gamma_in, mode) {
            Ok(start) => queue.push_back(Pending {
                start,
                parent: None,
                conversion: None,
                reflections: 0,
            }),
            Err(error) => notes.push(BranchNote::Failed {
                after_leg: None,
                mode,
                error,
            }),
        }
    }

    let mut legs: Vec<TransportLeg> = Vec::new();
    let mut events = Vec::new();
    while let Some(p) = queue.pop_front() {
        let flow = match integrate_to_exit(m, &p.start, ctrl) {
            Ok(f) => f,
            Err(error) => {
                notes.push(BranchNote::Failed {
                    after_leg: p.parent,
                    mode: p.start.mode,
                    error,
                });
                continue;
            }
        };
        if flow.exit.t > t_max {
            continue;
        }
        let gamma_out = match exit_covector(m, &flow.exit) {
            Ok(g) => g,
            Err(error) => {
                notes.push(BranchNote::Failed {
                    after_leg: p.parent,
                    mode: p.start.mode,
                    error,
                });
                continue;
            }
        };
        let gamma_start = exit_covector(m, &p.start).unwrap_or(gamma_out);
        let idx = legs.len();
        legs.push(TransportLeg {
            entry: LensMapEntry {
                gamma_in: gamma_start,
                gamma_out,
                mode: p.start.mode,
                travel_time: flow.exit.t - p.start.t,
            },
            parent: p.parent,
            conversion: p.conversion,
            max_drift: flow.max_drift,
        });
        events.push(WfEvent {
            covector: gamma_out,
            mode: p.start.mode,
            order: 0,
            leg: idx,
            reflections: p.reflections,
        });
        if p.reflections >= depth {
            continue;
        }
        match reflect(m, &flow.exit) {
            Ok(r) => {
                for b in &r.branches {
                    match b.kind {
                        BranchKind::Traced(start) => queue.push_back(Pending {
                            start,
                            parent: Some(idx),
                            conversion: Some((b.incident, b.mode)),
                            reflections: p.reflections + 1,
                        }),
                        BranchKind::Evanescent => notes.push(BranchNote::Evanescent {
                            after_leg: idx,
                            mode: b.mode,
                        }),
                        BranchKind::Glancing { discriminant } => notes.push(BranchNote::Glancing {
                            after_leg: idx,
                            mode: b.mode,
                            discriminant,
                        }),
                    }
                }
            }
            Err(error) => notes.push(BranchNote::Failed {
                after_leg: Some(idx),
                mode: p.start.mode,
                error,
            }),
        }
    }
    events.sort_by(|a, b| a.covector.t().total_cmp(&b.covector.t()).then(a.leg.cmp(&b.leg)));
    for (i, e) in events.iter_mut().enumerate() {
        e.order = i;
    }
    Transport { events, legs, notes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::Domain;
    use crate::{Mat3, Vec3};

    fn unit() -> Medium {
        Medium::homogeneous(1.0, 1.0, 1.0, Mat3::zeros()).unwrap()
    }

    fn probe(deg: f64) -> BoundaryCovector {
        let th = deg.to_radians();
        BoundaryCovector::new(&Domain::UnitBall, 0.0, -Vec3::z(), 1.0, Vec3::x() * th.sin()).unwrap()
    }

    #[test]
    fn depth_zero_is_the_lens_map() {
        let m = unit();
        let ctrl = StepControl::default();
        let t = broken_transport(&m, &probe(30.0), &[Mode::S], 0, 100.0, &ctrl);
        assert_eq!(t.events.len(), 1);
        let direct = super::super::leg::trace_leg(&m, &probe(30.0), Mode::S, &ctrl).unwrap();
        assert_eq!(t.events[0].covector, direct.gamma_out);
    }

    #[test]
    fn depth_one_at_thirty_degrees() {
        let m = unit();
        let t = broken_transport(&m, &probe(30.0), &[Mode::S], 1, 100.0, &StepControl::default());
        assert_eq!(t.events.len(), 3);
        let c30 = 30f64.to_radians().cos();
        // chord lengths 2cosθ: S then P at 60° (speed √3) and S at 30°
        let t1 = 2.0 * c30;
        let tp = t1 + 2.0 * 60f64.to_radians().cos() / 3f64.sqrt();
        let ts = 2.0 * t1;
        assert!((t.events[0].covector.t() - t1).abs() < 1e-9);
        assert_eq!(t.events[1].mode, Mode::P);
        assert!((t.events[1].covector.t() - tp).abs() < 1e-9);
        assert!((t.events[2].covector.t() - ts).abs() < 1e-9);
        let ray = t.broken_ray(t.events[1].leg);
        assert_eq!(ray.conversions(), [(Mode::S, Mode::P)]);
    }

    #[test]
    fn compressional_arrives_first() {
        let t = broken_transport(
            &unit(),
            &probe(0.0),
            &[Mode::S, Mode::P],
            0,
            100.0,
            &StepControl::default(),
        );
        assert_eq!(t.first_arrival().unwrap().mode, Mode::P);
    }

    #[test]
    fn evanescent_branch_recorded() {
        let t = broken_transport(&unit(), &probe(45.0), &[Mode::S], 1, 100.0, &StepControl::default());
        assert!(t
            .notes
            .iter()
            .any(|n| matches!(n, BranchNote::Evanescent { mode: Mode::P, .. })));
    }
}
