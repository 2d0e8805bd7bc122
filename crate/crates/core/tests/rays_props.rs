mod common;

use common::*;
use elastoray_core::boundary::BoundaryCovector;
use elastoray_core::medium::Medium;
use elastoray_core::rays::{broken_transport, homogeneity_check, lens_map_table, trace_leg, StepControl};
use elastoray_core::sampling::{boundary_point, inward_direction, seeded};
use elastoray_core::{Mode, Vec3};
use proptest::prelude::*;
use rand::Rng;

/// Interior launch within 70° of the inward normal.
fn launch(m: &Medium, mode: Mode, seed: u64) -> BoundaryCovector {
    let mut rng = seeded(seed);
    let x = boundary_point(&m.domain, &mut rng);
    let dir = inward_direction(&m.domain.normal(&x), 70f64.to_radians(), &mut rng);
    let tau = rng.random_range(0.5..2.0);
    BoundaryCovector::from_direction(m, mode, 0.0, x, tau, &dir).unwrap()
}

fn south_pole(m: &Medium, mode: Mode, degrees: f64) -> BoundaryCovector {
    let a = degrees.to_radians();
    let dir = Vec3::new(a.sin(), 0.0, a.cos());
    BoundaryCovector::from_direction(m, mode, 0.0, -Vec3::z(), 1.0, &dir).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reversed_leg_returns_to_entry(seed in any::<u64>(), which in 0usize..4, p in any::<bool>()) {
        let m = admissible_media()[which].1.clone();
        let mode = if p { Mode::P } else { Mode::S };
        let g = launch(&m, mode, seed);
        let ctrl = StepControl::default();
        let fwd = trace_leg(&m, &g, mode, &ctrl).unwrap();
        let back = trace_leg(&m, &fwd.gamma_out.time_reversed(), mode, &ctrl).unwrap();
        prop_assert!((back.gamma_out.x() - g.x()).norm() < 1e-8, "{:e}", (back.gamma_out.x() - g.x()).norm());
        prop_assert!((back.gamma_out.xi() - g.xi()).norm() < 1e-8 * g.frequency());
        prop_assert!((back.travel_time - fwd.travel_time).abs() < 1e-8);
    }

    #[test]
    fn legs_are_homogeneous(seed in any::<u64>(), which in 0usize..4, k in 0.1..10.0f64) {
        let m = admissible_media()[which].1.clone();
        let g = launch(&m, Mode::S, seed);
        let rep = homogeneity_check(&m, &g, Mode::S, k, &StepControl::default()).unwrap();
        prop_assert!(rep.position_difference < 1e-8);
        prop_assert!(rep.time_difference < 1e-8);
        prop_assert!(rep.covector_difference < 1e-8);
    }

    #[test]
    fn least_time_event_is_the_lens_map(seed in any::<u64>(), which in 0usize..4, p in any::<bool>()) {
        let m = admissible_media()[which].1.clone();
        let mode = if p { Mode::P } else { Mode::S };
        let g = launch(&m, mode, seed);
        let ctrl = StepControl::default();
        let t = broken_transport(&m, &g, &[mode], 2, 100.0, &ctrl);
        let first = t.first_arrival().unwrap();
        let direct = trace_leg(&m, &g, mode, &ctrl).unwrap();
        prop_assert_eq!(first.mode, mode);
        prop_assert_eq!(first.reflections, 0);
        prop_assert!((first.covector.x() - direct.gamma_out.x()).norm() < 1e-12);
        prop_assert!((first.covector.t() - direct.travel_time).abs() < 1e-12);
    }
}

#[test]
#[allow(clippy::approx_constant)]
fn fan_chord_times() {
    let m = unit();
    let fan: Vec<_> = [0.0, 30.0, 45.0].iter().map(|&d| south_pole(&m, Mode::S, d)).collect();
    let rows = lens_map_table(&m, Mode::S, &fan, &StepControl::default());
    for (row, want) in rows.iter().zip([2.0, 1.73205, 1.41421]) {
        let t = row.result.as_ref().unwrap().travel_time;
        assert!((t - want).abs() < 1e-5, "{t} vs {want}");
    }
}

#[test]
fn identical_media_give_identical_tables() {
    let ctrl = StepControl::default();
    let (a, b) = (potential_stress(), potential_stress());
    let fan: Vec<_> = (0..8).map(|i| south_pole(&a, Mode::P, 8.0 * i as f64)).collect();
    for mode in Mode::BOTH {
        let ta = lens_map_table(&a, mode, &fan, &ctrl);
        let tb = lens_map_table(&b, mode, &fan, &ctrl);
        assert_eq!(ta, tb);
    }
}

#[test]
fn shear_and_compressional_lens_maps_differ_under_stress() {
    let m = constant_stress();
    let ctrl = StepControl::default();
    let g = south_pole(&m, Mode::S, 25.0);
    let s = trace_leg(&m, &g, Mode::S, &ctrl).unwrap();
    let p = trace_leg(&m, &g, Mode::P, &ctrl).unwrap();
    assert!((s.travel_time - p.travel_time).abs() > 0.1);
    assert!((s.gamma_out.x() - p.gamma_out.x()).norm() > 1e-3);
}

#[test]
fn depth_one_compressional_launch() {
    let m = unit();
    let theta = 40f64.to_radians();
    let t = broken_transport(
        &m,
        &south_pole(&m, Mode::P, 40.0),
        &[Mode::P],
        1,
        100.0,
        &StepControl::default(),
    );
    assert_eq!(t.events.len(), 3);
    let c3 = 3f64.sqrt();
    // speeds 1 and √3; Snell sin θ_S = sin θ_P / √3 at the reflection
    let direct = 2.0 * theta.cos() / c3;
    let theta_s = (theta.sin() / c3).asin();
    let ps = direct + 2.0 * theta_s.cos();
    let pp = 2.0 * direct;
    assert!((t.events[0].covector.t() - direct).abs() < 1e-9);
    assert_eq!(t.events[1].mode, Mode::P);
    assert!((t.events[1].covector.t() - pp).abs() < 1e-9);
    assert_eq!(t.events[2].mode, Mode::S);
    assert!((t.events[2].covector.t() - ps).abs() < 1e-9);
    assert_eq!(t.broken_ray(t.events[2].leg).conversions(), [(Mode::P, Mode::S)]);
}
