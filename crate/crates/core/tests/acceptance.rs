//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use elastoray_core::boundary::{
    classify, companion_symbol_check, dn_symbol, lopatinski_margin, residue_matrices, residue_quadrature,
    BoundaryCovector, Region, GLANCING_TOL,
};
use elastoray_core::linalg::{analytic_complement, complexify, max_abs};
use elastoray_core::medium::{Domain, Medium};
use elastoray_core::polarization::{muting_perturbation_control, polarization_frame, Bundle};
use elastoray_core::rays::{
    broken_transport, distance_gradient_check, ray_angle, recover_lens_maps, reflect, trace_leg, trace_ray, BranchKind,
    RecoveryOptions, ShootingOptions, StepControl,
};
use elastoray_core::sampling::{inward_direction, seeded, unit_vector};
use elastoray_core::symbols::principal_symbol_at;
use elastoray_core::{CVec3, Complex64, Mode, SymbolMatrix3, Vec3};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// `ρτ² − (κ ξ·ξ + ξ·Rξ)` straight from the coefficients.
fn q_oracle(m: &Medium, x: &Vec3, mode: Mode, tau: f64, xi: &CVec3) -> Complex64 {
    let c = m.coefficients(x);
    let kappa = match mode {
        Mode::S => c.mu,
        Mode::P => c.lambda + 2.0 * c.mu,
    };
    let r = c.r().map(|v| Complex64::new(v, 0.0));
    let xx: Complex64 = xi.iter().map(|v| v * v).sum();
    let xrx = xi.dot(&(r * xi));
    Complex64::new(c.rho * tau * tau, 0.0) - xx * kappa - xrx
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let media = [unit(), constant_stress(), potential_stress()];
    let mut rng = seeded(101);
    let (mut worst_prod, mut worst_det) = (0.0f64, 0.0f64);
    let n = 10_000;
    for i in 0..n {
        let m = &media[i % 3];
        let x = uniform_in_ball(&mut rng, 1.0);
        let tau = rng.random_range(-3.0..3.0);
        let re = Vec3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let im = if i % 2 == 0 {
            Vec3::zeros()
        } else {
            Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
        };
        let xi = CVec3::new(
            Complex64::new(re.x, im.x),
            Complex64::new(re.y, im.y),
            Complex64::new(re.z, im.z),
        );
        let sym = principal_symbol_at(&m.coefficients(&x), tau, &xi).unwrap();
        let qs = q_oracle(m, &x, Mode::S, tau, &xi);
        let qp = q_oracle(m, &x, Mode::P, tau, &xi);
        let scale_p = max_abs(&sym.p);
        let prod = sym.p_tilde * sym.p - SymbolMatrix3::identity() * (qs * qp);
        worst_prod = worst_prod.max(max_abs(&prod) / (scale_p * max_abs(&sym.p_tilde)));
        let det = sym.p.determinant();
        worst_det = worst_det.max((det - qs * qs * qp).norm() / scale_p.powi(3));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_prod <= 1e-10 && worst_det <= 1e-10 && secs < 5.0,
        format!("{n} samples, 3 media: max rel |p~p - qSqP Id| = {worst_prod:.2e}, max rel |det p - qS^2 qP| = {worst_det:.2e}, {secs:.2}s"),
    )
}

fn criterion_2() -> Outcome {
    let media = admissible_media();
    let p = params();
    let mut rng = seeded(202);
    let (mut worst_q, mut worst_a1) = (0.0f64, 0.0f64);
    let mut errors = 0;
    let n = 100;
    for i in 0..n {
        let m = &media[i % media.len()].1;
        let g = non_glancing(m, p.delta, 1e-3, &mut rng);
        let coef = m.coefficients(&g.x());
        let Ok(r) = residue_matrices(m, &g) else {
            errors += 1;
            continue;
        };
        let q = residue_quadrature(&coef, &g, &r.roots, 256).unwrap();
        worst_q = worst_q.max(max_abs(&(q.a0 - r.a0))).max(max_abs(&(q.a1 - r.a1)));
        // v·ξ_P = 0 and v ∈ Cξ_S
        let xs = r.roots.s.covector;
        let xp = r.roots.p.covector;
        for v in analytic_complement(&xp) {
            worst_a1 = worst_a1.max((r.a1 * v - r.a0 * v * r.roots.s.selected).norm());
        }
        let v = xs / Complex64::new(xs.norm(), 0.0);
        worst_a1 = worst_a1.max((r.a1 * v - r.a0 * v * r.roots.p.selected).norm());
    }
    outcome(
        errors == 0 && worst_q <= 1e-8 && worst_a1 <= 1e-12,
        format!("{n} covectors: max |A_j closed - quadrature| = {worst_q:.2e}, max A-one residual = {worst_a1:.2e}, residue errors = {errors}"),
    )
}

fn criterion_3() -> Outcome {
    let media = admissible_media();
    let p = params();
    let mut rng = seeded(303);
    let mut counts = [0usize; 3];
    let mut worst = 0.0f64;
    let mut total = 0;
    let mut attempts = 0;
    while (counts.iter().any(|&c| c < 25) || total < 100) && attempts < 100_000 {
        attempts += 1;
        let m = &media[attempts % media.len()].1;
        let g = non_glancing(m, p.delta, 1e-3, &mut rng);
        let label = classify(m, &g, &p, GLANCING_TOL);
        let slot = match label.region {
            Region::HyperbolicP => 0,
            Region::Mixed => 1,
            Region::EllipticS => 2,
            Region::Glancing => continue,
        };
        if counts[slot] >= 50 {
            continue;
        }
        counts[slot] += 1;
        total += 1;
        worst = worst.max(dn_symbol(m, &g).unwrap().relative_difference);
    }
    let m = unit();
    let g = BoundaryCovector::new(&Domain::UnitBall, 0.0, Vec3::z(), 2.0, Vec3::x()).unwrap();
    let d = dn_symbol(&m, &g).unwrap();
    let sh = d.explicit * complexify(&Vec3::y()) - complexify(&Vec3::y()) * Complex64::new(3f64.sqrt(), 0.0);
    let xp = Vec3::new(1.0, 0.0, 1.0 / 3f64.sqrt());
    let a = complexify(&xp.normalize());
    let pv = d.explicit * a - complexify(&Vec3::new(1.0, 0.0, 3f64.sqrt()));
    let residue_route = (d.residue * a - complexify(&Vec3::new(1.0, 0.0, 3f64.sqrt()))).norm();
    let hand = sh.norm().max(pv.norm()).max(residue_route);
    outcome(
        counts.iter().all(|&c| c >= 25) && worst <= 1e-10 && hand <= 1e-10,
        format!(
            "{total} covectors (H_P {}, mixed {}, E_S {}): max rel route difference = {worst:.2e}; hand actions error = {hand:.2e}",
            counts[0], counts[1], counts[2]
        ),
    )
}

fn criterion_4() -> Outcome {
    let p = params();
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, m) in admissible_media() {
        let a = lopatinski_margin(&m, &p, 100_000, 404).unwrap();
        let b = lopatinski_margin(&m, &p, 200_000, 404).unwrap();
        let drift = (a.min_margin - b.min_margin).abs() / a.min_margin;
        let pass = a.in_class && a.passed() && b.passed() && a.min_margin > 0.0 && drift <= 0.1;
        ok &= pass;
        lines.push(format!(
            "{name}: min {:.4} / {:.4} (drift {:.1}%)",
            a.min_margin,
            b.min_margin,
            100.0 * drift
        ));
    }
    outcome(ok, lines.join("; "))
}

fn criterion_5() -> Outcome {
    let media = admissible_media();
    let p = params();
    let mut rng = seeded(505);
    let (mut idem, mut comp, mut cross, mut mute) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut control = f64::INFINITY;
    let mut bad_ranks = 0;
    let mut counts = [0usize; 2];
    let mut i = 0;
    while counts[0] < 100 || counts[1] < 100 {
        i += 1;
        let m = &media[i % media.len()].1;
        let g = non_glancing(m, p.delta, 1e-2, &mut rng);
        if g.xi().norm() < 1e-3 {
            continue;
        }
        let region = classify(m, &g, &p, GLANCING_TOL).region;
        let (slot, expected): (usize, &[usize]) = match region {
            Region::HyperbolicP => (0, &[2, 2, 1, 1]),
            Region::Mixed => (1, &[2, 2, 2]),
            _ => continue,
        };
        if counts[slot] >= 100 {
            continue;
        }
        counts[slot] += 1;
        let f = polarization_frame(m, &g).unwrap();
        let ranks: Vec<usize> = f.ranks().iter().map(|r| r.1).collect();
        if ranks != expected || (slot == 1) != f.block(Bundle::P).is_some() {
            bad_ranks += 1;
        }
        idem = idem.max(f.idempotence_residual());
        comp = comp.max(f.completeness_residual());
        cross = cross.max(f.cross_residual());
        let ctl = muting_perturbation_control(m, &g, 0.1, i as u64).unwrap();
        mute = mute.max(ctl.exact);
        control = control.min(ctl.perturbed);
    }
    outcome(
        bad_ranks == 0 && idem <= 1e-10 && comp <= 1e-10 && cross <= 1e-10 && mute <= 1e-10 && control > 1e-2,
        format!(
            "H_P {} / mixed {}: rank mismatches {bad_ranks}, idempotence {idem:.2e}, completeness {comp:.2e}, cross {cross:.2e}, muting {mute:.2e}, min perturbed {control:.3}",
            counts[0], counts[1]
        ),
    )
}

fn criterion_6() -> Outcome {
    let m = unit();
    let ctrl = StepControl::default();
    let mut rng = seeded(606);
    let (mut worst_t, mut worst_x, mut worst_snell) = (0.0f64, 0.0f64, 0.0f64);
    let (mut evanescent_ok, mut evanescent_seen, mut traced_seen) = (true, 0, 0);
    let crit = (1.0 / 3f64.sqrt()).asin();
    for i in 0..100 {
        let mode = if i % 2 == 0 { Mode::S } else { Mode::P };
        let c = if mode == Mode::S { 1.0 } else { 3f64.sqrt() };
        let x = unit_vector(&mut rng);
        let d = inward_direction(&x, 1.45, &mut rng);
        let g = BoundaryCovector::from_direction(&m, mode, 0.0, x, 1.0, &d).unwrap();
        let e = trace_leg(&m, &g, mode, &ctrl).unwrap();
        let chord = -2.0 * x.dot(&d);
        worst_t = worst_t.max((e.travel_time - chord / c).abs());
        let y = x + d * chord;
        worst_x = worst_x.max((e.gamma_out.x() - y).norm());

        // Snell at the arrival y with incidence θ between d and the normal y
        let sin_in = (d - y * d.dot(&y)).norm();
        let theta = sin_in.asin();
        let leg = trace_ray(&m, &g, mode, &ctrl).unwrap();
        let r = reflect(&m, &leg.exit).unwrap();
        for b in &r.branches {
            let c_out = if b.mode == Mode::S { 1.0 } else { 3f64.sqrt() };
            let sin_out = sin_in * c_out / c;
            match b.kind {
                BranchKind::Traced(s) => {
                    traced_seen += 1;
                    let expect = if b.mode == mode { theta } else { sin_out.asin() };
                    worst_snell = worst_snell.max((ray_angle(&m, &s, &y) - expect).abs());
                    if sin_out >= 1.0 {
                        evanescent_ok = false;
                    }
                }
                BranchKind::Evanescent => {
                    evanescent_seen += 1;
                    if !(mode == Mode::S && b.mode == Mode::P && theta > crit) {
                        evanescent_ok = false;
                    }
                }
                BranchKind::Glancing { .. } => {}
            }
        }
    }
    let pass = worst_t <= 1e-8 && worst_x <= 1e-8 && worst_snell <= 1e-8 && evanescent_ok && evanescent_seen > 0;
    outcome(
        pass,
        format!(
            "100 legs: max |t - chord/c| = {worst_t:.2e}, max exit error = {worst_x:.2e}, max Snell error = {worst_snell:.2e}, traced {traced_seen}, evanescent {evanescent_seen} (all S->P beyond {:.4} rad: {evanescent_ok})",
            crit
        ),
    )
}

fn criterion_7() -> Outcome {
    let ctrl = StepControl::default().dense();
    let mut rng = seeded(707);
    let (mut drift, mut refl) = (0.0f64, 0.0f64);
    let mut tau_exact = true;
    let mut legs = 0;
    for m in [bump(), potential_stress(), constant_stress()] {
        for _ in 0..10 {
            let x = unit_vector(&mut rng);
            let d = inward_direction(&x, 1.2, &mut rng);
            let tau = rng.random_range(0.5..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let g = BoundaryCovector::from_direction(&m, Mode::S, 0.0, x, tau, &d).unwrap();
            for mode in Mode::BOTH {
                let Ok(leg) = trace_ray(&m, &g, mode, &ctrl) else {
                    continue;
                };
                legs += 1;
                for s in &leg.samples {
                    drift = drift.max(s.hamiltonian_residual(&m) / (tau * tau));
                    tau_exact &= s.tau.to_bits() == tau.to_bits();
                }
                if let Ok(r) = reflect(&m, &leg.exit) {
                    refl = refl.max(r.invariant_residual() / (1.0 + r.gamma.frequency()));
                    tau_exact &= r.traced().all(|s| s.tau.to_bits() == tau.to_bits());
                }
            }
            let t = broken_transport(&m, &g, &Mode::BOTH, 2, 50.0, &StepControl::default());
            for l in &t.legs {
                drift = drift.max(l.max_drift);
                tau_exact &= l.entry.gamma_out.tau().to_bits() == tau.to_bits();
            }
        }
    }
    outcome(
        drift <= 1e-9 && tau_exact && refl <= 1e-14,
        format!("{legs} dense legs + transports: max |H|/tau^2 = {drift:.2e}, tau bit-exact = {tau_exact}, reflection invariant residual = {refl:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let m = bump();
    let ctrl = StepControl::default();
    let mut rng = seeded(808);
    let mut worst = 0.0f64;
    let mut done = 0;
    let mut failures = 0;
    while done < 20 {
        let x = unit_vector(&mut rng);
        let y = unit_vector(&mut rng);
        let angle = x.dot(&y).clamp(-1.0, 1.0).acos();
        if !(0.6..2.0).contains(&angle) {
            continue;
        }
        let mode = if done % 2 == 0 { Mode::S } else { Mode::P };
        let opts = ShootingOptions {
            seed: done as u64,
            ..Default::default()
        };
        match distance_gradient_check(&m, mode, &x, &y, 1e-4, &opts, &ctrl) {
            Ok(chk) => worst = worst.max(chk.relative_error),
            Err(_) => failures += 1,
        }
        done += 1;
    }
    outcome(
        failures == 0 && worst <= 1e-3,
        format!(
            "20 pairs in the radial bump medium: max relative gradient error = {worst:.2e}, unconnected = {failures}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let ctrl = StepControl::default();
    let opts = RecoveryOptions::default();
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, m) in [("conformal bump", bump()), ("constant R", constant_stress())] {
        let mut rng = seeded(909);
        let probes: Vec<BoundaryCovector> = (0..50)
            .map(|_| {
                let x = unit_vector(&mut rng);
                let d = inward_direction(&x, 0.5, &mut rng);
                BoundaryCovector::from_direction(&m, Mode::P, 0.0, x, 1.0, &d).unwrap()
            })
            .collect();
        let rep = recover_lens_maps(&m, &probes, &opts, &ctrl);
        let both = rep.recovered(Mode::S).min(rep.recovered(Mode::P));
        let pass = rep.passed() && both == 50 && rep.max_mode_gap() > 0.1;
        ok &= pass;
        lines.push(format!(
            "{name}: S {} / P {} recovered, max discrepancy {:.2e}, max |tS - tP| {:.3}",
            rep.recovered(Mode::S),
            rep.recovered(Mode::P),
            rep.max_discrepancy(),
            rep.max_mode_gap()
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs < 60.0, format!("{}; {secs:.1}s", lines.join("; ")))
}

fn criterion_10() -> Outcome {
    let media = admissible_media();
    let p = params();
    let mut rng = seeded(1010);
    let (mut ident, mut eig) = (0.0f64, 0.0f64);
    let mut kernels_ok = true;
    for i in 0..100 {
        let m = &media[i % media.len()].1;
        let g = non_glancing(m, p.delta, 1e-3, &mut rng);
        let zeta = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let rep = companion_symbol_check(m, &g, zeta).unwrap();
        ident = ident.max(rep.identity_residual);
        eig = eig.max(rep.eigenvalue_mismatch);
        kernels_ok &= rep.kernels.iter().all(|k| k.passed(1e-10 * (1.0 + rep.symbol.eta)));
    }
    outcome(
        ident <= 1e-12 && eig <= 1e-10 && kernels_ok,
        format!("100 covectors: max identity residual = {ident:.2e}, max eigenvalue mismatch = {eig:.2e}, kernel rank/span = {kernels_ok}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("symbol factorization", criterion_1),
        ("residue oracle", criterion_2),
        ("DN dual-route agreement", criterion_3),
        ("Lopatinski margin", criterion_4),
        ("polarization frames and muting", criterion_5),
        ("constant-medium ray exactness", criterion_6),
        ("conservation along legs", criterion_7),
        ("generating-function identity", criterion_8),
        ("lens-map recovery experiment", criterion_9),
        ("companion-symbol oracle", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let tag = format!("criterion {}", i + 1);
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| tag.ends_with(f.as_str()) || name.contains(f.as_str()))
        {
            continue;
        }
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} {tag:<12} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
