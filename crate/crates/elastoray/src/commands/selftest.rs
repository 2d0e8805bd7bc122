use anyhow::Result;
use elastoray_core::boundary::{
    char_roots, closed_form_residue, companion_symbol_check, dn_symbol, lopatinski_margin, residue_matrices,
    residue_quadrature, BoundaryCovector,
};
use elastoray_core::linalg::{analytic_complement, max_abs};
use elastoray_core::medium::{check_class_membership, ClassParams, Medium, CLASS_GRID};
use elastoray_core::polarization::{mute_symbol, muting_perturbation_control, muting_residual, polarization_frame};
use elastoray_core::rays::{homogeneity_check, recover_probe, reflect, trace_leg, trace_ray, StepControl};
use elastoray_core::sampling::{inward_direction, seeded, SampleRng};
use elastoray_core::symbols::{char_symbol, principal_symbol_at};
use elastoray_core::{CVec3, Complex64, Mode, SymbolMatrix3, Vec3};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{non_glancing_sample, Context, Outcome};
use crate::cli::SelftestArgs;
use crate::report::Failures;

struct Check {
    name: &'static str,
    value: f64,
    tol: f64,
    /// `value ≤ tol` when true, `value > tol` otherwise.
    upper: bool,
    samples: usize,
}

impl Check {
    fn at_most(name: &'static str, value: f64, tol: f64, samples: usize) -> Self {
        Check {
            name,
            value,
            tol,
            upper: true,
            samples,
        }
    }

    fn above(name: &'static str, value: f64, tol: f64, samples: usize) -> Self {
        Check {
            name,
            value,
            tol,
            upper: false,
            samples,
        }
    }

    fn passed(&self) -> bool {
        if self.upper {
            self.value <= self.tol
        } else {
            self.value > self.tol
        }
    }
}

fn interior_point(m: &Medium, rng: &mut SampleRng) -> Vec3 {
    let ext = m.domain.half_extents();
    loop {
        let x = Vec3::from_fn(|i, _| rng.random_range(-ext[i]..ext[i]));
        if m.domain.contains(&x) {
            return x;
        }
    }
}

fn launch(m: &Medium, rng: &mut SampleRng) -> Option<BoundaryCovector> {
    let x = elastoray_core::sampling::boundary_point(&m.domain, rng);
    let dir = inward_direction(&m.domain.normal(&x), 1.0, rng);
    let tau = rng.random_range(0.5..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    BoundaryCovector::from_direction(m, Mode::P, 0.0, x, tau, &dir).ok()
}

fn factorization(m: &Medium, n: usize, rng: &mut SampleRng) -> (f64, f64, bool) {
    let (mut prod, mut det) = (0.0f64, 0.0f64);
    let mut ordered = true;
    for i in 0..n {
        let x = interior_point(m, rng);
        let tau = rng.random_range(-3.0..3.0);
        let xi = CVec3::from_fn(|_, _| {
            let im = if i % 2 == 0 { 0.0 } else { rng.random_range(-1.0..1.0) };
            Complex64::new(rng.random_range(-2.0..2.0), im)
        });
        let c = m.coefficients(&x);
        let Ok(sym) = principal_symbol_at(&c, tau, &xi) else {
            continue;
        };
        let qs = char_symbol(&c, Mode::S, tau, &xi);
        let qp = char_symbol(&c, Mode::P, tau, &xi);
        let scale = max_abs(&sym.p);
        prod = prod.max(
            max_abs(&(sym.p_tilde * sym.p - SymbolMatrix3::identity() * (qs * qp))) / (scale * max_abs(&sym.p_tilde)),
        );
        det = det.max((sym.p.determinant() - qs * qs * qp).norm() / scale.powi(3));
        if i % 2 == 0 && xi.norm() > 0.0 {
            ordered &= qp.re < qs.re;
        }
    }
    (prod, det, ordered)
}

pub fn selftest(ctx: &Context, args: &SelftestArgs) -> Result<Outcome> {
    let m = &ctx.medium;
    let n = args.fan_n;
    let delta = ctx.delta(args.delta);
    let params = ClassParams::new(ctx.params.l, ctx.params.eps, delta)?;
    let ctrl = StepControl::default();
    let mut checks = Vec::new();
    let mut rng = seeded(ctx.seed);

    let class = check_class_membership(m, &params, CLASS_GRID)?;
    checks.push(Check::at_most(
        "class_membership",
        if class.passed() { 0.0 } else { 1.0 },
        0.0,
        class.points,
    ));

    let (prod, det, ordered) = factorization(m, 20 * n, &mut rng);
    checks.push(Check::at_most("factorization", prod, 1e-10, 20 * n));
    checks.push(Check::at_most("determinant", det, 1e-10, 20 * n));
    checks.push(Check::at_most(
        "compressional_below_shear",
        if ordered { 0.0 } else { 1.0 },
        0.0,
        10 * n,
    ));

    let covectors: Vec<_> = (0..n).map(|_| non_glancing_sample(m, delta, &mut rng)).collect();
    let zetas: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
        .collect();
    let symbol_rows: Vec<_> = covectors
        .par_iter()
        .zip(&zetas)
        .enumerate()
        .map(|(i, (g, z))| -> elastoray_core::Result<[f64; 9]> {
            let r = residue_matrices(m, g)?;
            let q = residue_quadrature(&m.coefficients(&g.x()), g, &r.roots, 256)?;
            let quad = max_abs(&(q.a0 - r.a0)).max(max_abs(&(q.a1 - r.a1)));
            let closed = max_abs(&(closed_form_residue(&r.roots, 1)? - r.a1));
            let mut a_one: f64 = 0.0;
            for v in analytic_complement(&r.roots.p.covector) {
                a_one = a_one.max((r.a1 * v - r.a0 * v * r.roots.s.selected).norm());
            }
            let xs = r.roots.s.covector;
            let v = xs / Complex64::new(xs.norm(), 0.0);
            a_one = a_one.max((r.a1 * v - r.a0 * v * r.roots.p.selected).norm());
            let dn = dn_symbol(m, g)?;
            let comp = companion_symbol_check(m, g, *z)?;
            let kernels = comp.kernels.iter().all(|k| k.passed(1e-10 * (1.0 + comp.symbol.eta)));
            let (mut algebra, mut muting, mut control) = (0.0, 0.0, f64::INFINITY);
            if char_roots(m, g)?.s.is_real() {
                if let Ok(f) = polarization_frame(m, g) {
                    algebra = f
                        .idempotence_residual()
                        .max(f.completeness_residual())
                        .max(f.cross_residual());
                    muting = muting_residual(&f, &mute_symbol(g)?);
                    control = muting_perturbation_control(m, g, 0.1, ctx.seed.wrapping_add(i as u64))?.perturbed;
                }
            }
            Ok([
                quad,
                closed,
                a_one,
                dn.relative_difference,
                comp.identity_residual,
                comp.eigenvalue_mismatch,
                if kernels { 0.0 } else { 1.0 },
                algebra.max(muting),
                control,
            ])
        })
        .collect();
    let mut errors = 0;
    let mut worst = [0.0f64; 9];
    worst[8] = f64::INFINITY;
    for row in &symbol_rows {
        match row {
            Ok(v) => {
                for k in 0..8 {
                    worst[k] = worst[k].max(v[k]);
                }
                worst[8] = worst[8].min(v[8]);
            }
            Err(_) => errors += 1,
        }
    }
    checks.push(Check::at_most("symbol_layer_errors", errors as f64, 0.0, n));
    checks.push(Check::at_most("residue_quadrature", worst[0], 1e-8, n));
    checks.push(Check::at_most("residue_closed_form", worst[1], 1e-12, n));
    checks.push(Check::at_most("residue_relations", worst[2], 1e-12, n));
    checks.push(Check::at_most("dn_routes", worst[3], 1e-10, n));
    checks.push(Check::at_most("companion_identity", worst[4], 1e-12, n));
    checks.push(Check::at_most("companion_eigenvalues", worst[5], 1e-10, n));
    checks.push(Check::at_most("companion_kernels", worst[6], 0.0, n));
    checks.push(Check::at_most("polarization_projectors_and_muting", worst[7], 1e-10, n));
    if worst[8].is_finite() {
        checks.push(Check::above("muting_perturbation_control", worst[8], 1e-2, n));
    }

    let lop = lopatinski_margin(m, &params, 100 * n, ctx.seed)?;
    let lop2 = lopatinski_margin(m, &params, 200 * n, ctx.seed.wrapping_add(1))?;
    if lop.asserted() {
        checks.push(Check::above(
            "lopatinski_margin",
            lop.min_margin,
            0.0,
            lop.samples.len(),
        ));
        let drift = (lop2.min_margin - lop.min_margin).abs() / lop.min_margin;
        checks.push(Check::at_most("lopatinski_stability", drift, 0.1, lop2.samples.len()));
    }

    let rays_n = (n / 5).max(1);
    let launches: Vec<_> = (0..rays_n).filter_map(|_| launch(m, &mut rng)).collect();
    let ks: Vec<f64> = launches.iter().map(|_| rng.random_range(0.2..5.0)).collect();
    let ray_rows: Vec<_> = launches
        .par_iter()
        .zip(&ks)
        .map(|(g, &k)| {
            let mut v = [0.0f64; 5];
            let mut ok = true;
            for mode in Mode::BOTH {
                let Ok(leg) = trace_ray(m, g, mode, &ctrl) else {
                    ok = false;
                    continue;
                };
                v[0] = v[0].max(leg.max_drift);
                if leg.exit.tau != g.tau() {
                    v[1] = 1.0;
                }
                if let Ok(r) = reflect(m, &leg.exit) {
                    v[2] = v[2].max(r.invariant_residual() / (1.0 + r.gamma.frequency()));
                }
                match trace_leg(m, &leg.entry.gamma_out.time_reversed(), mode, &ctrl) {
                    Ok(back) => v[3] = v[3].max((back.gamma_out.x() - g.x()).norm()),
                    Err(_) => ok = false,
                }
                match homogeneity_check(m, g, mode, k, &ctrl) {
                    Ok(h) => v[4] = v[4].max(h.position_difference.max(h.time_difference).max(h.covector_difference)),
                    Err(_) => ok = false,
                }
            }
            (v, ok)
        })
        .collect();
    let mut rw = [0.0f64; 5];
    let mut ray_errors = 0;
    for (v, ok) in &ray_rows {
        for k in 0..5 {
            rw[k] = rw[k].max(v[k]);
        }
        ray_errors += usize::from(!ok);
    }
    checks.push(Check::at_most("ray_errors", ray_errors as f64, 0.0, launches.len()));
    checks.push(Check::at_most("hamiltonian_drift", rw[0], 1e-9, 2 * launches.len()));
    checks.push(Check::at_most("tau_conservation", rw[1], 0.0, 2 * launches.len()));
    checks.push(Check::at_most(
        "reflection_invariants",
        rw[2],
        1e-14,
        2 * launches.len(),
    ));
    checks.push(Check::at_most("time_reversal", rw[3], 1e-8, 2 * launches.len()));
    checks.push(Check::at_most("homogeneity", rw[4], 1e-8, 2 * launches.len()));

    let probes: Vec<_> = launches
        .iter()
        .map(|g| if g.tau() < 0.0 { g.time_reversed() } else { *g })
        .collect();
    let recovered: Vec<_> = probes
        .par_iter()
        .map(|p| recover_probe(m, p, &Default::default(), &ctrl))
        .collect();
    let mut rec_worst: f64 = 0.0;
    let mut rec_missing = 0;
    for p in &recovered {
        for mode in Mode::BOTH {
            match p.discrepancy(mode) {
                Some(d) => rec_worst = rec_worst.max(d),
                None => rec_missing += 1,
            }
        }
    }
    checks.push(Check::at_most(
        "recovery_missing",
        rec_missing as f64,
        0.0,
        probes.len(),
    ));
    checks.push(Check::at_most("recovery_discrepancy", rec_worst, 1e-6, probes.len()));

    let mut failures = Failures::default();
    let rows: Vec<Value> = checks
        .iter()
        .map(|c| {
            failures.check(c.passed(), || {
                let rel = if c.upper { "exceeds" } else { "is not above" };
                format!("{}: {:e} {rel} {:e}", c.name, c.value, c.tol)
            });
            json!({
                "name": c.name,
                "passed": c.passed(),
                "value": c.value,
                "tol": c.tol,
                "bound": if c.upper { "max" } else { "min" },
                "samples": c.samples,
            })
        })
        .collect();
    Ok(Outcome {
        results: json!({ "delta": delta, "in_class": class.passed(), "checks": rows }),
        failures,
    })
}
