use std::f64::consts::PI;

use anyhow::{Context as _, Result};
use elastoray_core::boundary::{
    char_roots, classify_at, dn_symbol, lopatinski_margin, residue_quadrature, BoundaryCovector, Contour, Region,
    GLANCING_TOL,
};
use elastoray_core::linalg::{max_abs, tangent_frame};
use elastoray_core::medium::{fibonacci_sphere, ClassParams};
use elastoray_core::polarization::{mute_symbol, muting_perturbation_control, muting_residual, polarization_frame};
use elastoray_core::sampling::seeded;
use elastoray_core::{Mode, SymbolMatrix3};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{boundary_point, covector_fields, csv_writer, non_glancing_sample, Context, Outcome, COVECTOR_HEADER};
use crate::cli::{ClassifyArgs, RootsArgs, SampleArgs};
use crate::encode::{cmat3, covector, error, label, mode_roots};
use crate::report::Failures;

const QUADRATURE_NODES: usize = 256;
const QUADRATURE_TOL: f64 = 1e-8;
const CONTROL_AMPLITUDE: f64 = 0.1;
const CONTROL_FLOOR: f64 = 1e-2;

fn region_counts<'a>(regions: impl Iterator<Item = &'a Region>) -> Value {
    let mut counts = serde_json::Map::new();
    for r in [Region::HyperbolicP, Region::Mixed, Region::EllipticS, Region::Glancing] {
        counts.insert(r.as_str().into(), json!(0));
    }
    for r in regions {
        let c = counts.get_mut(r.as_str()).expect("all regions listed");
        *c = json!(c.as_u64().unwrap_or(0) + 1);
    }
    Value::Object(counts)
}

fn write_rows(ctx: &Context, rows: impl Iterator<Item = (BoundaryCovector, &'static str, Option<f64>)>) -> Result<()> {
    let Some(path) = &ctx.csv else { return Ok(()) };
    let mut w = csv_writer(path)?;
    let mut header: Vec<&str> = COVECTOR_HEADER.to_vec();
    header.extend(["label", "margin"]);
    w.write_record(&header)?;
    for (g, label, margin) in rows {
        let mut rec: Vec<String> = covector_fields(&g).to_vec();
        rec.push(label.into());
        rec.push(margin.map(|m| m.to_string()).unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush().context("cannot write CSV")?;
    Ok(())
}

pub fn classify(ctx: &Context, args: &ClassifyArgs) -> Result<Outcome> {
    let m = &ctx.medium;
    let delta = ctx.delta(args.delta);
    let mut grid = Vec::new();
    for dir in fibonacci_sphere(args.fan_n) {
        let x = m.domain.boundary_point(&dir);
        let (e1, e2) = tangent_frame(&m.domain.normal(&x));
        for d in 0..args.directions {
            let th = 2.0 * PI * d as f64 / args.directions as f64;
            for k in 0..args.magnitudes {
                let frac = if args.magnitudes > 1 {
                    k as f64 / (args.magnitudes - 1) as f64
                } else {
                    0.0
                };
                let xi = (e1 * th.cos() + e2 * th.sin()) * (frac * args.tau.abs() / delta);
                grid.push(BoundaryCovector::restrict(&m.domain, 0.0, x, args.tau, &xi)?);
            }
        }
    }
    let labelled: Vec<_> = grid
        .par_iter()
        .map(|g| {
            let l = classify_at(&m.coefficients(&g.x()), g, delta, GLANCING_TOL);
            let margin = match l.region {
                Region::Glancing => None,
                _ => char_roots(m, g).ok().map(|r| r.normalized_lopatinski()),
            };
            (*g, l, margin)
        })
        .collect();
    let mut failures = Failures::default();
    for (i, (_, l, _)) in labelled.iter().enumerate() {
        failures.check(l.is_consistent(), || {
            format!("row {i}: region inclusions violated ({:?}, {:?})", l.s, l.p)
        });
    }
    write_rows(ctx, labelled.iter().map(|(g, l, mg)| (*g, l.region.as_str(), *mg)))?;
    let rows: Vec<Value> = labelled
        .iter()
        .map(|(g, l, mg)| json!({ "covector": covector(g), "label": label(l), "margin": mg }))
        .collect();
    Ok(Outcome {
        results: json!({
            "delta": delta,
            "counts": region_counts(labelled.iter().map(|(_, l, _)| &l.region)),
            "rows": rows,
        }),
        failures,
    })
}

pub fn roots(ctx: &Context, args: &RootsArgs) -> Result<Outcome> {
    let m = &ctx.medium;
    let delta = ctx.delta(args.delta);
    let tol = ctx.tol(1e-10);
    let (x, nu) = boundary_point(m, args.point)?;
    let (e1, _) = tangent_frame(&nu);
    let ratios: Vec<f64> = match &args.ratios {
        Some(r) => r.clone(),
        None => {
            let smax = args.smax.unwrap_or(1.0 / delta);
            let n = args.fan_n;
            (0..n)
                .map(|k| if n > 1 { smax * k as f64 / (n - 1) as f64 } else { 0.0 })
                .collect()
        }
    };
    let mut failures = Failures::default();
    let mut rows = Vec::with_capacity(ratios.len());
    for (i, &s) in ratios.iter().enumerate() {
        let g = BoundaryCovector::restrict(&m.domain, 0.0, x, args.tau, &(e1 * (s * args.tau.abs())))?;
        let coef = m.coefficients(&x);
        let l = classify_at(&coef, &g, delta, GLANCING_TOL);
        let mut row = json!({ "ratio": s, "covector": covector(&g), "label": label(&l) });
        if l.region == Region::Glancing {
            let modes: Vec<&str> = [(Mode::S, l.discriminants.0), (Mode::P, l.discriminants.1)]
                .iter()
                .filter(|(_, d)| d.abs() < GLANCING_TOL)
                .map(|(mode, _)| mode.as_str())
                .collect();
            row["glancing"] = json!(modes);
        } else {
            match char_roots(m, &g) {
                Ok(r) => {
                    let residual = r.residual(&coef, &g);
                    let lop = r.normalized_lopatinski();
                    failures.check(residual <= tol, || {
                        format!("row {i}: root residual {residual:e} exceeds {tol:e}")
                    });
                    failures.check(lop > 0.0, || format!("row {i}: Lopatinski product vanishes"));
                    row["roots"] = json!({ "S": mode_roots(&r.s), "P": mode_roots(&r.p) });
                    row["residual"] = json!(residual);
                    row["lopatinski"] = json!(lop);
                }
                Err(e) => {
                    failures.check(false, || format!("row {i}: {e}"));
                    row["roots"] = error(&e);
                }
            }
        }
        rows.push(row);
    }
    let params = ClassParams::new(ctx.params.l, ctx.params.eps, delta)?;
    let lop = lopatinski_margin(m, &params, args.samples, ctx.seed).context("Lopatinski sampling")?;
    failures.check(lop.passed(), || {
        format!("Lopatinski margin {:e} is not positive", lop.min_margin)
    });
    write_rows(
        ctx,
        lop.samples
            .iter()
            .map(|s| (s.covector, s.region.as_str(), Some(s.margin))),
    )?;
    let region_min: serde_json::Map<String, Value> = [Region::HyperbolicP, Region::Mixed, Region::EllipticS]
        .iter()
        .map(|&r| (r.as_str().to_string(), json!(lop.region_min(r))))
        .collect();
    Ok(Outcome {
        results: json!({
            "point": crate::encode::vec3(&x),
            "rows": rows,
            "lopatinski": {
                "sample_count": lop.sample_count,
                "skipped_near_glancing": lop.skipped,
                "in_class": lop.in_class,
                "asserted": lop.asserted(),
                "min_margin": lop.min_margin,
                "argmin": lop.argmin.map(|s| covector(&s.covector)),
                "region_min": region_min,
            },
        }),
        failures,
    })
}

fn relative(a: &SymbolMatrix3, b: &SymbolMatrix3) -> f64 {
    max_abs(&(a - b)) / max_abs(b).max(f64::MIN_POSITIVE)
}

pub fn dn(ctx: &Context, args: &SampleArgs) -> Result<Outcome> {
    let m = &ctx.medium;
    let delta = ctx.delta(args.delta);
    let tol = ctx.tol(1e-10);
    let mut rng = seeded(ctx.seed);
    let samples: Vec<_> = (0..args.fan_n)
        .map(|_| non_glancing_sample(m, delta, &mut rng))
        .collect();
    let computed: Vec<_> = samples
        .par_iter()
        .map(|g| -> Result<_> {
            let dn = dn_symbol(m, g)?;
            let q = residue_quadrature(&m.coefficients(&g.x()), g, &dn.residues.roots, QUADRATURE_NODES)?;
            Ok((dn, q))
        })
        .collect();
    let mut failures = Failures::default();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, (g, res)) in samples.iter().zip(computed).enumerate() {
        let region = classify_at(&m.coefficients(&g.x()), g, delta, GLANCING_TOL).region;
        match res {
            Ok((dn, q)) => {
                let qa0 = relative(&q.a0, &dn.residues.a0);
                let qa1 = relative(&q.a1, &dn.residues.a1);
                worst = worst.max(dn.relative_difference);
                failures.check(dn.relative_difference <= tol, || {
                    format!("sample {i}: DN routes differ by {:e}", dn.relative_difference)
                });
                failures.check(qa0.max(qa1) <= QUADRATURE_TOL, || {
                    format!("sample {i}: contour quadrature off by {:e}", qa0.max(qa1))
                });
                rows.push(json!({
                    "covector": covector(g),
                    "region": region.as_str(),
                    "dn": cmat3(&dn.explicit),
                    "route_difference": dn.relative_difference,
                    "a0_condition": dn.residues.a0_condition,
                    "quadrature": {
                        "contour": match q.contour { Contour::Circle { .. } => "circle", Contour::RootCircles { .. } => "root_circles" },
                        "a0_error": qa0,
                        "a1_error": qa1,
                    },
                }));
            }
            Err(e) => {
                failures.check(false, || format!("sample {i}: {e}"));
                rows.push(json!({ "covector": covector(g), "region": region.as_str(), "error": e.to_string() }));
            }
        }
    }
    Ok(Outcome {
        results: json!({ "delta": delta, "tol": tol, "max_route_difference": worst, "samples": rows }),
        failures,
    })
}

pub fn frame(ctx: &Context, args: &SampleArgs) -> Result<Outcome> {
    let m = &ctx.medium;
    let delta = ctx.delta(args.delta);
    let tol = ctx.tol(1e-10);
    let mut rng = seeded(ctx.seed);
    let mut samples = Vec::with_capacity(args.fan_n);
    while samples.len() < args.fan_n {
        let g = non_glancing_sample(m, delta, &mut rng);
        if char_roots(m, &g).is_ok_and(|r| r.s.is_real()) {
            samples.push(g);
        }
    }
    let computed: Vec<_> = samples
        .par_iter()
        .enumerate()
        .map(|(i, g)| -> Result<_> {
            let f = polarization_frame(m, g)?;
            let mute = mute_symbol(g)?;
            let control = muting_perturbation_control(m, g, CONTROL_AMPLITUDE, ctx.seed.wrapping_add(i as u64))?;
            Ok((muting_residual(&f, &mute), f, control))
        })
        .collect();
    let mut failures = Failures::default();
    let mut rows = Vec::new();
    let mut skipped = 0;
    for (i, (g, res)) in samples.iter().zip(computed).enumerate() {
        let (muting, f, control) = match res {
            Ok(v) => v,
            Err(e) => {
                skipped += 1;
                rows.push(json!({ "covector": covector(g), "skipped": e.to_string() }));
                continue;
            }
        };
        let ranks: Vec<Value> = f
            .ranks()
            .iter()
            .map(|(b, r)| json!({ "bundle": b.as_str(), "rank": r }))
            .collect();
        let expected = |mode: Mode| match mode {
            Mode::S => 2,
            Mode::P if f.p_hyperbolic() => 1,
            Mode::P => 2,
        };
        let ranks_ok = f.ranks().iter().all(|(b, r)| *r == expected(b.mode()));
        let algebra = f
            .idempotence_residual()
            .max(f.completeness_residual())
            .max(f.cross_residual());
        failures.check(ranks_ok, || format!("sample {i}: unexpected bundle ranks"));
        failures.check(algebra <= tol, || format!("sample {i}: projector residual {algebra:e}"));
        failures.check(muting <= tol, || format!("sample {i}: muting residual {muting:e}"));
        failures.check(control.perturbed > CONTROL_FLOOR, || {
            format!(
                "sample {i}: perturbed muting control {:e} not detected",
                control.perturbed
            )
        });
        rows.push(json!({
            "covector": covector(g),
            "p_hyperbolic": f.p_hyperbolic(),
            "ranks": ranks,
            "condition": f.condition,
            "idempotence": f.idempotence_residual(),
            "completeness": f.completeness_residual(),
            "cross": f.cross_residual(),
            "muting_residual": muting,
            "perturbed_control": control.perturbed,
        }));
    }
    Ok(Outcome {
        results: json!({
            "delta": delta,
            "tol": tol,
            "control_amplitude": CONTROL_AMPLITUDE,
            "skipped": skipped,
            "samples": rows,
        }),
        failures,
    })
}
