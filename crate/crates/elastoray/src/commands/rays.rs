use anyhow::{Context as _, Result};
use elastoray_core::boundary::BoundaryCovector;
use elastoray_core::medium::fibonacci_sphere;
use elastoray_core::rays::{
    boundary_distance, broken_transport, recover_probe, trace_ray, BranchNote, RayLeg, RecoveryOptions, RecoveryReport,
    ShootingOptions, StepControl,
};
use elastoray_core::sampling::{boundary_point as sample_boundary_point, inward_direction, seeded};
use elastoray_core::{Mode, Vec3};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{boundary_point, covector_fields, csv_writer, launch_direction, Context, Outcome, COVECTOR_HEADER};
use crate::cli::{DistanceArgs, LensmapArgs, RecoverArgs, TraceArgs};
use crate::encode::{covector, lens_entry, state, vec3};
use crate::report::Failures;

/// `(t, x, τ)` identical and `ξ_|` equal up to rounding.
const REFLECTION_TOL: f64 = 1e-12;

fn check_leg(failures: &mut Failures, what: &str, leg: &RayLeg, tol: f64) {
    failures.check(leg.max_drift <= tol, || {
        format!("{what}: Hamiltonian drift {:e} exceeds {tol:e}", leg.max_drift)
    });
    failures.check(leg.exit.tau == leg.start.tau, || {
        format!("{what}: tau changed along the leg")
    });
}

fn leg_value(leg: &RayLeg) -> Value {
    json!({
        "entry": lens_entry(&leg.entry),
        "start": state(&leg.start),
        "exit": state(&leg.exit),
        "steps": leg.steps,
        "max_drift": leg.max_drift,
    })
}

fn write_samples(ctx: &Context, legs: &[(usize, RayLeg)]) -> Result<()> {
    let Some(path) = &ctx.csv else { return Ok(()) };
    let mut w = csv_writer(path)?;
    w.write_record(["leg", "s", "t", "x1", "x2", "x3", "xi1", "xi2", "xi3"])?;
    for (i, leg) in legs {
        for s in &leg.samples {
            let vals = [s.s, s.t, s.x.x, s.x.y, s.x.z, s.xi.x, s.xi.y, s.xi.z];
            let mut rec = vec![i.to_string()];
            rec.extend(vals.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
    }
    w.flush().context("cannot write CSV")?;
    Ok(())
}

fn tangential_gap(a: &BoundaryCovector, b: &BoundaryCovector) -> f64 {
    if a.t() != b.t() || a.x() != b.x() || a.tau() != b.tau() {
        return f64::INFINITY;
    }
    (a.xi() - b.xi()).norm() / a.frequency()
}

pub fn trace(ctx: &Context, args: &TraceArgs) -> Result<Outcome> {
    let m = &ctx.medium;
    let mode = Mode::from(args.mode);
    let tol = ctx.tol(1e-9);
    let ctrl = StepControl::default();
    let (x, nu) = boundary_point(m, args.point)?;
    let dir = launch_direction(&nu, args.angle, args.azimuth);
    let g = BoundaryCovector::from_direction(m, mode, 0.0, x, args.tau, &dir).context("launch covector")?;
    let mut failures = Failures::default();

    if args.depth == 0 {
        let leg = trace_ray(m, &g, mode, &ctrl.dense()).context("tracing leg")?;
        check_leg(&mut failures, "leg", &leg, tol);
        write_samples(ctx, &[(0, leg.clone())])?;
        return Ok(Outcome {
            results: json!({ "launch": covector(&g), "leg": leg_value(&leg) }),
            failures,
        });
    }

    let t = broken_transport(m, &g, &[mode], args.depth, args.tmax, &ctrl);
    // legs are retraced with dense output for diagnostics and plotting
    let traced: Vec<_> = t
        .legs
        .par_iter()
        .map(|l| trace_ray(m, &l.entry.gamma_in, l.entry.mode, &ctrl.dense()))
        .collect();
    let mut legs = Vec::new();
    let mut dense = Vec::new();
    for (i, (l, r)) in t.legs.iter().zip(traced).enumerate() {
        let mut v = json!({
            "entry": lens_entry(&l.entry),
            "parent": l.parent,
            "conversion": l.conversion.map(|(a, b)| format!("{a}{b}")),
            "max_drift": l.max_drift,
        });
        failures.check(l.max_drift <= tol, || {
            format!("leg {i}: Hamiltonian drift {:e}", l.max_drift)
        });
        if let Some(p) = l.parent {
            let gap = tangential_gap(&t.legs[p].entry.gamma_out, &l.entry.gamma_in);
            failures.check(gap <= REFLECTION_TOL, || {
                format!("leg {i}: reflection moved (t, x, tau, xi) by {gap:e}")
            });
            v["reflection_gap"] = json!(gap);
        }
        match r {
            Ok(leg) => {
                failures.check(leg.exit.tau == leg.start.tau, || format!("leg {i}: tau changed"));
                dense.push((i, leg));
            }
            Err(e) => v["retrace_error"] = json!(e.to_string()),
        }
        legs.push(v);
    }
    write_samples(ctx, &dense)?;
    let events: Vec<Value> = t
        .events
        .iter()
        .map(|e| {
            let ray = t.broken_ray(e.leg);
            let mut polyline = vec![vec3(&ray.legs[0].entry.gamma_in.x())];
            polyline.extend(ray.legs.iter().map(|l| vec3(&l.entry.gamma_out.x())));
            json!({
                "order": e.order,
                "mode": e.mode.as_str(),
                "covector": covector(&e.covector),
                "leg": e.leg,
                "reflections": e.reflections,
                "conversions": ray.conversions().iter().map(|(a, b)| format!("{a}{b}")).collect::<Vec<_>>(),
                "polyline": polyline,
            })
        })
        .collect();
    let notes: Vec<Value> = t
        .notes
        .iter()
        .map(|n| match n {
            BranchNote::Evanescent { after_leg, mode } => {
                json!({ "kind": "evanescent", "after_leg": after_leg, "mode": mode.as_str() })
            }
            BranchNote::Glancing {
                after_leg,
                mode,
                discriminant,
            } => json!({
                "kind": "glancing", "after_leg": after_leg, "mode": mode.as_str(), "discriminant": discriminant
            }),
            BranchNote::Failed { after_leg, mode, error } => json!({
                "kind": "failed", "after_leg": after_leg, "mode": mode.as_str(), "error": error.to_string()
            }),
        })
        .collect();
    Ok(Outcome {
        results: json!({ "launch": covector(&g), "legs": legs, "events": events, "notes": notes }),
        failures,
    })
}

pub fn lensmap(ctx: &Context, args: &LensmapArgs) -> Result<Outcome> {
    let m = &ctx.medium;
    let mode = Mode::from(args.mode);
    let tol = ctx.tol(1e-9);
    let ctrl = StepControl::default();
    let (x, nu) = boundary_point(m, args.point)?;
    let n = args.fan_n;
    let fan: Vec<BoundaryCovector> = (0..n)
        .map(|k| {
            let a = if n > 1 {
                args.max_angle * k as f64 / (n - 1) as f64
            } else {
                0.0
            };
            BoundaryCovector::from_direction(m, mode, 0.0, x, args.tau, &launch_direction(&nu, a, args.azimuth))
        })
        .collect::<Result<_, _>>()
        .context("fan covector")?;
    let legs: Vec<_> = fan.par_iter().map(|g| trace_ray(m, g, mode, &ctrl)).collect();
    let mut failures = Failures::default();
    let mut rows = Vec::new();
    for (i, (g, r)) in fan.iter().zip(&legs).enumerate() {
        match r {
            Ok(leg) => {
                check_leg(&mut failures, &format!("fan member {i}"), leg, tol);
                let mut v = lens_entry(&leg.entry);
                v["max_drift"] = json!(leg.max_drift);
                rows.push(v);
            }
            Err(e) => rows.push(json!({ "mode": mode.as_str(), "in": covector(g), "error": e.to_string() })),
        }
    }
    if let Some(path) = &ctx.csv {
        let mut w = csv_writer(path)?;
        let mut header = vec!["mode".to_string()];
        header.extend(COVECTOR_HEADER.iter().map(|h| format!("{h}_in")));
        header.extend(COVECTOR_HEADER.iter().map(|h| format!("{h}_out")));
        header.extend(["travel_time".into(), "error".into()]);
        w.write_record(&header)?;
        for (g, r) in fan.iter().zip(&legs) {
            let mut rec = vec![mode.as_str().to_string()];
            rec.extend(covector_fields(g));
            match r {
                Ok(leg) => {
                    rec.extend(covector_fields(&leg.entry.gamma_out));
                    rec.extend([leg.entry.travel_time.to_string(), String::new()]);
                }
                Err(e) => {
                    rec.extend(std::iter::repeat_n(String::new(), 9));
                    rec.push(e.to_string());
                }
            }
            w.write_record(&rec)?;
        }
        w.flush().context("cannot write CSV")?;
    }
    Ok(Outcome {
        results: json!({ "mode": mode.as_str(), "point": vec3(&x), "entries": rows }),
        failures,
    })
}

pub fn distance(ctx: &Context, args: &DistanceArgs) -> Result<Outcome> {
    let m = &ctx.medium;
    let mode = Mode::from(args.mode);
    let tol = ctx.tol(1e-6);
    let ctrl = StepControl::default();
    let points: Vec<Vec3> = fibonacci_sphere(args.fan_n)
        .iter()
        .map(|d| m.domain.boundary_point(d))
        .collect();
    let n = points.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let results: Vec<_> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let opts = ShootingOptions {
                n_starts: args.starts,
                seed: ctx.seed.wrapping_add((i * n + j) as u64),
                ..ShootingOptions::default()
            };
            boundary_distance(m, mode, &points[i], &points[j], &opts, &ctrl)
        })
        .collect();
    let mut matrix = vec![vec![Value::Null; n]; n];
    let mut d = vec![vec![None; n]; n];
    let mut pair_rows = Vec::new();
    for (i, row) in matrix.iter_mut().enumerate() {
        row[i] = json!(0.0);
        d[i][i] = Some(0.0);
    }
    for (&(i, j), r) in pairs.iter().zip(&results) {
        match r {
            Ok(res) if res.connected => {
                matrix[i][j] = json!(res.distance);
                d[i][j] = Some(res.distance);
                pair_rows.push(json!({ "from": i, "to": j, "distance": res.distance, "miss": res.miss,
                    "connecting_starts": res.connecting_starts, "chart": res.chart }));
            }
            Ok(res) => pair_rows.push(json!({ "from": i, "to": j, "connected": false, "miss": res.miss })),
            Err(e) => pair_rows.push(json!({ "from": i, "to": j, "error": e.to_string() })),
        }
    }
    let mut failures = Failures::default();
    let mut max_asym: f64 = 0.0;
    for (i, row) in d.iter().enumerate() {
        for (j, dij) in row.iter().enumerate().skip(i + 1) {
            if let (Some(a), Some(b)) = (*dij, d[j][i]) {
                let asym = (a - b).abs();
                max_asym = max_asym.max(asym);
                failures.check(asym <= tol, || format!("d({i},{j}) and d({j},{i}) differ by {asym:e}"));
            }
        }
    }
    let disconnected = d.iter().flatten().filter(|v| v.is_none()).count();
    if let Some(path) = &ctx.csv {
        let mut w = csv_writer(path)?;
        w.write_record(["from", "to", "distance"])?;
        for (&(i, j), _) in pairs.iter().zip(&results) {
            w.write_record([
                i.to_string(),
                j.to_string(),
                d[i][j].map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush().context("cannot write CSV")?;
    }
    Ok(Outcome {
        results: json!({
            "mode": mode.as_str(),
            "points": points.iter().map(vec3).collect::<Vec<_>>(),
            "matrix": matrix,
            "max_asymmetry": max_asym,
            "disconnected_pairs": disconnected,
            "pairs": pair_rows,
        }),
        failures,
    })
}

fn entry_or_error(r: &elastoray_core::Result<elastoray_core::rays::LensMapEntry>) -> Value {
    match r {
        Ok(e) => lens_entry(e),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn recover(ctx: &Context, args: &RecoverArgs) -> Result<Outcome> {
    let m = &ctx.medium;
    let tol = ctx.tol(1e-6);
    let ctrl = StepControl::default();
    let opts = RecoveryOptions {
        depth: args.depth,
        t_max: args.tmax,
        tol,
    };
    let mut rng = seeded(ctx.seed);
    let probes: Vec<BoundaryCovector> = (0..args.fan_n)
        .map(|_| {
            let x = sample_boundary_point(&m.domain, &mut rng);
            let dir = inward_direction(&m.domain.normal(&x), args.max_angle.to_radians(), &mut rng);
            BoundaryCovector::from_direction(m, Mode::P, 0.0, x, args.tau, &dir)
        })
        .collect::<Result<_, _>>()
        .context("probe covector")?;
    let rows: Vec<_> = probes.par_iter().map(|p| recover_probe(m, p, &opts, &ctrl)).collect();
    let rep = RecoveryReport::from_probes(rows, tol);
    let mut failures = Failures::default();
    for (i, p) in rep.probes.iter().enumerate() {
        for mode in Mode::BOTH {
            match p.discrepancy(mode) {
                Some(d) => failures.check(d <= tol, || format!("probe {i}: {mode} table discrepancy {d:e}")),
                None => failures.check(false, || format!("probe {i}: {mode} map not recovered")),
            };
        }
    }
    let probe_rows: Vec<Value> = rep
        .probes
        .iter()
        .map(|p| {
            json!({
                "probe": covector(&p.probe),
                "muting_residual": p.muting_residual.as_ref().ok(),
                "S": { "recovered": entry_or_error(&p.shear), "direct": entry_or_error(&p.direct_shear),
                       "discrepancy": p.discrepancy(Mode::S) },
                "P": { "recovered": entry_or_error(&p.compressional), "direct": entry_or_error(&p.direct_compressional),
                       "discrepancy": p.discrepancy(Mode::P) },
                "mode_gap": p.mode_gap(),
            })
        })
        .collect();
    if let Some(path) = &ctx.csv {
        let mut w = csv_writer(path)?;
        w.write_record(["probe", "mode", "t_recovered", "t_direct", "discrepancy"])?;
        for (i, p) in rep.probes.iter().enumerate() {
            for (mode, rec, dir) in [
                (Mode::S, &p.shear, &p.direct_shear),
                (Mode::P, &p.compressional, &p.direct_compressional),
            ] {
                let t = |r: &elastoray_core::Result<elastoray_core::rays::LensMapEntry>| {
                    r.as_ref().map(|e| e.travel_time.to_string()).unwrap_or_default()
                };
                let d = p.discrepancy(mode).map(|v| v.to_string()).unwrap_or_default();
                w.write_record([i.to_string(), mode.as_str().into(), t(rec), t(dir), d])?;
            }
        }
        w.flush().context("cannot write CSV")?;
    }
    Ok(Outcome {
        results: json!({
            "tol": tol,
            "depth": args.depth,
            "recovered_s": rep.recovered(Mode::S),
            "recovered_p": rep.recovered(Mode::P),
            "max_discrepancy": rep.max_discrepancy(),
            "max_mode_gap": rep.max_mode_gap(),
            "probes": probe_rows,
        }),
        failures,
    })
}
