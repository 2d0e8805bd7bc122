use anyhow::{Context as _, Result};
use elastoray_core::medium::{check_class_membership, Margin, DIVERGENCE_TOL};
use serde_json::{json, Value};

use super::{Context, Outcome};
use crate::cli::ValidateArgs;
use crate::encode::vec3;
use crate::report::Failures;

fn margin(m: &Margin) -> Value {
    json!({ "passed": m.passed, "margin": m.margin, "worst_point": vec3(&m.worst_point) })
}

pub fn validate(ctx: &Context, args: &ValidateArgs) -> Result<Outcome> {
    let rep = check_class_membership(&ctx.medium, &ctx.params, args.grid).context("class check")?;
    let mut failures = Failures::default();
    let checks = [
        ("lame_bound", &rep.lame_bound),
        ("stress_bound", &rep.stress_bound),
        ("principal_type", &rep.principal_type),
        ("positivity", &rep.positivity),
        ("metrics_positive", &rep.metrics_positive),
    ];
    let mut margins = serde_json::Map::new();
    for (name, m) in checks {
        failures.check(m.passed, || {
            format!(
                "{name} violated: margin {:e} at {:?}",
                m.margin,
                m.worst_point.as_slice()
            )
        });
        margins.insert(name.into(), margin(m));
    }
    let tol = ctx.tol(DIVERGENCE_TOL);
    failures.check(rep.max_divergence < tol, || {
        format!("residual stress divergence {:e} exceeds {tol:e}", rep.max_divergence)
    });
    let c = ctx.params;
    Ok(Outcome {
        results: json!({
            "class_params": { "L": c.l, "eps": c.eps, "delta": c.delta },
            "grid_points": rep.points,
            "margins": margins,
            "max_divergence": rep.max_divergence,
            "divergence_tol": tol,
            "in_class": rep.passed() && rep.max_divergence < tol,
        }),
        failures,
    })
}
