//! JSON encodings of core values.

use elastoray_core::boundary::{BoundaryCovector, ModeRoots, RegionLabel};
use elastoray_core::rays::{LensMapEntry, RayState};
use elastoray_core::{Complex64, Mat3, SymbolMatrix3, Vec3};
use serde_json::{json, Value};

pub fn vec3(v: &Vec3) -> Value {
    json!([v.x, v.y, v.z])
}

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn mat3(m: &Mat3) -> Value {
    Value::Array((0..3).map(|i| json!([m[(i, 0)], m[(i, 1)], m[(i, 2)]])).collect())
}

/// `{"re": [[..]], "im": [[..]]}`.
pub fn cmat3(m: &SymbolMatrix3) -> Value {
    json!({ "re": mat3(&m.map(|z| z.re)), "im": mat3(&m.map(|z| z.im)) })
}

pub fn covector(g: &BoundaryCovector) -> Value {
    json!({ "t": g.t(), "x": vec3(&g.x()), "tau": g.tau(), "xi": vec3(&g.xi()) })
}

pub fn state(s: &RayState) -> Value {
    json!({ "s": s.s, "t": s.t, "x": vec3(&s.x), "xi": vec3(&s.xi), "tau": s.tau, "mode": s.mode.as_str() })
}

pub fn lens_entry(e: &LensMapEntry) -> Value {
    json!({
        "mode": e.mode.as_str(),
        "in": covector(&e.gamma_in),
        "out": covector(&e.gamma_out),
        "travel_time": e.travel_time,
    })
}

pub fn mode_roots(r: &ModeRoots) -> Value {
    json!({
        "kind": if r.is_real() { "real" } else { "complex" },
        "selected": complex(r.selected),
        "other": complex(r.other),
        "discriminant": r.discriminant,
    })
}

pub fn label(l: &RegionLabel) -> Value {
    json!({
        "region": l.region.as_str(),
        "in_gamma_delta": l.in_gamma_delta,
        "discriminant_s": l.discriminants.0,
        "discriminant_p": l.discriminants.1,
    })
}

pub fn error(e: &impl std::fmt::Display) -> Value {
    json!({ "error": e.to_string() })
}
