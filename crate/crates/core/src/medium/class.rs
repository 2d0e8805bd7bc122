use nalgebra::Cholesky;

use super::Medium;
use crate::linalg::{sym_eigenvalues, sym_spectral_norm};
use crate::{Error, Mat3, Result, Vec3};

/// Divergence norm above which `∇·R = 0` is reported as violated.
pub const DIVERGENCE_TOL: f64 = 1e-10;

/// Parameters `(L, ε, δ)` of the admissible class and the cone `Γ_δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassParams {
    pub l: f64,
    pub eps: f64,
    pub delta: f64,
}

impl ClassParams {
    pub fn new(l: f64, eps: f64, delta: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(l) && ok(eps) && ok(delta) {
            Ok(ClassParams { l, eps, delta })
        } else {
            Err(Error::InvalidParameter("L, eps and delta must be finite and positive"))
        }
    }
}

/// Pass flag with the worst-case slack over the grid (negative when failing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub passed: bool,
    pub margin: f64,
    pub worst_point: Vec3,
}

impl Margin {
    fn new() -> Self {
        Margin {
            passed: true,
            margin: f64::INFINITY,
            worst_point: Vec3::zeros(),
        }
    }

    fn record(&mut self, slack: f64, x: &Vec3, strict: bool) {
        if slack < self.margin {
            self.margin = slack;
            self.worst_point = *x;
        }
        let ok = if strict { slack > 0.0 } else { slack >= 0.0 };
        self.passed &= ok;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub points: usize,
    /// `λ+2μ, 1/μ, 1/ρ ≤ L`.
    pub lame_bound: Margin,
    /// `|R| ≤ ε μ` with the spectral norm.
    pub stress_bound: Margin,
    /// `μ + λ_min(R) > 0`.
    pub principal_type: Margin,
    /// `ρ, λ, μ > 0`.
    pub positivity: Margin,
    /// Both dual metrics positive definite (Cholesky); margin is the smallest
    /// eigenvalue of `(μ Id + R)/ρ`.
    pub metrics_positive: Margin,
    pub max_divergence: f64,
    pub divergence_ok: bool,
}

impl ClassReport {
    pub fn passed(&self) -> bool {
        self.lame_bound.passed
            && self.stress_bound.passed
            && self.principal_type.passed
            && self.positivity.passed
            && self.metrics_positive.passed
            && self.divergence_ok
    }
}

/// Default grid resolution for [`check_class_membership`].
pub const CLASS_GRID: usize = 21;

/// Grid check of the admissible class `L(L, ε)` and of the real principal
/// type condition.
pub fn check_class_membership(m: &Medium, p: &ClassParams, grid_resolution: usize) -> Result<ClassReport> {
    if grid_resolution < 5 {
        return Err(Error::InvalidParameter("grid resolution must be at least 5"));
    }
    let pts = m.domain.sample_grid(grid_resolution);
    let mut lame = Margin::new();
    let mut stress = Margin::new();
    let mut principal = Margin::new();
    let mut positivity = Margin::new();
    let mut metrics = Margin::new();
    let mut max_div: f64 = 0.0;

    for x in &pts {
        let c = m.coefficients(x);
        let r = c.r();
        let worst = (c.lambda + 2.0 * c.mu).max(1.0 / c.mu).max(1.0 / c.rho);
        lame.record(p.l - worst, x, false);
        stress.record(p.eps * c.mu - sym_spectral_norm(r), x, false);
        principal.record(c.mu + sym_eigenvalues(r)[0], x, true);
        positivity.record(c.rho.min(c.lambda).min(c.mu), x, true);

        let gs: Mat3 = (Mat3::identity() * c.mu + r) / c.rho;
        let gp: Mat3 = (Mat3::identity() * (c.lambda + 2.0 * c.mu) + r) / c.rho;
        let pd = Cholesky::new(gs).is_some() && Cholesky::new(gp).is_some();
        let slack = sym_eigenvalues(&gs)[0];
        metrics.record(if pd { slack } else { slack.min(-0.0) }, x, true);
        if !pd {
            metrics.passed = false;
        }
        max_div = max_div.max(c.stress.divergence.norm());
    }

    Ok(ClassReport {
        points: pts.len(),
        lame_bound: lame,
        stress_bound: stress,
        principal_type: principal,
        positivity,
        metrics_positive: metrics,
        max_divergence: max_div,
        divergence_ok: max_div < DIVERGENCE_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ClassParams {
        ClassParams::new(3.0, 0.2, 0.5).unwrap()
    }

    #[test]
    fn unit_medium_passes_with_unit_principal_margin() {
        let m = Medium::homogeneous(1.0, 1.0, 1.0, Mat3::zeros()).unwrap();
        let rep = check_class_membership(&m, &params(), 7).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.principal_type.margin, 1.0);
        assert_eq!(rep.lame_bound.margin, 0.0);
    }

    #[test]
    fn soft_shear_modulus_fails_lame_bound() {
        let m = Medium::homogeneous(1.0, 1.0, 0.2, Mat3::zeros()).unwrap();
        let rep = check_class_membership(&m, &params(), 7).unwrap();
        assert!(!rep.lame_bound.passed);
        assert!((rep.lame_bound.margin - (3.0 - 5.0)).abs() < 1e-12);
        assert!(rep.stress_bound.passed && rep.principal_type.passed);
    }

    #[test]
    fn large_stress_fails_stress_bound() {
        let m = Medium::homogeneous(1.0, 1.0, 1.0, Mat3::identity() * 0.5).unwrap();
        let rep = check_class_membership(&m, &params(), 7).unwrap();
        assert!(!rep.stress_bound.passed);
        assert!((rep.stress_bound.margin - (0.2 - 0.5)).abs() < 1e-12);
        assert!(rep.principal_type.passed);
    }

    #[test]
    fn indefinite_shear_metric_detected() {
        let m = Medium::homogeneous(1.0, 1.0, 1.0, Mat3::from_diagonal(&Vec3::new(-1.5, 0.0, 0.0))).unwrap();
        let rep = check_class_membership(&m, &params(), 5).unwrap();
        assert!(!rep.principal_type.passed);
        assert!(!rep.metrics_positive.passed);
    }

    #[test]
    fn coarse_grid_rejected() {
        let m = Medium::homogeneous(1.0, 1.0, 1.0, Mat3::zeros()).unwrap();
        assert!(check_class_membership(&m, &params(), 4).is_err());
    }
}
