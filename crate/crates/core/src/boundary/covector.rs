#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::medium::{Domain, Medium};
use crate::symbols::dual_metric_matrix;
use crate::{Error, Mode, Result, Vec3};

/// Relative tolerance for `ξ_|·ν = 0`.
pub const TANGENCY_TOL: f64 = 1e-12;

/// Covector `γ = (t, x, τ, ξ_|)` on `T*(R × ∂Ω)`; `ξ_|` is stored as a
/// vector of R³ tangent to the boundary at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCovector {
    t: f64,
    x: Vec3,
    tau: f64,
    xi: Vec3,
    nu: Vec3,
}

impl BoundaryCovector {
    pub fn new(domain: &Domain, t: f64, x: Vec3, tau: f64, xi: Vec3) -> Result<Self> {
        let nu = domain.require_boundary(&x)?;
        if !(t.is_finite() && tau.is_finite() && xi.iter().all(|v| v.is_finite())) {
            return Err(Error::InvalidParameter("covector data must be finite"));
        }
        let normal = xi.dot(&nu);
        if normal.abs() > TANGENCY_TOL * xi.norm().max(f64::MIN_POSITIVE) && normal != 0.0 {
            return Err(Error::NotTangent { normal });
        }
        if tau == 0.0 && xi.norm_squared() == 0.0 {
            return Err(Error::ZeroCovector);
        }
        Ok(BoundaryCovector { t, x, tau, xi, nu })
    }

    /// Tangential restriction of a full covector `ξ` at a boundary point.
    pub fn restrict(domain: &Domain, t: f64, x: Vec3, tau: f64, xi: &Vec3) -> Result<Self> {
        let nu = domain.require_boundary(&x)?;
        let tangential = xi - nu * xi.dot(&nu);
        // second pass removes the rounding left by the first projection
        let tangential = tangential - nu * tangential.dot(&nu);
        BoundaryCovector::new(domain, t, x, tau, tangential)
    }

    /// Covector whose `mode` bicharacteristic enters the domain along the
    /// interior direction `dir` as time increases.
    pub fn from_direction(m: &Medium, mode: Mode, t: f64, x: Vec3, tau: f64, dir: &Vec3) -> Result<Self> {
        let nu = m.domain.require_boundary(&x)?;
        if tau == 0.0 {
            return Err(Error::ZeroCovector);
        }
        if !(dir.dot(&nu) < 0.0) {
            return Err(Error::InvalidParameter("launch direction must point into the domain"));
        }
        let g = dual_metric_matrix(&m.coefficients(&x), mode);
        // dx/dt = -G ξ / τ ∥ dir
        let w = g
            .try_inverse()
            .ok_or(Error::InvalidParameter("dual metric is singular"))?
            * dir;
        let k = tau.abs() / w.dot(&(g * w)).sqrt();
        let xi = -w * (k * tau.signum());
        BoundaryCovector::restrict(&m.domain, t, x, tau, &xi)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> Vec3 {
        self.x
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Tangential covector `ξ_|`.
    pub fn xi(&self) -> Vec3 {
        self.xi
    }

    /// Exterior unit normal at `x`.
    pub fn nu(&self) -> Vec3 {
        self.nu
    }

    pub fn in_gamma_delta(&self, delta: f64) -> bool {
        self.tau.abs() >= delta * self.xi.norm()
    }

    /// `(τ, ξ_|) ↦ (kτ, kξ_|)`.
    pub fn scaled(&self, k: f64) -> Self {
        BoundaryCovector {
            tau: self.tau * k,
            xi: self.xi * k,
            ..*self
        }
    }

    /// Same base point and tangential covector, `τ ↦ −τ`.
    pub fn time_reversed(&self) -> Self {
        BoundaryCovector {
            tau: -self.tau,
            ..*self
        }
    }

    pub fn with_time(&self, t: f64) -> Self {
        BoundaryCovector { t, ..*self }
    }

    /// Magnitude `(τ² + |ξ_||²)^{1/2}`.
    pub fn frequency(&self) -> f64 {
        (self.tau * self.tau + self.xi.norm_squared()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Mat3;

    #[test]
    fn tangency_enforced() {
        let d = Domain::UnitBall;
        let x = Vec3::new(0.0, 0.0, 1.0);
        assert!(BoundaryCovector::new(&d, 0.0, x, 1.0, Vec3::new(1.0, 0.0, 0.0)).is_ok());
        assert!(matches!(
            BoundaryCovector::new(&d, 0.0, x, 1.0, Vec3::new(1.0, 0.0, 0.1)),
            Err(Error::NotTangent { .. })
        ));
        assert_eq!(
            BoundaryCovector::new(&d, 0.0, x, 0.0, Vec3::zeros()),
            Err(Error::ZeroCovector)
        );
    }

    #[test]
    fn direction_launch_in_conformal_medium() {
        let m = Medium::homogeneous(1.0, 1.0, 1.0, Mat3::zeros()).unwrap();
        let x = Vec3::new(0.0, 0.0, -1.0);
        let dir = Vec3::new(1.0, 0.0, 1.0).normalize();
        let g = BoundaryCovector::from_direction(&m, Mode::S, 0.0, x, 1.0, &dir).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!((g.xi() - Vec3::new(-s, 0.0, 0.0)).norm() < 1e-15);
        let gp = BoundaryCovector::from_direction(&m, Mode::P, 0.0, x, 1.0, &dir).unwrap();
        assert!((gp.xi().norm() - s / 3f64.sqrt()).abs() < 1e-15);
    }
}
