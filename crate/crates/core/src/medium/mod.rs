//! Elastic medium: Lamé fields, density, residual stress and domain.

mod class;
mod domain;
mod field;

pub use class::{check_class_membership, ClassParams, ClassReport, Margin, CLASS_GRID, DIVERGENCE_TOL};
pub use domain::{fibonacci_sphere, Domain, BOUNDARY_TOL};
pub use field::{
    stress_from_potential, Monomial, Polynomial, PotentialStress, ResidualStressField, ScalarField, StressValue,
    MAX_POLYNOMIAL_DEGREE,
};

use crate::{Error, Mat3, Result, Vec3};

/// Grid resolution used by [`Medium::new`] to reject non-positive coefficients.
pub const VALIDATION_GRID: usize = 9;

/// All coefficient data at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub rho: f64,
    pub lambda: f64,
    pub mu: f64,
    pub grad_rho: Vec3,
    pub grad_lambda: Vec3,
    pub grad_mu: Vec3,
    pub stress: StressValue,
}

impl Coefficients {
    pub fn r(&self) -> &Mat3 {
        &self.stress.r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    pub rho: ScalarField,
    pub lambda: ScalarField,
    pub mu: ScalarField,
    pub stress: ResidualStressField,
    pub domain: Domain,
}

impl Medium {
    /// Builds a medium, rejecting fields with `ρ, λ, μ ≤ 0` on the validation grid.
    pub fn new(
        rho: ScalarField,
        lambda: ScalarField,
        mu: ScalarField,
        stress: ResidualStressField,
        domain: Domain,
    ) -> Result<Self> {
        let m = Medium {
            rho,
            lambda,
            mu,
            stress,
            domain,
        };
        for x in m.domain.sample_grid(VALIDATION_GRID) {
            let (r, l, u) = (m.rho.value(&x), m.lambda.value(&x), m.mu.value(&x));
            if !(r > 0.0 && l > 0.0 && u > 0.0) {
                return Err(Error::InvalidParameter("rho, lambda and mu must be positive"));
            }
        }
        Ok(m)
    }

    /// Constant `ρ, λ, μ`, constant `R`, unit ball.
    pub fn homogeneous(rho: f64, lambda: f64, mu: f64, r: Mat3) -> Result<Self> {
        Medium::new(
            ScalarField::Constant(rho),
            ScalarField::Constant(lambda),
            ScalarField::Constant(mu),
            ResidualStressField::constant(r)?,
            Domain::UnitBall,
        )
    }

    pub fn coefficients(&self, x: &Vec3) -> Coefficients {
        let (rho, grad_rho) = self.rho.eval(x);
        let (lambda, grad_lambda) = self.lambda.eval(x);
        let (mu, grad_mu) = self.mu.eval(x);
        Coefficients {
            rho,
            lambda,
            mu,
            grad_rho,
            grad_lambda,
            grad_mu,
            stress: self.stress.eval(x),
        }
    }
}
