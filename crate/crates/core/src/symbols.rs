//! Pointwise symbol algebra.
//!
//! `g_S^{-1}(x,ξ) = (μ|ξ|² + Rξ·ξ)/ρ`, `g_P^{-1}(x,ξ) = ((λ+2μ)|ξ|² + Rξ·ξ)/ρ`,
//! `q_{S/P} = ρ(τ² − g_{S/P}^{-1})` and the principal symbol
//! `p = q_S (Id − π) + q_P π`, `π = ξ⊗ξ/ξ·ξ`.

use crate::linalg::{adot, analytic_projector, complexify, complexify_mat, cplx, outer};
use crate::medium::{Coefficients, Medium};
use crate::{CVec3, Complex64, Error, Mat3, Mode, Result, SymbolMatrix3, Vec3};

/// `κ_S = μ`, `κ_P = λ + 2μ`.
pub fn stiffness(c: &Coefficients, mode: Mode) -> f64 {
    match mode {
        Mode::S => c.mu,
        Mode::P => c.lambda + 2.0 * c.mu,
    }
}

fn stiffness_gradient(c: &Coefficients, mode: Mode) -> Vec3 {
    match mode {
        Mode::S => c.grad_mu,
        Mode::P => c.grad_lambda + c.grad_mu * 2.0,
    }
}

/// Matrix `G` of the dual metric, `g^{-1}(ξ, η) = ξ·Gη`.
pub fn dual_metric_matrix(c: &Coefficients, mode: Mode) -> Mat3 {
    (Mat3::identity() * stiffness(c, mode) + c.r()) / c.rho
}

/// Analytic bilinear extension `g^{-1}(a, b)` to complex covectors.
pub fn dual_metric_bilinear(c: &Coefficients, mode: Mode, a: &CVec3, b: &CVec3) -> Complex64 {
    let r = complexify_mat(c.r());
    (adot(a, b) * stiffness(c, mode) + adot(a, &(r * b))) / c.rho
}

/// Dual metric with its spatial and covector gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricEval {
    pub value: f64,
    pub grad_x: Vec3,
    pub grad_xi: Vec3,
}

pub fn metric_inv_at(c: &Coefficients, mode: Mode, xi: &Vec3) -> MetricEval {
    let kappa = stiffness(c, mode);
    let xi2 = xi.norm_squared();
    let r = c.r();
    let value = (kappa * xi2 + xi.dot(&(r * xi))) / c.rho;
    let dk = stiffness_gradient(c, mode);
    let grad_x =
        Vec3::from_fn(|k, _| (dk[k] * xi2 + xi.dot(&(c.stress.dr[k] * xi))) / c.rho - value * c.grad_rho[k] / c.rho);
    let grad_xi = (xi * kappa + r * xi) * (2.0 / c.rho);
    MetricEval { value, grad_x, grad_xi }
}

/// `g_mode^{-1}(x, ξ)` and its gradients; `x` must lie in the closed domain.
pub fn metric_inv(m: &Medium, mode: Mode, x: &Vec3, xi: &Vec3) -> Result<MetricEval> {
    m.domain.require_closed(x)?;
    Ok(metric_inv_at(&m.coefficients(x), mode, xi))
}

/// `q_mode(τ, ξ) = ρ(τ² − g_mode^{-1}(ξ, ξ))` at a complex covector.
pub fn char_symbol(c: &Coefficients, mode: Mode, tau: f64, xi: &CVec3) -> Complex64 {
    (cplx(tau * tau) - dual_metric_bilinear(c, mode, xi, xi)) * c.rho
}

/// `p = ρτ² Id − (λ+μ) ξ⊗ξ − μ (ξ·ξ) Id − (ξ·Rξ) Id`, polynomial in `ξ`
/// and therefore valid at every complex covector.
pub fn principal_matrix(c: &Coefficients, tau: f64, xi: &CVec3) -> SymbolMatrix3 {
    let r = complexify_mat(c.r());
    let diag = cplx(c.rho * tau * tau) - adot(xi, xi) * c.mu - adot(xi, &(r * xi));
    SymbolMatrix3::identity() * diag - outer(xi, xi) * cplx(c.lambda + c.mu)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalSymbol {
    pub p: SymbolMatrix3,
    /// `p̃ = q_P (Id − π) + q_S π`, so that `p̃ p = q_S q_P Id`.
    pub p_tilde: SymbolMatrix3,
    pub q_s: Complex64,
    pub q_p: Complex64,
}

/// Principal symbol at a (possibly complex) covector with `ξ·ξ ≠ 0`.
pub fn principal_symbol_at(c: &Coefficients, tau: f64, xi: &CVec3) -> Result<PrincipalSymbol> {
    let pi = analytic_projector(xi).ok_or(Error::DegenerateDirection)?;
    let q_s = char_symbol(c, Mode::S, tau, xi);
    let q_p = char_symbol(c, Mode::P, tau, xi);
    let id = SymbolMatrix3::identity();
    Ok(PrincipalSymbol {
        p: principal_matrix(c, tau, xi),
        p_tilde: (id - pi) * q_p + pi * q_s,
        q_s,
        q_p,
    })
}

pub fn principal_symbol(m: &Medium, x: &Vec3, tau: f64, xi: &Vec3) -> Result<PrincipalSymbol> {
    m.domain.require_closed(x)?;
    if xi.norm_squared() == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    principal_symbol_at(&m.coefficients(x), tau, &complexify(xi))
}

/// `s(x, ξ) = λ(ν⊗ξ) + μ(ξ⊗ν) + μ(ξ·ν) Id + (Rξ·ν) Id`.
pub fn traction_matrix(c: &Coefficients, nu: &Vec3, xi: &CVec3) -> SymbolMatrix3 {
    let n = complexify(nu);
    let r = complexify_mat(c.r());
    let scalar = adot(xi, &n) * c.mu + adot(&(r * xi), &n);
    outer(&n, xi) * cplx(c.lambda) + outer(xi, &n) * cplx(c.mu) + SymbolMatrix3::identity() * scalar
}

/// Traction symbol at a boundary point (complex `ξ` allowed).
pub fn traction_symbol(m: &Medium, x: &Vec3, xi: &CVec3) -> Result<SymbolMatrix3> {
    let nu = m.domain.require_boundary(x)?;
    Ok(traction_matrix(&m.coefficients(x), &nu, xi))
}

/// `∂s/∂ξ` in the normal direction: `(λ+μ) ν⊗ν + (μ + Rν·ν) Id`.
pub fn traction_normal_derivative(c: &Coefficients, nu: &Vec3) -> Mat3 {
    nu * nu.transpose() * (c.lambda + c.mu) + Mat3::identity() * (c.mu + nu.dot(&(c.r() * nu)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use approx::assert_relative_eq;

    fn unit() -> Medium {
        Medium::homogeneous(1.0, 1.0, 1.0, Mat3::zeros()).unwrap()
    }

    #[test]
    fn conformal_metric_values() {
        let m = unit();
        let xi = Vec3::new(1.0, 2.0, 2.0);
        assert_eq!(metric_inv(&m, Mode::S, &Vec3::zeros(), &xi).unwrap().value, 9.0);
        assert_eq!(metric_inv(&m, Mode::P, &Vec3::zeros(), &xi).unwrap().value, 27.0);
        for mode in Mode::BOTH {
            assert_eq!(metric_inv(&m, mode, &Vec3::zeros(), &Vec3::zeros()).unwrap().value, 0.0);
        }
    }

    #[test]
    fn anisotropic_shear_metric() {
        let r = Mat3::from_diagonal(&Vec3::new(0.1, 0.0, -0.1));
        let m = Medium::homogeneous(1.0, 1.0, 1.0, r).unwrap();
        let v = metric_inv(&m, Mode::S, &Vec3::zeros(), &Vec3::x()).unwrap().value;
        assert_relative_eq!(v, 1.1, epsilon = 1e-15);
    }

    #[test]
    fn metric_outside_domain_errors() {
        let err = metric_inv(&unit(), Mode::S, &Vec3::new(1.5, 0.0, 0.0), &Vec3::x());
        assert!(matches!(err, Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn principal_symbol_hand_values() {
        let m = unit();
        let ps = principal_symbol(&m, &Vec3::zeros(), 2.0, &Vec3::x()).unwrap();
        assert_eq!(ps.q_s, cplx(3.0));
        assert_eq!(ps.q_p, cplx(1.0));
        let p = complexify_mat(&Mat3::from_diagonal(&Vec3::new(1.0, 3.0, 3.0)));
        let pt = complexify_mat(&Mat3::from_diagonal(&Vec3::new(3.0, 1.0, 1.0)));
        assert!(max_abs(&(ps.p - p)) < 1e-15);
        assert!(max_abs(&(ps.p_tilde - pt)) < 1e-15);
        assert!(max_abs(&(ps.p_tilde * ps.p - SymbolMatrix3::identity() * cplx(3.0))) < 1e-14);

        let ps0 = principal_symbol(&m, &Vec3::zeros(), 0.0, &Vec3::x()).unwrap();
        assert_eq!(ps0.q_s, cplx(-1.0));
        assert_eq!(ps0.q_p, cplx(-3.0));
        let p0 = complexify_mat(&Mat3::from_diagonal(&Vec3::new(-3.0, -1.0, -1.0)));
        assert!(max_abs(&(ps0.p - p0)) < 1e-15);
        assert!(ps0.p.try_inverse().is_some());
    }

    #[test]
    fn shear_characteristic_kernel_is_orthogonal_plane() {
        let m = unit();
        let xi = Vec3::new(0.3, -0.4, 1.2);
        let tau = xi.norm();
        let ps = principal_symbol(&m, &Vec3::zeros(), tau, &xi).unwrap();
        assert!(ps.p.determinant().norm() < 1e-12);
        for a in crate::linalg::analytic_complement(&complexify(&xi)) {
            assert!((ps.p * a).norm() < 1e-12);
        }
        assert!((ps.p * complexify(&xi)).norm() > 1.0);
    }

    #[test]
    fn zero_covector_is_degenerate() {
        let err = principal_symbol(&unit(), &Vec3::zeros(), 1.0, &Vec3::zeros());
        assert_eq!(err, Err(Error::DegenerateDirection));
    }

    #[test]
    fn traction_hand_values() {
        let m = unit();
        let x = Vec3::new(0.0, 0.0, 1.0);
        let a = complexify(&Vec3::y());
        let s = traction_symbol(&m, &x, &complexify(&Vec3::new(1.0, 0.0, 1.0))).unwrap();
        assert!((s * a - a).norm() < 1e-15);

        // tangential ξ, R = 0: s·a = λ(ξ·a)ν + μ(ν·a)ξ
        let xi = Vec3::new(0.6, -0.8, 0.0);
        let av = Vec3::new(0.3, 0.5, -0.7);
        let s = traction_symbol(&m, &x, &complexify(&xi)).unwrap();
        let expect = x * xi.dot(&av) + xi * x.dot(&av);
        assert!((s * complexify(&av) - complexify(&expect)).norm() < 1e-15);
    }

    #[test]
    fn traction_off_boundary_errors() {
        let err = traction_symbol(&unit(), &Vec3::new(0.0, 0.0, 0.9), &complexify(&Vec3::x()));
        assert!(matches!(err, Err(Error::NotOnBoundary { .. })));
    }

    #[test]
    fn traction_normal_derivative_is_elliptic() {
        let m = Medium::homogeneous(1.0, 2.0, 0.5, Mat3::zeros()).unwrap();
        let c = m.coefficients(&Vec3::zeros());
        let nu = Vec3::new(0.0, 0.6, 0.8);
        let eig = crate::linalg::sym_eigenvalues(&traction_normal_derivative(&c, &nu));
        assert_relative_eq!(eig[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(eig[1], 0.5, epsilon = 1e-14);
        assert_relative_eq!(eig[2], 3.0, epsilon = 1e-14);
    }
}
