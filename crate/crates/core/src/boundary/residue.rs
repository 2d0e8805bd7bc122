//! Residue matrices `A_j = ∮ z^j p(τ, ξ − zν)^{-1} dz/2πi` over a contour
//! enclosing exactly the selected roots `z_S`, `z_P`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::roots::{char_roots_at, CharRoots, GLANCING_TOL};
use super::BoundaryCovector;
use crate::linalg::{analytic_projector, complexify, condition_number};
use crate::medium::{Coefficients, Medium};
use crate::symbols::principal_matrix;
use crate::{Complex64, Error, Result, SymbolMatrix3};

/// Condition number of `A₀` beyond which it is reported singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueData {
    pub roots: CharRoots,
    pub a0: SymbolMatrix3,
    pub a1: SymbolMatrix3,
    pub a0_inv: SymbolMatrix3,
    pub a0_condition: f64,
}

impl ResidueData {
    /// `u′ = A₁ A₀^{-1}`, the symbol of the normal derivative of the
    /// Dirichlet solution.
    pub fn normal_derivative_symbol(&self) -> SymbolMatrix3 {
        self.a1 * self.a0_inv
    }
}

/// Closed-form `A_j = (z_S^j/c_S)(Id − π(ξ_S)) + (z_P^j/c_P) π(ξ_P)`.
pub fn closed_form_residue(roots: &CharRoots, j: u32) -> Result<SymbolMatrix3> {
    let pi_s = analytic_projector(&roots.s.covector).ok_or(Error::SingularResidue {
        condition: f64::INFINITY,
    })?;
    let pi_p = analytic_projector(&roots.p.covector).ok_or(Error::SingularResidue {
        condition: f64::INFINITY,
    })?;
    let zs = roots.s.selected.powu(j) / roots.s.c_factor;
    let zp = roots.p.selected.powu(j) / roots.p.c_factor;
    Ok((SymbolMatrix3::identity() - pi_s) * zs + pi_p * zp)
}

pub fn residue_matrices_at(coef: &Coefficients, gamma: &BoundaryCovector) -> Result<ResidueData> {
    let roots = char_roots_at(coef, gamma, GLANCING_TOL)?;
    if roots.lopatinski.norm() == 0.0 {
        return Err(Error::SingularResidue {
            condition: f64::INFINITY,
        });
    }
    let a0 = closed_form_residue(&roots, 0)?;
    let a1 = closed_form_residue(&roots, 1)?;
    let a0_condition = condition_number(&a0);
    let a0_inv = match a0.try_inverse() {
        Some(inv) if a0_condition < SINGULAR_CONDITION => inv,
        _ => {
            return Err(Error::SingularResidue {
                condition: a0_condition,
            })
        }
    };
    Ok(ResidueData {
        roots,
        a0,
        a1,
        a0_inv,
        a0_condition,
    })
}

pub fn residue_matrices(m: &Medium, gamma: &BoundaryCovector) -> Result<ResidueData> {
    residue_matrices_at(&m.coefficients(&gamma.x()), gamma)
}

/// Geometry used by [`residue_quadrature`].
#[derive(Debug, Clone, PartialEq)]
pub enum Contour {
    /// One circle around both selected roots.
    Circle { center: Complex64, radius: f64 },
    /// Separate small circles around each selected root (used when no single
    /// circle separates the selected roots from the others cleanly).
    RootCircles { circles: Vec<(Complex64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureResidue {
    pub a0: SymbolMatrix3,
    pub a1: SymbolMatrix3,
    pub contour: Contour,
    pub nodes: usize,
}

/// `(1/N) Σ f(z_k) (z_k − c)` on a circle: trapezoidal `∮ f dz / 2πi`.
fn circle_rule<F: FnMut(Complex64) -> [SymbolMatrix3; 2]>(
    center: Complex64,
    radius: f64,
    nodes: usize,
    f: &mut F,
) -> [SymbolMatrix3; 2] {
    let mut acc = [SymbolMatrix3::zeros(); 2];
    for k in 0..nodes {
        let theta = 2.0 * PI * (k as f64 + 0.5) / nodes as f64;
        let w = Complex64::from_polar(radius, theta);
        let vals = f(center + w);
        for (a, v) in acc.iter_mut().zip(vals.iter()) {
            *a += v * (w / nodes as f64);
        }
    }
    acc
}

/// Winding number of the discretized circle around `z`.
fn winding(center: Complex64, radius: f64, nodes: usize, z: Complex64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let theta = 2.0 * PI * (k as f64 + 0.5) / nodes as f64;
        let w = Complex64::from_polar(radius, theta);
        acc += w / (center + w - z);
    }
    (acc / nodes as f64).re
}

/// Contour quadrature of `A₀`, `A₁` from the inverse principal symbol alone.
///
/// The circle centred at `(z_S+z_P)/2` with radius `1.5·max|z − centre|` is
/// used when its winding numbers around all four roots come out as 1, 1, 0, 0
/// and its trapezoidal error factor is below `1e-14`; otherwise each selected
/// root gets its own circle of radius half the distance to the nearest other
/// root and `nodes/2` nodes.
pub fn residue_quadrature(
    coef: &Coefficients,
    gamma: &BoundaryCovector,
    roots: &CharRoots,
    nodes: usize,
) -> Result<QuadratureResidue> {
    let xi = complexify(&gamma.xi());
    let nu = complexify(&gamma.nu());
    let tau = gamma.tau();
    let mut failure = None;
    let mut integrand = |z: Complex64| {
        let p = principal_matrix(coef, tau, &(xi - nu * z));
        match p.try_inverse() {
            Some(inv) => [inv, inv * z],
            None => {
                failure = Some(z);
                [SymbolMatrix3::zeros(); 2]
            }
        }
    };

    let inside = [roots.s.selected, roots.p.selected];
    let outside = [roots.s.other, roots.p.other];
    let center = (inside[0] + inside[1]) / 2.0;
    let r_in = inside.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    let radius = 1.5 * r_in.max(1e-3 * gamma.frequency());
    let d_out = outside
        .iter()
        .map(|z| (z - center).norm())
        .fold(f64::INFINITY, f64::min);
    let winding_ok = inside
        .iter()
        .all(|z| (winding(center, radius, nodes, *z) - 1.0).abs() < 1e-6)
        && outside.iter().all(|z| winding(center, radius, nodes, *z).abs() < 1e-6);
    let factor = (r_in / radius).max(radius / d_out);
    let circle_ok = winding_ok && factor.powi(nodes as i32) < 1e-14;

    let (acc, contour) = if circle_ok {
        (
            circle_rule(center, radius, nodes, &mut integrand),
            Contour::Circle { center, radius },
        )
    } else {
        let all = [inside[0], inside[1], outside[0], outside[1]];
        let mut circles = Vec::new();
        let mut acc = [SymbolMatrix3::zeros(); 2];
        for (i, z) in inside.iter().enumerate() {
            let sep = all
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, w)| (w - z).norm())
                .fold(f64::INFINITY, f64::min);
            let r = 0.5 * sep;
            let part = circle_rule(*z, r, nodes / 2, &mut integrand);
            acc[0] += part[0];
            acc[1] += part[1];
            circles.push((*z, r));
        }
        (acc, Contour::RootCircles { circles })
    };
    if let Some(_z) = failure {
        return Err(Error::SingularResidue {
            condition: f64::INFINITY,
        });
    }
    Ok(QuadratureResidue {
        a0: acc[0],
        a1: acc[1],
        contour,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cplx, max_abs};
    use crate::medium::Domain;
    use crate::{Mat3, Vec3};

    fn unit() -> Medium {
        Medium::homogeneous(1.0, 1.0, 1.0, Mat3::zeros()).unwrap()
    }

    fn gamma(tau: f64) -> BoundaryCovector {
        BoundaryCovector::new(&Domain::UnitBall, 0.0, Vec3::z(), tau, Vec3::x()).unwrap()
    }

    #[test]
    fn hand_residues_on_sh_vector() {
        let r = residue_matrices(&unit(), &gamma(2.0)).unwrap();
        let a = complexify(&Vec3::y());
        let expect = 1.0 / (2.0 * 3f64.sqrt());
        assert!((r.a0 * a - a * cplx(expect)).norm() < 1e-15);
        assert!((r.a1 * a - a * cplx(-0.5)).norm() < 1e-15);
    }

    #[test]
    fn a_one_relations() {
        let rm = Mat3::new(0.05, 0.02, 0.0, 0.02, -0.03, 0.01, 0.0, 0.01, 0.02);
        let m = Medium::homogeneous(1.0, 1.5, 1.0, rm).unwrap();
        let x = Vec3::new(0.0, 0.6, 0.8);
        for tau in [0.5, 1.4, 2.5] {
            let g = BoundaryCovector::restrict(&m.domain, 0.0, x, tau, &Vec3::new(1.0, 0.3, -0.2)).unwrap();
            let r = residue_matrices(&m, &g).unwrap();
            let (xs, xp) = (r.roots.s.covector, r.roots.p.covector);
            let v = xs;
            assert!((r.a1 * v - r.a0 * v * r.roots.p.selected).norm() < 1e-12);
            for w in crate::linalg::analytic_complement(&xp) {
                assert!((r.a1 * w - r.a0 * w * r.roots.s.selected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let m = unit();
        for tau in [0.5, 1.5, 2.0, 4.0] {
            let g = gamma(tau);
            let coef = m.coefficients(&g.x());
            let r = residue_matrices(&m, &g).unwrap();
            let q = residue_quadrature(&coef, &g, &r.roots, 256).unwrap();
            assert!(max_abs(&(q.a0 - r.a0)) < 1e-10, "tau {tau}");
            assert!(max_abs(&(q.a1 - r.a1)) < 1e-10, "tau {tau}");
        }
    }

    #[test]
    fn winding_numbers() {
        let c0 = Complex64::new(0.0, 0.0);
        assert!((winding(c0, 1.0, 64, Complex64::new(0.3, 0.2)) - 1.0).abs() < 1e-12);
        assert!(winding(c0, 1.0, 64, Complex64::new(2.5, 0.0)).abs() < 1e-12);
    }
}
