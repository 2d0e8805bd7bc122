//! Principal symbol of the Dirichlet-to-Neumann map, computed two ways.

use core::sync::atomic::{AtomicI8, Ordering};

use super::residue::{residue_matrices_at, ResidueData};
use super::BoundaryCovector;
use crate::linalg::{adot, complexify, cplx, max_abs, outer};
use crate::medium::{Coefficients, Medium};
use crate::symbols::traction_matrix;
use crate::{Mat3, Result, SymbolMatrix3, Vec3};

/// Sign in front of `s(ν) A₁ A₀^{-1}` in the residue route; 0 until
/// calibrated.
static RESIDUE_SIGN: AtomicI8 = AtomicI8::new(0);

/// Oblique-projector route from the selected root covectors.
pub fn dn_explicit(coef: &Coefficients, gamma: &BoundaryCovector, res: &ResidueData) -> SymbolMatrix3 {
    let nu = gamma.nu();
    let (xs, xp) = (res.roots.s.covector, res.roots.p.covector);
    let oblique = outer(&xp, &xs) / adot(&xp, &xs);
    let s_p = traction_matrix(coef, &nu, &xp);
    let s_s = traction_matrix(coef, &nu, &xs);
    s_p * oblique + s_s * (SymbolMatrix3::identity() - oblique)
}

fn dn_residue_with_sign(coef: &Coefficients, gamma: &BoundaryCovector, res: &ResidueData, sign: f64) -> SymbolMatrix3 {
    let nu = gamma.nu();
    let s_tan = traction_matrix(coef, &nu, &complexify(&gamma.xi()));
    let s_nu = traction_matrix(coef, &nu, &complexify(&nu));
    s_tan + s_nu * res.normal_derivative_symbol() * cplx(sign)
}

/// Fixes the residue-route sign once, by comparison with the explicit route
/// on the unit homogeneous medium at `τ = 2`, `ξ_| = e₁`, `x = e₃`.
pub fn residue_route_sign() -> f64 {
    let cached = RESIDUE_SIGN.load(Ordering::Relaxed);
    if cached != 0 {
        return cached as f64;
    }
    let m = Medium::homogeneous(1.0, 1.0, 1.0, Mat3::zeros()).expect("unit medium");
    let gamma = BoundaryCovector::new(&m.domain, 0.0, Vec3::z(), 2.0, Vec3::x()).expect("boundary covector");
    let coef = m.coefficients(&gamma.x());
    let res = residue_matrices_at(&coef, &gamma).expect("hyperbolic residues");
    let explicit = dn_explicit(&coef, &gamma, &res);
    let err = |s: f64| max_abs(&(dn_residue_with_sign(&coef, &gamma, &res, s) - explicit));
    let sign: i8 = if err(-1.0) <= err(1.0) { -1 } else { 1 };
    RESIDUE_SIGN.store(sign, Ordering::Relaxed);
    sign as f64
}

/// Residue route `s(ξ_|) ± s(ν) A₁ A₀^{-1}`.
pub fn dn_residue(coef: &Coefficients, gamma: &BoundaryCovector, res: &ResidueData) -> SymbolMatrix3 {
    dn_residue_with_sign(coef, gamma, res, residue_route_sign())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DnSymbol {
    pub explicit: SymbolMatrix3,
    pub residue: SymbolMatrix3,
    pub residues: ResidueData,
    /// `max|σ_E − σ_R| / max|σ_E|`.
    pub relative_difference: f64,
}

impl DnSymbol {
    pub fn matrix(&self) -> SymbolMatrix3 {
        self.explicit
    }
}

pub fn dn_symbol_at(coef: &Coefficients, gamma: &BoundaryCovector) -> Result<DnSymbol> {
    let residues = residue_matrices_at(coef, gamma)?;
    let explicit = dn_explicit(coef, gamma, &residues);
    let residue = dn_residue(coef, gamma, &residues);
    let scale = max_abs(&explicit).max(f64::MIN_POSITIVE);
    Ok(DnSymbol {
        explicit,
        residue,
        residues,
        relative_difference: max_abs(&(explicit - residue)) / scale,
    })
}

pub fn dn_symbol(m: &Medium, gamma: &BoundaryCovector) -> Result<DnSymbol> {
    dn_symbol_at(&m.coefficients(&gamma.x()), gamma)
}
