//! Normal-covector quadratics `q_mode(τ, ξ_| − zν) = 0`, region labels and
//! forward root selection.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::BoundaryCovector;
use crate::linalg::{adot, complexify, cplx};
use crate::medium::{ClassParams, Coefficients, Medium};
use crate::symbols::{char_symbol, dual_metric_matrix};
use crate::{CVec3, Complex64, Error, Mode, Result};

/// Default glancing threshold on the normalized discriminant.
pub const GLANCING_TOL: f64 = 1e-10;

/// `g(ν,ν) z² − 2 g(ξ,ν) z + (g(ξ,ξ) − τ²) = 0` for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeQuadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Reduced discriminant `b² − ac`.
    pub disc: f64,
    /// Normalization `a (g(ξ,ξ) + τ²) + b²` for the discriminant.
    pub scale2: f64,
}

impl ModeQuadratic {
    pub fn new(coef: &Coefficients, mode: Mode, gamma: &BoundaryCovector) -> Self {
        let g = dual_metric_matrix(coef, mode);
        let (xi, nu, tau) = (gamma.xi(), gamma.nu(), gamma.tau());
        let a = nu.dot(&(g * nu));
        let b = xi.dot(&(g * nu));
        let xx = xi.dot(&(g * xi));
        let c = xx - tau * tau;
        ModeQuadratic {
            a,
            b,
            c,
            disc: b * b - a * c,
            scale2: a * (xx + tau * tau) + b * b,
        }
    }

    /// Discriminant relative to `scale²`.
    pub fn normalized_disc(&self) -> f64 {
        self.disc / self.scale2
    }

    pub fn region(&self, glancing_tol: f64) -> ModeRegion {
        let d = self.normalized_disc();
        if d.abs() < glancing_tol {
            ModeRegion::Glancing
        } else if d > 0.0 {
            ModeRegion::Hyperbolic
        } else {
            ModeRegion::Elliptic
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeRegion {
    Elliptic,
    Hyperbolic,
    Glancing,
}

/// Combined label: `H_P`, mixed `E_P ∩ H_S`, `E_S`, or glancing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    HyperbolicP,
    Mixed,
    EllipticS,
    Glancing,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::HyperbolicP => "H_P",
            Region::Mixed => "mixed",
            Region::EllipticS => "E_S",
            Region::Glancing => "glancing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionLabel {
    pub s: ModeRegion,
    pub p: ModeRegion,
    pub region: Region,
    pub in_gamma_delta: bool,
    pub glancing_tol: f64,
    /// Normalized discriminants `(S, P)`.
    pub discriminants: (f64, f64),
}

impl RegionLabel {
    /// `E_S ⊂ E_P` and `H_P ⊂ H_S` at this covector.
    pub fn is_consistent(&self) -> bool {
        let e_s_ok = self.s != ModeRegion::Elliptic || self.p == ModeRegion::Elliptic;
        let h_p_ok = self.p != ModeRegion::Hyperbolic || self.s == ModeRegion::Hyperbolic;
        e_s_ok && h_p_ok
    }
}

pub fn classify_at(coef: &Coefficients, gamma: &BoundaryCovector, delta: f64, glancing_tol: f64) -> RegionLabel {
    let qs = ModeQuadratic::new(coef, Mode::S, gamma);
    let qp = ModeQuadratic::new(coef, Mode::P, gamma);
    let (s, p) = (qs.region(glancing_tol), qp.region(glancing_tol));
    let region = match (s, p) {
        (ModeRegion::Glancing, _) | (_, ModeRegion::Glancing) => Region::Glancing,
        (_, ModeRegion::Hyperbolic) => Region::HyperbolicP,
        (ModeRegion::Hyperbolic, ModeRegion::Elliptic) => Region::Mixed,
        (ModeRegion::Elliptic, ModeRegion::Elliptic) => Region::EllipticS,
    };
    RegionLabel {
        s,
        p,
        region,
        in_gamma_delta: gamma.in_gamma_delta(delta),
        glancing_tol,
        discriminants: (qs.normalized_disc(), qp.normalized_disc()),
    }
}

pub fn classify(m: &Medium, gamma: &BoundaryCovector, params: &ClassParams, glancing_tol: f64) -> RegionLabel {
    classify_at(&m.coefficients(&gamma.x()), gamma, params.delta, glancing_tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    Real,
    Complex,
}

/// Both roots of one mode's quadratic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRoots {
    pub mode: Mode,
    pub kind: RootKind,
    /// Forward real root, or the complex root with positive imaginary part.
    pub selected: Complex64,
    /// Backward real root, or the conjugate root.
    pub other: Complex64,
    /// `ξ_| − z ν` at the selected root.
    pub covector: CVec3,
    /// `ξ_| − z ν` at the other root.
    pub other_covector: CVec3,
    /// `c = d/dz q(τ, ξ_| − zν)` at the selected root.
    pub c_factor: Complex64,
    /// Normalized discriminant.
    pub discriminant: f64,
}

impl ModeRoots {
    pub fn is_real(&self) -> bool {
        self.kind == RootKind::Real
    }

    pub fn forward(&self) -> Option<f64> {
        self.is_real().then_some(self.selected.re)
    }

    pub fn backward(&self) -> Option<f64> {
        self.is_real().then_some(self.other.re)
    }
}

fn solve_mode(coef: &Coefficients, mode: Mode, gamma: &BoundaryCovector, glancing_tol: f64) -> Result<ModeRoots> {
    let q = ModeQuadratic::new(coef, mode, gamma);
    let nd = q.normalized_disc();
    if nd.abs() < glancing_tol {
        return Err(Error::Glancing { mode, discriminant: nd });
    }
    let tau = gamma.tau();
    let (kind, selected, other) = if q.disc > 0.0 {
        let sq = q.disc.sqrt();
        // cancellation-free pair: z1 z2 = c/a
        let big = q.b + if q.b >= 0.0 { sq } else { -sq };
        let (z1, z2) = (big / q.a, q.c / big);
        // forward iff τ g(ξ − zν, ν) = τ (b − z a) > 0
        let fwd = |z: f64| tau * (q.b - z * q.a) > 0.0;
        let (f, bwd) = if fwd(z1) { (z1, z2) } else { (z2, z1) };
        debug_assert!(fwd(f) && !fwd(bwd));
        (RootKind::Real, cplx(f), cplx(bwd))
    } else {
        let im = (-q.disc).sqrt() / q.a;
        let re = q.b / q.a;
        (RootKind::Complex, Complex64::new(re, im), Complex64::new(re, -im))
    };
    let xi = complexify(&gamma.xi());
    let nu = complexify(&gamma.nu());
    Ok(ModeRoots {
        mode,
        kind,
        selected,
        other,
        covector: xi - nu * selected,
        other_covector: xi - nu * other,
        c_factor: (cplx(q.b) - selected * q.a) * (2.0 * coef.rho),
        discriminant: nd,
    })
}

/// Roots of one mode at `γ`.
pub fn mode_roots(m: &Medium, gamma: &BoundaryCovector, mode: Mode) -> Result<ModeRoots> {
    solve_mode(&m.coefficients(&gamma.x()), mode, gamma, GLANCING_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharRoots {
    pub s: ModeRoots,
    pub p: ModeRoots,
    /// Lopatinski product `ξ_S · ξ_P` (analytic).
    pub lopatinski: Complex64,
}

impl CharRoots {
    pub fn mode(&self, mode: Mode) -> &ModeRoots {
        match mode {
            Mode::S => &self.s,
            Mode::P => &self.p,
        }
    }

    /// `|ξ_S·ξ_P| / (|ξ_S| |ξ_P|)` with analytic norms.
    pub fn normalized_lopatinski(&self) -> f64 {
        let ns = crate::linalg::analytic_norm(&self.s.covector);
        let np = crate::linalg::analytic_norm(&self.p.covector);
        self.lopatinski.norm() / (ns * np)
    }

    /// Largest `|q_mode(τ, ξ_mode)|` over both selected roots, relative to `ρ scale²`.
    pub fn residual(&self, coef: &Coefficients, gamma: &BoundaryCovector) -> f64 {
        Mode::BOTH
            .iter()
            .map(|&mode| {
                let r = self.mode(mode);
                let q = ModeQuadratic::new(coef, mode, gamma);
                let scale = coef.rho * (q.scale2 / q.a).max(gamma.tau() * gamma.tau());
                char_symbol(coef, mode, gamma.tau(), &r.covector).norm() / scale
            })
            .fold(0.0, f64::max)
    }
}

pub fn char_roots_at(coef: &Coefficients, gamma: &BoundaryCovector, glancing_tol: f64) -> Result<CharRoots> {
    let s = solve_mode(coef, Mode::S, gamma, glancing_tol)?;
    let p = solve_mode(coef, Mode::P, gamma, glancing_tol)?;
    Ok(CharRoots {
        s,
        p,
        lopatinski: adot(&s.covector, &p.covector),
    })
}

/// Characteristic roots of both modes; errors at glancing covectors.
pub fn char_roots(m: &Medium, gamma: &BoundaryCovector) -> Result<CharRoots> {
    char_roots_at(&m.coefficients(&gamma.x()), gamma, GLANCING_TOL)
}
