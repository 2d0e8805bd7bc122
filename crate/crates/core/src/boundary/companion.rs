//! First-order companion symbol of the quadratic pencil `z ↦ p(τ, ξ_| − zν)`.

use alloc::vec::Vec;

use nalgebra::linalg::Schur;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::roots::{char_roots_at, CharRoots, GLANCING_TOL};
use super::BoundaryCovector;
use crate::linalg::{analytic_complement, complexify, cplx, max_abs, numerical_rank, outer};
use crate::medium::{Coefficients, Medium};
use crate::symbols::principal_matrix;
use crate::{CMat6, CVec6, Complex64, Error, Mode, Result, SymbolMatrix3};

/// Relative singular-value cutoff for the kernel rank test.
pub const RANK_TOL: f64 = 1e-9;

/// Coefficients of `p(τ, ξ_| − zν) = A₂z² + A₁z + A₀`.
pub fn pencil_coefficients(coef: &Coefficients, gamma: &BoundaryCovector) -> [SymbolMatrix3; 3] {
    let nu = complexify(&gamma.nu());
    let xi = complexify(&gamma.xi());
    let r = coef.r().map(cplx);
    let lm = cplx(coef.lambda + coef.mu);
    let id = SymbolMatrix3::identity();
    let a0 = principal_matrix(coef, gamma.tau(), &xi);
    let a1 = (outer(&xi, &nu) + outer(&nu, &xi)) * lm + id * ((xi.dot(&nu) * coef.mu + nu.dot(&(r * xi))) * 2.0);
    let a2 = -(outer(&nu, &nu) * lm + id * (nu.dot(&(r * nu)) + coef.mu));
    [a0, a1, a2]
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompanionSymbol {
    /// `|η| = √(τ² + |ξ_||²)`.
    pub eta: f64,
    /// Monic coefficients `p̂₁ = A₂⁻¹A₁`, `p̂₂ = A₂⁻¹A₀`.
    pub p1: SymbolMatrix3,
    pub p2: SymbolMatrix3,
    pub g: CMat6,
    pub g_prime: CMat6,
}

impl CompanionSymbol {
    pub fn monic(&self, z: Complex64) -> SymbolMatrix3 {
        SymbolMatrix3::identity() * (z * z) + self.p1 * z + self.p2
    }
}

fn blocks(a: SymbolMatrix3, b: SymbolMatrix3, c: SymbolMatrix3, d: SymbolMatrix3) -> CMat6 {
    let mut m = CMat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&a);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&b);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&c);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&d);
    m
}

pub fn companion_symbol_at(coef: &Coefficients, gamma: &BoundaryCovector) -> Result<CompanionSymbol> {
    let eta = (gamma.tau().powi(2) + gamma.xi().norm_squared()).sqrt();
    if !(eta > 0.0) {
        return Err(Error::FrameDegenerate);
    }
    let [a0, a1, a2] = pencil_coefficients(coef, gamma);
    let inv = a2
        .try_inverse()
        .ok_or(Error::InvalidParameter("leading coefficient of the pencil is singular"))?;
    let (p1, p2) = (inv * a1, inv * a0);
    let id = SymbolMatrix3::identity();
    let zero = SymbolMatrix3::zeros();
    let e = cplx(eta);
    let g = blocks(zero, id * e, -p2 / e, -p1);
    let g_prime = blocks(-p1, -id * e, p2 / e, zero);
    Ok(CompanionSymbol {
        eta,
        p1,
        p2,
        g,
        g_prime,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelCheck {
    pub mode: Mode,
    pub root: Complex64,
    pub nullity: usize,
    pub expected: usize,
    /// `max|(z − g) v|` over the lifted kernel vectors `(|η|a, z a)`.
    pub residual: f64,
}

impl KernelCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.nullity == self.expected && self.residual <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompanionReport {
    pub symbol: CompanionSymbol,
    pub zeta: Complex64,
    /// `max|(ζ − g′)(ζ − g) − diag(p̂(ζ), p̂(ζ))|`.
    pub identity_residual: f64,
    pub eigenvalues: Vec<Complex64>,
    /// Largest distance under the best matching of eigenvalues to roots.
    pub eigenvalue_mismatch: f64,
    pub kernels: Vec<KernelCheck>,
}

impl CompanionReport {
    pub fn passed(&self, identity_tol: f64, eigen_tol: f64) -> bool {
        self.identity_residual <= identity_tol
            && self.eigenvalue_mismatch <= eigen_tol
            && self.kernels.iter().all(|k| k.passed(1e-10 * (1.0 + self.symbol.eta)))
    }
}

/// Best bottleneck matching of two equal-size multisets.
fn bottleneck(a: &[Complex64], b: &[Complex64]) -> f64 {
    fn go(a: &[Complex64], b: &[Complex64], used: &mut [bool], i: usize, cur: f64, best: &mut f64) {
        if cur >= *best {
            return;
        }
        if i == a.len() {
            *best = cur;
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(a, b, used, i + 1, cur.max((a[i] - b[j]).norm()), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut used = alloc::vec![false; b.len()];
    go(a, b, &mut used, 0, 0.0, &mut best);
    best
}

fn kernel_check(sym: &CompanionSymbol, roots: &CharRoots, mode: Mode, z: Complex64) -> KernelCheck {
    let shifted = CMat6::identity() * z - sym.g;
    let nullity = 6 - numerical_rank(&shifted, RANK_TOL);
    let covector = if z == roots.mode(mode).selected {
        roots.mode(mode).covector
    } else {
        roots.mode(mode).other_covector
    };
    let kernel: Vec<_> = match mode {
        Mode::S => analytic_complement(&covector).to_vec(),
        Mode::P => alloc::vec![covector / cplx(covector.norm())],
    };
    let e = cplx(sym.eta);
    let residual = kernel
        .iter()
        .map(|a| {
            let mut v = CVec6::zeros();
            v.fixed_rows_mut::<3>(0).copy_from(&(a * e));
            v.fixed_rows_mut::<3>(3).copy_from(&(a * z));
            (shifted * v).norm() / v.norm()
        })
        .fold(0.0, f64::max);
    KernelCheck {
        mode,
        root: z,
        nullity,
        expected: kernel.len(),
        residual,
    }
}

pub fn companion_symbol_check_at(
    coef: &Coefficients,
    gamma: &BoundaryCovector,
    zeta: Complex64,
) -> Result<CompanionReport> {
    let symbol = companion_symbol_at(coef, gamma)?;
    let roots = char_roots_at(coef, gamma, GLANCING_TOL)?;

    let shift = |m: &CMat6| CMat6::identity() * zeta - m;
    let product = shift(&symbol.g_prime) * shift(&symbol.g);
    let pz = symbol.monic(zeta);
    let diag = blocks(pz, SymbolMatrix3::zeros(), SymbolMatrix3::zeros(), pz);
    let identity_residual = max_abs(&(product - diag));

    let eigenvalues: Vec<Complex64> = Schur::new(symbol.g)
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default();
    let expected = [
        roots.s.selected,
        roots.s.selected,
        roots.s.other,
        roots.s.other,
        roots.p.selected,
        roots.p.other,
    ];
    let eigenvalue_mismatch = if eigenvalues.len() == 6 {
        bottleneck(&eigenvalues, &expected)
    } else {
        f64::INFINITY
    };

    let mut kernels = Vec::new();
    for mode in Mode::BOTH {
        let r = roots.mode(mode);
        for z in [r.selected, r.other] {
            kernels.push(kernel_check(&symbol, &roots, mode, z));
        }
    }
    Ok(CompanionReport {
        symbol,
        zeta,
        identity_residual,
        eigenvalues,
        eigenvalue_mismatch,
        kernels,
    })
}

pub fn companion_symbol_check(m: &Medium, gamma: &BoundaryCovector, zeta: Complex64) -> Result<CompanionReport> {
    companion_symbol_check_at(&m.coefficients(&gamma.x()), gamma, zeta)
}
