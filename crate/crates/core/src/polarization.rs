//! Polarization bundles in the Cauchy-data space `C⁶` and compressional
//! muting.

use alloc::vec::Vec;

use rand::Rng;

use crate::boundary::{char_roots_at, BoundaryCovector, CharRoots, GLANCING_TOL};
use crate::linalg::{analytic_complement, complexify_mat, condition_number, cplx, singular_values};
use crate::medium::{Coefficients, Medium};
use crate::sampling::seeded;
use crate::symbols::traction_matrix;
use crate::{CMat6, CVec3, CVec6, Error, Mat3, Mode, Result, SymbolMatrix3};

/// Basis condition number beyond which the frame is rejected.
pub const MAX_FRAME_CONDITION: f64 = 1e8;

/// Cauchy data `(e u, traction)` at a boundary covector.
pub type CauchyVector = CVec6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bundle {
    SPlus,
    SMinus,
    PPlus,
    PMinus,
    /// Both complex P roots, used when P is elliptic.
    P,
}

impl Bundle {
    pub fn mode(self) -> Mode {
        match self {
            Bundle::SPlus | Bundle::SMinus => Mode::S,
            _ => Mode::P,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Bundle::SPlus => "S+",
            Bundle::SMinus => "S-",
            Bundle::PPlus => "P+",
            Bundle::PMinus => "P-",
            Bundle::P => "P",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BundleBlock {
    pub bundle: Bundle,
    pub basis: Vec<CauchyVector>,
    pub projector: CMat6,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationFrame {
    pub gamma: BoundaryCovector,
    pub roots: CharRoots,
    /// `e(γ) = √(τ² + |ξ_||²)`.
    pub e: f64,
    pub blocks: Vec<BundleBlock>,
    /// Columns are the normalized basis vectors of all blocks in order.
    pub basis: CMat6,
    pub condition: f64,
}

fn spectral_norm(m: &CMat6) -> f64 {
    singular_values(m)[0]
}

impl PolarizationFrame {
    pub fn block(&self, bundle: Bundle) -> Option<&BundleBlock> {
        self.blocks.iter().find(|b| b.bundle == bundle)
    }

    pub fn p_hyperbolic(&self) -> bool {
        self.block(Bundle::P).is_none()
    }

    /// `π_P = π_P^+ + π_P^−`, or the single P projector when P is elliptic.
    pub fn p_projector(&self) -> CMat6 {
        self.blocks
            .iter()
            .filter(|b| b.bundle.mode() == Mode::P)
            .fold(CMat6::zeros(), |acc, b| acc + b.projector)
    }

    pub fn s_projector(&self) -> CMat6 {
        self.blocks
            .iter()
            .filter(|b| b.bundle.mode() == Mode::S)
            .fold(CMat6::zeros(), |acc, b| acc + b.projector)
    }

    pub fn ranks(&self) -> Vec<(Bundle, usize)> {
        self.blocks.iter().map(|b| (b.bundle, b.basis.len())).collect()
    }

    /// `‖Σπ − Id‖`.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self.blocks.iter().fold(CMat6::zeros(), |acc, b| acc + b.projector);
        spectral_norm(&(sum - CMat6::identity()))
    }

    /// `max ‖π² − π‖`.
    pub fn idempotence_residual(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| spectral_norm(&(b.projector * b.projector - b.projector)))
            .fold(0.0, f64::max)
    }

    /// `max ‖π_i π_j‖` over distinct blocks.
    pub fn cross_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.blocks.iter().enumerate() {
            for (j, b) in self.blocks.iter().enumerate() {
                if i != j {
                    worst = worst.max(spectral_norm(&(a.projector * b.projector)));
                }
            }
        }
        worst
    }
}

fn lift(coef: &Coefficients, gamma: &BoundaryCovector, e: f64, xi: &CVec3, a: &CVec3) -> CauchyVector {
    let s = traction_matrix(coef, &gamma.nu(), xi);
    let mut v = CVec6::zeros();
    v.fixed_rows_mut::<3>(0).copy_from(&(a * cplx(e)));
    v.fixed_rows_mut::<3>(3).copy_from(&(s * a));
    v / cplx(v.norm())
}

fn kernel_basis(mode: Mode, xi: &CVec3) -> Vec<CVec3> {
    match mode {
        Mode::S => analytic_complement(xi).to_vec(),
        Mode::P => alloc::vec![xi / cplx(xi.norm())],
    }
}

pub fn polarization_frame_at(coef: &Coefficients, gamma: &BoundaryCovector) -> Result<PolarizationFrame> {
    let roots = char_roots_at(coef, gamma, GLANCING_TOL)?;
    if !roots.s.is_real() {
        return Err(Error::NotHyperbolic { mode: Mode::S });
    }
    let e = gamma.frequency();
    let mut groups: Vec<(Bundle, Vec<CauchyVector>)> = Vec::new();
    let mut push = |bundle: Bundle, mode: Mode, xis: &[CVec3]| {
        let vs = xis
            .iter()
            .flat_map(|xi| kernel_basis(mode, xi).into_iter().map(move |a| (*xi, a)))
            .map(|(xi, a)| lift(coef, gamma, e, &xi, &a))
            .collect();
        groups.push((bundle, vs));
    };
    push(Bundle::SPlus, Mode::S, &[roots.s.covector]);
    push(Bundle::SMinus, Mode::S, &[roots.s.other_covector]);
    if roots.p.is_real() {
        push(Bundle::PPlus, Mode::P, &[roots.p.covector]);
        push(Bundle::PMinus, Mode::P, &[roots.p.other_covector]);
    } else {
        push(Bundle::P, Mode::P, &[roots.p.covector, roots.p.other_covector]);
    }

    let mut basis = CMat6::zeros();
    let mut col = 0;
    for (_, vs) in &groups {
        for v in vs {
            basis.set_column(col, v);
            col += 1;
        }
    }
    let condition = condition_number(&basis);
    if !(condition <= MAX_FRAME_CONDITION) {
        return Err(Error::NearDegenerateFrame { condition });
    }
    let inv = basis.try_inverse().ok_or(Error::NearDegenerateFrame {
        condition: f64::INFINITY,
    })?;

    let mut blocks = Vec::with_capacity(groups.len());
    let mut start = 0;
    for (bundle, vs) in groups {
        let mut sel = CMat6::zeros();
        for k in start..start + vs.len() {
            sel[(k, k)] = cplx(1.0);
        }
        start += vs.len();
        blocks.push(BundleBlock {
            bundle,
            basis: vs,
            projector: basis * sel * inv,
        });
    }
    Ok(PolarizationFrame {
        gamma: *gamma,
        roots,
        e,
        blocks,
        basis,
        condition,
    })
}

pub fn polarization_frame(m: &Medium, gamma: &BoundaryCovector) -> Result<PolarizationFrame> {
    polarization_frame_at(&m.coefficients(&gamma.x()), gamma)
}

/// Orthogonal projector `w⊗w` onto `w = ν×ξ_| / |ν×ξ_||`.
pub fn mute_symbol(gamma: &BoundaryCovector) -> Result<Mat3> {
    let w = gamma.nu().cross(&gamma.xi());
    let scale = gamma.tau().abs().max(gamma.xi().norm());
    if !(w.norm() > 1e-12 * scale) {
        return Err(Error::DegenerateMuting);
    }
    let w = w.normalize();
    Ok(w * w.transpose())
}

fn double(m: &SymbolMatrix3) -> CMat6 {
    let mut d = CMat6::zeros();
    d.fixed_view_mut::<3, 3>(0, 0).copy_from(m);
    d.fixed_view_mut::<3, 3>(3, 3).copy_from(m);
    d
}

/// `‖π_P ∘ diag(m̃, m̃)‖` for an arbitrary 3×3 muting candidate `m̃`.
pub fn muting_residual(frame: &PolarizationFrame, mute: &Mat3) -> f64 {
    spectral_norm(&(frame.p_projector() * double(&complexify_mat(mute))))
}

/// `‖π_P ∘ diag(m, m)‖` at `γ`.
pub fn muting_annihilation_check(m: &Medium, gamma: &BoundaryCovector) -> Result<f64> {
    let frame = polarization_frame(m, gamma)?;
    Ok(muting_residual(&frame, &mute_symbol(gamma)?))
}

/// Random symmetric direction of unit Frobenius norm.
pub fn random_symmetric<R: Rng>(rng: &mut R) -> Mat3 {
    let mut s = Mat3::zeros();
    for i in 0..3 {
        for j in i..3 {
            let v: f64 = rng.random_range(-1.0..1.0);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s / s.norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationControl {
    pub exact: f64,
    pub perturbed: f64,
    pub amplitude: f64,
}

/// Negative control: the annihilation residual with `m + amplitude·S` for a
/// seeded random symmetric `S`.
pub fn muting_perturbation_control(
    m: &Medium,
    gamma: &BoundaryCovector,
    amplitude: f64,
    seed: u64,
) -> Result<PerturbationControl> {
    let frame = polarization_frame(m, gamma)?;
    let mute = mute_symbol(gamma)?;
    let dir = random_symmetric(&mut seeded(seed));
    Ok(PerturbationControl {
        exact: muting_residual(&frame, &mute),
        perturbed: muting_residual(&frame, &(mute + dir * amplitude)),
        amplitude,
    })
}

/// `‖(Id − m) σ(Λ) m‖` for a DN symbol matrix.
pub fn dn_muting_leak(dn: &SymbolMatrix3, mute: &Mat3) -> f64 {
    let m = complexify_mat(mute);
    let leak = (SymbolMatrix3::identity() - m) * dn * m;
    singular_values(&leak)[0]
}
