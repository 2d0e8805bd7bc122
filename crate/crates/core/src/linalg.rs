//! Small fixed-size helpers on top of `nalgebra`.
//!
//! Dot products on complex vectors are always the analytic (bilinear)
//! extension `η·ζ = Σ η_i ζ_i`; nalgebra's `dot` is exactly that, `dotc` is the
//! Hermitian one and is never used for symbols.

use nalgebra::{DMatrix, SMatrix, SymmetricEigen, SVD};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{CVec3, Complex64, Mat3, SymbolMatrix3, Vec3};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn cplx(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn complexify(v: &Vec3) -> CVec3 {
    v.map(cplx)
}

pub fn complexify_mat(m: &Mat3) -> SymbolMatrix3 {
    m.map(cplx)
}

/// Analytic dot product.
pub fn adot(a: &CVec3, b: &CVec3) -> Complex64 {
    a.dot(b)
}

/// `u ⊗ v`, acting as `a ↦ u (v·a)`.
pub fn outer(u: &CVec3, v: &CVec3) -> SymbolMatrix3 {
    u * v.transpose()
}

/// `|η| = |η·η|^{1/2}` with the analytic square.
pub fn analytic_norm(v: &CVec3) -> f64 {
    adot(v, v).norm().sqrt()
}

/// `π(ξ) = ξ⊗ξ / ξ·ξ`, or `None` when `ξ·ξ` vanishes relative to `|ξ|²`.
pub fn analytic_projector(xi: &CVec3) -> Option<SymbolMatrix3> {
    let sq = adot(xi, xi);
    let scale = xi.norm_squared();
    if scale == 0.0 || sq.norm() <= 1e-14 * scale {
        return None;
    }
    Some(outer(xi, xi) / sq)
}

/// Two Euclidean-normalized vectors spanning `{a : a·ξ = 0}` (analytic dot).
pub fn analytic_complement(xi: &CVec3) -> [CVec3; 2] {
    let k = (0..3)
        .max_by(|&i, &j| xi[i].norm().partial_cmp(&xi[j].norm()).unwrap())
        .unwrap();
    let mut out = [CVec3::zeros(), CVec3::zeros()];
    for (n, i) in (0..3).filter(|&i| i != k).enumerate() {
        let mut a = CVec3::zeros();
        a[i] = xi[k];
        a[k] = -xi[i];
        let len = a.norm();
        out[n] = if len > 0.0 { a / cplx(len) } else { a };
    }
    // Orthogonalize the pair (Hermitian Gram-Schmidt keeps both in the complement).
    let proj = out[0].dotc(&out[1]);
    let b = out[1] - out[0] * proj;
    out[1] = b / cplx(b.norm());
    out
}

/// Real orthonormal pair completing the unit vector `n` to a right-handed frame.
pub fn tangent_frame(n: &Vec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (helper - n * n.dot(&helper)).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

/// Eigenvalues of a real symmetric 3×3 matrix, ascending.
pub fn sym_eigenvalues(m: &Mat3) -> [f64; 3] {
    let eig = SymmetricEigen::new(*m);
    let mut v = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Spectral norm of a real symmetric matrix: largest absolute eigenvalue.
pub fn sym_spectral_norm(m: &Mat3) -> f64 {
    let e = sym_eigenvalues(m);
    e[0].abs().max(e[2].abs())
}

/// Singular values (descending) of a square complex matrix.
pub fn singular_values<const N: usize>(m: &SMatrix<Complex64, N, N>) -> [f64; N] {
    let svd = SVD::new(DMatrix::from_column_slice(N, N, m.as_slice()), false, false);
    let mut s = [0.0; N];
    for (dst, src) in s.iter_mut().zip(svd.singular_values.iter()) {
        *dst = *src;
    }
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// 2-norm condition number; `f64::INFINITY` for singular input.
pub fn condition_number<const N: usize>(m: &SMatrix<Complex64, N, N>) -> f64 {
    let s = singular_values(m);
    if s[N - 1] == 0.0 {
        f64::INFINITY
    } else {
        s[0] / s[N - 1]
    }
}

/// Numerical rank with singular values below `rel_tol * σ_max` treated as zero.
pub fn numerical_rank<const N: usize>(m: &SMatrix<Complex64, N, N>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    if s[0] == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * s[0]).count()
}

/// Largest entry magnitude.
pub fn max_abs<const R: usize, const C: usize>(m: &SMatrix<Complex64, R, C>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_annihilated_by_analytic_dot() {
        let xi = CVec3::new(Complex64::new(1.0, 0.5), cplx(-2.0), Complex64::new(0.0, 3.0));
        for a in analytic_complement(&xi) {
            assert!(adot(&a, &xi).norm() < 1e-14);
            assert!((a.norm() - 1.0).abs() < 1e-14);
        }
        let [a, b] = analytic_complement(&xi);
        assert!(a.dotc(&b).norm() < 1e-14);
    }

    #[test]
    fn tangent_frame_is_orthonormal() {
        let n = Vec3::new(0.3, -0.4, 0.866).normalize();
        let (e1, e2) = tangent_frame(&n);
        assert!(e1.dot(&n).abs() < 1e-15 && e2.dot(&n).abs() < 1e-15);
        assert!(e1.dot(&e2).abs() < 1e-15);
        assert!((e1.cross(&e2) - n).norm() < 1e-15);
    }

    #[test]
    fn symmetric_spectral_norm() {
        let m = Mat3::new(0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -0.3);
        assert!((sym_spectral_norm(&m) - 0.3).abs() < 1e-15);
        assert_eq!(sym_eigenvalues(&m)[0], -0.3);
    }

    #[test]
    fn projector_fails_on_isotropic_vector() {
        let xi = CVec3::new(ONE, Complex64::i(), ZERO);
        assert!(analytic_projector(&xi).is_none());
    }
}
