//! Seeded random sampling of boundary points and covectors.

use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boundary::BoundaryCovector;
use crate::linalg::tangent_frame;
use crate::medium::Domain;
use crate::Vec3;

pub type SampleRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly distributed unit vector.
pub fn unit_vector<R: Rng>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

pub fn boundary_point<R: Rng>(domain: &Domain, rng: &mut R) -> Vec3 {
    domain.boundary_point(&unit_vector(rng))
}

/// Covector in `Γ_δ` with `|τ| = 1`, random sign, and `|ξ_|| ≤ 1/δ`
/// uniform in magnitude and direction.
pub fn gamma_delta_covector<R: Rng>(domain: &Domain, delta: f64, rng: &mut R) -> BoundaryCovector {
    let x = boundary_point(domain, rng);
    let nu = domain.normal(&x);
    let (e1, e2) = tangent_frame(&nu);
    let theta: f64 = rng.random_range(0.0..2.0 * PI);
    let k = rng.random_range(0.0..=1.0) / delta;
    let tau = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let xi = (e1 * theta.cos() + e2 * theta.sin()) * k;
    BoundaryCovector::restrict(domain, 0.0, x, tau, &xi).expect("sampled point lies on the boundary")
}

/// Interior launch direction at a boundary point: uniform over the inward
/// hemisphere, tilted at most `max_angle` from `−ν`.
pub fn inward_direction<R: Rng>(nu: &Vec3, max_angle: f64, rng: &mut R) -> Vec3 {
    let (e1, e2) = tangent_frame(nu);
    let cos_min = max_angle.cos();
    let c: f64 = rng.random_range(cos_min..=1.0);
    let s = (1.0 - c * c).max(0.0).sqrt();
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    -nu * c + (e1 * phi.cos() + e2 * phi.sin()) * s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covectors_lie_in_gamma_delta() {
        let mut rng = seeded(7);
        let d = Domain::ellipsoid(Vec3::new(1.0, 0.8, 1.2)).unwrap();
        for _ in 0..200 {
            let g = gamma_delta_covector(&d, 0.5, &mut rng);
            assert!(g.in_gamma_delta(0.5));
            assert!(g.xi().dot(&g.nu()).abs() < 1e-12);
        }
    }

    #[test]
    fn inward_directions_point_inside() {
        let mut rng = seeded(1);
        let nu = Vec3::new(0.0, 0.6, 0.8);
        for _ in 0..100 {
            let d = inward_direction(&nu, 1.2, &mut rng);
            assert!((d.norm() - 1.0).abs() < 1e-12);
            assert!(d.dot(&-nu) >= 1.2f64.cos() - 1e-12);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = unit_vector(&mut seeded(3));
        let b = unit_vector(&mut seeded(3));
        assert_eq!(a, b);
    }
}
