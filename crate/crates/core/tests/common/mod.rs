#![allow(dead_code)]

use elastoray_core::boundary::{BoundaryCovector, ModeQuadratic};
use elastoray_core::medium::{
    stress_from_potential, ClassParams, Domain, Medium, Monomial, Polynomial, ResidualStressField, ScalarField,
};
use elastoray_core::sampling::{gamma_delta_covector, SampleRng};
use elastoray_core::{Mat3, Mode, Vec3};
use rand::Rng;

pub fn unit() -> Medium {
    Medium::homogeneous(1.0, 1.0, 1.0, Mat3::zeros()).unwrap()
}

pub fn constant_stress() -> Medium {
    Medium::homogeneous(1.0, 1.0, 1.0, Mat3::from_diagonal(&Vec3::new(0.1, 0.0, -0.1))).unwrap()
}

/// `R = Hess ψ − Δψ Id` for a small cubic-plus-quartic potential.
pub fn potential_stress() -> Medium {
    let psi = Polynomial::new(vec![
        Monomial::new(0.02, [2, 1, 0]),
        Monomial::new(-0.015, [0, 1, 2]),
        Monomial::new(0.01, [1, 1, 1]),
        Monomial::new(0.005, [2, 2, 0]),
    ])
    .unwrap();
    Medium::new(
        ScalarField::Constant(1.0),
        ScalarField::Constant(1.2),
        ScalarField::Constant(1.0),
        stress_from_potential(&ScalarField::Polynomial(psi)).unwrap(),
        Domain::UnitBall,
    )
    .unwrap()
}

/// Radial Gaussian bumps in `λ` and `μ`, `R = 0`.
pub fn bump() -> Medium {
    Medium::new(
        ScalarField::Constant(1.0),
        ScalarField::gaussian_bump(1.0, 0.4, Vec3::zeros(), 0.6).unwrap(),
        ScalarField::gaussian_bump(1.0, 0.3, Vec3::zeros(), 0.6).unwrap(),
        ResidualStressField::zero(),
        Domain::UnitBall,
    )
    .unwrap()
}

pub fn params() -> ClassParams {
    ClassParams::new(4.0, 0.2, 0.3).unwrap()
}

pub fn admissible_media() -> Vec<(&'static str, Medium)> {
    vec![
        ("R=0", unit()),
        ("constant R", constant_stress()),
        ("potential R", potential_stress()),
        ("bump", bump()),
    ]
}

pub fn uniform_in_ball<R: Rng>(rng: &mut R, radius: f64) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.norm_squared() <= 1.0 {
            return v * radius;
        }
    }
}

/// Smallest normalized discriminant magnitude over both modes.
pub fn glancing_margin(m: &Medium, g: &BoundaryCovector) -> f64 {
    let c = m.coefficients(&g.x());
    Mode::BOTH
        .iter()
        .map(|&mode| ModeQuadratic::new(&c, mode, g).normalized_disc().abs())
        .fold(f64::INFINITY, f64::min)
}

/// `Γ_δ` covector with both normalized discriminants at least `margin`.
pub fn non_glancing(m: &Medium, delta: f64, margin: f64, rng: &mut SampleRng) -> BoundaryCovector {
    loop {
        let g = gamma_delta_covector(&m.domain, delta, rng);
        if glancing_margin(m, &g) >= margin {
            return g;
        }
    }
}
