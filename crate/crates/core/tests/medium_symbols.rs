mod common;

use common::*;
use elastoray_core::linalg::{complexify, numerical_rank};
use elastoray_core::medium::{
    check_class_membership, stress_from_potential, Domain, Medium, Monomial, Polynomial, ScalarField, CLASS_GRID,
};
use elastoray_core::symbols::{char_symbol, metric_inv, principal_symbol, principal_symbol_at};
use elastoray_core::{CVec3, Complex64, Mat3, Mode, Vec3};
use proptest::prelude::*;

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(a, b, c)| Vec3::new(a, b, c))
}

fn point_in_ball() -> impl Strategy<Value = Vec3> {
    vec3(0.577)
}

fn monomial() -> impl Strategy<Value = Monomial> {
    (-1.0..1.0f64, 0u32..=2, 0u32..=2, 0u32..=2)
        .prop_filter("degree at most 4", |(_, a, b, c)| a + b + c <= 4)
        .prop_map(|(k, a, b, c)| Monomial::new(k, [a, b, c]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn potential_stress_is_divergence_free_by_differences(terms in prop::collection::vec(monomial(), 1..5)) {
        let psi = ScalarField::Polynomial(Polynomial::new(terms).unwrap());
        let r = stress_from_potential(&psi).unwrap();
        let h = 1e-4;
        let n = 11;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let u = |q: usize| -0.5 + q as f64 / (n - 1) as f64;
                    let x = Vec3::new(u(i), u(j), u(k));
                    let mut div = Vec3::zeros();
                    for a in 0..3 {
                        let mut e = Vec3::zeros();
                        e[a] = h;
                        let d = (r.eval(&(x + e)).r - r.eval(&(x - e)).r) / (2.0 * h);
                        div += d.row(a).transpose();
                    }
                    worst = worst.max(div.amax());
                    prop_assert!(r.eval(&x).divergence.amax() < 1e-12);
                }
            }
        }
        // central differences of a degree-≤2 stress field are exact up to rounding
        prop_assert!(worst < 1e-10, "numerical divergence {worst:e}");
    }

    #[test]
    fn factorization_identities(x in point_in_ball(), tau in -3.0..3.0f64, re in vec3(2.0), im in vec3(1.0), which in 0usize..3) {
        let m = [unit(), constant_stress(), potential_stress()][which].clone();
        let xi = CVec3::from_fn(|i, _| Complex64::new(re[i], im[i]));
        let c = m.coefficients(&x);
        let sym = principal_symbol_at(&c, tau, &xi).unwrap();
        let qs = char_symbol(&c, Mode::S, tau, &xi);
        let qp = char_symbol(&c, Mode::P, tau, &xi);
        let prod = sym.p_tilde * sym.p;
        let scale = sym.p.camax() * sym.p_tilde.camax();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { qs * qp } else { Complex64::new(0.0, 0.0) };
                prop_assert!((prod[(i, j)] - expect).norm() <= 1e-12 * scale);
            }
        }
        let target = qs * qs * qp;
        prop_assert!((sym.p.determinant() - target).norm() <= 1e-10 * target.norm().max(1.0));
    }

    #[test]
    fn compressional_symbol_below_shear(x in point_in_ball(), tau in -3.0..3.0f64, xi in vec3(2.0), which in 0usize..3) {
        prop_assume!(xi.norm() > 1e-6);
        let m = [unit(), constant_stress(), potential_stress()][which].clone();
        let c = m.coefficients(&x);
        let xi = complexify(&xi);
        prop_assert!(char_symbol(&c, Mode::P, tau, &xi).re < char_symbol(&c, Mode::S, tau, &xi).re);
    }

    #[test]
    fn metric_gradient_matches_differences(x in point_in_ball(), xi in vec3(2.0), which in 0usize..4) {
        prop_assume!(xi.norm() > 0.1);
        let m = admissible_media()[which].1.clone();
        for mode in Mode::BOTH {
            let g = metric_inv(&m, mode, &x, &xi).unwrap();
            let h = 1e-6;
            for k in 0..3 {
                let mut e = Vec3::zeros();
                e[k] = h;
                let fd = (metric_inv(&m, mode, &(x + e), &xi).unwrap().value - metric_inv(&m, mode, &(x - e), &xi).unwrap().value) / (2.0 * h);
                prop_assert!((fd - g.grad_x[k]).abs() <= 1e-6 * g.grad_x.norm().max(g.value), "{fd} vs {}", g.grad_x[k]);
            }
        }
    }
}

#[test]
fn characteristic_kernels() {
    let m = unit();
    let x = Vec3::zeros();
    // τ² = |ξ|² on the S sheet and 3|ξ|² on the P sheet
    let xi = Vec3::new(0.6, 0.0, 0.8);
    let s = principal_symbol(&m, &x, 1.0, &xi).unwrap();
    assert_eq!(numerical_rank(&s.p, 1e-12), 1);
    assert!((s.p * complexify(&Vec3::y())).norm() < 1e-14);
    let p = principal_symbol(&m, &x, 3f64.sqrt(), &xi).unwrap();
    assert_eq!(numerical_rank(&p.p, 1e-12), 2);
    assert!((p.p * complexify(&xi)).norm() < 1e-14);
}

#[test]
fn admissible_media_pass_class_check_with_positive_metrics() {
    for (name, m) in admissible_media() {
        let rep = check_class_membership(&m, &params(), CLASS_GRID).unwrap();
        assert!(rep.passed(), "{name}: {rep:?}");
        assert!(rep.metrics_positive.margin > 0.0);
    }
}

#[test]
fn gross_stress_fails_class_check() {
    let m = Medium::homogeneous(1.0, 1.0, 1.0, Mat3::identity() * 0.9).unwrap();
    assert!(!check_class_membership(&m, &params(), CLASS_GRID).unwrap().passed());
    let d = Domain::ellipsoid(Vec3::new(1.0, 0.7, 1.3)).unwrap();
    let m = Medium { domain: d, ..unit() };
    assert!(check_class_membership(&m, &params(), CLASS_GRID).unwrap().passed());
}
