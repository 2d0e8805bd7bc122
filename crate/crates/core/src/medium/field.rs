use alloc::boxed::Box;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Mat3, Result, Vec3};

pub const MAX_POLYNOMIAL_DEGREE: u32 = 4;

/// One monomial `coef · x₁^a x₂^b x₃^c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub powers: [u32; 3],
}

impl Monomial {
    pub fn new(coef: f64, powers: [u32; 3]) -> Self {
        Monomial { coef, powers }
    }

    pub fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }

    fn eval(&self, x: &Vec3) -> f64 {
        let mut v = self.coef;
        for (k, &p) in self.powers.iter().enumerate() {
            v *= x[k].powi(p as i32);
        }
        v
    }

    fn derivative(&self, axis: usize) -> Option<Monomial> {
        let p = self.powers[axis];
        if p == 0 || self.coef == 0.0 {
            return None;
        }
        let mut powers = self.powers;
        powers[axis] -= 1;
        Some(Monomial::new(self.coef * p as f64, powers))
    }
}

/// Polynomial in three variables of total degree at most four.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(terms: Vec<Monomial>) -> Result<Self> {
        for t in &terms {
            if !t.coef.is_finite() {
                return Err(Error::InvalidParameter("polynomial coefficient must be finite"));
            }
            if t.degree() > MAX_POLYNOMIAL_DEGREE {
                return Err(Error::InvalidParameter("polynomial degree exceeds 4"));
            }
        }
        Ok(Polynomial { terms })
    }

    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial {
            terms: alloc::vec![Monomial::new(c, [0, 0, 0])],
        }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn eval(&self, x: &Vec3) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// Exact partial derivative along `axis`.
    pub fn derivative(&self, axis: usize) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().filter_map(|t| t.derivative(axis)).collect(),
        }
    }

    pub fn gradient(&self, x: &Vec3) -> Vec3 {
        Vec3::from_fn(|k, _| self.derivative(k).eval(x))
    }

    fn add(&self, other: &Polynomial, scale: f64) -> Polynomial {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| Monomial::new(t.coef * scale, t.powers)));
        Polynomial { terms }
    }
}

/// Scalar coefficient field with an analytic gradient.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarField {
    Constant(f64),
    Polynomial(Polynomial),
    /// `base + amplitude · exp(-|x - center|² / width²)`.
    GaussianBump {
        base: f64,
        amplitude: f64,
        center: Vec3,
        width: f64,
    },
}

impl ScalarField {
    pub fn constant(c: f64) -> Self {
        ScalarField::Constant(c)
    }

    pub fn gaussian_bump(base: f64, amplitude: f64, center: Vec3, width: f64) -> Result<Self> {
        if !(width > 0.0) || !base.is_finite() || !amplitude.is_finite() {
            return Err(Error::InvalidParameter("gaussian bump needs finite data and width > 0"));
        }
        Ok(ScalarField::GaussianBump {
            base,
            amplitude,
            center,
            width,
        })
    }

    pub fn value(&self, x: &Vec3) -> f64 {
        self.eval(x).0
    }

    /// Value and spatial gradient.
    pub fn eval(&self, x: &Vec3) -> (f64, Vec3) {
        match self {
            ScalarField::Constant(c) => (*c, Vec3::zeros()),
            ScalarField::Polynomial(p) => (p.eval(x), p.gradient(x)),
            ScalarField::GaussianBump {
                base,
                amplitude,
                center,
                width,
            } => {
                let d = x - center;
                let w2 = width * width;
                let g = amplitude * (-d.norm_squared() / w2).exp();
                (base + g, d * (-2.0 * g / w2))
            }
        }
    }

    pub(crate) fn as_polynomial(&self) -> Option<Polynomial> {
        match self {
            ScalarField::Constant(c) => Some(Polynomial::constant(*c)),
            ScalarField::Polynomial(p) => Some(p.clone()),
            ScalarField::GaussianBump { .. } => None,
        }
    }
}

/// Residual stress and its first derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressValue {
    pub r: Mat3,
    /// `dr[k] = ∂R/∂x_k`.
    pub dr: [Mat3; 3],
    /// `(∇·R)_i = Σ_j ∂_j R_ij`.
    pub divergence: Vec3,
}

/// `R = Hess ψ − (Δψ) Id`, stored as exact entry polynomials and their
/// first partials.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialStress {
    pub psi: Polynomial,
    pub entries: [[Polynomial; 3]; 3],
    pub partials: [[[Polynomial; 3]; 3]; 3],
}

/// Symmetric residual stress field with `∇·R = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum ResidualStressField {
    Constant(Mat3),
    Potential(Box<PotentialStress>),
}

impl ResidualStressField {
    pub fn zero() -> Self {
        ResidualStressField::Constant(Mat3::zeros())
    }

    /// Constant stress; rejects non-symmetric or non-finite input.
    pub fn constant(r: Mat3) -> Result<Self> {
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("residual stress must be finite"));
        }
        let scale = r.abs().max().max(1.0);
        if (r - r.transpose()).abs().max() > 1e-14 * scale {
            return Err(Error::InvalidParameter("residual stress must be symmetric"));
        }
        Ok(ResidualStressField::Constant(r))
    }

    pub fn eval(&self, x: &Vec3) -> StressValue {
        match self {
            ResidualStressField::Constant(r) => StressValue {
                r: *r,
                dr: [Mat3::zeros(); 3],
                divergence: Vec3::zeros(),
            },
            ResidualStressField::Potential(p) => {
                let PotentialStress { entries, partials, .. } = &**p;
                let r = Mat3::from_fn(|i, j| entries[i][j].eval(x));
                let dr = [0, 1, 2].map(|k| Mat3::from_fn(|i, j| partials[k][i][j].eval(x)));
                let divergence = Vec3::from_fn(|i, _| (0..3).map(|j| dr[j][(i, j)]).sum());
                StressValue { r, dr, divergence }
            }
        }
    }

    pub fn potential(&self) -> Option<&Polynomial> {
        match self {
            ResidualStressField::Potential(p) => Some(&p.psi),
            ResidualStressField::Constant(_) => None,
        }
    }
}

/// `R = Hess ψ − (Δψ) Id` with exact polynomial derivatives.
///
/// Divergence vanishes identically: `∂_j ψ_ij − ∂_i Δψ = 0`.
pub fn stress_from_potential(psi: &ScalarField) -> Result<ResidualStressField> {
    let psi = psi.as_polynomial().ok_or(Error::UnsupportedPotential)?;
    let first = [0, 1, 2].map(|i| psi.derivative(i));
    let hess = [0, 1, 2].map(|i| [0, 1, 2].map(|j| first[i].derivative(j)));
    let laplacian = hess[0][0].add(&hess[1][1], 1.0).add(&hess[2][2], 1.0);
    let entries = [0, 1, 2].map(|i| {
        [0, 1, 2].map(|j| {
            if i == j {
                hess[i][j].add(&laplacian, -1.0)
            } else {
                hess[i][j].clone()
            }
        })
    });
    let partials = [0, 1, 2].map(|k| [0, 1, 2].map(|i| [0, 1, 2].map(|j| entries[i][j].derivative(k))));
    Ok(ResidualStressField::Potential(Box::new(PotentialStress {
        psi,
        entries,
        partials,
    })))
}
