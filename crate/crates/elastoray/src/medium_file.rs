//! JSON medium description files.
//!
//! ```json
//! {
//!   "domain": { "kind": "unit_ball" },
//!   "rho": { "family": "constant", "value": 1.0 },
//!   "lambda": { "family": "gaussian_bump", "base": 1.0, "amplitude": 0.4, "center": [0, 0, 0], "width": 0.6 },
//!   "mu": { "family": "polynomial", "terms": [{ "coef": 1.0, "powers": [0, 0, 0] }] },
//!   "residual_stress": { "kind": "constant", "matrix": [[0.1, 0, 0], [0, 0, 0], [0, 0, -0.1]] },
//!   "class_params": { "L": 4.0, "eps": 0.2, "delta": 0.3 }
//! }
//! ```
//!
//! A potential-induced stress is given as `{ "kind": "potential", "terms": [...] }`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use elastoray_core::medium::{
    stress_from_potential, ClassParams, Domain, Medium, Monomial, Polynomial, ResidualStressField, ScalarField,
};
use elastoray_core::{Mat3, Vec3};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    UnitBall,
    Ellipsoid { semi_axes: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coef: f64,
    pub powers: [u32; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Constant {
        value: f64,
    },
    Polynomial {
        terms: Vec<TermSpec>,
    },
    GaussianBump {
        base: f64,
        amplitude: f64,
        center: [f64; 3],
        width: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StressSpec {
    Constant { matrix: [[f64; 3]; 3] },
    Potential { terms: Vec<TermSpec> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    #[serde(rename = "L")]
    pub l: f64,
    pub eps: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumFile {
    pub domain: DomainSpec,
    pub rho: FieldSpec,
    pub lambda: FieldSpec,
    pub mu: FieldSpec,
    pub residual_stress: StressSpec,
    pub class_params: ClassSpec,
}

/// A parsed medium together with the SHA-256 digest of the file bytes.
#[derive(Debug, Clone)]
pub struct LoadedMedium {
    pub spec: MediumFile,
    pub medium: Medium,
    pub params: ClassParams,
    pub digest: String,
}

fn finite(name: &str, values: impl IntoIterator<Item = f64>) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        bail!("{name}: non-finite number")
    }
}

fn polynomial(name: &str, terms: &[TermSpec]) -> Result<Polynomial> {
    finite(name, terms.iter().map(|t| t.coef))?;
    let terms = terms.iter().map(|t| Monomial::new(t.coef, t.powers)).collect();
    Polynomial::new(terms).with_context(|| format!("{name}: invalid polynomial"))
}

impl FieldSpec {
    pub fn build(&self, name: &str) -> Result<ScalarField> {
        match self {
            FieldSpec::Constant { value } => {
                finite(name, [*value])?;
                Ok(ScalarField::Constant(*value))
            }
            FieldSpec::Polynomial { terms } => Ok(ScalarField::Polynomial(polynomial(name, terms)?)),
            FieldSpec::GaussianBump {
                base,
                amplitude,
                center,
                width,
            } => {
                finite(name, [*base, *amplitude, *width].into_iter().chain(*center))?;
                ScalarField::gaussian_bump(*base, *amplitude, Vec3::from(*center), *width)
                    .with_context(|| format!("{name}: invalid gaussian bump"))
            }
        }
    }
}

impl StressSpec {
    pub fn build(&self) -> Result<ResidualStressField> {
        match self {
            StressSpec::Constant { matrix } => {
                finite("residual_stress", matrix.iter().flatten().copied())?;
                let r = Mat3::from_fn(|i, j| matrix[i][j]);
                ResidualStressField::constant(r).context("residual_stress")
            }
            StressSpec::Potential { terms } => {
                let psi = polynomial("residual_stress", terms)?;
                stress_from_potential(&ScalarField::Polynomial(psi)).context("residual_stress")
            }
        }
    }
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        match self {
            DomainSpec::UnitBall => Ok(Domain::UnitBall),
            DomainSpec::Ellipsoid { semi_axes } => {
                finite("domain", *semi_axes)?;
                Domain::ellipsoid(Vec3::from(*semi_axes)).context("domain")
            }
        }
    }
}

impl MediumFile {
    pub fn build(&self) -> Result<(Medium, ClassParams)> {
        let c = self.class_params;
        finite("class_params", [c.l, c.eps, c.delta])?;
        let params = ClassParams::new(c.l, c.eps, c.delta).context("class_params")?;
        let medium = Medium::new(
            self.rho.build("rho")?,
            self.lambda.build("lambda")?,
            self.mu.build("mu")?,
            self.residual_stress.build()?,
            self.domain.build()?,
        )
        .context("medium")?;
        Ok((medium, params))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn parse_medium(bytes: &[u8]) -> Result<LoadedMedium> {
    let spec: MediumFile = serde_json::from_slice(bytes).context("malformed medium file")?;
    let (medium, params) = spec.build()?;
    Ok(LoadedMedium {
        spec,
        medium,
        params,
        digest: sha256_hex(bytes),
    })
}

pub fn load_medium(path: &Path) -> Result<LoadedMedium> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read medium file {}", path.display()))?;
    parse_medium(&bytes).with_context(|| format!("in medium file {}", path.display()))
}
