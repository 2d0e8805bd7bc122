//! Principal-symbol and ray-level toolkit for isotropic elastodynamics with
//! residual stress.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerics:
//!
//! * [`medium`]: coefficient fields, divergence-free residual stress, level-set
//!   domains and admissibility checks;
//! * [`symbols`]: dual metrics, the characteristic symbols `q_S`, `q_P`, the
//!   3×3 principal symbol and the traction symbol;
//! * [`boundary`]: boundary covectors, region classification, characteristic
//!   roots, residue matrices, the Dirichlet-to-Neumann principal symbol and the
//!   first-order companion symbol;
//! * [`polarization`]: the C⁶ polarization bundles of Cauchy data, their
//!   projectors and the shear-muting symbol;
//! * [`rays`]: Hamiltonian bicharacteristics, boundary reflection with mode
//!   conversion, lens maps, boundary distance and lens-map recovery.
//!
//! File formats, reports and the command line live in the `elastoray` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod boundary;
pub mod error;
pub mod linalg;
pub mod medium;
pub mod polarization;
pub mod rays;
pub mod sampling;
pub mod symbols;

pub use error::{Error, Result};

use core::fmt;

pub use num_complex::Complex64;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
pub type CVec3 = nalgebra::Vector3<Complex64>;
pub type CVec6 = nalgebra::Vector6<Complex64>;
pub type CMat6 = nalgebra::Matrix6<Complex64>;

/// 3×3 complex symbol matrix (principal symbols, projectors, traction).
pub type SymbolMatrix3 = nalgebra::Matrix3<Complex64>;

/// Wave family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Shear waves, governed by `g_S`.
    S,
    /// Compressional waves, governed by `g_P`.
    P,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::S, Mode::P];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::S => "S",
            Mode::P => "P",
        }
    }

    pub fn other(self) -> Mode {
        match self {
            Mode::S => Mode::P,
            Mode::P => Mode::S,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" | "shear" => Ok(Mode::S),
            "P" | "p" | "compressional" => Ok(Mode::P),
            _ => Err(Error::InvalidParameter("mode must be S or P")),
        }
    }
}
