use crate::Mode;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("residual stress potential must be a polynomial field")]
    UnsupportedPotential,
    #[error("point lies outside the closed domain (level set {level:e})")]
    OutOfDomain { level: f64 },
    #[error("point is not on the boundary (level set {level:e})")]
    NotOnBoundary { level: f64 },
    #[error("covector is not tangent to the boundary (normal component {normal:e})")]
    NotTangent { normal: f64 },
    #[error("covector (tau, xi) vanishes")]
    ZeroCovector,
    #[error("degenerate direction: xi = 0")]
    DegenerateDirection,
    #[error("{mode} mode is glancing (discriminant {discriminant:e})")]
    Glancing { mode: Mode, discriminant: f64 },
    #[error("{mode} mode is not hyperbolic at this covector")]
    NotHyperbolic { mode: Mode },
    #[error("residue matrix A0 is singular (condition number {condition:e})")]
    SingularResidue { condition: f64 },
    #[error("decomposition C^3 = C xi_P + xi_S^perp degenerates (|xi_S . xi_P| = {product:e})")]
    DegenerateDecomposition { product: f64 },
    #[error("companion frame degenerates: tangential frequency vanishes")]
    FrameDegenerate,
    #[error("muting symbol undefined at normal incidence")]
    DegenerateMuting,
    #[error("polarization frame is near-degenerate (condition number {condition:e})")]
    NearDegenerateFrame { condition: f64 },
    #[error("ray leaves the domain tangentially")]
    GlancingExit,
    #[error("{mode} reflection at a glancing covector (discriminant {discriminant:e})")]
    GlancingReflection { mode: Mode, discriminant: f64 },
    #[error("integration exceeded {0} steps")]
    MaxStepsExceeded(usize),
    #[error("step control failed (Hamiltonian drift {drift:e})")]
    StepControl { drift: f64 },
}
