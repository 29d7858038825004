use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical modules.
///
/// Every variant carries a stable identity of the form `module::Name`
/// (see [`Error::identity`]) so that command-line front ends can report it
/// verbatim.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("radial solution has a node at the sphere radius (|chi(R)| = {value:e}, l = {l})")]
    NodeAtBoundary { l: usize, value: f64 },

    #[error("energy {energy} outside the admissible interval ({lower}, {upper})")]
    DomainError { energy: f64, lower: f64, upper: f64 },

    #[error(
        "no sign change of the matching residual on ({lower}, {upper}) over {samples} samples"
    )]
    NoBracket {
        lower: f64,
        upper: f64,
        samples: usize,
    },

    #[error(
        "radial function vanishes at the sphere radius for l = {l}, E = {energy} (APW asymptote)"
    )]
    RadialNodeAtR { l: usize, energy: f64 },

    #[error("point ({x}, {y}, {z}) lies outside the unit cell")]
    OutOfCell { x: f64, y: f64, z: f64 },

    #[error("incompatible basis: {0}")]
    IncompatibleBasis(String),

    #[error("quadrature budget exceeded: {0}")]
    QuadratureBudgetExceeded(String),

    #[error("overlap matrix is singular: eigenvalue {eigenvalue:e} (largest {largest:e})")]
    SingularOverlap { eigenvalue: f64, largest: f64 },

    #[error("vector ({x}, {y}, {z}) is not a reciprocal lattice vector")]
    InvalidReciprocal { x: f64, y: f64, z: f64 },

    #[error("unsupported geometry: {0}")]
    GeometryUnsupported(String),

    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("reference eigenvalue unavailable: {0}")]
    ReferenceUnavailable(String),

    #[error("no real (A, C) pair realizes jump amplitude {gamma} under unit norm")]
    NoRealSolution { gamma: f64 },

    #[error("assumption {assumption} violated: {detail}")]
    InvalidGeometry {
        assumption: &'static str,
        detail: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable `module::Variant` identity.
    pub fn identity(&self) -> &'static str {
        match self {
            Error::NodeAtBoundary { .. } => "radial::NodeAtBoundary",
            Error::DomainError { .. } => "radial::DomainError",
            Error::NoBracket { .. } => "radial::NoBracket",
            Error::RadialNodeAtR { .. } => "apw_basis::RadialNodeAtR",
            Error::OutOfCell { .. } => "apw_basis::OutOfCell",
            Error::IncompatibleBasis(_) => "secular::IncompatibleBasis",
            Error::QuadratureBudgetExceeded(_) => "secular::QuadratureBudgetExceeded",
            Error::SingularOverlap { .. } => "secular::SingularOverlap",
            Error::InvalidReciprocal { .. } => "secular::InvalidReciprocal",
            Error::GeometryUnsupported(_) => "sobolev::GeometryUnsupported",
            Error::NotPositiveDefinite { .. } => "orthonorm::NotPositiveDefinite",
            Error::ReferenceUnavailable(_) => "certificate::ReferenceUnavailable",
            Error::NoRealSolution { .. } => "experiments::NoRealSolution",
            Error::InvalidGeometry { .. } => "apw_basis::InvalidGeometry",
            Error::InvalidInput(_) => "input::InvalidInput",
        }
    }

    /// Validation errors are problems with the inputs rather than with the
    /// numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidGeometry { .. } | Error::InvalidInput(_))
    }
}
