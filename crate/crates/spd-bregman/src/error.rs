use thiserror::Error;

use crate::mirror_maps::MapKind;

/// Errors shared across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpdError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NotFinite,

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix asymmetry too large (relative defect {relative:e})")]
    AsymmetryTooLarge { relative: f64 },

    #[error("dimension mismatch ({left} vs {right})")]
    DimMismatch { left: usize, right: usize },

    #[error("symmetric eigendecomposition did not converge")]
    EigFailure,

    #[error("geodesic parameter {t} outside [0, 1]")]
    TOutOfRange { t: f64 },

    #[error("argument outside the dual domain of the {map} mirror map")]
    DualDomainViolation { map: MapKind },

    #[error("numerical breakdown: divergence value {value:e} negative beyond tolerance")]
    NumericalBreakdown { value: f64 },

    #[error("{map} mirror map does not declare the reverse-theorem hypotheses")]
    HypothesisNotDeclared { map: MapKind },

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, SpdError>;
