use std::fmt;

use thiserror::Error;

/// One violated invariant found while validating an input.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonSymmetric { deviation: f64 },
    ShapeMismatch { expected: usize, found: usize },
    TraceMismatch { expected: f64, found: f64 },
    BoundViolation { eigenvalue: f64 },
    SymmetryViolation { deviation: f64 },
    ContractionMismatch { deviation: f64 },
    IdentityResolutionFailure { deviation: f64 },
    DomainBoundViolation { label: String, eigenvalue: f64 },
    DuplicateLabel { label: String },
    NoElectrons,
    Empty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonSymmetric { deviation } => {
                write!(f, "matrix not symmetric (max |A-A^T| = {deviation:e})")
            }
            Violation::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected dimension {expected}, found {found}")
            }
            Violation::TraceMismatch { expected, found } => {
                write!(f, "trace {found} does not match expected {expected}")
            }
            Violation::BoundViolation { eigenvalue } => {
                write!(f, "eigenvalue {eigenvalue} outside [0, 2]")
            }
            Violation::SymmetryViolation { deviation } => {
                write!(f, "2-RDM index symmetry broken by {deviation:e}")
            }
            Violation::ContractionMismatch { deviation } => {
                write!(f, "2-RDM partial trace deviates from (N-1)/2 * 1-RDM by {deviation:e}")
            }
            Violation::IdentityResolutionFailure { deviation } => {
                write!(f, "domain matrices do not sum to identity (max deviation {deviation:e})")
            }
            Violation::DomainBoundViolation { label, eigenvalue } => {
                write!(f, "domain '{label}' has eigenvalue {eigenvalue} outside [0, 1]")
            }
            Violation::DuplicateLabel { label } => write!(f, "duplicate domain label '{label}'"),
            Violation::NoElectrons => write!(f, "electron count must be positive"),
            Violation::Empty => write!(f, "empty input"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix not symmetric (max |A-A^T| = {deviation:e})")]
    NonSymmetric { deviation: f64 },
    #[error("matrix not positive semidefinite: eigenvalue {eigenvalue}")]
    NotPsd { eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("validation failed: {}", join_violations(.0))]
    Validation(Vec<Violation>),
    #[error("1-RDM is not duodempotent (||D^2 - 2D|| = {deviation:e})")]
    NotDuodempotent { deviation: f64 },
    #[error("negative occupation {eigenvalue}: isopycnic transformation undefined")]
    NegativeOccupation { eigenvalue: f64 },
    #[error("no positive occupation to localize")]
    NoOccupation,
    #[error("matrix for domain '{label}' is not representable: {reason}")]
    NotRepresentable { label: String, reason: String },
    #[error("configuration space too large ({dimension} determinants)")]
    TooLarge { dimension: usize },
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),
    #[error("invalid site partition: {0}")]
    InvalidPartition(String),
    #[error("orbital coefficients not orthonormal (max deviation {deviation:e})")]
    NonOrthonormal { deviation: f64 },
    #[error("need at least two domain matrices, found {found}")]
    InsufficientDomains { found: usize },
    #[error("unknown domain '{0}'")]
    UnknownDomain(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
