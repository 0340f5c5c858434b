//! Domain-restricted reduced density matrices.
//!
//! The crate partitions a spin-free closed-shell 1-RDM into domain
//! contributions `D^{1/2} S(Ω) D^{1/2}` and builds domain-averaged hole
//! matrices from the 2-RDM. It checks both against the closed-shell
//! representability bounds and localizes positive domain matrices
//! isopycnically. Hubbard-chain full CI supplies exact correlated RDMs for
//! testing.

// `!(x <= tol)` keeps NaN on the failing side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod cli;
pub mod dafh;
pub mod decomposition;
pub mod diagnostics;
pub mod error;
pub mod format;
pub mod linalg;
pub mod localization;
pub mod oracle;
pub mod rdm;
pub mod representability;

pub use nalgebra;

pub use error::{Error, Result, Violation};
pub use linalg::{Spectrum, SymMatrix};
pub use rdm::{DomainOverlapSet, DomainRestrictedRdm, OneRdm, Provenance, TwoRdm};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default numerical tolerances.
pub mod tol {
    /// Largest `|A_ij − A_ji|` accepted for a symmetric matrix.
    pub const SYM: f64 = 1e-10;
    /// Eigenvalues in `[−CLAMP, 0)` count as zero when taking square roots.
    pub const CLAMP: f64 = 1e-8;
    /// Bound and trace tolerance of the representability checker.
    pub const CHECK: f64 = 1e-8;
    /// Trace, contraction and identity-resolution tolerance for validation.
    pub const TRACE: f64 = 1e-8;
    /// Occupations below this are treated as exactly zero.
    pub const OCCUPATION_FLOOR: f64 = 1e-12;
    /// Largest `‖D² − 2D‖_F` accepted as duodempotent.
    pub const DUODEMPOTENT: f64 = 1e-6;
    /// Commutator norm below which two domain matrices count as commuting.
    pub const COMMUTING: f64 = 1e-8;
    pub const LOCALIZE_CONV: f64 = 1e-10;
    pub const LOCALIZE_MAX_SWEEPS: usize = 100;
}
