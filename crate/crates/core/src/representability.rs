//! Classification of candidate domain matrices against the closed-shell
//! bounds: symmetric, eigenvalues in `[0, 2]`, trace equal to the domain
//! population.
//!
//! The checker reports; it never repairs. Negative eigenvalues in a hole
//! matrix are surfaced with their magnitude rather than clamped.

use std::fmt;

use nalgebra::DMatrix;

use crate::dafh::dafh_matrix;
use crate::decomposition::symmetric_restrict;
use crate::error::{Error, Result};
use crate::linalg::{max_asymmetry, sym_eigen_unchecked, SymMatrix};
use crate::rdm::{DomainOverlapSet, DomainRestrictedRdm, OneRdm, TwoRdm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FindingCode {
    NegativeEigenvalue,
    PauliViolation,
    TraceMismatch,
    NonHermitian,
}

impl FindingCode {
    pub fn as_str(self) -> &'static str {
        match self {
            FindingCode::NegativeEigenvalue => "NEGATIVE_EIGENVALUE",
            FindingCode::PauliViolation => "PAULI_VIOLATION",
            FindingCode::TraceMismatch => "TRACE_MISMATCH",
            FindingCode::NonHermitian => "NON_HERMITIAN",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            FindingCode::NegativeEigenvalue,
            FindingCode::PauliViolation,
            FindingCode::TraceMismatch,
            FindingCode::NonHermitian,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
    }
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Finding {
    pub code: FindingCode,
    /// Size of the violation, always positive.
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Representable,
    NotRepresentable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Representable => "REPRESENTABLE",
            Verdict::NotRepresentable => "NOT_REPRESENTABLE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "REPRESENTABLE" => Some(Verdict::Representable),
            "NOT_REPRESENTABLE" => Some(Verdict::NotRepresentable),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentabilityReport {
    pub hermiticity_deviation: f64,
    /// Ascending eigenvalues of the symmetric part.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub trace: f64,
    pub expected_trace: Option<f64>,
    pub findings: Vec<Finding>,
    pub verdict: Verdict,
}

impl RepresentabilityReport {
    pub fn is_representable(&self) -> bool {
        self.verdict == Verdict::Representable
    }

    pub fn finding(&self, code: FindingCode) -> Option<&Finding> {
        self.findings.iter().find(|f| f.code == code)
    }
}

/// Checks a square matrix. Eigenvalues are taken from the symmetric part
/// `(M + Mᵀ)/2`; any asymmetry beyond `check_tol` is itself a finding.
pub fn check(m: &DMatrix<f64>, expected_trace: Option<f64>, check_tol: f64) -> RepresentabilityReport {
    if m.nrows() != m.ncols() || m.iter().any(|x| !x.is_finite()) {
        return RepresentabilityReport {
            hermiticity_deviation: f64::INFINITY,
            eigenvalues: Vec::new(),
            min_eigenvalue: f64::NAN,
            max_eigenvalue: f64::NAN,
            trace: f64::NAN,
            expected_trace,
            findings: vec![Finding {
                code: FindingCode::NonHermitian,
                magnitude: f64::INFINITY,
            }],
            verdict: Verdict::NotRepresentable,
        };
    }
    let hermiticity_deviation = max_asymmetry(m);
    let sym = (m + m.transpose()) * 0.5;
    let eigenvalues: Vec<f64> = sym_eigen_unchecked(&sym).eigenvalues.iter().copied().collect();
    let min_eigenvalue = eigenvalues.first().copied().unwrap_or(0.0);
    let max_eigenvalue = eigenvalues.last().copied().unwrap_or(0.0);
    let trace = m.trace();

    let mut findings = Vec::new();
    if min_eigenvalue < -check_tol {
        findings.push(Finding {
            code: FindingCode::NegativeEigenvalue,
            magnitude: -min_eigenvalue,
        });
    }
    if max_eigenvalue > 2.0 + check_tol {
        findings.push(Finding {
            code: FindingCode::PauliViolation,
            magnitude: max_eigenvalue - 2.0,
        });
    }
    if let Some(expected) = expected_trace {
        let dev = (trace - expected).abs();
        if dev > check_tol {
            findings.push(Finding {
                code: FindingCode::TraceMismatch,
                magnitude: dev,
            });
        }
    }
    if hermiticity_deviation > check_tol {
        findings.push(Finding {
            code: FindingCode::NonHermitian,
            magnitude: hermiticity_deviation,
        });
    }
    let verdict = if findings.is_empty() {
        Verdict::Representable
    } else {
        Verdict::NotRepresentable
    };
    RepresentabilityReport {
        hermiticity_deviation,
        eigenvalues,
        min_eigenvalue,
        max_eigenvalue,
        trace,
        expected_trace,
        findings,
        verdict,
    }
}

/// Checks a domain matrix against its own recorded population.
pub fn check_domain(dr: &DomainRestrictedRdm, check_tol: f64) -> RepresentabilityReport {
    check(dr.matrix.as_matrix(), Some(dr.population), check_tol)
}

pub fn check_sym(m: &SymMatrix, expected_trace: Option<f64>, check_tol: f64) -> RepresentabilityReport {
    check(m.as_matrix(), expected_trace, check_tol)
}

/// Both constructions for one domain, side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainComparison {
    pub label: String,
    pub symmetric: DomainRestrictedRdm,
    pub symmetric_report: RepresentabilityReport,
    pub dafh: DomainRestrictedRdm,
    pub dafh_report: RepresentabilityReport,
    /// `‖G_sym − G_dafh‖_F`.
    pub difference_norm: f64,
}

pub fn compare_constructions(
    d: &OneRdm,
    d2: &TwoRdm,
    domains: &DomainOverlapSet,
    check_tol: f64,
) -> Result<Vec<DomainComparison>> {
    if d.dim() != domains.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            found: domains.dim(),
        });
    }
    domains
        .iter()
        .map(|(label, s)| {
            let symmetric = symmetric_restrict(d, s, label)?;
            let dafh = dafh_matrix(d, d2, s, label)?;
            let difference_norm = (symmetric.matrix.as_matrix() - dafh.matrix.as_matrix()).norm();
            Ok(DomainComparison {
                label: label.to_string(),
                symmetric_report: check_domain(&symmetric, check_tol),
                dafh_report: check_domain(&dafh, check_tol),
                symmetric,
                dafh,
                difference_norm,
            })
        })
        .collect()
}
