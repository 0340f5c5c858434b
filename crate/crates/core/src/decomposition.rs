//! Symmetric domain-restricted decomposition of the 1-RDM:
//! `D(Ω) = D^{1/2} S(Ω) D^{1/2}`.

use nalgebra::DMatrix;

use crate::error::{Error, Result, Violation};
use crate::linalg::SymMatrix;
use crate::rdm::{DomainOverlapSet, DomainRestrictedRdm, OneRdm, Provenance};
use crate::tol;

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn symmetric_restrict(d: &OneRdm, s: &SymMatrix, label: &str) -> Result<DomainRestrictedRdm> {
    check_dim(d.dim(), s.dim())?;
    let root = d.sqrt().as_matrix();
    let g = SymMatrix::symmetrized(root * s.as_matrix() * root);
    Ok(DomainRestrictedRdm::new(
        label,
        g,
        Provenance::SymmetricRestriction,
        d.population(s),
    ))
}

/// `G_ij = √n_i (S_nat)_ij √n_j`, the restriction written in the natural
/// orbital basis of the 1-RDM.
pub fn natural_basis_restrict(occupations: &[f64], s_nat: &SymMatrix) -> Result<SymMatrix> {
    check_dim(occupations.len(), s_nat.dim())?;
    let bad: Vec<Violation> = occupations
        .iter()
        .filter(|&&n| !(-tol::CHECK..=2.0 + tol::CHECK).contains(&n))
        .map(|&n| Violation::BoundViolation { eigenvalue: n })
        .collect();
    if !bad.is_empty() {
        return Err(Error::Validation(bad));
    }
    let roots: Vec<f64> = occupations
        .iter()
        .map(|&n| if n < tol::OCCUPATION_FLOOR { 0.0 } else { n.sqrt() })
        .collect();
    let s = s_nat.as_matrix();
    let m = roots.len();
    Ok(SymMatrix::symmetrized(DMatrix::from_fn(m, m, |i, j| {
        roots[i] * s[(i, j)] * roots[j]
    })))
}

/// Expresses `S` in the natural-orbital basis of `d`.
pub fn to_natural_basis(d: &OneRdm, s: &SymMatrix) -> Result<SymMatrix> {
    check_dim(d.dim(), s.dim())?;
    Ok(s.congruence(&d.natural().eigenvectors))
}

/// Back-transforms a natural-basis matrix to the original basis.
pub fn from_natural_basis(d: &OneRdm, g_nat: &SymMatrix) -> Result<SymMatrix> {
    check_dim(d.dim(), g_nat.dim())?;
    Ok(g_nat.congruence(&d.natural().eigenvectors.transpose()))
}

/// One symmetric restriction per domain; the results sum to `d`.
pub fn partition(d: &OneRdm, domains: &DomainOverlapSet) -> Result<Vec<DomainRestrictedRdm>> {
    check_dim(d.dim(), domains.dim())?;
    domains.iter().map(|(label, s)| symmetric_restrict(d, s, label)).collect()
}

/// Largest elementwise deviation of `Σ_Ω G(Ω)` from `d`.
pub fn partition_deviation(d: &OneRdm, parts: &[DomainRestrictedRdm]) -> f64 {
    let mut sum = DMatrix::<f64>::zeros(d.dim(), d.dim());
    for p in parts {
        sum += p.matrix.as_matrix();
    }
    crate::linalg::max_abs(&(sum - d.matrix().as_matrix()))
}
