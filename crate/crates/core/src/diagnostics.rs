//! Structural diagnostics: whether domain matrices share an eigenbasis, and
//! how much population is lost when negative eigenvalues are dropped.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::commutator_norm;
use crate::rdm::DomainRestrictedRdm;
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorTable {
    pub labels: Vec<String>,
    /// Symmetric table of `‖[G_a, G_b]‖_F`, zero diagonal.
    pub norms: DMatrix<f64>,
    pub max: f64,
    /// True iff every pair commutes to within 1e-8.
    pub commuting: bool,
}

pub fn common_eigenbasis_report(drs: &[DomainRestrictedRdm]) -> Result<CommutatorTable> {
    if drs.len() < 2 {
        return Err(Error::InsufficientDomains { found: drs.len() });
    }
    let n = drs.len();
    let mut norms = DMatrix::zeros(n, n);
    let mut max: f64 = 0.0;
    for a in 0..n {
        for b in (a + 1)..n {
            let c = commutator_norm(&drs[a].matrix, &drs[b].matrix)?;
            norms[(a, b)] = c;
            norms[(b, a)] = c;
            max = max.max(c);
        }
    }
    Ok(CommutatorTable {
        labels: drs.iter().map(|d| d.label.clone()).collect(),
        norms,
        max,
        commuting: max <= tol::COMMUTING,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeglectImpact {
    pub trace_before: f64,
    /// Sum of the positive eigenvalues only.
    pub trace_after: f64,
    /// Sum of the negative eigenvalues (never positive).
    pub population_leak: f64,
}

/// Population lost by discarding the negative part of a domain spectrum.
pub fn neglect_impact(dr: &DomainRestrictedRdm) -> NeglectImpact {
    let ev = &dr.spectrum.eigenvalues;
    NeglectImpact {
        trace_before: dr.matrix.trace(),
        trace_after: ev.iter().filter(|&&x| x > 0.0).sum(),
        population_leak: ev.iter().filter(|&&x| x < 0.0).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::rdm::Provenance;

    fn dr(label: &str, m: SymMatrix) -> DomainRestrictedRdm {
        let pop = m.trace();
        DomainRestrictedRdm::new(label, m, Provenance::Dafh, pop)
    }

    #[test]
    fn zero_matrix_commutes_with_everything() {
        let a = dr("A", SymMatrix::from_row_slice(2, &[1.0, 0.3, 0.3, 1.0]).unwrap());
        let b = dr("B", SymMatrix::zeros(2));
        let t = common_eigenbasis_report(&[a, b]).unwrap();
        assert_eq!(t.max, 0.0);
        assert!(t.commuting);
    }

    #[test]
    fn noncommuting_pair_and_table_symmetry() {
        let a = dr("A", SymMatrix::from_row_slice(2, &[0.0, 1.0, 1.0, 0.0]).unwrap());
        let b = dr("B", SymMatrix::from_diagonal(&[1.0, 0.0]));
        let c = dr("C", SymMatrix::identity(2));
        let t = common_eigenbasis_report(&[a, b, c]).unwrap();
        assert!((t.max - 2f64.sqrt()).abs() < 1e-15);
        assert!(!t.commuting);
        assert_eq!(t.norms, t.norms.transpose());
        assert_eq!(t.norms[(0, 2)], 0.0);
    }

    #[test]
    fn too_few_or_mismatched() {
        let a = dr("A", SymMatrix::identity(2));
        assert!(matches!(
            common_eigenbasis_report(std::slice::from_ref(&a)),
            Err(Error::InsufficientDomains { found: 1 })
        ));
        let b = dr("B", SymMatrix::identity(3));
        assert!(matches!(
            common_eigenbasis_report(&[a, b]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn leak_of_negative_spectrum() {
        let n = neglect_impact(&dr("x", SymMatrix::from_diagonal(&[1.0, -0.03])));
        assert!((n.population_leak + 0.03).abs() < 1e-12);
        assert!((n.trace_after - 1.0).abs() < 1e-12);
        assert!((n.trace_before - n.trace_after - n.population_leak).abs() < 1e-12);

        let n = neglect_impact(&dr("y", SymMatrix::from_diagonal(&[0.5, 1.5])));
        assert_eq!(n.population_leak, 0.0);
    }
}
