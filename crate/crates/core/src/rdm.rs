//! Validated one- and two-particle density matrices and domain overlap sets.
//!
//! Conventions (spin-free, closed shell, orthonormal basis):
//!
//! * `D_ij = Σ_σ ⟨a†_iσ a_jσ⟩`, trace `N`, eigenvalues in `[0, 2]`;
//! * `²D_{ik,jl} = ½ Σ_στ ⟨a†_iσ a†_kτ a_lτ a_jσ⟩`, stored flattened in
//!   `(i, k, j, l)` order, with `Σ_{ik} ²D_{ik,ik} = N(N-1)/2` and
//!   `Σ_k ²D_{ik,jk} = (N-1)/2 · D_ij`.

use nalgebra::DMatrix;

use crate::error::{Error, Result, Violation};
use crate::linalg::{max_abs, max_asymmetry, sqrt_of_spectrum, Spectrum, SymMatrix};
use crate::tol;

#[derive(Debug, Clone)]
pub struct OneRdm {
    matrix: SymMatrix,
    n_electrons: usize,
    natural: Spectrum,
    sqrt: SymMatrix,
}

impl PartialEq for OneRdm {
    fn eq(&self, other: &Self) -> bool {
        self.n_electrons == other.n_electrons && self.matrix == other.matrix
    }
}

impl OneRdm {
    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Natural occupations (ascending) and natural orbitals.
    pub fn natural(&self) -> &Spectrum {
        &self.natural
    }

    /// Cached `D^{1/2}`, with occupations below 1e-12 taken as zero.
    pub fn sqrt(&self) -> &SymMatrix {
        &self.sqrt
    }

    /// `Tr(D S)`.
    pub fn population(&self, s: &SymMatrix) -> f64 {
        trace_of_product(self.matrix.as_matrix(), s.as_matrix())
    }

    /// `‖D² − 2D‖_F`.
    pub fn duodempotency_error(&self) -> f64 {
        let d = self.matrix.as_matrix();
        (d * d - d * 2.0).norm()
    }
}

pub(crate) fn trace_of_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.transpose().iter()).map(|(x, y)| x * y).sum()
}

pub fn validate_one_rdm(matrix: DMatrix<f64>, n_electrons: usize) -> Result<OneRdm> {
    let mut violations = Vec::new();
    if matrix.nrows() == 0 {
        return Err(Error::Validation(vec![Violation::Empty]));
    }
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::Validation(vec![Violation::ShapeMismatch {
            expected: matrix.nrows(),
            found: matrix.ncols(),
        }]));
    }
    if n_electrons == 0 {
        violations.push(Violation::NoElectrons);
    }
    let matrix = match SymMatrix::new(matrix) {
        Ok(m) => m,
        Err(Error::NonSymmetric { deviation }) => {
            violations.push(Violation::NonSymmetric { deviation });
            return Err(Error::Validation(violations));
        }
        Err(e) => return Err(e),
    };
    let trace = matrix.trace();
    if !((trace - n_electrons as f64).abs() <= tol::TRACE) {
        violations.push(Violation::TraceMismatch {
            expected: n_electrons as f64,
            found: trace,
        });
    }
    let natural = matrix.eigen();
    for &x in natural.eigenvalues.iter() {
        if !(-tol::CHECK..=2.0 + tol::CHECK).contains(&x) {
            violations.push(Violation::BoundViolation { eigenvalue: x });
        }
    }
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    let sqrt = sqrt_of_spectrum(&natural, tol::CLAMP, tol::OCCUPATION_FLOOR)?;
    Ok(OneRdm {
        matrix,
        n_electrons,
        natural,
        sqrt,
    })
}

/// Spin-free 2-RDM; see the module docs for the normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoRdm {
    dim: usize,
    n_electrons: usize,
    data: Vec<f64>,
}

impl TwoRdm {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize, j: usize, l: usize) -> f64 {
        self.data[flat_index(self.dim, i, k, j, l)]
    }

    /// Flattened tensor in `(i, k, j, l)` order.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `Σ_k ²D_{ik,jk}`.
    pub fn partial_trace(&self) -> DMatrix<f64> {
        partial_trace(self.dim, &self.data)
    }

    pub fn trace(&self) -> f64 {
        let m = self.dim;
        let mut t = 0.0;
        for i in 0..m {
            for k in 0..m {
                t += self.get(i, k, i, k);
            }
        }
        t
    }
}

#[inline]
pub(crate) fn flat_index(m: usize, i: usize, k: usize, j: usize, l: usize) -> usize {
    ((i * m + k) * m + j) * m + l
}

fn partial_trace(m: usize, data: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |i, j| (0..m).map(|k| data[flat_index(m, i, k, j, k)]).sum())
}

/// Largest violation of `T_{ik,jl} = T_{ki,lj}` and `T_{ik,jl} = T_{jl,ik}`.
pub(crate) fn index_symmetry_deviation(m: usize, data: &[f64]) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m {
        for k in 0..m {
            for j in 0..m {
                for l in 0..m {
                    let x = data[flat_index(m, i, k, j, l)];
                    dev = dev
                        .max((x - data[flat_index(m, k, i, l, j)]).abs())
                        .max((x - data[flat_index(m, j, l, i, k)]).abs());
                }
            }
        }
    }
    dev
}

pub fn validate_two_rdm(data: Vec<f64>, one_rdm: &OneRdm) -> Result<TwoRdm> {
    let m = one_rdm.dim();
    if data.len() != m.pow(4) {
        return Err(Error::Validation(vec![Violation::ShapeMismatch {
            expected: m.pow(4),
            found: data.len(),
        }]));
    }
    let mut violations = Vec::new();
    if data.iter().any(|x| !x.is_finite()) {
        violations.push(Violation::SymmetryViolation { deviation: f64::NAN });
        return Err(Error::Validation(violations));
    }
    let deviation = index_symmetry_deviation(m, &data);
    if deviation > tol::SYM {
        violations.push(Violation::SymmetryViolation { deviation });
    }
    let n = one_rdm.n_electrons() as f64;
    let expected = n * (n - 1.0) / 2.0;
    let rdm = TwoRdm {
        dim: m,
        n_electrons: one_rdm.n_electrons(),
        data,
    };
    let trace = rdm.trace();
    if !((trace - expected).abs() <= tol::TRACE) {
        violations.push(Violation::TraceMismatch { expected, found: trace });
    }
    let contracted = rdm.partial_trace();
    let deviation = max_abs(&(contracted - one_rdm.matrix().as_matrix() * ((n - 1.0) / 2.0)));
    if !(deviation <= tol::TRACE) {
        violations.push(Violation::ContractionMismatch { deviation });
    }
    if violations.is_empty() {
        Ok(rdm)
    } else {
        Err(Error::Validation(violations))
    }
}

/// Labeled family of domain overlap matrices `S(Ω)` that resolves the
/// identity.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainOverlapSet {
    labels: Vec<String>,
    matrices: Vec<SymMatrix>,
}

impl DomainOverlapSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrices(&self) -> &[SymMatrix] {
        &self.matrices
    }

    pub fn get(&self, label: &str) -> Option<&SymMatrix> {
        self.labels.iter().position(|l| l == label).map(|i| &self.matrices[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &SymMatrix)> {
        self.labels.iter().map(String::as_str).zip(self.matrices.iter())
    }
}

pub fn validate_domain_set(matrices: Vec<DMatrix<f64>>, labels: Vec<String>) -> Result<DomainOverlapSet> {
    if matrices.is_empty() {
        return Err(Error::Validation(vec![Violation::Empty]));
    }
    if matrices.len() != labels.len() {
        return Err(Error::Validation(vec![Violation::ShapeMismatch {
            expected: labels.len(),
            found: matrices.len(),
        }]));
    }
    let m = matrices[0].nrows();
    let mut violations = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            violations.push(Violation::DuplicateLabel { label: l.clone() });
        }
    }
    let mut validated = Vec::with_capacity(matrices.len());
    for (a, label) in matrices.into_iter().zip(&labels) {
        if a.nrows() != m || a.ncols() != m {
            violations.push(Violation::ShapeMismatch {
                expected: m,
                found: a.nrows().max(a.ncols()),
            });
            continue;
        }
        let deviation = max_asymmetry(&a);
        match SymMatrix::new(a) {
            Ok(s) => {
                let spec = s.eigen();
                for &x in spec.eigenvalues.iter() {
                    if !(-tol::CHECK..=1.0 + tol::CHECK).contains(&x) {
                        violations.push(Violation::DomainBoundViolation {
                            label: label.clone(),
                            eigenvalue: x,
                        });
                    }
                }
                validated.push(s);
            }
            Err(_) => violations.push(Violation::NonSymmetric { deviation }),
        }
    }
    if violations.is_empty() {
        let mut sum = DMatrix::<f64>::zeros(m, m);
        for s in &validated {
            sum += s.as_matrix();
        }
        let deviation = max_abs(&(sum - DMatrix::identity(m, m)));
        if !(deviation <= tol::TRACE) {
            violations.push(Violation::IdentityResolutionFailure { deviation });
        }
    }
    if violations.is_empty() {
        Ok(DomainOverlapSet {
            labels,
            matrices: validated,
        })
    } else {
        Err(Error::Validation(violations))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    SymmetricRestriction,
    Dafh,
    SingleDetDafh,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::SymmetricRestriction => "symmetric",
            Provenance::Dafh => "dafh",
            Provenance::SingleDetDafh => "single-det-dafh",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "symmetric" => Some(Provenance::SymmetricRestriction),
            "dafh" => Some(Provenance::Dafh),
            "single-det-dafh" => Some(Provenance::SingleDetDafh),
            _ => None,
        }
    }
}

/// A per-domain matrix with its origin, domain population and spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainRestrictedRdm {
    pub label: String,
    pub matrix: SymMatrix,
    pub provenance: Provenance,
    /// `N_Ω = Tr(D S(Ω))`.
    pub population: f64,
    pub spectrum: Spectrum,
}

impl DomainRestrictedRdm {
    pub fn new(label: impl Into<String>, matrix: SymMatrix, provenance: Provenance, population: f64) -> Self {
        let spectrum = matrix.eigen();
        DomainRestrictedRdm {
            label: label.into(),
            matrix,
            provenance,
            population,
            spectrum,
        }
    }

    /// Rebuilds a stored domain matrix, checking its trace against the
    /// recorded population.
    pub fn from_parts(label: impl Into<String>, matrix: SymMatrix, provenance: Provenance, population: f64) -> Result<Self> {
        let trace = matrix.trace();
        if !((trace - population).abs() <= tol::TRACE) {
            return Err(Error::Validation(vec![Violation::TraceMismatch {
                expected: population,
                found: trace,
            }]));
        }
        Ok(Self::new(label, matrix, provenance, population))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(dim: usize, rows: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(dim, dim, rows)
    }

    #[test]
    fn dimer_rdm_is_valid() {
        let d = validate_one_rdm(dm(2, &[1.0, 1.0, 1.0, 1.0]), 2).unwrap();
        let n = d.natural();
        assert!(n.eigenvalues[0].abs() < 1e-14 && (n.eigenvalues[1] - 2.0).abs() < 1e-14);
        assert!(d.duodempotency_error() < 1e-14);
    }

    #[test]
    fn correlated_dimer_rdm_is_valid() {
        let p = std::f64::consts::FRAC_1_SQRT_2;
        let d = validate_one_rdm(dm(2, &[1.0, p, p, 1.0]), 2).unwrap();
        let ev = &d.natural().eigenvalues;
        assert!((ev[0] - (1.0 - p)).abs() < 1e-14);
        assert!((ev[1] - (1.0 + p)).abs() < 1e-14);
    }

    #[test]
    fn out_of_bound_occupations() {
        let err = validate_one_rdm(dm(2, &[2.5, 0.0, 0.0, -0.5]), 2).unwrap_err();
        let Error::Validation(v) = err else { panic!() };
        assert_eq!(
            v,
            vec![
                Violation::BoundViolation { eigenvalue: -0.5 },
                Violation::BoundViolation { eigenvalue: 2.5 }
            ]
        );
    }

    #[test]
    fn one_rdm_structured_failures() {
        let Error::Validation(v) = validate_one_rdm(dm(2, &[1.0, 0.0, 0.0, 0.5]), 2).unwrap_err() else {
            panic!()
        };
        assert!(matches!(v[0], Violation::TraceMismatch { expected, found } if expected == 2.0 && found == 1.5));
        let Error::Validation(v) = validate_one_rdm(dm(2, &[1.0, 0.3, 0.0, 1.0]), 2).unwrap_err() else {
            panic!()
        };
        assert!(matches!(v[0], Violation::NonSymmetric { .. }));
        assert!(validate_one_rdm(DMatrix::zeros(0, 0), 2).is_err());
        assert!(validate_one_rdm(DMatrix::from_element(2, 2, f64::NAN), 2).is_err());
    }

    #[test]
    fn zero_two_rdm_has_wrong_trace() {
        let d = validate_one_rdm(dm(2, &[1.0, 1.0, 1.0, 1.0]), 2).unwrap();
        let Error::Validation(v) = validate_two_rdm(vec![0.0; 16], &d).unwrap_err() else {
            panic!()
        };
        assert!(v.contains(&Violation::TraceMismatch {
            expected: 1.0,
            found: 0.0
        }));
        assert!(matches!(
            validate_two_rdm(vec![0.0; 15], &d),
            Err(Error::Validation(v)) if matches!(v[0], Violation::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn two_rdm_symmetry_violation_detected() {
        let d = validate_one_rdm(dm(1, &[2.0]), 2).unwrap();
        // one orbital: only element (0,0,0,0) = 1 is legal
        assert!(validate_two_rdm(vec![1.0], &d).is_ok());
        let d2 = validate_one_rdm(dm(2, &[2.0, 0.0, 0.0, 0.0]), 2).unwrap();
        let mut t = vec![0.0; 16];
        t[0] = 1.0;
        t[flat_index(2, 0, 1, 0, 0)] = 1e-3;
        let Error::Validation(v) = validate_two_rdm(t, &d2).unwrap_err() else {
            panic!()
        };
        assert!(v.iter().any(|x| matches!(x, Violation::SymmetryViolation { .. })));
    }

    #[test]
    fn domain_set_examples() {
        let sites = validate_domain_set(
            vec![dm(2, &[1.0, 0.0, 0.0, 0.0]), dm(2, &[0.0, 0.0, 0.0, 1.0])],
            vec!["A".into(), "B".into()],
        )
        .unwrap();
        assert_eq!(sites.len(), 2);
        assert!(sites.get("B").is_some());

        let fuzzy = validate_domain_set(
            vec![dm(2, &[0.6, 0.0, 0.0, 0.6]), dm(2, &[0.4, 0.0, 0.0, 0.4])],
            vec!["A".into(), "B".into()],
        );
        assert!(fuzzy.is_ok());

        let Error::Validation(v) = validate_domain_set(vec![dm(2, &[1.0, 0.0, 0.0, 0.0])], vec!["A".into()]).unwrap_err() else {
            panic!()
        };
        assert_eq!(v, vec![Violation::IdentityResolutionFailure { deviation: 1.0 }]);
    }

    #[test]
    fn domain_set_bound_and_label_errors() {
        let Error::Validation(v) = validate_domain_set(
            vec![dm(2, &[1.5, 0.0, 0.0, 0.5]), dm(2, &[-0.5, 0.0, 0.0, 0.5])],
            vec!["A".into(), "A".into()],
        )
        .unwrap_err() else {
            panic!()
        };
        assert!(v.contains(&Violation::DuplicateLabel { label: "A".into() }));
        assert!(
            v.iter()
                .filter(|x| matches!(x, Violation::DomainBoundViolation { .. }))
                .count()
                == 2
        );
        assert!(validate_domain_set(vec![], vec![]).is_err());
        assert!(validate_domain_set(
            vec![DMatrix::identity(2, 2), DMatrix::zeros(3, 3)],
            vec!["a".into(), "b".into()]
        )
        .is_err());
    }
}
