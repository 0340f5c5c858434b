//! Domain-averaged hole matrices from the 2-RDM, the closed-shell
//! single-determinant shortcut, and the cumulant of the 2-RDM.
//!
//! The hole for a domain `Ω` with overlap matrix `S` is
//! `G_ij = N_Ω D_ij − 2 Σ_kl ²D_{ik,jl} S_lk`, `N_Ω = Tr(D S)`. With the
//! 2-RDM normalization of [`crate::rdm`] its trace is `N_Ω`, and for a
//! duodempotent `D` it collapses to `½ D S D = D^{1/2} S D^{1/2}`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::rdm::{flat_index, index_symmetry_deviation, validate_two_rdm, DomainRestrictedRdm, OneRdm, Provenance, TwoRdm};
use crate::tol;

/// `Λ_{ik,jl} = ²D_{ik,jl} − ½ D_ij D_kl + ¼ D_il D_kj`, same layout as
/// [`TwoRdm`].
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantTensor {
    dim: usize,
    data: Vec<f64>,
}

impl CumulantTensor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, k: usize, j: usize, l: usize) -> f64 {
        self.data[flat_index(self.dim, i, k, j, l)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn index_symmetry_deviation(&self) -> f64 {
        index_symmetry_deviation(self.dim, &self.data)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Contraction `Σ_kl ²D_{ik,jl} S_lk`.
fn contract_with_domain(d2: &TwoRdm, s: &DMatrix<f64>) -> DMatrix<f64> {
    let m = d2.dim();
    let t = d2.as_slice();
    // row-major copy of S transposed: st[k*m + l] = S_lk
    let st: Vec<f64> = (0..m * m).map(|x| s[(x % m, x / m)]).collect();
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let mut acc = 0.0;
            for k in 0..m {
                let base = flat_index(m, i, k, j, 0);
                let row = &t[base..base + m];
                let srow = &st[k * m..(k + 1) * m];
                acc += row.iter().zip(srow).map(|(a, b)| a * b).sum::<f64>();
            }
            out[(i, j)] = acc;
        }
    }
    out
}

pub fn dafh_matrix(d: &OneRdm, d2: &TwoRdm, s: &SymMatrix, label: &str) -> Result<DomainRestrictedRdm> {
    check_dim(d.dim(), d2.dim())?;
    check_dim(d.dim(), s.dim())?;
    let pop = d.population(s);
    let g = d.matrix().as_matrix() * pop - contract_with_domain(d2, s.as_matrix()) * 2.0;
    Ok(DomainRestrictedRdm::new(
        label,
        SymMatrix::symmetrized(g),
        Provenance::Dafh,
        pop,
    ))
}

fn require_duodempotent(d: &OneRdm) -> Result<()> {
    let deviation = d.duodempotency_error();
    if !(deviation <= tol::DUODEMPOTENT) {
        return Err(Error::NotDuodempotent { deviation });
    }
    Ok(())
}

/// `½ D S D`, valid only when `D² = 2D`.
pub fn single_det_dafh(d: &OneRdm, s: &SymMatrix, label: &str) -> Result<DomainRestrictedRdm> {
    check_dim(d.dim(), s.dim())?;
    require_duodempotent(d)?;
    let dm = d.matrix().as_matrix();
    let g = SymMatrix::symmetrized(dm * s.as_matrix() * dm * 0.5);
    Ok(DomainRestrictedRdm::new(label, g, Provenance::SingleDetDafh, d.population(s)))
}

/// Closed-shell single-determinant 2-RDM `½ D_ij D_kl − ¼ D_il D_kj`.
pub fn single_det_two_rdm(d: &OneRdm) -> Result<TwoRdm> {
    require_duodempotent(d)?;
    let m = d.dim();
    let dm = d.matrix().as_matrix();
    let mut data = vec![0.0; m.pow(4)];
    for i in 0..m {
        for k in 0..m {
            for j in 0..m {
                for l in 0..m {
                    data[flat_index(m, i, k, j, l)] = 0.5 * dm[(i, j)] * dm[(k, l)] - 0.25 * dm[(i, l)] * dm[(k, j)];
                }
            }
        }
    }
    validate_two_rdm(data, d)
}

pub fn cumulant(d: &OneRdm, d2: &TwoRdm) -> Result<CumulantTensor> {
    check_dim(d.dim(), d2.dim())?;
    let m = d.dim();
    let dm = d.matrix().as_matrix();
    let mut data = d2.as_slice().to_vec();
    for i in 0..m {
        for k in 0..m {
            for j in 0..m {
                for l in 0..m {
                    data[flat_index(m, i, k, j, l)] += -0.5 * dm[(i, j)] * dm[(k, l)] + 0.25 * dm[(i, l)] * dm[(k, j)];
                }
            }
        }
    }
    Ok(CumulantTensor { dim: m, data })
}
