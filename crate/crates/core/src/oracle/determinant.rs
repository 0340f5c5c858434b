use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::max_abs;
use crate::rdm::{flat_index, validate_one_rdm, validate_two_rdm, OneRdm, TwoRdm};

/// Closed-shell determinant from `m × N/2` orthonormal occupied orbitals:
/// `D = 2 C Cᵀ`, and the 2-RDM summed pair by pair over occupied spin
/// orbitals (direct minus same-spin exchange).
pub fn single_det_system(coeffs: &DMatrix<f64>) -> Result<(OneRdm, TwoRdm)> {
    let occ = coeffs.ncols();
    if occ == 0 || coeffs.nrows() < occ {
        return Err(Error::InvalidSpec(format!(
            "need 1 <= occupied orbitals <= basis size, got {occ} of {}",
            coeffs.nrows()
        )));
    }
    let deviation = max_abs(&(coeffs.transpose() * coeffs - DMatrix::identity(occ, occ)));
    if !(deviation <= 1e-10) {
        return Err(Error::NonOrthonormal { deviation });
    }
    let d = validate_one_rdm(coeffs * coeffs.transpose() * 2.0, 2 * occ)?;
    let m = coeffs.nrows();
    let mut data = vec![0.0; m * m * m * m];
    for a in 0..2 * occ {
        for b in 0..2 * occ {
            let (oa, ob) = (a / 2, b / 2);
            let same_spin = a % 2 == b % 2;
            for i in 0..m {
                for k in 0..m {
                    let ik = coeffs[(i, oa)] * coeffs[(k, ob)];
                    if ik == 0.0 {
                        continue;
                    }
                    for j in 0..m {
                        for l in 0..m {
                            let mut v = coeffs[(j, oa)] * coeffs[(l, ob)];
                            if same_spin {
                                v -= coeffs[(j, ob)] * coeffs[(l, oa)];
                            }
                            data[flat_index(m, i, k, j, l)] += 0.5 * ik * v;
                        }
                    }
                }
            }
        }
    }
    let d2 = validate_two_rdm(data, &d)?;
    Ok((d, d2))
}
