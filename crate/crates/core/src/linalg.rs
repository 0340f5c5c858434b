//! Dense real symmetric matrix primitives.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tol;

/// A real square matrix that is symmetric to within [`tol::SYM`].
///
/// Construction symmetrizes the stored entries, so an accepted matrix is
/// exactly symmetric afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

/// Eigendecomposition of a [`SymMatrix`]: eigenvalues ascending, column `k`
/// of `eigenvectors` paired with `eigenvalues[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

pub fn max_asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows().min(a.ncols());
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            dev = dev.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    dev
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

impl SymMatrix {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        let deviation = max_asymmetry(&a);
        if !(deviation <= tol::SYM) || a.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonSymmetric { deviation });
        }
        Ok(Self::symmetrized(a))
    }

    /// Wraps a matrix known to be symmetric up to rounding (e.g. a product
    /// `R S R` with symmetric factors), averaging the two triangles.
    pub(crate) fn symmetrized(mut a: DMatrix<f64>) -> Self {
        let n = a.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (a[(i, j)] + a[(j, i)]);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        SymMatrix(a)
    }

    pub fn from_row_slice(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, data))
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.0.transpose().as_slice().to_vec()
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        max_abs(&(&self.0 - &other.0))
    }

    /// `Qᵀ A Q` for an orthogonal (or any) `Q`.
    pub fn congruence(&self, q: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::symmetrized(q.transpose() * &self.0 * q)
    }

    pub fn eigen(&self) -> Spectrum {
        sym_eigen_unchecked(&self.0)
    }
}

impl std::ops::Index<(usize, usize)> for SymMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `V f(Λ) Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let scaled = DVector::from_iterator(self.dim(), self.eigenvalues.iter().map(|&x| f(x)));
        let v = &self.eigenvectors;
        SymMatrix::symmetrized(v * DMatrix::from_diagonal(&scaled) * v.transpose())
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Eigendecomposition with ascending eigenvalues and a fixed eigenvector
/// sign: the largest-magnitude component of each vector is positive, ties
/// resolved toward the lowest index.
pub fn sym_eigen(a: &DMatrix<f64>) -> Result<Spectrum> {
    let deviation = max_asymmetry(a);
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if !(deviation <= tol::SYM) {
        return Err(Error::NonSymmetric { deviation });
    }
    Ok(sym_eigen_unchecked(a))
}

pub(crate) fn sym_eigen_unchecked(a: &DMatrix<f64>) -> Spectrum {
    let n = a.nrows();
    if n == 0 {
        return Spectrum {
            eigenvalues: DVector::zeros(0),
            eigenvectors: DMatrix::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        if leading_component(col.as_slice()) < 0.0 {
            col.neg_mut();
        }
        eigenvectors.set_column(dst, &col);
    }
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Value of the largest-magnitude entry, taking the lowest index among
/// entries within 1e-12 of the maximum magnitude.
pub(crate) fn leading_component(v: &[f64]) -> f64 {
    let big = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    v.iter().copied().find(|x| x.abs() >= big - 1e-12).unwrap_or(0.0)
}

/// Principal square root `V max(λ,0)^{1/2} Vᵀ` of a positive semidefinite
/// matrix. Eigenvalues in `[-clamp_tol, 0)` are treated as zero.
pub fn psd_sqrt(a: &SymMatrix, clamp_tol: f64) -> Result<SymMatrix> {
    sqrt_of_spectrum(&a.eigen(), clamp_tol, 0.0)
}

/// Square root from an existing decomposition; eigenvalues below `floor`
/// (but not below `-clamp_tol`) contribute zero.
pub(crate) fn sqrt_of_spectrum(spec: &Spectrum, clamp_tol: f64, floor: f64) -> Result<SymMatrix> {
    let min = spec.min();
    if min < -clamp_tol {
        return Err(Error::NotPsd { eigenvalue: min });
    }
    Ok(spec.reconstruct_with(|x| if x < floor || x <= 0.0 { 0.0 } else { x.sqrt() }))
}

/// Frobenius norm of `AB - BA`.
pub fn commutator_norm(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let ab = a.as_matrix() * b.as_matrix();
    let ba = b.as_matrix() * a.as_matrix();
    Ok((ab - ba).norm())
}
