//! Isopycnic localization.
//!
//! A PSD matrix `M = Σ_j n_j φ_j φ_jᵀ` is written as `M = W Wᵀ` with
//! weighted columns `w_j = √n_j φ_j`. Any orthogonal `T` gives another
//! factorization `W' = W T` of the same density, with occupations
//! `n'_i = ‖w'_i‖²` and unit orbitals `u'_i = w'_i / √n'_i`. The routine
//! picks `T` by cyclic Jacobi sweeps maximizing
//!
//! `L = Σ_i Σ_Ω (w'_iᵀ S(Ω) w'_i)² = Σ_i Σ_Ω [n'_i ⟨u'_i|S(Ω)|u'_i⟩]²`.
//!
//! Negative occupations have no real square root, so the transformation is
//! refused for them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{leading_component, Spectrum};
use crate::rdm::{DomainOverlapSet, DomainRestrictedRdm};
use crate::representability::check_domain;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizeOptions {
    pub conv_tol: f64,
    pub max_sweeps: usize,
    /// Representability tolerance applied by [`localize_domain`].
    pub check_tol: f64,
}

impl Default for LocalizeOptions {
    fn default() -> Self {
        LocalizeOptions {
            conv_tol: tol::LOCALIZE_CONV,
            max_sweeps: tol::LOCALIZE_MAX_SWEEPS,
            check_tol: tol::CHECK,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedOrbitals {
    /// `m × k`, unit-norm columns.
    pub orbitals: DMatrix<f64>,
    pub occupations: Vec<f64>,
    pub functional_value: f64,
    pub sweeps_used: usize,
    pub converged: bool,
    /// `L` before the first sweep followed by `L` after each sweep.
    pub history: Vec<f64>,
}

impl LocalizedOrbitals {
    pub(crate) fn empty(dim: usize) -> Self {
        LocalizedOrbitals {
            orbitals: DMatrix::zeros(dim, 0),
            occupations: Vec::new(),
            functional_value: 0.0,
            sweeps_used: 0,
            converged: true,
            history: vec![0.0],
        }
    }

    /// `Σ_i n'_i u'_i u'_iᵀ`.
    pub fn density(&self) -> DMatrix<f64> {
        weighted_density(&self.orbitals, &self.occupations)
    }
}

fn weighted_density(orbitals: &DMatrix<f64>, occupations: &[f64]) -> DMatrix<f64> {
    let m = orbitals.nrows();
    let mut out = DMatrix::zeros(m, m);
    for (k, &n) in occupations.iter().enumerate() {
        let u = orbitals.column(k);
        out += u * u.transpose() * n;
    }
    out
}

/// State handed to an observer after every sweep.
#[derive(Debug)]
pub struct SweepState<'a> {
    pub sweep: usize,
    /// Current weighted vectors `w'_i` as columns.
    pub weighted: &'a DMatrix<f64>,
    pub functional_value: f64,
}

impl SweepState<'_> {
    pub fn density(&self) -> DMatrix<f64> {
        self.weighted * self.weighted.transpose()
    }

    pub fn occupation_sum(&self) -> f64 {
        self.weighted.iter().map(|x| x * x).sum()
    }
}

/// Localization functional for a given set of weighted vectors.
pub fn functional(weighted: &DMatrix<f64>, domains: &DomainOverlapSet) -> f64 {
    let mut total = 0.0;
    for s in domains.matrices() {
        let sw = s.as_matrix() * weighted;
        for i in 0..weighted.ncols() {
            let p = weighted.column(i).dot(&sw.column(i));
            total += p * p;
        }
    }
    total
}

pub fn isopycnic_localize(spec: &Spectrum, domains: &DomainOverlapSet, opts: &LocalizeOptions) -> Result<LocalizedOrbitals> {
    isopycnic_localize_observed(spec, domains, opts, |_| {})
}

/// As [`isopycnic_localize`], calling `observe` after each sweep.
pub fn isopycnic_localize_observed(
    spec: &Spectrum,
    domains: &DomainOverlapSet,
    opts: &LocalizeOptions,
    mut observe: impl FnMut(&SweepState<'_>),
) -> Result<LocalizedOrbitals> {
    let m = spec.dim();
    if m != domains.dim() {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: domains.dim(),
        });
    }
    let min = spec.min();
    if min < -tol::CLAMP {
        return Err(Error::NegativeOccupation { eigenvalue: min });
    }
    let kept: Vec<usize> = (0..m).filter(|&j| spec.eigenvalues[j] > tol::OCCUPATION_FLOOR).collect();
    if kept.is_empty() {
        return Err(Error::NoOccupation);
    }
    let k = kept.len();
    let mut w = DMatrix::from_fn(m, k, |r, c| {
        let j = kept[c];
        spec.eigenvalues[j].sqrt() * spec.eigenvectors[(r, j)]
    });
    // Q_Ω = Wᵀ S(Ω) W, kept in step with W under rotations.
    let mut q: Vec<DMatrix<f64>> = domains
        .matrices()
        .iter()
        .map(|s| {
            let p = w.transpose() * s.as_matrix() * &w;
            (&p + p.transpose()) * 0.5
        })
        .collect();
    let value = |q: &[DMatrix<f64>]| -> f64 { q.iter().map(|qo| (0..k).map(|i| qo[(i, i)].powi(2)).sum::<f64>()).sum() };

    let mut current = value(&q);
    let mut history = vec![current];
    let mut converged = false;
    let mut sweeps_used = 0;
    while sweeps_used < opts.max_sweeps {
        for i in 0..k {
            for j in (i + 1)..k {
                if let Some(theta) = best_pair_angle(&q, i, j, current) {
                    rotate(&mut w, &mut q, i, j, theta);
                }
            }
        }
        sweeps_used += 1;
        let next = value(&q);
        observe(&SweepState {
            sweep: sweeps_used,
            weighted: &w,
            functional_value: next,
        });
        history.push(next);
        let gain = next - current;
        current = next;
        if gain < opts.conv_tol {
            converged = true;
            break;
        }
    }

    let mut cols: Vec<(f64, DVector<f64>)> = (0..k)
        .map(|c| {
            let col = w.column(c).clone_owned();
            (col.norm_squared(), col)
        })
        .collect();
    cols.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut orbitals = DMatrix::zeros(m, k);
    let mut occupations = Vec::with_capacity(k);
    for (c, (n, col)) in cols.into_iter().enumerate() {
        let mut u = col / n.sqrt();
        if leading_component(u.as_slice()) < 0.0 {
            u.neg_mut();
        }
        orbitals.set_column(c, &u);
        occupations.push(n);
    }
    Ok(LocalizedOrbitals {
        orbitals,
        occupations,
        functional_value: current,
        sweeps_used,
        converged,
        history,
    })
}

/// Maximizer of `L` over the rotation of the pair `(i, j)`.
///
/// With `a = Q_ii`, `b = Q_jj`, `c = Q_ij` for each domain, rotating by `θ`
/// changes the pair contribution to `const + A cos 4θ + B sin 4θ`, where
/// `A = Σ_Ω [((a−b)/2)² − c²]` and `B = Σ_Ω (a−b) c`. The maximum sits at
/// `4θ = atan2(B, A)`. Returns `None` when the gain is at rounding level.
fn best_pair_angle(q: &[DMatrix<f64>], i: usize, j: usize, scale: f64) -> Option<f64> {
    let (mut a_coef, mut b_coef) = (0.0, 0.0);
    for qo in q {
        let x = 0.5 * (qo[(i, i)] - qo[(j, j)]);
        let y = qo[(i, j)];
        a_coef += x * x - y * y;
        b_coef += 2.0 * x * y;
    }
    let amplitude = a_coef.hypot(b_coef);
    let gain = amplitude - a_coef;
    if !(gain > 4.0 * f64::EPSILON * (1.0 + scale)) {
        return None;
    }
    Some(0.25 * b_coef.atan2(a_coef))
}

/// `w_i ← c w_i + s w_j`, `w_j ← −s w_i + c w_j`, and the matching
/// congruence on every `Q_Ω`.
fn rotate(w: &mut DMatrix<f64>, q: &mut [DMatrix<f64>], i: usize, j: usize, theta: f64) {
    let (s, c) = theta.sin_cos();
    rotate_columns(w, i, j, c, s);
    for qo in q.iter_mut() {
        rotate_columns(qo, i, j, c, s);
        let k = qo.ncols();
        for col in 0..k {
            let xi = qo[(i, col)];
            let xj = qo[(j, col)];
            qo[(i, col)] = c * xi + s * xj;
            qo[(j, col)] = -s * xi + c * xj;
        }
    }
}

fn rotate_columns(a: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..a.nrows() {
        let xi = a[(r, i)];
        let xj = a[(r, j)];
        a[(r, i)] = c * xi + s * xj;
        a[(r, j)] = -s * xi + c * xj;
    }
}

/// Localizes a domain matrix after confirming it is representable. A
/// matrix with no positive eigenvalue yields an empty orbital set.
pub fn localize_domain(
    dr: &DomainRestrictedRdm,
    domains: &DomainOverlapSet,
    opts: &LocalizeOptions,
) -> Result<LocalizedOrbitals> {
    let report = check_domain(dr, opts.check_tol);
    if !report.is_representable() {
        let reason = report
            .findings
            .iter()
            .map(|f| format!("{} {:e}", f.code, f.magnitude))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::NotRepresentable {
            label: dr.label.clone(),
            reason,
        });
    }
    match isopycnic_localize(&dr.spectrum, domains, opts) {
        Err(Error::NoOccupation) => Ok(LocalizedOrbitals::empty(dr.dim())),
        other => other,
    }
}
