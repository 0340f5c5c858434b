//! Full CI for the one-band Hubbard chain
//! `H = −t Σ_<ij>σ (a†_iσ a_jσ + h.c.) + U Σ_i n_i↑ n_i↓`
//! in the `S_z = 0` sector.
//!
//! Spin orbitals are numbered `2·site + spin` (up = 0, down = 1) and a
//! determinant is a bitmask over them. Creation operators are ordered
//! site-ascending, up before down; the fermionic sign of `a_p` or `a†_p` is
//! `(−1)^{#occupied modes below p}`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::sym_eigen_unchecked;
use crate::rdm::{flat_index, validate_one_rdm, validate_two_rdm, OneRdm, TwoRdm};

/// Largest configuration space handled by dense diagonalization.
pub const MAX_DIMENSION: usize = 4900;
pub const MAX_SITES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubbardSpec {
    pub n_sites: usize,
    pub n_electrons: usize,
    pub hopping: f64,
    pub interaction: f64,
    pub boundary: Boundary,
}

impl HubbardSpec {
    pub fn open(n_sites: usize, n_electrons: usize, hopping: f64, interaction: f64) -> Self {
        HubbardSpec {
            n_sites,
            n_electrons,
            hopping,
            interaction,
            boundary: Boundary::Open,
        }
    }

    /// Number of `S_z = 0` determinants.
    pub fn dimension(&self) -> usize {
        binomial(self.n_sites, self.n_electrons / 2).pow(2)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.n_sites < 2 {
            return bad(format!("need at least 2 sites, got {}", self.n_sites));
        }
        if self.n_electrons == 0 || !self.n_electrons.is_multiple_of(2) || self.n_electrons > 2 * self.n_sites {
            return bad(format!(
                "electron count must be even and in 2..={}, got {}",
                2 * self.n_sites,
                self.n_electrons
            ));
        }
        if !(self.hopping > 0.0 && self.hopping.is_finite()) {
            return bad(format!("hopping must be positive, got {}", self.hopping));
        }
        if !(self.interaction >= 0.0 && self.interaction.is_finite()) {
            return bad(format!("interaction must be non-negative, got {}", self.interaction));
        }
        let dimension = self.dimension();
        if self.n_sites > MAX_SITES || dimension > MAX_DIMENSION {
            return Err(Error::TooLarge { dimension });
        }
        Ok(())
    }

    /// Nearest-neighbour bonds. A periodic two-site chain has a single bond.
    fn bonds(&self) -> Vec<(usize, usize)> {
        let l = self.n_sites;
        let mut b: Vec<(usize, usize)> = (0..l - 1).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic && l > 2 {
            b.push((l - 1, 0));
        }
        b
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// One-body matrix `h_ij`: `−t` on bonded pairs.
pub fn one_body_matrix(spec: &HubbardSpec) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(spec.n_sites, spec.n_sites);
    for (i, j) in spec.bonds() {
        h[(i, j)] -= spec.hopping;
        h[(j, i)] -= spec.hopping;
    }
    h
}

/// `E = Σ_ij h_ij D_ij + U Σ_i ²D_{ii,ii}`.
pub fn rdm_energy(spec: &HubbardSpec, d: &OneRdm, d2: &TwoRdm) -> f64 {
    let h = one_body_matrix(spec);
    let one: f64 = h.iter().zip(d.matrix().as_matrix().iter()).map(|(a, b)| a * b).sum();
    let two: f64 = (0..spec.n_sites).map(|i| d2.get(i, i, i, i)).sum();
    one + spec.interaction * two
}

#[derive(Debug, Clone)]
pub struct HubbardResult {
    pub spec: HubbardSpec,
    pub ground_energy: f64,
    pub one_rdm: OneRdm,
    pub two_rdm: TwoRdm,
    /// Gap to the next `S_z = 0` eigenvalue.
    pub gap: f64,
    /// Set when the ground state is degenerate within 1e-8; the lowest-index
    /// eigenvector was used.
    pub degenerate: bool,
    pub dimension: usize,
}

#[inline]
fn mode(site: usize, spin: usize) -> usize {
    2 * site + spin
}

#[inline]
fn sign_below(mask: u32, p: usize) -> f64 {
    if (mask & ((1u32 << p) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn annihilate(mask: u32, p: usize) -> Option<(u32, f64)> {
    (mask >> p & 1 == 1).then(|| (mask ^ (1 << p), sign_below(mask, p)))
}

#[inline]
fn create(mask: u32, p: usize) -> Option<(u32, f64)> {
    (mask >> p & 1 == 0).then(|| (mask | (1 << p), sign_below(mask, p)))
}

/// All masks over `n_modes` with `up` even bits and `down` odd bits set,
/// ascending.
fn sector(n_modes: usize, up: usize, down: usize) -> Vec<u32> {
    (0u32..(1 << n_modes))
        .filter(|&m| (m & 0x5555_5555).count_ones() as usize == up && (m & 0xAAAA_AAAA).count_ones() as usize == down)
        .collect()
}

fn all_with_count(n_modes: usize, count: usize) -> Vec<u32> {
    (0u32..(1 << n_modes)).filter(|m| m.count_ones() as usize == count).collect()
}

pub fn hubbard_fci(spec: &HubbardSpec) -> Result<HubbardResult> {
    spec.validate()?;
    let l = spec.n_sites;
    let n_modes = 2 * l;
    let half = spec.n_electrons / 2;
    let basis = sector(n_modes, half, half);
    let index: HashMap<u32, usize> = basis.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let dim = basis.len();

    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let bonds = spec.bonds();
    for (a, &det) in basis.iter().enumerate() {
        let doubles = (0..l)
            .filter(|&i| det >> mode(i, 0) & 1 == 1 && det >> mode(i, 1) & 1 == 1)
            .count();
        h[(a, a)] += spec.interaction * doubles as f64;
        for &(i, j) in &bonds {
            for spin in 0..2 {
                for (p, q) in [(mode(i, spin), mode(j, spin)), (mode(j, spin), mode(i, spin))] {
                    let Some((m1, s1)) = annihilate(det, q) else { continue };
                    let Some((m2, s2)) = create(m1, p) else { continue };
                    h[(index[&m2], a)] -= spec.hopping * s1 * s2;
                }
            }
        }
    }

    let eig = sym_eigen_unchecked(&h);
    let ground_energy = eig.eigenvalues[0];
    let gap = if dim > 1 {
        eig.eigenvalues[1] - ground_energy
    } else {
        f64::INFINITY
    };
    let psi: DVector<f64> = eig.eigenvectors.column(0).clone_owned();

    let mut d1 = DMatrix::<f64>::zeros(l, l);
    for (a, &det) in basis.iter().enumerate() {
        if psi[a] == 0.0 {
            continue;
        }
        for spin in 0..2 {
            for j in 0..l {
                let Some((m1, s1)) = annihilate(det, mode(j, spin)) else {
                    continue;
                };
                for i in 0..l {
                    let Some((m2, s2)) = create(m1, mode(i, spin)) else { continue };
                    d1[(i, j)] += psi[index[&m2]] * psi[a] * s1 * s2;
                }
            }
        }
    }
    let one_rdm = validate_one_rdm(d1, spec.n_electrons)?;

    let two_rdm = validate_two_rdm(two_rdm_tensor(spec, &basis, &psi), &one_rdm)?;
    Ok(HubbardResult {
        spec: *spec,
        ground_energy,
        one_rdm,
        two_rdm,
        gap,
        degenerate: gap < 1e-8,
        dimension: dim,
    })
}

/// `²D_{ik,jl} = ½ Σ_στ ⟨a_kτ a_iσ ψ | a_lτ a_jσ ψ⟩`, from the two-hole
/// vectors `χ_{pq} = a_p a_q ψ`.
fn two_rdm_tensor(spec: &HubbardSpec, basis: &[u32], psi: &DVector<f64>) -> Vec<f64> {
    let l = spec.n_sites;
    let n_modes = 2 * l;
    let holes = all_with_count(n_modes, spec.n_electrons - 2);
    let hole_index: HashMap<u32, usize> = holes.iter().enumerate().map(|(i, &m)| (m, i)).collect();

    // chi[p * n_modes + q]
    let mut chi = vec![vec![0.0; holes.len()]; n_modes * n_modes];
    for (a, &det) in basis.iter().enumerate() {
        for q in 0..n_modes {
            let Some((m1, s1)) = annihilate(det, q) else { continue };
            for p in 0..n_modes {
                let Some((m2, s2)) = annihilate(m1, p) else { continue };
                chi[p * n_modes + q][hole_index[&m2]] += s1 * s2 * psi[a];
            }
        }
    }
    let dot = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(a, b)| a * b).sum() };

    let mut out = vec![0.0; l.pow(4)];
    for i in 0..l {
        for k in 0..l {
            for j in 0..l {
                for ll in 0..l {
                    let mut acc = 0.0;
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let bra = &chi[mode(k, tau) * n_modes + mode(i, sigma)];
                            let ket = &chi[mode(ll, tau) * n_modes + mode(j, sigma)];
                            acc += dot(bra, ket);
                        }
                    }
                    out[flat_index(l, i, k, j, ll)] = 0.5 * acc;
                }
            }
        }
    }
    out
}
