#![allow(dead_code)]

use domain_rdm::nalgebra::DMatrix;
use domain_rdm::oracle::single_det_system;
use domain_rdm::rdm::{validate_domain_set, validate_one_rdm};
use domain_rdm::{DomainOverlapSet, OneRdm};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Frozen output of `tests/oracle/hubbard_reference.py`.
pub fn reference() -> Value {
    serde_json::from_str(include_str!("../oracle/hubbard_reference.json")).unwrap()
}

/// Reference entry for `(L, N, t, U)` and the given 1-based site blocks.
pub fn reference_system(l: usize, n: usize, u: f64, blocks: &[Vec<usize>]) -> Value {
    let refs = reference();
    refs.as_array()
        .unwrap()
        .iter()
        .find(|r| {
            let s = r["system"].as_array().unwrap();
            let sites: Vec<Vec<usize>> = r["domains"]
                .as_array()
                .unwrap()
                .iter()
                .map(|d| {
                    d["sites"]
                        .as_array()
                        .unwrap()
                        .iter()
                        .map(|x| x.as_u64().unwrap() as usize)
                        .collect()
                })
                .collect();
            s[0].as_u64() == Some(l as u64) && s[1].as_u64() == Some(n as u64) && s[3].as_f64() == Some(u) && sites == blocks
        })
        .cloned()
        .unwrap_or_else(|| panic!("no reference for ({l},{n},{u}) {blocks:?}"))
}

pub fn f64s(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

/// Haar-ish random orthogonal matrix (QR of a Gaussian matrix).
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Occupied orbitals of a random closed-shell determinant.
pub fn random_determinant(m: usize, n_occ: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    random_orthogonal(m, rng).columns(0, n_occ).into_owned()
}

/// Random ensemble 1-RDM: a convex mixture of determinant 1-RDMs.
pub fn random_one_rdm(m: usize, n_electrons: usize, rng: &mut impl Rng) -> OneRdm {
    let mut d = DMatrix::zeros(m, m);
    let k = rng.random_range(1..=4);
    let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = w.iter().sum();
    for wi in w {
        let (det, _) = single_det_system(&random_determinant(m, n_electrons / 2, rng)).unwrap();
        d += det.matrix().as_matrix() * (wi / total);
    }
    let d = (&d + d.transpose()) * 0.5;
    validate_one_rdm(d, n_electrons).unwrap()
}

/// Domain overlaps from a Naimark dilation: `S_Ω = V E_Ω Vᵀ` where `V` holds
/// the first `m` rows of a random `2m × 2m` orthogonal matrix and the
/// `E_Ω` are coordinate projectors partitioning `2m` coordinates into `k`
/// groups. The result resolves the identity but the members do not commute.
pub fn naimark_domains(m: usize, k: usize, rng: &mut impl Rng) -> DomainOverlapSet {
    assert!(k >= 1 && k <= 2 * m);
    let v = random_orthogonal(2 * m, rng).rows(0, m).into_owned();
    let mut coords: Vec<usize> = (0..2 * m).collect();
    coords.shuffle(rng);
    let mut groups = vec![Vec::new(); k];
    for (i, c) in coords.into_iter().enumerate() {
        groups[if i < k { i } else { rng.random_range(0..k) }].push(c);
    }
    let mats = groups
        .iter()
        .map(|g| {
            let cols = DMatrix::from_fn(m, g.len(), |r, c| v[(r, g[c])]);
            let s = &cols * cols.transpose();
            (&s + s.transpose()) * 0.5
        })
        .collect();
    let labels = (0..k).map(|i| format!("D{i}")).collect();
    validate_domain_set(mats, labels).unwrap()
}

/// One-, two- and (when possible) three-block site partitions.
pub fn site_partitions(l: usize) -> Vec<Vec<Vec<usize>>> {
    let all: Vec<usize> = (1..=l).collect();
    let half = l / 2;
    let mut out = vec![vec![all.clone()], vec![all[..half].to_vec(), all[half..].to_vec()]];
    if l >= 3 {
        out.push(vec![vec![1], all[1..half.max(2)].to_vec(), all[half.max(2)..].to_vec()]);
    }
    out
}

/// Best value of `f` on a uniform grid of `points` angles over `[lo, hi]`,
/// refined by golden-section inside the winning grid cell.
pub fn grid_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> f64 {
    let h = (hi - lo) / (points - 1) as f64;
    let (best, _) = (0..points)
        .map(|i| lo + h * i as f64)
        .map(|t| (t, f(t)))
        .fold((lo, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best - h, best + h);
    while b - a > 1e-12 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) >= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b)).max(f(best))
}

/// `W · R(θ)` for a two-column `W`.
pub fn rotate_pair(w: &DMatrix<f64>, theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    w * r
}
