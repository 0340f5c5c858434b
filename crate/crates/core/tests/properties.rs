mod common;

use common::*;
use domain_rdm::dafh::{cumulant, dafh_matrix, single_det_dafh, single_det_two_rdm};
use domain_rdm::decomposition::{partition, partition_deviation, symmetric_restrict};
use domain_rdm::linalg::{psd_sqrt, sym_eigen};
use domain_rdm::nalgebra::{DMatrix, DVector};
use domain_rdm::oracle::single_det_system;
use domain_rdm::representability::{check, check_domain, Verdict};
use domain_rdm::{tol, SymMatrix};
use proptest::prelude::*;

fn from_spectrum(q: &DMatrix<f64>, ev: &[f64]) -> DMatrix<f64> {
    let a = q * DMatrix::from_diagonal(&DVector::from_column_slice(ev)) * q.transpose();
    (&a + a.transpose()) * 0.5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn psd_sqrt_squares_back(seed in any::<u64>(), n in 1usize..=64) {
        let mut r = rng(seed);
        let ev: Vec<f64> = (0..n).map(|i| if i % 5 == 0 { 0.0 } else { 2.0 * rand::Rng::random::<f64>(&mut r) }).collect();
        let a = SymMatrix::new(from_spectrum(&random_orthogonal(n, &mut r), &ev)).unwrap();
        let s = psd_sqrt(&a, tol::CLAMP).unwrap();
        let back = s.as_matrix() * s.as_matrix();
        prop_assert!((back - a.as_matrix()).abs().max() < 1e-10);
        prop_assert!(s.eigen().min() > -1e-12);
    }

    #[test]
    fn check_is_rotation_invariant(seed in any::<u64>(), n in 1usize..=12, shift in -0.1f64..0.1) {
        let mut r = rng(seed);
        let ev: Vec<f64> = (0..n).map(|i| if i == 0 { shift } else { 2.0 * rand::Rng::random::<f64>(&mut r) }).collect();
        let diag = DMatrix::from_diagonal(&DVector::from_column_slice(&ev));
        let rotated = from_spectrum(&random_orthogonal(n, &mut r), &ev);
        let trace: f64 = ev.iter().sum();
        let a = check(&diag, Some(trace), tol::CHECK);
        let b = check(&rotated, Some(trace), tol::CHECK);
        prop_assert!((a.min_eigenvalue - b.min_eigenvalue).abs() < 1e-10);
        if shift.abs() > 1e-6 {
            prop_assert_eq!(a.verdict, b.verdict);
            prop_assert_eq!(a.verdict == Verdict::Representable, shift > 0.0);
        }
    }

    #[test]
    fn restrictions_partition_the_rdm(seed in any::<u64>(), m in 2usize..=8, k in 1usize..=4, half_n in 1usize..=4) {
        let mut r = rng(seed);
        let n = 2 * half_n.min(m);
        let d = random_one_rdm(m, n, &mut r);
        let domains = naimark_domains(m, k.min(2 * m), &mut r);
        let parts = partition(&d, &domains).unwrap();
        prop_assert!(partition_deviation(&d, &parts) < 1e-10);
        for (g, (_, s)) in parts.iter().zip(domains.iter()) {
            let rep = check_domain(g, tol::CHECK);
            prop_assert!(rep.is_representable(), "{:?}", rep.findings);
            prop_assert!((g.matrix.trace() - d.population(s)).abs() < 1e-8);
        }
    }

    #[test]
    fn determinant_hole_collapses_to_restriction(seed in any::<u64>(), m in 1usize..=8, occ in 1usize..=4, k in 1usize..=3) {
        let mut r = rng(seed);
        let occ = occ.min(m);
        let (d, d2) = single_det_system(&random_determinant(m, occ, &mut r)).unwrap();
        let closed = single_det_two_rdm(&d).unwrap();
        prop_assert!(d2.as_slice().iter().zip(closed.as_slice()).all(|(a, b)| (a - b).abs() < 1e-12));
        prop_assert!(cumulant(&d, &d2).unwrap().max_abs() < 1e-10);
        let domains = naimark_domains(m, k.min(2 * m), &mut r);
        for (label, s) in domains.iter() {
            let sym = symmetric_restrict(&d, s, label).unwrap();
            let hole = dafh_matrix(&d, &d2, s, label).unwrap();
            let half = single_det_dafh(&d, s, label).unwrap();
            prop_assert!(sym.matrix.max_abs_diff(&hole.matrix) < 1e-8);
            prop_assert!(sym.matrix.max_abs_diff(&half.matrix) < 1e-8);
        }
    }

    #[test]
    fn determinant_two_rdm_conventions(seed in any::<u64>(), occ in 1usize..=3) {
        let mut r = rng(seed);
        let m = 6;
        let (d, d2) = single_det_system(&random_determinant(m, occ, &mut r)).unwrap();
        let n = (2 * occ) as f64;
        prop_assert!((d.matrix().trace() - n).abs() < 1e-10);
        prop_assert!((d2.trace() - n * (n - 1.0) / 2.0).abs() < 1e-10);
        let c = d2.partial_trace() - d.matrix().as_matrix() * ((n - 1.0) / 2.0);
        prop_assert!(c.abs().max() < 1e-10);
        let spec = sym_eigen(d.matrix().as_matrix()).unwrap();
        for &x in spec.eigenvalues.iter() {
            prop_assert!(x.abs() < 1e-10 || (x - 2.0).abs() < 1e-10);
        }
        prop_assert!(d.duodempotency_error() < 1e-10);
    }
}
