//! Exactly solvable reference systems: Hubbard chains by full
//! configuration interaction, closed-shell single determinants, and
//! site-block domain projectors.

mod determinant;
mod hubbard;

pub use determinant::single_det_system;
pub use hubbard::{hubbard_fci, one_body_matrix, rdm_energy, Boundary, HubbardResult, HubbardSpec};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::rdm::{validate_domain_set, DomainOverlapSet};

/// Diagonal 0/1 projectors for a partition of the 1-based sites `1..=n_sites`.
/// Domain labels are the comma-joined site numbers.
pub fn site_domains(n_sites: usize, blocks: &[Vec<usize>]) -> Result<DomainOverlapSet> {
    if blocks.is_empty() {
        return Err(Error::InvalidPartition("no blocks".into()));
    }
    let mut seen = vec![false; n_sites];
    for block in blocks {
        if block.is_empty() {
            return Err(Error::InvalidPartition("empty block".into()));
        }
        for &site in block {
            if site == 0 || site > n_sites {
                return Err(Error::InvalidPartition(format!("site {site} outside 1..={n_sites}")));
            }
            if std::mem::replace(&mut seen[site - 1], true) {
                return Err(Error::InvalidPartition(format!("site {site} appears in more than one block")));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidPartition(format!("site {} not covered", missing + 1)));
    }
    let matrices = blocks
        .iter()
        .map(|b| {
            DMatrix::from_fn(
                n_sites,
                n_sites,
                |i, j| if i == j && b.contains(&(i + 1)) { 1.0 } else { 0.0 },
            )
        })
        .collect();
    let labels = blocks
        .iter()
        .map(|b| b.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    validate_domain_set(matrices, labels)
}

/// Parses a block list such as `1,2;3,4` (sites 1-based, blocks separated
/// by `;`).
pub fn parse_site_blocks(spec: &str) -> Result<Vec<Vec<usize>>> {
    spec.split(';')
        .map(|block| {
            block
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidPartition(format!("bad site '{}' in '{spec}'", s.trim())))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;

    #[test]
    fn dimer_sites() {
        let set = site_domains(2, &[vec![1], vec![2]]).unwrap();
        assert_eq!(set.labels(), &["1".to_string(), "2".to_string()]);
        assert_eq!(set.matrices()[0], SymMatrix::from_diagonal(&[1.0, 0.0]));
        assert_eq!(set.matrices()[1], SymMatrix::from_diagonal(&[0.0, 1.0]));
    }

    #[test]
    fn four_site_blocks() {
        let set = site_domains(4, &parse_site_blocks("1,2;3,4").unwrap()).unwrap();
        assert_eq!(set.labels(), &["1,2".to_string(), "3,4".to_string()]);
        let sum = set.matrices()[0].as_matrix() + set.matrices()[1].as_matrix();
        assert_eq!(sum, DMatrix::identity(4, 4));
    }

    #[test]
    fn invalid_partitions() {
        for blocks in [
            vec![vec![1], vec![1, 2]],
            vec![vec![1], vec![2]],
            vec![vec![1, 2, 3], vec![]],
            vec![vec![0, 1, 2, 3]],
        ] {
            assert!(
                matches!(site_domains(3, &blocks), Err(Error::InvalidPartition(_))),
                "{blocks:?}"
            );
        }
        assert!(parse_site_blocks("1,x;2").is_err());
        assert!(parse_site_blocks("1;;2").is_err());
    }
}
