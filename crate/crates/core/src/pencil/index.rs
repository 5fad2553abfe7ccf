use rayon::prelude::*;
use serde::Serialize;

use super::PencilError;
use crate::field::ScalarRng;
use crate::liealg::LieAlgebra;
use crate::poisson::{symbolic_rank, MultiPoly, StructureTensor};

/// Largest dimension accepted by the symbolic index computation.
pub const SYMBOLIC_DIM_CAP: usize = 20;

const POINT_BOUND: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexMethod {
    MonteCarlo,
    Symbolic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub dim: usize,
    pub max_rank_observed: usize,
    pub index_estimate: usize,
    pub trials: usize,
    pub seed: u64,
    pub method: IndexMethod,
    pub exact: bool,
}

pub fn index(q: &LieAlgebra, trials: usize, seed: u64, method: IndexMethod) -> Result<IndexReport, PencilError> {
    index_of_tensor(q.tensor(), trials, seed, method)
}

/// `ind q = dim q − rk M(ξ)` for the generic skew matrix `M(ξ)_{ij} = Σ_k c_{ij}^k ξ_k`.
///
/// Monte-Carlo trial `i` evaluates at a point drawn from stream `i` of
/// `seed`, so the result does not depend on scheduling.
pub fn index_of_tensor(
    t: &StructureTensor,
    trials: usize,
    seed: u64,
    method: IndexMethod,
) -> Result<IndexReport, PencilError> {
    let dim = t.nvars();
    let (rank, trials) = match method {
        IndexMethod::MonteCarlo => {
            if trials == 0 {
                return Err(PencilError::NoTrials);
            }
            let rank = (0..trials as u64)
                .into_par_iter()
                .map(|i| {
                    let xi = ScalarRng::derived(seed, i).point(dim, POINT_BOUND);
                    t.eval(&xi).rank()
                })
                .max()
                .unwrap_or(0);
            (rank, trials)
        }
        IndexMethod::Symbolic => {
            if dim > SYMBOLIC_DIM_CAP {
                return Err(PencilError::SymbolicTooLarge {
                    dim,
                    cap: SYMBOLIC_DIM_CAP,
                });
            }
            (symbolic_rank(generic_matrix(t)), 0)
        }
    };
    debug_assert!(rank % 2 == 0, "skew matrices have even rank");
    Ok(IndexReport {
        dim,
        max_rank_observed: rank,
        index_estimate: dim - rank,
        trials,
        seed,
        method,
        exact: method == IndexMethod::Symbolic,
    })
}

/// `M(ξ)` with polynomial entries, restricted to the rows and columns that
/// are not identically zero (this does not change the rank).
fn generic_matrix(t: &StructureTensor) -> Vec<Vec<MultiPoly>> {
    let n = t.nvars();
    let mut live = vec![false; n];
    for (&(i, j), _) in t.entries() {
        live[i] = true;
        live[j] = true;
    }
    let idx: Vec<usize> = (0..n).filter(|&i| live[i]).collect();
    idx.iter()
        .map(|&i| {
            idx.iter()
                .map(|&j| MultiPoly::from_terms(n, linear_terms(&t.get(i, j), n)))
                .collect()
        })
        .collect()
}

fn linear_terms(
    form: &[(usize, crate::field::CycloNum)],
    n: usize,
) -> Vec<(crate::poisson::Monomial, crate::field::CycloNum)> {
    form.iter()
        .map(|(k, c)| (crate::poisson::Monomial::var(n, *k), c.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_classical, direct_sum, Family};

    #[test]
    fn sl2_index() {
        let g = build_classical(Family::Sl, 2).unwrap();
        for method in [IndexMethod::MonteCarlo, IndexMethod::Symbolic] {
            let r = index(&g, 3, 7, method).unwrap();
            assert_eq!((r.index_estimate, r.max_rank_observed), (1, 2));
            assert_eq!(r.exact, method == IndexMethod::Symbolic);
        }
    }

    #[test]
    fn sum_of_three_sl3() {
        let g = direct_sum(&build_classical(Family::Sl, 3).unwrap(), 3).unwrap();
        let r = index(&g, 2, 1, IndexMethod::MonteCarlo).unwrap();
        assert_eq!((r.dim, r.index_estimate), (24, 6));
        assert!(matches!(
            index(&g, 1, 1, IndexMethod::Symbolic),
            Err(PencilError::SymbolicTooLarge { dim: 24, cap: 20 })
        ));
    }

    #[test]
    fn deterministic_trials() {
        let g = build_classical(Family::So, 5).unwrap();
        let a = index(&g, 4, 99, IndexMethod::MonteCarlo).unwrap();
        let b = index(&g, 4, 99, IndexMethod::MonteCarlo).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.index_estimate, 2);
        assert!(matches!(index(&g, 0, 1, IndexMethod::MonteCarlo), Err(PencilError::NoTrials)));
    }
}
