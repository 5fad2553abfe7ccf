use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{ZError, ZGeneratorSet};
use crate::field::ScalarRng;
use crate::pencil::BracketPencil;
use crate::poisson::{jacobian_rank, minor_gcd, poisson_bracket, MultiPoly, PoissonError, StructureTensor};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    /// Label of the bracket under which `{F_i, F_j} ≠ 0`.
    pub bracket: String,
}

/// Result of bracketing every generator with a set of coordinate functions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceCheck {
    pub against: String,
    pub holds: bool,
    /// `(generator, coordinate)` pairs with a nonzero bracket.
    pub failures: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutativityCertificate {
    pub pair_count: usize,
    pub all_zero: bool,
    pub witnesses: Vec<Witness>,
    pub brackets_checked: Vec<String>,
    pub jacobian_rank_at_seed: usize,
    pub expected_count: usize,
    pub seed: u64,
    pub invariance: InvarianceCheck,
    #[serde(serialize_with = "tri_state")]
    pub minor_gcd_constant: Option<bool>,
}

fn tri_state<S: Serializer>(v: &Option<bool>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(b) => s.serialize_bool(*b),
        None => s.serialize_str("unknown"),
    }
}

/// Pairwise brackets under `{,}_0` and `{,}_1`, which covers every `{,}_t`
/// by linearity in `t`; `g_0`-invariance of each generator; the Jacobian
/// rank at a seeded point; and, given a budget, the minor-gcd test.
pub fn certify(
    genset: &ZGeneratorSet,
    pencil: &BracketPencil,
    seed: u64,
    gcd_budget: Option<usize>,
) -> Result<CommutativityCertificate, ZError> {
    let g0: Vec<usize> = pencil.g0_indices();
    certify_on(
        genset,
        &[("t=0", pencil.pi0()), ("t=1", pencil.pi())],
        ("g_0", pencil.pi(), &g0),
        seed,
        gcd_budget,
    )
}

/// Certificate against arbitrary brackets; `invariance` names a bracket and
/// the coordinates each generator must commute with.
pub fn certify_on(
    genset: &ZGeneratorSet,
    brackets: &[(&str, &StructureTensor)],
    invariance: (&str, &StructureTensor, &[usize]),
    seed: u64,
    gcd_budget: Option<usize>,
) -> Result<CommutativityCertificate, ZError> {
    let polys = genset.polys();
    let k = polys.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let results: Vec<Result<Vec<Witness>, PoissonError>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut bad = Vec::new();
            for (label, t) in brackets {
                if !poisson_bracket(&polys[i], &polys[j], t)?.is_zero() {
                    bad.push(Witness {
                        i,
                        j,
                        bracket: label.to_string(),
                    });
                }
            }
            Ok(bad)
        })
        .collect();
    let mut witnesses = Vec::new();
    for r in results {
        witnesses.extend(r?);
    }

    let (label, tensor, coords) = invariance;
    let n = tensor.nvars();
    let checks: Vec<(usize, usize)> = (0..k).flat_map(|g| coords.iter().map(move |&a| (g, a))).collect();
    let failures: Vec<Result<Option<(usize, usize)>, PoissonError>> = checks
        .par_iter()
        .map(|&(g, a)| {
            let b = poisson_bracket(&polys[g], &MultiPoly::var(n, a), tensor)?;
            Ok((!b.is_zero()).then_some((g, a)))
        })
        .collect();
    let mut inv_failures = Vec::new();
    for f in failures {
        if let Some(p) = f? {
            inv_failures.push(p);
        }
    }

    let point = ScalarRng::new(seed).point(n, 1_000_000);
    let rank = jacobian_rank(&polys, &point);
    let minor_gcd_constant = match gcd_budget {
        Some(budget) if k > 0 && k <= n => match minor_gcd(&polys, budget, seed) {
            Ok(g) => Some(g.gcd.is_constant()),
            Err(PoissonError::BudgetExhausted { .. }) => None,
            Err(e) => return Err(e.into()),
        },
        _ => None,
    };
    Ok(CommutativityCertificate {
        pair_count: pairs.len(),
        all_zero: witnesses.is_empty(),
        witnesses,
        brackets_checked: brackets.iter().map(|(l, _)| l.to_string()).collect(),
        jacobian_rank_at_seed: rank,
        expected_count: genset.expected_count,
        seed,
        invariance: InvarianceCheck {
            against: label.to_string(),
            holds: inv_failures.is_empty(),
            failures: inv_failures,
        },
        minor_gcd_constant,
    })
}
