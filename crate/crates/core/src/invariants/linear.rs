use std::collections::HashMap;

use num_traits::Zero;

use super::InvariantError;
use crate::field::CycloNum;
use crate::linalg::{independent_subset, Matrix};
use crate::poisson::{monomial_support, poisson_bracket, Monomial, MultiPoly, StructureTensor};

/// All monomials of total degree `d` in `n` variables, ascending.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u16; n];
    fill(&mut exps, 0, d, &mut out);
    out.sort();
    out
}

fn fill(exps: &mut [u16], pos: usize, left: u32, out: &mut Vec<Monomial>) {
    if pos + 1 == exps.len() {
        exps[pos] = left as u16;
        out.push(Monomial::from_exps(exps.to_vec()));
        exps[pos] = 0;
        return;
    }
    if exps.is_empty() {
        if left == 0 {
            out.push(Monomial::one(0));
        }
        return;
    }
    for e in 0..=left {
        exps[pos] = e as u16;
        fill(exps, pos + 1, left - e, out);
    }
    exps[pos] = 0;
}

/// Basis of the degree-`d` part of `S(q)^q`, found as the common null space
/// of the maps `F ↦ {F, x_i}` on degree-`d` polynomials.
pub fn invariants_by_degree(t: &StructureTensor, d: u32) -> Result<Vec<MultiPoly>, InvariantError> {
    let n = t.nvars();
    let basis = monomials_of_degree(n, d);
    let mut rows: HashMap<(usize, Monomial), usize> = HashMap::new();
    let mut entries: Vec<(usize, usize, CycloNum)> = Vec::new();
    for (col, mono) in basis.iter().enumerate() {
        let f = MultiPoly::from_terms(n, [(mono.clone(), CycloNum::from(1))]);
        for i in 0..n {
            let b = poisson_bracket(&f, &MultiPoly::var(n, i), t)?;
            for (m, c) in b.terms() {
                let next = rows.len();
                let r = *rows.entry((i, m.clone())).or_insert(next);
                entries.push((r, col, c.clone()));
            }
        }
    }
    let mut mat = Matrix::zeros(rows.len().max(1), basis.len());
    for (r, c, v) in entries {
        mat[(r, c)] = v;
    }
    Ok(mat
        .nullspace()
        .into_iter()
        .map(|v| {
            MultiPoly::from_terms(
                n,
                basis.iter().cloned().zip(v).filter(|(_, c)| !c.is_zero()),
            )
        })
        .collect())
}

/// Invariants of degree `1..=max_degree` not generated by lower-degree
/// ones: at each degree, the invariants outside the span of products of
/// the generators found so far.
pub fn invariant_generators(t: &StructureTensor, max_degree: u32) -> Result<Vec<MultiPoly>, InvariantError> {
    let n = t.nvars();
    let mut gens: Vec<MultiPoly> = Vec::new();
    for d in 1..=max_degree {
        let space = invariants_by_degree(t, d)?;
        if space.is_empty() {
            continue;
        }
        let products = products_of_degree(&gens, d, n);
        let mut all = products.clone();
        all.extend(space.iter().cloned());
        let support = monomial_support(all.iter());
        let vectors: Vec<Vec<CycloNum>> = all
            .iter()
            .map(|p| p.coeff_vector(&support).expect("support covers all"))
            .collect();
        for i in independent_subset(&vectors) {
            if i >= products.len() {
                gens.push(all[i].clone());
            }
        }
    }
    Ok(gens)
}

/// Products of the given homogeneous polynomials with total degree `d`.
fn products_of_degree(gens: &[MultiPoly], d: u32, n: usize) -> Vec<MultiPoly> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, u32, MultiPoly)> = vec![(0, d, MultiPoly::one(n))];
    while let Some((start, left, acc)) = stack.pop() {
        if left == 0 {
            out.push(acc);
            continue;
        }
        for (k, g) in gens.iter().enumerate().skip(start) {
            let deg = g.degree().unwrap_or(0);
            if deg > 0 && deg <= left {
                stack.push((k, left - deg, &acc * g));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::casimir_family;
    use crate::liealg::{build_classical, Family};
    use crate::linalg::solve_in_span;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(8, 3).len(), 120);
        assert_eq!(monomials_of_degree(1, 4).len(), 1);
    }

    #[test]
    fn sl3_generators_match_casimirs() {
        let g = build_classical(Family::Sl, 3).unwrap();
        let gens = invariant_generators(g.tensor(), 3).unwrap();
        assert_eq!(gens.iter().map(|f| f.degree().unwrap()).collect::<Vec<_>>(), vec![2, 3]);
        let fam = casimir_family(&g).unwrap();
        for (mine, theirs) in gens.iter().zip(&fam.generators) {
            let support = monomial_support([mine, theirs]);
            let a = mine.coeff_vector(&support).unwrap();
            let b = theirs.coeff_vector(&support).unwrap();
            assert!(solve_in_span(&[a], &b).is_some());
        }
    }

    #[test]
    fn abelian_invariants() {
        let t = StructureTensor::new(2);
        assert_eq!(invariants_by_degree(&t, 2).unwrap().len(), 3);
        assert_eq!(invariant_generators(&t, 3).unwrap().len(), 2);
    }
}
