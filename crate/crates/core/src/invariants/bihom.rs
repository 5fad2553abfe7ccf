use serde::Serialize;

use super::{apply_automorphism, to_adapted, InvariantError, InvariantFamily};
use crate::field::{CycloNum, ScalarRng};
use crate::liealg::PeriodicGrading;
use crate::poisson::{jacobian_rank, MultiPoly};

/// `H_{j,i}`: the part of `H_j` on which `φ_s` acts by `s^i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BiHomComponent {
    pub parent_index: usize,
    pub phi_degree: u32,
    #[serde(serialize_with = "crate::poisson::serialize_poly")]
    pub poly: MultiPoly,
}

fn weights(grading: &PeriodicGrading) -> Vec<i64> {
    grading.grades().iter().map(|&g| g as i64).collect()
}

/// Groups the monomials of `F` (adapted coordinates) by `Σ grade · exponent`.
pub fn bihom_decompose(parent: usize, f: &MultiPoly, grading: &PeriodicGrading) -> Vec<BiHomComponent> {
    f.weight_components(&weights(grading))
        .into_iter()
        .map(|(w, poly)| BiHomComponent {
            parent_index: parent,
            phi_degree: w as u32,
            poly,
        })
        .collect()
}

/// `F^•`, the component of maximal φ-degree.
pub fn top_component(parent: usize, f: &MultiPoly, grading: &PeriodicGrading) -> Result<BiHomComponent, InvariantError> {
    bihom_decompose(parent, f, grading)
        .pop()
        .ok_or(InvariantError::ZeroPolynomial)
}

/// `deg_φ F = d^•`.
pub fn phi_degree(f: &MultiPoly, grading: &PeriodicGrading) -> Result<u32, InvariantError> {
    top_component(0, f, grading).map(|c| c.phi_degree)
}

/// `r` with `θ(F) = ζ^r F`, read off from the φ-weights of an adapted
/// polynomial: `F` is an eigenvector exactly when all weights agree mod `m`.
pub fn eigen_exponent(f_adapted: &MultiPoly, grading: &PeriodicGrading) -> Option<u32> {
    let m = grading.m() as i64;
    let mut r = None;
    for w in f_adapted.weight_components(&weights(grading)).keys() {
        let res = w.rem_euclid(m) as u32;
        match r {
            None => r = Some(res),
            Some(prev) if prev != res => return None,
            _ => {}
        }
    }
    r.or(Some(0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GgsReport {
    pub is_ggs: bool,
    pub phi_degrees: Vec<u32>,
    pub sum_phi_deg: u64,
    pub d_theta: u64,
    /// Whether the top components have independent differentials at a
    /// seeded point.
    pub tops_independent: bool,
}

/// `Σ_j deg_φ H_j = D_θ`, cross-checked by the Jacobian rank of the
/// top components.
pub fn is_ggs(family: &InvariantFamily, grading: &PeriodicGrading, seed: u64) -> Result<GgsReport, InvariantError> {
    let adapted = family.adapted(grading);
    let mut tops = Vec::with_capacity(adapted.len());
    let mut degs = Vec::with_capacity(adapted.len());
    for (j, f) in adapted.iter().enumerate() {
        let top = top_component(j, f, grading)?;
        degs.push(top.phi_degree);
        tops.push(top.poly);
    }
    let sum: u64 = degs.iter().map(|&d| d as u64).sum();
    let d_theta = grading.d_theta();
    let point = ScalarRng::new(seed).point(grading.dim(), 1_000_000);
    let independent = jacobian_rank(&tops, &point) == tops.len();
    Ok(GgsReport {
        is_ggs: sum == d_theta,
        phi_degrees: degs,
        sum_phi_deg: sum,
        d_theta,
        tops_independent: independent,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenCorrection {
    pub family: InvariantFamily,
    pub input_was_ggs: bool,
    /// Generators for which the prescribed average `k ≡ −d^• (mod m)` was
    /// rejected and another `k` was used.
    pub fallbacks: Vec<usize>,
    pub output: GgsReport,
}

/// For each non-eigenvector `H_i`, replaces it by
/// `H_i^[k] = Σ_{j<m} ζ^{jk} θ^j(H_i)` with `k + d_i^• ≡ 0 (mod m)`, which
/// keeps the top component. If that average vanishes or makes the family
/// dependent (possible only for non-g.g.s. input), the other residues are
/// tried in increasing order.
pub fn eigenvector_correction(
    family: &InvariantFamily,
    grading: &PeriodicGrading,
    seed: u64,
) -> Result<EigenCorrection, InvariantError> {
    let input = is_ggs(family, grading, seed)?;
    let theta = grading.theta();
    let m = grading.m();
    let cond = grading.conductor();
    let step = (cond / m) as i64;
    let point = ScalarRng::new(seed ^ 0x5eed).point(grading.dim(), 1_000_000);
    let l = family.len();
    let mut gens = family.generators.clone();
    let mut exps = Vec::with_capacity(l);
    let mut fallbacks = Vec::new();
    for i in 0..l {
        let adapted = to_adapted(&gens[i], grading);
        if let Some(r) = eigen_exponent(&adapted, grading) {
            exps.push(r);
            continue;
        }
        let d_top = phi_degree(&adapted, grading)?;
        let k0 = (m - d_top % m) % m;
        let orbit: Vec<MultiPoly> = std::iter::successors(Some(gens[i].clone()), |f| Some(apply_automorphism(f, theta)))
            .take(m as usize)
            .collect();
        let mut accepted = None;
        for k in std::iter::once(k0).chain((0..m).filter(|&k| k != k0)) {
            let mut avg = MultiPoly::zero(gens[i].nvars());
            for (j, f) in orbit.iter().enumerate() {
                let z = CycloNum::zeta_pow(cond, step * j as i64 * k as i64);
                avg.add_assign_scaled(f, &z);
            }
            if avg.is_zero() {
                continue;
            }
            let mut trial = gens.clone();
            trial[i] = avg;
            if jacobian_rank(&trial, &point) == l {
                accepted = Some((k, trial));
                break;
            }
        }
        let (k, trial) = accepted.ok_or(InvariantError::SelectionFailure(i))?;
        if k != k0 {
            fallbacks.push(i);
        }
        gens = trial;
        exps.push((m - k) % m);
    }
    let out = InvariantFamily {
        degrees: family.degrees.clone(),
        generators: gens,
        eigen_exponents: Some(exps),
    };
    let output = is_ggs(&out, grading, seed)?;
    Ok(EigenCorrection {
        family: out,
        input_was_ggs: input.is_ggs,
        fallbacks,
        output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::casimir_family;
    use crate::liealg::{build_classical, cyclic_permutation, eigenspace_grading, Automorphism, Family};
    use std::sync::Arc;

    fn grading(n: usize) -> PeriodicGrading {
        let h = build_classical(Family::Sl, 2).unwrap();
        eigenspace_grading(&cyclic_permutation(&h, n).unwrap()).unwrap()
    }

    #[test]
    fn first_copy_casimir_components() {
        let gr = grading(2);
        let fam = casimir_family(gr.algebra()).unwrap();
        let comps = bihom_decompose(0, &to_adapted(&fam.generators[0], &gr), &gr);
        assert_eq!(comps.iter().map(|c| c.phi_degree).collect::<Vec<_>>(), vec![0, 1, 2]);
        let sum = comps.iter().fold(MultiPoly::zero(6), |acc, c| &acc + &c.poly);
        assert_eq!(sum, to_adapted(&fam.generators[0], &gr));
    }

    #[test]
    fn swap_correction() {
        let gr = grading(2);
        let fam = casimir_family(gr.algebra()).unwrap();
        let before = is_ggs(&fam, &gr, 1).unwrap();
        assert_eq!((before.sum_phi_deg, before.d_theta, before.is_ggs), (4, 3, false));
        assert!(!before.tops_independent);
        let fixed = eigenvector_correction(&fam, &gr, 1).unwrap();
        assert!(!fixed.input_was_ggs);
        assert_eq!(fixed.family.eigen_exponents, Some(vec![0, 1]));
        let c1 = &fam.generators[0];
        let c2 = &fam.generators[1];
        assert_eq!(fixed.family.generators[0], c1 + c2);
        assert_eq!(fixed.family.generators[1], c2 - c1);
        assert!(fixed.output.is_ggs && fixed.output.tops_independent);
    }

    #[test]
    fn cycle_correction_exponents() {
        let gr = grading(3);
        let fam = casimir_family(gr.algebra()).unwrap();
        let fixed = eigenvector_correction(&fam, &gr, 4).unwrap();
        assert_eq!(fixed.family.eigen_exponents, Some(vec![1, 0, 2]));
        assert!(fixed.output.is_ggs);
        assert_eq!(fixed.output.sum_phi_deg, 9);
        for (f, r) in fixed.family.generators.iter().zip([1u32, 0, 2]) {
            let img = apply_automorphism(f, gr.theta());
            let z = CycloNum::zeta_pow(3, r as i64);
            assert_eq!(img, f.scale(&z));
        }
    }

    #[test]
    fn trivial_grading_is_ggs() {
        let h = Arc::new(build_classical(Family::Sl, 3).unwrap());
        let gr = eigenspace_grading(&Automorphism::identity(h)).unwrap();
        let fam = casimir_family(gr.algebra()).unwrap();
        let rep = is_ggs(&fam, &gr, 0).unwrap();
        assert_eq!((rep.is_ggs, rep.sum_phi_deg, rep.d_theta), (true, 0, 0));
        let fixed = eigenvector_correction(&fam, &gr, 0).unwrap();
        assert_eq!(fixed.family.generators, fam.generators);
        assert!(fixed.fallbacks.is_empty());
    }
}
