use std::collections::BTreeMap;

use super::{certify_on, CommutativityCertificate, Provenance, ZError, ZGenerator, ZGeneratorSet, ZKind};
use crate::field::{rat, CycloNum};
use crate::invariants::{casimir_family, eigenvector_correction, phi_degree, to_adapted};
use crate::liealg::Automorphism;
use crate::pencil::{twisted_truncation, Modulus, TwistedTruncation};
use crate::poisson::{Monomial, MultiPoly};

/// Splits a polynomial in `n + 1` variables by the exponent of the last
/// one, returning polynomials in the first `n`.
fn by_last_power(p: &MultiPoly) -> BTreeMap<u32, MultiPoly> {
    let n = p.nvars() - 1;
    let mut out: BTreeMap<u32, Vec<(Monomial, CycloNum)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let e = m.exps()[n] as u32;
        out.entry(e)
            .or_default()
            .push((Monomial::from_exps(m.exps()[..n].to_vec()), c.clone()));
    }
    out.into_iter().map(|(e, t)| (e, MultiPoly::from_terms(n, t))).collect()
}

/// The φ-polarizations `F_[0], …, F_[d(m−1)]` of a degree-`d` polynomial
/// `F` on `h*` (`dim h = F.nvars()`), as polynomials on `(h^m)*` in the
/// copy coordinates: `F_[k]` is the coefficient of `s^k` in
/// `F(Σ_j s^{m−1−j} η_j)` with `η_j = (1/m) Σ_c ζ^{−cj} x^{(c)}`.
pub fn phi_polarizations(f: &MultiPoly, m: usize) -> Result<Vec<MultiPoly>, ZError> {
    if !f.is_homogeneous() {
        return Err(ZError::NonHomogeneous);
    }
    let d = f.nvars();
    let nv = m * d + 1;
    let s = MultiPoly::var(nv, m * d);
    let inv_m = CycloNum::from(rat(1, m as i64));
    let s_pows: Vec<MultiPoly> = (0..m).map(|e| s.pow(e as u32)).collect();
    let images: Vec<MultiPoly> = (0..d)
        .map(|a| {
            let mut img = MultiPoly::zero(nv);
            for j in 0..m {
                let mut eta = MultiPoly::zero(nv);
                for c in 0..m {
                    let z = CycloNum::zeta_pow(m as u32, -((c * j) as i64));
                    eta.add_assign_scaled(&MultiPoly::var(nv, c * d + a), &(&z * &inv_m));
                }
                img = &img + &(&eta * &s_pows[m - 1 - j]);
            }
            img
        })
        .collect();
    let deg = f.degree().unwrap_or(0) as usize;
    let pieces = by_last_power(&f.substitute(&images));
    Ok((0..=deg * (m - 1))
        .map(|k| pieces.get(&(k as u32)).cloned().unwrap_or_else(|| MultiPoly::zero(m * d)))
        .collect())
}

/// Polarizations `(F_i)_[b_{i,•} + km]`, `0 ≤ k < n`, inside the symmetric
/// algebra of the nilpotent twisted truncation.
#[derive(Clone, Debug)]
pub struct TwistedPolarizations {
    pub truncation: TwistedTruncation,
    pub generators: ZGeneratorSet,
}

impl TwistedPolarizations {
    /// Pairwise brackets and invariance under the truncation's bracket.
    pub fn certify(&self, seed: u64) -> Result<CommutativityCertificate, ZError> {
        let t = self.truncation.algebra().tensor();
        let all: Vec<usize> = (0..t.nvars()).collect();
        certify_on(&self.generators, &[("g_(0)", t)], ("g_(0)", t, &all), seed, None)
    }
}

/// `t^{−1}`-polarizations for an involution (or the identity) of a
/// classical `h`, at level `N = n·ord θ`. The layer `h_{k̄} t^{−j}` of
/// `W_N` is identified with `h_{k̄} t^{N−j}` in the truncation and scaled
/// by `s^{j−1}`.
pub fn twisted_polarizations(theta: &Automorphism, n: usize) -> Result<TwistedPolarizations, ZError> {
    if theta.order() > 2 {
        return Err(ZError::UnsupportedTheta(format!(
            "twisted polarizations need an involution, got order {}",
            theta.order()
        )));
    }
    let tt = twisted_truncation(theta, n, Modulus::Nilpotent)?;
    let grading = tt.grading().clone();
    let m = grading.m() as usize;
    let big_n = tt.levels();
    let family = casimir_family(grading.algebra())?;
    let eig = eigenvector_correction(&family, &grading, 0)?;
    if !eig.output.is_ggs {
        return Err(ZError::UnsupportedTheta("no g.g.s. found for this involution".into()));
    }
    let nv = tt.basis().len() + 1;
    let s = MultiPoly::var(nv, nv - 1);
    let grades = grading.grades();
    let images: Vec<MultiPoly> = (0..grading.dim())
        .map(|a| {
            let mut img = MultiPoly::zero(nv);
            for e in (grades[a] as usize..big_n).step_by(m) {
                let u = MultiPoly::var(nv, tt.position(e, a).expect("grade-compatible layer"));
                img = &img + &(&u * &s.pow((big_n - 1 - e) as u32));
            }
            img
        })
        .collect();
    let mut generators = Vec::new();
    for (i, f) in eig.family.generators.iter().enumerate() {
        let fa = to_adapted(f, &grading);
        let b = eig.family.degrees[i] as usize;
        let b_top = phi_degree(&fa, &grading)? as usize;
        let b_low = b * (m - 1) - b_top;
        let pieces = by_last_power(&fa.substitute(&images));
        for k in 0..n {
            let idx = (b_low + k * m) as u32;
            let poly = pieces.get(&idx).cloned().unwrap_or_else(|| MultiPoly::zero(nv - 1));
            generators.push(ZGenerator {
                poly,
                provenance: Provenance::Polarization { parent: i, index: idx },
            });
        }
    }
    let expected = n * family.len();
    Ok(TwistedPolarizations {
        truncation: tt,
        generators: ZGeneratorSet {
            kind: ZKind::Twisted,
            generators,
            expected_count: expected,
            free: true,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{bihom_decompose, top_component};
    use crate::liealg::{build_classical, cartan_involution, cyclic_permutation, eigenspace_grading, Family};
    use crate::pencil::cyclic_current_map;
    use crate::zalgebra::same_linear_span;
    use std::sync::Arc;

    fn sl(n: usize) -> crate::liealg::LieAlgebra {
        build_classical(Family::Sl, n).unwrap()
    }

    #[test]
    fn linear_polarizations() {
        let m = 3;
        let x = MultiPoly::var(3, 1);
        let pols = phi_polarizations(&x, m).unwrap();
        assert_eq!(pols.len(), 3);
        let gr = eigenspace_grading(&cyclic_permutation(&sl(2), m).unwrap()).unwrap();
        for (k, p) in pols.iter().enumerate() {
            let i = (m - 1 - k) as i64;
            let third = CycloNum::from(rat(1, 3));
            let expect: Vec<CycloNum> = (0..9)
                .map(|v| if v % 3 == 1 { &CycloNum::zeta_pow(3, -i * (v / 3) as i64) * &third } else { CycloNum::from(0) })
                .collect();
            assert_eq!(*p, MultiPoly::linear(9, &expect));
            assert_eq!(gr.project(&expect, i as u32), expect);
        }
    }

    #[test]
    fn polarizations_span_components() {
        for (k, m, count) in [(2usize, 2usize, 3usize), (2, 3, 5), (3, 2, 7)] {
            let h = sl(k);
            let gr = Arc::new(eigenspace_grading(&cyclic_permutation(&h, m).unwrap()).unwrap());
            let fam_h = casimir_family(&h).unwrap();
            let mut pols = Vec::new();
            for f in &fam_h.generators {
                pols.extend(phi_polarizations(f, m).unwrap().into_iter().map(|p| to_adapted(&p, &gr)));
            }
            pols.retain(|p| !p.is_zero());
            assert_eq!(pols.len(), count);
            let eig = eigenvector_correction(&casimir_family(gr.algebra()).unwrap(), &gr, 2).unwrap().family;
            let comps: Vec<MultiPoly> = eig
                .adapted(&gr)
                .iter()
                .enumerate()
                .flat_map(|(j, f)| bihom_decompose(j, f, &gr).into_iter().map(|c| c.poly))
                .collect();
            assert!(same_linear_span(&pols, &comps));
        }
    }

    #[test]
    fn cartan_tower() {
        let h = Arc::new(sl(2));
        let theta = cartan_involution(h).unwrap();
        let one = twisted_polarizations(&theta, 1).unwrap();
        assert_eq!(one.generators.len(), 1);
        let gr = one.truncation.grading();
        let c = to_adapted(&casimir_family(gr.algebra()).unwrap().generators[0], gr);
        let top = top_component(0, &c, gr).unwrap().poly;
        let tt = &one.truncation;
        let images: Vec<MultiPoly> = (0..3)
            .map(|a| MultiPoly::var(3, tt.position(gr.grades()[a] as usize, a).unwrap()))
            .collect();
        assert!(same_linear_span(&[one.generators.generators[0].poly.clone()], &[top.substitute(&images)]));

        let two = twisted_polarizations(&theta, 2).unwrap();
        assert_eq!(two.generators.len(), 2);
        let cert = two.certify(5).unwrap();
        assert!(cert.all_zero && cert.invariance.holds);
        assert_eq!(cert.jacobian_rank_at_seed, 2);
    }

    #[test]
    fn identity_matches_cyclic_polarizations() {
        let h = sl(2);
        let n = 3;
        let tp = twisted_polarizations(&crate::liealg::Automorphism::identity(Arc::new(h.clone())), n).unwrap();
        let gr = eigenspace_grading(&cyclic_permutation(&h, n).unwrap()).unwrap();
        let map = cyclic_current_map(&gr, 3);
        let map_inv = map.inverse().unwrap();
        let rows: Vec<Vec<CycloNum>> = (0..map_inv.cols()).map(|b| map_inv.col(b)).collect();
        let f = &casimir_family(&h).unwrap().generators[0];
        let cyc: Vec<MultiPoly> = phi_polarizations(f, n).unwrap()[..n]
            .iter()
            .map(|p| to_adapted(p, &gr).substitute_linear(&rows))
            .collect();
        assert!(same_linear_span(&tp.generators.polys(), &cyc));
        assert!(tp.certify(1).unwrap().invariance.holds);
    }

    #[test]
    fn rejects_higher_order() {
        let h = sl(2);
        let theta = cyclic_permutation(&h, 3).unwrap();
        assert!(matches!(twisted_polarizations(&theta, 1), Err(ZError::UnsupportedTheta(_))));
    }
}
