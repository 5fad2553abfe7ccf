//! The Poisson-commutative algebras `Z_×`, `Z` and `Z̃` attached to a
//! periodic grading, φ-polarizations, Gaudin Hamiltonians, twisted
//! polarizations and exact commutativity certificates.

mod certify;
mod gaudin;
mod polar;

pub use certify::{certify, certify_on, CommutativityCertificate, InvarianceCheck, Witness};
pub use gaudin::{gaudin_hamiltonians, gaudin_points, rho_grade, rho_symbol, split_casimir};
pub use polar::{phi_polarizations, twisted_polarizations, TwistedPolarizations};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::invariants::{bihom_decompose, invariant_generators, is_ggs, InvariantError, InvariantFamily};
use crate::liealg::{fixed_subalgebra, LieError, PeriodicGrading};
use crate::linalg::solve_in_span;
use crate::pencil::{grading_numbers, index_of_tensor, BracketPencil, IndexMethod, PencilError};
use crate::poisson::{monomial_support, MultiPoly, PoissonError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZError {
    #[error("unhandled case: {0}")]
    UnhandledCase(String),
    #[error("Gaudin parameters must be pairwise distinct")]
    RepeatedParameters,
    #[error("polarization needs a homogeneous polynomial")]
    NonHomogeneous,
    #[error("unsupported automorphism: {0}")]
    UnsupportedTheta(String),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZKind {
    ZCross,
    ZFull,
    ZTilde,
    Twisted,
    Gaudin,
}

/// Where a generator came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Provenance {
    Component { parent: usize, phi_degree: u32 },
    Polarization { parent: usize, index: u32 },
    Gaudin { k: usize },
    G0Basis { index: usize },
    G0Invariant { index: usize },
    /// Read back from serialized text.
    Imported { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZGenerator {
    #[serde(serialize_with = "crate::poisson::serialize_poly")]
    pub poly: MultiPoly,
    #[serde(flatten)]
    pub provenance: Provenance,
}

/// Generators in grading-adapted coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZGeneratorSet {
    pub kind: ZKind,
    pub generators: Vec<ZGenerator>,
    pub expected_count: usize,
    /// False when the input family is not a g.g.s.; the generators are then
    /// not expected to be algebraically independent.
    pub free: bool,
}

impl ZGeneratorSet {
    pub fn from_polys(kind: ZKind, polys: Vec<MultiPoly>, expected_count: usize, free: bool) -> ZGeneratorSet {
        let generators = polys
            .into_iter()
            .enumerate()
            .map(|(index, poly)| ZGenerator {
                poly,
                provenance: Provenance::Imported { index },
            })
            .collect();
        ZGeneratorSet {
            kind,
            generators,
            expected_count,
            free,
        }
    }

    pub fn polys(&self) -> Vec<MultiPoly> {
        self.generators.iter().map(|g| g.poly.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// All nonzero bi-homogeneous components `H_{j,i}` of a θ-eigen family.
pub fn z_cross_generators(
    family: &InvariantFamily,
    grading: &PeriodicGrading,
    seed: u64,
) -> Result<ZGeneratorSet, ZError> {
    let ggs = is_ggs(family, grading, seed)?;
    let numbers = grading_numbers(grading, seed, 2)?;
    let mut generators = Vec::new();
    for (j, f) in family.adapted(grading).iter().enumerate() {
        for c in bihom_decompose(j, f, grading) {
            generators.push(ZGenerator {
                poly: c.poly,
                provenance: Provenance::Component {
                    parent: j,
                    phi_degree: c.phi_degree,
                },
            });
        }
    }
    Ok(ZGeneratorSet {
        kind: ZKind::ZCross,
        generators,
        expected_count: numbers.b_theta,
        free: ggs.is_ggs && family.eigen_exponents.is_some(),
    })
}

fn is_phi_zero(g: &ZGenerator) -> bool {
    matches!(g.provenance, Provenance::Component { phi_degree: 0, .. })
}

/// `Z` from `Z_×`: equal to it when `∞` is a singular parameter, and with
/// the φ-degree 0 components replaced by a basis of `g_0` when `∞` is
/// regular and θ is inner.
pub fn z_full_generators(
    zcross: &ZGeneratorSet,
    pencil: &BracketPencil,
    seed: u64,
) -> Result<ZGeneratorSet, ZError> {
    let grading = pencil.grading();
    let g = grading.algebra();
    let rank_g = match g.rank() {
        Some(r) => r,
        None => index_of_tensor(g.tensor(), 3, seed, IndexMethod::MonteCarlo)?.index_estimate,
    };
    let ind_inf = index_of_tensor(pencil.pi_inf(), 3, seed, IndexMethod::MonteCarlo)?.index_estimate;
    let mut out = zcross.clone();
    out.kind = ZKind::ZFull;
    if ind_inf > rank_g {
        return Ok(out);
    }
    let g0 = fixed_subalgebra(grading)?;
    let rank_g0 = index_of_tensor(g0.tensor(), 3, seed, IndexMethod::MonteCarlo)?.index_estimate;
    if rank_g0 != rank_g {
        return Err(ZError::UnhandledCase(
            "infinity is a regular parameter for an outer automorphism".into(),
        ));
    }
    let n = grading.dim();
    out.generators.retain(|g| !is_phi_zero(g));
    for (k, a) in grading.indices_of_grade(0).into_iter().enumerate() {
        out.generators.push(ZGenerator {
            poly: MultiPoly::var(n, a),
            provenance: Provenance::G0Basis { index: k },
        });
    }
    Ok(out)
}

/// Generators of `S(g_0)^{g_0}` up to `max_degree`, written in the adapted
/// coordinates of `g`.
pub fn g0_invariants(grading: &PeriodicGrading, max_degree: u32) -> Result<Vec<MultiPoly>, ZError> {
    let g0 = fixed_subalgebra(grading)?;
    let idx = grading.indices_of_grade(0);
    let n = grading.dim();
    let images: Vec<MultiPoly> = idx.iter().map(|&a| MultiPoly::var(n, a)).collect();
    Ok(invariant_generators(g0.tensor(), max_degree)?
        .iter()
        .map(|f| f.substitute(&images))
        .collect())
}

/// `Z̃ = alg⟨Z, S(g_0)^{g_0}⟩`: the φ-degree 0 components are replaced by
/// the given `g_0` invariants (adapted coordinates of `g`); invariants
/// already in the linear span of the remaining generators are skipped.
pub fn z_tilde_generators(zfull: &ZGeneratorSet, g0_family: &[MultiPoly]) -> ZGeneratorSet {
    let mut out = zfull.clone();
    out.kind = ZKind::ZTilde;
    out.generators.retain(|g| !is_phi_zero(g));
    for (k, f) in g0_family.iter().enumerate() {
        if f.is_zero() || in_linear_span(&out.polys(), f) {
            continue;
        }
        out.generators.push(ZGenerator {
            poly: f.clone(),
            provenance: Provenance::G0Invariant { index: k },
        });
    }
    out
}

/// Whether `f` is a linear combination of `basis`.
pub fn in_linear_span(basis: &[MultiPoly], f: &MultiPoly) -> bool {
    let support = monomial_support(basis.iter().chain(std::iter::once(f)));
    let vecs: Vec<_> = basis
        .iter()
        .map(|p| p.coeff_vector(&support).expect("support covers all"))
        .collect();
    let target = f.coeff_vector(&support).expect("support covers all");
    if vecs.is_empty() {
        return target.iter().all(Zero::is_zero);
    }
    solve_in_span(&vecs, &target).is_some()
}

/// Whether two families span the same linear space of polynomials.
pub fn same_linear_span(a: &[MultiPoly], b: &[MultiPoly]) -> bool {
    a.iter().all(|f| in_linear_span(b, f)) && b.iter().all(|f| in_linear_span(a, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{casimir_family, eigenvector_correction};
    use crate::liealg::{build_classical, cartan_involution, cyclic_permutation, eigenspace_grading, Automorphism, Family};
    use crate::pencil::build_pencil;
    use std::sync::Arc;

    fn setup(theta: Automorphism) -> (BracketPencil, InvariantFamily) {
        let gr = Arc::new(eigenspace_grading(&theta).unwrap());
        let fam = casimir_family(gr.algebra()).unwrap();
        let eig = eigenvector_correction(&fam, &gr, 3).unwrap().family;
        (build_pencil(gr).unwrap(), eig)
    }

    fn cyclic(f: Family, k: usize, n: usize) -> Automorphism {
        cyclic_permutation(&build_classical(f, k).unwrap(), n).unwrap()
    }

    #[test]
    fn cross_counts() {
        for (f, k, n, want) in [(Family::Sl, 2, 2, 3), (Family::Sl, 2, 3, 5), (Family::Sl, 3, 2, 7)] {
            let (p, fam) = setup(cyclic(f, k, n));
            let z = z_cross_generators(&fam, p.grading(), 1).unwrap();
            assert_eq!((z.len(), z.expected_count), (want, want));
            assert!(z.free);
            let full = z_full_generators(&z, &p, 1).unwrap();
            assert_eq!(full.generators, z.generators);
        }
    }

    #[test]
    fn trivial_grading_full() {
        let h = Arc::new(build_classical(Family::Sl, 3).unwrap());
        let (p, fam) = setup(Automorphism::identity(h));
        let z = z_cross_generators(&fam, p.grading(), 1).unwrap();
        let full = z_full_generators(&z, &p, 1).unwrap();
        assert_eq!(full.len(), 2);
        assert_eq!(full.expected_count, 2);
    }

    #[test]
    fn inner_abelian_fixed_points() {
        let h = Arc::new(build_classical(Family::Sl, 2).unwrap());
        let (p, fam) = setup(cartan_involution(h).unwrap());
        let z = z_cross_generators(&fam, p.grading(), 1).unwrap();
        assert_eq!(z.len(), 2);
        let full = z_full_generators(&z, &p, 1).unwrap();
        assert_eq!(full.len(), 2);
        assert!(full.generators.iter().any(|g| matches!(g.provenance, Provenance::G0Basis { .. })));
        let g0 = g0_invariants(p.grading(), 2).unwrap();
        assert_eq!(z_tilde_generators(&full, &g0).generators, full.generators);
    }

    #[test]
    fn tilde_on_swap_keeps_span() {
        let (p, fam) = setup(cyclic(Family::Sl, 2, 2));
        let z = z_full_generators(&z_cross_generators(&fam, p.grading(), 1).unwrap(), &p, 1).unwrap();
        let g0 = g0_invariants(p.grading(), 2).unwrap();
        assert_eq!(g0.len(), 1);
        let zt = z_tilde_generators(&z, &g0);
        assert_eq!(zt.len(), 3);
        assert!(same_linear_span(&zt.polys(), &z.polys()));
    }
}
