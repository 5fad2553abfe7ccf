//! Generators of `S(g)^g` for the classical families, their bi-homogeneous
//! decomposition under a periodic grading, φ-degrees, the g.g.s. test and
//! the eigenvector correction.

mod bihom;
mod charpoly;
mod linear;

pub use bihom::{
    bihom_decompose, eigen_exponent, eigenvector_correction, is_ggs, phi_degree, top_component,
    BiHomComponent, EigenCorrection, GgsReport,
};
pub use charpoly::{casimir_family, char_poly_coefficients, generic_matrix, pfaffian};
pub use linear::{invariant_generators, invariants_by_degree, monomials_of_degree};

use serde::Serialize;

use crate::liealg::{Automorphism, PeriodicGrading};
use crate::poisson::{MultiPoly, PoissonError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),
    #[error("generator {generator} does not commute with coordinate {coordinate}")]
    NotCentral { generator: usize, coordinate: usize },
    #[error("the zero polynomial has no top component")]
    ZeroPolynomial,
    #[error("no averaged replacement of generator {0} keeps the family independent")]
    SelectionFailure(usize),
    #[error("Pfaffian squared differs from the determinant")]
    PfaffianMismatch,
    #[error(transparent)]
    Poisson(#[from] PoissonError),
}

/// Homogeneous generators `H_1, …, H_l` of `S(g)^g` in the coordinates of
/// the algebra they were built for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantFamily {
    #[serde(serialize_with = "serialize_polys")]
    pub generators: Vec<MultiPoly>,
    pub degrees: Vec<u32>,
    /// `r_j` with `θ(H_j) = ζ^{r_j} H_j`, once the family is θ-adapted.
    pub eigen_exponents: Option<Vec<u32>>,
}

impl InvariantFamily {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn degree_sum(&self) -> u32 {
        self.degrees.iter().sum()
    }

    /// The generators rewritten in the grading-adapted coordinates.
    pub fn adapted(&self, grading: &PeriodicGrading) -> Vec<MultiPoly> {
        self.generators.iter().map(|f| to_adapted(f, grading)).collect()
    }
}

fn serialize_polys<S: serde::Serializer>(polys: &[MultiPoly], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(polys.iter().map(ToString::to_string))
}

/// `θ` on `S(g)`: `x_j ↦ θ(x_j) = Σ_i A_{ij} x_i`.
pub fn apply_automorphism(f: &MultiPoly, theta: &Automorphism) -> MultiPoly {
    let a = theta.matrix();
    let rows: Vec<Vec<_>> = (0..a.cols()).map(|j| a.col(j)).collect();
    f.substitute_linear(&rows)
}

/// Rewrites `F(x)` in the adapted coordinates, `x_i = Σ_a (P^{-1})_{ai} y_a`.
pub fn to_adapted(f: &MultiPoly, grading: &PeriodicGrading) -> MultiPoly {
    let p_inv = grading.basis_inv();
    let rows: Vec<Vec<_>> = (0..p_inv.cols()).map(|i| p_inv.col(i)).collect();
    f.substitute_linear(&rows)
}

/// Inverse of [`to_adapted`], `y_a = Σ_i P_{ia} x_i`.
pub fn from_adapted(f: &MultiPoly, grading: &PeriodicGrading) -> MultiPoly {
    let p = grading.basis();
    let rows: Vec<Vec<_>> = (0..p.cols()).map(|a| p.col(a)).collect();
    f.substitute_linear(&rows)
}
