//! Sparse polynomials over `Q(ζ_m)`, Lie–Poisson brackets for arbitrary
//! structure tensors, differentials, Jacobian ranks and the minor-gcd test.

mod bracket;
mod gcd;
mod poly;
mod tensor;

pub use bracket::{
    bracket_with_vector, centrality_violation, differential, jacobian_rank, poisson_bracket,
    scale_action, BRACKET_TERM_BUDGET,
};
pub use gcd::{div_exact, gcd, minor_gcd, poly_det, symbolic_rank, MinorGcd};
pub use poly::{monomial_support, Monomial, MultiPoly};
pub use tensor::{LinearForm, StructureTensor};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PoissonError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("bracket work {work} exceeds the term budget {budget}")]
    TooLarge { work: usize, budget: usize },
    #[error("minor budget exhausted after {examined} minors")]
    BudgetExhausted {
        examined: usize,
        partial: Box<MultiPoly>,
    },
    #[error("malformed polynomial: {0}")]
    Parse(String),
}

pub(crate) fn serialize_poly<S: serde::Serializer>(p: &MultiPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}
