//! Lie algebras by structure constants, the classical families, finite-order
//! automorphisms and their eigenspace gradings.

mod automorphism;
mod classical;
mod grading;

pub use automorphism::{
    cartan_involution, conjugation, cyclic_permutation, twisted_cycle, Automorphism,
};
pub use classical::{build_classical, direct_sum, Family};
pub use grading::{eigenspace_grading, fixed_subalgebra, PeriodicGrading};

use crate::field::FieldError;
use crate::linalg::{Matrix, Vector};
use crate::poisson::StructureTensor;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LieError {
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),
    #[error("Jacobi identity fails on basis triple ({0}, {1}, {2})")]
    JacobiViolation(usize, usize, usize),
    #[error("bilinear form is not symmetric")]
    FormNotSymmetric,
    #[error("bilinear form is not invariant under ad of basis vector {0}")]
    FormNotInvariant(usize),
    #[error("matrix does not preserve the bracket on basis pair ({0}, {1})")]
    NotAnAutomorphism(usize, usize),
    #[error("matrix does not preserve the invariant form")]
    NotFormPreserving,
    #[error("automorphism has no finite order up to {0}")]
    InfiniteOrder(u32),
    #[error("automorphism order {got} differs from expected {expected}")]
    OrderMismatch { expected: u32, got: u32 },
    #[error("grading failure: {0}")]
    GradingFailure(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// How an algebra was produced; the invariant-theoretic layer needs the
/// matrix realization of the classical families.
#[derive(Clone, Debug)]
pub enum AlgebraKind {
    Classical {
        family: Family,
        n: usize,
        /// Defining-representation matrix of each basis vector.
        matrices: Vec<Matrix>,
    },
    DirectSum {
        base: Box<LieAlgebra>,
        copies: usize,
    },
    Raw,
}

/// A finite-dimensional Lie algebra over `Q(ζ_m)`.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    labels: Vec<String>,
    tensor: StructureTensor,
    form: Option<Matrix>,
    rank: Option<usize>,
    kind: AlgebraKind,
}

impl LieAlgebra {
    /// Validates Jacobi and, if given, symmetry and invariance of the form.
    pub fn new(
        labels: Vec<String>,
        tensor: StructureTensor,
        form: Option<Matrix>,
    ) -> Result<LieAlgebra, LieError> {
        let alg = LieAlgebra {
            labels,
            tensor,
            form,
            rank: None,
            kind: AlgebraKind::Raw,
        };
        alg.validate()?;
        Ok(alg)
    }

    /// Constructor for callers that have already established the axioms,
    /// e.g. contractions of a validated algebra.
    pub(crate) fn new_unchecked(
        labels: Vec<String>,
        tensor: StructureTensor,
        form: Option<Matrix>,
        rank: Option<usize>,
        kind: AlgebraKind,
    ) -> LieAlgebra {
        LieAlgebra {
            labels,
            tensor,
            form,
            rank,
            kind,
        }
    }

    pub fn validate(&self) -> Result<(), LieError> {
        let n = self.dim();
        if self.labels.len() != n {
            return Err(LieError::DimensionMismatch {
                expected: n,
                got: self.labels.len(),
            });
        }
        if let Some((i, j, k)) = self.tensor.jacobi_violation() {
            return Err(LieError::JacobiViolation(i, j, k));
        }
        if let Some(g) = &self.form {
            if g.rows() != n || g.cols() != n {
                return Err(LieError::DimensionMismatch {
                    expected: n,
                    got: g.rows(),
                });
            }
            if *g != g.transpose() {
                return Err(LieError::FormNotSymmetric);
            }
            for i in 0..n {
                let ad = self.tensor.ad(i);
                let lhs = (&ad.transpose() * g).add(&(g * &ad));
                if !lhs.is_zero() {
                    return Err(LieError::FormNotInvariant(i));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.tensor.nvars()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tensor(&self) -> &StructureTensor {
        &self.tensor
    }

    pub fn form(&self) -> Option<&Matrix> {
        self.form.as_ref()
    }

    /// Rank, when known from the construction (classical families and their
    /// direct sums).
    pub fn rank(&self) -> Option<usize> {
        self.rank
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn with_rank(mut self, rank: usize) -> LieAlgebra {
        self.rank = Some(rank);
        self
    }

    pub fn bracket(&self, x: &[crate::field::CycloNum], y: &[crate::field::CycloNum]) -> Vector {
        self.tensor.bracket(x, y)
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = vec![crate::field::CycloNum::zero(); self.dim()];
        v[i] = crate::field::CycloNum::from(1);
        v
    }

    /// True when every bracket vanishes.
    pub fn is_abelian(&self) -> bool {
        self.tensor.is_zero()
    }
}

/// Checks that `map` (columns = images of the basis of `a`, in coordinates
/// of `b`) is a Lie algebra homomorphism. Returns the first failing pair.
pub fn homomorphism_violation(
    a: &StructureTensor,
    b: &StructureTensor,
    map: &Matrix,
) -> Option<(usize, usize)> {
    let n = a.nvars();
    let images: Vec<Vector> = (0..n).map(|i| map.col(i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let mut lhs = vec![crate::field::CycloNum::zero(); b.nvars()];
            for (k, c) in a.get(i, j) {
                for (r, v) in images[k].iter().enumerate() {
                    lhs[r] += &(&c * v);
                }
            }
            let rhs = b.bracket(&images[i], &images[j]);
            if lhs != rhs {
                return Some((i, j));
            }
        }
    }
    None
}
