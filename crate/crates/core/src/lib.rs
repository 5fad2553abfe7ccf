//! Exact computations with periodic gradings of Lie algebras: bracket
//! pencils and their contractions, indices, symmetric invariants and their
//! bi-homogeneous components, and certified Poisson-commutative subalgebras.

pub mod field;
pub mod invariants;
pub mod liealg;
pub mod linalg;
pub mod pencil;
pub mod poisson;
pub mod zalgebra;

pub use field::{zeta, CycloNum, FieldError, Rational, ScalarRng};
pub use invariants::InvariantFamily;
pub use liealg::{Automorphism, Family, LieAlgebra, PeriodicGrading};
pub use linalg::{Matrix, Vector};
pub use pencil::{BracketPencil, IndexReport, ParamValue};
pub use poisson::{MultiPoly, StructureTensor};
pub use zalgebra::{CommutativityCertificate, ZGeneratorSet};
