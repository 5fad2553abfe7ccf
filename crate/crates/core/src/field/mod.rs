//! Exact scalars: rationals and elements of the cyclotomic fields `Q(ζ_m)`.
//!
//! Every downstream computation (structure constants, eigenspaces,
//! polynomial coefficients) is carried out over [`CycloNum`]. Values carry
//! their conductor; rationals (conductor 1 or 2) coerce into any field, all
//! other mixed-conductor arithmetic is rejected.

mod cyclotomic;
mod rng;
mod upoly;

pub use cyclotomic::{cyclotomic_polynomial, euler_phi, zeta, CycloNum, MAX_CONDUCTOR};
pub use rng::{random_scalar, ScalarRng};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("conductor mismatch: Q(zeta_{0}) vs Q(zeta_{1})")]
    ConductorMismatch(u32, u32),
    #[error("unsupported conductor {0} (supported: 1..={max})", max = MAX_CONDUCTOR)]
    UnsupportedConductor(u32),
    #[error("cannot embed Q(zeta_{from}) into Q(zeta_{to}): {from} does not divide {to}")]
    NotASubfield { from: u32, to: u32 },
    #[error("malformed scalar `{0}`")]
    Parse(String),
}
