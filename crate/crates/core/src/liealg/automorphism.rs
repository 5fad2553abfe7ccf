use std::sync::Arc;

use num_traits::{One, Zero};

use super::classical::matrix_coords;
use super::{direct_sum, homomorphism_violation, AlgebraKind, LieAlgebra, LieError};
use crate::field::{CycloNum, MAX_CONDUCTOR};
use crate::linalg::{Matrix, Vector};

/// A finite-order automorphism, as the matrix whose column `j` holds the
/// coordinates of `θ(x_j)`.
#[derive(Clone, Debug)]
pub struct Automorphism {
    algebra: Arc<LieAlgebra>,
    matrix: Matrix,
    order: u32,
}

impl Automorphism {
    /// Validates bracket and form preservation and determines the order.
    pub fn new(algebra: Arc<LieAlgebra>, matrix: Matrix) -> Result<Automorphism, LieError> {
        let n = algebra.dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(LieError::DimensionMismatch {
                expected: n,
                got: matrix.rows(),
            });
        }
        if let Some((i, j)) = homomorphism_violation(algebra.tensor(), algebra.tensor(), &matrix) {
            return Err(LieError::NotAnAutomorphism(i, j));
        }
        if let Some(g) = algebra.form() {
            if &(&matrix.transpose() * g) * &matrix != *g {
                return Err(LieError::NotFormPreserving);
            }
        }
        let mut power = matrix.clone();
        let mut order = None;
        for k in 1..=MAX_CONDUCTOR {
            if power.is_identity() {
                order = Some(k);
                break;
            }
            power = &power * &matrix;
        }
        let order = order.ok_or(LieError::InfiniteOrder(MAX_CONDUCTOR))?;
        Ok(Automorphism {
            algebra,
            matrix,
            order,
        })
    }

    pub fn identity(algebra: Arc<LieAlgebra>) -> Automorphism {
        let n = algebra.dim();
        Automorphism {
            algebra,
            matrix: Matrix::identity(n),
            order: 1,
        }
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn apply(&self, v: &[CycloNum]) -> Vector {
        self.matrix.mul_vec(v)
    }

    /// `θ^k` as a matrix, `k` reduced modulo the order.
    pub fn power_matrix(&self, k: u32) -> Matrix {
        self.matrix.pow(k % self.order)
    }

    /// Largest conductor among the matrix entries.
    pub fn entry_conductor(&self) -> u32 {
        let mut c = 1;
        for i in 0..self.matrix.rows() {
            for j in 0..self.matrix.cols() {
                let x = &self.matrix[(i, j)];
                if !x.is_rational() {
                    c = num_integer::lcm(c, x.conductor());
                }
            }
        }
        c
    }
}

/// `θ(x_1, …, x_n) = (x_n, x_1, …, x_{n-1})` on `h^n`.
pub fn cyclic_permutation(h: &LieAlgebra, n: usize) -> Result<Automorphism, LieError> {
    if n < 2 {
        return Err(LieError::UnsupportedParameters(
            "cyclic permutation needs at least two copies".into(),
        ));
    }
    let g = Arc::new(direct_sum(h, n)?);
    let d = h.dim();
    let mut m = Matrix::zeros(n * d, n * d);
    for c in 0..n {
        for i in 0..d {
            m[(((c + 1) % n) * d + i, c * d + i)] = CycloNum::one();
        }
    }
    Automorphism::new(g, m)
}

/// `inner` applied to the first copy followed by the cyclic shift of the
/// copies of `h^n`; its order is `n · ord(inner)`.
pub fn twisted_cycle(
    h: &LieAlgebra,
    inner: &Automorphism,
    n: usize,
) -> Result<Automorphism, LieError> {
    let d = h.dim();
    if inner.algebra().dim() != d {
        return Err(LieError::DimensionMismatch {
            expected: d,
            got: inner.algebra().dim(),
        });
    }
    if n == 0 {
        return Err(LieError::UnsupportedParameters("n must be positive".into()));
    }
    let g = Arc::new(direct_sum(h, n)?);
    let mut m = Matrix::zeros(n * d, n * d);
    for i in 0..d {
        let img = inner.matrix().col(i);
        let target = (1 % n) * d;
        for (r, v) in img.into_iter().enumerate() {
            if !v.is_zero() {
                m[(target + r, i)] = v;
            }
        }
    }
    for c in 1..n {
        for i in 0..d {
            m[(((c + 1) % n) * d + i, c * d + i)] = CycloNum::one();
        }
    }
    let theta = Automorphism::new(g, m)?;
    let expected = n as u32 * inner.order();
    if theta.order() != expected {
        return Err(LieError::OrderMismatch {
            expected,
            got: theta.order(),
        });
    }
    Ok(theta)
}

/// Automorphism of a classical algebra induced by a map on its defining
/// matrices.
fn from_matrix_map(
    alg: Arc<LieAlgebra>,
    f: impl Fn(&Matrix) -> Matrix,
) -> Result<Automorphism, LieError> {
    let AlgebraKind::Classical { matrices, .. } = alg.kind() else {
        return Err(LieError::UnsupportedParameters(
            "matrix-induced automorphisms need a classical algebra".into(),
        ));
    };
    let g_inv = alg
        .form()
        .and_then(Matrix::inverse)
        .ok_or_else(|| LieError::UnsupportedParameters("degenerate form".into()))?;
    let d = alg.dim();
    let mut m = Matrix::zeros(d, d);
    for (j, x) in matrices.iter().enumerate() {
        let y = f(x);
        let c = matrix_coords(matrices, &g_inv, &y);
        let mut back = Matrix::zeros(x.rows(), x.cols());
        for (mk, ck) in matrices.iter().zip(&c) {
            if !ck.is_zero() {
                back = back.add(&mk.scale(ck));
            }
        }
        if back != y {
            return Err(LieError::UnsupportedParameters(format!(
                "image of {} leaves the algebra",
                alg.labels()[j]
            )));
        }
        for (i, v) in c.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Automorphism::new(alg, m)
}

/// `X ↦ -X^T` on `sl_n` or `sp_n`.
pub fn cartan_involution(alg: Arc<LieAlgebra>) -> Result<Automorphism, LieError> {
    let theta = from_matrix_map(alg, |x| x.transpose().scale(&CycloNum::from(-1)))?;
    if theta.order() != 2 {
        return Err(LieError::UnsupportedParameters(
            "X -> -X^T is trivial on this algebra".into(),
        ));
    }
    Ok(theta)
}

/// Inner automorphism `X ↦ g X g^{-1}` of a classical algebra.
pub fn conjugation(alg: Arc<LieAlgebra>, g: &Matrix) -> Result<Automorphism, LieError> {
    let g_inv = g
        .inverse()
        .ok_or_else(|| LieError::UnsupportedParameters("conjugating matrix is singular".into()))?;
    from_matrix_map(alg, |x| &(g * x) * &g_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::zeta;
    use crate::liealg::{build_classical, Family};

    fn sl(n: usize) -> LieAlgebra {
        build_classical(Family::Sl, n).unwrap()
    }

    #[test]
    fn permutation_orders() {
        assert_eq!(cyclic_permutation(&sl(2), 2).unwrap().order(), 2);
        let c3 = cyclic_permutation(&sl(2), 3).unwrap();
        assert_eq!(c3.order(), 3);
        // (x, y, z) -> (z, x, y): copy 1 lands in copy 2.
        let v = c3.apply(&c3.algebra().basis_vector(0));
        assert!(v[3].is_one());
    }

    #[test]
    fn cartan_involution_on_sl2() {
        let theta = cartan_involution(Arc::new(sl(2))).unwrap();
        let m = theta.matrix();
        // e -> -f, h -> -h, f -> -e
        assert_eq!(m[(2, 0)], CycloNum::from(-1));
        assert_eq!(m[(1, 1)], CycloNum::from(-1));
        assert_eq!(m[(0, 2)], CycloNum::from(-1));
        let so = Arc::new(build_classical(Family::So, 3).unwrap());
        assert!(cartan_involution(so).is_err());
    }

    #[test]
    fn twisted_cycle_order() {
        let h = sl(2);
        let inner = cartan_involution(Arc::new(h.clone())).unwrap();
        assert_eq!(twisted_cycle(&h, &inner, 2).unwrap().order(), 4);
        let one = twisted_cycle(&h, &inner, 1).unwrap();
        assert_eq!(one.matrix(), inner.matrix());
    }

    #[test]
    fn conjugation_by_torus_element() {
        let i4 = zeta(4);
        let g = Matrix::from_rows(vec![
            vec![i4.clone(), CycloNum::zero()],
            vec![CycloNum::zero(), -&i4],
        ]);
        let theta = conjugation(Arc::new(sl(2)), &g).unwrap();
        assert_eq!(theta.order(), 2);
        assert_eq!(theta.matrix()[(0, 0)], CycloNum::from(-1));
        assert!(theta.matrix()[(1, 1)].is_one());
    }

    #[test]
    fn rejects_non_automorphism() {
        let alg = Arc::new(sl(2));
        let mut m = Matrix::identity(3);
        m[(0, 0)] = CycloNum::from(2);
        assert!(matches!(
            Automorphism::new(alg, m),
            Err(LieError::NotAnAutomorphism(..)) | Err(LieError::NotFormPreserving)
        ));
    }
}
