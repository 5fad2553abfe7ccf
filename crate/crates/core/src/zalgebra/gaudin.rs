use num_traits::Zero;

use super::ZError;
use crate::field::CycloNum;
use crate::liealg::{LieAlgebra, PeriodicGrading};
use crate::linalg::{Matrix, Vector};
use crate::poisson::MultiPoly;

/// `Σ_{a,b} (G^{-1})_{ab} x_a^{(k)} x_b^{(j)}` in `S(h^n)`, from a basis of
/// `h` listed in the order `perm` (dual bases of the invariant form).
fn split_casimir_in(h: &LieAlgebra, n: usize, k: usize, j: usize, perm: &[usize]) -> Result<MultiPoly, ZError> {
    let d = h.dim();
    let form = h
        .form()
        .ok_or_else(|| ZError::UnsupportedTheta("Gaudin Hamiltonians need an invariant form".into()))?;
    let g = Matrix::from_fn(d, d, |a, b| form[(perm[a], perm[b])].clone());
    let g_inv = g
        .inverse()
        .ok_or_else(|| ZError::UnsupportedTheta("degenerate invariant form".into()))?;
    let nv = n * d;
    let mut out = MultiPoly::zero(nv);
    for a in 0..d {
        for b in 0..d {
            let c = &g_inv[(a, b)];
            if c.is_zero() {
                continue;
            }
            let term = &MultiPoly::var(nv, k * d + perm[a]) * &MultiPoly::var(nv, j * d + perm[b]);
            out.add_assign_scaled(&term, c);
        }
    }
    Ok(out)
}

/// The split Casimir between copies `k` and `j`; recomputed from the
/// reversed basis to confirm it does not depend on the basis.
pub fn split_casimir(h: &LieAlgebra, n: usize, k: usize, j: usize) -> Result<MultiPoly, ZError> {
    let d = h.dim();
    let id: Vec<usize> = (0..d).collect();
    let rev: Vec<usize> = (0..d).rev().collect();
    let a = split_casimir_in(h, n, k, j, &id)?;
    let b = split_casimir_in(h, n, k, j, &rev)?;
    assert_eq!(a, b, "split Casimir depends on the basis");
    Ok(a)
}

/// `H_k = Σ_{j≠k} Ω^{(k,j)} / (z_k − z_j)` in the original coordinates of `h^n`.
pub fn gaudin_hamiltonians(h: &LieAlgebra, z: &[CycloNum]) -> Result<Vec<MultiPoly>, ZError> {
    let n = z.len();
    for i in 0..n {
        for j in 0..i {
            if z[i] == z[j] {
                return Err(ZError::RepeatedParameters);
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut hk = MultiPoly::zero(n * h.dim());
        for j in (0..n).filter(|&j| j != k) {
            let w = (&z[k] - &z[j]).inv().map_err(|_| ZError::RepeatedParameters)?;
            hk.add_assign_scaled(&split_casimir(h, n, k, j)?, &w);
        }
        out.push(hk);
    }
    Ok(out)
}

/// `z_k = ζ^{1−k}`, `k = 1..n`, with `ζ` a primitive `n`-th root of unity.
pub fn gaudin_points(n: usize) -> Vec<CycloNum> {
    (0..n).map(|k| CycloNum::zeta_pow(n as u32, -(k as i64))).collect()
}

/// `ρ_z(x t^{−a}) = Σ_k z_k^{−a} x^{(k)}` for the basis vector `x` of `h`.
pub fn rho_symbol(a: i64, x: usize, d: usize, z: &[CycloNum]) -> Vector {
    let n = z.len();
    let mut v = vec![CycloNum::zero(); n * d];
    for (k, zk) in z.iter().enumerate() {
        v[k * d + x] = zk.pow(-a).expect("nonzero Gaudin parameter");
    }
    v
}

/// The grade `n − j` (mod `n`) of `ρ_z(x t^{−a})` for `a ≡ j`, `1 ≤ j ≤ n`,
/// when `z = gaudin_points(n)`; `None` if the symbol is not homogeneous
/// of that grade for the cyclic grading.
pub fn rho_grade(grading: &PeriodicGrading, a: i64, x: usize, d: usize) -> Option<u32> {
    let n = grading.m() as i64;
    let z = gaudin_points(n as usize);
    let v = rho_symbol(a, x, d, &z);
    let j = (a - 1).rem_euclid(n) + 1;
    let grade = ((n - j) % n) as u32;
    (grading.project(&v, grade) == v).then_some(grade)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_classical, cyclic_permutation, eigenspace_grading, Family};
    use crate::poisson::{bracket_with_vector, poisson_bracket};
    use crate::liealg::direct_sum;

    fn sl2() -> LieAlgebra {
        build_classical(Family::Sl, 2).unwrap()
    }

    #[test]
    fn two_points() {
        let h = sl2();
        let hs = gaudin_hamiltonians(&h, &[CycloNum::from(1), CycloNum::from(-1)]).unwrap();
        assert_eq!(hs[0], -&hs[1]);
        let half = CycloNum::from(crate::field::rat(1, 2));
        assert_eq!(hs[0], split_casimir(&h, 2, 0, 1).unwrap().scale(&half));
        assert!(matches!(
            gaudin_hamiltonians(&h, &[CycloNum::from(2), CycloNum::from(2)]),
            Err(ZError::RepeatedParameters)
        ));
    }

    #[test]
    fn three_points_commute() {
        let h = sl2();
        let g = direct_sum(&h, 3).unwrap();
        let hs = gaudin_hamiltonians(&h, &gaudin_points(3)).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert!(poisson_bracket(&hs[a], &hs[b], g.tensor()).unwrap().is_zero());
            }
            for x in 0..3 {
                let diag: Vec<CycloNum> = (0..9).map(|i| CycloNum::from((i % 3 == x) as i64)).collect();
                assert!(bracket_with_vector(&hs[a], &diag, g.tensor()).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn rho_grades() {
        let h = sl2();
        for n in [2usize, 3] {
            let gr = eigenspace_grading(&cyclic_permutation(&h, n).unwrap()).unwrap();
            for a in 1..=(3 * n as i64) {
                for x in 0..3 {
                    let j = (a - 1).rem_euclid(n as i64) + 1;
                    assert_eq!(rho_grade(&gr, a, x, 3), Some(((n as i64 - j) % n as i64) as u32));
                }
            }
        }
        let z = gaudin_points(2);
        let v = rho_symbol(1, 0, 3, &z);
        assert_eq!(v[0], CycloNum::from(1));
        assert_eq!(v[3], CycloNum::from(-1));
        let diag = rho_symbol(2, 1, 3, &z);
        assert!(diag.iter().enumerate().all(|(i, c)| *c == CycloNum::from((i % 3 == 1) as i64)));
    }
}
