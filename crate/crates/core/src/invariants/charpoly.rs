use num_traits::Zero;

use super::{InvariantError, InvariantFamily};
use crate::field::{rat, CycloNum};
use crate::liealg::{AlgebraKind, Family, LieAlgebra};
use crate::linalg::Matrix;
use crate::poisson::{centrality_violation, MultiPoly};

type PolyMatrix = Vec<Vec<MultiPoly>>;

/// `X = Σ_j u_j M_j` with `u = G^{-1} x`: the element of `g` paired with a
/// generic point `ξ ∈ g*` through the invariant form.
pub fn generic_matrix(mats: &[Matrix], form: &Matrix) -> Result<PolyMatrix, InvariantError> {
    let g_inv = form
        .inverse()
        .ok_or_else(|| InvariantError::UnsupportedAlgebra("degenerate invariant form".into()))?;
    let d = mats.len();
    let size = mats.first().map_or(0, Matrix::rows);
    let u: Vec<MultiPoly> = (0..d)
        .map(|j| MultiPoly::linear(d, g_inv.row(j)))
        .collect();
    let mut x = vec![vec![MultiPoly::zero(d); size]; size];
    for (mj, uj) in mats.iter().zip(&u) {
        for (r, row) in x.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                let v = &mj[(r, c)];
                if !v.is_zero() {
                    entry.add_assign_scaled(uj, v);
                }
            }
        }
    }
    Ok(x)
}

fn mat_mul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let n = a.len();
    let nv = a[0][0].nvars();
    let mut out = vec![vec![MultiPoly::zero(nv); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] = &out[i][j] + &(&a[i][k] * &b[k][j]);
                }
            }
        }
    }
    out
}

/// `c_1, …, c_N` with `det(λ − X) = λ^N + c_1 λ^{N-1} + … + c_N`, by the
/// Faddeev–LeVerrier recursion `M_k = X M_{k-1} + c_{k-1}`, `c_k = −tr(X M_k)/k`.
pub fn char_poly_coefficients(x: &PolyMatrix) -> Vec<MultiPoly> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let nv = x[0][0].nvars();
    let mut m: PolyMatrix = vec![vec![MultiPoly::zero(nv); n]; n];
    let mut c_prev = MultiPoly::one(nv);
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let mut next = mat_mul(x, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = &row[i] + &c_prev;
        }
        m = next;
        let xm = mat_mul(x, &m);
        let mut tr = MultiPoly::zero(nv);
        for (i, row) in xm.iter().enumerate() {
            tr = &tr + &row[i];
        }
        let c = tr.scale(&CycloNum::from(rat(-1, k as i64)));
        out.push(c.clone());
        c_prev = c;
    }
    out
}

/// Pfaffian of a skew-symmetric matrix by expansion along the first row.
pub fn pfaffian(x: &PolyMatrix) -> MultiPoly {
    let nv = x.first().and_then(|r| r.first()).map_or(0, MultiPoly::nvars);
    let idx: Vec<usize> = (0..x.len()).collect();
    pf_rec(x, &idx, nv)
}

fn pf_rec(x: &PolyMatrix, idx: &[usize], nv: usize) -> MultiPoly {
    if idx.is_empty() {
        return MultiPoly::one(nv);
    }
    if idx.len() % 2 == 1 {
        return MultiPoly::zero(nv);
    }
    let first = idx[0];
    let mut acc = MultiPoly::zero(nv);
    for p in 1..idx.len() {
        let a = &x[first][idx[p]];
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|&(q, _)| q + 1 != p)
            .map(|(_, &i)| i)
            .collect();
        let term = a * &pf_rec(x, &rest, nv);
        if p % 2 == 1 {
            acc = &acc + &term;
        } else {
            acc = &acc - &term;
        }
    }
    acc
}

/// Generators of `S(g)^g` from the characteristic polynomial of the generic
/// element: `c_2, …, c_n` for `sl_n`; the even coefficients for `sp_n` and
/// `so_n`, with the Pfaffian replacing `c_n` for even `n`. Direct sums get
/// the union of the per-copy families in copy order.
pub fn casimir_family(g: &LieAlgebra) -> Result<InvariantFamily, InvariantError> {
    let (generators, degrees) = match g.kind() {
        AlgebraKind::Classical {
            family,
            n,
            matrices,
        } => {
            let form = g
                .form()
                .ok_or_else(|| InvariantError::UnsupportedAlgebra("missing invariant form".into()))?;
            let x = generic_matrix(matrices, form)?;
            let coeffs = char_poly_coefficients(&x);
            let n = *n;
            let mut gens = Vec::new();
            let mut degs = Vec::new();
            match family {
                Family::Sl => {
                    for k in 2..=n {
                        gens.push(coeffs[k - 1].clone());
                        degs.push(k as u32);
                    }
                }
                Family::Sp => {
                    for k in (2..=n).step_by(2) {
                        gens.push(coeffs[k - 1].clone());
                        degs.push(k as u32);
                    }
                }
                Family::So => {
                    let top = if n % 2 == 0 { n - 2 } else { n - 1 };
                    for k in (2..=top).step_by(2) {
                        gens.push(coeffs[k - 1].clone());
                        degs.push(k as u32);
                    }
                    if n % 2 == 0 {
                        let pf = pfaffian(&x);
                        if pf.pow(2) != coeffs[n - 1] {
                            return Err(InvariantError::PfaffianMismatch);
                        }
                        gens.push(pf);
                        degs.push((n / 2) as u32);
                    }
                }
            }
            (gens, degs)
        }
        AlgebraKind::DirectSum { base, copies } => {
            let fam = casimir_family(base)?;
            let d = base.dim();
            let mut gens = Vec::new();
            let mut degs = Vec::new();
            for c in 0..*copies {
                for (f, deg) in fam.generators.iter().zip(&fam.degrees) {
                    gens.push(f.shift_vars(g.dim(), c * d));
                    degs.push(*deg);
                }
            }
            (gens, degs)
        }
        AlgebraKind::Raw => {
            return Err(InvariantError::UnsupportedAlgebra(
                "invariant generators need a classical algebra or a direct sum of copies".into(),
            ))
        }
    };
    for (j, f) in generators.iter().enumerate() {
        if let Some(i) = centrality_violation(f, g.tensor())? {
            return Err(InvariantError::NotCentral {
                generator: j,
                coordinate: i,
            });
        }
        debug_assert!(f.is_homogeneous());
    }
    Ok(InvariantFamily {
        generators,
        degrees,
        eigen_exponents: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_classical, direct_sum};

    fn family(f: Family, n: usize) -> InvariantFamily {
        casimir_family(&build_classical(f, n).unwrap()).unwrap()
    }

    #[test]
    fn degrees() {
        assert_eq!(family(Family::Sl, 2).degrees, vec![2]);
        assert_eq!(family(Family::Sl, 3).degrees, vec![2, 3]);
        assert_eq!(family(Family::Sl, 3).degree_sum(), 5);
        assert_eq!(family(Family::So, 5).degrees, vec![2, 4]);
        assert_eq!(family(Family::So, 4).degrees, vec![2, 2]);
        assert_eq!(family(Family::Sp, 4).degrees, vec![2, 4]);
        for fam in [family(Family::Sl, 3), family(Family::Sp, 4)] {
            for (f, d) in fam.generators.iter().zip(&fam.degrees) {
                assert_eq!(f.degree(), Some(*d));
            }
        }
    }

    #[test]
    fn two_copies() {
        let g = direct_sum(&build_classical(Family::Sl, 2).unwrap(), 2).unwrap();
        let fam = casimir_family(&g).unwrap();
        assert_eq!(fam.degrees, vec![2, 2]);
        assert!(fam.generators[0].terms().all(|(m, _)| m.exps()[3..].iter().all(|&e| e == 0)));
    }

    #[test]
    fn raw_rejected() {
        let g = build_classical(Family::Sl, 2).unwrap();
        let raw = LieAlgebra::new(g.labels().to_vec(), g.tensor().clone(), None).unwrap();
        assert!(matches!(casimir_family(&raw), Err(InvariantError::UnsupportedAlgebra(_))));
    }
}
