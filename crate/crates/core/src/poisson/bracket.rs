use std::collections::HashMap;

use super::{Monomial, MultiPoly, PoissonError, StructureTensor};
use crate::field::CycloNum;
use crate::linalg::{Matrix, Vector};

/// Largest admissible `|F| · |G|` for a single bracket.
pub const BRACKET_TERM_BUDGET: usize = 1_000_000;

/// `{F, G} = Σ_{i<j} (∂_i F ∂_j G − ∂_j F ∂_i G) {x_i, x_j}`.
pub fn poisson_bracket(
    f: &MultiPoly,
    g: &MultiPoly,
    pi: &StructureTensor,
) -> Result<MultiPoly, PoissonError> {
    let n = pi.nvars();
    for p in [f, g] {
        if p.nvars() != n {
            return Err(PoissonError::DimensionMismatch {
                expected: n,
                got: p.nvars(),
            });
        }
    }
    let work = f.num_terms().saturating_mul(g.num_terms());
    if work > BRACKET_TERM_BUDGET {
        return Err(PoissonError::TooLarge {
            work,
            budget: BRACKET_TERM_BUDGET,
        });
    }
    if f.is_zero() || g.is_zero() {
        return Ok(MultiPoly::zero(n));
    }
    let df: Vec<MultiPoly> = (0..n).map(|i| f.derivative(i)).collect();
    let dg: Vec<MultiPoly> = (0..n).map(|i| g.derivative(i)).collect();
    let mut acc: HashMap<Monomial, CycloNum> = HashMap::new();
    let mut push = |a: &MultiPoly, b: &MultiPoly, form: &[(usize, CycloNum)], neg: bool| {
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let base = ma.mul(mb);
                let mut prod = ca * cb;
                if neg {
                    prod = -prod;
                }
                for (k, c) in form {
                    let m = base.times_var(*k);
                    let v = &prod * c;
                    match acc.get_mut(&m) {
                        Some(e) => *e += &v,
                        None => {
                            acc.insert(m, v);
                        }
                    }
                }
            }
        }
    };
    for (&(i, j), form) in pi.entries() {
        if !df[i].is_zero() && !dg[j].is_zero() {
            push(&df[i], &dg[j], form, false);
        }
        if !df[j].is_zero() && !dg[i].is_zero() {
            push(&df[j], &dg[i], form, true);
        }
    }
    Ok(MultiPoly::from_map(n, acc))
}

/// Gradient of `F` at a point.
pub fn differential(f: &MultiPoly, at: &[CycloNum]) -> Vector {
    (0..f.nvars()).map(|i| f.derivative(i).eval(at)).collect()
}

/// Rank of the stacked gradients at a point.
pub fn jacobian_rank(polys: &[MultiPoly], at: &[CycloNum]) -> usize {
    if polys.is_empty() {
        return 0;
    }
    let rows: Vec<Vector> = polys.iter().map(|p| differential(p, at)).collect();
    Matrix::from_rows(rows).rank()
}

/// `s^(s_power) · Σ_terms s^⟨weights, exponent⟩ c·x^e` at a concrete `s`.
pub fn scale_action(f: &MultiPoly, weights: &[i64], s: &CycloNum, s_power: i64) -> MultiPoly {
    assert_eq!(weights.len(), f.nvars(), "one weight per variable");
    let mut cache: HashMap<i64, CycloNum> = HashMap::new();
    let terms: Vec<(Monomial, CycloNum)> = f
        .terms()
        .map(|(m, c)| {
            let w = m.weight(weights) + s_power;
            let sw = cache
                .entry(w)
                .or_insert_with(|| s.pow(w).expect("s must be nonzero"));
            (m.clone(), c * &*sw)
        })
        .collect();
    MultiPoly::from_terms(f.nvars(), terms)
}

/// Checks `{F, x_i} = 0` for every coordinate; returns the first failing index.
pub fn centrality_violation(
    f: &MultiPoly,
    pi: &StructureTensor,
) -> Result<Option<usize>, PoissonError> {
    for i in 0..pi.nvars() {
        let x = MultiPoly::var(pi.nvars(), i);
        if !poisson_bracket(f, &x, pi)?.is_zero() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// `{F, v}` for a vector `v` of coordinates, i.e. the linear function `Σ v_i x_i`.
pub fn bracket_with_vector(
    f: &MultiPoly,
    v: &[CycloNum],
    pi: &StructureTensor,
) -> Result<MultiPoly, PoissonError> {
    let lin = MultiPoly::linear(pi.nvars(), v);
    if lin.is_zero() {
        return Ok(MultiPoly::zero(pi.nvars()));
    }
    poisson_bracket(f, &lin, pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_classical, Family};

    #[test]
    fn sl2_bracket_and_casimir() {
        let g = build_classical(Family::Sl, 2).unwrap();
        let t = g.tensor();
        let x = |i| MultiPoly::var(3, i);
        assert_eq!(poisson_bracket(&x(0), &x(2), t).unwrap(), x(1));
        // h^2/4 + ef is central (up to scale: h^2 + 4ef).
        let c = &x(1).pow(2) + &(&x(0) * &x(2)).scale(&CycloNum::from(4));
        assert_eq!(centrality_violation(&c, t).unwrap(), None);
    }

    #[test]
    fn gradient_rank() {
        let x = |i| MultiPoly::var(3, i);
        let polys = [x(0), x(1), &x(0) + &x(1)];
        let pt = vec![CycloNum::from(2); 3];
        assert_eq!(jacobian_rank(&polys, &pt), 2);
        let sq = x(0).pow(2);
        assert_eq!(differential(&sq, &[CycloNum::from(3), CycloNum::from(0), CycloNum::from(0)])[0], CycloNum::from(6));
    }

    #[test]
    fn scale_by_weights() {
        let x = |i| MultiPoly::var(2, i);
        let f = &x(0).pow(2) + &x(1);
        let s = CycloNum::from(2);
        let out = scale_action(&f, &[1, 0], &s, 0);
        assert_eq!(out, &x(0).pow(2).scale(&CycloNum::from(4)) + &x(1));
        assert_eq!(scale_action(&f, &[0, 0], &s, 0), f);
    }
}
