use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::{Monomial, MultiPoly, PoissonError};
use crate::field::{CycloNum, ScalarRng};

/// `a / b` when `b` divides `a` exactly, `None` otherwise.
pub fn div_exact(a: &MultiPoly, b: &MultiPoly) -> Option<MultiPoly> {
    assert!(!b.is_zero(), "division by the zero polynomial");
    let n = a.nvars();
    let (lm, lc) = b.leading().map(|(m, c)| (m.clone(), c.clone()))?;
    let lc_inv = lc.inv().ok()?;
    let mut r = a.clone();
    let mut q = MultiPoly::zero(n);
    while let Some((rm, rc)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
        if !lm.divides(&rm) {
            return None;
        }
        let t = lm.quotient_of(&rm);
        let c = &rc * &lc_inv;
        q.add_assign_scaled(&MultiPoly::from_terms(n, [(t.clone(), CycloNum::one())]), &c);
        r.add_assign_scaled(&b.mul_monomial(&t, &CycloNum::one()), &(-&c));
    }
    Some(q)
}

/// `F = Σ_k c_k(x') x_v^k` as a map `k ↦ c_k`.
fn coefficients_in(p: &MultiPoly, v: usize) -> BTreeMap<u16, MultiPoly> {
    let n = p.nvars();
    let mut out: BTreeMap<u16, Vec<(Monomial, CycloNum)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut exps = m.exps().to_vec();
        let k = exps[v];
        exps[v] = 0;
        out.entry(k)
            .or_default()
            .push((Monomial::from_exps(exps), c.clone()));
    }
    out.into_iter()
        .map(|(k, t)| (k, MultiPoly::from_terms(n, t)))
        .collect()
}

fn var_power(n: usize, v: usize, k: u16) -> Monomial {
    let mut e = vec![0u16; n];
    e[v] = k;
    Monomial::from_exps(e)
}

fn lowest_var(polys: &[&MultiPoly]) -> Option<usize> {
    let n = polys.first()?.nvars();
    (0..n).find(|&v| polys.iter().any(|p| p.degree_in(v).unwrap_or(0) > 0))
}

/// Content of `p` with respect to `x_v`.
fn content(p: &MultiPoly, v: usize) -> MultiPoly {
    let coeffs = coefficients_in(p, v);
    let mut g = MultiPoly::zero(p.nvars());
    for c in coeffs.values() {
        g = gcd(&g, c);
        if g.is_constant() {
            return MultiPoly::one(p.nvars());
        }
    }
    g
}

fn primitive_part(p: &MultiPoly, v: usize) -> MultiPoly {
    let c = content(p, v);
    div_exact(p, &c).expect("content divides")
}

/// Pseudo-remainder of `a` by `b` with respect to `x_v`.
fn prem(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let n = a.nvars();
    let db = b.degree_in(v).unwrap_or(0);
    let lb = coefficients_in(b, v).remove(&db).expect("leading coefficient");
    let mut r = a.clone();
    loop {
        let dr = match r.degree_in(v) {
            Some(d) if !r.is_zero() && d >= db => d,
            _ => return r,
        };
        let lr = coefficients_in(&r, v).remove(&dr).expect("leading coefficient");
        let shift = var_power(n, v, dr - db);
        r = &(&lb * &r) - &(&lr * &b.mul_monomial(&shift, &CycloNum::one()));
    }
}

/// Greatest common divisor, normalized to leading coefficient 1 in
/// graded-lex order (`gcd(0, 0) = 0`).
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let n = a.nvars();
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(n);
    }
    let Some(v) = lowest_var(&[a, b]) else {
        return MultiPoly::one(n);
    };
    let ca = content(a, v);
    let cb = content(b, v);
    let c = gcd(&ca, &cb);
    let mut r0 = div_exact(a, &ca).expect("content divides");
    let mut r1 = div_exact(b, &cb).expect("content divides");
    if r0.degree_in(v) < r1.degree_in(v) {
        std::mem::swap(&mut r0, &mut r1);
    }
    while !r1.is_zero() && r1.degree_in(v).unwrap_or(0) > 0 {
        let r = prem(&r0, &r1, v);
        r0 = r1;
        r1 = if r.is_zero() { r } else { primitive_part(&r, v) };
    }
    let g = if r1.is_zero() {
        primitive_part(&r0, v)
    } else {
        MultiPoly::one(n)
    };
    (&g * &c).monic()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn poly_det(mut m: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let k = m.len();
    let nv = m.first().and_then(|r| r.first()).map_or(0, MultiPoly::nvars);
    if k == 0 {
        return MultiPoly::one(nv);
    }
    let mut sign = false;
    let mut prev = MultiPoly::one(nv);
    for c in 0..k {
        let Some(p) = (c..k)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| m[i][c].num_terms())
        else {
            return MultiPoly::zero(nv);
        };
        if p != c {
            m.swap(p, c);
            sign = !sign;
        }
        for i in c + 1..k {
            for j in c + 1..k {
                let num = &(&m[c][c] * &m[i][j]) - &(&m[i][c] * &m[c][j]);
                m[i][j] = div_exact(&num, &prev).expect("Bareiss division is exact");
            }
            m[i][c] = MultiPoly::zero(nv);
        }
        prev = m[c][c].clone();
    }
    let d = m[k - 1][k - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Rank of a polynomial matrix over the rational function field, by
/// fraction-free elimination with full pivoting.
pub fn symbolic_rank(mut m: Vec<Vec<MultiPoly>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let nv = m.first().and_then(|r| r.first()).map_or(0, MultiPoly::nvars);
    let mut prev = MultiPoly::one(nv);
    let mut rank = 0;
    while rank < rows.min(cols) {
        let k = rank;
        let mut best: Option<(usize, usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                let t = m[i][j].num_terms();
                if t > 0 && best.is_none_or(|(_, _, bt)| t < bt) {
                    best = Some((i, j, t));
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        m.swap(pi, k);
        for row in m.iter_mut() {
            row.swap(pj, k);
        }
        for i in k + 1..rows {
            for j in k + 1..cols {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = div_exact(&num, &prev).expect("Bareiss division is exact");
            }
            m[i][k] = MultiPoly::zero(nv);
        }
        prev = m[k][k].clone();
        rank += 1;
    }
    rank
}

/// Outcome of the minor-gcd test.
#[derive(Clone, Debug, Serialize)]
pub struct MinorGcd {
    /// Running gcd of the examined minors (`1` once certified).
    #[serde(serialize_with = "crate::poisson::serialize_poly")]
    pub gcd: MultiPoly,
    pub certified_constant: bool,
    pub minors_examined: usize,
    pub nonzero_minors: usize,
}

/// Next `k`-subset of `0..n` in colexicographic order.
fn colex_next(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in 0..k {
        let limit = if i + 1 < k { c[i + 1] } else { n };
        if c[i] + 1 < limit {
            c[i] += 1;
            for (j, slot) in c.iter_mut().enumerate().take(i) {
                *slot = j;
            }
            return true;
        }
    }
    false
}

/// Proves `gcd(minors)` constant by specialization: for each variable `v`
/// pick values for the others keeping the `x_v`-leading coefficient of the
/// first minor nonzero; a constant univariate gcd then forces
/// `deg_v gcd = 0`.
fn certify_by_specialization(
    minors: &[MultiPoly],
    settled: &mut [bool],
    rng: &mut ScalarRng,
) -> bool {
    let first = &minors[0];
    let n = first.nvars();
    for v in 0..n {
        if settled[v] {
            continue;
        }
        let dv = first.degree_in(v).unwrap_or(0);
        if dv == 0 {
            settled[v] = true;
            continue;
        }
        let lead = coefficients_in(first, v).remove(&dv).expect("leading coefficient");
        let mut point = None;
        for _ in 0..16 {
            let p = rng.point(n, 1000);
            if !lead.eval(&p).is_zero() {
                point = Some(p);
                break;
            }
        }
        let Some(point) = point else { return false };
        let images: Vec<MultiPoly> = (0..n)
            .map(|i| {
                if i == v {
                    MultiPoly::var(n, v)
                } else {
                    MultiPoly::constant(n, point[i].clone())
                }
            })
            .collect();
        let mut g = MultiPoly::zero(n);
        for m in minors {
            g = gcd(&g, &m.substitute(&images));
            if g.is_constant() {
                break;
            }
        }
        if g.is_constant() && !g.is_zero() {
            settled[v] = true;
        } else {
            return false;
        }
    }
    true
}

/// Runs over the `N×N` minors of the Jacobian of `polys` (columns in colex
/// order) keeping a running gcd, and stops as soon as it is provably
/// constant. `budget` caps the number of minors expanded.
pub fn minor_gcd(polys: &[MultiPoly], budget: usize, seed: u64) -> Result<MinorGcd, PoissonError> {
    let k = polys.len();
    let n = polys.first().map_or(0, MultiPoly::nvars);
    if k == 0 || k > n {
        return Err(PoissonError::DimensionMismatch {
            expected: n,
            got: k,
        });
    }
    let jac: Vec<Vec<MultiPoly>> = polys
        .iter()
        .map(|p| (0..n).map(|j| p.derivative(j)).collect())
        .collect();
    let mut cols: Vec<usize> = (0..k).collect();
    let mut minors: Vec<MultiPoly> = Vec::new();
    let mut settled = vec![false; n];
    let mut rng = ScalarRng::new(seed);
    let mut examined = 0;
    let mut more = true;
    while more && examined < budget {
        let sub: Vec<Vec<MultiPoly>> = jac
            .iter()
            .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
            .collect();
        let d = poly_det(sub);
        examined += 1;
        more = colex_next(&mut cols, n);
        if d.is_zero() {
            continue;
        }
        if d.is_constant() {
            return Ok(MinorGcd {
                gcd: MultiPoly::one(n),
                certified_constant: true,
                minors_examined: examined,
                nonzero_minors: minors.len() + 1,
            });
        }
        minors.push(d);
        if certify_by_specialization(&minors, &mut settled, &mut rng) {
            return Ok(MinorGcd {
                gcd: MultiPoly::one(n),
                certified_constant: true,
                minors_examined: examined,
                nonzero_minors: minors.len(),
            });
        }
    }
    let mut g = MultiPoly::zero(n);
    for m in &minors {
        g = gcd(&g, m);
    }
    if more {
        return Err(PoissonError::BudgetExhausted {
            examined,
            partial: Box::new(g),
        });
    }
    let constant = g.is_constant() && !g.is_zero();
    Ok(MinorGcd {
        certified_constant: constant,
        gcd: if constant { MultiPoly::one(n) } else { g },
        minors_examined: examined,
        nonzero_minors: minors.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    #[test]
    fn exact_division() {
        let a = &x(2, 0) + &x(2, 1);
        let b = &x(2, 0) - &x(2, 1);
        let p = &a * &b;
        assert_eq!(div_exact(&p, &a), Some(b.clone()));
        assert_eq!(div_exact(&a, &b), None);
    }

    #[test]
    fn multivariate_gcd() {
        let a = &x(3, 0) + &x(3, 1);
        let b = &x(3, 2) + &MultiPoly::one(3);
        let c = &x(3, 0) - &x(3, 2);
        let g = gcd(&(&a * &b), &(&a * &c));
        assert_eq!(g, a.monic());
        assert!(gcd(&b, &c).is_constant());
        assert_eq!(gcd(&x(2, 0).pow(3), &(&x(2, 0).pow(2) * &x(2, 1))), x(2, 0).pow(2));
    }

    #[test]
    fn determinant() {
        let m = vec![
            vec![x(2, 0), x(2, 1)],
            vec![x(2, 1), x(2, 0)],
        ];
        assert_eq!(poly_det(m), &x(2, 0).pow(2) - &x(2, 1).pow(2));
        let z = MultiPoly::zero(2);
        let m3 = vec![
            vec![z.clone(), x(2, 0), z.clone()],
            vec![x(2, 1), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), x(2, 0)],
        ];
        assert_eq!(poly_det(m3), -(&(&x(2, 0) * &x(2, 1)) * &x(2, 0)));
    }

    #[test]
    fn colex_order() {
        let mut c = vec![0, 1];
        let mut seen = vec![c.clone()];
        while colex_next(&mut c, 4) {
            seen.push(c.clone());
        }
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]
        );
    }

    #[test]
    fn minor_gcd_examples() {
        let ids: Vec<MultiPoly> = (0..3).map(|i| x(3, i)).collect();
        let r = minor_gcd(&ids, 10, 0).unwrap();
        assert!(r.certified_constant);
        assert_eq!(r.minors_examined, 1);
        let r = minor_gcd(&[x(2, 0).pow(2), x(2, 1)], 10, 0).unwrap();
        assert!(!r.certified_constant);
        assert_eq!(r.gcd, x(2, 0));
    }

    #[test]
    fn symbolic_rank_of_sl2() {
        // M(ξ) for sl2 in (e, h, f): rank 2.
        let v = |i| x(3, i);
        let z = MultiPoly::zero(3);
        let two = CycloNum::from(2);
        let m = vec![
            vec![z.clone(), v(0).scale(&-&two), v(1)],
            vec![v(0).scale(&two), z.clone(), v(2).scale(&-&two)],
            vec![-&v(1), v(2).scale(&two), z.clone()],
        ];
        assert_eq!(symbolic_rank(m), 2);
    }
}
