use std::collections::BTreeMap;

use num_traits::Zero;

use crate::field::CycloNum;
use crate::linalg::{Matrix, Vector};

/// A linear form `Σ c_k x_k`, kept sorted by `k` with no zero entries.
pub type LinearForm = Vec<(usize, CycloNum)>;

/// Skew bilinear bracket on a basis `x_1..x_n`, stored for `i < j` only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTensor {
    n: usize,
    entries: BTreeMap<(usize, usize), LinearForm>,
}

fn normalize(mut form: LinearForm) -> LinearForm {
    form.sort_by_key(|(k, _)| *k);
    let mut out: LinearForm = Vec::with_capacity(form.len());
    for (k, c) in form {
        match out.last_mut() {
            Some((lk, lc)) if *lk == k => *lc += &c,
            _ => out.push((k, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

impl StructureTensor {
    pub fn new(n: usize) -> StructureTensor {
        StructureTensor {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    /// Sets `{x_i, x_j}`; the `j > i` ordering is handled by negation.
    pub fn set(&mut self, i: usize, j: usize, form: LinearForm) {
        assert!(i < self.n && j < self.n, "index out of range");
        assert!(i != j, "diagonal bracket must vanish");
        let (a, b, form) = if i < j {
            (i, j, form)
        } else {
            (j, i, form.into_iter().map(|(k, c)| (k, -c)).collect())
        };
        let form = normalize(form);
        if form.is_empty() {
            self.entries.remove(&(a, b));
        } else {
            self.entries.insert((a, b), form);
        }
    }

    /// Iterates over stored entries `(i, j) → {x_i, x_j}` with `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &LinearForm)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `{x_i, x_j}` as a linear form, for any ordering of the indices.
    pub fn get(&self, i: usize, j: usize) -> LinearForm {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => Vec::new(),
            Less => self.entries.get(&(i, j)).cloned().unwrap_or_default(),
            Greater => self
                .entries
                .get(&(j, i))
                .map(|f| f.iter().map(|(k, c)| (*k, -c)).collect())
                .unwrap_or_default(),
        }
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, x: &[CycloNum], y: &[CycloNum]) -> Vector {
        let mut out = vec![CycloNum::zero(); self.n];
        for (&(i, j), form) in &self.entries {
            let a = &x[i] * &y[j] - &x[j] * &y[i];
            if a.is_zero() {
                continue;
            }
            for (k, c) in form {
                out[*k] += &(&a * c);
            }
        }
        out
    }

    /// Bracket of basis vector `x_i` with a coordinate vector.
    pub fn bracket_basis_vec(&self, i: usize, y: &[CycloNum]) -> Vector {
        let mut out = vec![CycloNum::zero(); self.n];
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() || i == j {
                continue;
            }
            for (k, c) in self.get(i, j) {
                out[k] += &(&c * yj);
            }
        }
        out
    }

    /// Matrix of `ad(x_i)` acting on coordinate column vectors.
    pub fn ad(&self, i: usize) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for j in 0..self.n {
            for (k, c) in self.get(i, j) {
                m[(k, j)] = c;
            }
        }
        m
    }

    /// The skew matrix `M(ξ)_{ij} = Σ_k c_{ij}^k ξ_k`.
    pub fn eval(&self, xi: &[CycloNum]) -> Matrix {
        assert_eq!(xi.len(), self.n);
        let mut m = Matrix::zeros(self.n, self.n);
        for (&(i, j), form) in &self.entries {
            let mut v = CycloNum::zero();
            for (k, c) in form {
                if !xi[*k].is_zero() {
                    v += &(c * &xi[*k]);
                }
            }
            if !v.is_zero() {
                m[(j, i)] = -&v;
                m[(i, j)] = v;
            }
        }
        m
    }

    /// First basis triple violating the Jacobi identity, if any.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        let to_vec = |form: LinearForm| {
            let mut v = vec![CycloNum::zero(); n];
            for (k, c) in form {
                v[k] = c;
            }
            v
        };
        for i in 0..n {
            for j in i + 1..n {
                let ij = to_vec(self.get(i, j));
                for k in j + 1..n {
                    let jk = to_vec(self.get(j, k));
                    let ki = to_vec(self.get(k, i));
                    // [[x_i,x_j],x_k] + [[x_j,x_k],x_i] + [[x_k,x_i],x_j]
                    let a = self.bracket_basis_vec(k, &ij);
                    let b = self.bracket_basis_vec(i, &jk);
                    let c = self.bracket_basis_vec(j, &ki);
                    if a.iter()
                        .zip(&b)
                        .zip(&c)
                        .any(|((x, y), z)| !(x + y + z).is_zero())
                    {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn add(&self, other: &StructureTensor) -> StructureTensor {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (&(i, j), form) in &other.entries {
            let mut f = out.get(i, j);
            f.extend(form.iter().cloned());
            out.set(i, j, f);
        }
        out
    }

    pub fn scale(&self, c: &CycloNum) -> StructureTensor {
        let mut out = StructureTensor::new(self.n);
        for (&(i, j), form) in &self.entries {
            out.set(i, j, form.iter().map(|(k, v)| (*k, v * c)).collect());
        }
        out
    }

    /// Keeps the terms `c_{ij}^k` for which `keep(i, j, k)` holds.
    pub fn filter(&self, mut keep: impl FnMut(usize, usize, usize) -> bool) -> StructureTensor {
        let mut out = StructureTensor::new(self.n);
        for (&(i, j), form) in &self.entries {
            let f: LinearForm = form.iter().filter(|(k, _)| keep(i, j, *k)).cloned().collect();
            out.set(i, j, f);
        }
        out
    }

    /// Structure constants after the change of basis whose new basis vectors
    /// are the columns of `p` (with `p_inv` its inverse).
    pub fn change_basis(&self, p: &Matrix, p_inv: &Matrix) -> StructureTensor {
        let n = self.n;
        let cols: Vec<Vector> = (0..n).map(|a| p.col(a)).collect();
        let mut out = StructureTensor::new(n);
        for a in 0..n {
            for b in a + 1..n {
                let v = self.bracket(&cols[a], &cols[b]);
                let w = p_inv.mul_vec(&v);
                let form: LinearForm = w
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                out.set(a, b, form);
            }
        }
        out
    }

    /// Restriction to the coordinate subspace spanned by `idx`, renumbered in
    /// the given order. Returns `None` if the subspace is not closed.
    pub fn restrict(&self, idx: &[usize]) -> Option<StructureTensor> {
        let mut pos = vec![usize::MAX; self.n];
        for (p, &i) in idx.iter().enumerate() {
            pos[i] = p;
        }
        let mut out = StructureTensor::new(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate().skip(a + 1) {
                let mut f = Vec::new();
                for (k, c) in self.get(i, j) {
                    if pos[k] == usize::MAX {
                        return None;
                    }
                    f.push((pos[k], c));
                }
                out.set(a, b, f);
            }
        }
        Some(out)
    }

    /// Largest conductor among the coefficients (1 when all are rational).
    pub fn conductor(&self) -> u32 {
        self.entries
            .values()
            .flatten()
            .map(|(_, c)| if c.is_rational() { 1 } else { c.conductor() })
            .max()
            .unwrap_or(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2() -> StructureTensor {
        // basis (e, h, f): [e,h] = -2e, [e,f] = h, [h,f] = -2f
        let mut t = StructureTensor::new(3);
        t.set(0, 1, vec![(0, CycloNum::from(-2))]);
        t.set(0, 2, vec![(1, CycloNum::from(1))]);
        t.set(1, 2, vec![(2, CycloNum::from(-2))]);
        t
    }

    #[test]
    fn skew_storage() {
        let t = sl2();
        assert_eq!(t.get(1, 0), vec![(0, CycloNum::from(2))]);
        assert!(t.get(2, 2).is_empty());
        let m = t.eval(&[CycloNum::from(1), CycloNum::from(3), CycloNum::from(5)]);
        assert_eq!(m, m.transpose().scale(&CycloNum::from(-1)));
    }

    #[test]
    fn jacobi_detects_breakage() {
        assert_eq!(sl2().jacobi_violation(), None);
        let mut broken = sl2();
        broken.set(0, 2, vec![(1, CycloNum::from(3)), (0, CycloNum::from(1))]);
        assert_eq!(broken.jacobi_violation(), Some((0, 1, 2)));
    }
}
