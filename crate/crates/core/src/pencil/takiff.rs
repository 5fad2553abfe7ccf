use std::sync::Arc;

use serde::Serialize;

use super::PencilError;
use crate::field::CycloNum;
use crate::liealg::{eigenspace_grading, AlgebraKind, Automorphism, LieAlgebra, LieError, PeriodicGrading};
use crate::linalg::Matrix;
use crate::poisson::StructureTensor;

/// `h ⊗ k[t]/(t^n)`; basis `x_a t^k` at index `k·dim h + a`.
pub fn takiff(h: &LieAlgebra, n: usize) -> Result<LieAlgebra, PencilError> {
    if n == 0 {
        return Err(LieError::UnsupportedParameters("truncation level must be positive".into()).into());
    }
    Ok(current_algebra(h, 0, n))
}

/// `⊕_{k=1}^{n-1} h t^k`, the nilpotent radical of `takiff(h, n)`.
pub fn takiff_nilradical(h: &LieAlgebra, n: usize) -> Result<LieAlgebra, PencilError> {
    if n < 2 {
        return Err(LieError::UnsupportedParameters("nilradical needs truncation level at least 2".into()).into());
    }
    Ok(current_algebra(h, 1, n))
}

/// Layers `x t^k` for `lo ≤ k < n` with `t^n = 0`.
fn current_algebra(h: &LieAlgebra, lo: usize, n: usize) -> LieAlgebra {
    let d = h.dim();
    let layers = n - lo;
    let mut t = StructureTensor::new(layers * d);
    let mut labels = Vec::with_capacity(layers * d);
    for k in lo..n {
        labels.extend(h.labels().iter().map(|l| format!("{l}t{k}")));
    }
    for k in lo..n {
        for l in k..n {
            if k + l >= n {
                break;
            }
            let out = (k + l - lo) * d;
            for (&(a, b), form) in h.tensor().entries() {
                let shift = |v: &[(usize, CycloNum)]| v.iter().map(|(c, x)| (out + c, x.clone())).collect();
                t.set((k - lo) * d + a, (l - lo) * d + b, shift(form));
                if k != l {
                    t.set((l - lo) * d + a, (k - lo) * d + b, shift(form));
                }
            }
        }
    }
    let (form, rank) = if n == 1 && lo == 0 {
        (h.form().cloned(), h.rank())
    } else {
        (None, None)
    };
    LieAlgebra::new_unchecked(labels, t, form, rank, AlgebraKind::Raw)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulus {
    /// `t^N = 1`.
    Unit,
    /// `t^N = 0`.
    Nilpotent,
}

/// `h[t]^θ / (t^N − 1)` or `h[t]^θ / (t^N)` with `N = n·ord θ`.
#[derive(Clone, Debug)]
pub struct TwistedTruncation {
    algebra: LieAlgebra,
    grading: Arc<PeriodicGrading>,
    /// `(k, a)` for the basis vector `y_a t^k`, `y_a` in the adapted basis of `h`.
    basis: Vec<(usize, usize)>,
    n: usize,
    modulus: Modulus,
}

impl TwistedTruncation {
    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn grading(&self) -> &Arc<PeriodicGrading> {
        &self.grading
    }

    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> usize {
        self.n * self.grading.m() as usize
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Index of `y_a t^k`, if that vector is θ-fixed and below the truncation.
    pub fn position(&self, k: usize, a: usize) -> Option<usize> {
        self.basis.binary_search(&(k, a)).ok()
    }

    /// Keeps `[y_a t^k, y_b t^l]` only when `k mod m + l mod m < m`, then
    /// renumbers `y_a t^k ↦ (k div m)·dim h + a`. For the nilpotent modulus
    /// the result is the Takiff algebra of `h_(0)` truncated at `t^n`.
    pub fn level_contraction(&self) -> StructureTensor {
        let m = self.grading.m() as usize;
        let d = self.grading.dim();
        let target: Vec<usize> = self.basis.iter().map(|&(k, a)| (k / m) * d + a).collect();
        let kept = self
            .algebra
            .tensor()
            .filter(|p, q, _| self.basis[p].0 % m + self.basis[q].0 % m < m);
        let mut out = StructureTensor::new(self.basis.len());
        for (&(p, q), form) in kept.entries() {
            out.set(
                target[p],
                target[q],
                form.iter().map(|(r, c)| (target[*r], c.clone())).collect(),
            );
        }
        out
    }
}

pub fn twisted_truncation(theta: &Automorphism, n: usize, modulus: Modulus) -> Result<TwistedTruncation, PencilError> {
    if n == 0 {
        return Err(LieError::UnsupportedParameters("truncation level must be positive".into()).into());
    }
    let grading = Arc::new(eigenspace_grading(theta)?);
    let m = grading.m() as usize;
    let big_n = n * m;
    let grades = grading.grades();
    let mut basis = Vec::new();
    for k in 0..big_n {
        for (a, &g) in grades.iter().enumerate() {
            if g as usize == k % m {
                basis.push((k, a));
            }
        }
    }
    let pos = |k: usize, a: usize| basis.binary_search(&(k, a)).expect("grade-compatible layer");
    let h = grading.adapted_tensor();
    let mut t = StructureTensor::new(basis.len());
    for (p, &(k, a)) in basis.iter().enumerate() {
        for (q, &(l, b)) in basis.iter().enumerate().skip(p + 1) {
            let form = h.get(a, b);
            if form.is_empty() {
                continue;
            }
            let e = match modulus {
                Modulus::Nilpotent if k + l >= big_n => continue,
                Modulus::Nilpotent => k + l,
                Modulus::Unit => (k + l) % big_n,
            };
            t.set(p, q, form.iter().map(|(c, x)| (pos(e, *c), x.clone())).collect());
        }
    }
    let labels = basis.iter().map(|&(k, a)| format!("y{}t{k}", a + 1)).collect();
    let algebra = LieAlgebra::new_unchecked(labels, t, None, None, AlgebraKind::Raw);
    algebra.validate()?;
    Ok(TwistedTruncation {
        algebra,
        grading,
        basis,
        n,
        modulus,
    })
}

/// The map `x_a t^k ↦ Σ_c ζ^{-kc} x_a^{(c)}` from `h ⊗ k[t]/(t^n − 1)` (or
/// its truncation) to `h^n`, with `ζ` a primitive `n`-th root of unity.
/// Column `k·dim h + a` is the image of `x_a t^k`.
pub fn fourier_map(d: usize, n: usize) -> Matrix {
    let mut m = Matrix::zeros(n * d, n * d);
    for k in 0..n {
        for c in 0..n {
            let z = CycloNum::zeta_pow(n as u32, -((k * c) as i64));
            for a in 0..d {
                m[(c * d + a, k * d + a)] = z.clone();
            }
        }
    }
    m
}

/// The Fourier map expressed in the adapted basis of a cyclic-permutation
/// grading on `h^n`; it identifies `takiff(h, n)` with `g_(0)`.
pub fn cyclic_current_map(grading: &PeriodicGrading, d: usize) -> Matrix {
    let n = grading.m() as usize;
    let f = fourier_map(d, n);
    grading.basis_inv() * &f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_classical, cartan_involution, cyclic_permutation, direct_sum, homomorphism_violation, Family};
    use crate::pencil::{algebra_at, build_pencil, index, IndexMethod, ParamValue};

    fn sl2() -> LieAlgebra {
        build_classical(Family::Sl, 2).unwrap()
    }

    #[test]
    fn takiff_basics() {
        let h = sl2();
        assert_eq!(takiff(&h, 1).unwrap().tensor(), h.tensor());
        let t2 = takiff(&h, 2).unwrap();
        assert_eq!(t2.dim(), 6);
        assert_eq!(index(&t2, 3, 1, IndexMethod::Symbolic).unwrap().index_estimate, 2);
        let nil = takiff_nilradical(&h, 3).unwrap();
        assert_eq!(nil.dim(), 6);
        assert_eq!(index(&nil, 3, 1, IndexMethod::Symbolic).unwrap().index_estimate, 4);
        assert!(takiff(&h, 0).is_err());
        assert!(takiff_nilradical(&h, 1).is_err());
    }

    #[test]
    fn cyclic_g0_is_takiff() {
        let h = sl2();
        for n in [2, 3] {
            let gr = Arc::new(eigenspace_grading(&cyclic_permutation(&h, n).unwrap()).unwrap());
            let map = cyclic_current_map(&gr, 3);
            let p = build_pencil(gr).unwrap();
            let g0 = algebra_at(&p, &ParamValue::int(0)).unwrap();
            let tk = takiff(&h, n).unwrap();
            assert_eq!(homomorphism_violation(tk.tensor(), g0.tensor(), &map), None);
            assert!(map.inverse().is_some());
        }
    }

    #[test]
    fn identity_truncations() {
        let h = Arc::new(sl2());
        let id = Automorphism::identity(h.clone());
        let nil = twisted_truncation(&id, 3, Modulus::Nilpotent).unwrap();
        assert_eq!(nil.algebra().tensor(), takiff(&h, 3).unwrap().tensor());
        let unit = twisted_truncation(&id, 3, Modulus::Unit).unwrap();
        let sum = direct_sum(&h, 3).unwrap();
        assert_eq!(homomorphism_violation(unit.algebra().tensor(), sum.tensor(), &fourier_map(3, 3)), None);
    }

    #[test]
    fn cartan_twisted_truncation() {
        let h = Arc::new(sl2());
        let theta = cartan_involution(h).unwrap();
        let tt = twisted_truncation(&theta, 2, Modulus::Nilpotent).unwrap();
        assert_eq!(tt.algebra().dim(), 6);
        assert_eq!(index(tt.algebra(), 2, 5, IndexMethod::Symbolic).unwrap().index_estimate, 2);

        let pencil = build_pencil(tt.grading().clone()).unwrap();
        let q = algebra_at(&pencil, &ParamValue::int(0)).unwrap();
        assert_eq!(&tt.level_contraction(), takiff(&q, 2).unwrap().tensor());

        let unit = twisted_truncation(&theta, 2, Modulus::Unit).unwrap();
        assert_eq!(index(unit.algebra(), 2, 5, IndexMethod::Symbolic).unwrap().index_estimate, 2);
    }
}
