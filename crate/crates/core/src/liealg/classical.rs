use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{AlgebraKind, LieAlgebra, LieError};
use crate::field::CycloNum;
use crate::linalg::{Matrix, Vector};
use crate::poisson::StructureTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Sl,
    So,
    Sp,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Sl => "sl",
            Family::So => "so",
            Family::Sp => "sp",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = LieError;
    fn from_str(s: &str) -> Result<Family, LieError> {
        match s {
            "sl" => Ok(Family::Sl),
            "so" => Ok(Family::So),
            "sp" => Ok(Family::Sp),
            other => Err(LieError::UnsupportedParameters(format!(
                "unknown family `{other}` (expected sl, so or sp)"
            ))),
        }
    }
}

fn unit(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = CycloNum::one();
    m
}

/// Trace pairing `tr(AB)` without forming the product.
fn trace_pair(a: &Matrix, b: &Matrix) -> CycloNum {
    let n = a.rows();
    let mut t = CycloNum::zero();
    for i in 0..n {
        for k in 0..n {
            let x = &a[(i, k)];
            if x.is_zero() {
                continue;
            }
            let y = &b[(k, i)];
            if !y.is_zero() {
                t += &(x * y);
            }
        }
    }
    t
}

fn sl_basis(n: usize) -> (Vec<String>, Vec<Matrix>) {
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            labels.push(format!("E{}{}", i + 1, j + 1));
            mats.push(unit(n, i, j));
        }
    }
    for i in 0..n - 1 {
        labels.push(format!("H{}", i + 1));
        let mut h = unit(n, i, i);
        h[(i + 1, i + 1)] = -CycloNum::one();
        mats.push(h);
    }
    for i in 0..n {
        for j in 0..i {
            labels.push(format!("E{}{}", i + 1, j + 1));
            mats.push(unit(n, i, j));
        }
    }
    (labels, mats)
}

fn so_basis(n: usize) -> (Vec<String>, Vec<Matrix>) {
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            labels.push(format!("A{}{}", i + 1, j + 1));
            let mut a = unit(n, i, j);
            a[(j, i)] = -CycloNum::one();
            mats.push(a);
        }
    }
    (labels, mats)
}

/// Blocks `[[A, B], [C, -A^T]]` with `B`, `C` symmetric.
fn sp_basis(n: usize) -> (Vec<String>, Vec<Matrix>) {
    let k = n / 2;
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for i in 0..k {
        for j in 0..k {
            labels.push(format!("A{}{}", i + 1, j + 1));
            let mut a = unit(n, i, j);
            a[(k + j, k + i)] = -CycloNum::one();
            mats.push(a);
        }
    }
    for (tag, off_r, off_c) in [("B", 0, k), ("C", k, 0)] {
        for i in 0..k {
            for j in i..k {
                labels.push(format!("{tag}{}{}", i + 1, j + 1));
                let mut b = unit(n, off_r + i, off_c + j);
                b[(off_r + j, off_c + i)] = CycloNum::one();
                mats.push(b);
            }
        }
    }
    (labels, mats)
}

/// Coordinates of a matrix in a basis with trace form `g` (inverse `g_inv`).
pub(crate) fn matrix_coords(mats: &[Matrix], g_inv: &Matrix, x: &Matrix) -> Vector {
    let pairings: Vector = mats.iter().map(|m| trace_pair(m, x)).collect();
    g_inv.mul_vec(&pairings)
}

fn combine(mats: &[Matrix], coords: &[CycloNum]) -> Matrix {
    let n = mats[0].rows();
    let mut out = Matrix::zeros(n, n);
    for (m, c) in mats.iter().zip(coords) {
        if !c.is_zero() {
            out = out.add(&m.scale(c));
        }
    }
    out
}

/// Algebra spanned by the given matrices with the trace form attached.
/// The structure constants are read off through the inverse form.
pub(crate) fn from_matrices(
    labels: Vec<String>,
    mats: Vec<Matrix>,
) -> Result<(StructureTensor, Matrix), LieError> {
    let d = mats.len();
    let g = Matrix::from_fn(d, d, |i, j| trace_pair(&mats[i], &mats[j]));
    let g_inv = g.inverse().ok_or_else(|| {
        LieError::UnsupportedParameters("trace form is degenerate on the chosen basis".into())
    })?;
    let mut t = StructureTensor::new(d);
    for i in 0..d {
        for j in i + 1..d {
            let br = (&mats[i] * &mats[j]).sub(&(&mats[j] * &mats[i]));
            let c = matrix_coords(&mats, &g_inv, &br);
            if combine(&mats, &c) != br {
                return Err(LieError::UnsupportedParameters(format!(
                    "span of {} is not closed under the commutator",
                    labels[i]
                )));
            }
            t.set(
                i,
                j,
                c.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect(),
            );
        }
    }
    Ok((t, g))
}

/// `sl_n`, `so_n` or `sp_n` (`n` the size of the defining matrices).
pub fn build_classical(family: Family, n: usize) -> Result<LieAlgebra, LieError> {
    let (labels, mats, rank) = match family {
        Family::Sl if n >= 2 => {
            let (l, m) = sl_basis(n);
            (l, m, n - 1)
        }
        Family::So if n >= 3 => {
            let (l, m) = so_basis(n);
            (l, m, n / 2)
        }
        Family::Sp if n >= 2 && n % 2 == 0 => {
            let (l, m) = sp_basis(n);
            (l, m, n / 2)
        }
        _ => {
            return Err(LieError::UnsupportedParameters(format!(
                "{}({n}) is not supported (sl needs n >= 2, so n >= 3, sp even n >= 2)",
                family.name()
            )))
        }
    };
    let (tensor, form) = from_matrices(labels.clone(), mats.clone())?;
    let alg = LieAlgebra::new_unchecked(
        labels,
        tensor,
        Some(form),
        Some(rank),
        AlgebraKind::Classical {
            family,
            n,
            matrices: mats,
        },
    );
    alg.validate()?;
    Ok(alg)
}

/// `h ⊕ … ⊕ h` (`n` copies), copy `c` occupying indices `c·dim h ..`.
pub fn direct_sum(h: &LieAlgebra, n: usize) -> Result<LieAlgebra, LieError> {
    if n == 0 {
        return Err(LieError::UnsupportedParameters(
            "direct sum needs at least one copy".into(),
        ));
    }
    let d = h.dim();
    let mut labels = Vec::with_capacity(n * d);
    let mut t = StructureTensor::new(n * d);
    for c in 0..n {
        labels.extend(h.labels().iter().map(|l| format!("{l}_{}", c + 1)));
        for (&(i, j), form) in h.tensor().entries() {
            t.set(
                c * d + i,
                c * d + j,
                form.iter().map(|(k, v)| (c * d + k, v.clone())).collect(),
            );
        }
    }
    let form = h.form().map(|g| {
        Matrix::from_fn(n * d, n * d, |i, j| {
            if i / d == j / d {
                g[(i % d, j % d)].clone()
            } else {
                CycloNum::zero()
            }
        })
    });
    Ok(LieAlgebra::new_unchecked(
        labels,
        t,
        form,
        h.rank().map(|r| r * n),
        AlgebraKind::DirectSum {
            base: Box::new(h.clone()),
            copies: n,
        },
    ))
}
