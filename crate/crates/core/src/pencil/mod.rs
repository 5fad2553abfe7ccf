//! The compatible pencil `{,}_t = {,}_0 + t{,}_∞` of a periodic grading,
//! its contractions, indices and kernel computations, and the current-type
//! algebras built from a simple factor.

mod index;
mod takiff;

pub use index::{index, index_of_tensor, IndexMethod, IndexReport, SYMBOLIC_DIM_CAP};
pub use takiff::{
    cyclic_current_map, fourier_map, takiff, takiff_nilradical, twisted_truncation, Modulus,
    TwistedTruncation,
};

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::field::{CycloNum, ScalarRng};
use crate::liealg::{AlgebraKind, LieAlgebra, LieError, PeriodicGrading};
use crate::linalg::{same_span, span_rank, Matrix, Vector};
use crate::poisson::StructureTensor;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PencilError {
    #[error("symbolic index limited to dimension {cap}, got {dim}")]
    SymbolicTooLarge { dim: usize, cap: usize },
    #[error("pencil identity fails: pi0 + piInf differs from the bracket at ({0}, {1})")]
    SplitMismatch(usize, usize),
    #[error("contraction at t = infinity is not nilpotent with central g_0: {0}")]
    InfinityStructure(String),
    #[error("monte carlo index needs at least one trial")]
    NoTrials,
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// A point of `P = k ∪ {∞}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamValue {
    Finite(CycloNum),
    Infinity,
}

impl ParamValue {
    pub fn int(t: i64) -> ParamValue {
        ParamValue::Finite(CycloNum::from(t))
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Finite(c) => write!(f, "{c}"),
            ParamValue::Infinity => f.write_str("inf"),
        }
    }
}

/// The pair `(π_0, π_∞)` in the grading-adapted basis.
#[derive(Clone, Debug)]
pub struct BracketPencil {
    grading: Arc<PeriodicGrading>,
    pi0: StructureTensor,
    pi_inf: StructureTensor,
}

/// Splits every structure constant `c_{ab}^c` by whether
/// `grade(a) + grade(b) < m`.
pub fn build_pencil(grading: Arc<PeriodicGrading>) -> Result<BracketPencil, PencilError> {
    let m = grading.m();
    let grades = grading.grades().to_vec();
    let full = grading.adapted_tensor();
    let pi0 = full.filter(|a, b, _| grades[a] + grades[b] < m);
    let pi_inf = full.filter(|a, b, _| grades[a] + grades[b] >= m);
    let sum = pi0.add(&pi_inf);
    if let Some((&(a, b), _)) = full
        .entries()
        .find(|(&(a, b), f)| sum.get(a, b) != **f)
        .or_else(|| sum.entries().find(|(&(a, b), f)| full.get(a, b) != **f))
    {
        return Err(PencilError::SplitMismatch(a, b));
    }
    Ok(BracketPencil {
        grading,
        pi0,
        pi_inf,
    })
}

impl BracketPencil {
    pub fn grading(&self) -> &Arc<PeriodicGrading> {
        &self.grading
    }

    pub fn pi0(&self) -> &StructureTensor {
        &self.pi0
    }

    pub fn pi_inf(&self) -> &StructureTensor {
        &self.pi_inf
    }

    /// The original bracket `π = π_0 + π_∞` (adapted basis).
    pub fn pi(&self) -> &StructureTensor {
        self.grading.adapted_tensor()
    }

    pub fn dim(&self) -> usize {
        self.pi0.nvars()
    }

    /// `π_t`, with `π_∞` returned for `t = ∞`.
    pub fn tensor_at(&self, t: &ParamValue) -> StructureTensor {
        match t {
            ParamValue::Infinity => self.pi_inf.clone(),
            ParamValue::Finite(c) if c.is_zero() => self.pi0.clone(),
            ParamValue::Finite(c) => self.pi0.add(&self.pi_inf.scale(c)),
        }
    }

    /// The skew matrix of `π_t` at `ξ`.
    pub fn eval_at(&self, t: &ParamValue, xi: &[CycloNum]) -> Matrix {
        match t {
            ParamValue::Infinity => self.pi_inf.eval(xi),
            ParamValue::Finite(c) => {
                let a = self.pi0.eval(xi);
                if c.is_zero() {
                    a
                } else {
                    a.add(&self.pi_inf.eval(xi).scale(c))
                }
            }
        }
    }

    /// Coordinates of the adapted basis vectors spanning `g_0`.
    pub fn g0_indices(&self) -> Vec<usize> {
        self.grading.indices_of_grade(0)
    }
}

/// The Lie algebra `g_(t)`; Jacobi is re-verified, and at `t = ∞` the
/// result is checked to be nilpotent with `g_0` central.
pub fn algebra_at(pencil: &BracketPencil, t: &ParamValue) -> Result<LieAlgebra, PencilError> {
    let tensor = pencil.tensor_at(t);
    if let Some((i, j, k)) = tensor.jacobi_violation() {
        return Err(LieError::JacobiViolation(i, j, k).into());
    }
    if *t == ParamValue::Infinity {
        for a in pencil.g0_indices() {
            for b in 0..pencil.dim() {
                if !tensor.get(a, b).is_empty() {
                    return Err(PencilError::InfinityStructure(format!(
                        "g_0 vector y{} does not commute with y{}",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        let steps = lower_central_length(&tensor);
        match steps {
            Some(s) if s <= pencil.grading.m() as usize => {}
            other => {
                return Err(PencilError::InfinityStructure(format!(
                    "lower central series length {other:?} exceeds m = {}",
                    pencil.grading.m()
                )))
            }
        }
    }
    let form = match t {
        ParamValue::Finite(c) if *c == CycloNum::from(1) => pencil.grading.adapted_form().cloned(),
        _ => None,
    };
    let labels = (0..pencil.dim())
        .map(|a| format!("y{}[{}]", a + 1, pencil.grading.grades()[a]))
        .collect();
    Ok(LieAlgebra::new_unchecked(
        labels,
        tensor,
        form,
        None,
        AlgebraKind::Raw,
    ))
}

/// Number of steps `k` with `C^{k+1} = 0` in the lower central series
/// `C^1 = q`, `C^{i+1} = [q, C^i]`; `None` if the series stabilizes at a
/// nonzero term.
pub fn lower_central_length(t: &StructureTensor) -> Option<usize> {
    let n = t.nvars();
    let mut current: Vec<Vector> = (0..n)
        .map(|i| {
            let mut v = vec![CycloNum::zero(); n];
            v[i] = CycloNum::from(1);
            v
        })
        .collect();
    let mut dim = n;
    let mut steps = 0;
    while dim > 0 {
        let mut next: Vec<Vector> = Vec::new();
        for i in 0..n {
            for v in &current {
                let w = t.bracket_basis_vec(i, v);
                if !w.iter().all(Zero::is_zero) {
                    next.push(w);
                }
            }
        }
        let basis = if next.is_empty() {
            Vec::new()
        } else {
            let m = Matrix::from_rows(next);
            let (r, piv) = m.rref();
            (0..piv.len()).map(|i| r.row(i).to_vec()).collect()
        };
        steps += 1;
        if basis.len() == dim {
            return None;
        }
        dim = basis.len();
        current = basis;
    }
    Some(steps)
}

/// Exact basis of `ker π_t(ξ)`.
pub fn kernel_at(pencil: &BracketPencil, t: &ParamValue, xi: &[CycloNum]) -> Vec<Vector> {
    pencil.eval_at(t, xi).nullspace()
}

/// Span of the kernels `ker π_t(ξ)` over sampled regular `t`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelSpan {
    pub dim: usize,
    pub saturated: bool,
    /// Sampled parameters kept (maximal rank among the samples).
    pub used: Vec<String>,
    /// Sampled parameters dropped for having lower rank.
    pub discarded: Vec<String>,
    #[serde(skip)]
    pub basis: Vec<Vector>,
}

/// `L(ξ) = Σ_{t regular} ker π_t(ξ)`, estimated from finite nonzero samples.
/// Saturation is declared after two consecutive samples that do not enlarge
/// the span.
pub fn l_of_xi(pencil: &BracketPencil, xi: &[CycloNum], sample_ts: &[CycloNum]) -> KernelSpan {
    let n = pencil.dim();
    let evaluated: Vec<(CycloNum, Matrix, usize)> = sample_ts
        .iter()
        .map(|t| {
            let m = pencil.eval_at(&ParamValue::Finite(t.clone()), xi);
            let r = m.rank();
            (t.clone(), m, r)
        })
        .collect();
    let best = evaluated.iter().map(|(_, _, r)| *r).max().unwrap_or(0);
    let mut span: Vec<Vector> = Vec::new();
    let mut dim = 0;
    let mut stale = 0;
    let mut used = Vec::new();
    let mut discarded = Vec::new();
    for (t, m, r) in evaluated {
        if r < best {
            discarded.push(t.to_string());
            continue;
        }
        used.push(t.to_string());
        span.extend(m.nullspace());
        let d = span_rank(n, &span);
        if d > dim {
            dim = d;
            stale = 0;
        } else {
            stale += 1;
        }
    }
    let basis = if span.is_empty() {
        Vec::new()
    } else {
        let (r, piv) = Matrix::from_rows(span).rref();
        (0..piv.len()).map(|i| r.row(i).to_vec()).collect()
    };
    KernelSpan {
        dim,
        saturated: stale >= 2,
        used,
        discarded,
        basis,
    }
}

/// Rank of `π(ξ)` restricted to `V = ker π_∞(ξ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictedRank {
    pub dim_v: usize,
    pub rank: usize,
    pub expected: i64,
    pub matches: bool,
}

pub fn restricted_rank_check(pencil: &BracketPencil, xi: &[CycloNum], rank_g: usize) -> RestrictedRank {
    let v = kernel_at(pencil, &ParamValue::Infinity, xi);
    let dim_v = v.len();
    let rank = if v.is_empty() {
        0
    } else {
        let k = Matrix::from_cols(pencil.dim(), &v);
        let full = pencil.pi().eval(xi);
        (&(&k.transpose() * &full) * &k).rank()
    };
    let expected = dim_v as i64 - rank_g as i64;
    RestrictedRank {
        dim_v,
        rank,
        expected,
        matches: rank as i64 == expected,
    }
}

/// `b(q) = (dim q + ind q) / 2`.
pub fn b_of(dim: usize, ind: usize) -> usize {
    (dim + ind) / 2
}

/// The numbers attached to a grading of a reductive algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradingNumbers {
    pub dim_g: usize,
    pub dim_g0: usize,
    pub rank_g: usize,
    pub rank_g0: usize,
    pub b_g: usize,
    pub b_g0: usize,
    /// `b(g) − b(g_0) + rk g_0`.
    pub b_theta: usize,
    /// `Σ_j j · dim g_j`.
    pub d_theta: u64,
    /// Whether `D_θ = (m/2)(dim g − dim g_0)`.
    pub d_theta_identity: bool,
}

/// Computes `b(g)`, `b(g_0)`, `b(g,θ)` and `D_θ`. Ranks of the reductive
/// algebras `g` and `g_0` are their indices, estimated from `trials`
/// generic points.
pub fn grading_numbers(grading: &PeriodicGrading, seed: u64, trials: usize) -> Result<GradingNumbers, PencilError> {
    let g = grading.algebra();
    let rank_g = match g.rank() {
        Some(r) => r,
        None => index(g, trials, seed, IndexMethod::MonteCarlo)?.index_estimate,
    };
    let g0 = crate::liealg::fixed_subalgebra(grading)?;
    let rank_g0 = index(&g0, trials, seed, IndexMethod::MonteCarlo)?.index_estimate;
    let dim_g = g.dim();
    let dim_g0 = g0.dim();
    let b_g = b_of(dim_g, rank_g);
    let b_g0 = b_of(dim_g0, rank_g0);
    let d_theta = grading.d_theta();
    let m = grading.m() as u64;
    Ok(GradingNumbers {
        dim_g,
        dim_g0,
        rank_g,
        rank_g0,
        b_g,
        b_g0,
        b_theta: b_g - b_g0 + rank_g0,
        d_theta,
        d_theta_identity: 2 * d_theta == m * (dim_g - dim_g0) as u64,
    })
}

/// A seeded generic point of `g*` in adapted coordinates.
pub fn generic_point(n: usize, seed: u64) -> Vector {
    ScalarRng::new(seed).point(n, 1000)
}

/// Checks that the kernels of `π_t(ξ)` for two parameters agree (used to
/// compare a Casimir differential with a kernel).
pub fn spans_agree(n: usize, a: &[Vector], b: &[Vector]) -> bool {
    same_span(n, a, b)
}
