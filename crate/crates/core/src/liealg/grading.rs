use std::sync::Arc;

use num_traits::Zero;

use super::{AlgebraKind, Automorphism, LieAlgebra, LieError};
use crate::field::CycloNum;
use crate::linalg::{Matrix, Vector};
use crate::poisson::StructureTensor;

/// The `Z_m`-grading `g = ⊕ g_j` by eigenspaces of `θ`, materialized as a
/// homogeneous basis sorted by grade.
#[derive(Clone, Debug)]
pub struct PeriodicGrading {
    theta: Automorphism,
    conductor: u32,
    components: Vec<Vec<Vector>>,
    /// Columns are the adapted basis vectors `y_a` in original coordinates.
    basis: Matrix,
    basis_inv: Matrix,
    grades: Vec<u32>,
    adapted: StructureTensor,
    adapted_form: Option<Matrix>,
}

/// Computes `g_j = ker(θ - ζ^j)` for `j = 0..m-1` exactly.
pub fn eigenspace_grading(theta: &Automorphism) -> Result<PeriodicGrading, LieError> {
    let m = theta.order();
    let conductor = num_integer::lcm(m, theta.entry_conductor()).max(1);
    let n = theta.algebra().dim();
    let a = Matrix::from_fn(n, n, |i, j| {
        let x = &theta.matrix()[(i, j)];
        if x.is_rational() {
            x.clone()
        } else {
            x.embed(conductor).expect("conductor divides lcm")
        }
    });
    let step = (conductor / m) as i64;
    let mut components = Vec::with_capacity(m as usize);
    let mut cols = Vec::with_capacity(n);
    let mut grades = Vec::with_capacity(n);
    for j in 0..m {
        let ev = CycloNum::zeta_pow(conductor, step * j as i64);
        let shifted = a.sub(&Matrix::identity(n).scale(&ev));
        let ker = shifted.nullspace();
        for v in &ker {
            cols.push(v.clone());
            grades.push(j);
        }
        components.push(ker);
    }
    if cols.len() != n {
        return Err(LieError::GradingFailure(format!(
            "eigenspaces have total dimension {} instead of {n}",
            cols.len()
        )));
    }
    let basis = Matrix::from_cols(n, &cols);
    let basis_inv = basis
        .inverse()
        .ok_or_else(|| LieError::GradingFailure("eigenvectors are dependent".into()))?;
    let adapted = theta.algebra().tensor().change_basis(&basis, &basis_inv);
    for (&(a_, b_), form) in adapted.entries() {
        let want = (grades[a_] + grades[b_]) % m;
        if let Some((k, _)) = form.iter().find(|(k, _)| grades[*k] != want) {
            return Err(LieError::GradingFailure(format!(
                "[y{}, y{}] has a component on y{} of grade {} instead of {want}",
                a_ + 1,
                b_ + 1,
                k + 1,
                grades[*k]
            )));
        }
    }
    let adapted_form = theta
        .algebra()
        .form()
        .map(|g| &(&basis.transpose() * g) * &basis);
    Ok(PeriodicGrading {
        theta: theta.clone(),
        conductor,
        components,
        basis,
        basis_inv,
        grades,
        adapted,
        adapted_form,
    })
}

impl PeriodicGrading {
    pub fn theta(&self) -> &Automorphism {
        &self.theta
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        self.theta.algebra()
    }

    /// The period `m = ord θ`.
    pub fn m(&self) -> u32 {
        self.theta.order()
    }

    /// Conductor of the scalar field all adapted data lives in.
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn dim(&self) -> usize {
        self.grades.len()
    }

    pub fn components(&self) -> &[Vec<Vector>] {
        &self.components
    }

    pub fn component_dims(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    /// Grade of each adapted basis vector, non-decreasing.
    pub fn grades(&self) -> &[u32] {
        &self.grades
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_inv(&self) -> &Matrix {
        &self.basis_inv
    }

    /// Structure constants in the adapted basis.
    pub fn adapted_tensor(&self) -> &StructureTensor {
        &self.adapted
    }

    pub fn adapted_form(&self) -> Option<&Matrix> {
        self.adapted_form.as_ref()
    }

    /// Indices of the adapted basis vectors spanning `g_j`.
    pub fn indices_of_grade(&self, j: u32) -> Vec<usize> {
        (0..self.dim()).filter(|&a| self.grades[a] == j).collect()
    }

    /// The algebra itself, written in the adapted basis.
    pub fn adapted_algebra(&self) -> LieAlgebra {
        let labels = (0..self.dim())
            .map(|a| format!("y{}[{}]", a + 1, self.grades[a]))
            .collect();
        LieAlgebra::new_unchecked(
            labels,
            self.adapted.clone(),
            self.adapted_form.clone(),
            self.algebra().rank(),
            AlgebraKind::Raw,
        )
    }

    /// `D_θ = Σ_j j · dim g_j`.
    pub fn d_theta(&self) -> u64 {
        self.grades.iter().map(|&g| g as u64).sum()
    }

    /// Original coordinates of a vector given in the adapted basis.
    pub fn from_adapted(&self, w: &[CycloNum]) -> Vector {
        self.basis.mul_vec(w)
    }

    pub fn to_adapted(&self, v: &[CycloNum]) -> Vector {
        self.basis_inv.mul_vec(v)
    }

    /// Projection of an original-coordinate vector onto `g_j`, in original
    /// coordinates.
    pub fn project(&self, v: &[CycloNum], j: u32) -> Vector {
        let mut w = self.to_adapted(v);
        for (a, c) in w.iter_mut().enumerate() {
            if self.grades[a] != j {
                *c = CycloNum::zero();
            }
        }
        self.from_adapted(&w)
    }
}

/// `g_0 = g^θ` with the restricted form, in the adapted basis of `g_0`.
pub fn fixed_subalgebra(grading: &PeriodicGrading) -> Result<LieAlgebra, LieError> {
    let idx = grading.indices_of_grade(0);
    let tensor = grading.adapted.restrict(&idx).ok_or_else(|| {
        LieError::GradingFailure("fixed points are not closed under the bracket".into())
    })?;
    let form = grading.adapted_form.as_ref().map(|g| {
        Matrix::from_fn(idx.len(), idx.len(), |a, b| g[(idx[a], idx[b])].clone())
    });
    let labels = idx.iter().map(|a| format!("y{}", a + 1)).collect();
    let rank = if grading.m() == 1 {
        grading.algebra().rank()
    } else {
        None
    };
    let alg = LieAlgebra::new_unchecked(labels, tensor, form, rank, AlgebraKind::Raw);
    alg.validate()?;
    Ok(alg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_classical, cartan_involution, cyclic_permutation, Family};

    #[test]
    fn swap_and_cycle_dimensions() {
        let h = build_classical(Family::Sl, 2).unwrap();
        let swap = eigenspace_grading(&cyclic_permutation(&h, 2).unwrap()).unwrap();
        assert_eq!(swap.component_dims(), vec![3, 3]);
        assert_eq!(swap.d_theta(), 3);
        let cyc = eigenspace_grading(&cyclic_permutation(&h, 3).unwrap()).unwrap();
        assert_eq!(cyc.component_dims(), vec![3, 3, 3]);
        assert_eq!(cyc.conductor(), 3);
        let g0 = fixed_subalgebra(&swap).unwrap();
        assert_eq!(g0.dim(), 3);
    }

    #[test]
    fn identity_grading() {
        let h = Arc::new(build_classical(Family::Sl, 2).unwrap());
        let gr = eigenspace_grading(&Automorphism::identity(h)).unwrap();
        assert_eq!(gr.component_dims(), vec![3]);
        assert_eq!(fixed_subalgebra(&gr).unwrap().dim(), 3);
    }

    #[test]
    fn cartan_involution_components() {
        let h = Arc::new(build_classical(Family::Sl, 2).unwrap());
        let gr = eigenspace_grading(&cartan_involution(h).unwrap()).unwrap();
        assert_eq!(gr.component_dims(), vec![1, 2]);
        let g0 = fixed_subalgebra(&gr).unwrap();
        assert!(g0.is_abelian());
    }
}
