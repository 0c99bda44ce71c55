//! Density matrices of the qubit pair, tagged with the basis they are written in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigenvalues, hermiticity_error, hermitize, outer, trace, Ket4, Mat4};
use crate::model::EigenSystem;

pub const DEFAULT_POSITIVITY_TOL: f64 = 1e-8;
const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Local,
    Eigen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4 {
    pub matrix: Mat4,
    pub basis: Basis,
}

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positivity (down to `-positivity_tol`).
    // negated comparisons so NaN entries are rejected
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(matrix: Mat4, basis: Basis, positivity_tol: f64) -> Result<Self> {
        let herm = hermiticity_error(&matrix);
        if !(herm <= HERMITICITY_TOL) {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = trace(&matrix);
        if !((tr - c(1.0)).norm() <= TRACE_TOL) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&matrix)[0];
        if min < -positivity_tol {
            return Err(Error::PositivityViolation {
                min_eigenvalue: min,
                time: None,
            });
        }
        Ok(DensityMatrix4 { matrix, basis })
    }

    pub fn local(matrix: Mat4) -> Result<Self> {
        Self::new(matrix, Basis::Local, DEFAULT_POSITIVITY_TOL)
    }

    /// Wraps a matrix without any validation.
    pub fn from_raw(matrix: Mat4, basis: Basis) -> Self {
        DensityMatrix4 { matrix, basis }
    }

    pub fn pure(ket: &Ket4, basis: Basis) -> Self {
        let norm2 = ket.norm_squared();
        DensityMatrix4 {
            matrix: outer(ket, ket).unscale(norm2),
            basis,
        }
    }

    pub fn bell(m: u8, n: u8) -> Self {
        Self::pure(&crate::teleport::bell_state(m, n), Basis::Local)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix4 {
            matrix: Mat4::identity().scale(0.25),
            basis: Basis::Local,
        }
    }

    /// Product state |ab⟩ in the local basis.
    pub fn product(a: u8, b: u8) -> Self {
        let mut ket = Ket4::zeros();
        ket[(2 * (a & 1) + (b & 1)) as usize] = c(1.0);
        Self::pure(&ket, Basis::Local)
    }

    pub fn to_basis(&self, target: Basis, eig: &EigenSystem) -> Self {
        let matrix = match (self.basis, target) {
            (Basis::Local, Basis::Eigen) => eig.to_eigen(&self.matrix),
            (Basis::Eigen, Basis::Local) => eig.to_local(&self.matrix),
            _ => self.matrix,
        };
        DensityMatrix4 { matrix, basis: target }
    }

    pub fn hermitized(&self) -> Self {
        DensityMatrix4 {
            matrix: hermitize(&self.matrix),
            basis: self.basis,
        }
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Largest magnitude among the entries outside the diagonal and anti-diagonal.
    pub fn off_x_magnitude(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j && i + j != 3 {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Largest off-diagonal magnitude.
    pub fn max_coherence(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::model::{eigensystem, SystemParams};

    #[test]
    fn validation_rejects_bad_matrices() {
        let mut m = Mat4::identity().scale(0.25);
        assert!(DensityMatrix4::local(m).is_ok());
        m[(0, 1)] = c(0.1);
        assert!(matches!(DensityMatrix4::local(m), Err(Error::InvalidState(_))));
        let m = Mat4::identity().scale(0.3);
        assert!(matches!(DensityMatrix4::local(m), Err(Error::InvalidState(_))));
        let m = Mat4::from_diagonal(&Ket4::new(c(0.6), c(0.5), c(-0.05), c(-0.05)));
        assert!(matches!(
            DensityMatrix4::local(m),
            Err(Error::PositivityViolation { .. })
        ));
    }

    #[test]
    fn basis_round_trip() {
        let e = eigensystem(&SystemParams::new(12.0, 8.0, 30.0).unwrap()).unwrap();
        let rho = DensityMatrix4::bell(0, 1);
        let back = rho.to_basis(Basis::Eigen, &e).to_basis(Basis::Local, &e);
        assert_eq!(back.basis, Basis::Local);
        assert!(max_abs(&(back.matrix - rho.matrix)) < 1e-15);
    }

    #[test]
    fn product_state_index() {
        let r = DensityMatrix4::product(1, 0);
        assert_eq!(r.matrix[(2, 2)], c(1.0));
        assert_eq!(r.off_x_magnitude(), 0.0);
        assert_eq!(r.trace(), 1.0);
    }
}
