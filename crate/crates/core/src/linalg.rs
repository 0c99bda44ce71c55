//! Small dense complex linear algebra shared by the model, dynamics and
//! teleportation modules.
//!
//! Operators on the qubit pair are 4×4; superoperators act on column-stacked
//! density matrices and are 16×16, so `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

use nalgebra::{Matrix2, Matrix3, Matrix4, SMatrix, SVector, SymmetricEigen, Vector4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Ket4 = Vector4<C64>;
pub type SuperOp = SMatrix<C64, 16, 16>;
pub type Vec16 = SVector<C64, 16>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

/// σᶻ with the convention σᶻ|0⟩ = −|0⟩, so |0⟩ is the lower level.
pub fn pauli_z_ground_first() -> Mat2 {
    Mat2::new(-ONE, ZERO, ZERO, ONE)
}

/// Standard Pauli Z, diag(+1, −1), used by the recovery gates and the
/// correlation matrix.
pub fn pauli_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

/// σ⁻ = |0⟩⟨1|.
pub fn sigma_minus() -> Mat2 {
    Mat2::new(ZERO, ONE, ZERO, ZERO)
}

pub fn sigma_plus() -> Mat2 {
    sigma_minus().adjoint()
}

pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    a.kronecker(b)
}

pub fn kron4(a: &Mat4, b: &Mat4) -> SuperOp {
    a.kronecker(b)
}

/// Superoperator of `ρ ↦ A ρ B` under column stacking.
pub fn sandwich(a: &Mat4, b: &Mat4) -> SuperOp {
    kron4(&b.transpose(), a)
}

pub fn vectorize(m: &Mat4) -> Vec16 {
    Vec16::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &Vec16) -> Mat4 {
    Mat4::from_column_slice(v.as_slice())
}

pub fn hermitize(m: &Mat4) -> Mat4 {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &Mat4) -> C64 {
    m.trace()
}

pub fn max_abs<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_error(m: &Mat4) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn outer(a: &Ket4, b: &Ket4) -> Mat4 {
    a * b.adjoint()
}

/// Ascending eigenvalues of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &Mat4) -> [f64; 4] {
    let eig = SymmetricEigen::new(hermitize(m));
    let mut vals = [0.0; 4];
    for (slot, v) in vals.iter_mut().zip(eig.eigenvalues.iter()) {
        *slot = *v;
    }
    vals.sort_by(f64::total_cmp);
    vals
}

/// Principal square root of the Hermitian part of `m`, with negative
/// eigenvalues clamped to zero.
pub fn psd_sqrt(m: &Mat4) -> Mat4 {
    let eig = SymmetricEigen::new(hermitize(m));
    let mut out = Mat4::zeros();
    for k in 0..4 {
        let v = eig.eigenvectors.column(k);
        let w = eig.eigenvalues[k].max(0.0).sqrt();
        out += (v * v.adjoint()).scale(w);
    }
    out
}

pub fn singular_values3(m: &Matrix3<f64>) -> [f64; 3] {
    let sv = m.svd(false, false).singular_values;
    [sv[0], sv[1], sv[2]]
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on Pₙ.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sandwich_matches_direct_product() {
        let a = Mat4::from_fn(|i, j| C64::new(i as f64 + 0.5, j as f64 - 1.0));
        let b = Mat4::from_fn(|i, j| C64::new((i * j) as f64, 1.0 + i as f64));
        let rho = Mat4::from_fn(|i, j| C64::new((i + 2 * j) as f64, (i as f64) - (j as f64)));
        let direct = a * rho * b;
        let via = unvectorize(&(sandwich(&a, &b) * vectorize(&rho)));
        assert!(max_abs(&(direct - via)) < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // ∫ x^14 dx over [-1,1] = 2/15, degree 14 < 2·8
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((q - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_odd_order_has_center_node() {
        let (x, w) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
        assert!((w[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let m = Mat4::from_diagonal(&Vector4::new(c(0.1), c(0.2), c(0.3), c(0.4)));
        let s = psd_sqrt(&m);
        assert!(max_abs(&(s * s - m)) < 1e-14);
    }
}
