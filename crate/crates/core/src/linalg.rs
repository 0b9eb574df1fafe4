//! Small dense linear-algebra helpers shared by the rest of the crate.
//!
//! Phase-space vectors are always laid out in `qqpp` order: the first `N`
//! entries are the position quadratures of modes `0..N`, the next `N` are the
//! momentum quadratures.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

pub fn to_complex_vec(v: &RVector) -> CVector {
    v.map(|x| C64::new(x, 0.0))
}

pub fn re_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.re)
}

pub fn im_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.im)
}

pub fn max_asymmetry(m: &RMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn max_asymmetry_c(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).norm());
        }
    }
    worst
}

pub fn symmetrize(m: &RMatrix) -> RMatrix {
    (m + m.transpose()) * 0.5
}

pub fn symmetrize_c(m: &CMatrix) -> CMatrix {
    (m + m.transpose()) * C64::new(0.5, 0.0)
}

pub fn require_square(m_rows: usize, m_cols: usize) -> Result<()> {
    if m_rows != m_cols {
        return Err(Error::DimensionMismatch {
            expected: m_rows,
            found: m_cols,
        });
    }
    Ok(())
}

/// Extreme eigenvalues of a real symmetric matrix.
pub fn sym_eigen_range(m: &RMatrix) -> (f64, f64) {
    if m.nrows() == 0 {
        return (1.0, 1.0);
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// Applies a scalar function to a real symmetric matrix through its
/// orthogonal eigendecomposition.
pub fn sym_matrix_function(m: &RMatrix, f: impl Fn(f64) -> f64) -> RMatrix {
    let eig = SymmetricEigen::new(symmetrize(m));
    let q = &eig.eigenvectors;
    let d = RMatrix::from_diagonal(&eig.eigenvalues.map(f));
    q * d * q.transpose()
}

/// Re(M) positive definite with smallest eigenvalue above `1e-12` times the
/// largest.
pub fn ensure_re_pd(m: &CMatrix) -> Result<()> {
    let (min, max) = sym_eigen_range(&re_part(m));
    if !(max > 0.0) || !(min > 1e-12 * max) {
        return Err(Error::KernelNotConvergent { min, max });
    }
    Ok(())
}

/// `sqrt(det M)` for complex symmetric `M` with positive-definite real part,
/// continued analytically from the real positive root of `det Re(M)`.
///
/// Writing `M = R^{1/2} (I + i K) R^{1/2}` with `K = R^{-1/2} Im(M) R^{-1/2}`
/// real symmetric, every eigenvalue of `I + i K` has unit real part, so the
/// product of principal roots is continuous along `Re(M) + i t Im(M)`,
/// `t in [0, 1]`. This coincides with the product of principal square roots
/// of the eigenvalues of `M`.
pub fn det_sqrt(m: &CMatrix) -> Result<C64> {
    ensure_re_pd(m)?;
    let r = symmetrize(&re_part(m));
    let s = symmetrize(&im_part(m));
    let eig = SymmetricEigen::new(r);
    let q = &eig.eigenvectors;
    let inv_sqrt = RMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()));
    let r_inv_sqrt = q * inv_sqrt * q.transpose();
    let k = symmetrize(&(&r_inv_sqrt * s * &r_inv_sqrt));
    let kappa = SymmetricEigen::new(k).eigenvalues;
    let mut acc = C64::new(1.0, 0.0);
    for rho in eig.eigenvalues.iter() {
        acc *= rho.sqrt();
    }
    for kap in kappa.iter() {
        acc *= C64::new(1.0, *kap).sqrt();
    }
    Ok(acc)
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    m.clone().try_inverse().ok_or(Error::KernelNotConvergent {
        min: 0.0,
        max: 0.0,
    })
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u * u.adjoint()), &CMatrix::identity(n, n))
}

/// `N x 2N` map from a `qqpp` phase-space point to the complex coherent
/// amplitudes `alpha_k = (q_k + i p_k) / sqrt(2)`.
pub fn coherent_map(n: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut e = CMatrix::zeros(n, 2 * n);
    for k in 0..n {
        e[(k, k)] = C64::new(s, 0.0);
        e[(k, n + k)] = C64::new(0.0, s);
    }
    e
}

/// The `2N x 2N` matrix `[[I, iI], [-iI, I]]` that couples bra and ket
/// quadratures in coherent-state overlaps.
pub fn chi(n: usize) -> CMatrix {
    let mut x = CMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        x[(k, k)] = C64::new(1.0, 0.0);
        x[(n + k, n + k)] = C64::new(1.0, 0.0);
        x[(k, n + k)] = I;
        x[(n + k, k)] = -I;
    }
    x
}

/// Linear form `q_k + i p_k` (or `q_k - i p_k` when `conjugate`) on a
/// `2N`-dimensional phase space.
pub fn mode_form(n: usize, k: usize, conjugate: bool) -> CVector {
    let mut v = CVector::zeros(2 * n);
    v[k] = C64::new(1.0, 0.0);
    v[n + k] = if conjugate { -I } else { I };
    v
}

pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = CMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

pub fn stack(a: &CVector, b: &CVector) -> CVector {
    let mut v = CVector::zeros(a.len() + b.len());
    v.rows_mut(0, a.len()).copy_from(a);
    v.rows_mut(a.len(), b.len()).copy_from(b);
    v
}

/// Bilinear `x^T M y` without conjugation.
pub fn bilinear(x: &CVector, m: &CMatrix, y: &CVector) -> C64 {
    (x.transpose() * m * y)[(0, 0)]
}

pub fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
