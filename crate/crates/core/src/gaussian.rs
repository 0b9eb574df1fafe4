//! Pure Gaussian states and their coherent-basis kernels.
//!
//! A pure `N`-mode Gaussian state `|Psi>` with covariance matrix `V`
//! (`qqpp` ordering, vacuum `V = I/2`) and mean `x_beta` is written as
//!
//! ```text
//! |Psi> = \int d^{2N}x  K(x) G(x, x_beta) |alpha(x)>,
//! K(x)  = (2 pi)^{-N} (det Gamma)^{-1/4} exp(-x^T B x / 2),   Gamma = V + I/2,
//! ```
//!
//! where `alpha_k = (q_k + i p_k)/sqrt(2)`. The complex symmetric kernel `B`
//! satisfies `B + B^* = Gamma^{-1}` and is assembled from the blocks
//! `Gamma^{-1} = [[A, C], [C^T, B]]`.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, chi, max_asymmetry, max_asymmetry_c, re_part, sym_eigen_range, sym_matrix_function,
    symmetrize, to_complex, to_complex_vec, CMatrix, CVector, RMatrix, RVector, C64, I,
};

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const PURITY_TOL: f64 = 1e-9;
pub const MIN_RCOND: f64 = 1e-14;

/// A pure Gaussian state given by its covariance matrix and mean vector.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPureState {
    n_modes: usize,
    v: RMatrix,
    disp: RVector,
}

impl GaussianPureState {
    pub fn new(v: RMatrix, disp: RVector) -> Result<Self> {
        let dim = v.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || v.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim.max(2) + dim % 2,
                found: v.ncols(),
            });
        }
        if disp.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: disp.len(),
            });
        }
        let asym = max_asymmetry(&v);
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let v = symmetrize(&v);
        let gamma = &v + RMatrix::identity(dim, dim) * 0.5;
        let (min, max) = sym_eigen_range(&gamma);
        let rcond = if max > 0.0 { min / max } else { 0.0 };
        if !(rcond >= MIN_RCOND) {
            return Err(Error::GammaNotInvertible(rcond));
        }
        let det2v = (&v * 2.0).determinant();
        if !((det2v - 1.0).abs() <= PURITY_TOL) {
            return Err(Error::NotPure(det2v));
        }
        Ok(Self {
            n_modes: dim / 2,
            v,
            disp,
        })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        let dim = 2 * n_modes;
        Self {
            n_modes,
            v: RMatrix::identity(dim, dim) * 0.5,
            disp: RVector::zeros(dim),
        }
    }

    /// Single-mode squeezed vacuum with `V = diag(e^{2r}, e^{-2r})/2`; for
    /// `r > 0` the position quadrature is anti-squeezed. This is the graph
    /// state of the one-vertex graph `G = (1)`.
    pub fn squeezed_vacuum(r: f64) -> Self {
        Self {
            n_modes: 1,
            v: RMatrix::from_diagonal(&RVector::from_vec(vec![
                0.5 * (2.0 * r).exp(),
                0.5 * (-2.0 * r).exp(),
            ])),
            disp: RVector::zeros(2),
        }
    }

    /// Two-mode squeezed vacuum `sum_n tanh^n r / cosh r |n, n>`, the graph
    /// state of `G = [[0, 1], [1, 0]]`.
    pub fn two_mode_squeezed(r: f64) -> Self {
        GraphSpec::two_mode(r)
            .covariance()
            .expect("two-mode graph is symmetric")
    }

    /// `V = S S^T / 2` for a symplectic `S` in `qqpp` ordering.
    pub fn from_symplectic(s: &RMatrix) -> Result<Self> {
        let v = s * s.transpose() * 0.5;
        let dim = v.nrows();
        Self::new(symmetrize(&v), RVector::zeros(dim))
    }

    pub fn with_displacement(mut self, disp: RVector) -> Result<Self> {
        if disp.len() != 2 * self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.n_modes,
                found: disp.len(),
            });
        }
        self.disp = disp;
        Ok(self)
    }

    /// Tensor product; modes of `self` come first.
    pub fn product(&self, other: &Self) -> Self {
        let (n1, n2) = (self.n_modes, other.n_modes);
        let n = n1 + n2;
        let mut v = RMatrix::zeros(2 * n, 2 * n);
        let mut disp = RVector::zeros(2 * n);
        let place = |v: &mut RMatrix, disp: &mut RVector, src: &Self, offset: usize| {
            let m = src.n_modes;
            let map = |i: usize| if i < m { offset + i } else { n + offset + i - m };
            for i in 0..2 * m {
                disp[map(i)] = src.disp[i];
                for j in 0..2 * m {
                    v[(map(i), map(j))] = src.v[(i, j)];
                }
            }
        };
        place(&mut v, &mut disp, self, 0);
        place(&mut v, &mut disp, other, n1);
        Self {
            n_modes: n,
            v,
            disp,
        }
    }

    /// Passive linear optics acting on coherent amplitudes as `alpha -> U alpha`.
    pub fn apply_passive(&self, u: &CMatrix) -> Result<Self> {
        let n = self.n_modes;
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.nrows(),
            });
        }
        let defect = crate::linalg::unitarity_defect(u);
        if defect > 1e-10 {
            return Err(Error::NotUnitary(defect));
        }
        let o = passive_symplectic(u);
        let v = symmetrize(&(&o * &self.v * o.transpose()));
        let disp = &o * &self.disp;
        Self::new(v, disp)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn covariance(&self) -> &RMatrix {
        &self.v
    }

    pub fn displacement(&self) -> &RVector {
        &self.disp
    }

    pub fn gamma(&self) -> RMatrix {
        let dim = 2 * self.n_modes;
        &self.v + RMatrix::identity(dim, dim) * 0.5
    }

    pub fn kernel(&self) -> Result<KKernel> {
        build_k_kernel(self)
    }
}

/// Real orthogonal-symplectic matrix `[[Re U, -Im U], [Im U, Re U]]`.
pub fn passive_symplectic(u: &CMatrix) -> RMatrix {
    let n = u.nrows();
    let mut o = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = u[(i, j)];
            o[(i, j)] = z.re;
            o[(i, n + j)] = -z.im;
            o[(n + i, j)] = z.im;
            o[(n + i, n + j)] = z.re;
        }
    }
    o
}

/// Blocks `(A, B, C)` of `Gamma^{-1} = [[A, C], [C^T, B]]`.
pub fn gamma_inverse_blocks(state: &GaussianPureState) -> Result<(RMatrix, RMatrix, RMatrix)> {
    let n = state.n_modes;
    let inv = gamma_inverse(state)?;
    let a = symmetrize(&inv.view((0, 0), (n, n)).into_owned());
    let b = symmetrize(&inv.view((n, n), (n, n)).into_owned());
    let cc = inv.view((0, n), (n, n)).into_owned();
    Ok((a, b, cc))
}

fn gamma_inverse(state: &GaussianPureState) -> Result<RMatrix> {
    let gamma = state.gamma();
    let (min, max) = sym_eigen_range(&gamma);
    let rcond = if max > 0.0 { min / max } else { 0.0 };
    if !(rcond >= MIN_RCOND) {
        return Err(Error::GammaNotInvertible(rcond));
    }
    gamma
        .try_inverse()
        .map(|m| symmetrize(&m))
        .ok_or(Error::GammaNotInvertible(rcond))
}

/// The coherent-basis kernel of a pure Gaussian state.
#[derive(Clone, Debug, PartialEq)]
pub struct KKernel {
    n_modes: usize,
    b: CMatrix,
    det_gamma: f64,
    disp: RVector,
}

impl KKernel {
    /// Assembles a kernel from its parts after checking the invariants
    /// `B = B^T` and `Re(B + I/2)` positive definite.
    pub fn from_parts(b: CMatrix, det_gamma: f64, disp: RVector) -> Result<Self> {
        let dim = b.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || b.ncols() != dim || disp.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: disp.len(),
            });
        }
        let asym = max_asymmetry_c(&b);
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        if !(det_gamma > 0.0) {
            return Err(Error::GammaNotInvertible(det_gamma));
        }
        let h = &b + CMatrix::identity(dim, dim) * c(0.5, 0.0);
        crate::linalg::ensure_re_pd(&h)?;
        Ok(Self {
            n_modes: dim / 2,
            b: crate::linalg::symmetrize_c(&b),
            det_gamma,
            disp,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn det_gamma(&self) -> f64 {
        self.det_gamma
    }

    pub fn displacement(&self) -> &RVector {
        &self.disp
    }

    pub fn is_displaced(&self) -> bool {
        self.disp.iter().any(|x| *x != 0.0)
    }

    /// `(2 pi)^{-N} (det Gamma)^{-1/4}`.
    pub fn norm(&self) -> C64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        c(two_pi.powi(-(self.n_modes as i32)) * self.det_gamma.powf(-0.25), 0.0)
    }

    /// `Gamma^{-1}` reconstructed as `B + B^*`.
    pub fn gamma_inverse(&self) -> CMatrix {
        &self.b + self.b.map(|z| z.conj())
    }

    /// `K(x) = norm * exp(-x^T B x / 2)`, ignoring displacement.
    pub fn eval(&self, x_alpha: &[f64]) -> Result<C64> {
        k_eval(self, x_alpha)
    }

    /// Linear coefficient `b` such that `K(x) G(x, x_beta) = K(x) e^{b^T x} e^{c}`.
    pub fn displacement_linear(&self) -> CVector {
        let xb = to_complex_vec(&self.disp);
        let x = chi(self.n_modes);
        let anti = (&x - x.transpose()) * c(0.25, 0.0);
        &self.b * &xb + anti * &xb
    }

    /// Constant `exp(-x_beta^T B x_beta / 2)` of the displacement factor.
    pub fn displacement_constant(&self) -> C64 {
        let xb = to_complex_vec(&self.disp);
        (crate::linalg::bilinear(&xb, &self.b, &xb) * c(-0.5, 0.0)).exp()
    }
}

/// Builds `B` from the covariance matrix.
pub fn build_k_kernel(state: &GaussianPureState) -> Result<KKernel> {
    let n = state.n_modes;
    let (a, bb, cc) = gamma_inverse_blocks(state)?;
    let half_i = c(0.0, 0.5);
    let a_c = to_complex(&a);
    let b_c = to_complex(&bb);
    let c_c = to_complex(&cc);
    let c_sym = to_complex(&(&cc + cc.transpose()));
    let a_minus_b = to_complex(&(&a - &bb));

    let mut b = CMatrix::zeros(2 * n, 2 * n);
    b.view_mut((0, 0), (n, n))
        .copy_from(&(&a_c + &c_sym * half_i));
    b.view_mut((0, n), (n, n))
        .copy_from(&(&c_c - &a_minus_b * half_i));
    b.view_mut((n, 0), (n, n))
        .copy_from(&(c_c.transpose() - &a_minus_b * half_i));
    b.view_mut((n, n), (n, n))
        .copy_from(&(&b_c - &c_sym * half_i));
    b *= c(0.5, 0.0);

    let det_gamma = state.gamma().determinant();
    KKernel::from_parts(b, det_gamma, state.disp.clone())
}

pub fn k_eval(kernel: &KKernel, x_alpha: &[f64]) -> Result<C64> {
    let dim = 2 * kernel.n_modes;
    if x_alpha.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x_alpha.len(),
        });
    }
    let x = CVector::from_iterator(dim, x_alpha.iter().map(|v| c(*v, 0.0)));
    let q = crate::linalg::bilinear(&x, &kernel.b, &x);
    Ok(kernel.norm() * (q * c(-0.5, 0.0)).exp())
}

/// `G(x_alpha, x_beta) = exp[(x_alpha, x_beta)^T D (x_alpha, x_beta) / 4]` with
/// `D = [[0, 2B + X], [2B - X, -2B]]`, evaluated as a block quadratic form on
/// the stacked `4N` vector.
pub fn displacement_factor(kernel: &KKernel, x_alpha: &[f64], x_beta: &[f64]) -> Result<C64> {
    let n = kernel.n_modes;
    for v in [x_alpha, x_beta] {
        if v.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: v.len(),
            });
        }
    }
    let two_b = &kernel.b * c(2.0, 0.0);
    let x = chi(n);
    let mut d = CMatrix::zeros(4 * n, 4 * n);
    d.view_mut((0, 2 * n), (2 * n, 2 * n)).copy_from(&(&two_b + &x));
    d.view_mut((2 * n, 0), (2 * n, 2 * n)).copy_from(&(&two_b - &x));
    d.view_mut((2 * n, 2 * n), (2 * n, 2 * n)).copy_from(&(-&two_b));
    let z = CVector::from_iterator(
        4 * n,
        x_alpha.iter().chain(x_beta.iter()).map(|v| c(*v, 0.0)),
    );
    Ok((crate::linalg::bilinear(&z, &d, &z) * c(0.25, 0.0)).exp())
}

/// Graph (cluster) state specification: adjacency `G` and uniform squeezing `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(rename = "G", with = "rmatrix_rows")]
    pub g: RMatrix,
    pub r: f64,
}

impl GraphSpec {
    pub fn new(g: RMatrix, r: f64) -> Result<Self> {
        let spec = Self { g, r };
        spec.validate()?;
        Ok(spec)
    }

    pub fn two_mode(r: f64) -> Self {
        Self {
            g: RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            r,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.g.nrows() == 0 || self.g.nrows() != self.g.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.g.nrows(),
                found: self.g.ncols(),
            });
        }
        let asym = max_asymmetry(&self.g);
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        if !self.r.is_finite() {
            return Err(Error::InvalidParameter(format!("r = {}", self.r)));
        }
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        self.g.nrows()
    }

    pub fn is_self_inverse(&self) -> bool {
        let n = self.n_modes();
        let sq = &self.g * &self.g;
        (sq - RMatrix::identity(n, n)).amax() <= SYMMETRY_TOL
    }

    pub fn covariance(&self) -> Result<GaussianPureState> {
        cluster_covariance(self)
    }

    pub fn kernel(&self) -> Result<KKernel> {
        cluster_b_matrix(self)
    }
}

/// `V = S_r S_r^T / 2` with `S_r = diag(e^{rG}, e^{-rG})`.
pub fn cluster_covariance(spec: &GraphSpec) -> Result<GaussianPureState> {
    spec.validate()?;
    let n = spec.n_modes();
    let r = spec.r;
    let up = sym_matrix_function(&spec.g, |l| (2.0 * r * l).exp());
    let down = sym_matrix_function(&spec.g, |l| (-2.0 * r * l).exp());
    let mut v = RMatrix::zeros(2 * n, 2 * n);
    v.view_mut((0, 0), (n, n)).copy_from(&(up * 0.5));
    v.view_mut((n, n), (n, n)).copy_from(&(down * 0.5));
    GaussianPureState::new(v, RVector::zeros(2 * n))
}

/// Kernel of a graph state. Uses `B = I/2 + tanh(r)/2 [[-G, iG], [iG, G]]`
/// when `G^2 = I`, otherwise the general matrix-function route.
pub fn cluster_b_matrix(spec: &GraphSpec) -> Result<KKernel> {
    spec.validate()?;
    if spec.is_self_inverse() {
        let n = spec.n_modes();
        let t = spec.r.tanh();
        let det_gamma = spec.r.cosh().powi(2 * n as i32);
        KKernel::from_parts(graph_b(&(&spec.g * t), n), det_gamma, RVector::zeros(2 * n))
    } else {
        cluster_b_matrix_general(spec)
    }
}

/// General route: `tanh(rG) = (e^{2rG} - I)(e^{2rG} + I)^{-1}` with
/// `e^{2rG}` from the symmetric eigendecomposition of `G`.
pub fn cluster_b_matrix_general(spec: &GraphSpec) -> Result<KKernel> {
    spec.validate()?;
    let n = spec.n_modes();
    let r = spec.r;
    let e = sym_matrix_function(&spec.g, |l| (2.0 * r * l).exp());
    let id = RMatrix::identity(n, n);
    let plus_inv = (&e + &id)
        .try_inverse()
        .ok_or(Error::GammaNotInvertible(0.0))?;
    let t = symmetrize(&((&e - &id) * plus_inv));
    let eig = SymmetricEigen::new(symmetrize(&spec.g));
    let det_gamma: f64 = eig.eigenvalues.iter().map(|l| (r * l).cosh().powi(2)).product();
    KKernel::from_parts(graph_b(&t, n), det_gamma, RVector::zeros(2 * n))
}

fn graph_b(t: &RMatrix, n: usize) -> CMatrix {
    let t = to_complex(t);
    let mut b = CMatrix::identity(2 * n, 2 * n) * c(0.5, 0.0);
    let half = c(0.5, 0.0);
    let mut add = |r0: usize, c0: usize, m: CMatrix| {
        let mut view = b.view_mut((r0, c0), (n, n));
        view += m;
    };
    add(0, 0, -&t * half);
    add(0, n, &t * (I * half));
    add(n, 0, &t * (I * half));
    add(n, n, &t * half);
    b
}

/// Smallest eigenvalue of `Re(B + I/2)`, used in invariant checks.
pub fn min_re_h_eigenvalue(kernel: &KKernel) -> f64 {
    let dim = 2 * kernel.n_modes;
    let h = kernel.b() + CMatrix::identity(dim, dim) * c(0.5, 0.0);
    sym_eigen_range(&re_part(&h)).0
}

/// Serde helper for row-major nested arrays.
pub(crate) mod rmatrix_rows {
    use super::RMatrix;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &RMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..m.nrows())
            .map(|i| m.row(i).iter().cloned().collect())
            .collect();
        serde::Serialize::serialize(&rows, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RMatrix, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Ok(RMatrix::from_fn(n, m, |i, j| rows[i][j]))
    }
}
