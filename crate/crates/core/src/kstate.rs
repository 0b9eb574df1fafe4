//! Non-Gaussian states written as Gaussian K-integrals with polynomial
//! prefactors over coherent states.
//!
//! Every state handled here has the form
//!
//! ```text
//! |psi> = scale * weight * \int d^d x  exp(-x^T M x / 2 + b^T x) prod_j (l_j^T x)^{p_j} |W x>
//! ```
//!
//! where `x` runs over the parent's `qqpp` phase space and `W` maps it to the
//! complex coherent labels of the output modes. Photon subtraction,
//! photon-number projection and passive optics act only on `|W x>`, so each
//! operation updates `(M, monomials, W)` and leaves the integral unevaluated.
//! All numbers come out of [`crate::integral::integrate`].

use crate::error::{Error, Result};
use crate::gaussian::KKernel;
use crate::integral::{integrate, ComplexGaussianIntegrand, Monomial};
use crate::linalg::{
    c, coherent_map, factorial, re_part, to_complex, unitarity_defect, CMatrix, CVector, C64,
};

pub const UNITARY_TOL: f64 = 1e-10;

/// `(coefficient, label)` for photon subtraction from a single coherent
/// state: a beamsplitter of transmissivity `tau` followed by detecting `m`
/// photons in the reflected port maps `|alpha>` to `coefficient |sqrt(tau) alpha>`.
pub fn subtract_coherent(alpha: C64, m: u32, tau: f64) -> (C64, C64) {
    let refl = (1.0 - tau).max(0.0).sqrt();
    let coefficient = c(-refl, 0.0).powu(m) / factorial(m).sqrt()
        * alpha.powu(m)
        * (-(1.0 - tau) * alpha.norm_sqr() / 2.0).exp();
    (coefficient, alpha * tau.sqrt())
}

/// The unevaluated integral representation of a (possibly unnormalized) ket.
#[derive(Clone, Debug, PartialEq)]
pub struct KetIntegrand {
    pub quad: CMatrix,
    pub linear: CVector,
    pub scale: C64,
    /// Non-negative factor kept apart from `scale` so that a vanishing
    /// success probability does not destroy the state's shape.
    pub weight: f64,
    pub monomials: Vec<Monomial>,
    pub labels: CMatrix,
}

impl KetIntegrand {
    pub fn from_kernel(kernel: &KKernel) -> Self {
        let n = kernel.n_modes();
        let (linear, constant) = if kernel.is_displaced() {
            (kernel.displacement_linear(), kernel.displacement_constant())
        } else {
            (CVector::zeros(2 * n), c(1.0, 0.0))
        };
        Self {
            quad: kernel.b().clone(),
            linear,
            scale: kernel.norm() * constant,
            weight: 1.0,
            monomials: Vec::new(),
            labels: coherent_map(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.quad.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.labels.nrows()
    }

    pub fn degree(&self) -> usize {
        self.monomials.iter().map(|m| m.power).sum()
    }

    fn label_row(&self, mode: usize) -> CVector {
        self.labels.row(mode).transpose()
    }

    /// `Re(W^dag W)` restricted to one output mode.
    fn label_gram(&self, mode: usize) -> CMatrix {
        let w = self.labels.row(mode).into_owned();
        to_complex(&re_part(&(w.adjoint() * w)))
    }

    fn gram(&self) -> CMatrix {
        to_complex(&re_part(&(self.labels.adjoint() * &self.labels)))
    }

    /// `<other|self>` without the weights.
    pub fn shape_inner(&self, bra: &KetIntegrand) -> Result<C64> {
        let (d_o, d_s) = (self.dim(), bra.dim());
        if self.n_modes() != bra.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: bra.n_modes(),
            });
        }
        let cross = bra.labels.adjoint() * &self.labels;
        let mut quad = CMatrix::zeros(d_o + d_s, d_o + d_s);
        quad.view_mut((0, 0), (d_o, d_o))
            .copy_from(&(&self.quad + self.gram()));
        quad.view_mut((d_o, d_o), (d_s, d_s))
            .copy_from(&(bra.quad.map(|z| z.conj()) + bra.gram()));
        quad.view_mut((0, d_o), (d_o, d_s)).copy_from(&(-cross.transpose()));
        quad.view_mut((d_o, 0), (d_s, d_o)).copy_from(&(-&cross));
        let mut linear = CVector::zeros(d_o + d_s);
        linear.rows_mut(0, d_o).copy_from(&self.linear);
        linear
            .rows_mut(d_o, d_s)
            .copy_from(&bra.linear.map(|z| z.conj()));
        let mut monomials = Vec::with_capacity(self.monomials.len() + bra.monomials.len());
        for m in &self.monomials {
            let mut form = CVector::zeros(d_o + d_s);
            form.rows_mut(0, d_o).copy_from(&m.form);
            monomials.push(Monomial::new(form, m.power));
        }
        for m in &bra.monomials {
            let mut form = CVector::zeros(d_o + d_s);
            form.rows_mut(d_o, d_s).copy_from(&m.form.map(|z| z.conj()));
            monomials.push(Monomial::new(form, m.power));
        }
        let prefactor = bra.scale.conj() * self.scale;
        integrate(&ComplexGaussianIntegrand::new(quad, linear, prefactor, monomials))
    }

    /// `<gamma|self>` without the weight.
    pub fn shape_coherent_overlap(&self, gamma: &[C64]) -> Result<C64> {
        if gamma.len() != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: gamma.len(),
            });
        }
        let g = CVector::from_column_slice(gamma);
        let linear = &self.linear + self.labels.transpose() * g.map(|z| z.conj());
        let quad = &self.quad + self.gram();
        let prefactor = self.scale * (-g.norm_squared() / 2.0).exp();
        integrate(&ComplexGaussianIntegrand::new(
            quad,
            linear,
            prefactor,
            self.monomials.clone(),
        ))
    }

    /// `<n|self>` without the weight.
    pub fn shape_fock_amplitude(&self, n: &[u32]) -> Result<C64> {
        if n.len() != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: n.len(),
            });
        }
        let mut monomials = self.monomials.clone();
        let mut prefactor = self.scale;
        for (k, &nk) in n.iter().enumerate() {
            if nk > 0 {
                monomials.push(Monomial::new(self.label_row(k), nk as usize));
                prefactor /= factorial(nk).sqrt();
            }
        }
        let quad = &self.quad + self.gram();
        integrate(&ComplexGaussianIntegrand::new(
            quad,
            self.linear.clone(),
            prefactor,
            monomials,
        ))
    }

    fn subtract_mode(&mut self, mode: usize, m: u32, tau: f64) {
        let loss = 1.0 - tau;
        if loss > 0.0 {
            self.quad += self.label_gram(mode) * c(loss, 0.0);
        }
        if m > 0 {
            self.monomials
                .push(Monomial::new(self.label_row(mode), m as usize));
            let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
            self.scale *= sign / factorial(m).sqrt();
            self.weight *= loss.max(0.0).powf(m as f64 / 2.0);
        }
        let mut row = self.labels.row_mut(mode);
        row *= c(tau.sqrt(), 0.0);
    }

    fn project_mode(&mut self, mode: usize, n: u32) {
        self.quad += self.label_gram(mode);
        if n > 0 {
            self.monomials
                .push(Monomial::new(self.label_row(mode), n as usize));
            self.scale /= factorial(n).sqrt();
        }
    }
}

/// One step in the preparation history of a [`NonGaussianKState`].
#[derive(Clone, Debug, PartialEq)]
pub enum Operation {
    Subtract { mode: usize, photons: u32, tau: f64 },
    Interferometer(CMatrix),
    Herald { mode: usize, photons: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonGaussianKState {
    kernel: KKernel,
    history: Vec<Operation>,
    ket: KetIntegrand,
    shape_norm: Option<f64>,
}

impl NonGaussianKState {
    pub fn from_kernel(kernel: &KKernel) -> Self {
        Self {
            kernel: kernel.clone(),
            history: Vec::new(),
            ket: KetIntegrand::from_kernel(kernel),
            shape_norm: None,
        }
    }

    pub fn kernel(&self) -> &KKernel {
        &self.kernel
    }

    pub fn history(&self) -> &[Operation] {
        &self.history
    }

    pub fn ket(&self) -> &KetIntegrand {
        &self.ket
    }

    pub fn n_modes(&self) -> usize {
        self.ket.n_modes()
    }

    /// Complex `n_modes x 2N` map from integration variables to coherent labels.
    pub fn label_map(&self) -> &CMatrix {
        &self.ket.labels
    }

    /// Photon subtraction on every output mode, `m[i]` photons through a
    /// beamsplitter of transmissivity `tau[i]`.
    pub fn subtract(&self, m: &[u32], tau: &[f64]) -> Result<Self> {
        let n = self.n_modes();
        for len in [m.len(), tau.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        if let Some(bad) = tau.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(Error::InvalidTransmissivity(*bad));
        }
        let mut out = self.clone();
        out.shape_norm = None;
        for (mode, (&mi, &ti)) in m.iter().zip(tau.iter()).enumerate() {
            if mi == 0 && ti == 1.0 {
                continue;
            }
            out.ket.subtract_mode(mode, mi, ti);
            out.history.push(Operation::Subtract {
                mode,
                photons: mi,
                tau: ti,
            });
        }
        Ok(out)
    }

    /// Passive linear optics `alpha -> U alpha` on the output labels.
    pub fn apply_interferometer(&self, u: &CMatrix) -> Result<Self> {
        let n = self.n_modes();
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.nrows(),
            });
        }
        let defect = unitarity_defect(u);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        let mut out = self.clone();
        out.ket.labels = u * &self.ket.labels;
        out.history.push(Operation::Interferometer(u.clone()));
        Ok(out)
    }

    /// Projects the listed output modes onto Fock states; those modes are
    /// removed from the label map. The result is unnormalized and its squared
    /// norm is the probability of the outcome.
    pub fn project(&self, modes: &[usize], counts: &[u32]) -> Result<Self> {
        let n = self.n_modes();
        if modes.len() != counts.len() {
            return Err(Error::InvalidPattern(format!(
                "{} modes for {} counts",
                modes.len(),
                counts.len()
            )));
        }
        let mut seen = vec![false; n];
        for &k in modes {
            if k >= n || seen[k] {
                return Err(Error::InvalidPattern(format!(
                    "mode {k} is out of range or repeated"
                )));
            }
            seen[k] = true;
        }
        let mut out = self.clone();
        out.shape_norm = None;
        for (&k, &nk) in modes.iter().zip(counts.iter()) {
            out.ket.project_mode(k, nk);
            out.history.push(Operation::Herald {
                mode: k,
                photons: nk,
            });
        }
        let keep: Vec<usize> = (0..n).filter(|k| !seen[*k]).collect();
        out.ket.labels = out.ket.labels.select_rows(keep.iter());
        Ok(out)
    }

    fn compute_shape_norm(&self) -> Result<f64> {
        if let Some(v) = self.shape_norm {
            return Ok(v);
        }
        let z = self.ket.shape_inner(&self.ket)?;
        if z.im.abs() > 1e-8 * z.norm() {
            return Err(Error::NonReal { re: z.re, im: z.im });
        }
        Ok(z.re)
    }

    /// `<psi|psi>` of the unnormalized state, i.e. the heralding probability.
    pub fn success_probability(&self) -> Result<f64> {
        let shape = self.compute_shape_norm()?;
        Ok(self.ket.weight * self.ket.weight * shape)
    }

    /// A copy carrying its cached norm; required before overlaps.
    pub fn normalized(&self) -> Result<Self> {
        let shape = self.compute_shape_norm()?;
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let mut out = self.clone();
        out.shape_norm = Some(shape);
        Ok(out)
    }

    pub fn is_normalized(&self) -> bool {
        self.shape_norm.is_some()
    }

    fn require_norm(&self) -> Result<f64> {
        self.shape_norm.ok_or(Error::NormalizeFirst)
    }

    /// `<gamma|psi>` for the normalized state.
    pub fn coherent_overlap(&self, gamma: &[C64]) -> Result<C64> {
        let norm = self.require_norm()?;
        Ok(self.ket.shape_coherent_overlap(gamma)? / norm.sqrt())
    }

    /// `<n|psi>` for the normalized state.
    pub fn fock_amplitude(&self, n: &[u32]) -> Result<C64> {
        let norm = self.require_norm()?;
        Ok(self.ket.shape_fock_amplitude(n)? / norm.sqrt())
    }

    /// `<other|self>` between normalized states.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        let (a, b) = (self.require_norm()?, other.require_norm()?);
        Ok(self.ket.shape_inner(&other.ket)? / (a * b).sqrt())
    }

    /// `|<target|psi>|^2`.
    pub fn fidelity(&self, target: &CoherentSuperposition) -> Result<f64> {
        target.check_normalized()?;
        let mut amp = c(0.0, 0.0);
        for (coef, gamma) in &target.terms {
            amp += coef.conj() * self.coherent_overlap(gamma)?;
        }
        Ok(amp.norm_sqr())
    }
}

/// Photon subtraction from a Gaussian parent.
pub fn subtract(kernel: &KKernel, m: &[u32], tau: &[f64]) -> Result<NonGaussianKState> {
    NonGaussianKState::from_kernel(kernel).subtract(m, tau)
}

fn coherent_inner(a: &[C64], b: &[C64]) -> C64 {
    let mut expo = c(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        expo += -x.norm_sqr() / 2.0 - y.norm_sqr() / 2.0 + x.conj() * y;
    }
    expo.exp()
}

/// A finite superposition `sum_i c_i |gamma_i>` of multi-mode coherent states.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentSuperposition {
    pub terms: Vec<(C64, Vec<C64>)>,
    pub normalized: bool,
}

impl CoherentSuperposition {
    pub fn new(terms: Vec<(C64, Vec<C64>)>) -> Result<Self> {
        let n = terms.first().map_or(0, |t| t.1.len());
        if let Some(bad) = terms.iter().find(|t| t.1.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.1.len(),
            });
        }
        Ok(Self {
            terms,
            normalized: false,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.terms.first().map_or(0, |t| t.1.len())
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut acc = c(0.0, 0.0);
        for (ci, gi) in &self.terms {
            for (cj, gj) in &self.terms {
                acc += ci.conj() * cj * coherent_inner(gi, gj);
            }
        }
        acc.re
    }

    pub fn normalize(mut self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let s = n2.sqrt();
        for t in self.terms.iter_mut() {
            t.0 /= s;
        }
        self.normalized = true;
        Ok(self)
    }

    fn check_normalized(&self) -> Result<()> {
        let n2 = self.norm_sqr();
        if !self.normalized || (n2 - 1.0).abs() > 1e-10 {
            return Err(Error::TargetNotNormalized(n2.sqrt()));
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &Self) -> C64 {
        let mut acc = c(0.0, 0.0);
        for (ci, gi) in &self.terms {
            for (cj, gj) in &other.terms {
                acc += ci.conj() * cj * coherent_inner(gi, gj);
            }
        }
        acc
    }
}

/// `(|gamma, gamma> + |-gamma, -gamma>) / N_+` with `gamma = (q + i p)/sqrt(2)`
/// and `|N_+|^2 = 2 (1 + exp(-2 (q^2 + p^2)))`.
pub fn cat_bell(q_gamma: f64, p_gamma: f64) -> CoherentSuperposition {
    let g = c(q_gamma, p_gamma) / std::f64::consts::SQRT_2;
    let n_plus = (2.0 * (1.0 + (-2.0 * (q_gamma * q_gamma + p_gamma * p_gamma)).exp())).sqrt();
    let a = c(1.0 / n_plus, 0.0);
    CoherentSuperposition {
        terms: vec![(a, vec![g, g]), (a, vec![-g, -g])],
        normalized: true,
    }
}

/// `[[1, 1], [1, -1]] / sqrt(2)`: sends `|delta, 0>` to `|delta/sqrt2, delta/sqrt2>`.
pub fn hadamard() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
}

/// Beamsplitter acting on coherent labels with the convention
/// `|alpha, 0> -> |sqrt(tau) alpha, -sqrt(1 - tau) alpha>`.
pub fn beamsplitter(tau: f64) -> CMatrix {
    let (t, r) = (tau.sqrt(), (1.0 - tau).sqrt());
    CMatrix::from_row_slice(2, 2, &[c(t, 0.0), c(r, 0.0), c(-r, 0.0), c(t, 0.0)])
}
