//! Photon-number patterns: full-pattern probabilities of a zero-mean Gaussian
//! state through a single hafnian, and heralded states from partial patterns.

use crate::error::{Error, Result};
use crate::gaussian::KKernel;
use crate::hafnian::hafnian;
use crate::kstate::NonGaussianKState;
use crate::linalg::{
    c, det_sqrt, ensure_re_pd, inverse, ln_factorial, max_asymmetry_c, mode_form, CMatrix,
};

/// Hafnians above this size are refused rather than run slowly.
pub const GBS_DEGREE_CAP: usize = 24;

/// Photon counts on a set of modes (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhotonPattern {
    pub counts: Vec<u32>,
    pub modes: Vec<usize>,
}

impl PhotonPattern {
    pub fn new(counts: Vec<u32>, modes: Vec<usize>) -> Result<Self> {
        let p = Self { counts, modes };
        p.check_shape()?;
        Ok(p)
    }

    /// A pattern over all modes `0..counts.len()`.
    pub fn full(counts: Vec<u32>) -> Self {
        let modes = (0..counts.len()).collect();
        Self { counts, modes }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().map(|n| *n as usize).sum()
    }

    fn check_shape(&self) -> Result<()> {
        if self.counts.len() != self.modes.len() {
            return Err(Error::InvalidPattern(format!(
                "{} counts for {} modes",
                self.counts.len(),
                self.modes.len()
            )));
        }
        for (i, m) in self.modes.iter().enumerate() {
            if self.modes[..i].contains(m) {
                return Err(Error::InvalidPattern(format!("mode {m} listed twice")));
            }
        }
        Ok(())
    }

    pub fn validate(&self, n_modes: usize) -> Result<()> {
        self.check_shape()?;
        if let Some(m) = self.modes.iter().find(|m| **m >= n_modes) {
            return Err(Error::InvalidPattern(format!(
                "mode {m} out of range for {n_modes} modes"
            )));
        }
        Ok(())
    }

    pub fn is_full(&self, n_modes: usize) -> bool {
        self.modes.len() == n_modes
    }

    /// Counts indexed by mode, zero for unlisted modes.
    pub fn dense(&self, n_modes: usize) -> Vec<u32> {
        let mut out = vec![0; n_modes];
        for (m, n) in self.modes.iter().zip(self.counts.iter()) {
            out[*m] = *n;
        }
        out
    }
}

/// `H = B + I/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HMatrix {
    pub h: CMatrix,
}

pub fn build_h(kernel: &KKernel) -> Result<HMatrix> {
    let dim = 2 * kernel.n_modes();
    let h = kernel.b() + CMatrix::identity(dim, dim) * c(0.5, 0.0);
    let asym = max_asymmetry_c(&h);
    if asym > 1e-12 {
        return Err(Error::NotSymmetric(asym));
    }
    ensure_re_pd(&h)?;
    Ok(HMatrix { h })
}

/// Probability of detecting `counts[i]` photons in every mode `i`:
/// `|Hf(F)|^2 / (|det H| sqrt(det Gamma) prod n_i! 2^{n_i})` with
/// `F_ij = l_i^T H^{-1} l_j` over the forms `q_k + i p_k` repeated `n_k` times.
pub fn pattern_probability(kernel: &KKernel, counts: &[u32]) -> Result<f64> {
    let n = kernel.n_modes();
    if counts.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: counts.len(),
        });
    }
    if kernel.is_displaced() {
        return Err(Error::UnsupportedDisplacement);
    }
    let total: usize = counts.iter().map(|k| *k as usize).sum();
    if total > GBS_DEGREE_CAP {
        return Err(Error::DegreeCapExceeded {
            degree: total,
            cap: GBS_DEGREE_CAP,
        });
    }
    let h = build_h(kernel)?.h;
    if total % 2 == 1 {
        return Ok(0.0);
    }
    let h_inv = inverse(&h)?;
    let forms: Vec<_> = counts
        .iter()
        .enumerate()
        .flat_map(|(k, &nk)| std::iter::repeat_n(mode_form(n, k, false), nk as usize))
        .collect();
    let projected: Vec<_> = forms.iter().map(|l| &h_inv * l).collect();
    let f = CMatrix::from_fn(total, total, |i, j| forms[i].dot(&projected[j]));
    let hf = hafnian(&f)?;
    let det_h = det_sqrt(&h)?.norm_sqr();
    let log_norm: f64 = counts
        .iter()
        .map(|&k| ln_factorial(k) + k as f64 * std::f64::consts::LN_2)
        .sum();
    Ok(hf.norm_sqr() / (det_h * kernel.det_gamma().sqrt()) * (-log_norm).exp())
}

/// Conditions the unmeasured modes on `pattern`. Returns the heralded state
/// (normalized whenever the outcome has non-zero probability) and the
/// outcome probability.
pub fn herald(kernel: &KKernel, pattern: &PhotonPattern) -> Result<(NonGaussianKState, f64)> {
    let n = kernel.n_modes();
    pattern.validate(n)?;
    if pattern.is_full(n) {
        return Err(Error::AllModesMeasured(n));
    }
    if kernel.is_displaced() {
        return Err(Error::UnsupportedDisplacement);
    }
    let state = NonGaussianKState::from_kernel(kernel).project(&pattern.modes, &pattern.counts)?;
    let p = state.success_probability()?;
    if p > 0.0 {
        Ok((state.normalized()?, p))
    } else {
        Ok((state, 0.0))
    }
}
