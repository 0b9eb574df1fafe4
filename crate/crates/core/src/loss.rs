//! Uniform pure loss on a K-function state.
//!
//! The output is kept as a double integral
//!
//! ```text
//! rho = \int\int K(x) K^*(y) exp[-d (|alpha|^2 + |beta|^2)/2 + c beta^dag alpha] |s alpha><s beta|
//! ```
//!
//! with `alpha = alpha(x)`, `beta = alpha(y)`. One channel of transmissivity
//! `tau` gives `d = c = 1 - tau`, `s = sqrt(tau)`; further channels compose
//! into the same three numbers. Traces against Fock projectors and number
//! operators reduce to a `4N`-dimensional Gaussian moment.

use crate::error::{Error, Result};
use crate::gaussian::KKernel;
use crate::gbs::PhotonPattern;
use crate::integral::{integrate, ComplexGaussianIntegrand, Monomial};
use crate::linalg::{c, coherent_map, ln_factorial, CMatrix, CVector};

#[derive(Clone, Debug, PartialEq)]
pub struct MixedKernelState {
    kernel: KKernel,
    damping: f64,
    coupling: f64,
    label_scale: f64,
}

pub fn apply_uniform_loss(kernel: &KKernel, tau: f64) -> Result<MixedKernelState> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidTransmissivity(tau));
    }
    if kernel.is_displaced() {
        return Err(Error::UnsupportedDisplacement);
    }
    Ok(MixedKernelState {
        kernel: kernel.clone(),
        damping: 1.0 - tau,
        coupling: 1.0 - tau,
        label_scale: tau.sqrt(),
    })
}

impl MixedKernelState {
    pub fn kernel(&self) -> &KKernel {
        &self.kernel
    }

    /// Overall transmissivity `s^2`.
    pub fn tau(&self) -> f64 {
        self.label_scale * self.label_scale
    }

    pub fn n_modes(&self) -> usize {
        self.kernel.n_modes()
    }

    /// A second uniform loss stage.
    pub fn then_loss(&self, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::InvalidTransmissivity(tau));
        }
        let s2 = self.tau();
        Ok(Self {
            kernel: self.kernel.clone(),
            damping: self.damping + (1.0 - tau) * s2,
            coupling: self.coupling + (1.0 - tau) * s2,
            label_scale: self.label_scale * tau.sqrt(),
        })
    }

    /// `Tr(rho)`.
    pub fn trace(&self) -> Result<f64> {
        self.expectation(&[], None)
    }

    /// `Tr(rho a_k^dag a_k)`.
    pub fn mean_photon_number(&self, mode: usize) -> Result<f64> {
        if mode >= self.n_modes() {
            return Err(Error::InvalidPattern(format!(
                "mode {mode} out of range for {} modes",
                self.n_modes()
            )));
        }
        self.expectation(&[], Some(mode))
    }

    /// `Tr(rho |n><n|)` on the pattern's modes, tracing out the rest.
    pub fn lossy_pattern_probability(&self, pattern: &PhotonPattern) -> Result<f64> {
        pattern.validate(self.n_modes())?;
        let measured: Vec<(usize, u32)> = pattern
            .modes
            .iter()
            .cloned()
            .zip(pattern.counts.iter().cloned())
            .collect();
        self.expectation(&measured, None)
    }

    fn expectation(&self, measured: &[(usize, u32)], number: Option<usize>) -> Result<f64> {
        let n = self.n_modes();
        let dim = 2 * n;
        let s2 = self.tau();
        let diag = c((self.damping + s2) / 2.0, 0.0);
        let b = self.kernel.b();
        let id = CMatrix::identity(dim, dim);

        let e = coherent_map(n);
        let mut cross = CMatrix::zeros(dim, dim);
        for k in 0..n {
            let ck = if measured.iter().any(|(m, _)| *m == k) {
                self.coupling
            } else {
                self.coupling + s2
            };
            let row = e.row(k).into_owned();
            cross += row.adjoint() * row * c(ck, 0.0);
        }

        let mut quad = CMatrix::zeros(2 * dim, 2 * dim);
        quad.view_mut((0, 0), (dim, dim)).copy_from(&(b + &id * diag));
        quad.view_mut((dim, dim), (dim, dim))
            .copy_from(&(b.map(|z| z.conj()) + &id * diag));
        quad.view_mut((0, dim), (dim, dim)).copy_from(&(-cross.transpose()));
        quad.view_mut((dim, 0), (dim, dim)).copy_from(&(-&cross));

        let norm = self.kernel.norm();
        let mut prefactor = norm * norm.conj();
        let mut monomials = Vec::new();
        let mut push_pair = |k: usize, power: usize| {
            let row = e.row(k).transpose();
            let mut ket = CVector::zeros(2 * dim);
            ket.rows_mut(0, dim).copy_from(&row);
            let mut bra = CVector::zeros(2 * dim);
            bra.rows_mut(dim, dim).copy_from(&row.map(|z| z.conj()));
            monomials.push(Monomial::new(ket, power));
            monomials.push(Monomial::new(bra, power));
        };
        let mut log_scale = 0.0;
        for &(k, nk) in measured {
            if nk > 0 {
                push_pair(k, nk as usize);
                log_scale += nk as f64 * s2.ln() - ln_factorial(nk);
            }
        }
        if let Some(k) = number {
            push_pair(k, 1);
            log_scale += s2.ln();
        }
        prefactor *= log_scale.exp();
        let z = integrate(&ComplexGaussianIntegrand::new(
            quad,
            CVector::zeros(2 * dim),
            prefactor,
            monomials,
        ))?;
        if z.im.abs() > 1e-8 * z.norm().max(1e-300) {
            return Err(Error::NonReal { re: z.re, im: z.im });
        }
        Ok(z.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{GaussianPureState, GraphSpec};
    use crate::gbs::pattern_probability;
    use approx::assert_relative_eq;

    fn sv(r: f64) -> KKernel {
        GaussianPureState::squeezed_vacuum(r).kernel().unwrap()
    }

    #[test]
    fn trace_is_one() {
        for tau in [0.2, 0.7, 1.0] {
            let st = apply_uniform_loss(&sv(0.8), tau).unwrap();
            assert_relative_eq!(st.trace().unwrap(), 1.0, epsilon = 1e-12);
            let st = apply_uniform_loss(&GraphSpec::two_mode(0.6).kernel().unwrap(), tau).unwrap();
            assert_relative_eq!(st.trace().unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn vacuum_is_a_fixed_point() {
        let st = apply_uniform_loss(&GaussianPureState::vacuum(1).kernel().unwrap(), 0.3).unwrap();
        assert!(st.mean_photon_number(0).unwrap().abs() < 1e-15);
        let p0 = st.lossy_pattern_probability(&PhotonPattern::full(vec![0])).unwrap();
        assert_relative_eq!(p0, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn mean_photon_number_attenuates() {
        let (r, tau) = (0.8f64, 0.6);
        let st = apply_uniform_loss(&sv(r), tau).unwrap();
        let want = tau * r.sinh().powi(2);
        assert_relative_eq!(st.mean_photon_number(0).unwrap(), want, epsilon = 1e-12);
        assert_relative_eq!(want, 0.4732, epsilon = 1e-4);
        let st = apply_uniform_loss(&GraphSpec::two_mode(r).kernel().unwrap(), tau).unwrap();
        for k in 0..2 {
            assert_relative_eq!(st.mean_photon_number(k).unwrap(), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn unit_transmissivity_matches_pure_patterns() {
        let k = GraphSpec::two_mode(0.7).kernel().unwrap();
        let st = apply_uniform_loss(&k, 1.0).unwrap();
        for pat in [[0u32, 0], [1, 1], [2, 2], [2, 0], [3, 1]] {
            let pure = pattern_probability(&k, &pat).unwrap();
            let lossy = st.lossy_pattern_probability(&PhotonPattern::full(pat.to_vec())).unwrap();
            assert!((pure - lossy).abs() < 1e-13);
        }
    }

    #[test]
    fn loss_breaks_parity() {
        let st = apply_uniform_loss(&sv(0.6), 0.7).unwrap();
        let p1 = st.lossy_pattern_probability(&PhotonPattern::full(vec![1])).unwrap();
        assert!(p1 > 1e-3);
    }

    #[test]
    fn composition() {
        let k = sv(0.7);
        for (t1, t2) in [(0.9, 0.5), (0.3, 0.8), (0.6, 0.6)] {
            let a = apply_uniform_loss(&k, t1).unwrap().then_loss(t2).unwrap();
            let b = apply_uniform_loss(&k, t1 * t2).unwrap();
            assert!((a.mean_photon_number(0).unwrap() - b.mean_photon_number(0).unwrap()).abs() < 1e-12);
            for n in 0..4 {
                let pat = PhotonPattern::full(vec![n]);
                let (pa, pb) = (
                    a.lossy_pattern_probability(&pat).unwrap(),
                    b.lossy_pattern_probability(&pat).unwrap(),
                );
                assert!((pa - pb).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_pattern_traces_the_rest() {
        let r = 0.3f64;
        let tau = 0.75;
        let st = apply_uniform_loss(&GraphSpec::two_mode(r).kernel().unwrap(), tau).unwrap();
        let marginal = st
            .lossy_pattern_probability(&PhotonPattern::new(vec![1], vec![0]).unwrap())
            .unwrap();
        let summed: f64 = (0..11)
            .map(|m| st.lossy_pattern_probability(&PhotonPattern::full(vec![1, m])).unwrap())
            .sum();
        assert_relative_eq!(marginal, summed, epsilon = 1e-10);
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(apply_uniform_loss(&sv(0.5), 0.0), Err(Error::InvalidTransmissivity(0.0)));
        let st = apply_uniform_loss(&sv(0.5), 0.5).unwrap();
        assert!(st.then_loss(1.2).is_err());
        assert!(st.mean_photon_number(1).is_err());
    }
}
