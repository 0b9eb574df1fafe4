//! Truncated Fock-basis simulator used to cross-check the K-function engine.
//!
//! States are dense amplitude arrays over `n_1, ..., n_N < cutoff` with at most
//! three modes (two system modes plus a transient ancilla). Nothing here
//! touches the integral engine.

use crate::error::{Error, Result};
use crate::kstate::CoherentSuperposition;
use crate::linalg::{c, ln_factorial, C64};

pub const MAX_MODES: usize = 3;
pub const DEFAULT_CUTOFF: usize = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    cutoff: usize,
    n_modes: usize,
    amps: Vec<C64>,
}

impl FockVector {
    pub fn zeros(n_modes: usize, cutoff: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::InvalidParameter(format!(
                "fock oracle supports 1..={MAX_MODES} modes, got {n_modes}"
            )));
        }
        if cutoff == 0 {
            return Err(Error::Cutoff("cutoff must be positive".into()));
        }
        Ok(Self {
            cutoff,
            n_modes,
            amps: vec![c(0.0, 0.0); cutoff.pow(n_modes as u32)],
        })
    }

    pub fn vacuum(n_modes: usize, cutoff: usize) -> Result<Self> {
        let mut v = Self::zeros(n_modes, cutoff)?;
        v.amps[0] = c(1.0, 0.0);
        Ok(v)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    fn index(&self, n: &[usize]) -> usize {
        n.iter().fold(0, |acc, k| acc * self.cutoff + k)
    }

    fn tuple(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_modes];
        for k in (0..self.n_modes).rev() {
            out[k] = idx % self.cutoff;
            idx /= self.cutoff;
        }
        out
    }

    pub fn amplitude(&self, n: &[usize]) -> C64 {
        if n.len() != self.n_modes || n.iter().any(|k| *k >= self.cutoff) {
            return c(0.0, 0.0);
        }
        self.amps[self.index(n)]
    }

    pub fn set(&mut self, n: &[usize], value: C64) {
        let i = self.index(n);
        self.amps[i] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability mass lost to truncation, for states that started normalized.
    pub fn tail(&self) -> f64 {
        (1.0 - self.norm_sqr()).max(0.0)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n.sqrt();
        let mut out = self.clone();
        out.amps.iter_mut().for_each(|a| *a *= s);
        Ok(out)
    }

    pub fn mean_photon_number(&self, mode: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| self.tuple(i)[mode] as f64 * a.norm_sqr())
            .sum()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `<gamma|self>`.
    pub fn coherent_overlap(&self, gamma: &[C64]) -> Result<C64> {
        if gamma.len() != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                found: gamma.len(),
            });
        }
        // <gamma|n> = e^{-|gamma|^2/2} conj(gamma)^n / sqrt(n!) per mode.
        let per_mode: Vec<Vec<C64>> = gamma
            .iter()
            .map(|g| {
                let mut v = Vec::with_capacity(self.cutoff);
                let mut acc = c((-g.norm_sqr() / 2.0).exp(), 0.0);
                for n in 0..self.cutoff {
                    if n > 0 {
                        acc *= g.conj() / (n as f64).sqrt();
                    }
                    v.push(acc);
                }
                v
            })
            .collect();
        let mut total = c(0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            if *a == c(0.0, 0.0) {
                continue;
            }
            let n = self.tuple(i);
            let mut w = *a;
            for (k, nk) in n.iter().enumerate() {
                w *= per_mode[k][*nk];
            }
            total += w;
        }
        Ok(total)
    }

    pub fn fidelity(&self, target: &CoherentSuperposition) -> Result<f64> {
        let mut amp = c(0.0, 0.0);
        for (coef, gamma) in &target.terms {
            amp += coef.conj() * self.coherent_overlap(gamma)?;
        }
        Ok(amp.norm_sqr())
    }

    /// Appends a vacuum mode at the end.
    pub fn with_vacuum_mode(&self) -> Result<Self> {
        let mut out = Self::zeros(self.n_modes + 1, self.cutoff)?;
        for (i, a) in self.amps.iter().enumerate() {
            out.amps[i * self.cutoff] = *a;
        }
        Ok(out)
    }

    /// Multiplies `|n>` on `mode` by `e^{i phi n}`.
    pub fn phase_shift(&self, mode: usize, phi: f64) -> Self {
        let mut out = self.clone();
        for (i, a) in out.amps.iter_mut().enumerate() {
            let n = self.tuple(i)[mode] as f64;
            *a *= C64::from_polar(1.0, phi * n);
        }
        out
    }
}

pub fn squeezed_vacuum_fock(r: f64, cutoff: usize) -> Result<FockVector> {
    let mut v = FockVector::zeros(1, cutoff)?;
    let t = r.tanh();
    for k in 0..cutoff.div_ceil(2) {
        let n = 2 * k;
        if n >= cutoff {
            break;
        }
        let ln = 0.5 * ln_factorial(n as u32) - k as f64 * std::f64::consts::LN_2 - ln_factorial(k as u32);
        let amp = ln.exp() * t.powi(k as i32) / r.cosh().sqrt();
        v.set(&[n], c(amp, 0.0));
    }
    Ok(v)
}

pub fn tmsv_fock(r: f64, cutoff: usize) -> Result<FockVector> {
    let mut v = FockVector::zeros(2, cutoff)?;
    let t = r.tanh();
    for n in 0..cutoff {
        v.set(&[n, n], c(t.powi(n as i32) / r.cosh(), 0.0));
    }
    Ok(v)
}

/// Two-mode mixing `a_i^dag -> sqrt(tau) b_i^dag - sqrt(1-tau) b_j^dag`,
/// `a_j^dag -> sqrt(1-tau) b_i^dag + sqrt(tau) b_j^dag`, so that
/// `|alpha, 0> -> |sqrt(tau) alpha, -sqrt(1-tau) alpha>`. Output components
/// beyond the cutoff are dropped.
pub fn beamsplitter_fock(state: &FockVector, tau: f64, modes: (usize, usize)) -> Result<FockVector> {
    let (i, j) = modes;
    if i == j || i >= state.n_modes || j >= state.n_modes {
        return Err(Error::InvalidParameter(format!("bad mode pair ({i}, {j})")));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidTransmissivity(tau));
    }
    let d = state.cutoff;
    let (t, r) = (tau.sqrt(), (1.0 - tau).sqrt());
    let ln_t = t.ln();
    let ln_r = r.ln();
    let mut out = FockVector::zeros(state.n_modes, d)?;
    for (idx, a) in state.amps.iter().enumerate() {
        if *a == c(0.0, 0.0) {
            continue;
        }
        let n = state.tuple(idx);
        let (n1, n2) = (n[i], n[j]);
        // (t b1 - r b2)^{n1} (r b1 + t b2)^{n2} / sqrt(n1! n2!)
        let base = -0.5 * (ln_factorial(n1 as u32) + ln_factorial(n2 as u32));
        for p in 0..=n1 {
            // p photons of the first factor go to b1.
            for q in 0..=n2 {
                let k1 = p + q;
                let k2 = n1 + n2 - k1;
                if k1 >= d || k2 >= d {
                    continue;
                }
                let (et, er) = ((p + (n2 - q)) as f64, ((n1 - p) + q) as f64);
                if (et > 0.0 && t == 0.0) || (er > 0.0 && r == 0.0) {
                    continue;
                }
                let mut ln = base
                    + ln_binomial(n1, p)
                    + ln_binomial(n2, q)
                    + 0.5 * (ln_factorial(k1 as u32) + ln_factorial(k2 as u32));
                if et > 0.0 {
                    ln += et * ln_t;
                }
                if er > 0.0 {
                    ln += er * ln_r;
                }
                let sign = if (n1 - p) % 2 == 1 { -1.0 } else { 1.0 };
                let mut m = n.clone();
                m[i] = k1;
                m[j] = k2;
                let o = out.index(&m);
                out.amps[o] += a * (sign * ln.exp());
            }
        }
    }
    Ok(out)
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n as u32) - ln_factorial(k as u32) - ln_factorial((n - k) as u32)
}

/// Projects `mode` onto `|m>` and removes it. Returns the normalized
/// conditional state and the outcome probability.
pub fn pnr_project(state: &FockVector, mode: usize, m: usize) -> Result<(FockVector, f64)> {
    if state.n_modes < 2 {
        return Err(Error::InvalidParameter(
            "projection needs at least two modes".into(),
        ));
    }
    let mut out = FockVector::zeros(state.n_modes - 1, state.cutoff)?;
    for (idx, a) in state.amps.iter().enumerate() {
        let n = state.tuple(idx);
        if n[mode] != m {
            continue;
        }
        let rest: Vec<usize> = n
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != mode)
            .map(|(_, v)| *v)
            .collect();
        let o = out.index(&rest);
        out.amps[o] = *a;
    }
    let p = out.norm_sqr();
    if p > 0.0 {
        Ok((out.normalized()?, p))
    } else {
        Ok((out, 0.0))
    }
}

/// Beamsplitter to a vacuum ancilla followed by detecting `m` photons in it.
pub fn subtract_photons(state: &FockVector, mode: usize, m: usize, tau: f64) -> Result<(FockVector, f64)> {
    let with_anc = state.with_vacuum_mode()?;
    let anc = with_anc.n_modes - 1;
    let mixed = beamsplitter_fock(&with_anc, tau, (mode, anc))?;
    pnr_project(&mixed, anc, m)
}

/// Single-mode density matrix after a pure-loss channel, built from the
/// system plus environment pure state and a partial trace.
#[derive(Clone, Debug, PartialEq)]
pub struct FockDensity {
    pub cutoff: usize,
    pub rho: Vec<C64>,
}

impl FockDensity {
    pub fn element(&self, m: usize, n: usize) -> C64 {
        self.rho[m * self.cutoff + n]
    }

    pub fn probability(&self, n: usize) -> f64 {
        if n >= self.cutoff {
            return 0.0;
        }
        self.element(n, n).re
    }

    pub fn trace(&self) -> f64 {
        (0..self.cutoff).map(|n| self.probability(n)).sum()
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.cutoff).map(|n| n as f64 * self.probability(n)).sum()
    }
}

pub fn pure_loss_density(state: &FockVector, tau: f64) -> Result<FockDensity> {
    if state.n_modes != 1 {
        return Err(Error::InvalidParameter(
            "loss oracle is single-mode".into(),
        ));
    }
    let d = state.cutoff;
    let joint = beamsplitter_fock(&state.with_vacuum_mode()?, tau, (0, 1))?;
    let mut rho = vec![c(0.0, 0.0); d * d];
    for m in 0..d {
        for n in 0..d {
            let mut acc = c(0.0, 0.0);
            for e in 0..d {
                acc += joint.amplitude(&[m, e]) * joint.amplitude(&[n, e]).conj();
            }
            rho[m * d + n] = acc;
        }
    }
    Ok(FockDensity { cutoff: d, rho })
}
