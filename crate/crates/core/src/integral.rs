//! Complex Gaussian integrals with polynomial prefactors.
//!
//! ```text
//! \int d^n x  prefactor * prod_j (l_j^T x)^{m_j} * exp(-x^T M x / 2 + b^T x)
//! ```
//!
//! The polynomial part is a Gaussian moment with covariance `M^{-1}` and mean
//! `M^{-1} b`; expanding every form `m_j` times, it equals the loop hafnian of
//! the pairwise matrix `F_ik = l_i^T M^{-1} l_k` with singleton weights
//! `mu_i = l_i^T M^{-1} b`.

use crate::error::{Error, Result};
use crate::hafnian::{hafnian, loop_hafnian};
use crate::linalg::{c, det_sqrt, ensure_re_pd, inverse, max_asymmetry_c, CMatrix, CVector, C64};

pub const DEFAULT_DEGREE_CAP: usize = 32;

/// A linear form `l^T x` raised to `power`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub form: CVector,
    pub power: usize,
}

impl Monomial {
    pub fn new(form: CVector, power: usize) -> Self {
        Self { form, power }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGaussianIntegrand {
    pub quad: CMatrix,
    pub linear: CVector,
    pub prefactor: C64,
    pub monomials: Vec<Monomial>,
    pub degree_cap: usize,
}

impl ComplexGaussianIntegrand {
    pub fn new(quad: CMatrix, linear: CVector, prefactor: C64, monomials: Vec<Monomial>) -> Self {
        Self {
            quad,
            linear,
            prefactor,
            monomials,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }

    pub fn dim(&self) -> usize {
        self.quad.nrows()
    }

    pub fn degree(&self) -> usize {
        self.monomials.iter().map(|m| m.power).sum()
    }

    pub fn with_degree_cap(mut self, cap: usize) -> Self {
        self.degree_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate(&self.quad, &self.linear, &self.monomials)?;
        let degree = self.degree();
        if degree > self.degree_cap {
            return Err(Error::DegreeCapExceeded {
                degree,
                cap: self.degree_cap,
            });
        }
        Ok(())
    }
}

/// Pairwise and first moments of the expanded form list.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentMatrix {
    pub f: CMatrix,
    pub mu: CVector,
}

impl MomentMatrix {
    pub fn build(m_inv: &CMatrix, b: &CVector, monomials: &[Monomial]) -> Self {
        let forms: Vec<&CVector> = monomials
            .iter()
            .flat_map(|m| std::iter::repeat_n(&m.form, m.power))
            .collect();
        let s = forms.len();
        let projected: Vec<CVector> = forms.iter().map(|l| m_inv * *l).collect();
        let mean = m_inv * b;
        let f = CMatrix::from_fn(s, s, |i, k| forms[i].dot(&projected[k]));
        let mu = CVector::from_fn(s, |i, _| forms[i].dot(&mean));
        Self { f, mu }
    }

    pub fn degree(&self) -> usize {
        self.mu.len()
    }
}

fn validate(m: &CMatrix, b: &CVector, monomials: &[Monomial]) -> Result<()> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    if let Some(bad) = monomials.iter().find(|mon| mon.form.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.form.len(),
        });
    }
    let asym = max_asymmetry_c(m);
    if asym > 1e-12 * (1.0 + m.camax()) {
        return Err(Error::NotSymmetric(asym));
    }
    ensure_re_pd(m)
}

/// `(2 pi)^{n/2} det(M)^{-1/2} exp(b^T M^{-1} b / 2)`.
pub fn gaussian_integral(m: &CMatrix, b: &CVector) -> Result<C64> {
    validate(m, b, &[])?;
    let m_inv = inverse(m)?;
    gaussian_integral_with_inverse(m, &m_inv, b)
}

fn gaussian_integral_with_inverse(m: &CMatrix, m_inv: &CMatrix, b: &CVector) -> Result<C64> {
    let n = m.nrows();
    let root = det_sqrt(m)?;
    let expo = b.dot(&(m_inv * b)) * 0.5;
    Ok(c((2.0 * std::f64::consts::PI).powf(n as f64 / 2.0), 0.0) / root * expo.exp())
}

/// Normalized moment `<prod (l_j^T x)^{m_j}>`.
pub fn gaussian_moment(m: &CMatrix, b: &CVector, monomials: &[Monomial]) -> Result<C64> {
    gaussian_moment_capped(m, b, monomials, DEFAULT_DEGREE_CAP)
}

pub fn gaussian_moment_capped(
    m: &CMatrix,
    b: &CVector,
    monomials: &[Monomial],
    cap: usize,
) -> Result<C64> {
    validate(m, b, monomials)?;
    let m_inv = inverse(m)?;
    moment_with_inverse(&m_inv, b, monomials, cap)
}

fn moment_with_inverse(
    m_inv: &CMatrix,
    b: &CVector,
    monomials: &[Monomial],
    cap: usize,
) -> Result<C64> {
    let degree: usize = monomials.iter().map(|m| m.power).sum();
    if degree > cap {
        return Err(Error::DegreeCapExceeded { degree, cap });
    }
    if degree == 0 {
        return Ok(c(1.0, 0.0));
    }
    let centered = b.iter().all(|z| *z == c(0.0, 0.0));
    if centered && degree % 2 == 1 {
        return Ok(c(0.0, 0.0));
    }
    let mm = MomentMatrix::build(m_inv, b, monomials);
    if centered {
        hafnian(&mm.f)
    } else {
        loop_hafnian(&mm.f, &mm.mu)
    }
}

/// `prefactor * gaussian_integral(M, b) * gaussian_moment(M, b, monomials)`.
pub fn integrate(integrand: &ComplexGaussianIntegrand) -> Result<C64> {
    integrand.validate()?;
    let m_inv = inverse(&integrand.quad)?;
    let base = gaussian_integral_with_inverse(&integrand.quad, &m_inv, &integrand.linear)?;
    let moment = moment_with_inverse(
        &m_inv,
        &integrand.linear,
        &integrand.monomials,
        integrand.degree_cap,
    )?;
    Ok(integrand.prefactor * base * moment)
}
