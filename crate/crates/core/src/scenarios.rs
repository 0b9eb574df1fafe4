//! Cat-state engineering case studies, each evaluated both from a closed form
//! and by running the subtraction pipeline through the engine.
//!
//! * `FiveFive`: five photons subtracted from each mode of a two-mode squeezed
//!   vacuum, compared with the cat-basis Bell state.
//! * `SplitCatI`: two photons subtracted from a single-mode squeezed vacuum,
//!   then a Hadamard beamsplitter against vacuum.
//! * `JointSubtractIi`: one photon subtracted from each mode of a two-mode
//!   squeezed vacuum.
//!
//! Throughout `mu = tau tanh r`.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GaussianPureState, GraphSpec};
use crate::kstate::{cat_bell, hadamard, subtract, NonGaussianKState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Engine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    FiveFive,
    SplitCatI,
    JointSubtractIi,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::FiveFive => "five_five",
            Scenario::SplitCatI => "split_cat_i",
            Scenario::JointSubtractIi => "joint_subtract_ii",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub method: Method,
    pub q_gamma: f64,
    pub p_gamma: f64,
    pub r: f64,
    pub tau: f64,
    pub p_success: f64,
    pub fidelity: f64,
}

fn check_domain(r: f64, tau: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("r = {r} must be positive")));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidTransmissivity(tau));
    }
    Ok(())
}

/// `sum_j C(5, j)^2 mu^{2j} / (1 - mu^2)^11`, which factors as
/// `(1 + mu^2)(1 + 24 mu^2 + 76 mu^4 + 24 mu^6 + mu^8) / (1 - mu^2)^11`.
pub fn p_mu(mu: f64) -> f64 {
    let m2 = mu * mu;
    (1.0 + m2) * (1.0 + 24.0 * m2 + 76.0 * m2.powi(2) + 24.0 * m2.powi(3) + m2.powi(4))
        / (1.0 - m2).powi(11)
}

/// `sum_j C(5, j) z^j / (2^j j!)`.
pub fn w_z(z: Complex64) -> Complex64 {
    1.0 + z * 2.5 + z.powi(2) * 1.25 + z.powi(3) * (5.0 / 24.0) + z.powi(4) * (5.0 / 384.0)
        + z.powi(5) / 3840.0
}

fn closed_five(q: f64, p: f64, r: f64, tau: f64) -> (f64, f64) {
    let t = r.tanh();
    let mu = tau * t;
    let pm = p_mu(mu);
    let prob = (1.0 - tau).powi(10) * t.powi(10) / r.cosh().powi(2) * pm;
    let a2 = q * q + p * p;
    let z = Complex64::new(q, -p).powi(2) * mu;
    let amp = (z / 2.0).exp() * w_z(z);
    let fid = 2.0 * (-a2).exp() * amp.norm_sqr() / ((1.0 + (-2.0 * a2).exp()) * pm);
    (prob, fid)
}

fn closed_i(q: f64, r: f64, tau: f64) -> (f64, f64) {
    let t = r.tanh();
    let mu = tau * t;
    let m2 = mu * mu;
    let q2 = q * q;
    let prob = (t - mu).powi(2) * (1.0 + 2.0 * m2) / (2.0 * r.cosh() * (1.0 - m2).powf(2.5));
    let fid = 2.0 * (q2 * (1.0 + mu)).exp() * (q2 * mu + 1.0).powi(2) * (1.0 - m2).powf(2.5)
        / (((2.0 * q2).exp() + 1.0) * (1.0 + 2.0 * m2));
    (prob, fid)
}

fn closed_ii(q: f64, r: f64, tau: f64) -> (f64, f64) {
    let t = r.tanh();
    let mu = tau * t;
    let m2 = mu * mu;
    let q2 = q * q;
    let prob = (t - mu).powi(2) * (1.0 + m2) / (r.cosh().powi(2) * (1.0 - m2).powi(3));
    let fid = (q2 * (1.0 + mu)).exp() * (q2 * mu + 2.0).powi(2) * (1.0 - m2).powi(3)
        / (2.0 * ((2.0 * q2).exp() + 1.0) * (1.0 + m2));
    (prob, fid)
}

fn engine_fidelity(state: NonGaussianKState, q: f64, p: f64) -> Result<(f64, f64)> {
    let prob = state.success_probability()?;
    let fid = state.normalized()?.fidelity(&cat_bell(q, p))?;
    Ok((prob, fid))
}

fn engine_five(q: f64, p: f64, r: f64, tau: f64) -> Result<(f64, f64)> {
    let k = GraphSpec::two_mode(r).kernel()?;
    engine_fidelity(subtract(&k, &[5, 5], &[tau, tau])?, q, p)
}

fn engine_i(q: f64, p: f64, r: f64, tau: f64) -> Result<(f64, f64)> {
    let k = GaussianPureState::squeezed_vacuum(r)
        .product(&GaussianPureState::vacuum(1))
        .kernel()?;
    let state = subtract(&k, &[2, 0], &[tau, 1.0])?.apply_interferometer(&hadamard())?;
    engine_fidelity(state, q, p)
}

fn engine_ii(q: f64, p: f64, r: f64, tau: f64) -> Result<(f64, f64)> {
    let k = GraphSpec::two_mode(r).kernel()?;
    engine_fidelity(subtract(&k, &[1, 1], &[tau, tau])?, q, p)
}

/// Evaluates one scenario at one parameter point. Closed forms for the
/// beamsplitter comparisons are only available at `p_gamma = 0`.
pub fn evaluate(
    scenario: Scenario,
    method: Method,
    q_gamma: f64,
    p_gamma: f64,
    r: f64,
    tau: f64,
) -> Result<ScenarioResult> {
    check_domain(r, tau)?;
    let (p_success, fidelity) = match (scenario, method) {
        (Scenario::FiveFive, Method::ClosedForm) => closed_five(q_gamma, p_gamma, r, tau),
        (Scenario::FiveFive, Method::Engine) => engine_five(q_gamma, p_gamma, r, tau)?,
        (_, Method::ClosedForm) if p_gamma != 0.0 => {
            return Err(Error::InvalidParameter(
                "closed forms for the beamsplitter comparison need p_gamma = 0".into(),
            ))
        }
        (Scenario::SplitCatI, Method::ClosedForm) => closed_i(q_gamma, r, tau),
        (Scenario::SplitCatI, Method::Engine) => engine_i(q_gamma, p_gamma, r, tau)?,
        (Scenario::JointSubtractIi, Method::ClosedForm) => closed_ii(q_gamma, r, tau),
        (Scenario::JointSubtractIi, Method::Engine) => engine_ii(q_gamma, p_gamma, r, tau)?,
    };
    Ok(ScenarioResult {
        scenario,
        method,
        q_gamma,
        p_gamma,
        r,
        tau,
        p_success,
        fidelity,
    })
}

pub fn five_photon_tmsv(q_gamma: f64, p_gamma: f64, r: f64, tau: f64, method: Method) -> Result<ScenarioResult> {
    evaluate(Scenario::FiveFive, method, q_gamma, p_gamma, r, tau)
}

/// Scenarios (i) and (ii) at `p_gamma = 0`.
pub fn compare_bell_schemes(
    q_gamma: f64,
    r: f64,
    tau: f64,
    method: Method,
) -> Result<(ScenarioResult, ScenarioResult)> {
    Ok((
        evaluate(Scenario::SplitCatI, method, q_gamma, 0.0, r, tau)?,
        evaluate(Scenario::JointSubtractIi, method, q_gamma, 0.0, r, tau)?,
    ))
}

/// `start, start + step, ..., stop` with both endpoints exact.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "grid {start}:{stop}:{step}"
        )));
    }
    let span = (stop - start) / step;
    let n = span.round();
    if (span - n).abs() > 1e-9 * span.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "step {step} does not divide [{start}, {stop}]"
        )));
    }
    let n = n as usize;
    if n == 0 {
        return Ok(vec![start]);
    }
    Ok((0..=n)
        .map(|i| {
            if i == n {
                stop
            } else {
                start + (stop - start) * i as f64 / n as f64
            }
        })
        .collect())
}

/// All `(scenario, r, tau)` points with scenario outermost, then `r`, then
/// `tau`. Points are evaluated in parallel; the output order is fixed.
pub fn sweep(
    scenarios: &[Scenario],
    q_gamma: f64,
    r_grid: &[f64],
    tau_grid: &[f64],
    method: Method,
) -> Result<Vec<ScenarioResult>> {
    let points: Vec<(Scenario, f64, f64)> = scenarios
        .iter()
        .flat_map(|s| {
            r_grid
                .iter()
                .flat_map(move |r| tau_grid.iter().map(move |t| (*s, *r, *t)))
        })
        .collect();
    points
        .par_iter()
        .map(|(s, r, t)| evaluate(*s, method, q_gamma, 0.0, *r, *t))
        .collect()
}

/// Shortest decimal that round-trips the value rounded to 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let y: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    let a = y.abs();
    if y != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{y:e}")
    } else {
        format!("{y}")
    }
}

pub const CSV_HEADER: [&str; 6] = ["scenario", "q_gamma", "r", "tau", "p_success", "fidelity"];

pub fn write_csv<W: Write>(rows: &[ScenarioResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record([
            row.scenario.name().to_string(),
            format_sig12(row.q_gamma),
            format_sig12(row.r),
            format_sig12(row.tau),
            format_sig12(row.p_success),
            format_sig12(row.fidelity),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn p_mu_is_a_sum_of_squared_binomials() {
        let mu = 0.37f64;
        let binom = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0];
        let s: f64 = binom.iter().enumerate().map(|(j, b)| b * b * mu.powi(2 * j as i32)).sum();
        assert_relative_eq!(p_mu(mu), s / (1.0 - mu * mu).powi(11), epsilon = 1e-13);
    }

    #[test]
    fn five_five_reference_point() {
        let c = five_photon_tmsv(0.5, 0.0, 1.0, 0.01, Method::ClosedForm).unwrap();
        assert!((c.p_success - 0.025).abs() < 5e-4);
        assert!((c.fidelity - 0.979).abs() < 5e-4);
        let e = five_photon_tmsv(0.5, 0.0, 1.0, 0.01, Method::Engine).unwrap();
        assert_relative_eq!(e.p_success, c.p_success, max_relative = 1e-9);
        assert_relative_eq!(e.fidelity, c.fidelity, max_relative = 1e-9);
    }

    #[test]
    fn five_five_with_momentum_offset() {
        let c = five_photon_tmsv(0.4, 0.3, 0.8, 0.2, Method::ClosedForm).unwrap();
        let e = five_photon_tmsv(0.4, 0.3, 0.8, 0.2, Method::Engine).unwrap();
        assert_relative_eq!(e.fidelity, c.fidelity, max_relative = 1e-9);
    }

    #[test]
    fn five_five_vanishes_without_squeezing() {
        let c = five_photon_tmsv(0.5, 0.0, 1e-3, 0.5, Method::ClosedForm).unwrap();
        assert!(c.p_success < 1e-25);
    }

    #[test]
    fn bell_schemes_at_unit_amplitude() {
        for method in [Method::ClosedForm, Method::Engine] {
            let (i, ii) = compare_bell_schemes(1.0, 0.9, 0.4, method).unwrap();
            assert!((i.p_success - 0.093).abs() < 5e-4);
            assert!((ii.p_success - 0.126).abs() < 5e-4);
            assert!((i.fidelity - 0.990).abs() < 5e-4);
            assert!((ii.fidelity - 0.806).abs() < 5e-4);
        }
    }

    #[test]
    fn bell_schemes_at_small_amplitude() {
        // Probabilities do not depend on q_gamma.
        let (i, ii) = compare_bell_schemes(0.1, 0.9, 0.4, Method::ClosedForm).unwrap();
        assert_relative_eq!(i.p_success, 0.092942329004, epsilon = 1e-11);
        assert_relative_eq!(ii.p_success, 0.125838643164, epsilon = 1e-11);
        assert_relative_eq!(i.fidelity, 0.699329166193, epsilon = 1e-11);
        assert_relative_eq!(ii.fidelity, 0.718781882979, epsilon = 1e-11);
        let (ei, eii) = compare_bell_schemes(0.1, 0.9, 0.4, Method::Engine).unwrap();
        assert_relative_eq!(ei.fidelity, i.fidelity, max_relative = 1e-9);
        assert_relative_eq!(eii.fidelity, ii.fidelity, max_relative = 1e-9);
    }

    #[test]
    fn unit_transmissivity_gives_zero_probability() {
        let (i, ii) = compare_bell_schemes(0.7, 0.5, 1.0, Method::ClosedForm).unwrap();
        assert_eq!(i.p_success, 0.0);
        assert_eq!(ii.p_success, 0.0);
        let (ei, eii) = compare_bell_schemes(0.7, 0.5, 1.0, Method::Engine).unwrap();
        assert_eq!(ei.p_success, 0.0);
        assert_eq!(eii.p_success, 0.0);
        assert_relative_eq!(ei.fidelity, i.fidelity, max_relative = 1e-9);
    }

    #[test]
    fn domain_errors() {
        assert!(five_photon_tmsv(0.5, 0.0, 0.0, 0.1, Method::ClosedForm).is_err());
        assert!(compare_bell_schemes(0.5, 0.5, 0.0, Method::ClosedForm).is_err());
        assert!(evaluate(Scenario::SplitCatI, Method::ClosedForm, 0.5, 0.2, 0.5, 0.5).is_err());
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = grid(0.01, 1.0, 0.01).unwrap();
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[99], 1.0);
        assert_eq!(format_sig12(g[29]), "0.3");
        assert_eq!(grid(0.5, 0.5, 0.1).unwrap(), vec![0.5]);
        assert!(grid(0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn sweep_order_and_single_point() {
        let rows = sweep(
            &[Scenario::SplitCatI, Scenario::JointSubtractIi],
            0.3,
            &[0.2, 0.4],
            &[0.1, 0.5, 0.9],
            Method::ClosedForm,
        )
        .unwrap();
        assert_eq!(rows.len(), 12);
        assert_eq!(rows[0].scenario, Scenario::SplitCatI);
        assert_eq!((rows[1].r, rows[1].tau), (0.2, 0.5));
        assert_eq!((rows[3].r, rows[3].tau), (0.4, 0.1));
        assert_eq!(rows[6].scenario, Scenario::JointSubtractIi);
        let one = sweep(&[Scenario::SplitCatI], 1.0, &[0.9], &[0.4], Method::ClosedForm).unwrap();
        let (i, _) = compare_bell_schemes(1.0, 0.9, 0.4, Method::ClosedForm).unwrap();
        assert_eq!(one, vec![i]);
    }

    #[test]
    fn csv_format() {
        let rows = sweep(&[Scenario::JointSubtractIi], 1.0, &[0.9], &[0.4], Method::ClosedForm).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "scenario,q_gamma,r,tau,p_success,fidelity\njoint_subtract_ii,1,0.9,0.4,0.125838643164,0.806242729249\n"
        );
        assert_eq!(format_sig12(1.234e-7), "1.234e-7");
        assert_eq!(format_sig12(0.0), "0");
    }
}
