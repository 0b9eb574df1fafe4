//! Shared helpers for the integration suites: random Gaussian states, a
//! brute-force hafnian, and engine-vs-Fock comparison runners.
#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use kfun::fock::{beamsplitter_fock, squeezed_vacuum_fock, subtract_photons, tmsv_fock, FockVector};
use kfun::gaussian::passive_symplectic;
use kfun::kstate::hadamard;
use kfun::{
    cat_bell, subtract, CMatrix, GaussianPureState, GraphSpec, RMatrix, RVector, C64,
};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn rel_err_c(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(n, n, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix the column phases so the distribution is Haar.
    let phases = CMatrix::from_diagonal(&r.diagonal().map(|d| d / d.norm()));
    q * phases
}

pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> RMatrix {
    let z = RMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let signs = RMatrix::from_diagonal(&r.diagonal().map(|d| d.signum()));
    q * signs
}

/// `S = O_1 diag(e^{-r}, e^{r}) O_2` with Haar-random passive parts and
/// squeezing drawn from `[-1, 1]`.
pub fn random_pure_state<R: Rng>(n: usize, rng: &mut R) -> GaussianPureState {
    let o1 = passive_symplectic(&random_unitary(n, rng));
    let o2 = passive_symplectic(&random_unitary(n, rng));
    let r: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut d = RVector::zeros(2 * n);
    for k in 0..n {
        d[k] = (-r[k]).exp();
        d[n + k] = r[k].exp();
    }
    let s = o1 * RMatrix::from_diagonal(&d) * o2;
    GaussianPureState::from_symplectic(&s).expect("random symplectic state")
}

/// `G = O diag(+-1) O^T`, at least one eigenvalue of each sign when `n > 1`.
pub fn random_self_inverse_graph<R: Rng>(n: usize, rng: &mut R) -> RMatrix {
    let o = random_orthogonal(n, rng);
    let mut signs = RVector::from_fn(n, |_, _| if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
    if n > 1 {
        signs[0] = 1.0;
        signs[1] = -1.0;
    }
    let g = &o * RMatrix::from_diagonal(&signs) * o.transpose();
    (&g + g.transpose()) * 0.5
}

pub fn random_complex_symmetric<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + a.transpose()) * c(0.5, 0.0)
}

/// Sum over perfect matchings by explicit enumeration.
pub fn naive_hafnian(a: &CMatrix) -> C64 {
    fn rec(a: &CMatrix, rest: &[usize]) -> C64 {
        if rest.is_empty() {
            return c(1.0, 0.0);
        }
        let i = rest[0];
        let mut total = c(0.0, 0.0);
        for k in 1..rest.len() {
            let j = rest[k];
            let others: Vec<usize> = rest[1..]
                .iter()
                .cloned()
                .filter(|x| *x != j)
                .collect();
            total += a[(i, j)] * rec(a, &others);
        }
        total
    }
    if a.nrows() % 2 == 1 {
        return c(0.0, 0.0);
    }
    let idx: Vec<usize> = (0..a.nrows()).collect();
    rec(a, &idx)
}

/// Smallest cutoff from 60 up, in steps of 20, whose squeezed-vacuum
/// truncation tail is below `1e-12`.
pub fn sv_cutoff(r: f64) -> usize {
    (60..=400)
        .step_by(20)
        .find(|d| squeezed_vacuum_fock(r, *d).unwrap().tail() < 1e-12)
        .expect("cutoff below 400")
}

pub const PROBES: [[f64; 4]; 2] = [[0.3, 0.1, -0.2, 0.4], [0.8, -0.5, 0.6, 0.0]];
pub const CAT_AMPLITUDES: [f64; 2] = [0.5, 1.0];

/// One engine-vs-oracle comparison.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub label: String,
    pub rel_err: f64,
    pub engine: f64,
    pub oracle: f64,
}

impl Comparison {
    fn real(label: String, engine: f64, oracle: f64) -> Self {
        Self {
            label,
            rel_err: rel_err(engine, oracle),
            engine,
            oracle,
        }
    }

    fn complex(label: String, engine: C64, oracle: C64) -> Self {
        Self {
            label,
            rel_err: rel_err_c(engine, oracle),
            engine: engine.norm(),
            oracle: oracle.norm(),
        }
    }
}

/// Subtraction of `(m1, m2)` photons from a two-mode squeezed vacuum, both
/// ports at transmissivity `tau`: probability, coherent overlaps and
/// cat-Bell fidelities.
pub fn tmsv_comparisons(r: f64, tau: f64, m: [u32; 2], cutoff: usize) -> Vec<Comparison> {
    let tag = format!("tmsv r={r} tau={tau} m={m:?}");
    let kernel = GraphSpec::two_mode(r).kernel().unwrap();
    let engine = subtract(&kernel, &m, &[tau, tau]).unwrap();
    let p_engine = engine.success_probability().unwrap();
    let engine = engine.normalized().unwrap();

    let psi = tmsv_fock(r, cutoff).unwrap();
    let (psi, p1) = subtract_photons(&psi, 0, m[0] as usize, tau).unwrap();
    let (psi, p2) = subtract_photons(&psi, 1, m[1] as usize, tau).unwrap();

    let mut out = vec![Comparison::real(format!("{tag} P"), p_engine, p1 * p2)];
    out.extend(overlaps_and_fidelities(&tag, &engine, &psi));
    out
}

/// Subtraction of `m` photons from a single-mode squeezed vacuum.
/// Overlaps are taken on the single mode; the fidelity is taken after
/// splitting the state on a Hadamard beamsplitter against vacuum.
pub fn sv_comparisons(r: f64, tau: f64, m: u32, cutoff: usize) -> Vec<Comparison> {
    let tag = format!("sv r={r} tau={tau} m={m}");
    let sv = GaussianPureState::squeezed_vacuum(r);
    let engine = subtract(&sv.kernel().unwrap(), &[m], &[tau]).unwrap();
    let p_engine = engine.success_probability().unwrap();
    let engine = engine.normalized().unwrap();

    let psi = squeezed_vacuum_fock(r, cutoff).unwrap();
    let (psi, p) = subtract_photons(&psi, 0, m as usize, tau).unwrap();

    let mut out = vec![Comparison::real(format!("{tag} P"), p_engine, p)];
    for g in PROBES {
        let gamma = [c(g[0], g[1])];
        out.push(Comparison::complex(
            format!("{tag} <{:?}|psi>", gamma[0]),
            engine.coherent_overlap(&gamma).unwrap(),
            psi.coherent_overlap(&gamma).unwrap(),
        ));
    }

    let split_kernel = sv.product(&GaussianPureState::vacuum(1)).kernel().unwrap();
    let split = subtract(&split_kernel, &[m, 0], &[tau, 1.0])
        .unwrap()
        .apply_interferometer(&hadamard())
        .unwrap()
        .normalized()
        .unwrap();
    // The oracle splitter sends |a,0> to |a/sqrt2, -a/sqrt2>; flip mode 1.
    let split_psi = beamsplitter_fock(&psi.with_vacuum_mode().unwrap(), 0.5, (0, 1))
        .unwrap()
        .phase_shift(1, std::f64::consts::PI);
    for q in CAT_AMPLITUDES {
        let target = cat_bell(q, 0.0);
        out.push(Comparison::real(
            format!("{tag} F(cat q={q})"),
            split.fidelity(&target).unwrap(),
            split_psi.fidelity(&target).unwrap(),
        ));
    }
    out
}

fn overlaps_and_fidelities(
    tag: &str,
    engine: &kfun::NonGaussianKState,
    psi: &FockVector,
) -> Vec<Comparison> {
    let mut out = Vec::new();
    for g in PROBES {
        let gamma = [c(g[0], g[1]), c(g[2], g[3])];
        out.push(Comparison::complex(
            format!("{tag} <{gamma:?}|psi>"),
            engine.coherent_overlap(&gamma).unwrap(),
            psi.coherent_overlap(&gamma).unwrap(),
        ));
    }
    for q in CAT_AMPLITUDES {
        let target = cat_bell(q, 0.0);
        out.push(Comparison::real(
            format!("{tag} F(cat q={q})"),
            engine.fidelity(&target).unwrap(),
            psi.fidelity(&target).unwrap(),
        ));
    }
    out
}

/// Comparisons whose oracle value is below `floor` are checked in absolute
/// terms instead: both sides vanish by parity.
pub fn failures(cmp: &[Comparison], rel_tol: f64, floor: f64) -> Vec<&Comparison> {
    cmp.iter()
        .filter(|x| {
            if x.oracle.abs() < floor && x.engine.abs() < floor {
                false
            } else {
                !(x.rel_err <= rel_tol)
            }
        })
        .collect()
}
