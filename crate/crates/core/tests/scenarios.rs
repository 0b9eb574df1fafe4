mod common;

use common::rel_err;
use kfun::scenarios::{evaluate, grid};
use kfun::{compare_bell_schemes, five_photon_tmsv, Method, Scenario};

#[test]
fn engine_agrees_with_closed_forms_on_subgrid() {
    let axis = grid(0.1, 0.9, 0.8 / 9.0).unwrap();
    assert_eq!(axis.len(), 10);
    let mut worst = (0.0f64, String::new());
    for q in [0.1, 0.5, 1.0] {
        for r in &axis {
            for tau in &axis {
                for s in [Scenario::SplitCatI, Scenario::JointSubtractIi] {
                    let a = evaluate(s, Method::ClosedForm, q, 0.0, *r, *tau).unwrap();
                    let b = evaluate(s, Method::Engine, q, 0.0, *r, *tau).unwrap();
                    for (x, y, what) in [(a.p_success, b.p_success, "P"), (a.fidelity, b.fidelity, "F")] {
                        let e = rel_err(x, y);
                        if e > worst.0 {
                            worst = (e, format!("{} {what} q={q} r={r} tau={tau}: {x} vs {y}", s.name()));
                        }
                    }
                }
            }
        }
    }
    assert!(worst.0 < 1e-9, "{}", worst.1);
}

#[test]
fn five_five_engine_agrees_with_closed_form() {
    for (q, p, r, tau) in [(0.5, 0.0, 1.0, 0.01), (0.5, 0.3, 0.7, 0.3), (1.2, 0.0, 0.4, 0.6)] {
        let a = five_photon_tmsv(q, p, r, tau, Method::ClosedForm).unwrap();
        let b = five_photon_tmsv(q, p, r, tau, Method::Engine).unwrap();
        assert!(rel_err(a.p_success, b.p_success) < 1e-9, "{a:?} {b:?}");
        assert!(rel_err(a.fidelity, b.fidelity) < 1e-9, "{a:?} {b:?}");
    }
}

#[test]
fn small_cat_regime_trends() {
    // A small target approaches vacuum, so scenario (ii) only reaches it as the
    // squeezing shrinks: fidelity rises to 1 while the probability falls to 0.
    let (q, tau) = (0.01, 0.3);
    let mut last = (0.0, 1.0);
    for r in [0.4, 0.2, 0.1, 0.05, 0.02] {
        let (_, ii) = compare_bell_schemes(q, r, tau, Method::Engine).unwrap();
        assert!(ii.fidelity > last.0 && ii.p_success < last.1, "r={r}: {ii:?}");
        last = (ii.fidelity, ii.p_success);
    }
    assert!(last.0 > 0.999 && last.1 < 1e-3, "{last:?}");
}

#[test]
fn success_probability_ignores_the_target() {
    let p = |q| compare_bell_schemes(q, 0.9, 0.4, Method::Engine).unwrap();
    let (a, b) = (p(0.1), p(1.0));
    assert!(rel_err(a.0.p_success, b.0.p_success) < 1e-12);
    assert!(rel_err(a.1.p_success, b.1.p_success) < 1e-12);
}
