mod common;

use common::{rel_err, sv_cutoff};
use kfun::fock::{pure_loss_density, squeezed_vacuum_fock};
use kfun::{apply_uniform_loss, GaussianPureState, PhotonPattern};

#[test]
fn lossy_squeezed_vacuum_matches_environment_trace() {
    let mut worst = 0.0f64;
    for r in [0.3, 0.6, 0.9] {
        for tau in [0.2, 0.5, 0.8] {
            let k = GaussianPureState::squeezed_vacuum(r).kernel().unwrap();
            let mixed = apply_uniform_loss(&k, tau).unwrap();
            let psi = squeezed_vacuum_fock(r, sv_cutoff(r)).unwrap();
            assert!(psi.tail() < 1e-12);
            let rho = pure_loss_density(&psi, tau).unwrap();
            for n in 0..=10u32 {
                let got = mixed.lossy_pattern_probability(&PhotonPattern::full(vec![n])).unwrap();
                let want = rho.probability(n as usize);
                worst = worst.max(rel_err(got, want));
            }
            let nbar = mixed.mean_photon_number(0).unwrap();
            assert!((nbar - tau * r.sinh().powi(2)).abs() < 1e-9);
            assert!((rho.mean_photon_number() - nbar).abs() < 1e-10);
        }
    }
    assert!(worst < 1e-8, "worst relative error {worst}");
}

#[test]
fn lossy_completeness_tail() {
    // Twelve terms leave a tail of 1.3647e-6, computed from the binomial
    // thinning of the squeezed-vacuum photon distribution.
    let k = GaussianPureState::squeezed_vacuum(0.5).kernel().unwrap();
    let mixed = apply_uniform_loss(&k, 0.8).unwrap();
    let total: f64 = (0..=12u32)
        .map(|n| mixed.lossy_pattern_probability(&PhotonPattern::full(vec![n])).unwrap())
        .sum();
    assert!((1.0 - total - 1.3646749675855e-6).abs() < 1e-12, "tail {}", 1.0 - total);
}

#[test]
fn two_mode_marginal_traces_out_the_partner() {
    // Small squeezing keeps the partner's tail beyond ten photons below 1e-10
    // and the integrand degree inside the memoized range.
    let k = GaussianPureState::two_mode_squeezed(0.3).kernel().unwrap();
    let mixed = apply_uniform_loss(&k, 0.7).unwrap();
    let marginal: f64 = (0..=1u32)
        .map(|n| mixed.lossy_pattern_probability(&PhotonPattern::new(vec![n], vec![1]).unwrap()).unwrap())
        .sum();
    let joint: f64 = (0..=1u32)
        .flat_map(|n| (0..10u32).map(move |m| (m, n)))
        .map(|(m, n)| mixed.lossy_pattern_probability(&PhotonPattern::full(vec![m, n])).unwrap())
        .sum();
    assert!(rel_err(marginal, joint) < 1e-9, "{marginal} vs {joint}");
}
