//! Coherent-basis ("K-function") representation of multi-mode Gaussian
//! states with analytic photon subtraction, photon-number heralding,
//! boson-sampling pattern probabilities and a pure-loss channel.
//!
//! Conventions: `hbar = 1`, vacuum covariance `I/2`, phase-space vectors in
//! `qqpp` order, coherent amplitudes `alpha = (q + i p)/sqrt(2)`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod gbs;
pub mod hafnian;
pub mod integral;
pub mod io;
pub mod kstate;
pub mod linalg;
pub mod loss;
pub mod scenarios;

pub use error::{Error, Result};
pub use gaussian::{
    build_k_kernel, cluster_b_matrix, cluster_b_matrix_general, cluster_covariance,
    displacement_factor, gamma_inverse_blocks, k_eval, GaussianPureState, GraphSpec, KKernel,
};
pub use gbs::{build_h, herald, pattern_probability, HMatrix, PhotonPattern};
pub use hafnian::{hafnian, loop_hafnian};
pub use integral::{
    gaussian_integral, gaussian_moment, integrate, ComplexGaussianIntegrand, MomentMatrix,
    Monomial,
};
pub use kstate::{
    cat_bell, subtract, subtract_coherent, CoherentSuperposition, NonGaussianKState, Operation,
};
pub use loss::{apply_uniform_loss, MixedKernelState};
pub use linalg::{CMatrix, CVector, RMatrix, RVector, C64};
pub use scenarios::{
    compare_bell_schemes, five_photon_tmsv, sweep, Method, Scenario, ScenarioResult,
};
