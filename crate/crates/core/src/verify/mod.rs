//! The identity suite and the estimators it relies on.

mod convergence;
mod mu;
mod registry;
pub mod sampling;
mod su3;
mod suite;

pub use convergence::{fd_convergence, ConvergenceStudy};
pub use mu::{
    estimate_mu, estimate_mu_with, mu_bracket, mu_samples, MuEstimate, DEGENERATE_BRACKET,
    PAIRS_PER_POINT,
};
pub use registry::{residual, vector_residual, IdentityId, IdentityReport, IdentitySpec, REGISTRY};
pub use su3::{
    build_su3_frame, estimate_lambda, frame_sigma, FrameField, LambdaEstimate, Su3Frame,
};
pub use suite::{
    check_einstein, check_pde_pair, classify_gray_hervella_w1, run_identity, ClassLabel,
    Classification, EinsteinCheck, LambdaSummary, Verifier, DEFAULT_SEED, DRAWS_PER_POINT,
};
