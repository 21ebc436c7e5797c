//! Double-precision layer: real Lambert W branches, the 𝒲(p, q) factor,
//! residuals of the two cohomogeneity-2 equations and finite-difference
//! closure checks for charts with transcendental coefficients.

mod fd;
mod lambert;
mod residual;

pub use fd::{
    convergence_factor, fd_closure_check, goursat_numeric, tau_numeric, CoeffFn, FdOutcome,
    FdReport, NumericChart, ScalarFn,
};
pub use lambert::{lambert_w, w0_of_exp, w_factor, wm1_of_negexp, BranchId};
pub use residual::{
    evaluate_batch, residual, residual_goursat, residual_lambertw, Equation, ResidualSample,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("model error: {0}")]
    Model(String),
}
