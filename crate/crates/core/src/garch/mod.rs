//! CCC-GARCH(p,q) models with Gaussian quasi-maximum-likelihood fitting and
//! the parametric bootstrap test on their residuals.
//!
//! ```text
//! X_j  = Σ_j^{1/2} ε_j,    Σ_j = D_j R D_j,    D_j = diag(σ_j)
//! σ²_j = b + Σ_{k=1}^p B_k X²_{j-k} + Σ_{k=1}^q Γ_k σ²_{j-k}
//! ```
//!
//! `X²` is the elementwise square and `Σ_j^{1/2}` is the symmetric square
//! root throughout; the residual statistic is not rotation invariant, so the
//! choice of factor matters.

mod bootstrap;
mod fit;
mod params;
mod sim;

pub use bootstrap::{
    bootstrap_test, warp_speed_study, BootstrapOptions, StatisticRejections, WarpSpeedDesign,
    WarpSpeedReport,
};
pub use fit::{default_start, qmle_fit, qmle_fit_with, FitOptions, GarchFit, GarchStructure};
pub use params::{GarchParams, GarchSpec};
pub use sim::{
    garch_residuals, simulate_ccc_garch, simulate_from_presample, simulate_with_burn_in, GarchPath,
    Presample, BURN_IN, EXPLOSION_LIMIT,
};

use crate::error::Result;
use crate::statistic::{compute_tn_beta, Beta, StatisticValue};

/// `T^G_{n,β}`: the statistic on the raw QMLE residuals, not re-standardized.
pub fn garch_test_statistic(fit: &GarchFit, beta: Beta) -> Result<StatisticValue> {
    compute_tn_beta(&fit.residuals, beta)
}
