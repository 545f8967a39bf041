//! Large-system analysis: MSE functions, decoupled-noise fixed points, closed
//! forms, state evolution, mutual information and antenna-ratio searches.

mod closed_form;
mod fixed_point;
mod information;
mod mse;
mod quadrature;
mod rate;
mod separable;
mod state_evolution;

pub use closed_form::{
    lmmse_cluster_sinr, sinr_fd_lmmse_closed, sinr_fd_zf_closed, sinr_pd_closed_form, LmmseFdBounds,
};
pub use fixed_point::{sinr_fd, solve_fixed_point, FdSinr, FixedPointOptions, FixedPointResult};
pub use information::{awgn_mutual_information, sinr_for_rate};
pub use mse::{psi, MseSpec};
pub use quadrature::{ComplexGaussRule, GaussHermite, DEFAULT_ORDER};
pub use rate::{asymptotic_sinr, min_antenna_ratio, RateQuery, RateResult, SinrModel};
pub use state_evolution::{se_trajectory, sinr_fd_se, SeTrajectory};
