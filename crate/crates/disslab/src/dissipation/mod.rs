//! Dissipation times, decay fits and the lower-bound chain.

pub mod chain;
pub mod exact;
pub mod fit;
pub mod operator;

pub use chain::{check_lower_bound_chain, ChainReport};
pub use exact::{tau_d_exact, trivial_bound, OrbitSumTable};
pub use fit::{
    fit_decay_series, fit_energy_decay, fit_energy_decay_window, linear_fit, DecayFit, DecayModel, LineFit,
};
pub use operator::{operator_norm, tau_d_operator, OperatorTau, LEAK_TOL};
