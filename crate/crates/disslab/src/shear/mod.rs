//! Continuous-time advection–diffusion by shear flows on the two-torus.

pub mod flow;
pub mod solver;
pub mod tau;

pub use flow::ShearFlow;
pub use solver::{cts_step, energy_defect, split_time, CtsGrid, CtsSolver, CtsState};
pub use tau::{
    shear_correlation, shear_mixing_envelope, solution_norm_dense, tau_d_cts, transport_gap_cts, CtsOptions, CtsTau,
    ShearEnvelope, TransportGap,
};
