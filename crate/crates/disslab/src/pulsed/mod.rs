pub mod system;
pub mod truncated;

pub use system::{evolve, inviscid_gap, step, InviscidGap, PulsedSystem, Trajectory};
pub use truncated::{ball_modes, TruncatedOperator, LEAK_TOL};
