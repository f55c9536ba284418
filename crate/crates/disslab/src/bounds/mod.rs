//! Dissipation-time bounds from mixing rates.

pub mod check;
pub mod corollary;
pub mod profile;
pub mod weyl;

pub use check::{check_bound, eigenvalue_floor, DissipationReport, TauSample, Verdict};
pub use corollary::{corollary_exponent, Corollary};
pub use profile::{
    h1_exponential_refinement, h1_power_closed, BoundProfile, ExpRefinement, HValue, Which, C_CONTINUOUS,
    C_DISCRETE,
};
pub use weyl::{lattice_count, weyl_constant};
