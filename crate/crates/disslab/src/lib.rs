pub mod algebra;
pub mod battery;
pub mod bounds;
pub mod cli;
pub mod convention;
pub mod dissipation;
pub mod error;
pub mod field;
pub mod koopman;
pub mod lattice;
pub mod mixing;
pub mod power;
pub mod pulsed;
pub mod shear;

pub use convention::{Mode, Scaling, SpectralConvention};
pub use error::{Error, Result};
pub use field::{sobolev_norm, SpectralField};
