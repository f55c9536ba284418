//! Strong and weak mixing rates of toral automorphisms.

pub mod fit;
pub mod rate;
pub mod strong;
pub mod transfer;
pub mod weak;

pub use fit::{fit_rate, fit_rate_report, RateFit};
pub use rate::{read_samples, MixingMode, RateFunction, RateKind};
pub use strong::{strong_envelope, EnvelopePoint, MixingEnvelope, DEFAULT_EPS};
pub use transfer::{transfer_exponents, transfer_rate, TransferredRate};
pub use weak::{correlation, weak_cesaro, weak_sup, weak_sup_scan, WeakSupPoint, WeakSupScan};
