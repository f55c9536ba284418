//! Moving a strong rate from one pair of Sobolev classes to another by
//! interpolation: h′ = λ₁^{−γ} h^δ.

use serde::Serialize;

use crate::convention::SpectralConvention;
use crate::error::{Error, Result};
use crate::mixing::rate::{MixingMode, RateFunction, RateKind};

#[derive(Clone, Debug, Serialize)]
pub struct TransferredRate {
    pub rate: RateFunction,
    pub gamma: f64,
    pub delta: f64,
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Exponents (γ, δ) for the move (α, β) → (α′, β′).
pub fn transfer_exponents(alpha: f64, beta: f64, alpha2: f64, beta2: f64) -> (f64, f64) {
    let gamma = 0.5
        * (pos(alpha2 - alpha)
            + pos(beta2 - beta)
            + beta2.min(beta) * pos(1.0 - alpha2 / alpha)
            + alpha2.min(alpha) * pos(1.0 - beta2 / beta));
    let delta = alpha2.min(alpha) * beta2.min(beta) / (alpha * beta);
    (gamma, delta)
}

pub fn transfer_rate(
    rate: &RateFunction,
    alpha2: f64,
    beta2: f64,
    convention: SpectralConvention,
) -> Result<TransferredRate> {
    if rate.mode != MixingMode::Strong {
        return Err(Error::validation("only strong rates can be transferred"));
    }
    if !(alpha2 > 0.0 && beta2 > 0.0) || !alpha2.is_finite() || !beta2.is_finite() {
        return Err(Error::validation("target exponents must be positive"));
    }
    let (gamma, delta) = transfer_exponents(rate.alpha, rate.beta, alpha2, beta2);
    let pre = convention.lambda1().powf(-gamma);
    let kind = match &rate.kind {
        RateKind::Power { c, p } => RateKind::Power {
            c: pre * c.powf(delta),
            p: delta * p,
        },
        RateKind::Exponential { c1, c2 } => RateKind::Exponential {
            c1: pre * c1.powf(delta),
            c2: delta * c2,
        },
        RateKind::Tabulated { samples } => RateKind::Tabulated {
            samples: samples.iter().map(|&(t, h)| (t, pre * h.powf(delta))).collect(),
        },
    };
    Ok(TransferredRate {
        rate: RateFunction::new(kind, alpha2, beta2, MixingMode::Strong)?,
        gamma,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_class_is_identity() {
        let r = RateFunction::power(2.0, 1.0, 1.0, 1.0, MixingMode::Strong).unwrap();
        let t = transfer_rate(&r, 1.0, 1.0, SpectralConvention::geometric(2)).unwrap();
        assert_eq!((t.gamma, t.delta), (0.0, 1.0));
        assert_eq!(t.rate.kind, r.kind);
    }

    #[test]
    fn lowering_regularity() {
        // (1,1) → (0.5,0.5): γ = ½(½·½ + ½·½) = 0.25, δ = 0.25
        let (g, d) = transfer_exponents(1.0, 1.0, 0.5, 0.5);
        assert!((g - 0.25).abs() < 1e-15 && (d - 0.25).abs() < 1e-15);
        // raising costs only the difference
        let (g, d) = transfer_exponents(1.0, 1.0, 2.0, 3.0);
        assert!((g - 1.5).abs() < 1e-15 && (d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_rate_scales() {
        let r = RateFunction::exponential(4.0, 2.0, 1.0, 1.0, MixingMode::Strong).unwrap();
        let conv = SpectralConvention::lattice(2);
        let t = transfer_rate(&r, 0.5, 1.0, conv).unwrap();
        for n in 1..6 {
            let x = n as f64;
            let expect = r.eval(x).powf(t.delta) * conv.lambda1().powf(-t.gamma);
            assert!((t.rate.eval(x) - expect).abs() < 1e-14 * expect);
        }
    }

    #[test]
    fn rejects_weak_input() {
        let r = RateFunction::power(1.0, 0.5, 0.0, 1.0, MixingMode::Weak).unwrap();
        assert!(transfer_rate(&r, 1.0, 1.0, SpectralConvention::lattice(2)).is_err());
    }
}
