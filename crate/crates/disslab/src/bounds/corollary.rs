//! Exponents of the explicit dissipation-time bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Corollary {
    /// Pulsed, strong power law: τ_d ≤ C ν^{−δ}.
    StrongPower { alpha: f64, beta: f64, p: f64 },
    /// Pulsed, weak power law: τ_d ≤ C ν^{−δ}.
    WeakPower { d: usize, alpha: f64, beta: f64, p: f64 },
    /// Continuous, strong power law: τ_d ≤ C/(ν|ln ν|^δ).
    FlowStrongPower { alpha: f64, beta: f64, p: f64 },
    /// Continuous, strong exponential: τ_d ≤ C ν^{−δ}.
    FlowStrongExp { alpha: f64, beta: f64, c2: f64, grad_u: f64 },
    /// Continuous, weak power law: τ_d ≤ C/(ν|ln ν|^δ).
    FlowWeakPower { d: usize, alpha: f64, beta: f64, p: f64 },
    /// Exponent γ of the lower bound H₃(ν) ≥ c ν^{−γ} for exponential rates.
    FlowLambdaLower { alpha: f64, beta: f64, c2: f64, grad_u: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!("{name} must be positive, got {v}")))
    }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!("{name} must be nonnegative, got {v}")))
    }
}

pub fn corollary_exponent(case: Corollary) -> Result<f64> {
    match case {
        Corollary::StrongPower { alpha, beta, p } => {
            positive("alpha", alpha)?;
            positive("beta", beta)?;
            positive("p", p)?;
            Ok((alpha + beta) / (alpha + beta + p))
        }
        Corollary::WeakPower { d, alpha, beta, p } => {
            nonneg("alpha", alpha)?;
            nonneg("beta", beta)?;
            positive("p", p)?;
            if p > 0.5 {
                return Err(Error::validation(format!(
                    "p = {p} > 1/2: a weak rate can never decay faster than n^(-1/2) (take f = g)"
                )));
            }
            let s = d as f64 + 2.0 * alpha + 2.0 * beta;
            Ok(s / (s + 2.0 * p))
        }
        Corollary::FlowStrongPower { alpha, beta, p } => {
            positive("alpha", alpha)?;
            positive("beta", beta)?;
            positive("p", p)?;
            Ok(2.0 * p / (alpha + beta))
        }
        Corollary::FlowStrongExp { alpha, beta, c2, grad_u } | Corollary::FlowLambdaLower { alpha, beta, c2, grad_u } => {
            positive("alpha", alpha)?;
            positive("beta", beta)?;
            positive("c2", c2)?;
            positive("grad_u", grad_u)?;
            let k = 2.0 * (alpha + beta) * grad_u;
            Ok(match case {
                Corollary::FlowStrongExp { .. } => k / (c2 + k),
                _ => c2 / (c2 + k),
            })
        }
        Corollary::FlowWeakPower { d, alpha, beta, p } => {
            positive("alpha", alpha)?;
            positive("beta", beta)?;
            positive("p", p)?;
            Ok(4.0 * p / (d as f64 + 2.0 * alpha + 2.0 * beta))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plug_in_values() {
        let s = corollary_exponent(Corollary::StrongPower { alpha: 1.0, beta: 1.0, p: 1.0 }).unwrap();
        assert!((s - 2.0 / 3.0).abs() < 1e-15);
        let w = corollary_exponent(Corollary::FlowWeakPower { d: 2, alpha: 1.0, beta: 1.0, p: 0.5 }).unwrap();
        assert!((w - 1.0 / 3.0).abs() < 1e-15);
        let tiny = corollary_exponent(Corollary::StrongPower { alpha: 1.0, beta: 1.0, p: 1e-12 }).unwrap();
        assert!((tiny - 1.0).abs() < 1e-11);
        let wp = corollary_exponent(Corollary::WeakPower { d: 2, alpha: 0.0, beta: 1.0, p: 0.5 }).unwrap();
        assert!((wp - 4.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_flow_pair_sums_to_one() {
        let a = Corollary::FlowStrongExp { alpha: 1.0, beta: 0.5, c2: 0.7, grad_u: 2.0 };
        let b = Corollary::FlowLambdaLower { alpha: 1.0, beta: 0.5, c2: 0.7, grad_u: 2.0 };
        let s = corollary_exponent(a).unwrap() + corollary_exponent(b).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weak_p_above_half_rejected() {
        let e = corollary_exponent(Corollary::WeakPower { d: 2, alpha: 0.0, beta: 1.0, p: 0.6 }).unwrap_err();
        assert!(e.to_string().contains("n^(-1/2)"));
    }
}
