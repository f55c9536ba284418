//! Fitting a closed-form rate to measured envelope values.

use serde::Serialize;

use crate::dissipation::linear_fit;
use crate::error::{Error, Result};
use crate::mixing::rate::{MixingMode, RateFunction};

#[derive(Clone, Debug, Serialize)]
pub struct RateFit {
    pub rate: RateFunction,
    pub ssr_exponential: f64,
    pub ssr_power: f64,
}

/// Chooses between c₁e^{−c₂t} and c/t^p by least squares on ln h.
pub fn fit_rate(samples: &[(f64, f64)], alpha: f64, beta: f64, mode: MixingMode) -> Result<RateFunction> {
    fit_rate_report(samples, alpha, beta, mode).map(|r| r.rate)
}

pub fn fit_rate_report(samples: &[(f64, f64)], alpha: f64, beta: f64, mode: MixingMode) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(t, h)| t > 0.0 && h > 0.0 && t.is_finite() && h.is_finite())
        .collect();
    if pts.len() < 5 {
        return Err(Error::validation(format!(
            "rate fit needs at least 5 positive samples, got {}",
            pts.len()
        )));
    }
    if pts.windows(2).any(|w| w[1].0 <= w[0].0 || w[1].1 > w[0].1) {
        return Err(Error::validation("samples must have increasing t and nonincreasing h"));
    }
    if pts[pts.len() - 1].1 >= pts[0].1 {
        return Err(Error::validation("samples do not decay"));
    }
    let t: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let lt: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let lh: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let e = linear_fit(&t, &lh)?;
    let p = linear_fit(&lt, &lh)?;
    let rate = if e.ssr <= p.ssr {
        if !(e.slope < 0.0) {
            return Err(Error::validation("fitted exponential rate does not decay"));
        }
        RateFunction::exponential(e.intercept.exp(), -e.slope, alpha, beta, mode)?
    } else {
        if !(p.slope < 0.0) {
            return Err(Error::validation("fitted power rate does not decay"));
        }
        RateFunction::power(p.intercept.exp(), -p.slope, alpha, beta, mode)?
    };
    Ok(RateFit {
        rate,
        ssr_exponential: e.ssr,
        ssr_power: p.ssr,
    })
}
