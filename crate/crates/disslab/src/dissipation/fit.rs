//! Least-squares fits of dissipation times and energy decay.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pulsed::Trajectory;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Sum of squared residuals.
    pub ssr: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::validation("linear fit needs at least two paired points"));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::validation("abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ssr / syy };
    Ok(LineFit {
        slope,
        intercept,
        r2,
        ssr,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    /// ln(−ln ratio) linear in n: ‖θ_n‖² ≈ exp(−c γⁿ).
    DoubleExponential,
    /// ln(−ln ratio) linear in ln n: ordinary exponential decay.
    SingleExponential,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub model: DecayModel,
    pub gamma_hat: f64,
    /// exp(intercept) of the double-exponential line, −ln ratio ≈ c γⁿ.
    pub c_hat: f64,
    pub window: (usize, usize),
    pub residual: f64,
    pub r2: f64,
    /// Slope of ln(−ln ratio) against ln n.
    pub power_slope: f64,
}

/// First step used by default; the first two are transient.
pub const DEFAULT_FIRST: usize = 2;

/// Fits y_n = ln(−ln(‖θ_n‖²/‖θ_0‖²)) given ln ratios. Steps whose ratio
/// does not resolve below 1 are skipped.
pub fn fit_decay_series(
    ns: &[usize],
    log_ratios: &[f64],
    window: Option<(usize, usize)>,
) -> Result<DecayFit> {
    let (lo, hi) = window.unwrap_or((DEFAULT_FIRST, usize::MAX));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut used = (usize::MAX, 0);
    for (&n, &lr) in ns.iter().zip(log_ratios) {
        if n < lo || n > hi || n == 0 {
            continue;
        }
        let neg = -lr;
        if !(neg > 1e-12) || !neg.is_finite() {
            continue;
        }
        xs.push(n as f64);
        ys.push(neg.ln());
        used = (used.0.min(n), used.1.max(n));
    }
    if xs.len() < 6 {
        return Err(Error::validation(format!(
            "only {} usable steps in the window; increase nu or the number of steps",
            xs.len()
        )));
    }
    let double = linear_fit(&xs, &ys)?;
    let lnx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let single = linear_fit(&lnx, &ys)?;
    let model = if double.ssr <= single.ssr {
        DecayModel::DoubleExponential
    } else {
        DecayModel::SingleExponential
    };
    let (residual, r2) = match model {
        DecayModel::DoubleExponential => (double.ssr, double.r2),
        DecayModel::SingleExponential => (single.ssr, single.r2),
    };
    Ok(DecayFit {
        model,
        gamma_hat: double.slope.exp(),
        c_hat: double.intercept.exp(),
        window: used,
        residual,
        r2,
        power_slope: single.slope,
    })
}

pub fn fit_energy_decay(traj: &Trajectory) -> Result<DecayFit> {
    fit_energy_decay_window(traj, None)
}

pub fn fit_energy_decay_window(traj: &Trajectory, window: Option<(usize, usize)>) -> Result<DecayFit> {
    let ns: Vec<usize> = (0..=traj.steps()).collect();
    let lr: Vec<f64> = ns.iter().map(|&n| traj.log_ratio(n)).collect();
    fit_decay_series(&ns, &lr, window)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let f = linear_fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        assert!((f.r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn synthetic_double_exponential() {
        let ns: Vec<usize> = (0..15).collect();
        let lr: Vec<f64> = ns.iter().map(|&n| -1e-5 * 3f64.powi(n as i32)).collect();
        let f = fit_decay_series(&ns, &lr, None).unwrap();
        assert_eq!(f.model, DecayModel::DoubleExponential);
        assert!((f.gamma_hat - 3.0).abs() < 1e-10);
    }

    #[test]
    fn heat_prefers_single_exponential() {
        let ns: Vec<usize> = (0..30).collect();
        let lr: Vec<f64> = ns.iter().map(|&n| -0.02 * n as f64).collect();
        let f = fit_decay_series(&ns, &lr, None).unwrap();
        assert_eq!(f.model, DecayModel::SingleExponential);
        assert!((f.power_slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_window_rejected() {
        let ns: Vec<usize> = (0..5).collect();
        let lr = vec![0.0; 5];
        assert!(fit_decay_series(&ns, &lr, None).is_err());
    }
}
