//! Mixing rate functions h and their inverses.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateKind {
    /// h(t) = c / t^p
    Power { c: f64, p: f64 },
    /// h(t) = c₁ e^{−c₂ t}
    Exponential { c1: f64, c2: f64 },
    /// Samples (t, h(t)), interpolated linearly in ln h.
    Tabulated { samples: Vec<(f64, f64)> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixingMode {
    Strong,
    Weak,
}

impl FromStr for MixingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(MixingMode::Strong),
            "weak" => Ok(MixingMode::Weak),
            _ => Err(Error::validation(format!("unknown mixing mode '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFunction {
    pub kind: RateKind,
    pub alpha: f64,
    pub beta: f64,
    pub mode: MixingMode,
}

impl RateFunction {
    pub fn new(kind: RateKind, alpha: f64, beta: f64, mode: MixingMode) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::validation("class exponents must be finite and nonnegative"));
        }
        match mode {
            MixingMode::Strong if !(alpha > 0.0 && beta > 0.0) => {
                return Err(Error::validation(
                    "strong mixing rates need alpha > 0 and beta > 0",
                ))
            }
            MixingMode::Weak if alpha == 0.0 && beta == 0.0 => {
                return Err(Error::validation(
                    "no map is weakly mixing with alpha = beta = 0",
                ))
            }
            _ => {}
        }
        match &kind {
            RateKind::Power { c, p } => {
                if !(*c > 0.0 && *p > 0.0) || !c.is_finite() || !p.is_finite() {
                    return Err(Error::validation("power rate needs c > 0 and p > 0"));
                }
            }
            RateKind::Exponential { c1, c2 } => {
                if !(*c1 > 0.0 && *c2 > 0.0) || !c1.is_finite() || !c2.is_finite() {
                    return Err(Error::validation("exponential rate needs c1 > 0 and c2 > 0"));
                }
            }
            RateKind::Tabulated { samples } => check_samples(samples, mode)?,
        }
        Ok(RateFunction {
            kind,
            alpha,
            beta,
            mode,
        })
    }

    pub fn power(c: f64, p: f64, alpha: f64, beta: f64, mode: MixingMode) -> Result<Self> {
        Self::new(RateKind::Power { c, p }, alpha, beta, mode)
    }

    pub fn exponential(c1: f64, c2: f64, alpha: f64, beta: f64, mode: MixingMode) -> Result<Self> {
        Self::new(RateKind::Exponential { c1, c2 }, alpha, beta, mode)
    }

    pub fn tabulated(samples: Vec<(f64, f64)>, alpha: f64, beta: f64, mode: MixingMode) -> Result<Self> {
        Self::new(RateKind::Tabulated { samples }, alpha, beta, mode)
    }

    /// Parses `power:c,p`, `exp:c1,c2` or `file:path` (CSV of t,h).
    pub fn parse(text: &str, alpha: f64, beta: f64, mode: MixingMode) -> Result<Self> {
        let (head, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::validation(format!("rate '{text}' lacks a kind prefix")))?;
        let nums = || -> Result<Vec<f64>> {
            rest.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::validation(format!("bad number '{v}' in rate '{text}'")))
                })
                .collect()
        };
        match head {
            "power" => match nums()?.as_slice() {
                [c, p] => Self::power(*c, *p, alpha, beta, mode),
                _ => Err(Error::validation("power rate takes two numbers c,p")),
            },
            "exp" | "exponential" => match nums()?.as_slice() {
                [c1, c2] => Self::exponential(*c1, *c2, alpha, beta, mode),
                _ => Err(Error::validation("exponential rate takes two numbers c1,c2")),
            },
            "file" => Self::tabulated(read_samples(Path::new(rest))?, alpha, beta, mode),
            _ => Err(Error::validation(format!("unknown rate kind '{head}'"))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            RateKind::Power { c, p } => c / t.powf(*p),
            RateKind::Exponential { c1, c2 } => c1 * (-c2 * t).exp(),
            RateKind::Tabulated { samples } => log_interp(samples, t),
        }
    }

    /// h⁻¹(y): the time at which h falls to y. Values above h(0) map to 0.
    pub fn inverse(&self, y: f64) -> f64 {
        if !(y > 0.0) {
            return f64::INFINITY;
        }
        match &self.kind {
            RateKind::Power { c, p } => (c / y).powf(1.0 / p),
            RateKind::Exponential { c1, c2 } => ((c1 / y).ln() / c2).max(0.0),
            RateKind::Tabulated { samples } => log_interp_inverse(samples, y),
        }
    }

    /// ln h(t), accurate where h underflows.
    pub fn ln_eval(&self, t: f64) -> f64 {
        match &self.kind {
            RateKind::Power { c, p } => c.ln() - p * t.ln(),
            RateKind::Exponential { c1, c2 } => c1.ln() - c2 * t,
            RateKind::Tabulated { samples } => log_interp(samples, t).ln(),
        }
    }

    /// h⁻¹(e^{ln_y}).
    pub fn inverse_ln(&self, ln_y: f64) -> f64 {
        match &self.kind {
            RateKind::Power { c, p } => ((c.ln() - ln_y) / p).exp(),
            RateKind::Exponential { c1, c2 } => ((c1.ln() - ln_y) / c2).max(0.0),
            RateKind::Tabulated { .. } => self.inverse(ln_y.exp()),
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            RateKind::Power { c, p } => format!("power:{c},{p}"),
            RateKind::Exponential { c1, c2 } => format!("exp:{c1},{c2}"),
            RateKind::Tabulated { samples } => format!("tabulated({} samples)", samples.len()),
        }
    }
}

fn check_samples(samples: &[(f64, f64)], mode: MixingMode) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::validation("a tabulated rate needs at least two samples"));
    }
    for &(t, h) in samples {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::validation(format!("sample time {t} must be finite and >= 0")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::validation(format!("rate value {h} must be positive")));
        }
    }
    for w in samples.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::validation("sample times must increase"));
        }
        if w[1].1 >= w[0].1 {
            return Err(Error::validation(format!(
                "rate must decrease, but h({}) = {} >= h({}) = {}",
                w[1].0, w[1].1, w[0].0, w[0].1
            )));
        }
    }
    if mode == MixingMode::Weak {
        for &(t, h) in samples {
            if t >= 1.0 && h < (1.0 - 1e-12) / t.sqrt() {
                return Err(Error::validation(format!(
                    "weak rate h({t}) = {h} is below 1/sqrt(n); taking f = g shows no weak rate can be faster"
                )));
            }
        }
    }
    Ok(())
}

fn log_interp(s: &[(f64, f64)], t: f64) -> f64 {
    if t <= s[0].0 {
        return s[0].1;
    }
    let i = s.iter().position(|p| p.0 >= t).unwrap_or(s.len() - 1).max(1);
    let (t0, h0) = s[i - 1];
    let (t1, h1) = s[i];
    let w = (t - t0) / (t1 - t0);
    (h0.ln() + w * (h1.ln() - h0.ln())).exp()
}

fn log_interp_inverse(s: &[(f64, f64)], y: f64) -> f64 {
    if y >= s[0].1 {
        return s[0].0;
    }
    let ly = y.ln();
    let i = s.iter().position(|p| p.1 <= y).unwrap_or(s.len() - 1).max(1);
    let (t0, h0) = s[i - 1];
    let (t1, h1) = s[i];
    let w = (ly - h0.ln()) / (h1.ln() - h0.ln());
    t0 + w * (t1 - t0)
}

/// Reads `t,h` pairs; a header line and blank lines are skipped.
pub fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',');
        let (a, b) = match (parts.next(), parts.next()) {
            (Some(a), Some(b)) => (a.trim(), b.trim()),
            _ => return Err(Error::validation(format!("bad sample line '{line}'"))),
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(t), Ok(h)) => out.push((t, h)),
            _ if out.is_empty() => continue,
            _ => return Err(Error::validation(format!("bad sample line '{line}'"))),
        }
    }
    Ok(out)
}
