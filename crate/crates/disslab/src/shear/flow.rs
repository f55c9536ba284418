//! Shear profiles v(y) on the unit circle.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

const GRID: usize = 4096;

/// u = (v(y), 0) with v(y) = a₀ + Σ aₙ cos 2πny + bₙ sin 2πny.
#[derive(Clone, Debug, Serialize)]
pub struct ShearFlow {
    pub mean: f64,
    /// (aₙ, bₙ) for n = 1, 2, …
    pub coeffs: Vec<(f64, f64)>,
    /// sup |v′|, which is ‖∇u‖_{L∞}.
    pub grad_norm: f64,
    pub nondegenerate_critical_points: bool,
}

impl ShearFlow {
    pub fn new(mean: f64, coeffs: Vec<(f64, f64)>) -> Result<Self> {
        if !mean.is_finite() || coeffs.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::validation("shear coefficients must be finite"));
        }
        let mut f = ShearFlow {
            mean,
            coeffs,
            grad_norm: 0.0,
            nondegenerate_critical_points: false,
        };
        f.grad_norm = f.sup_derivative();
        f.nondegenerate_critical_points = f.check_critical_points();
        Ok(f)
    }

    /// v(y) = sin 2πy.
    pub fn sine() -> Self {
        Self::new(0.0, vec![(0.0, 1.0)]).expect("sine profile")
    }

    /// v ≡ 0.
    pub fn still() -> Self {
        Self::new(0.0, Vec::new()).expect("zero profile")
    }

    /// `sin`, `zero` or `coeffs:a0,a1,b1,a2,b2,…`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sin" => return Ok(Self::sine()),
            "zero" => return Ok(Self::still()),
            _ => {}
        }
        let rest = s
            .strip_prefix("coeffs:")
            .ok_or_else(|| Error::validation(format!("unknown shear '{s}'; use sin, zero or coeffs:...")))?;
        let v: Vec<f64> = rest
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::validation(format!("bad coefficient '{x}'")))
            })
            .collect::<Result<_>>()?;
        if v.is_empty() || v.len() % 2 == 0 {
            return Err(Error::validation("coeffs needs a0 followed by (a_n, b_n) pairs"));
        }
        let pairs = v[1..].chunks(2).map(|c| (c[0], c[1])).collect();
        Self::new(v[0], pairs)
    }

    pub fn bandwidth(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|&(a, b)| a != 0.0 || b != 0.0)
            .map_or(0, |i| i + 1)
    }

    /// The profile −v, which runs the transport backwards.
    pub fn reversed(&self) -> Self {
        ShearFlow {
            mean: -self.mean,
            coeffs: self.coeffs.iter().map(|&(a, b)| (-a, -b)).collect(),
            grad_norm: self.grad_norm,
            nondegenerate_critical_points: self.nondegenerate_critical_points,
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.mean
            + self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| {
                    let w = 2.0 * PI * (i + 1) as f64 * y;
                    a * w.cos() + b * w.sin()
                })
                .sum::<f64>()
    }

    /// j-th derivative, j ≥ 1.
    pub fn derivative(&self, y: f64, j: u32) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let k = 2.0 * PI * (i + 1) as f64;
                let w = k * y;
                // d^j/dy^j of (a cos w + b sin w) rotates the phase by jπ/2
                let (c, s) = match j % 4 {
                    0 => (a, b),
                    1 => (b, -a),
                    2 => (-a, -b),
                    _ => (-b, a),
                };
                k.powi(j as i32) * (c * w.cos() + s * w.sin())
            })
            .sum()
    }

    /// Grid maximum of |v′| on 4096 points.
    pub fn grid_grad_max(&self) -> f64 {
        (0..GRID)
            .map(|i| self.derivative(i as f64 / GRID as f64, 1).abs())
            .fold(0.0, f64::max)
    }

    fn sup_derivative(&self) -> f64 {
        if self.bandwidth() == 0 {
            return 0.0;
        }
        let h = 1.0 / GRID as f64;
        let g = |y: f64| self.derivative(y, 1).abs();
        let (i, _) = (0..GRID)
            .map(|i| (i, g(i as f64 * h)))
            .fold((0, -1.0), |acc, p| if p.1 > acc.1 { p } else { acc });
        // golden-section search on the bracketing cell pair
        let (mut a, mut b) = ((i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if g(c) >= g(d) {
                b = d;
            } else {
                a = c;
            }
        }
        g(0.5 * (a + b)).max(g(i as f64 * h))
    }

    /// Every zero of v′ has v″ clearly nonzero.
    fn check_critical_points(&self) -> bool {
        if self.bandwidth() == 0 {
            return false;
        }
        let h = 1.0 / GRID as f64;
        let d: Vec<f64> = (0..GRID).map(|i| self.derivative(i as f64 * h, 1)).collect();
        let scale = (0..GRID)
            .map(|i| self.derivative(i as f64 * h, 2).abs())
            .fold(0.0, f64::max);
        let mut found = false;
        for i in 0..GRID {
            let (p, c, n) = (d[(i + GRID - 1) % GRID], d[i], d[(i + 1) % GRID]);
            if c.abs() > p.abs() || c.abs() > n.abs() {
                continue;
            }
            if p * n < 0.0 || c == 0.0 {
                found = true;
                if self.derivative(i as f64 * h, 2).abs() < 1e-3 * scale {
                    return false;
                }
            } else if c.abs() < 1e-9 * self.grad_norm {
                // v′ touches zero without changing sign
                return false;
            }
        }
        found
    }
}
