//! Largest singular value by power iteration on M*M with random restarts.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
pub struct PowerOptions {
    pub restarts: usize,
    /// Relative change of the norm estimate that ends a restart.
    pub tol: f64,
    pub min_iter: usize,
    pub max_iter: usize,
    pub seed: u64,
    /// Decision mode. A run stops as soon as an estimate exceeds the
    /// threshold (estimates are lower bounds, so the norm does too), and a
    /// restart also ends once its geometrically extrapolated limit stays
    /// below the threshold by a clear margin.
    pub threshold: Option<f64>,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            restarts: 10,
            tol: 1e-6,
            min_iter: 20,
            max_iter: 10_000,
            seed: 0x5eed,
            threshold: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PowerResult {
    pub norm: f64,
    /// Unit right singular vector estimate.
    pub vector: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
    /// Set when the run stopped early because the estimate passed the
    /// threshold.
    pub exceeded: bool,
    /// Set when some restart ended by extrapolation rather than by the
    /// change tolerance.
    pub extrapolated: bool,
}

pub fn random_unit(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut x: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    normalize(&mut x);
    x
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(x: &mut [Complex64]) -> f64 {
    let n = norm(x);
    if n > 0.0 {
        for z in x.iter_mut() {
            *z /= n;
        }
    }
    n
}

/// Estimates ‖M‖ given M and M*. The estimate ‖Mx‖ over unit x is a lower
/// bound that increases monotonically along each restart.
pub fn top_singular<F, G>(dim: usize, apply: F, adjoint: G, opts: &PowerOptions) -> PowerResult
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
    G: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let mut best = PowerResult {
        norm: 0.0,
        vector: vec![Complex64::new(0.0, 0.0); dim],
        iterations: 0,
        converged: true,
        exceeded: false,
        extrapolated: false,
    };
    if dim == 0 {
        return best;
    }
    let mut all_converged = true;
    for r in 0..opts.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (r as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut x = random_unit(dim, &mut rng);
        let mut est = 0.0;
        let mut prev_change = f64::INFINITY;
        let mut clear = 0;
        let mut converged = false;
        let mut it = 0;
        while it < opts.max_iter {
            it += 1;
            let y = apply(&x);
            let s = norm(&y);
            if opts.threshold.is_some_and(|t| s > t) {
                best.norm = s;
                best.vector = x;
                best.iterations += it;
                best.exceeded = true;
                return best;
            }
            if s == 0.0 {
                est = 0.0;
                converged = true;
                break;
            }
            let mut z = adjoint(&y);
            if normalize(&mut z) == 0.0 {
                est = s;
                converged = true;
                break;
            }
            let change = (s - est).abs() / s;
            est = s;
            x = z;
            if it >= opts.min_iter && change < opts.tol {
                converged = true;
                break;
            }
            if let Some(t) = opts.threshold {
                let rho = change / prev_change;
                let limit = if rho < 1.0 { s * (1.0 + change * rho / (1.0 - rho)) } else { f64::INFINITY };
                clear = if limit < 0.9 * t { clear + 1 } else { 0 };
                if it >= opts.min_iter && clear >= 3 {
                    converged = true;
                    best.extrapolated = true;
                    break;
                }
            }
            prev_change = change;
        }
        all_converged &= converged;
        if est > best.norm {
            best.norm = est;
            best.vector = x;
        }
        best.iterations += it;
    }
    best.converged = all_converged;
    best
}
