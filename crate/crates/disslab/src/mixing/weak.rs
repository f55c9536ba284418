//! Weak (Cesàro) mixing: exact correlations and the worst-case
//! Cesàro average over a mode ball.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::ToralAutomorphism;
use crate::convention::{Mode, SpectralConvention};
use crate::dissipation::linear_fit;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::pulsed::ball_modes;

/// Orbit escape test for m ↦ Bʲm built from the eigenframe of B. Once
/// |Bʲm| provably exceeds a radius it never returns inside it.
struct Escape {
    frame: Option<(DMatrix<Complex64>, Vec<f64>, f64)>,
}

impl Escape {
    fn new(t: &ToralAutomorphism) -> Self {
        let frame = ToralAutomorphism::new(t.b().clone()).ok().and_then(|tb| {
            let e = tb.eigenframe().ok()?;
            let sigma = e.vectors.clone().singular_values().min();
            let moduli = e.values.iter().map(|z| z.norm()).collect();
            Some((e.inverse.clone(), moduli, sigma))
        });
        Escape { frame }
    }

    /// First j after which |Bʲm| > radius for good, if known.
    fn steps(&self, m: &Mode, radius: f64) -> Option<usize> {
        let (inv, moduli, sigma) = self.frame.as_ref()?;
        let d = m.dim();
        let mut best: Option<usize> = None;
        for (i, &mu) in moduli.iter().enumerate() {
            if mu <= 1.0 + 1e-9 {
                continue;
            }
            let a: Complex64 = (0..d).map(|j| inv[(i, j)] * m.get(j) as f64).sum();
            let a = a.norm();
            if a < 1e-12 {
                continue;
            }
            // ½ σ_min |a_i| μ_iʲ > radius
            let need = ((2.0 * radius / (sigma * a)).ln() / mu.ln()).max(0.0).floor() as usize + 1;
            best = Some(best.map_or(need, |b: usize| b.min(need)));
        }
        best
    }
}

/// c_j = ⟨Uʲf, g⟩ = Σ_m f̂(Bʲm) conj ĝ(m) for j < n.
pub fn correlation(t: &ToralAutomorphism, f: &SpectralField, g: &SpectralField, n: usize) -> Result<Vec<Complex64>> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::validation("correlation needs nonempty supports"));
    }
    if f.dimension() != t.dim() || g.dimension() != t.dim() {
        return Err(Error::validation("field dimension differs from the map"));
    }
    let reach = f.modes().map(|m| m.norm()).fold(0.0, f64::max);
    let escape = Escape::new(t);
    let mut corr = vec![Complex64::new(0.0, 0.0); n];
    for (m, gm) in g.iter() {
        let stop = escape.steps(m, reach).map_or(n, |s| s.min(n));
        let mut x = m.clone();
        for (j, c) in corr.iter_mut().enumerate().take(stop) {
            if j > 0 {
                x = t.pull_mode(&x)?;
            }
            *c += f.get(&x) * gm.conj();
        }
    }
    Ok(corr)
}

/// ((1/n) Σ_{j<n} |⟨Uʲf, g⟩|²)^{1/2}.
pub fn weak_cesaro(t: &ToralAutomorphism, f: &SpectralField, g: &SpectralField, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::validation("n must be at least 1"));
    }
    let c = correlation(t, f, g, n)?;
    Ok((c.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakSupPoint {
    pub n: usize,
    pub radius: f64,
    pub modes: usize,
    /// Largest Cesàro average found over ‖f‖_α = ‖g‖_β = 1 supported in the ball.
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakSupScan {
    pub alpha: f64,
    pub beta: f64,
    pub points: Vec<WeakSupPoint>,
    /// −slope of ln value against ln n.
    pub exponent: f64,
}

/// Worst case of the weak Cesàro average over fields supported in the
/// ball |k| ≤ radius, by alternating maximization over f and g. The
/// result is a lower bound for the sup over all fields.
pub fn weak_sup(
    t: &ToralAutomorphism,
    alpha: f64,
    beta: f64,
    n: usize,
    radius: f64,
    convention: SpectralConvention,
    seed: u64,
) -> Result<WeakSupPoint> {
    if n == 0 || !(radius >= 1.0) {
        return Err(Error::validation("weak sup needs n ≥ 1 and radius ≥ 1"));
    }
    if !(alpha >= 0.0 && beta >= 0.0) {
        return Err(Error::validation("class exponents must be nonnegative"));
    }
    let modes = ball_modes(t.dim(), radius);
    let index: HashMap<&Mode, usize> = modes.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let lam: Vec<f64> = modes.iter().map(|m| convention.eigenvalue(m)).collect();
    let escape = Escape::new(t);
    // entries (j, p, q, w): mode q reaches mode p = Bʲq inside the ball
    let mut entries: Vec<(usize, usize, usize, f64)> = Vec::new();
    for (q, m) in modes.iter().enumerate() {
        let stop = escape.steps(m, radius).map_or(n, |s| s.min(n));
        let mut x = m.clone();
        for j in 0..stop {
            if j > 0 {
                x = t.pull_mode(&x)?;
            }
            if let Some(&p) = index.get(&x) {
                entries.push((j, p, q, lam[p].powf(-alpha / 2.0) * lam[q].powf(-beta / 2.0)));
            }
        }
    }
    let size = modes.len();
    let corr = |u: &[f64], h: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        for &(j, p, q, w) in &entries {
            c[j] += w * u[p] * h[q];
        }
        c
    };
    let normalize = |v: &mut Vec<f64>| -> bool {
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s == 0.0 || !s.is_finite() {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= s);
        true
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for start in 0..4 {
        let mut h: Vec<f64> = if start == 0 {
            // concentrate on the lowest modes
            let low = lam.iter().copied().fold(f64::INFINITY, f64::min);
            lam.iter().map(|&l| if l <= low * (1.0 + 1e-12) { 1.0 } else { 0.0 }).collect()
        } else {
            (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let mut u: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if !normalize(&mut h) || !normalize(&mut u) {
            continue;
        }
        let mut q_prev = 0.0;
        for _ in 0..2000 {
            let c = corr(&u, &h);
            let mut un = vec![0.0; size];
            for &(j, p, q, w) in &entries {
                un[p] += c[j] * w * h[q];
            }
            if !normalize(&mut un) {
                break;
            }
            u = un;
            let c = corr(&u, &h);
            let mut hn = vec![0.0; size];
            for &(j, p, q, w) in &entries {
                hn[q] += c[j] * w * u[p];
            }
            if !normalize(&mut hn) {
                break;
            }
            h = hn;
            let qv: f64 = corr(&u, &h).iter().map(|x| x * x).sum();
            let done = (qv - q_prev).abs() <= 1e-12 * qv;
            q_prev = qv;
            if done {
                break;
            }
        }
        best = best.max(q_prev);
    }
    Ok(WeakSupPoint {
        n,
        radius,
        modes: size,
        value: (best / n as f64).sqrt(),
    })
}

/// Runs `weak_sup` over `ns` with radius r0·n^{1/d} and fits the decay
/// exponent.
pub fn weak_sup_scan(
    t: &ToralAutomorphism,
    alpha: f64,
    beta: f64,
    ns: &[usize],
    r0: f64,
    convention: SpectralConvention,
) -> Result<WeakSupScan> {
    let d = t.dim() as f64;
    let points = ns
        .iter()
        .map(|&n| weak_sup(t, alpha, beta, n, (r0 * (n as f64).powf(1.0 / d)).max(1.0), convention, n as u64))
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.value.ln()).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(WeakSupScan {
        alpha,
        beta,
        points,
        exponent: -fit.slope,
    })
}
