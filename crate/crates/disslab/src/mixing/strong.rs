//! Strong mixing envelope of a toral automorphism.
//!
//! By duality the best constant in |⟨Uⁿf, g⟩| ≤ e(n)‖f‖_α‖g‖_β is
//! e(n) = sup_{k≠0} λ(Bⁿk)^{−α/2} λ(k)^{−β/2}. The sup is found exactly:
//! a seed value e₀ ≤ e(n) restricts the search to |Bⁿk|^α |k|^β ≤ 1/e₀,
//! which is covered by one ellipsoid per dyadic shell of |k|.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::ToralAutomorphism;
use crate::convention::SpectralConvention;
use crate::error::{Error, Result};
use crate::lattice::Ellipsoid;
use crate::mixing::fit::fit_rate;
use crate::mixing::rate::{MixingMode, RateFunction};
use crate::pulsed::ball_modes;

/// Default relative tail tolerance.
pub const DEFAULT_EPS: f64 = 1e-4;
/// Largest certified scan radius.
pub const MAX_RADIUS: f64 = 1e15;
const SHELL_BITS: u32 = 20;

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopePoint {
    pub n: usize,
    pub value: f64,
    pub argmax: Vec<i64>,
    /// Every k with |k| ≤ scan_radius was accounted for exactly.
    pub scan_radius: f64,
    /// Bound on the term for any |k| > scan_radius.
    pub tail_cert: f64,
    pub candidates: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingEnvelope {
    pub alpha: f64,
    pub beta: f64,
    pub points: Vec<EnvelopePoint>,
    pub fitted: Option<RateFunction>,
}

impl MixingEnvelope {
    pub fn value(&self, n: usize) -> Option<f64> {
        self.points.iter().find(|p| p.n == n).map(|p| p.value)
    }

    pub fn samples(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.n as f64, p.value)).collect()
    }
}

type BigMat = Vec<Vec<BigInt>>;

fn big_identity(d: usize) -> BigMat {
    (0..d)
        .map(|i| (0..d).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect()
}

fn big_of(m: &crate::algebra::IntMatrix) -> BigMat {
    let d = m.dim();
    (0..d)
        .map(|i| (0..d).map(|j| BigInt::from(m.get(i, j))).collect())
        .collect()
}

fn big_mul(a: &BigMat, b: &BigMat) -> BigMat {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).fold(BigInt::zero(), |s, l| s + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}

fn big_apply(a: &BigMat, x: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(BigInt::zero(), |s, (r, v)| s + r * v))
        .collect()
}

fn norm_sq(x: &[BigInt]) -> BigInt {
    x.iter().fold(BigInt::zero(), |s, v| s + v * v)
}

fn ln_big(x: &BigInt) -> f64 {
    match x.to_f64() {
        Some(v) if v.is_finite() => v.ln(),
        _ => {
            let bits = x.bits();
            let shift = bits.saturating_sub(60);
            let top = (x >> shift).to_f64().unwrap_or(1.0);
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

struct Best {
    ln: f64,
    arg: Vec<BigInt>,
}

impl Best {
    fn offer(&mut self, ln: f64, k: &[BigInt]) {
        if ln > self.ln || (ln == self.ln && k < self.arg.as_slice()) {
            self.ln = ln;
            self.arg = k.to_vec();
        }
    }
}

/// Strong α, β envelope e(0..=n_max), each value certified to relative
/// accuracy ε against the lattice beyond the scan radius.
pub fn strong_envelope(
    t: &ToralAutomorphism,
    alpha: f64,
    beta: f64,
    n_max: usize,
    eps: f64,
    convention: SpectralConvention,
) -> Result<MixingEnvelope> {
    if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::validation("strong envelope needs alpha > 0 and beta > 0"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::validation(format!("eps must lie in (0, 1), got {eps}")));
    }
    if convention.dimension != t.dim() {
        return Err(Error::validation("convention dimension differs from the map"));
    }
    let c = t.conditions()?;
    if !c.ergodic_irreducible() {
        return Err(Error::Condition(format!(
            "strong mixing needs no root-of-unity eigenvalue and an irreducible characteristic polynomial ({})",
            c.char_poly
        )));
    }
    let d = t.dim();
    let b = big_of(t.b());
    let a_star_inv = big_of(t.a_star()); // B⁻¹ = Aᵀ
    let lip_ln = t.lipschitz().ln();
    let scale = convention.lambda1().ln() * -(alpha + beta) / 2.0;
    let seeds: Vec<Vec<BigInt>> = ball_modes(d, 2.0)
        .iter()
        .map(|m| m.as_slice().iter().map(|&v| BigInt::from(v)).collect())
        .collect();

    // B^j for j ≤ n_max and (Aᵀ)^j m for the seeds
    let mut b_pow = vec![big_identity(d)];
    for j in 1..=n_max {
        let next = big_mul(&b, &b_pow[j - 1]);
        b_pow.push(next);
    }
    let mut pulled: Vec<Vec<Vec<BigInt>>> = vec![seeds.clone()];
    for j in 1..=n_max {
        let next = pulled[j - 1].iter().map(|k| big_apply(&a_star_inv, k)).collect();
        pulled.push(next);
    }

    let term_ln = |bn: &BigMat, k: &[BigInt]| -> f64 {
        let img = big_apply(bn, k);
        -0.5 * alpha * ln_big(&norm_sq(&img)) - 0.5 * beta * ln_big(&norm_sq(k))
    };

    let mut points = Vec::with_capacity(n_max + 1);
    let mut prev: Option<Vec<BigInt>> = None;
    for n in 0..=n_max {
        let bn = &b_pow[n];
        let mut best = Best {
            ln: f64::NEG_INFINITY,
            arg: Vec::new(),
        };
        for j in 0..=n {
            for k in &pulled[j] {
                best.offer(term_ln(bn, k), k);
            }
        }
        if let Some(p) = &prev {
            best.offer(term_ln(bn, p), p);
        }
        // every k with term ≥ e^{seed} satisfies α ln|Bⁿk| + β ln|k| ≤ kk
        let kk = -best.ln + 1e-9;
        // analytic tail: term ≤ ‖A‖^{nα} |k|^{−α−β}
        let radius_ln = (n as f64 * alpha * lip_ln - eps.ln() - best.ln) / (alpha + beta);
        let radius = radius_ln.exp();
        if !(radius <= MAX_RADIUS) {
            let feasible = (n as f64 * alpha * lip_ln - best.ln - (alpha + beta) * MAX_RADIUS.ln()).exp();
            return Err(Error::validation(format!(
                "eps = {eps} needs scan radius {radius:.3e} at n = {n}; the smallest feasible eps is {feasible:.3e}"
            )));
        }
        let reach_ln = radius_ln.min(kk / beta);
        let m = {
            let bt: BigMat = (0..d).map(|i| (0..d).map(|j| bn[j][i].clone()).collect()).collect();
            big_mul(&bt, bn)
        };
        let mut candidates = 0usize;
        let mut shell = 0u32;
        while (shell as f64) * std::f64::consts::LN_2 <= reach_ln {
            // shell 2^j ≤ |k| < 2^{j+1}: |Bⁿk| ≤ s with s^α = e^{kk} 2^{−jβ}
            let s_sq_ln = 2.0 * (kk - beta * shell as f64 * std::f64::consts::LN_2) / alpha;
            if s_sq_ln < -1e-12 {
                break;
            }
            let r_sq = BigInt::from(1u8) << (2 * (shell + 1));
            let s_scaled = (s_sq_ln + SHELL_BITS as f64 * std::f64::consts::LN_2).exp() * (1.0 + 1e-9);
            let s_int = BigInt::from_f64(s_scaled.ceil())
                .ok_or_else(|| Error::Numerical("shell size out of range".into()))?;
            let weight = &r_sq << SHELL_BITS;
            let gram: BigMat = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            let mut v = &weight * &m[i][j];
                            if i == j {
                                v += &s_int;
                            }
                            v
                        })
                        .collect()
                })
                .collect();
            let bound = BigInt::from(2u8) * &r_sq * &s_int;
            let e = Ellipsoid::from_big(gram)?;
            for x in e.points_within(&bound)? {
                candidates += 1;
                let k: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
                best.offer(term_ln(bn, &k), &k);
            }
            shell += 1;
        }
        let argmax: Vec<i64> = best
            .arg
            .iter()
            .map(|v| v.to_i64().ok_or_else(|| Error::overflow("envelope maximizer")))
            .collect::<Result<_>>()?;
        let tail_ln = n as f64 * alpha * lip_ln - (alpha + beta) * radius_ln;
        points.push(EnvelopePoint {
            n,
            value: (best.ln + scale).exp(),
            argmax,
            scan_radius: radius,
            tail_cert: (tail_ln + scale).exp(),
            candidates,
        });
        prev = Some(best.arg);
    }
    let samples: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.n >= 1)
        .map(|p| (p.n as f64, p.value))
        .collect();
    let fitted = fit_rate(&samples, alpha, beta, MixingMode::Strong).ok();
    Ok(MixingEnvelope {
        alpha,
        beta,
        points,
        fitted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convention::Mode;

    /// Brute-force sup over a box, valid when the box holds every k with
    /// |k|^{−α−β}‖A‖^{nα} above the reported value.
    fn brute(t: &ToralAutomorphism, alpha: f64, beta: f64, n: usize, r: i64) -> f64 {
        let mut best = 0.0f64;
        for a in -r..=r {
            for b in -r..=r {
                if a == 0 && b == 0 {
                    continue;
                }
                let mut m = Mode::new(&[a, b]);
                for _ in 0..n {
                    m = t.pull_mode(&m).unwrap();
                }
                let v = (m.norm_sq() as f64).powf(-alpha / 2.0) * ((a * a + b * b) as f64).powf(-beta / 2.0);
                best = best.max(v);
            }
        }
        best
    }

    #[test]
    fn n_zero_is_one() {
        let t = ToralAutomorphism::cat_map();
        let env = strong_envelope(&t, 1.0, 1.0, 0, DEFAULT_EPS, SpectralConvention::lattice(2)).unwrap();
        assert_eq!(env.points[0].value, 1.0);
    }

    #[test]
    fn matches_brute_force() {
        let t = ToralAutomorphism::cat_map();
        for (alpha, beta) in [(1.0, 1.0), (2.0, 1.0), (0.5, 1.5)] {
            let env = strong_envelope(&t, alpha, beta, 5, DEFAULT_EPS, SpectralConvention::lattice(2)).unwrap();
            for p in &env.points {
                let b = brute(&t, alpha, beta, p.n, 60);
                assert!((p.value - b).abs() <= 1e-12 * b, "n={} {} vs {}", p.n, p.value, b);
                assert!(p.tail_cert < 1e-3 * p.value);
            }
        }
    }

    #[test]
    fn geometric_scaling_factor() {
        let t = ToralAutomorphism::cat_map();
        let lat = strong_envelope(&t, 1.0, 1.0, 3, DEFAULT_EPS, SpectralConvention::lattice(2)).unwrap();
        let geo = strong_envelope(&t, 1.0, 1.0, 3, DEFAULT_EPS, SpectralConvention::geometric(2)).unwrap();
        let f = 4.0 * std::f64::consts::PI.powi(2);
        for (a, b) in lat.points.iter().zip(&geo.points) {
            assert!((a.value / f - b.value).abs() < 1e-12 * a.value);
        }
    }

    #[test]
    fn rejects_reducible_and_infeasible() {
        let conv = SpectralConvention::lattice(2);
        let rot = ToralAutomorphism::parse("0,-1,1,0").unwrap();
        assert!(matches!(strong_envelope(&rot, 1.0, 1.0, 3, 1e-3, conv), Err(Error::Condition(_))));
        let t = ToralAutomorphism::cat_map();
        assert!(strong_envelope(&t, 1.0, 1.0, 3, 1e-300, conv).is_err());
    }
}
