//! Weyl asymptotics for the eigenvalue count.

use statrs::function::gamma::gamma;

use crate::convention::Scaling;
use crate::pulsed::ball_modes;

/// c̃ = (1 + ε) lim j / λ_j^{d/2}. In geometric scaling this is
/// (1 + ε) vol / ((4π)^{d/2} Γ(d/2 + 1)); in lattice scaling (λ = |k|²)
/// it is the volume of the unit ball, times (1 + ε) vol.
pub fn weyl_constant(d: usize, vol: f64, eps: f64, scaling: Scaling) -> f64 {
    let half = d as f64 / 2.0;
    let ball = std::f64::consts::PI.powf(half) / gamma(half + 1.0);
    let base = match scaling {
        Scaling::Geometric => 1.0 / ((4.0 * std::f64::consts::PI).powf(half) * gamma(half + 1.0)),
        Scaling::Lattice => ball,
    };
    (1.0 + eps) * vol * base
}

/// Number of nonzero k ∈ ℤ^d with |k|² ≤ λ.
pub fn lattice_count(d: usize, lambda: f64) -> usize {
    ball_modes(d, lambda.sqrt()).len()
}
