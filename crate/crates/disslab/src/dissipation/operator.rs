//! Dissipation times of truncated Koopman operators by power iteration.

use serde::Serialize;

use crate::dissipation::exact::trivial_bound;
use crate::error::{Error, Result};
use crate::power::{top_singular, PowerOptions, PowerResult};
use crate::pulsed::TruncatedOperator;

pub use crate::pulsed::truncated::LEAK_TOL;

#[derive(Clone, Debug, Serialize)]
pub struct OperatorTau {
    pub tau_d: usize,
    /// Estimated ‖Tⁿ‖ at n = τ_d.
    pub norm_at_tau: f64,
    /// Estimated ‖Tⁿ‖ at n = τ_d − 1 (1 when τ_d = 1).
    pub norm_before: f64,
    pub leak: f64,
    pub probes: Vec<(usize, f64)>,
}

/// Estimates ‖(e^{νΔ}U)ⁿ‖ on the truncation.
pub fn operator_norm(op: &TruncatedOperator, nu: f64, n: usize, opts: &PowerOptions) -> PowerResult {
    let damp = op.damping(nu);
    top_singular(
        op.len(),
        |x| op.apply_step_n(&damp, x, n),
        |y| op.apply_step_n_adjoint(&damp, y, n),
        opts,
    )
}

/// Smallest n with estimated ‖Tⁿ‖ < 1/e. The norm is monotone in n, so the
/// search doubles n and then bisects. A probe stops as soon as one iterate
/// certifies a norm above 1/e, or once every restart is extrapolated to
/// stay clearly below it. The norms reported at τ_d and τ_d − 1 are
/// converged to the full tolerance, and the leak monitor runs on their top
/// singular vectors.
pub fn tau_d_operator(op: &TruncatedOperator, nu: f64, opts: &PowerOptions) -> Result<OperatorTau> {
    if !(nu > 0.0) {
        return Err(Error::validation(format!("nu must be positive, got {nu}")));
    }
    if op.is_empty() {
        return Err(Error::validation("empty truncation"));
    }
    let threshold = (-1.0f64).exp();
    let horizon = trivial_bound(nu, op.convention());
    let decide = PowerOptions {
        threshold: Some(threshold),
        ..*opts
    };
    let mut probes: Vec<(usize, f64)> = Vec::new();
    let mut full: Vec<(usize, PowerResult)> = Vec::new();
    let below = |n: usize, probes: &mut Vec<(usize, f64)>, full: &mut Vec<(usize, PowerResult)>| -> Result<bool> {
        if let Some((_, r)) = full.iter().find(|(m, _)| *m == n) {
            return Ok(r.norm < threshold);
        }
        let r = operator_norm(op, nu, n, &decide);
        probes.push((n, r.norm));
        if r.exceeded {
            return Ok(false);
        }
        if !r.converged {
            return Err(Error::Numerical(format!(
                "power iteration did not converge at n = {n}"
            )));
        }
        let b = r.norm < threshold;
        full.push((n, r));
        Ok(b)
    };

    let mut lo = 0usize; // largest n known to have norm ≥ 1/e (0: none)
    let mut hi = 1usize;
    loop {
        if below(hi, &mut probes, &mut full)? {
            break;
        }
        lo = hi;
        if hi >= horizon {
            // heat decay alone forces the norm below 1/e by the horizon
            return Err(Error::Numerical(format!(
                "estimated norm stays above 1/e at the trivial horizon n = {horizon}"
            )));
        }
        hi = (hi * 2).min(horizon);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid, &mut probes, &mut full)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let tau = hi;
    let result_at = |n: usize| -> Result<PowerResult> {
        if let Some((_, r)) = full.iter().find(|(m, _)| *m == n) {
            if !r.extrapolated {
                return Ok(r.clone());
            }
        }
        let r = operator_norm(op, nu, n, opts);
        if !r.converged {
            return Err(Error::Numerical(format!(
                "power iteration did not converge at n = {n}"
            )));
        }
        Ok(r)
    };
    let at_tau = result_at(tau)?;
    let mut leak = op.leak(nu, &at_tau.vector, tau);
    let before = if tau > 1 {
        let r = result_at(tau - 1)?;
        leak = leak.max(op.leak(nu, &r.vector, tau - 1));
        r.norm
    } else {
        1.0
    };
    if leak > LEAK_TOL {
        return Err(Error::TruncationLeak { leak, n: tau });
    }
    probes.sort_by_key(|p| p.0);
    Ok(OperatorTau {
        tau_d: tau,
        norm_at_tau: at_tau.norm,
        norm_before: before,
        leak,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ToralAutomorphism;
    use crate::convention::{Mode, SpectralConvention};
    use crate::dissipation::exact::tau_d_exact;
    use nalgebra::Matrix2;
    use num_complex::Complex64;

    #[test]
    fn identity_is_pure_heat() {
        let conv = SpectralConvention::lattice(2);
        let op = TruncatedOperator::identity(conv, 3.0).unwrap();
        for nu in [0.013, 0.07, 0.3] {
            let r = tau_d_operator(&op, nu, &PowerOptions::default()).unwrap();
            assert_eq!(r.tau_d, (1.0 / nu).floor() as usize + 1, "nu={nu}");
        }
    }

    #[test]
    fn cat_map_matches_exact_at_small_scale() {
        let t = ToralAutomorphism::cat_map();
        let conv = SpectralConvention::lattice(2);
        let op = TruncatedOperator::from_automorphism(&t, conv, 60.0).unwrap();
        for nu in [0.1, 0.03, 0.01] {
            let r = tau_d_operator(&op, nu, &PowerOptions::default()).unwrap();
            assert_eq!(r.tau_d, tau_d_exact(&t, nu, conv).unwrap(), "nu={nu}");
        }
    }

    #[test]
    fn small_ball_trips_leak_monitor() {
        let t = ToralAutomorphism::cat_map();
        let conv = SpectralConvention::lattice(2);
        let op = TruncatedOperator::from_automorphism(&t, conv, 4.0).unwrap();
        assert!(matches!(
            tau_d_operator(&op, 1e-3, &PowerOptions::default()),
            Err(Error::TruncationLeak { .. })
        ));
    }

    #[test]
    fn two_mode_rotation_against_svd() {
        let conv = SpectralConvention::lattice(2);
        let modes = vec![Mode::new(&[1, 0]), Mode::new(&[1, 1])];
        let (c, s) = (0.6f64, 0.8f64);
        let u = [[c, -s], [s, c]];
        let m: Vec<Vec<Complex64>> = u
            .iter()
            .map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .collect();
        let op = TruncatedOperator::from_dense(conv, modes, &m).unwrap();
        let nu: f64 = 0.02;
        let d = Matrix2::new((-nu).exp(), 0.0, 0.0, (-2.0 * nu).exp());
        let um = Matrix2::new(c, -s, s, c);
        let step = d * um;
        let mut p = Matrix2::identity();
        let mut expected = 0;
        for n in 1..1000 {
            p = step * p;
            if p.singular_values().max() < (-1.0f64).exp() {
                expected = n;
                break;
            }
        }
        let r = tau_d_operator(&op, nu, &PowerOptions::default()).unwrap();
        assert_eq!(r.tau_d, expected);
    }
}
