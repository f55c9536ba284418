//! Randomized checks of the per-step identities and inequalities of the
//! pulsed diffusion, run on sparse random fields.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::ToralAutomorphism;
use crate::convention::SpectralConvention;
use crate::dissipation::check_lower_bound_chain;
use crate::error::Result;
use crate::field::SpectralField;
use crate::koopman::{dissipation_functional, KoopmanAction};
use crate::pulsed::{evolve, inviscid_gap, step, PulsedSystem};

#[derive(Clone, Debug)]
pub struct BatteryOptions {
    pub fields: usize,
    pub steps: usize,
    pub nus: Vec<f64>,
    /// Modes per field are drawn from 1..=max_modes.
    pub max_modes: usize,
    /// Modes are drawn from the cube |k_i| ≤ radius.
    pub radius: i64,
    pub seed: u64,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        BatteryOptions {
            fields: 100,
            steps: 20,
            nus: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            max_modes: 6,
            radius: 6,
            seed: 2024,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BatteryReport {
    pub runs: usize,
    pub steps_checked: usize,
    /// max |‖Sθ‖² − (‖θ‖² − νE_νθ)| / ‖θ‖².
    pub energy_max_rel: f64,
    pub sandwich_violations: usize,
    /// Largest (lower − E_ν)/E_ν or (E_ν − upper)/E_ν seen, negative when every case holds.
    pub sandwich_worst: f64,
    pub gap_violations: usize,
    pub chain_violations: usize,
}

/// Relative slack allowed in the sandwich and gap inequalities.
pub const INEQ_SLACK: f64 = 1e-12;

/// Energy identity, H¹ sandwich, inviscid gap and the lower-bound chain
/// on `fields` random fields for every ν, each evolved `steps` times.
///
/// The identity is checked per step on the unit-normalized field x = θ_m/‖θ_m‖:
/// ‖e^{νΔ}Ux‖² from the step routine against 1 − νE_νx from the
/// dissipation functional, which damps through expm1.
pub fn pulsed_battery(t: &ToralAutomorphism, convention: SpectralConvention, opts: &BatteryOptions) -> Result<BatteryReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut rep = BatteryReport {
        sandwich_worst: f64::NEG_INFINITY,
        ..Default::default()
    };
    for _ in 0..opts.fields {
        let n_modes = rng.gen_range(1..=opts.max_modes.max(1));
        let theta0 = SpectralField::random(convention, n_modes, opts.radius, false, &mut rng)?;
        for &nu in &opts.nus {
            let sys = PulsedSystem::automorphism(t.clone(), nu, convention)?;
            let traj = evolve(&theta0, &sys, opts.steps)?;
            rep.runs += 1;
            for m in 0..opts.steps {
                let x = &traj.fields[m];
                let e = dissipation_functional(x, t, nu)?;
                let y = step(x, &sys)?;
                let defect = (y.norm_sq() - (x.norm_sq() - nu * e)).abs() / x.norm_sq();
                rep.energy_max_rel = rep.energy_max_rel.max(defect);

                let lower = 2.0 * y.h1_sq();
                let upper = 2.0 * t.push(x)?.h1_sq();
                let worst = ((lower - e) / e).max((e - upper) / e);
                rep.sandwich_worst = rep.sandwich_worst.max(worst);
                if worst > INEQ_SLACK {
                    rep.sandwich_violations += 1;
                }
                rep.steps_checked += 1;
            }
            let gap = inviscid_gap(&theta0, &sys, opts.steps)?;
            if gap.gap > gap.bound * (1.0 + INEQ_SLACK) + INEQ_SLACK * theta0.norm() {
                rep.gap_violations += 1;
            }
            if !check_lower_bound_chain(&traj, t, nu).holds {
                rep.chain_violations += 1;
            }
        }
    }
    Ok(rep)
}

/// Unit-amplitude single mode.
pub fn unit_mode(convention: SpectralConvention, k: &[i64]) -> Result<SpectralField> {
    SpectralField::single(convention, crate::convention::Mode::try_new(k)?, Complex64::new(1.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_battery_is_clean() {
        let opts = BatteryOptions {
            fields: 5,
            steps: 10,
            nus: vec![1e-1, 1e-3],
            ..Default::default()
        };
        let r = pulsed_battery(&ToralAutomorphism::cat_map(), SpectralConvention::lattice(2), &opts).unwrap();
        assert_eq!(r.runs, 10);
        assert_eq!(r.steps_checked, 100);
        assert!(r.energy_max_rel < 1e-12, "{}", r.energy_max_rel);
        assert_eq!(r.sandwich_violations + r.gap_violations + r.chain_violations, 0);
    }
}
