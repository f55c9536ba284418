//! θ_{n+1} = e^{νΔ} U θ_n in Fourier space.

use std::sync::Arc;

use crate::algebra::ToralAutomorphism;
use crate::convention::SpectralConvention;
use crate::error::{Error, Result};
use crate::field::{SpectralField, PRUNE_TOL};
use crate::koopman::{damp, damp_relative, damping_sum, KoopmanAction};

#[derive(Clone)]
pub struct PulsedSystem {
    map: Arc<dyn KoopmanAction>,
    nu: f64,
    convention: SpectralConvention,
}

impl PulsedSystem {
    pub fn new(map: Arc<dyn KoopmanAction>, nu: f64, convention: SpectralConvention) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::validation(format!("nu must be positive, got {nu}")));
        }
        Self::build(map, nu, convention)
    }

    /// ν = 0: U alone, a pure relabeling.
    pub fn inviscid(map: Arc<dyn KoopmanAction>, convention: SpectralConvention) -> Result<Self> {
        Self::build(map, 0.0, convention)
    }

    pub fn automorphism(t: ToralAutomorphism, nu: f64, convention: SpectralConvention) -> Result<Self> {
        Self::new(Arc::new(t), nu, convention)
    }

    fn build(map: Arc<dyn KoopmanAction>, nu: f64, convention: SpectralConvention) -> Result<Self> {
        if map.dimension() != convention.dimension {
            return Err(Error::validation(format!(
                "map acts on dimension {}, convention has {}",
                map.dimension(),
                convention.dimension
            )));
        }
        Ok(PulsedSystem { map, nu, convention })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn convention(&self) -> SpectralConvention {
        self.convention
    }

    pub fn map(&self) -> &dyn KoopmanAction {
        self.map.as_ref()
    }

    fn check(&self, field: &SpectralField) -> Result<()> {
        if field.convention() != self.convention {
            return Err(Error::validation("field convention differs from the system"));
        }
        Ok(())
    }
}

/// One pulse: relabel by U, then damp each mode by e^{−νλ_k}.
/// Coefficients with |c|² < 1e-30 are dropped.
pub fn step(theta: &SpectralField, sys: &PulsedSystem) -> Result<SpectralField> {
    sys.check(theta)?;
    let mut out = sys.map.push(theta)?;
    damp(&mut out, sys.nu);
    out.prune(PRUNE_TOL);
    Ok(out)
}

/// θ_0, …, θ_n. Fields are kept at unit norm and the energy is carried as
/// a logarithm, so long runs never underflow.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub nu: f64,
    pub convention: SpectralConvention,
    /// θ_m / ‖θ_m‖.
    pub fields: Vec<SpectralField>,
    /// ln ‖θ_m‖².
    pub log_energy: Vec<f64>,
    /// ‖θ_m‖₁² / ‖θ_m‖².
    pub h1_ratio: Vec<f64>,
    /// E_ν θ_m / ‖θ_m‖².
    pub dissipation_ratio: Vec<f64>,
}

impl Trajectory {
    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.fields.len() - 1
    }

    pub fn energy(&self, m: usize) -> f64 {
        self.log_energy[m].exp()
    }

    pub fn h1(&self, m: usize) -> f64 {
        self.h1_ratio[m] * self.energy(m)
    }

    pub fn e_nu(&self, m: usize) -> f64 {
        self.dissipation_ratio[m] * self.energy(m)
    }

    /// θ_m at its true scale.
    pub fn field(&self, m: usize) -> SpectralField {
        let mut f = self.fields[m].clone();
        f.scale((0.5 * self.log_energy[m]).exp());
        f
    }

    /// ln(‖θ_m‖²/‖θ_0‖²).
    pub fn log_ratio(&self, m: usize) -> f64 {
        self.log_energy[m] - self.log_energy[0]
    }

    pub fn energies_monotone(&self) -> bool {
        self.log_energy.iter().all(|e| e.is_finite())
            && self.log_energy.windows(2).all(|w| w[1] <= w[0])
    }
}

struct Normalized {
    field: SpectralField,
    /// ln of the squared norm removed by normalization.
    log_scale: f64,
    h1_ratio: f64,
    dissipation_ratio: f64,
}

fn advance(x: &SpectralField, sys: &PulsedSystem) -> Result<(SpectralField, f64, f64)> {
    // x has unit norm; U is unitary, so the pushed field does too.
    let mut p = sys.map.push(x)?;
    let loss = damping_sum(&p, sys.nu);
    let ratio = if sys.nu > 0.0 { loss / sys.nu } else { 2.0 * p.h1_sq() };
    // ln(1 − loss) is accurate through ln_1p when little mass is lost. For
    // heavy damping the factors are taken relative to the least damped mode
    // so that a field far below the float range still has a direction.
    let (kept, dlog) = if loss < 0.5 {
        damp(&mut p, sys.nu);
        (p.norm_sq(), (-loss).ln_1p())
    } else {
        let shift = damp_relative(&mut p, sys.nu);
        let kept = p.norm_sq();
        (kept, kept.ln() - 2.0 * shift)
    };
    if kept == 0.0 || !dlog.is_finite() {
        return Err(Error::Numerical("field vanished after damping".into()));
    }
    p.scale(1.0 / kept.sqrt());
    p.prune(PRUNE_TOL);
    Ok((p, dlog, ratio))
}

fn normalize(theta: &SpectralField) -> Result<Normalized> {
    let e = theta.norm_sq();
    if e == 0.0 {
        return Err(Error::validation("initial field is zero"));
    }
    let mut f = theta.clone();
    f.scale(1.0 / e.sqrt());
    Ok(Normalized {
        h1_ratio: f.h1_sq(),
        field: f,
        log_scale: e.ln(),
        dissipation_ratio: 0.0,
    })
}

pub fn evolve(theta0: &SpectralField, sys: &PulsedSystem, n: usize) -> Result<Trajectory> {
    if n < 1 {
        return Err(Error::validation("n must be at least 1"));
    }
    sys.check(theta0)?;
    let start = normalize(theta0)?;
    let mut traj = Trajectory {
        nu: sys.nu,
        convention: sys.convention,
        fields: vec![start.field],
        log_energy: vec![start.log_scale],
        h1_ratio: vec![start.h1_ratio],
        dissipation_ratio: vec![start.dissipation_ratio],
    };
    for m in 0..=n {
        let (next, dlog, ratio) = advance(&traj.fields[m], sys)?;
        traj.dissipation_ratio[m] = ratio;
        if m == n {
            break;
        }
        traj.h1_ratio.push(next.h1_sq());
        traj.log_energy.push(traj.log_energy[m] + dlog);
        traj.dissipation_ratio.push(0.0);
        traj.fields.push(next);
    }
    Ok(traj)
}

#[derive(Clone, Copy, Debug)]
pub struct InviscidGap {
    pub gap: f64,
    pub bound: f64,
}

/// ‖θ_n − Uⁿθ_0‖ against Σ_{k<n} √(ν E_ν θ_k).
pub fn inviscid_gap(theta0: &SpectralField, sys: &PulsedSystem, n: usize) -> Result<InviscidGap> {
    let traj = evolve(theta0, sys, n)?;
    let mut free = theta0.clone();
    for _ in 0..n {
        free = sys.map.push(&free)?;
    }
    let gap = traj.field(n).difference(&free).norm();
    let bound = (0..n).map(|k| (sys.nu * traj.e_nu(k)).sqrt()).sum();
    Ok(InviscidGap { gap, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convention::Mode;
    use crate::koopman::{dissipation_functional, IdentityMap};
    use num_complex::Complex64;

    fn cat(nu: f64) -> PulsedSystem {
        PulsedSystem::automorphism(ToralAutomorphism::cat_map(), nu, SpectralConvention::lattice(2)).unwrap()
    }

    fn unit(k: &[i64]) -> SpectralField {
        SpectralField::single(SpectralConvention::lattice(2), Mode::new(k), Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn one_step_cat_map() {
        let nu = 0.03;
        let out = step(&unit(&[1, 0]), &cat(nu)).unwrap();
        assert_eq!(out.len(), 1);
        let c = out.get(&Mode::new(&[2, 1]));
        assert!((c.re - (-5.0 * nu).exp()).abs() < 1e-15);
        let two = step(&out, &cat(nu)).unwrap();
        let c = two.get(&Mode::new(&[5, 3]));
        assert!((c.re - (-39.0 * nu).exp()).abs() < 1e-15);
    }

    #[test]
    fn inviscid_relabeling_preserves_energy() {
        let sys = PulsedSystem::inviscid(Arc::new(ToralAutomorphism::cat_map()), SpectralConvention::lattice(2)).unwrap();
        let f = SpectralField::from_pairs(
            SpectralConvention::lattice(2),
            [(Mode::new(&[1, 2]), Complex64::new(0.3, -1.0)), (Mode::new(&[-3, 1]), Complex64::new(2.0, 0.5))],
        )
        .unwrap();
        let g = step(&f, &sys).unwrap();
        assert_eq!(g.norm_sq(), f.norm_sq());
        assert!(PulsedSystem::new(Arc::new(IdentityMap { dim: 2 }), 0.0, SpectralConvention::lattice(2)).is_err());
    }

    #[test]
    fn orbit_energies() {
        let traj = evolve(&unit(&[1, 0]), &cat(0.01), 4).unwrap();
        for (m, s) in [(1, 5.0), (2, 39.0), (3, 272.0), (4, 1869.0)] {
            let expect = (-0.02f64 * s).exp();
            assert!((traj.energy(m) - expect).abs() < 1e-13 * expect, "m={m}");
        }
    }

    #[test]
    fn evolve_one_matches_step() {
        let f = SpectralField::from_pairs(
            SpectralConvention::lattice(2),
            [(Mode::new(&[1, 2]), Complex64::new(0.3, -1.0)), (Mode::new(&[-3, 1]), Complex64::new(2.0, 0.5))],
        )
        .unwrap();
        let sys = cat(0.02);
        let traj = evolve(&f, &sys, 1).unwrap();
        let s = step(&f, &sys).unwrap();
        let d = traj.field(1).difference(&s).norm();
        assert!(d < 1e-14 * s.norm());
    }

    #[test]
    fn stored_dissipation_matches_functional() {
        let f = unit(&[1, 1]);
        let sys = cat(0.01);
        let traj = evolve(&f, &sys, 3).unwrap();
        for m in 0..=3 {
            let direct = dissipation_functional(&traj.field(m), sys.map(), sys.nu()).unwrap();
            assert!((direct - traj.e_nu(m)).abs() < 1e-12 * direct);
        }
    }

    #[test]
    fn single_mode_gap_closed_form() {
        // θ_n = e^{−νS_n} θ_0 relabeled, so the gap is 1 − e^{−νS_n} and
        // √(νE_νθ_k) = e^{−νS_k} √(1 − e^{−2νλ_{k+1}}).
        let lambdas = [5.0, 34.0, 233.0];
        for nu in [1e-1, 1e-2, 1e-3] {
            let g = inviscid_gap(&unit(&[1, 0]), &cat(nu), 3).unwrap();
            let s3: f64 = lambdas.iter().sum();
            let gap = -(-nu * s3).exp_m1();
            let mut s = 0.0;
            let mut bound = 0.0;
            for l in lambdas {
                bound += (-nu * s).exp() * (-(-2.0 * nu * l).exp_m1()).sqrt();
                s += l;
            }
            assert!((g.gap - gap).abs() < 1e-12, "nu={nu}");
            assert!((g.bound - bound).abs() < 1e-12 * bound);
            assert!(g.gap < g.bound);
        }
    }

    #[test]
    fn gap_vanishes_with_nu() {
        let f = unit(&[2, -1]);
        let g = inviscid_gap(&f, &cat(1e-12), 5).unwrap();
        assert!(g.gap < 1e-6);
    }
}
