//! Koopman actions on Fourier modes and the one-step dissipation functional.

use crate::algebra::ToralAutomorphism;
use crate::error::{Error, Result};
use crate::field::SpectralField;

/// A unitary action U on mean-zero fields, given in Fourier space.
pub trait KoopmanAction: Send + Sync {
    fn dimension(&self) -> usize;

    /// Uθ.
    fn push(&self, field: &SpectralField) -> Result<SpectralField>;

    /// Short label used in reports.
    fn label(&self) -> String;
}

impl KoopmanAction for ToralAutomorphism {
    fn dimension(&self) -> usize {
        self.dim()
    }

    /// Mode m carries its amplitude to Aᵀm, i.e. (Uθ)^(k) = θ̂(Bk).
    fn push(&self, field: &SpectralField) -> Result<SpectralField> {
        let mut out = SpectralField::new(field.convention());
        for (m, c) in field.iter() {
            out.insert_unchecked(self.push_mode(m)?, *c);
        }
        Ok(out)
    }

    fn label(&self) -> String {
        format!("automorphism {}", self.matrix())
    }
}

/// U = id, leaving pure heat decay.
#[derive(Clone, Copy, Debug)]
pub struct IdentityMap {
    pub dim: usize,
}

impl KoopmanAction for IdentityMap {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn push(&self, field: &SpectralField) -> Result<SpectralField> {
        Ok(field.clone())
    }

    fn label(&self) -> String {
        "identity".into()
    }
}

/// E_ν θ = (1/ν) Σ_k (1 − e^{−2νλ_k}) |(Uθ)^(k)|².
pub fn dissipation_functional(
    field: &SpectralField,
    map: &dyn KoopmanAction,
    nu: f64,
) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::validation(format!("nu must be positive, got {nu}")));
    }
    let pushed = map.push(field)?;
    Ok(damping_sum(&pushed, nu) / nu)
}

/// Σ_k (1 − e^{−2νλ_k}) |c_k|² for an already pushed field.
pub(crate) fn damping_sum(pushed: &SpectralField, nu: f64) -> f64 {
    let conv = pushed.convention();
    pushed
        .iter()
        .map(|(k, c)| -(-2.0 * nu * conv.eigenvalue(k)).exp_m1() * c.norm_sqr())
        .sum()
}

pub(crate) fn damp(field: &mut SpectralField, nu: f64) {
    let conv = field.convention();
    for (k, c) in field.values_mut() {
        *c *= (-nu * conv.eigenvalue(k)).exp();
    }
}

/// Multiplies by e^{−ν(λ_k − λ_min)} over the support and returns νλ_min.
pub(crate) fn damp_relative(field: &mut SpectralField, nu: f64) -> f64 {
    let conv = field.convention();
    let lmin = field
        .modes()
        .map(|k| conv.eigenvalue(k))
        .fold(f64::INFINITY, f64::min);
    if !lmin.is_finite() {
        return 0.0;
    }
    for (k, c) in field.values_mut() {
        *c *= (-nu * (conv.eigenvalue(k) - lmin)).exp();
    }
    nu * lmin
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use crate::convention::{Mode, SpectralConvention};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit(k: &[i64]) -> SpectralField {
        SpectralField::single(SpectralConvention::lattice(2), Mode::new(k), Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn identity_single_mode() {
        let e = dissipation_functional(&unit(&[1, 0]), &IdentityMap { dim: 2 }, 0.1).unwrap();
        assert!((e - (1.0 - (-0.2f64).exp()) / 0.1).abs() < 1e-14);
        assert!((e - 1.81269).abs() < 1e-5);
    }

    #[test]
    fn cat_map_single_mode() {
        let t = ToralAutomorphism::cat_map();
        let e = dissipation_functional(&unit(&[1, 0]), &t, 0.01).unwrap();
        assert!((e - (1.0 - (-0.1f64).exp()) / 0.01).abs() < 1e-12);
        assert!((e - 9.5163).abs() < 1e-4);
    }

    #[test]
    fn small_nu_limit_is_twice_h1() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = SpectralField::random(SpectralConvention::lattice(3), 10, 5, false, &mut rng).unwrap();
        let e = dissipation_functional(&f, &IdentityMap { dim: 3 }, 1e-8).unwrap();
        let h1 = 2.0 * f.h1_sq();
        assert!(((e - h1) / h1).abs() < 1e-6);
    }

    #[test]
    fn rejects_nonpositive_nu() {
        assert!(dissipation_functional(&unit(&[1, 0]), &IdentityMap { dim: 2 }, 0.0).is_err());
        assert!(dissipation_functional(&unit(&[1, 0]), &IdentityMap { dim: 2 }, -1.0).is_err());
    }
}
