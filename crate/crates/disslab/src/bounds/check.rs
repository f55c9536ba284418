//! Comparing measured dissipation times with the theorem bounds.

use serde::{Deserialize, Serialize};

use crate::bounds::profile::BoundProfile;
use crate::convention::SpectralConvention;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TauSample {
    pub nu: f64,
    pub tau_d: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DissipationReport {
    pub convention: SpectralConvention,
    pub samples: Vec<TauSample>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Verdict {
    pub nu: f64,
    pub tau_d: f64,
    pub h: f64,
    pub bound: f64,
    /// bound − τ_d.
    pub margin: f64,
    pub pass: bool,
    pub degenerate: bool,
}

pub fn check_bound(report: &DissipationReport, profile: &BoundProfile) -> Result<Vec<Verdict>> {
    if report.convention != profile.convention {
        return Err(Error::validation(format!(
            "report uses {:?} scaling but the profile uses {:?}",
            report.convention.scaling, profile.convention.scaling
        )));
    }
    report
        .samples
        .iter()
        .map(|s| {
            let v = profile.eval(s.nu)?;
            Ok(Verdict {
                nu: s.nu,
                tau_d: s.tau_d,
                h: v.h,
                bound: v.bound,
                margin: v.bound - s.tau_d,
                pass: s.tau_d <= v.bound,
                degenerate: v.degenerate,
            })
        })
        .collect()
}

/// Lower bound 1/τ_d on the principal eigenvalue of the steady operator.
pub fn eigenvalue_floor(tau_d: f64) -> f64 {
    1.0 / tau_d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::profile::Which;
    use crate::mixing::{MixingMode, RateFunction};

    fn profile(conv: SpectralConvention) -> BoundProfile {
        let r = RateFunction::exponential(2.0, 0.95, 1.0, 1.0, MixingMode::Strong).unwrap();
        BoundProfile::new(Which::H1, r, conv, None, None).unwrap()
    }

    #[test]
    fn constructed_violation_fails() {
        let conv = SpectralConvention::lattice(2);
        let p = profile(conv);
        let b = p.eval(1e-3).unwrap().bound;
        let rep = DissipationReport {
            convention: conv,
            samples: vec![TauSample { nu: 1e-3, tau_d: 9.0 }, TauSample { nu: 1e-3, tau_d: 2.0 * b }],
        };
        let v = check_bound(&rep, &p).unwrap();
        assert!(v[0].pass && !v[1].pass && v[1].margin < 0.0);
    }

    #[test]
    fn convention_mismatch_rejected() {
        let rep = DissipationReport {
            convention: SpectralConvention::geometric(2),
            samples: vec![],
        };
        assert!(check_bound(&rep, &profile(SpectralConvention::lattice(2))).is_err());
    }

    #[test]
    fn floor_is_reciprocal() {
        assert_eq!(eigenvalue_floor(50.0), 0.02);
        assert_eq!(eigenvalue_floor(f64::INFINITY), 0.0);
    }
}
