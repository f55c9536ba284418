//! The implicit bound functions H₁–H₄ and the dissipation-time bounds
//! C/(νH(ν)) built from them.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::convention::SpectralConvention;
use crate::error::{Error, Result};
use crate::mixing::{MixingMode, RateFunction, RateKind};

/// Universal constant for pulsed diffusions.
pub const C_DISCRETE: f64 = 34.0;
/// Universal constant for continuous time.
pub const C_CONTINUOUS: f64 = 18.0;
const REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Which {
    H1,
    H2,
    H3,
    H4,
}

impl FromStr for Which {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "H1" => Ok(Which::H1),
            "H2" => Ok(Which::H2),
            "H3" => Ok(Which::H3),
            "H4" => Ok(Which::H4),
            _ => Err(Error::validation(format!("unknown bound function '{s}'"))),
        }
    }
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundProfile {
    pub which: Which,
    pub rate: RateFunction,
    pub convention: SpectralConvention,
    /// ‖∇u‖_{L∞}, used by H3 and H4.
    pub grad_u: Option<f64>,
    /// c̃, used by H2 and H4.
    pub weyl_c: Option<f64>,
    pub universal_c: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HValue {
    pub nu: f64,
    pub h: f64,
    pub bound: f64,
    /// No λ ≥ λ₁ was feasible; h is λ₁ and the bound is trivial.
    pub degenerate: bool,
}

impl BoundProfile {
    pub fn new(
        which: Which,
        rate: RateFunction,
        convention: SpectralConvention,
        grad_u: Option<f64>,
        weyl_c: Option<f64>,
    ) -> Result<Self> {
        let needs_grad = matches!(which, Which::H3 | Which::H4);
        let needs_weyl = matches!(which, Which::H2 | Which::H4);
        match (needs_grad, grad_u) {
            (true, None) => return Err(Error::validation(format!("{which} needs the velocity gradient norm"))),
            (true, Some(g)) if !(g > 0.0 && g.is_finite()) => {
                return Err(Error::validation("velocity gradient norm must be positive"))
            }
            _ => {}
        }
        match (needs_weyl, weyl_c) {
            (true, None) => return Err(Error::validation(format!("{which} needs the Weyl constant"))),
            (true, Some(c)) if !(c > 0.0 && c.is_finite()) => {
                return Err(Error::validation("Weyl constant must be positive"))
            }
            _ => {}
        }
        let strong = matches!(which, Which::H1 | Which::H3);
        if strong && rate.mode != MixingMode::Strong {
            return Err(Error::validation(format!("{which} needs a strong mixing rate")));
        }
        let universal_c = match which {
            Which::H1 | Which::H2 => C_DISCRETE,
            Which::H3 | Which::H4 => C_CONTINUOUS,
        };
        Ok(BoundProfile {
            which,
            rate,
            convention,
            grad_u: if needs_grad { grad_u } else { None },
            weyl_c: if needs_weyl { weyl_c } else { None },
            universal_c,
        })
    }

    /// Whether λ lies in the set whose sup defines H(μ), tested in logs.
    pub fn feasible(&self, lambda: f64, mu: f64) -> bool {
        let r = &self.rate;
        let s = r.alpha + r.beta;
        let d = self.convention.dimension as f64;
        let ll = lambda.ln();
        match self.which {
            Which::H1 | Which::H2 => {
                let t = 0.5 / (lambda * mu).sqrt();
                let rhs = match self.which {
                    Which::H1 => -0.5 * s * ll - std::f64::consts::LN_2,
                    _ => -std::f64::consts::LN_2 - 0.5 * self.weyl_c.unwrap().ln() - (2.0 * s + d) / 4.0 * ll,
                };
                r.ln_eval(t) <= rhs
            }
            Which::H3 | Which::H4 => {
                let g = self.grad_u.unwrap();
                let target = match self.which {
                    Which::H3 => -std::f64::consts::LN_2 - 0.5 * s * ll,
                    _ => -std::f64::consts::LN_2 - 0.5 * self.weyl_c.unwrap().ln() - (d + 2.0 * s) / 4.0 * ll,
                };
                let tau = r.inverse_ln(target);
                if !(tau > 0.0) || !tau.is_finite() {
                    return false;
                }
                ll + 4.0 * g * tau - tau.ln() <= 2.0 * g.ln() - std::f64::consts::LN_2 - mu.ln()
            }
        }
    }

    /// H(ν) by bisection in ln λ on [λ₁, λ_hi].
    pub fn eval(&self, nu: f64) -> Result<HValue> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::validation(format!("nu must be positive, got {nu}")));
        }
        let l1 = self.convention.lambda1();
        let h = if !self.feasible(l1, nu) {
            return Ok(HValue {
                nu,
                h: l1,
                bound: self.universal_c / (nu * l1),
                degenerate: true,
            });
        } else {
            let mut lo = l1;
            let mut hi = l1 * 2.0;
            while self.feasible(hi, nu) {
                lo = hi;
                hi *= 2.0;
                if hi > 1e300 {
                    return Err(Error::Numerical(format!("{} has no finite sup at nu = {nu}", self.which)));
                }
            }
            while hi / lo - 1.0 > REL_TOL {
                let mid = (lo * hi).sqrt();
                if self.feasible(mid, nu) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        Ok(HValue {
            nu,
            h,
            bound: self.universal_c / (nu * h),
            degenerate: false,
        })
    }

    pub fn eval_grid(&self, nus: &[f64]) -> Result<Vec<HValue>> {
        nus.iter().map(|&nu| self.eval(nu)).collect()
    }
}

/// H₁ for h(t) = c/t^p: (4^{−(p+1)}/(c²ν^p))^{1/(α+β+p)}.
pub fn h1_power_closed(c: f64, p: f64, alpha: f64, beta: f64, nu: f64) -> f64 {
    (4f64.powf(-(p + 1.0)) / (c * c * nu.powf(p))).powf(1.0 / (alpha + beta + p))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExpRefinement {
    /// Lower bound from one substitution of the crude upper bound.
    pub raw: f64,
    /// One further pass through the implicit relation.
    pub refined: f64,
}

/// For h = c₁e^{−c₂t}, H₁ solves H = F(H) with
/// F(x) = c₂²/(4ν) (ln 2 + ln c₁ + (α+β)/2 ln x)^{−2}, F decreasing.
/// Starting from λ₁ ≤ H, F∘F(λ₁) and F∘F∘F∘F(λ₁) are lower bounds.
pub fn h1_exponential_refinement(rate: &RateFunction, nu: f64, convention: SpectralConvention) -> Result<ExpRefinement> {
    let (c1, c2) = match rate.kind {
        RateKind::Exponential { c1, c2 } => (c1, c2),
        _ => return Err(Error::validation("refinement applies to exponential rates")),
    };
    let s = rate.alpha + rate.beta;
    let base = std::f64::consts::LN_2 + c1.ln();
    let f = |x: f64| -> Result<f64> {
        let a = base + 0.5 * s * x.ln();
        if !(a > 0.0) {
            return Err(Error::validation(
                "ln 2 + ln c1 + (alpha+beta)/2 ln lambda must be positive for the explicit iteration",
            ));
        }
        Ok(c2 * c2 / (4.0 * nu) / (a * a))
    };
    let l1 = convention.lambda1();
    let raw = f(f(l1)?)?;
    if raw < l1 {
        return Err(Error::validation("nu too large: the iteration starts above its limit"));
    }
    let refined = f(f(raw)?)?;
    Ok(ExpRefinement { raw, refined })
}
