//! The implicit functions H₁–H₄ and the bounds C/(νH(ν)) they give.
//!
//! Sweeps ν for a power-law and an exponential rate, shows the scale-free
//! combinations that should level off, and lists the corollary exponents.

use disslab::bounds::{
    corollary_exponent, h1_exponential_refinement, h1_power_closed, weyl_constant, BoundProfile, Corollary, Which,
};
use disslab::mixing::{MixingMode, RateFunction};
use disslab::{Scaling, SpectralConvention};

fn main() -> disslab::Result<()> {
    let conv = SpectralConvention::lattice(2);
    let weyl = weyl_constant(2, 1.0, 0.1, Scaling::Lattice);
    let power = RateFunction::power(1.0, 1.0, 1.0, 1.0, MixingMode::Strong)?;
    let expo = RateFunction::exponential(10.0, 1.0, 1.0, 1.0, MixingMode::Strong)?;
    let weak = RateFunction::power(1.0, 0.5, 1.0, 1.0, MixingMode::Weak)?;

    let h1p = BoundProfile::new(Which::H1, power.clone(), conv, None, None)?;
    let h1e = BoundProfile::new(Which::H1, expo.clone(), conv, None, None)?;
    let h2 = BoundProfile::new(Which::H2, weak.clone(), conv, None, Some(weyl))?;
    let h3 = BoundProfile::new(Which::H3, power, conv, Some(1.0), None)?;
    let h4 = BoundProfile::new(Which::H4, weak, conv, Some(1.0), Some(weyl))?;

    println!(
        "{:>8} {:>12} {:>12} {:>14} {:>12} {:>12} {:>12} {:>14}",
        "nu", "H1 power", "closed", "H1 exp*nu*L^2", "refined", "H2", "H3/L", "H4"
    );
    for k in 2..=12 {
        let nu = 10f64.powi(-k);
        let l = nu.ln().abs();
        let e = h1e.eval(nu)?;
        let refined = h1_exponential_refinement(&expo, nu, conv).map(|r| r.refined).unwrap_or(f64::NAN);
        println!(
            "{:>8.0e} {:>12.5e} {:>12.5e} {:>14.5} {:>12.5e} {:>12.5e} {:>12.5} {:>14.5e}",
            nu,
            h1p.eval(nu)?.h,
            h1_power_closed(1.0, 1.0, 1.0, 1.0, nu),
            e.h * nu * l * l,
            refined,
            h2.eval(nu)?.h,
            h3.eval(nu)?.h / l,
            h4.eval(nu)?.h,
        );
    }
    println!();
    for case in [
        Corollary::StrongPower { alpha: 1.0, beta: 1.0, p: 1.0 },
        Corollary::WeakPower { d: 2, alpha: 1.0, beta: 1.0, p: 0.5 },
        Corollary::FlowStrongPower { alpha: 1.0, beta: 1.0, p: 1.0 },
        Corollary::FlowStrongExp { alpha: 1.0, beta: 1.0, c2: 1.0, grad_u: 1.0 },
        Corollary::FlowWeakPower { d: 2, alpha: 1.0, beta: 1.0, p: 0.5 },
        Corollary::FlowLambdaLower { alpha: 1.0, beta: 1.0, c2: 1.0, grad_u: 1.0 },
    ] {
        println!("{case:?}: {:.6}", corollary_exponent(case)?);
    }
    Ok(())
}
