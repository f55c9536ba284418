//! Enhanced dissipation by the shear v(y) = sin 2πy.
//!
//! Sweeps ν, prints τ_d with ν·τ_d and the fitted ν-exponent, checks the
//! transport gap, and measures the decay of the shear correlation.

use std::time::Instant;

use disslab::bounds::eigenvalue_floor;
use disslab::dissipation::linear_fit;
use disslab::shear::{shear_mixing_envelope, tau_d_cts, transport_gap_cts, CtsGrid, CtsOptions, CtsState, ShearFlow};
use disslab::SpectralConvention;
use num_complex::Complex64;

fn main() -> disslab::Result<()> {
    let conv = SpectralConvention::geometric(2);
    let flow = ShearFlow::sine();
    let opts = CtsOptions::new(16, 64, 0.01)?;
    let nus = [1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4];
    println!("{:>8} {:>12} {:>12} {:>12} {:>8}", "nu", "tau_d", "nu*tau_d", "mu0 floor", "seconds");
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for nu in nus {
        let start = Instant::now();
        let r = tau_d_cts(&flow, nu, conv, &opts)?;
        println!(
            "{:>8.0e} {:>12.4} {:>12.5} {:>12.5e} {:>8.2}",
            nu,
            r.tau_d,
            nu * r.tau_d,
            eigenvalue_floor(r.tau_d),
            start.elapsed().as_secs_f64()
        );
        xs.push(nu.ln());
        ys.push(r.tau_d.ln());
    }
    let fit = linear_fit(&xs, &ys)?;
    println!("tau_d ~ nu^(-{:.4}), r2 {:.4}", -fit.slope, fit.r2);

    let grid = CtsGrid::new(4, 64)?;
    let mut theta = CtsState::zeros(grid);
    theta.set_band(1, |_| Complex64::new(1.0, 0.0))?;
    for t in [0.1, 0.5, 1.0, 2.0] {
        let g = transport_gap_cts(&theta, &flow, 1e-3, t, 1e-3, conv)?;
        println!("transport gap t={t}: {:.4e} <= {:.4e} {}", g.gap_sq, g.bound, g.holds);
    }

    let times: Vec<f64> = (0..16).map(|i| 2.0 * 1.35f64.powi(i)).collect();
    let env = shear_mixing_envelope(&flow, &times)?;
    println!("shear correlation decays like t^(-{:.4})", env.exponent);
    Ok(())
}
