//! Dissipation time of the cat map, computed two ways.
//!
//! The exact route minimizes orbit sums over the lattice; the operator route
//! runs power iteration on a truncated mode ball. They must agree.

use std::time::Instant;

use disslab::algebra::ToralAutomorphism;
use disslab::dissipation::{tau_d_exact, tau_d_operator};
use disslab::power::PowerOptions;
use disslab::pulsed::TruncatedOperator;
use disslab::SpectralConvention;

fn main() -> disslab::Result<()> {
    let t = ToralAutomorphism::cat_map();
    let conv = SpectralConvention::lattice(2);
    let nus: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let nus = if nus.is_empty() { vec![1e-2, 1e-3, 1e-4] } else { nus };
    println!("{:>10} {:>8} {:>8} {:>8} {:>12} {:>10}", "nu", "exact", "operator", "modes", "leak", "seconds");
    for nu in nus {
        let exact = tau_d_exact(&t, nu, conv)?;
        let start = Instant::now();
        let radius = TruncatedOperator::provable_radius(&t, conv, nu);
        let op = TruncatedOperator::from_automorphism(&t, conv, radius)?;
        let r = tau_d_operator(&op, nu, &PowerOptions::default())?;
        println!(
            "{:>10.1e} {:>8} {:>8} {:>8} {:>12.3e} {:>10.2}",
            nu,
            exact,
            r.tau_d,
            op.len(),
            r.leak,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
