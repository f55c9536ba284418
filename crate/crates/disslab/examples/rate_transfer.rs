//! Moving a mixing rate between Sobolev classes.
//!
//! An exponential rate for (α, β) = (1, 1) becomes λ₁^{−γ} c₁^δ e^{−δ c₂ t}
//! for another pair. The transferred rate is compared with the cat-map
//! envelope measured directly in the target class.

use disslab::algebra::ToralAutomorphism;
use disslab::mixing::{strong_envelope, transfer_exponents, transfer_rate, DEFAULT_EPS};
use disslab::SpectralConvention;

fn main() -> disslab::Result<()> {
    let conv = SpectralConvention::lattice(2);
    let cat = ToralAutomorphism::cat_map();
    for (a2, b2) in [(1.0, 1.0), (0.5, 0.5), (2.0, 1.0), (0.5, 2.0)] {
        let (g, d) = transfer_exponents(1.0, 1.0, a2, b2);
        println!("(1,1) -> ({a2},{b2}): gamma {g:.4}, delta {d:.4}");
    }

    let source = strong_envelope(&cat, 1.0, 1.0, 12, DEFAULT_EPS, conv)?;
    let rate = source.fitted.clone().expect("envelope fit");
    println!("\nfitted (1,1) rate {}", rate.describe());
    for (a2, b2) in [(0.5, 0.5), (0.5, 1.0)] {
        let moved = transfer_rate(&rate, a2, b2, conv)?;
        let target = strong_envelope(&cat, a2, b2, 12, DEFAULT_EPS, conv)?;
        println!("({a2},{b2}): transferred {}", moved.rate.describe());
        println!("{:>4} {:>14} {:>14}", "n", "measured", "transferred");
        for p in target.points.iter().step_by(3) {
            println!("{:>4} {:>14.6e} {:>14.6e}", p.n, p.value, moved.rate.eval(p.n as f64));
        }
    }
    Ok(())
}
