//! The randomized battery of per-step identities and inequalities.
//!
//! Usage: cargo run --release --example verification_battery [fields] [seed]

use disslab::algebra::ToralAutomorphism;
use disslab::battery::{pulsed_battery, BatteryOptions};
use disslab::SpectralConvention;

fn main() -> disslab::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let opts = BatteryOptions {
        fields: args.first().copied().unwrap_or(100) as usize,
        seed: args.get(1).copied().unwrap_or(2024),
        ..Default::default()
    };
    for (name, m) in [("cat map", "2,1,1,1"), ("3,1,2,1", "3,1,2,1"), ("3x3", "0,0,1,1,0,0,0,1,1")] {
        let t = ToralAutomorphism::parse(m)?;
        let r = pulsed_battery(&t, SpectralConvention::lattice(t.dim()), &opts)?;
        println!(
            "{name:>8}: {} runs, {} steps; energy defect {:.2e}; sandwich {} (worst {:.2e}); gap {}; chain {}",
            r.runs,
            r.steps_checked,
            r.energy_max_rel,
            r.sandwich_violations,
            r.sandwich_worst,
            r.gap_violations,
            r.chain_violations
        );
    }
    Ok(())
}
