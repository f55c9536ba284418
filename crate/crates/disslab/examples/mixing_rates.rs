//! Strong and weak mixing rates of the cat map.
//!
//! Prints the strong envelope for two Sobolev classes with its fitted
//! rate, then the worst-case weak Cesàro average for α = 0.

use disslab::algebra::ToralAutomorphism;
use disslab::dissipation::linear_fit;
use disslab::mixing::{strong_envelope, weak_sup_scan, DEFAULT_EPS};
use disslab::SpectralConvention;

fn main() -> disslab::Result<()> {
    let t = ToralAutomorphism::cat_map();
    let conv = SpectralConvention::lattice(2);
    let growth = t.spectral_radius().ln();
    for (alpha, beta) in [(1.0, 1.0), (2.0, 1.0)] {
        let env = strong_envelope(&t, alpha, beta, 12, DEFAULT_EPS, conv)?;
        println!("strong alpha={alpha} beta={beta}");
        println!("{:>4} {:>14} {:>14} {:>12} {:>10}", "n", "e(n)", "tail", "argmax", "scanned");
        for p in &env.points {
            println!(
                "{:>4} {:>14.6e} {:>14.3e} {:>12} {:>10}",
                p.n,
                p.value,
                p.tail_cert,
                format!("{:?}", p.argmax),
                p.candidates
            );
        }
        let (x, y): (Vec<f64>, Vec<f64>) = env
            .points
            .iter()
            .filter(|p| (3..=12).contains(&p.n))
            .map(|p| (p.n as f64, p.value.ln()))
            .unzip();
        let fit = linear_fit(&x, &y)?;
        println!("slope {:.4} (ln of the expanding eigenvalue {:.4})", fit.slope, growth);
        if let Some(r) = &env.fitted {
            println!("fitted {}", r.describe());
        }
        println!();
    }
    let ns = [16, 32, 64, 128, 256, 512];
    for beta in [0.5, 2.0] {
        let scan = weak_sup_scan(&t, 0.0, beta, &ns, 2.0, conv)?;
        println!("weak alpha=0 beta={beta}: exponent {:.4}", scan.exponent);
        for p in &scan.points {
            println!("  n={:>5} radius={:>7.2} modes={:>7} sup={:.6e}", p.n, p.radius, p.modes, p.value);
        }
    }
    Ok(())
}
