//! Algebraic conditions behind exponential mixing of toral automorphisms.
//!
//! Checks ergodicity and irreducibility for a few matrices, classifies every
//! small SL₂(ℤ) matrix by Kronecker's theorem, and scans the cat-map norm form.

use disslab::algebra::{check_conditions, sl2_kronecker_scan, verify_norm_form, IntMatrix, ToralAutomorphism};

fn main() -> disslab::Result<()> {
    for m in ["2,1,1,1", "1,1,0,1", "0,-1,1,0", "3,2,1,1", "2,1,0,1,1,1,1,0,1", "0,0,1,1,0,0,0,1,1"] {
        let a = IntMatrix::parse(m)?;
        let r = check_conditions(&a)?;
        println!(
            "{m:>20}: {:<28} det {:>2}  C1 {:<5} C2 {:<5} witness {}",
            r.char_poly,
            r.det,
            r.c1_no_root_of_unity,
            r.c2_irreducible_char_poly,
            r.cyclotomic_witness
                .as_ref()
                .map(|w| format!("Phi_{} = {}", w.m, w.poly))
                .or(r.factor_witness.clone())
                .unwrap_or_else(|| "-".into())
        );
    }

    let scan = sl2_kronecker_scan(3)?;
    println!(
        "\nSL2(Z), entries in [-3,3]: {} matrices, {} with all roots in the disk, {} of them cyclotomic, {} exceptions",
        scan.matrices,
        scan.in_disk,
        scan.roots_of_unity,
        scan.violations.len()
    );

    let cat = ToralAutomorphism::cat_map();
    let nf = verify_norm_form(&cat, 200)?;
    println!(
        "cat map norm form on 0 < |k| <= {}: {} modes, nonzero integer {}, min product {:.12} at {:?}",
        nf.radius, nf.scanned, nf.integer_form_ok, nf.min_product, nf.argmin
    );
    Ok(())
}
