//! Ergodicity and irreducibility conditions for integer matrices, and
//! Kronecker's classification of integer polynomials with roots in the
//! closed unit disk.

use num_complex::Complex64;
use serde::Serialize;

use super::intmat::IntMatrix;
use super::poly::{char_poly, cyclotomic, cyclotomic_indices_up_to_degree, IntPoly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct CyclotomicWitness {
    pub m: u64,
    pub poly: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub char_poly: String,
    pub det: String,
    pub in_sl: bool,
    /// No eigenvalue is a root of unity.
    pub c1_no_root_of_unity: bool,
    /// Characteristic polynomial irreducible over ℚ.
    pub c2_irreducible_char_poly: bool,
    pub cyclotomic_witness: Option<CyclotomicWitness>,
    pub factor_witness: Option<String>,
}

impl ConditionReport {
    pub fn ergodic_irreducible(&self) -> bool {
        self.in_sl && self.c1_no_root_of_unity && self.c2_irreducible_char_poly
    }
}

pub fn check_conditions(a: &IntMatrix) -> Result<ConditionReport> {
    let d = a.dim();
    if !(2..=4).contains(&d) {
        return Err(Error::validation(format!("dimension {d} outside 2..=4")));
    }
    let p = char_poly(a)?;
    let det = a.det();

    let mut cyclo = None;
    for m in cyclotomic_indices_up_to_degree(d) {
        let phi = cyclotomic(m);
        if p.divide_exact(&phi).is_some() {
            cyclo = Some(CyclotomicWitness {
                m,
                poly: phi.to_string(),
            });
            break;
        }
    }
    let factor = find_small_factor(&p)?;
    Ok(ConditionReport {
        char_poly: p.to_string(),
        det: det.to_string(),
        in_sl: det == 1,
        c1_no_root_of_unity: cyclo.is_none(),
        c2_irreducible_char_poly: factor.is_none(),
        cyclotomic_witness: cyclo,
        factor_witness: factor.map(|f| f.to_string()),
    })
}

fn divisors(n: i128) -> Vec<i128> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            out.push(i);
            if i != n / i {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out.sort();
    out
}

/// Searches for a monic factor of degree 1 or 2 of a monic polynomial of
/// degree at most 4, which decides irreducibility in that range. Factor
/// coefficients are bounded through the Cauchy root bound.
pub fn find_small_factor(p: &IntPoly) -> Result<Option<IntPoly>> {
    let n = p.degree();
    if n > 4 {
        return Err(Error::validation("factor search supports degree ≤ 4"));
    }
    if !p.is_monic() {
        return Err(Error::validation("polynomial must be monic"));
    }
    if n <= 1 {
        return Ok(None);
    }
    let a0 = p.constant();
    if a0 == 0 {
        return Ok(Some(IntPoly::from_high(&[1, 0])));
    }
    let candidates_c: Vec<i128> = divisors(a0)
        .into_iter()
        .flat_map(|v| [v, -v])
        .collect();
    for &r in &candidates_c {
        let f = IntPoly::from_high(&[1, -r]);
        if p.divide_exact(&f).is_some() {
            return Ok(Some(f));
        }
    }
    if n == 4 {
        let bound = p.cauchy_bound();
        let bmax = (2.0 * bound).ceil() as i128;
        let cmax = (bound * bound).ceil() as i128;
        for &c in candidates_c.iter().filter(|c| c.abs() <= cmax) {
            for b in -bmax..=bmax {
                let f = IntPoly::from_high(&[1, b, c]);
                if p.divide_exact(&f).is_some() {
                    return Ok(Some(f));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kronecker {
    /// Some root lies outside the closed unit disk; the largest one is given.
    RootOutsideDisk(Complex64),
    /// Every irreducible factor is cyclotomic; the indices are listed with multiplicity.
    AllRootsOfUnity(Vec<u64>),
}

/// Classifies a monic integer polynomial of degree ≤ 8 as either having a
/// root of modulus > 1 or being a product of cyclotomic polynomials.
/// Cyclotomic factors are removed exactly first, so repeated roots on the
/// unit circle never reach the floating point root finder.
pub fn kronecker_classify(p: &IntPoly) -> Result<Kronecker> {
    if !p.is_monic() {
        return Err(Error::validation(format!("polynomial {p} is not monic")));
    }
    if p.degree() == 0 {
        return Err(Error::validation("constant polynomial has no roots"));
    }
    if p.degree() > 8 {
        return Err(Error::validation("degree above 8"));
    }
    if p.constant() == 0 {
        return Err(Error::validation(format!("{p} has the root 0")));
    }
    let mut q = p.clone();
    let mut found = Vec::new();
    'outer: loop {
        if q.is_one() {
            break;
        }
        for m in cyclotomic_indices_up_to_degree(q.degree()) {
            if let Some(next) = q.divide_exact(&cyclotomic(m)) {
                q = next;
                found.push(m);
                continue 'outer;
            }
        }
        break;
    }
    if q.is_one() {
        return Ok(Kronecker::AllRootsOfUnity(found));
    }
    let roots = q.roots();
    let top = roots
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("non-constant remainder has roots");
    if top.norm() > 1.0 + 1e-9 {
        Ok(Kronecker::RootOutsideDisk(top))
    } else {
        Err(Error::KroneckerViolation(format!(
            "non-cyclotomic factor {q} has all roots within the unit disk (max modulus {})",
            top.norm()
        )))
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct KroneckerScan {
    pub bound: i64,
    /// Matrices in SL₂(ℤ) with entries in [−bound, bound].
    pub matrices: usize,
    /// Those whose characteristic polynomial has all roots in the closed disk.
    pub in_disk: usize,
    pub roots_of_unity: usize,
    /// Row-major entries of any in-disk matrix that was not cyclotomic.
    pub violations: Vec<[i64; 4]>,
}

/// Classifies the characteristic polynomial of every SL₂(ℤ) matrix with
/// entries bounded by `bound`.
pub fn sl2_kronecker_scan(bound: i64) -> Result<KroneckerScan> {
    if !(1..=50).contains(&bound) {
        return Err(Error::validation("scan bound must lie in 1..=50"));
    }
    let mut scan = KroneckerScan {
        bound,
        ..Default::default()
    };
    let r = -bound..=bound;
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    if a * d - b * c != 1 {
                        continue;
                    }
                    scan.matrices += 1;
                    let p = char_poly(&IntMatrix::from_row_major(&[a, b, c, d])?)?;
                    match kronecker_classify(&p) {
                        Ok(Kronecker::RootOutsideDisk(_)) => {}
                        Ok(Kronecker::AllRootsOfUnity(_)) => {
                            scan.in_disk += 1;
                            scan.roots_of_unity += 1;
                        }
                        Err(Error::KroneckerViolation(_)) => {
                            scan.in_disk += 1;
                            scan.violations.push([a, b, c, d]);
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    Ok(scan)
}
