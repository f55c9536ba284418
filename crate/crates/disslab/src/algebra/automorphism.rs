//! Toral automorphisms: the matrix, its action on modes, the eigenframe
//! and the integer norm form.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::conditions::{check_conditions, ConditionReport};
use super::intmat::IntMatrix;
use super::poly::{char_poly, IntPoly};
use crate::convention::Mode;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Eigenframe {
    pub values: Vec<Complex64>,
    /// Eigenvectors as columns, normalized so the last component is 1
    /// whenever it is nonzero.
    pub vectors: DMatrix<Complex64>,
    pub inverse: DMatrix<Complex64>,
    pub c_star: f64,
    /// Row index of adj(A − λI) used for the norm form.
    form_row: usize,
}

#[derive(Clone, Debug)]
pub struct ToralAutomorphism {
    a: IntMatrix,
    a_star: IntMatrix,
    b: IntMatrix,
    char_poly: IntPoly,
    lipschitz: f64,
    eigen: Option<Eigenframe>,
}

impl ToralAutomorphism {
    /// Requires det A = 1. The eigenframe is built when the eigenvalues
    /// are distinct.
    pub fn new(a: IntMatrix) -> Result<Self> {
        let d = a.dim();
        if !(2..=4).contains(&d) {
            return Err(Error::validation(format!("dimension {d} outside 2..=4")));
        }
        let det = a.det();
        if det != 1 {
            return Err(Error::validation(format!("det A = {det}, expected 1")));
        }
        let a_star = a.transpose();
        let b = a_star.inverse_unimodular()?;
        let p = char_poly(&a)?;
        let lipschitz = a.spectral_norm();
        let eigen = build_eigenframe(&a, &p);
        Ok(ToralAutomorphism {
            a,
            a_star,
            b,
            char_poly: p,
            lipschitz,
            eigen,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(IntMatrix::parse(s)?)
    }

    /// The Arnold cat map [[2,1],[1,1]].
    pub fn cat_map() -> Self {
        Self::parse("2,1,1,1").expect("cat map")
    }

    pub fn identity(d: usize) -> Self {
        Self::new(IntMatrix::identity(d)).expect("identity")
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.a
    }

    /// A_* = Aᵀ, the relabeling of modes under one step.
    pub fn a_star(&self) -> &IntMatrix {
        &self.a_star
    }

    /// B = (Aᵀ)⁻¹, so that (Uθ)^(k) = θ̂(Bk).
    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn char_poly(&self) -> &IntPoly {
        &self.char_poly
    }

    /// Spectral norm of A.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn conditions(&self) -> Result<ConditionReport> {
        check_conditions(&self.a)
    }

    pub fn eigenframe(&self) -> Result<&Eigenframe> {
        self.eigen.as_ref().ok_or(Error::Defective)
    }

    pub fn c_star(&self) -> Result<f64> {
        Ok(self.eigenframe()?.c_star)
    }

    /// Image of a mode under A_*.
    pub fn push_mode(&self, m: &Mode) -> Result<Mode> {
        self.a_star.apply(m)
    }

    /// Image of a mode under B.
    pub fn pull_mode(&self, m: &Mode) -> Result<Mode> {
        self.b.apply(m)
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.char_poly
            .roots()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn adjugate(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        // adj[i][j] = (−1)^{i+j} det(minor(j, i))
        let minor = m.clone().remove_row(j).remove_column(i);
        let det = if n == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            minor.determinant()
        };
        if (i + j) % 2 == 0 {
            det
        } else {
            -det
        }
    })
}

fn shifted(a: &IntMatrix, lambda: Complex64) -> DMatrix<Complex64> {
    let n = a.dim();
    DMatrix::from_fn(n, n, |i, j| {
        let v = Complex64::new(a.get(i, j) as f64, 0.0);
        if i == j {
            v - lambda
        } else {
            v
        }
    })
}

fn build_eigenframe(a: &IntMatrix, p: &IntPoly) -> Option<Eigenframe> {
    let n = a.dim();
    let mut values = p.roots();
    values.sort_by(|x, y| {
        y.norm()
            .total_cmp(&x.norm())
            .then(y.re.total_cmp(&x.re))
            .then(y.im.total_cmp(&x.im))
    });
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() < 1e-7 * scale {
                return None;
            }
        }
    }
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    let mut form_row = 0;
    for (idx, &lam) in values.iter().enumerate() {
        let adj = adjugate(&shifted(a, lam));
        let col = (0..n)
            .max_by(|&x, &y| adj.column(x).norm().total_cmp(&adj.column(y).norm()))
            .unwrap();
        let mut v: DVector<Complex64> = adj.column(col).into_owned();
        let last = v[n - 1];
        if last.norm() > 1e-8 * v.norm() {
            v /= last;
        } else {
            let nv = v.norm();
            v /= Complex64::new(nv, 0.0);
        }
        vectors.set_column(idx, &v);
        if idx == 0 {
            form_row = (0..n)
                .max_by(|&x, &y| adj.row(x).norm().total_cmp(&adj.row(y).norm()))
                .unwrap();
        }
    }
    let inverse = vectors.clone().try_inverse()?;
    let c_star = vectors
        .clone()
        .singular_values()
        .max()
        .max(inverse.clone().singular_values().max());
    Some(Eigenframe {
        values,
        vectors,
        inverse,
        c_star,
        form_row,
    })
}

/// Coordinates a(k) with k = Σ aᵢ vᵢ.
pub fn eigen_coordinates(t: &ToralAutomorphism, k: &Mode) -> Result<Vec<Complex64>> {
    if k.is_zero() {
        return Err(Error::validation("mode 0 has no eigen coordinates"));
    }
    if k.dim() != t.dim() {
        return Err(Error::validation("mode dimension mismatch"));
    }
    let e = t.eigenframe()?;
    let kv = DVector::from_iterator(
        t.dim(),
        k.as_slice().iter().map(|&x| Complex64::new(x as f64, 0.0)),
    );
    Ok((&e.inverse * kv).iter().copied().collect())
}

/// Integer norm form for d = 2: with A = [[a,b],[c,d]],
/// N(k) = c k₁² − (a − d) k₁k₂ − b k₂², and |a₁a₂| = |c||N| / (tr² − 4).
pub fn norm_form_2d(a: &IntMatrix, k: &Mode) -> i128 {
    let (aa, bb, cc, dd) = (
        a.get(0, 0) as i128,
        a.get(0, 1) as i128,
        a.get(1, 0) as i128,
        a.get(1, 1) as i128,
    );
    let (k1, k2) = (k.get(0) as i128, k.get(1) as i128);
    cc * k1 * k1 - (aa - dd) * k1 * k2 - bb * k2 * k2
}

/// Norm form for any d: ∏ᵢ (uᵢ·k) with uᵢ a fixed row of adj(A − λᵢI).
/// The product is a rational integer for integer k; returned in floating point.
pub fn norm_form_numeric(t: &ToralAutomorphism, k: &Mode) -> Result<Complex64> {
    let e = t.eigenframe()?;
    let mut prod = Complex64::new(1.0, 0.0);
    for &lam in &e.values {
        let adj = adjugate(&shifted(t.matrix(), lam));
        let s: Complex64 = (0..t.dim())
            .map(|j| adj[(e.form_row, j)] * k.get(j) as f64)
            .sum();
        prod *= s;
    }
    Ok(prod)
}

#[derive(Clone, Debug, Serialize)]
pub struct NormFormReport {
    pub radius: i64,
    pub scanned: usize,
    pub min_product: f64,
    pub argmin: Vec<i64>,
    pub integer_form_ok: bool,
    pub min_abs_norm: f64,
    pub first_failure: Option<Vec<i64>>,
}

fn for_each_in_ball(d: usize, radius: i64, mut f: impl FnMut(&Mode) -> Result<()>) -> Result<()> {
    let r2 = (radius as i128) * (radius as i128);
    let mut k = vec![-radius; d];
    loop {
        let m = Mode::new(&k);
        if !m.is_zero() && m.norm_sq() <= r2 {
            f(&m)?;
        }
        let mut i = 0;
        loop {
            if i == d {
                return Ok(());
            }
            k[i] += 1;
            if k[i] <= radius {
                break;
            }
            k[i] = -radius;
            i += 1;
        }
    }
}

/// Scans 0 < |k| ≤ radius for the minimum of ∏|aᵢ(k)| and checks that the
/// norm form is a nonzero integer. For d = 2 the form is evaluated exactly
/// and tied to the product through |c||N|/disc.
pub fn verify_norm_form(t: &ToralAutomorphism, radius: i64) -> Result<NormFormReport> {
    if radius < 1 {
        return Err(Error::validation("radius must be at least 1"));
    }
    let cond = t.conditions()?;
    if !(cond.c1_no_root_of_unity && cond.c2_irreducible_char_poly) {
        return Err(Error::Condition(
            "norm form check needs no root-of-unity eigenvalues and an irreducible characteristic polynomial".into(),
        ));
    }
    let d = t.dim();
    let a = t.matrix();
    let disc = if d == 2 {
        let tr = (a.get(0, 0) + a.get(1, 1)) as f64;
        tr * tr - 4.0
    } else {
        0.0
    };
    let mut best = f64::INFINITY;
    let mut argmin = vec![];
    let mut ok = true;
    let mut first_failure = None;
    let mut min_abs_norm = f64::INFINITY;
    let mut scanned = 0usize;
    for_each_in_ball(d, radius, |k| {
        scanned += 1;
        let coords = eigen_coordinates(t, k)?;
        let prod: f64 = coords.iter().map(|z| z.norm()).product();
        if prod < best {
            best = prod;
            argmin = k.as_slice().to_vec();
        }
        let good = if d == 2 {
            let n = norm_form_2d(a, k);
            min_abs_norm = min_abs_norm.min(n.abs() as f64);
            let predicted = (a.get(1, 0) as f64).abs() * (n.abs() as f64) / disc;
            n != 0 && (prod - predicted).abs() <= 1e-9 * predicted.max(1.0)
        } else {
            let n = norm_form_numeric(t, k)?;
            let r = n.re.round();
            min_abs_norm = min_abs_norm.min(r.abs());
            r != 0.0 && (n - Complex64::new(r, 0.0)).norm() <= 1e-6 * r.abs().max(1.0)
        };
        if !good && ok {
            ok = false;
            first_failure = Some(k.as_slice().to_vec());
        }
        Ok(())
    })?;
    Ok(NormFormReport {
        radius,
        scanned,
        min_product: best,
        argmin,
        integer_form_ok: ok,
        min_abs_norm,
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn golden() -> (f64, f64) {
        let s5 = 5f64.sqrt();
        ((3.0 + s5) / 2.0, (3.0 - s5) / 2.0)
    }

    #[test]
    fn cat_map_frame() {
        let t = ToralAutomorphism::cat_map();
        let e = t.eigenframe().unwrap();
        let (lp, lm) = golden();
        assert!((e.values[0].re - lp).abs() < 1e-14);
        assert!((e.values[1].re - lm).abs() < 1e-14);
        // v = (λ − 1, 1)
        assert!((e.vectors[(0, 0)].re - (lp - 1.0)).abs() < 1e-13);
        assert!((e.vectors[(1, 0)].re - 1.0).abs() < 1e-15);
        assert!((t.lipschitz() - lp).abs() < 1e-12);
    }

    #[test]
    fn eigen_residuals() {
        for s in ["2,1,1,1", "3,2,1,1", "0,0,1,1,0,-1,0,1,1", "1,1,0,0,0,1,1,0,0,0,1,1,1,0,0,1"] {
            let Ok(t) = ToralAutomorphism::parse(s) else { continue };
            let Ok(e) = t.eigenframe() else { continue };
            let a = t.matrix().to_f64().map(|x| Complex64::new(x, 0.0));
            for i in 0..t.dim() {
                let v = e.vectors.column(i);
                let r = &a * v - v * e.values[i];
                assert!(r.norm() < 1e-10 * v.norm(), "{s}: residual {}", r.norm());
            }
        }
    }

    #[test]
    fn cat_map_coordinates() {
        let t = ToralAutomorphism::cat_map();
        let a = eigen_coordinates(&t, &Mode::new(&[1, 0])).unwrap();
        let r5 = 1.0 / 5f64.sqrt();
        assert!((a[0].re - r5).abs() < 1e-14 && (a[1].re + r5).abs() < 1e-14);
        let a = eigen_coordinates(&t, &Mode::new(&[1, 1])).unwrap();
        assert!((a[0].norm() - 0.7236067977499790).abs() < 1e-12);
        assert!((a[1].norm() - 0.2763932022500210).abs() < 1e-12);
        assert!((a[0].norm() * a[1].norm() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn cat_map_norm_form_values() {
        let a = IntMatrix::parse("2,1,1,1").unwrap();
        assert_eq!(norm_form_2d(&a, &Mode::new(&[2, 3])), -11);
        assert_eq!(norm_form_2d(&a, &Mode::new(&[1, -2])), -1);
        let t = ToralAutomorphism::cat_map();
        let n = norm_form_numeric(&t, &Mode::new(&[2, 3])).unwrap();
        assert!((n.norm() - 11.0).abs() < 1e-9);
    }

    #[test]
    fn norm_form_plateau() {
        let t = ToralAutomorphism::cat_map();
        let mut prev = f64::INFINITY;
        for r in [50, 100, 200] {
            let rep = verify_norm_form(&t, r).unwrap();
            assert!(rep.integer_form_ok);
            assert!(rep.min_product <= prev && rep.min_product > 0.0);
            assert!((rep.min_product - 0.2).abs() < 1e-12);
            prev = rep.min_product;
        }
    }

    #[test]
    fn norm_form_three_dim() {
        // characteristic polynomial x³ − x − 1, irreducible, no unit roots
        let t = ToralAutomorphism::parse("0,0,1,1,0,1,0,1,0").unwrap();
        let c = t.conditions().unwrap();
        assert!(c.c1_no_root_of_unity && c.c2_irreducible_char_poly, "{c:?}");
        let rep = verify_norm_form(&t, 6).unwrap();
        assert!(rep.integer_form_ok, "{rep:?}");
    }

    #[test]
    fn integer_multiple_of_eigenvector() {
        // e₁ is an eigenvector of the block matrix diag(1, cat map)
        let t = ToralAutomorphism::parse("1,0,0,0,2,1,0,1,1").unwrap();
        let a = eigen_coordinates(&t, &Mode::new(&[3, 0, 0])).unwrap();
        let nonzero = a.iter().filter(|z| z.norm() > 1e-12).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn defective_rejected() {
        let t = ToralAutomorphism::parse("1,1,0,1").unwrap();
        assert!(matches!(
            eigen_coordinates(&t, &Mode::new(&[1, 0])),
            Err(Error::Defective)
        ));
    }

    #[test]
    fn conditions_shared_with_b() {
        for s in ["2,1,1,1", "0,-1,1,0", "1,1,0,1", "3,5,1,2"] {
            let t = ToralAutomorphism::parse(s).unwrap();
            let ca = t.conditions().unwrap();
            let cb = check_conditions(t.b()).unwrap();
            assert_eq!(ca.c1_no_root_of_unity, cb.c1_no_root_of_unity, "{s}");
            assert_eq!(ca.c2_irreducible_char_poly, cb.c2_irreducible_char_poly, "{s}");
            assert_eq!(ca.in_sl, cb.in_sl);
        }
    }

    proptest! {
        #[test]
        fn round_trip_and_equivalence(k1 in -40i64..40, k2 in -40i64..40) {
            prop_assume!(k1 != 0 || k2 != 0);
            let t = ToralAutomorphism::cat_map();
            let e = t.eigenframe().unwrap();
            let k = Mode::new(&[k1, k2]);
            let a = eigen_coordinates(&t, &k).unwrap();
            let mut back = [Complex64::new(0.0, 0.0); 2];
            for i in 0..2 {
                for j in 0..2 {
                    back[j] += a[i] * e.vectors[(j, i)];
                }
            }
            prop_assert!((back[0].re - k1 as f64).abs() < 1e-10 && (back[1].re - k2 as f64).abs() < 1e-10);
            let an: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(an <= e.c_star * k.norm() * (1.0 + 1e-12));
            prop_assert!(an >= k.norm() / e.c_star * (1.0 - 1e-12));
        }
    }
}
