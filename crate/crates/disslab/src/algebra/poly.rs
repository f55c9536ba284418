//! Integer polynomials: characteristic polynomials, cyclotomic
//! polynomials, exact division and numerical roots.

use std::fmt;

use num_complex::Complex64;

use super::intmat::IntMatrix;
use crate::error::{Error, Result};

/// Coefficients stored from the constant term upward, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    c: Vec<i128>,
}

impl IntPoly {
    pub fn new(mut c: Vec<i128>) -> Self {
        while c.len() > 1 && *c.last().unwrap() == 0 {
            c.pop();
        }
        if c.is_empty() {
            c.push(0);
        }
        IntPoly { c }
    }

    /// From coefficients listed highest degree first, e.g. `[1, -3, 1]` for x² − 3x + 1.
    pub fn from_high(c: &[i128]) -> Self {
        Self::new(c.iter().rev().copied().collect())
    }

    pub fn one() -> Self {
        IntPoly { c: vec![1] }
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.c
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn leading(&self) -> i128 {
        *self.c.last().unwrap()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn constant(&self) -> i128 {
        self.c[0]
    }

    pub fn mul(&self, other: &IntPoly) -> Result<IntPoly> {
        let mut out = vec![0i128; self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in other.c.iter().enumerate() {
                let t = a
                    .checked_mul(*b)
                    .and_then(|t| out[i + j].checked_add(t))
                    .ok_or_else(|| Error::overflow("multiplying polynomials"))?;
                out[i + j] = t;
            }
        }
        Ok(IntPoly::new(out))
    }

    /// Division by a monic divisor; returns (quotient, remainder).
    pub fn div_rem_monic(&self, divisor: &IntPoly) -> Result<(IntPoly, IntPoly)> {
        if !divisor.is_monic() {
            return Err(Error::validation("divisor must be monic"));
        }
        let dd = divisor.degree();
        if self.degree() < dd {
            return Ok((IntPoly::new(vec![0]), self.clone()));
        }
        let mut r = self.c.clone();
        let mut q = vec![0i128; self.degree() - dd + 1];
        for i in (0..q.len()).rev() {
            let t = r[i + dd];
            q[i] = t;
            if t != 0 {
                for (j, &dc) in divisor.c.iter().enumerate() {
                    r[i + j] = r[i + j]
                        .checked_sub(t.checked_mul(dc).ok_or_else(|| Error::overflow("dividing polynomials"))?)
                        .ok_or_else(|| Error::overflow("dividing polynomials"))?;
                }
            }
        }
        r.truncate(dd.max(1));
        Ok((IntPoly::new(q), IntPoly::new(r)))
    }

    /// Exact quotient when `divisor` divides `self`.
    pub fn divide_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        let (q, r) = self.div_rem_monic(divisor).ok()?;
        if r.c == [0] {
            Some(q)
        } else {
            None
        }
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.c
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a as f64)
    }

    fn eval_with_derivative(&self, x: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &a in self.c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a as f64;
        }
        (p, dp)
    }

    /// Cauchy bound: every root satisfies |z| ≤ 1 + max|a_i/a_n|.
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.leading() as f64;
        1.0 + self.c[..self.degree()]
            .iter()
            .map(|&a| (a as f64 / lead).abs())
            .fold(0.0, f64::max)
    }

    /// All complex roots by Aberth iteration followed by Newton polishing.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.leading() as f64;
        let monic: Vec<f64> = self.c.iter().map(|&a| a as f64 / lead).collect();
        let p = |x: Complex64| {
            let mut v = Complex64::new(0.0, 0.0);
            let mut dv = Complex64::new(0.0, 0.0);
            for &a in monic.iter().rev() {
                dv = dv * x + v;
                v = v * x + a;
            }
            (v, dv)
        };
        let r0 = self.cauchy_bound().min(1e6);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(r0 * 0.9, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        for _ in 0..2000 {
            let mut max_step: f64 = 0.0;
            for i in 0..n {
                let (v, dv) = p(z[i]);
                if v.norm() == 0.0 {
                    continue;
                }
                let ratio = v / dv;
                let s: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                    .sum();
                let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
                if w.is_finite() {
                    z[i] -= w;
                    max_step = max_step.max(w.norm() / (1.0 + z[i].norm()));
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        for zi in z.iter_mut() {
            for _ in 0..5 {
                let (v, dv) = self.eval_with_derivative(*zi);
                if dv.norm() == 0.0 {
                    break;
                }
                let step = v / dv;
                if !step.is_finite() {
                    break;
                }
                let cand = *zi - step;
                if self.eval(cand).norm() < v.norm() {
                    *zi = cand;
                } else {
                    break;
                }
            }
            if zi.im.abs() < 1e-14 * (1.0 + zi.re.abs()) {
                zi.im = 0.0;
            }
        }
        z
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &a) in self.c.iter().enumerate().rev() {
            if a == 0 && !(i == 0 && first) {
                continue;
            }
            let sign = if a < 0 { "-" } else { "+" };
            if first {
                if a < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let m = a.unsigned_abs();
            match (i, m) {
                (0, _) => write!(f, "{m}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{m}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{m}x^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// det(xI − A) by Faddeev–LeVerrier; all divisions are exact.
pub fn char_poly(a: &IntMatrix) -> Result<IntPoly> {
    let n = a.dim();
    let am = a.to_i128();
    let ovf = || Error::overflow("computing the characteristic polynomial");
    let mut coeffs = vec![0i128; n + 1];
    coeffs[n] = 1;
    let mut m = vec![vec![0i128; n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s: i128 = 0;
                for l in 0..n {
                    s = s.checked_add(am[i][l].checked_mul(m[l][j]).ok_or_else(ovf)?).ok_or_else(ovf)?;
                }
                if i == j {
                    s = s.checked_add(coeffs[n - k + 1]).ok_or_else(ovf)?;
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr: i128 = 0;
        for i in 0..n {
            for l in 0..n {
                tr = tr.checked_add(am[i][l].checked_mul(m[l][i]).ok_or_else(ovf)?).ok_or_else(ovf)?;
            }
        }
        coeffs[n - k] = -tr / k as i128;
    }
    Ok(IntPoly::new(coeffs))
}

/// Euler's totient.
pub fn totient(mut m: u64) -> u64 {
    let mut result = m;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Φ_m, computed by dividing x^m − 1 by Φ_d for every proper divisor d.
pub fn cyclotomic(m: u64) -> IntPoly {
    assert!(m >= 1);
    let mut c = vec![0i128; m as usize + 1];
    c[0] = -1;
    c[m as usize] = 1;
    let mut p = IntPoly::new(c);
    for d in 1..m {
        if m % d == 0 {
            p = p
                .divide_exact(&cyclotomic(d))
                .expect("cyclotomic divisor is exact");
        }
    }
    p
}

/// Indices m with φ(m) ≤ degree, in increasing order.
pub fn cyclotomic_indices_up_to_degree(degree: usize) -> Vec<u64> {
    // φ(m) ≥ sqrt(m/2), so m ≤ 2 deg² bounds the search.
    let limit = (2 * degree * degree).max(2) as u64;
    (1..=limit).filter(|&m| totient(m) as usize <= degree).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1), IntPoly::from_high(&[1, -1]));
        assert_eq!(cyclotomic(4), IntPoly::from_high(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), IntPoly::from_high(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), IntPoly::from_high(&[1, 0, -1, 0, 1]));
        for m in 1..=30 {
            assert_eq!(cyclotomic(m).degree() as u64, totient(m));
        }
    }

    #[test]
    fn indices_for_degree_four() {
        assert_eq!(
            cyclotomic_indices_up_to_degree(4),
            vec![1, 2, 3, 4, 5, 6, 8, 10, 12]
        );
    }

    #[test]
    fn char_poly_cat_map() {
        let a = IntMatrix::parse("2,1,1,1").unwrap();
        assert_eq!(char_poly(&a).unwrap(), IntPoly::from_high(&[1, -3, 1]));
    }

    #[test]
    fn char_poly_matches_roots_3x3() {
        let a = IntMatrix::parse("0,0,1,1,0,-1,0,1,0").unwrap();
        let p = char_poly(&a).unwrap();
        assert_eq!(p.degree(), 3);
        assert_eq!(p.constant(), -1);
        // trace
        assert_eq!(p.coeffs()[2], 0);
    }

    #[test]
    fn golden_ratio_root() {
        let r = IntPoly::from_high(&[1, -1, -1]).roots();
        let m = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!((m - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn display() {
        assert_eq!(IntPoly::from_high(&[1, -3, 1]).to_string(), "x^2 - 3x + 1");
        assert_eq!(IntPoly::from_high(&[1, 0, 1]).to_string(), "x^2 + 1");
    }
}
