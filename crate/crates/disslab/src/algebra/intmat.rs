//! Small dense integer matrices with checked arithmetic.

use std::fmt;

use nalgebra::DMatrix;

use crate::convention::Mode;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::validation("matrix must be square and non-empty"));
        }
        Ok(IntMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Parses a row-major list whose length is a perfect square.
    pub fn from_row_major(v: &[i64]) -> Result<Self> {
        let n = (v.len() as f64).sqrt().round() as usize;
        if n == 0 || n * n != v.len() {
            return Err(Error::validation(format!(
                "{} entries do not form a square matrix",
                v.len()
            )));
        }
        Ok(IntMatrix { n, data: v.to_vec() })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let v: std::result::Result<Vec<i64>, _> =
            s.split(',').map(|t| t.trim().parse::<i64>()).collect();
        let v = v.map_err(|e| Error::validation(format!("malformed matrix '{s}': {e}")))?;
        Self::from_row_major(&v)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn row_major(&self) -> &[i64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        IntMatrix { n, data }
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Option<IntMatrix> {
        let n = self.n;
        let mut data = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s: i128 = 0;
                for l in 0..n {
                    s += self.get(i, l) as i128 * other.get(l, j) as i128;
                }
                data[i * n + j] = i64::try_from(s).ok()?;
            }
        }
        Some(IntMatrix { n, data })
    }

    /// A·k, failing if a component leaves the 63-bit range.
    pub fn apply(&self, k: &Mode) -> Result<Mode> {
        let n = self.n;
        let mut out = [0i64; 4];
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let mut s: i128 = 0;
            for j in 0..n {
                s += self.data[i * n + j] as i128 * k.get(j) as i128;
            }
            *o = i64::try_from(s)
                .map_err(|_| Error::overflow(format!("mapping mode {k}")))?;
        }
        Mode::try_new(&out[..n])
    }

    pub fn to_i128(&self) -> Vec<Vec<i128>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) as i128).collect())
            .collect()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }

    pub fn det(&self) -> i128 {
        det_i128(&self.to_i128())
    }

    /// Inverse of a unimodular matrix via the adjugate.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let det = self.det();
        if det != 1 && det != -1 {
            return Err(Error::validation(format!(
                "matrix has determinant {det}, not invertible over the integers"
            )));
        }
        let m = self.to_i128();
        let n = self.n;
        let mut data = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let minor = minor(&m, j, i);
                let cof = if (i + j) % 2 == 0 { 1 } else { -1 } * det_i128(&minor);
                data[i * n + j] = i64::try_from(cof * det)
                    .map_err(|_| Error::overflow("inverting matrix"))?;
            }
        }
        Ok(IntMatrix { n, data })
    }

    /// Spectral norm via SVD.
    pub fn spectral_norm(&self) -> f64 {
        self.to_f64().singular_values().max()
    }

    pub fn min_singular_value(&self) -> f64 {
        self.to_f64().singular_values().min()
    }
}

fn minor(m: &[Vec<i128>], r: usize, c: usize) -> Vec<Vec<i128>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != c)
                .map(|(_, &x)| x)
                .collect()
        })
        .collect()
}

/// Determinant by cofactor expansion; matrices here are at most 4×4.
pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => (0..n)
            .map(|j| {
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det_i128(&minor(m, 0, j))
            })
            .sum(),
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", &self.data[i * self.n..(i + 1) * self.n])?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
