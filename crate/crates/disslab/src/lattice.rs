//! Exact enumeration of lattice points in ellipsoids xᵀGx ≤ B for integer
//! positive definite G (Fincke–Pohst after LLL reduction). The reduction
//! and every acceptance test use exact arithmetic. Floating point only
//! proposes candidates against a padded bound; each candidate's value is
//! then computed exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Ellipsoid {
    d: usize,
    gram: Vec<Vec<BigInt>>,
    /// Columns are the reduced basis in original coordinates.
    basis: Vec<Vec<BigInt>>,
    /// Upper unit triangular factor of the reduced Gram matrix:
    /// q(y) = Σ_i diag_i (y_i + Σ_{j>i} r_ij y_j)².
    diag_f: Vec<f64>,
    r_f: Vec<Vec<f64>>,
}

/// Exact bound and the padded float bound used to propose candidates.
struct Bound {
    exact: BigInt,
    padded: f64,
}

impl Bound {
    fn new(exact: BigInt) -> Self {
        let f = exact.to_f64().unwrap_or(f64::MAX);
        Bound {
            padded: f * (1.0 + 1e-6) + 1e-6,
            exact,
        }
    }
}

type Ldl = (Vec<Vec<BigRational>>, Vec<BigRational>);

fn ldl(gram: &[Vec<BigInt>]) -> Result<Ldl> {
    let d = gram.len();
    let zero = BigRational::zero();
    let mut r = vec![vec![zero.clone(); d]; d];
    let mut diag = vec![zero; d];
    for i in 0..d {
        let mut di = BigRational::from(gram[i][i].clone());
        for k in 0..i {
            di -= &diag[k] * &r[k][i] * &r[k][i];
        }
        if !di.is_positive() {
            return Err(Error::validation("Gram matrix is not positive definite"));
        }
        r[i][i] = BigRational::one();
        for j in i + 1..d {
            let mut s = BigRational::from(gram[i][j].clone());
            for k in 0..i {
                s -= &diag[k] * &r[k][i] * &r[k][j];
            }
            r[i][j] = s / &di;
        }
        diag[i] = di;
    }
    Ok((r, diag))
}

/// b_j ← b_j − q b_i on the Gram matrix and the basis.
fn sub_col(g: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], j: usize, i: usize, q: &BigInt) {
    let d = g.len();
    for row in u.iter_mut() {
        let t = &row[i] * q;
        row[j] -= t;
    }
    // G' = E G Eᵀ with E = I − q e_j e_iᵀ
    for c in 0..d {
        let t = &g[i][c] * q;
        g[j][c] -= t;
    }
    for rr in 0..d {
        let t = &g[rr][i] * q;
        g[rr][j] -= t;
    }
}

fn swap_cols(g: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], a: usize, b: usize) {
    g.swap(a, b);
    for row in g.iter_mut() {
        row.swap(a, b);
    }
    for row in u.iter_mut() {
        row.swap(a, b);
    }
}

fn round_rational(x: &BigRational) -> BigInt {
    let half = BigRational::new(1.into(), 2.into());
    (x + half).floor().to_integer()
}

/// LLL with δ = 3/4 on a Gram matrix. Returns the reduced Gram matrix and
/// the unimodular basis change.
fn lll(gram: &[Vec<BigInt>]) -> Result<(Vec<Vec<BigInt>>, Vec<Vec<BigInt>>)> {
    let d = gram.len();
    let mut g = gram.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..d)
        .map(|i| (0..d).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect();
    let delta = BigRational::new(3.into(), 4.into());
    let mut k = 1;
    while k < d {
        for i in (0..k).rev() {
            let (r, _) = ldl(&g)?;
            let q = round_rational(&r[i][k]);
            if !q.is_zero() {
                sub_col(&mut g, &mut u, k, i, &q);
            }
        }
        let (r, diag) = ldl(&g)?;
        let mu = &r[k - 1][k];
        if diag[k] >= (&delta - mu * mu) * &diag[k - 1] {
            k += 1;
        } else {
            swap_cols(&mut g, &mut u, k, k - 1);
            k = (k - 1).max(1);
        }
    }
    Ok((g, u))
}

impl Ellipsoid {
    pub fn new(gram: &[Vec<i128>]) -> Result<Self> {
        let g: Vec<Vec<BigInt>> = gram
            .iter()
            .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        Self::from_big(g)
    }

    pub fn from_big(gram: Vec<Vec<BigInt>>) -> Result<Self> {
        let d = gram.len();
        if d == 0 || gram.iter().any(|r| r.len() != d) {
            return Err(Error::validation("Gram matrix must be square"));
        }
        for i in 0..d {
            for j in 0..d {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::validation("Gram matrix must be symmetric"));
                }
            }
        }
        ldl(&gram)?;
        let (reduced, basis) = lll(&gram)?;
        let (r, diag) = ldl(&reduced)?;
        let diag_f = diag.iter().map(|v| v.to_f64().unwrap_or(f64::MAX)).collect();
        let r_f = r
            .iter()
            .map(|row| row.iter().map(|v| v.to_f64().unwrap_or(0.0)).collect())
            .collect();
        Ok(Ellipsoid {
            d,
            gram,
            basis,
            diag_f,
            r_f,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// xᵀGx, exact.
    pub fn value(&self, x: &[i64]) -> BigInt {
        let mut s = BigInt::zero();
        for i in 0..self.d {
            if x[i] == 0 {
                continue;
            }
            let mut row = BigInt::zero();
            for j in 0..self.d {
                if x[j] != 0 {
                    row += &self.gram[i][j] * x[j];
                }
            }
            s += row * x[i];
        }
        s
    }

    /// xᵀGx for arbitrary-size x.
    pub fn value_big(&self, x: &[BigInt]) -> BigInt {
        let mut s = BigInt::zero();
        for i in 0..self.d {
            let mut row = BigInt::zero();
            for j in 0..self.d {
                row += &self.gram[i][j] * &x[j];
            }
            s += row * &x[i];
        }
        s
    }

    fn to_original(&self, y: &[i64]) -> Vec<BigInt> {
        (0..self.d)
            .map(|i| {
                let mut s = BigInt::zero();
                for (j, &yj) in y.iter().enumerate() {
                    if yj != 0 {
                        s += &self.basis[i][j] * yj;
                    }
                }
                s
            })
            .collect()
    }

    /// Walks every nonzero x with xᵀGx ≤ bound, in reduced coordinates, and
    /// hands the callback the original coordinates with the exact value.
    /// The callback may lower the bound by returning a new value.
    fn walk<F>(&self, bound: BigInt, mut visit: F)
    where
        F: FnMut(&[BigInt], &BigInt) -> Option<BigInt>,
    {
        let d = self.d;
        let mut y = vec![0i64; d];
        let mut state = Bound::new(bound);
        let partial = vec![0.0; d + 1];
        self.level(d - 1, &mut y, &mut state, &partial, &mut visit);
    }

    fn level<F>(&self, i: usize, y: &mut Vec<i64>, bound: &mut Bound, partial: &[f64], visit: &mut F)
    where
        F: FnMut(&[BigInt], &BigInt) -> Option<BigInt>,
    {
        let d = self.d;
        // centre c = −Σ_{j>i} r_ij y_j
        let mut c = 0.0;
        for j in i + 1..d {
            c -= self.r_f[i][j] * y[j] as f64;
        }
        let room = bound.padded - partial[i + 1];
        if room < 0.0 {
            return;
        }
        let w = (room / self.diag_f[i]).sqrt();
        let lo = (c - w).floor() as i64 - 1;
        let hi = (c + w).ceil() as i64 + 1;
        // zig-zag from the centre so good points come first
        let start = c.round() as i64;
        let mut next = partial.to_vec();
        let mut k = 0i64;
        loop {
            let a = start + k;
            let b = start - k;
            if a > hi && b < lo {
                break;
            }
            for yi in std::iter::once(a).chain((k > 0).then_some(b)) {
                if yi < lo || yi > hi {
                    continue;
                }
                let t = yi as f64 - c;
                let p = partial[i + 1] + self.diag_f[i] * t * t;
                if p > bound.padded {
                    continue;
                }
                y[i] = yi;
                if i == 0 {
                    if y.iter().any(|&v| v != 0) {
                        let x = self.to_original(y);
                        let val = self.value_big(&x);
                        if val <= bound.exact {
                            if let Some(nb) = visit(&x, &val) {
                                *bound = Bound::new(nb);
                            }
                        }
                    }
                } else {
                    next[i] = p;
                    self.level(i - 1, y, bound, &next, visit);
                }
            }
            k += 1;
        }
        y[i] = 0;
    }

    /// Nonzero x minimizing xᵀGx, with its value. Ties go to the
    /// lexicographically smallest x.
    pub fn shortest(&self) -> Result<(Vec<i64>, BigInt)> {
        // start from the shortest reduced basis vector
        let mut arg: Vec<BigInt> = Vec::new();
        let mut best = BigInt::zero();
        for j in 0..self.d {
            let col: Vec<BigInt> = (0..self.d).map(|i| self.basis[i][j].clone()).collect();
            let v = self.value_big(&col);
            if arg.is_empty() || v < best {
                best = v;
                arg = col;
            }
        }
        self.walk(best.clone(), |x, v| {
            if v < &best || (v == &best && x < arg.as_slice()) {
                best = v.clone();
                arg = x.to_vec();
                Some(best.clone())
            } else {
                None
            }
        });
        Ok((small(&arg)?, best))
    }

    /// Every nonzero x with xᵀGx ≤ bound, sorted.
    pub fn points_within(&self, bound: &BigInt) -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        self.walk(bound.clone(), |x, _| {
            out.push(x.to_vec());
            None
        });
        out.sort();
        out.iter().map(|x| small(x)).collect()
    }
}

fn small(x: &[BigInt]) -> Result<Vec<i64>> {
    x.iter()
        .map(|v| {
            v.to_i64()
                .ok_or_else(|| Error::overflow("lattice vector does not fit in i64"))
        })
        .collect()
}
