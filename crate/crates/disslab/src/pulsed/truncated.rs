//! Koopman operators truncated to a finite set of modes, stored as sparse
//! unitary matrices.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::algebra::ToralAutomorphism;
use crate::convention::{Mode, SpectralConvention};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::koopman::KoopmanAction;

/// Sparse unitary on a list of modes. Column j holds the image of mode j.
///
/// Operators built from an automorphism send modes leaving the ball to
/// modes entering it ("closure edges") so that the matrix stays unitary.
/// Mass carried along those edges is not physical; `leak` measures it.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    convention: SpectralConvention,
    modes: Vec<Mode>,
    index: HashMap<Mode, usize>,
    col_ptr: Vec<usize>,
    rows: Vec<u32>,
    vals: Vec<Complex64>,
    /// λ of the true image for columns routed through a closure edge.
    closure: Vec<Option<f64>>,
    lambdas: Vec<f64>,
}

fn sort_modes(modes: &mut [Mode]) {
    modes.sort_by(|a, b| a.norm_sq().cmp(&b.norm_sq()).then(a.cmp(b)));
}

/// Largest relative mass allowed through closure edges.
pub const LEAK_TOL: f64 = 1e-8;

/// All nonzero modes with |k| ≤ radius, ordered by length then lexicographically.
pub fn ball_modes(dim: usize, radius: f64) -> Vec<Mode> {
    let r = radius.floor() as i64;
    let r2 = radius * radius;
    let mut out = Vec::new();
    let mut k = vec![-r; dim];
    loop {
        let m = Mode::new(&k);
        if !m.is_zero() && (m.norm_sq() as f64) <= r2 {
            out.push(m);
        }
        let mut i = 0;
        loop {
            if i == dim {
                sort_modes(&mut out);
                return out;
            }
            k[i] += 1;
            if k[i] <= r {
                break;
            }
            k[i] = -r;
            i += 1;
        }
    }
}

impl TruncatedOperator {
    fn assemble(
        convention: SpectralConvention,
        modes: Vec<Mode>,
        columns: Vec<Vec<(usize, Complex64)>>,
        closure: Vec<Option<f64>>,
    ) -> Result<Self> {
        let index: HashMap<Mode, usize> = modes.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        if index.len() != modes.len() {
            return Err(Error::validation("duplicate modes in truncation"));
        }
        for m in &modes {
            convention.check_mode(m)?;
        }
        let mut col_ptr = vec![0];
        let mut rows = Vec::new();
        let mut vals = Vec::new();
        for col in &columns {
            for &(r, v) in col {
                if v.norm_sqr() > 0.0 {
                    rows.push(r as u32);
                    vals.push(v);
                }
            }
            col_ptr.push(rows.len());
        }
        let lambdas = modes.iter().map(|m| convention.eigenvalue(m)).collect();
        let op = TruncatedOperator {
            convention,
            modes,
            index,
            col_ptr,
            rows,
            vals,
            closure,
            lambdas,
        };
        let err = op.unitarity_defect();
        if err > 1e-8 {
            return Err(Error::validation(format!(
                "truncated matrix is not unitary (column defect {err:.3e})"
            )));
        }
        Ok(op)
    }

    /// Dense matrix on an arbitrary list of modes; `matrix[i][j]` is the
    /// amplitude sent from mode j to mode i.
    pub fn from_dense(
        convention: SpectralConvention,
        modes: Vec<Mode>,
        matrix: &[Vec<Complex64>],
    ) -> Result<Self> {
        let n = modes.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::validation("matrix shape does not match the mode list"));
        }
        let columns = (0..n)
            .map(|j| (0..n).map(|i| (i, matrix[i][j])).collect())
            .collect();
        Self::assemble(convention, modes, columns, vec![None; n])
    }

    /// U = id on the ball |k| ≤ radius.
    pub fn identity(convention: SpectralConvention, radius: f64) -> Result<Self> {
        let modes = ball_modes(convention.dimension, radius);
        let n = modes.len();
        let columns = (0..n).map(|j| vec![(j, Complex64::new(1.0, 0.0))]).collect();
        Self::assemble(convention, modes, columns, vec![None; n])
    }

    /// The permutation induced by A_* on |k| ≤ radius. Modes whose image
    /// leaves the ball are paired, in sorted order, with the modes whose
    /// preimage lies outside; those pairings are the closure edges.
    pub fn from_automorphism(
        t: &ToralAutomorphism,
        convention: SpectralConvention,
        radius: f64,
    ) -> Result<Self> {
        if convention.dimension != t.dim() {
            return Err(Error::validation("convention dimension differs from the map"));
        }
        let modes = ball_modes(t.dim(), radius);
        let index: HashMap<Mode, usize> = modes.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let n = modes.len();
        let mut target = vec![usize::MAX; n];
        let mut hit = vec![false; n];
        let mut escaping = Vec::new();
        let mut escape_lambda = vec![None; n];
        for (j, m) in modes.iter().enumerate() {
            let img = t.push_mode(m)?;
            match index.get(&img) {
                Some(&i) => {
                    target[j] = i;
                    hit[i] = true;
                }
                None => {
                    escaping.push(j);
                    escape_lambda[j] = Some(convention.eigenvalue(&img));
                }
            }
        }
        let entering: Vec<usize> = (0..n).filter(|&i| !hit[i]).collect();
        debug_assert_eq!(entering.len(), escaping.len());
        for (&j, &i) in escaping.iter().zip(entering.iter()) {
            target[j] = i;
        }
        let columns = target
            .iter()
            .map(|&i| vec![(i, Complex64::new(1.0, 0.0))])
            .collect();
        Self::assemble(convention, modes, columns, escape_lambda)
    }

    /// Radius that keeps every mode relevant at viscosity ν inside the
    /// ball: a mode k with S_n(k) ≤ 1/ν has |A_*^j k|² ≤ 1/(ν s) for j ≥ 1
    /// and |k| ≤ ‖A_*⁻¹‖ |A_* k|. It is also large enough that a mode
    /// escaping the ball is damped by e^{−2νλ} below the leak tolerance.
    pub fn provable_radius(t: &ToralAutomorphism, convention: SpectralConvention, nu: f64) -> f64 {
        let inv_norm = t.b().spectral_norm();
        let orbit = inv_norm * inv_norm;
        let escape = 0.5 * (1.0 / LEAK_TOL).ln() + 2.0;
        (orbit.max(escape) / (nu * convention.lambda1())).sqrt() + 1.0
    }

    pub fn convention(&self) -> SpectralConvention {
        self.convention
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn index_of(&self, m: &Mode) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn closure_edges(&self) -> usize {
        self.closure.iter().filter(|c| c.is_some()).count()
    }

    /// max_{i,j} |(U*U − I)_{ij}| over the stored columns.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.modes.len();
        // Row-wise lists let the Gram matrix be accumulated sparsely.
        let mut by_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n];
        for j in 0..n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                by_row[self.rows[p] as usize].push((j, self.vals[p]));
            }
        }
        let mut gram: HashMap<(usize, usize), Complex64> = HashMap::new();
        for row in &by_row {
            for &(j1, v1) in row {
                for &(j2, v2) in row {
                    if j1 <= j2 {
                        *gram.entry((j1, j2)).or_default() += v1.conj() * v2;
                    }
                }
            }
        }
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let d = gram.get(&(j, j)).copied().unwrap_or_default();
            worst = worst.max((d - 1.0).norm());
        }
        for (&(a, b), v) in &gram {
            if a != b {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// y = U x.
    pub fn apply_u(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (j, &xj) in x.iter().enumerate() {
            if xj.re == 0.0 && xj.im == 0.0 {
                continue;
            }
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                y[self.rows[p] as usize] += self.vals[p] * xj;
            }
        }
    }

    /// y = U* x.
    pub fn apply_u_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (j, yj) in y.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                s += self.vals[p].conj() * x[self.rows[p] as usize];
            }
            *yj = s;
        }
    }

    /// Heat factors e^{−νλ} per mode.
    pub fn damping(&self, nu: f64) -> Vec<f64> {
        self.lambdas.iter().map(|l| (-nu * l).exp()).collect()
    }

    /// (e^{νΔ}U)ⁿ applied to x.
    pub fn apply_step_n(&self, damp: &[f64], x: &[Complex64], n: usize) -> Vec<Complex64> {
        let mut cur = x.to_vec();
        let mut next = vec![Complex64::new(0.0, 0.0); x.len()];
        for _ in 0..n {
            self.apply_u(&cur, &mut next);
            for (v, d) in next.iter_mut().zip(damp) {
                *v *= d;
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    /// ((e^{νΔ}U)ⁿ)* applied to x.
    pub fn apply_step_n_adjoint(&self, damp: &[f64], x: &[Complex64], n: usize) -> Vec<Complex64> {
        let mut cur = x.to_vec();
        let mut next = vec![Complex64::new(0.0, 0.0); x.len()];
        for _ in 0..n {
            for (v, d) in cur.iter_mut().zip(damp) {
                *v *= d;
            }
            self.apply_u_adjoint(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    /// Damped mass that leaves the ball through closure edges while x is
    /// evolved for n steps, relative to ‖x‖².
    pub fn leak(&self, nu: f64, x: &[Complex64], n: usize) -> f64 {
        let total: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 || self.closure_edges() == 0 {
            return 0.0;
        }
        let damp = self.damping(nu);
        let mut cur = x.to_vec();
        let mut next = vec![Complex64::new(0.0, 0.0); x.len()];
        let mut leaked = 0.0;
        for _ in 0..n {
            for (j, c) in self.closure.iter().enumerate() {
                if let Some(lam) = c {
                    leaked += cur[j].norm_sqr() * (-2.0 * nu * lam).exp();
                }
            }
            self.apply_u(&cur, &mut next);
            for (v, d) in next.iter_mut().zip(&damp) {
                *v *= d;
            }
            std::mem::swap(&mut cur, &mut next);
        }
        leaked / total
    }

    pub fn to_vector(&self, field: &SpectralField) -> Result<Vec<Complex64>> {
        let mut x = vec![Complex64::new(0.0, 0.0); self.modes.len()];
        for (m, c) in field.iter() {
            let i = self.index_of(m).ok_or_else(|| {
                Error::validation(format!("mode {m} lies outside the truncation"))
            })?;
            x[i] = *c;
        }
        Ok(x)
    }

    pub fn to_field(&self, x: &[Complex64]) -> SpectralField {
        let mut f = SpectralField::new(self.convention);
        for (m, c) in self.modes.iter().zip(x) {
            if c.norm_sqr() > 0.0 {
                f.insert_unchecked(*m, *c);
            }
        }
        f
    }
}

impl KoopmanAction for TruncatedOperator {
    fn dimension(&self) -> usize {
        self.convention.dimension
    }

    fn push(&self, field: &SpectralField) -> Result<SpectralField> {
        let x = self.to_vector(field)?;
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        self.apply_u(&x, &mut y);
        Ok(self.to_field(&y))
    }

    fn label(&self) -> String {
        format!("truncated operator on {} modes", self.modes.len())
    }
}
