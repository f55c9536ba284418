//! Sparse Fourier representation of mean-zero fields on the torus.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::convention::{Mode, Scaling, SpectralConvention};
use crate::error::{Error, Result};

/// Squared magnitude below which a coefficient is dropped.
pub const PRUNE_TOL: f64 = 1e-30;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    convention: SpectralConvention,
    coeffs: BTreeMap<Mode, Complex64>,
    real: bool,
}

impl SpectralField {
    pub fn new(convention: SpectralConvention) -> Self {
        SpectralField {
            convention,
            coeffs: BTreeMap::new(),
            real: false,
        }
    }

    pub fn single(convention: SpectralConvention, k: Mode, amp: Complex64) -> Result<Self> {
        let mut f = Self::new(convention);
        f.insert(k, amp)?;
        Ok(f)
    }

    pub fn from_pairs(
        convention: SpectralConvention,
        pairs: impl IntoIterator<Item = (Mode, Complex64)>,
    ) -> Result<Self> {
        let mut f = Self::new(convention);
        for (k, c) in pairs {
            f.add(k, c)?;
        }
        Ok(f)
    }

    pub fn convention(&self) -> SpectralConvention {
        self.convention
    }

    pub fn dimension(&self) -> usize {
        self.convention.dimension
    }

    /// Sets the coefficient at `k`, replacing any previous value.
    pub fn insert(&mut self, k: Mode, c: Complex64) -> Result<()> {
        self.convention.check_mode(&k)?;
        self.coeffs.insert(k, c);
        Ok(())
    }

    /// Adds `c` to the coefficient at `k`.
    pub fn add(&mut self, k: Mode, c: Complex64) -> Result<()> {
        self.convention.check_mode(&k)?;
        *self.coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        Ok(())
    }

    /// Internal insertion for callers that already validated the mode.
    pub(crate) fn insert_unchecked(&mut self, k: Mode, c: Complex64) {
        self.coeffs.insert(k, c);
    }

    pub(crate) fn values_mut(&mut self) -> impl Iterator<Item = (&Mode, &mut Complex64)> {
        self.coeffs.iter_mut()
    }

    pub fn get(&self, k: &Mode) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn modes(&self) -> impl Iterator<Item = &Mode> {
        self.coeffs.keys()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_real_flagged(&self) -> bool {
        self.real
    }

    /// Marks the field as real-valued after checking θ̂(−k) = conj θ̂(k).
    pub fn mark_real(&mut self, tol: f64) -> Result<()> {
        for (k, c) in &self.coeffs {
            let d = self.get(&k.neg()) - c.conj();
            if d.norm() > tol * (1.0 + c.norm()) {
                return Err(Error::validation(format!(
                    "reality violated at mode {k}"
                )));
            }
        }
        self.real = true;
        Ok(())
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Σ λ_k^s |θ̂(k)|², the square of the Ḣ^s norm.
    pub fn sobolev_sq(&self, s: f64) -> f64 {
        if s == 0.0 {
            return self.norm_sq();
        }
        self.coeffs
            .iter()
            .map(|(k, c)| self.convention.eigenvalue(k).powf(s) * c.norm_sqr())
            .sum()
    }

    pub fn h1_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, c)| self.convention.eigenvalue(k) * c.norm_sqr())
            .sum()
    }

    /// ⟨f, g⟩ = Σ f̂(k) conj(ĝ(k)).
    pub fn inner(&self, other: &SpectralField) -> Complex64 {
        let (small, large, flip) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut s = Complex64::new(0.0, 0.0);
        for (k, a) in &small.coeffs {
            if let Some(b) = large.coeffs.get(k) {
                s += if flip { b * a.conj() } else { a * b.conj() };
            }
        }
        s
    }

    pub fn scale(&mut self, s: f64) {
        for c in self.coeffs.values_mut() {
            *c *= s;
        }
    }

    /// Drops coefficients with |c|² < tol.
    pub fn prune(&mut self, tol: f64) {
        self.coeffs.retain(|_, c| c.norm_sqr() >= tol);
    }

    /// f − g over the union of supports.
    pub fn difference(&self, other: &SpectralField) -> SpectralField {
        let mut d = self.clone();
        d.real = false;
        for (k, c) in &other.coeffs {
            *d.coeffs.entry(*k).or_insert(Complex64::new(0.0, 0.0)) -= c;
        }
        d
    }

    /// Random field with `n_modes` distinct modes in the cube |k_i| ≤ radius
    /// and standard complex Gaussian-like amplitudes. With `real` the
    /// conjugate partners are added so the field is real-valued.
    pub fn random<R: Rng + ?Sized>(
        convention: SpectralConvention,
        n_modes: usize,
        radius: i64,
        real: bool,
        rng: &mut R,
    ) -> Result<Self> {
        if radius < 1 {
            return Err(Error::validation("radius must be at least 1"));
        }
        let d = convention.dimension;
        let side = (2 * radius + 1) as u128;
        let capacity = side.pow(d as u32) - 1;
        if (n_modes as u128) * if real { 2 } else { 1 } > capacity {
            return Err(Error::validation("too many modes for the requested radius"));
        }
        let mut f = Self::new(convention);
        while f.len() < n_modes * if real { 2 } else { 1 } {
            let k: Vec<i64> = (0..d).map(|_| rng.gen_range(-radius..=radius)).collect();
            let k = Mode::new(&k);
            if k.is_zero() || f.coeffs.contains_key(&k) {
                continue;
            }
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            f.coeffs.insert(k, c);
            if real {
                f.coeffs.insert(k.neg(), c.conj());
            }
        }
        f.real = real;
        Ok(f)
    }

    pub fn to_json(&self) -> FieldJson {
        FieldJson {
            header: FieldHeader {
                dimension: self.convention.dimension,
                scaling: self.convention.scaling,
                real: self.real,
            },
            coefficients: self
                .coeffs
                .iter()
                .map(|(k, c)| CoeffRecord {
                    k: k.as_slice().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn from_json(j: &FieldJson) -> Result<Self> {
        let conv = SpectralConvention::new(j.header.dimension, j.header.scaling)?;
        let mut f = Self::new(conv);
        for r in &j.coefficients {
            let k = Mode::try_new(&r.k)?;
            if f.coeffs.contains_key(&k) {
                return Err(Error::validation(format!("duplicate mode {k}")));
            }
            f.insert(k, Complex64::new(r.re, r.im))?;
        }
        if j.header.real {
            f.mark_real(1e-12)?;
        }
        Ok(f)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let j: FieldJson = serde_json::from_str(&text)?;
        Self::from_json(&j)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.to_json())?)?;
        Ok(())
    }
}

/// Ḣ^s norm (Σ λ_k^s |θ̂(k)|²)^{1/2}; negative s gives the mixing norms.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    field.sobolev_sq(s).sqrt()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldHeader {
    pub dimension: usize,
    pub scaling: Scaling,
    #[serde(default)]
    pub real: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffRecord {
    pub k: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldJson {
    pub header: FieldHeader,
    pub coefficients: Vec<CoeffRecord>,
}
