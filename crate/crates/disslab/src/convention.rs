//! Lattice modes and the Laplacian eigenvalue convention.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;

/// A lattice vector in ℤ^d, d ≤ 4. Unused slots are zero so that the
/// derived ordering and hashing only depend on the meaningful entries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    dim: u8,
    c: [i64; MAX_DIM],
}

impl Mode {
    pub fn try_new(k: &[i64]) -> Result<Self> {
        if k.is_empty() || k.len() > MAX_DIM {
            return Err(Error::validation(format!(
                "mode dimension {} outside 1..=4",
                k.len()
            )));
        }
        let mut c = [0i64; MAX_DIM];
        c[..k.len()].copy_from_slice(k);
        Ok(Mode {
            dim: k.len() as u8,
            c,
        })
    }

    /// Panics on a bad dimension; convenient for literals.
    pub fn new(k: &[i64]) -> Self {
        Self::try_new(k).expect("mode dimension must be 1..=4")
    }

    pub fn zero(dim: usize) -> Self {
        Mode {
            dim: dim as u8,
            c: [0; MAX_DIM],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.c[..self.dim as usize]
    }

    pub fn get(&self, i: usize) -> i64 {
        self.c[i]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn neg(&self) -> Self {
        let mut m = *self;
        for x in m.c.iter_mut() {
            *x = -*x;
        }
        m
    }

    /// |k|² computed exactly.
    pub fn norm_sq(&self) -> i128 {
        self.as_slice().iter().map(|&x| (x as i128) * (x as i128)).sum()
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }
}

impl fmt::Debug for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_slice())
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.as_slice().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    /// λ_k = |k|²
    Lattice,
    /// λ_k = 4π²|k|², the Laplacian on the unit torus
    Geometric,
}

impl Scaling {
    pub fn factor(self) -> f64 {
        match self {
            Scaling::Lattice => 1.0,
            Scaling::Geometric => 4.0 * PI * PI,
        }
    }
}

impl std::str::FromStr for Scaling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice" => Ok(Scaling::Lattice),
            "geometric" => Ok(Scaling::Geometric),
            _ => Err(Error::validation(format!("unknown scaling '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralConvention {
    pub dimension: usize,
    pub scaling: Scaling,
}

impl SpectralConvention {
    pub fn new(dimension: usize, scaling: Scaling) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dimension) {
            return Err(Error::validation(format!(
                "dimension {dimension} outside 2..=4"
            )));
        }
        Ok(SpectralConvention { dimension, scaling })
    }

    pub fn lattice(dimension: usize) -> Self {
        Self::new(dimension, Scaling::Lattice).expect("dimension 2..=4")
    }

    pub fn geometric(dimension: usize) -> Self {
        Self::new(dimension, Scaling::Geometric).expect("dimension 2..=4")
    }

    pub fn eigenvalue(&self, k: &Mode) -> f64 {
        self.from_norm_sq(k.norm_sq() as f64)
    }

    /// Eigenvalue for a mode with squared length `n2`.
    pub fn from_norm_sq(&self, n2: f64) -> f64 {
        self.scaling.factor() * n2
    }

    pub fn lambda1(&self) -> f64 {
        self.scaling.factor()
    }

    pub fn check_mode(&self, k: &Mode) -> Result<()> {
        if k.dim() != self.dimension {
            return Err(Error::validation(format!(
                "mode {k} has dimension {}, expected {}",
                k.dim(),
                self.dimension
            )));
        }
        if k.is_zero() {
            return Err(Error::validation("mode 0 is excluded (mean-zero fields)"));
        }
        Ok(())
    }
}

/// Converts a viscosity between conventions so that ν·λ_k is unchanged.
pub fn rescale_nu(nu: f64, from: Scaling, to: Scaling) -> f64 {
    nu * from.factor() / to.factor()
}
