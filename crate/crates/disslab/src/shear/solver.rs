//! Advection–diffusion by a shear flow: Fourier in x, collocation in y,
//! Strang splitting. Bands k₁ never interact, so a step is a fixed M×M
//! matrix per band.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::convention::{Mode, SpectralConvention};
use crate::error::{Error, Result};
use crate::shear::flow::ShearFlow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CtsGrid {
    /// Bands 0 < |k₁| ≤ k1_max.
    pub k1_max: usize,
    /// Collocation points in y, a power of two.
    pub m: usize,
    /// Adds the k₁ = 0 band, which is otherwise excluded.
    pub include_zero: bool,
}

impl CtsGrid {
    pub fn new(k1_max: usize, m: usize) -> Result<Self> {
        if k1_max == 0 {
            return Err(Error::validation("k1_max must be at least 1"));
        }
        if m < 8 || !m.is_power_of_two() {
            return Err(Error::validation(format!("y grid {m} must be a power of two >= 8")));
        }
        Ok(CtsGrid {
            k1_max,
            m,
            include_zero: false,
        })
    }

    pub fn bands(&self) -> Vec<i64> {
        let k = self.k1_max as i64;
        (-k..=k).filter(|&b| b != 0 || self.include_zero).collect()
    }

    pub fn len(&self) -> usize {
        self.bands().len() * self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// y-wavenumber stored in FFT slot j.
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j < self.m / 2 {
            j as i64
        } else {
            j as i64 - self.m as i64
        }
    }

    fn check_flow(&self, flow: &ShearFlow) -> Result<()> {
        // the phase e^{−2πik₁v t} needs room beyond the bandwidth of v
        if self.m < 8 * flow.bandwidth().max(1) {
            return Err(Error::validation(format!(
                "y grid {} aliases a shear of bandwidth {}; use at least {}",
                self.m,
                flow.bandwidth(),
                8 * flow.bandwidth()
            )));
        }
        Ok(())
    }
}

/// Values θ̂_{k₁}(y_j), band-major in the order of `CtsGrid::bands`.
#[derive(Clone, Debug)]
pub struct CtsState {
    pub grid: CtsGrid,
    pub data: Vec<Complex64>,
    pub t: f64,
}

impl CtsState {
    pub fn zeros(grid: CtsGrid) -> Self {
        CtsState {
            grid,
            data: vec![Complex64::new(0.0, 0.0); grid.len()],
            t: 0.0,
        }
    }

    /// Fills band k₁ with values f(y_j).
    pub fn set_band(&mut self, k1: i64, f: impl Fn(f64) -> Complex64) -> Result<()> {
        let b = self
            .grid
            .bands()
            .iter()
            .position(|&x| x == k1)
            .ok_or_else(|| Error::validation(format!("band {k1} is not in the grid")))?;
        let m = self.grid.m;
        for j in 0..m {
            self.data[b * m + j] = f(j as f64 / m as f64);
        }
        Ok(())
    }

    pub fn band(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.grid.m..(i + 1) * self.grid.m]
    }

    /// ‖θ‖² = Σ_{k₁} (1/M) Σ_j |θ̂_{k₁}(y_j)|².
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.grid.m as f64
    }
}

pub struct CtsSolver {
    pub grid: CtsGrid,
    pub flow: ShearFlow,
    pub nu: f64,
    pub convention: SpectralConvention,
    bands: Vec<i64>,
    ys: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl CtsSolver {
    pub fn new(grid: CtsGrid, flow: ShearFlow, nu: f64, convention: SpectralConvention) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::validation(format!("nu must be nonnegative, got {nu}")));
        }
        if convention.dimension != 2 {
            return Err(Error::validation("shear flows live on the two-torus"));
        }
        grid.check_flow(&flow)?;
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(grid.m);
        let ifft = planner.plan_fft_inverse(grid.m);
        let ys = (0..grid.m).map(|j| j as f64 / grid.m as f64).collect();
        Ok(CtsSolver {
            bands: grid.bands(),
            grid,
            flow,
            nu,
            convention,
            ys,
            fft,
            ifft,
        })
    }

    pub fn lambda(&self, k1: i64, m: i64) -> f64 {
        self.convention.eigenvalue(&Mode::new(&[k1, m]))
    }

    fn diffuse(&self, k1: i64, band: &mut [Complex64], dt: f64) {
        if self.nu == 0.0 {
            return;
        }
        self.fft.process(band);
        let inv = 1.0 / self.grid.m as f64;
        for (j, z) in band.iter_mut().enumerate() {
            let m = self.grid.wavenumber(j);
            *z *= (-self.nu * self.lambda(k1, m) * dt).exp() * inv;
        }
        self.ifft.process(band);
    }

    fn advect(&self, k1: i64, band: &mut [Complex64], dt: f64) {
        for (z, &y) in band.iter_mut().zip(&self.ys) {
            *z *= Complex64::from_polar(1.0, -2.0 * PI * k1 as f64 * self.flow.eval(y) * dt);
        }
    }

    /// One Strang step on one band: half diffusion, transport, half diffusion.
    pub fn step_band(&self, k1: i64, band: &mut [Complex64], dt: f64) {
        self.diffuse(k1, band, 0.5 * dt);
        self.advect(k1, band, dt);
        self.diffuse(k1, band, 0.5 * dt);
    }

    pub fn step(&self, state: &mut CtsState, dt: f64) {
        let m = self.grid.m;
        for (i, &k1) in self.bands.iter().enumerate() {
            self.step_band(k1, &mut state.data[i * m..(i + 1) * m], dt);
        }
        state.t += dt;
    }

    /// Advances by `time` with steps of at most `dt`.
    pub fn evolve(&self, state: &mut CtsState, time: f64, dt: f64) {
        let (n, h) = split_time(time, dt);
        for _ in 0..n {
            self.step(state, h);
        }
    }

    /// Matrix of one step of size dt on band k₁ in the grid-value basis.
    pub fn step_matrix(&self, k1: i64, dt: f64) -> DMatrix<Complex64> {
        let m = self.grid.m;
        let mut out = DMatrix::zeros(m, m);
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..m {
            col.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            col[j] = Complex64::new(1.0, 0.0);
            self.step_band(k1, &mut col, dt);
            for i in 0..m {
                out[(i, j)] = col[i];
            }
        }
        out
    }

    pub fn bands(&self) -> &[i64] {
        &self.bands
    }

    /// Σ λ |ĉ|² over the y-spectrum of every band.
    pub fn h1_sq(&self, state: &CtsState) -> f64 {
        let m = self.grid.m;
        let mut total = 0.0;
        for (i, &k1) in self.bands.iter().enumerate() {
            let mut b = state.band(i).to_vec();
            self.fft.process(&mut b);
            for (j, z) in b.iter().enumerate() {
                total += self.lambda(k1, self.grid.wavenumber(j)) * z.norm_sqr() / (m * m) as f64;
            }
        }
        total
    }

    /// Fraction of the energy in the upper half of the y-spectrum.
    pub fn spectral_tail(&self, state: &CtsState) -> f64 {
        let m = self.grid.m;
        let (mut hi, mut all) = (0.0, 0.0);
        for i in 0..self.bands.len() {
            let mut b = state.band(i).to_vec();
            self.fft.process(&mut b);
            for (j, z) in b.iter().enumerate() {
                all += z.norm_sqr();
                if self.grid.wavenumber(j).unsigned_abs() as usize >= m / 4 {
                    hi += z.norm_sqr();
                }
            }
        }
        if all == 0.0 {
            0.0
        } else {
            hi / all
        }
    }
}

/// Largest |‖θ(t)‖² − ‖θ₀‖² + 2ν∫₀ᵗ‖θ‖₁²| relative to ‖θ₀‖² along a run,
/// with the integral taken by the trapezoid rule on the step grid.
pub fn energy_defect(solver: &CtsSolver, initial: &CtsState, time: f64, dt: f64) -> f64 {
    let (n, h) = split_time(time, dt);
    let mut st = initial.clone();
    let e0 = st.energy();
    let mut d_prev = solver.h1_sq(&st);
    let mut integral = 0.0;
    let mut worst = 0.0f64;
    for _ in 0..n {
        solver.step(&mut st, h);
        let d = solver.h1_sq(&st);
        integral += 0.5 * h * (d_prev + d);
        d_prev = d;
        worst = worst.max((st.energy() - e0 + 2.0 * solver.nu * integral).abs() / e0);
    }
    worst
}

/// n equal steps of size ≤ dt covering `time`.
pub fn split_time(time: f64, dt: f64) -> (usize, f64) {
    if time <= 0.0 {
        return (0, 0.0);
    }
    let n = (time / dt - 1e-9).ceil().max(1.0) as usize;
    (n, time / n as f64)
}

/// One Strang step of size dt.
pub fn cts_step(state: &mut CtsState, flow: &ShearFlow, nu: f64, dt: f64, convention: SpectralConvention) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::validation("dt must be positive"));
    }
    CtsSolver::new(state.grid, flow.clone(), nu, convention)?.step(state, dt);
    Ok(())
}
