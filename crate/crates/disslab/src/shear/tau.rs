//! Continuous-time dissipation time of a shear flow, the transport gap,
//! and the decay of shear correlations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::convention::SpectralConvention;
use crate::dissipation::linear_fit;
use crate::error::{Error, Result};
use crate::power::{top_singular, PowerOptions};
use crate::shear::flow::ShearFlow;
use crate::shear::solver::{CtsGrid, CtsSolver, CtsState};

const INV_E: f64 = 0.367_879_441_171_442_33;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CtsOptions {
    pub grid: CtsGrid,
    pub dt: f64,
    pub restarts: usize,
    pub min_iter: usize,
    /// Relative width at which the bisection on t stops.
    pub rel_tol: f64,
    /// Seeds the random restarts of the power iteration.
    pub seed: u64,
}

impl CtsOptions {
    pub fn new(k1_max: usize, m: usize, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::validation("dt must be positive"));
        }
        Ok(CtsOptions {
            grid: CtsGrid::new(k1_max, m)?,
            dt,
            restarts: 5,
            min_iter: 8,
            rel_tol: 1e-3,
            seed: PowerOptions::default().seed,
        })
    }
}

impl Default for CtsOptions {
    fn default() -> Self {
        Self::new(16, 64, 0.01).expect("default grid")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CtsTau {
    pub nu: f64,
    pub tau_d: f64,
    /// Estimated ‖S_τ‖, just below 1/e.
    pub norm_at: f64,
    pub steps: usize,
    pub norm_evaluations: usize,
}

/// Solution maps S_t = P(s)Pⁿ per band, with adjoints from the reversed flow.
struct Maps<'a> {
    fwd: &'a CtsSolver,
    bwd: &'a CtsSolver,
    dt: f64,
    opts: &'a CtsOptions,
    evaluations: usize,
}

type Blocks = Vec<DMatrix<Complex64>>;

impl Maps<'_> {
    fn step(&self, s: f64) -> (Blocks, Blocks) {
        let f = self.fwd.bands().iter().map(|&k| self.fwd.step_matrix(k, s)).collect();
        let b = self.bwd.bands().iter().map(|&k| self.bwd.step_matrix(k, s)).collect();
        (f, b)
    }

    fn norm(&mut self, fwd: &Blocks, bwd: &Blocks) -> Result<f64> {
        self.evaluations += 1;
        let m = self.opts.grid.m;
        let dim = fwd.len() * m;
        let apply_blocks = |blocks: &Blocks, x: &[Complex64]| -> Vec<Complex64> {
            let mut out = Vec::with_capacity(dim);
            for (i, b) in blocks.iter().enumerate() {
                let v = b * DVector::from_column_slice(&x[i * m..(i + 1) * m]);
                out.extend_from_slice(v.as_slice());
            }
            out
        };
        let mut popts = PowerOptions {
            restarts: self.opts.restarts,
            min_iter: self.opts.min_iter,
            seed: self.opts.seed,
            ..Default::default()
        };
        for _ in 0..2 {
            let r = top_singular(dim, |x| apply_blocks(fwd, x), |x| apply_blocks(bwd, x), &popts);
            if r.converged {
                return Ok(r.norm);
            }
            popts.restarts *= 2;
            popts.max_iter *= 10;
        }
        Err(Error::Numerical("power iteration on the solution map did not converge".into()))
    }
}

fn mul(a: &Blocks, b: &Blocks) -> Blocks {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Smallest t with ‖S_t‖ < 1/e on the zero-horizontal-average space.
pub fn tau_d_cts(flow: &ShearFlow, nu: f64, convention: SpectralConvention, opts: &CtsOptions) -> Result<CtsTau> {
    if !(1e-4 * (1.0 - 1e-12)..=1e-1 * (1.0 + 1e-12)).contains(&nu) {
        return Err(Error::validation(format!("nu = {nu} outside the supported range [1e-4, 1e-1]")));
    }
    if opts.grid.k1_max > 32 || opts.grid.m > 128 {
        return Err(Error::validation("truncation limited to k1_max <= 32 and m <= 128"));
    }
    let fwd = CtsSolver::new(opts.grid, flow.clone(), nu, convention)?;
    let bwd = CtsSolver::new(opts.grid, flow.reversed(), nu, convention)?;
    let mut maps = Maps {
        fwd: &fwd,
        bwd: &bwd,
        dt: opts.dt,
        opts,
        evaluations: 0,
    };
    // powers P^{2^j} until the norm drops below 1/e
    let mut pow = vec![maps.step(maps.dt)];
    loop {
        let (f, b) = pow.last().unwrap();
        if maps.norm(f, b)? < INV_E {
            break;
        }
        if pow.len() > 40 {
            return Err(Error::Numerical("solution map does not decay below 1/e".into()));
        }
        let next = (mul(f, f), mul(b, b));
        pow.push(next);
    }
    // binary lifting: largest n with ‖Pⁿ‖ ≥ 1/e
    let m = opts.grid.m;
    let eye: Blocks = fwd.bands().iter().map(|_| DMatrix::identity(m, m)).collect();
    let (mut af, mut ab) = (eye.clone(), eye);
    let mut n = 0usize;
    for j in (0..pow.len() - 1).rev() {
        let cf = mul(&pow[j].0, &af);
        let cb = mul(&ab, &pow[j].1);
        if maps.norm(&cf, &cb)? >= INV_E {
            af = cf;
            ab = cb;
            n += 1 << j;
        }
    }
    // ‖Pⁿ‖ ≥ 1/e > ‖P^{n+1}‖: bisect on a final partial step
    let (mut lo, mut hi) = (0.0, maps.dt);
    let mut norm_hi = {
        let (f, b) = maps.step(maps.dt);
        let (cf, cb) = (mul(&f, &af), mul(&ab, &b));
        maps.norm(&cf, &cb)?
    };
    while hi - lo > opts.rel_tol * (n as f64 * maps.dt + hi) {
        let mid = 0.5 * (lo + hi);
        let (f, b) = maps.step(mid);
        let v = maps.norm(&mul(&f, &af), &mul(&ab, &b))?;
        if v < INV_E {
            hi = mid;
            norm_hi = v;
        } else {
            lo = mid;
        }
    }
    Ok(CtsTau {
        nu,
        tau_d: n as f64 * maps.dt + hi,
        norm_at: norm_hi,
        steps: n + 1,
        norm_evaluations: maps.evaluations,
    })
}

/// Largest singular value of S_t from dense per-band SVDs.
pub fn solution_norm_dense(
    flow: &ShearFlow,
    nu: f64,
    t: f64,
    convention: SpectralConvention,
    opts: &CtsOptions,
) -> Result<f64> {
    let s = CtsSolver::new(opts.grid, flow.clone(), nu, convention)?;
    let (n, h) = crate::shear::solver::split_time(t, opts.dt);
    let mut best = 0.0f64;
    for &k in s.bands() {
        let p = s.step_matrix(k, h);
        let mut a = DMatrix::<Complex64>::identity(opts.grid.m, opts.grid.m);
        for _ in 0..n {
            a = &p * a;
        }
        best = best.max(a.singular_values().max());
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransportGap {
    pub gap_sq: f64,
    pub bound: f64,
    pub holds: bool,
}

/// ‖θ(t) − φ(t)‖² against (ν/(2‖∇u‖)) e^{2‖∇u‖t} ‖θ₀‖₁², where φ is the
/// inviscid transport of θ₀.
pub fn transport_gap_cts(
    initial: &CtsState,
    flow: &ShearFlow,
    nu: f64,
    t: f64,
    dt: f64,
    convention: SpectralConvention,
) -> Result<TransportGap> {
    if !(t >= 0.0) || !(dt > 0.0) {
        return Err(Error::validation("need t >= 0 and dt > 0"));
    }
    let solver = CtsSolver::new(initial.grid, flow.clone(), nu, convention)?;
    let inviscid = CtsSolver::new(initial.grid, flow.clone(), 0.0, convention)?;
    let mut theta = initial.clone();
    solver.evolve(&mut theta, t, dt);
    let mut phi = initial.clone();
    inviscid.evolve(&mut phi, t, t.max(1e-300));
    let mut diff = theta.clone();
    for (d, p) in diff.data.iter_mut().zip(&phi.data) {
        *d -= p;
    }
    let gap_sq = diff.energy();
    let g = flow.grad_norm;
    let h1 = solver.h1_sq(initial);
    let bound = if g > 0.0 {
        nu / (2.0 * g) * (2.0 * g * t).exp() * h1
    } else {
        f64::INFINITY
    };
    Ok(TransportGap {
        gap_sq,
        bound,
        // rounding in the repeated phase products
        holds: gap_sq <= bound + 1e-20 * initial.energy(),
    })
}

/// |∫₀¹ e^{−2πik₁v(y)t} dy| = |⟨θ₀∘φ_t, θ₀⟩| for θ₀ = e^{2πik₁x}.
pub fn shear_correlation(flow: &ShearFlow, k1: i64, t: f64) -> f64 {
    let need = (16.0 * (k1.unsigned_abs() as f64) * t.abs() * flow.grad_norm.max(1.0)).ceil() as usize;
    let n = need.max(4096).next_power_of_two();
    let s: Complex64 = (0..n)
        .map(|j| Complex64::from_polar(1.0, -2.0 * PI * k1 as f64 * flow.eval(j as f64 / n as f64) * t))
        .sum();
    s.norm() / n as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct ShearEnvelope {
    /// (t, sup_{t′ ≥ t} |correlation|) over the sampled times.
    pub points: Vec<(f64, f64)>,
    /// −slope of ln envelope against ln t.
    pub exponent: f64,
}

pub fn shear_mixing_envelope(flow: &ShearFlow, times: &[f64]) -> Result<ShearEnvelope> {
    if times.len() < 3 || times.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::validation("need at least three positive times"));
    }
    let vals: Vec<f64> = times.iter().map(|&t| shear_correlation(flow, 1, t)).collect();
    let mut env = vals.clone();
    for i in (0..env.len() - 1).rev() {
        env[i] = env[i].max(env[i + 1]);
    }
    let x: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = env.iter().map(|v| v.ln()).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(ShearEnvelope {
        points: times.iter().copied().zip(env).collect(),
        exponent: -fit.slope,
    })
}
