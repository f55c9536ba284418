use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::output::{fmt_float, parse_nu_grid, CsvTable};
use super::{BoundsArgs, CtsArgs, DissipationArgs, MixingArgs, SimulateArgs, SweepArgs};
use crate::algebra::ToralAutomorphism;
use crate::battery::unit_mode;
use crate::bounds::{weyl_constant, BoundProfile, Which};
use crate::convention::{Scaling, SpectralConvention};
use crate::dissipation::{linear_fit, tau_d_exact, tau_d_operator, trivial_bound, OrbitSumTable};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::mixing::{strong_envelope, weak_sup, MixingMode, RateFunction, DEFAULT_EPS};
use crate::power::PowerOptions;
use crate::pulsed::{evolve, PulsedSystem, TruncatedOperator};
use crate::shear::{tau_d_cts, CtsOptions, ShearFlow};

pub(super) const DEFAULT_SEED: u64 = 0x5eed;

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::validation(format!("--{flag} is required")))
}

fn convention(s: &Option<String>, default: Scaling, dim: usize) -> Result<SpectralConvention> {
    let scaling = match s {
        Some(s) => Scaling::from_str(s)?,
        None => default,
    };
    SpectralConvention::new(dim, scaling)
}

fn announce(path: &Path, rows: usize) {
    println!("wrote {} ({rows} rows)", path.display());
}

fn initial_field(arg: &str, conv: SpectralConvention, seed: u64) -> Result<SpectralField> {
    let ints = |rest: &str| -> Result<Vec<i64>> {
        rest.split(',')
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::validation(format!("bad integer '{x}' in --initial")))
            })
            .collect()
    };
    if let Some(rest) = arg.strip_prefix("mode:") {
        let k = ints(rest)?;
        if k.len() != conv.dimension {
            return Err(Error::validation(format!(
                "initial mode has {} entries, the map has dimension {}",
                k.len(),
                conv.dimension
            )));
        }
        return unit_mode(conv, &k);
    }
    if let Some(rest) = arg.strip_prefix("random:") {
        return match ints(rest)?.as_slice() {
            [m, r] if *m > 0 && *r > 0 => {
                SpectralField::random(conv, *m as usize, *r, false, &mut ChaCha8Rng::seed_from_u64(seed))
            }
            _ => Err(Error::validation("use random:modes,radius with positive entries")),
        };
    }
    let f = SpectralField::read_json(Path::new(arg))?;
    if f.convention() != conv {
        return Err(Error::validation(format!(
            "field file uses {:?} in dimension {}; the run uses {:?} in dimension {}",
            f.convention().scaling,
            f.dimension(),
            conv.scaling,
            conv.dimension
        )));
    }
    Ok(f)
}

pub(super) fn simulate(a: &SimulateArgs) -> Result<()> {
    let t = ToralAutomorphism::parse(&need(&a.matrix, "matrix")?)?;
    let conv = convention(&a.convention, Scaling::Lattice, t.dim())?;
    let nu = need(&a.nu, "nu")?;
    let steps = need(&a.steps, "steps")?;
    let default_initial = format!("mode:1{}", ",0".repeat(t.dim() - 1));
    let theta0 = initial_field(a.initial.as_deref().unwrap_or(&default_initial), conv, a.seed.unwrap_or(DEFAULT_SEED))?;
    let sys = PulsedSystem::automorphism(t, nu, conv)?;
    let traj = evolve(&theta0, &sys, steps)?;
    let mut table = CsvTable::new("trajectory", &["n", "energy", "h1", "e_nu", "ln_energy"]);
    for m in 0..=traj.steps() {
        table.push(vec![
            m.to_string(),
            fmt_float(traj.energy(m)),
            fmt_float(traj.h1(m)),
            fmt_float(traj.e_nu(m)),
            fmt_float(traj.log_energy[m]),
        ]);
    }
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from("trajectory.csv"));
    table.write(&out)?;
    announce(&out, table.len());
    Ok(())
}

#[derive(Serialize)]
struct ReportRow {
    nu: f64,
    tau_d: usize,
    ln_inv_nu: f64,
}

#[derive(Serialize)]
struct ReportFit {
    /// τ_d against ln(1/ν).
    slope: f64,
    intercept: f64,
    r2: f64,
}

#[derive(Serialize)]
struct Report {
    format: &'static str,
    matrix: Vec<i64>,
    method: String,
    convention: SpectralConvention,
    samples: Vec<ReportRow>,
    fit: Option<ReportFit>,
}

fn power_options(seed: u64) -> PowerOptions {
    PowerOptions {
        seed,
        ..Default::default()
    }
}

fn tau_operator(t: &ToralAutomorphism, nu: f64, conv: SpectralConvention, seed: u64) -> Result<usize> {
    let op = TruncatedOperator::from_automorphism(t, conv, TruncatedOperator::provable_radius(t, conv, nu))?;
    Ok(tau_d_operator(&op, nu, &power_options(seed))?.tau_d)
}

fn check_method(m: &str) -> Result<()> {
    match m {
        "exact" | "operator" => Ok(()),
        _ => Err(Error::validation(format!("unknown method '{m}'; use exact or operator"))),
    }
}

pub(super) fn dissipation_time(a: &DissipationArgs) -> Result<()> {
    let t = ToralAutomorphism::parse(&need(&a.matrix, "matrix")?)?;
    let conv = convention(&a.convention, Scaling::Lattice, t.dim())?;
    let nus = parse_nu_grid(&need(&a.nu_grid, "nu-grid")?)?;
    let method = a.method.clone().unwrap_or_else(|| "exact".into());
    check_method(&method)?;
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from("report.json"));
    let mirror = out.with_extension("csv");
    if mirror == out {
        return Err(Error::validation("--out names the report JSON; the CSV mirror is written beside it"));
    }

    let mut rows = Vec::with_capacity(nus.len());
    let mut table = (method == "exact").then(|| OrbitSumTable::new(&t, conv)).transpose()?;
    for &nu in &nus {
        let tau = match table.as_mut() {
            Some(tab) => tab.tau_d(nu)?,
            None => tau_operator(&t, nu, conv, seed)?,
        };
        rows.push(ReportRow {
            nu,
            tau_d: tau,
            ln_inv_nu: -nu.ln(),
        });
    }
    let fit = if rows.len() >= 2 {
        let x: Vec<f64> = rows.iter().map(|r| r.ln_inv_nu).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.tau_d as f64).collect();
        let f = linear_fit(&x, &y)?;
        Some(ReportFit {
            slope: f.slope,
            intercept: f.intercept,
            r2: f.r2,
        })
    } else {
        None
    };

    let mut csv = CsvTable::new("dissipation-time", &["nu", "tau_d", "ln_inv_nu"]);
    for r in &rows {
        csv.push(vec![fmt_float(r.nu), r.tau_d.to_string(), fmt_float(r.ln_inv_nu)]);
    }
    if let Some(f) = &fit {
        println!("tau_d = {} + {} ln(1/nu), r2 {}", fmt_float(f.intercept), fmt_float(f.slope), fmt_float(f.r2));
    }
    let report = Report {
        format: "disslab-report v1",
        matrix: t.matrix().row_major().to_vec(),
        method,
        convention: conv,
        samples: rows,
        fit,
    };
    std::fs::write(&out, serde_json::to_string_pretty(&report)? + "\n")?;
    announce(&out, report.samples.len());
    csv.write(&mirror)?;
    announce(&mirror, csv.len());
    Ok(())
}

pub(super) fn mixing_rate(a: &MixingArgs) -> Result<()> {
    let t = ToralAutomorphism::parse(&need(&a.matrix, "matrix")?)?;
    let conv = convention(&a.convention, Scaling::Lattice, t.dim())?;
    let alpha = a.alpha.unwrap_or(1.0);
    let beta = a.beta.unwrap_or(1.0);
    let n_max = a.n_max.unwrap_or(12);
    let mode = MixingMode::from_str(a.mode.as_deref().unwrap_or("strong"))?;
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from("envelope.csv"));
    let mut table = CsvTable::new("envelope", &["n", "value", "tail_cert"]);
    match mode {
        MixingMode::Strong => {
            let env = strong_envelope(&t, alpha, beta, n_max, a.eps.unwrap_or(DEFAULT_EPS), conv)?;
            for p in &env.points {
                table.push(vec![p.n.to_string(), fmt_float(p.value), fmt_float(p.tail_cert)]);
            }
            match &env.fitted {
                Some(r) => println!("fitted rate {}", r.describe()),
                None => println!("no rate fitted; the envelope has too few decreasing points"),
            }
        }
        MixingMode::Weak => {
            if n_max < 1 {
                return Err(Error::validation("--n-max must be at least 1 in weak mode"));
            }
            let r0 = a.radius.unwrap_or(2.0);
            let seed = a.seed.unwrap_or(DEFAULT_SEED);
            let d = t.dim() as f64;
            let mut n = 1usize;
            let mut xy = Vec::new();
            while n <= n_max {
                let radius = (r0 * (n as f64).powf(1.0 / d)).max(1.0);
                let p = weak_sup(&t, alpha, beta, n, radius, conv, seed ^ n as u64)?;
                // a lower bound from a finite mode ball; nothing certifies the tail
                table.push(vec![n.to_string(), fmt_float(p.value), fmt_float(f64::NAN)]);
                xy.push(((n as f64).ln(), p.value.ln()));
                n *= 2;
            }
            if xy.len() >= 2 {
                let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
                println!("weak sup decays like n^(-{})", fmt_float(-linear_fit(&x, &y)?.slope));
            }
        }
    }
    table.write(&out)?;
    announce(&out, table.len());
    Ok(())
}

pub(super) fn bounds(a: &BoundsArgs) -> Result<()> {
    let which = Which::from_str(&need(&a.which, "which")?)?;
    let dim = a.dim.unwrap_or(2);
    let conv = convention(&a.convention, Scaling::Lattice, dim)?;
    let mode = MixingMode::from_str(a.mode.as_deref().unwrap_or("strong"))?;
    let rate = RateFunction::parse(&need(&a.rate, "rate")?, a.alpha.unwrap_or(1.0), a.beta.unwrap_or(1.0), mode)?;
    let vol = a.vol.unwrap_or(1.0);
    let eps = a.eps.unwrap_or(0.1);
    if !(vol > 0.0 && eps >= 0.0) {
        return Err(Error::validation("--vol must be positive and --eps nonnegative"));
    }
    let weyl = weyl_constant(dim, vol, eps, conv.scaling);
    let profile = BoundProfile::new(which, rate, conv, a.grad_u, Some(weyl))?;
    let nus = parse_nu_grid(&need(&a.nu_grid, "nu-grid")?)?;
    let mut table = CsvTable::new("bounds", &["nu", "H", "bound", "degenerate"]);
    for v in profile.eval_grid(&nus)? {
        table.push(vec![
            fmt_float(v.nu),
            fmt_float(v.h),
            fmt_float(v.bound),
            (v.degenerate as u8).to_string(),
        ]);
    }
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from("bounds.csv"));
    table.write(&out)?;
    announce(&out, table.len());
    Ok(())
}

fn cts_options(k1max: Option<usize>, ygrid: Option<usize>, dt: Option<f64>, seed: Option<u64>) -> Result<CtsOptions> {
    let mut o = CtsOptions::new(k1max.unwrap_or(16), ygrid.unwrap_or(64), dt.unwrap_or(0.01))?;
    o.seed = seed.unwrap_or(DEFAULT_SEED);
    Ok(o)
}

pub(super) fn cts(a: &CtsArgs) -> Result<()> {
    let flow = ShearFlow::parse(a.shear.as_deref().unwrap_or("sin"))?;
    let conv = convention(&a.convention, Scaling::Geometric, 2)?;
    let nus = parse_nu_grid(&need(&a.nu_grid, "nu-grid")?)?;
    let opts = cts_options(a.k1max, a.ygrid, a.dt, a.seed)?;
    let mut table = CsvTable::new("cts", &["nu", "tau_d", "nu_tau_d"]);
    for &nu in &nus {
        let r = tau_d_cts(&flow, nu, conv, &opts)?;
        table.push(vec![fmt_float(nu), fmt_float(r.tau_d), fmt_float(nu * r.tau_d)]);
    }
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from("cts.csv"));
    table.write(&out)?;
    announce(&out, table.len());
    Ok(())
}

enum System {
    Map(String, ToralAutomorphism),
    Shear(String, ShearFlow),
}

pub(super) fn sweep(a: &SweepArgs, jobs: usize) -> Result<()> {
    let target = a.target.as_deref().unwrap_or("dissipation");
    let nus = parse_nu_grid(&need(&a.nu_grid, "nu-grid")?)?;
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let method = a.method.clone().unwrap_or_else(|| "exact".into());
    check_method(&method)?;
    let systems: Vec<System> = match target {
        "dissipation" => {
            if a.matrix.is_empty() {
                return Err(Error::validation("sweep over dissipation needs at least one --matrix"));
            }
            a.matrix
                .iter()
                .map(|m| Ok(System::Map(m.replace(',', " "), ToralAutomorphism::parse(m)?)))
                .collect::<Result<_>>()?
        }
        "cts" => {
            let shears = if a.shear.is_empty() { vec!["sin".to_string()] } else { a.shear.clone() };
            shears
                .iter()
                .map(|s| Ok(System::Shear(s.replace(',', " "), ShearFlow::parse(s)?)))
                .collect::<Result<_>>()?
        }
        _ => return Err(Error::validation(format!("unknown sweep target '{target}'; use dissipation or cts"))),
    };
    let opts = cts_options(a.k1max, a.ygrid, a.dt, a.seed)?;
    let convs: Vec<SpectralConvention> = systems
        .iter()
        .map(|s| match s {
            System::Map(_, t) => convention(&a.convention, Scaling::Lattice, t.dim()),
            System::Shear(..) => convention(&a.convention, Scaling::Geometric, 2),
        })
        .collect::<Result<_>>()?;
    let cells: Vec<(usize, f64)> = (0..systems.len()).flat_map(|i| nus.iter().map(move |&nu| (i, nu))).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Numerical(format!("worker pool: {e}")))?;
    // indexed parallel collect keeps grid order, so output does not depend on --jobs
    let taus: Vec<f64> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(i, nu)| match &systems[i] {
                System::Map(_, t) => match method.as_str() {
                    "exact" => tau_d_exact(t, nu, convs[i]).map(|v| v as f64),
                    _ => tau_operator(t, nu, convs[i], seed).map(|v| v as f64),
                },
                System::Shear(_, f) => tau_d_cts(f, nu, convs[i], &opts).map(|r| r.tau_d),
            })
            .collect::<Result<Vec<f64>>>()
    })?;

    let mut table = CsvTable::new("sweep", &["system", "nu", "tau_d", "nu_tau_d", "trivial_bound"]);
    for (&(i, nu), tau) in cells.iter().zip(&taus) {
        let label = match &systems[i] {
            System::Map(l, _) | System::Shear(l, _) => l.clone(),
        };
        let trivial = match systems[i] {
            System::Map(..) => trivial_bound(nu, convs[i]) as f64,
            System::Shear(..) => 1.0 / (nu * convs[i].lambda1()),
        };
        table.push(vec![label, fmt_float(nu), fmt_float(*tau), fmt_float(nu * tau), fmt_float(trivial)]);
    }
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from("sweep.csv"));
    table.write(&out)?;
    announce(&out, table.len());
    Ok(())
}
