use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use super::commands::DEFAULT_SEED;
use super::output::fmt_float;
use super::VerifyArgs;
use crate::algebra::{sl2_kronecker_scan, verify_norm_form, IntMatrix, ToralAutomorphism};
use crate::battery::{pulsed_battery, unit_mode, BatteryOptions};
use crate::bounds::{check_bound, BoundProfile, TauSample, Which};
use crate::convention::SpectralConvention;
use crate::dissipation::{fit_energy_decay_window, tau_d_exact};
use crate::error::{Error, Result};
use crate::mixing::{strong_envelope, DEFAULT_EPS};
use crate::pulsed::{evolve, PulsedSystem};
use crate::shear::{energy_defect, tau_d_cts, transport_gap_cts, CtsGrid, CtsOptions, CtsSolver, CtsState, ShearFlow};

struct Row {
    check: &'static str,
    pass: bool,
    detail: String,
}

fn row(check: &'static str, pass: bool, detail: String) -> Row {
    Row { check, pass, detail }
}

pub(super) fn verify(a: &VerifyArgs) -> Result<i32> {
    let suite = a
        .suite
        .as_deref()
        .ok_or_else(|| Error::validation("name a suite: identities, lemmas, bounds, decay or cts"))?;
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let rows = match suite {
        "identities" => identities(seed)?,
        "lemmas" => lemmas()?,
        "bounds" => bounds(a.report.as_deref())?,
        "decay" => decay(seed)?,
        "cts" => cts(seed)?,
        _ => return Err(Error::validation(format!("unknown suite '{suite}'"))),
    };
    let width = rows.iter().map(|r| r.check.chars().count()).max().unwrap_or(0);
    for r in &rows {
        let pad = width - r.check.chars().count();
        println!("{}{}  {}  {}", r.check, " ".repeat(pad), if r.pass { "PASS" } else { "FAIL" }, r.detail);
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    println!("{suite}: {} passed, {failed} failed", rows.len() - failed);
    Ok(if failed == 0 { 0 } else { 1 })
}

fn identities(seed: u64) -> Result<Vec<Row>> {
    let opts = BatteryOptions {
        fields: 20,
        seed,
        ..Default::default()
    };
    let r = pulsed_battery(&ToralAutomorphism::cat_map(), SpectralConvention::lattice(2), &opts)?;
    Ok(vec![
        row(
            "energy identity",
            r.energy_max_rel <= 1e-12,
            format!("max relative defect {} over {} steps", fmt_float(r.energy_max_rel), r.steps_checked),
        ),
        row(
            "H1 sandwich for the dissipation functional",
            r.sandwich_violations == 0,
            format!("{} violations, worst relative excess {}", r.sandwich_violations, fmt_float(r.sandwich_worst)),
        ),
        row(
            "inviscid gap bound",
            r.gap_violations == 0,
            format!("{} violations in {} runs", r.gap_violations, r.runs),
        ),
    ])
}

fn lemmas() -> Result<Vec<Row>> {
    let scan = sl2_kronecker_scan(3)?;
    let cat = ToralAutomorphism::cat_map();
    let nf = verify_norm_form(&cat, 200)?;
    let cond = cat.conditions()?;
    Ok(vec![
        row(
            "Kronecker: roots in the disk are roots of unity",
            scan.violations.is_empty() && scan.in_disk == scan.roots_of_unity,
            format!(
                "{} matrices in SL2(Z) with entries in [-3,3], {} with roots in the disk, {} cyclotomic",
                scan.matrices, scan.in_disk, scan.roots_of_unity
            ),
        ),
        row(
            "norm form is a nonzero integer",
            nf.integer_form_ok,
            format!("{} modes with |k| <= {}", nf.scanned, nf.radius),
        ),
        row(
            "minimal eigencoordinate product",
            (nf.min_product - 0.2).abs() < 1e-9,
            format!("{} at {:?}, expected 1/5", fmt_float(nf.min_product), nf.argmin),
        ),
        row(
            "cat map is ergodic and irreducible",
            cond.ergodic_irreducible(),
            format!("char poly {}", cond.char_poly),
        ),
    ])
}

#[derive(Deserialize)]
struct ReportFile {
    convention: SpectralConvention,
    samples: Vec<TauSample>,
    #[serde(default)]
    matrix: Option<Vec<i64>>,
}

fn bounds(report: Option<&Path>) -> Result<Vec<Row>> {
    let rep = match report {
        Some(p) => serde_json::from_str::<ReportFile>(&std::fs::read_to_string(p)?)?,
        None => {
            let conv = SpectralConvention::lattice(2);
            let t = ToralAutomorphism::cat_map();
            let samples = (0..7)
                .map(|i| {
                    let nu = 10f64.powi(-2 - i);
                    Ok(TauSample {
                        nu,
                        tau_d: tau_d_exact(&t, nu, conv)? as f64,
                    })
                })
                .collect::<Result<_>>()?;
            ReportFile {
                convention: conv,
                samples,
                matrix: None,
            }
        }
    };
    if rep.samples.is_empty() {
        return Err(Error::validation("report has no samples"));
    }
    let t = match &rep.matrix {
        Some(m) => ToralAutomorphism::new(IntMatrix::from_row_major(m)?)?,
        None => ToralAutomorphism::cat_map(),
    };
    let conv = rep.convention;

    let lambda1 = conv.lambda1();
    let heat: Vec<&TauSample> = rep
        .samples
        .iter()
        .filter(|s| s.tau_d > 1.0 / (s.nu * lambda1) + 1.0)
        .collect();
    let mut rows = vec![row(
        "trivial heat bound tau_d <= 1/(nu lambda1) + 1",
        heat.is_empty(),
        match heat.first() {
            Some(s) => format!("violated at nu {} with tau_d {}", fmt_float(s.nu), s.tau_d),
            None => format!("{} samples", rep.samples.len()),
        },
    )];

    let env = strong_envelope(&t, 1.0, 1.0, 12, DEFAULT_EPS, conv)?;
    let rate = env
        .fitted
        .ok_or_else(|| Error::Numerical("could not fit a mixing rate to the strong envelope".into()))?;
    let profile = BoundProfile::new(Which::H1, rate.clone(), conv, None, None)?;
    let report = crate::bounds::DissipationReport {
        convention: conv,
        samples: rep.samples.clone(),
    };
    let verdicts = check_bound(&report, &profile)?;
    let bad = verdicts.iter().find(|v| !v.pass);
    rows.push(row(
        "mixing-rate bound tau_d <= 34/(nu H1(nu))",
        bad.is_none(),
        match bad {
            Some(v) => format!(
                "violated at nu {}: tau_d {} > bound {}",
                fmt_float(v.nu),
                v.tau_d,
                fmt_float(v.bound)
            ),
            None => format!("rate {}", rate.describe()),
        },
    ));
    Ok(rows)
}

fn decay(seed: u64) -> Result<Vec<Row>> {
    let conv = SpectralConvention::lattice(2);
    let cat = ToralAutomorphism::cat_map();
    let gamma = (3.0 + 5f64.sqrt()) / 2.0;
    let sys = PulsedSystem::automorphism(cat.clone(), 1e-6, conv)?;
    let traj = evolve(&unit_mode(conv, &[1, 0])?, &sys, 16)?;
    let fit = fit_energy_decay_window(&traj, Some((4, 14)))?;
    let rel = (fit.gamma_hat - gamma * gamma).abs() / (gamma * gamma);
    let opts = BatteryOptions {
        fields: 10,
        seed,
        ..Default::default()
    };
    let b = pulsed_battery(&cat, conv, &opts)?;
    Ok(vec![
        row(
            "double-exponential decay of the mode (1,0)",
            rel <= 0.05,
            format!("fitted growth {} against {}", fmt_float(fit.gamma_hat), fmt_float(gamma * gamma)),
        ),
        row(
            "per-step lower-bound chain",
            b.chain_violations == 0,
            format!("{} violations in {} runs", b.chain_violations, b.runs),
        ),
    ])
}

fn cts(seed: u64) -> Result<Vec<Row>> {
    let conv = SpectralConvention::geometric(2);
    let flow = ShearFlow::sine();
    let grid = CtsGrid::new(4, 64)?;
    let mut theta = CtsState::zeros(grid);
    theta.set_band(1, |_| Complex64::new(1.0, 0.0))?;
    theta.set_band(-2, |y| Complex64::new(0.0, (2.0 * std::f64::consts::PI * y).cos()))?;
    let solver = CtsSolver::new(grid, flow.clone(), 1e-2, conv)?;
    let coarse = energy_defect(&solver, &theta, 1.0, 0.02);
    let fine = energy_defect(&solver, &theta, 1.0, 0.01);
    let ratio = coarse / fine;

    let mut gap_ok = true;
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let g = transport_gap_cts(&theta, &flow, 1e-3, t, 1e-2, conv)?;
        gap_ok &= g.holds;
        worst = worst.max(g.gap_sq / g.bound);
    }

    let mut opts = CtsOptions::new(8, 32, 0.02)?;
    opts.seed = seed;
    let mut products = Vec::new();
    for nu in [1e-2, 3e-3, 1e-3] {
        products.push(nu * tau_d_cts(&flow, nu, conv, &opts)?.tau_d);
    }
    let decreasing = products.windows(2).all(|w| w[1] < w[0]);
    Ok(vec![
        row(
            "energy identity, second order in dt",
            ratio > 3.0 && ratio < 5.0,
            format!("defect ratio {} when dt halves", fmt_float(ratio)),
        ),
        row(
            "transport gap bound",
            gap_ok,
            format!("largest gap/bound {}", fmt_float(worst)),
        ),
        row(
            "nu tau_d decreasing in nu",
            decreasing,
            products.iter().map(|p| fmt_float(*p)).collect::<Vec<_>>().join(" "),
        ),
    ])
}
