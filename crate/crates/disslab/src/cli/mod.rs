//! Command line runner behind the `disslab` binary.
//!
//! Every subcommand takes its options either as flags or from a JSON object
//! passed with `--config`; flags win when both are given. Config keys are
//! the long flag names, e.g. `{"matrix": "2,1,1,1", "nu-grid": "1e-6:1e-2:9"}`.

mod commands;
mod output;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub use output::{fmt_float, parse_nu_grid, CsvTable, CSV_VERSION};

#[derive(Debug, Parser)]
#[command(name = "disslab", version, about = "Dissipation times and mixing rates of pulsed diffusions and shear flows")]
pub struct Cli {
    /// JSON object with option values; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for `sweep`.
    #[arg(long, global = true, env = "DISSLAB_JOBS")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a field under the pulsed diffusion and write its energies.
    Simulate(SimulateArgs),
    /// Dissipation time of a toral automorphism on a ν grid.
    DissipationTime(DissipationArgs),
    /// Strong or weak mixing envelope of a toral automorphism.
    MixingRate(MixingArgs),
    /// Evaluate H1..H4 and the dissipation-time bounds on a ν grid.
    Bounds(BoundsArgs),
    /// Dissipation time of a shear flow in continuous time.
    Cts(CtsArgs),
    /// Run a named check suite and print a table of results.
    Verify(VerifyArgs),
    /// Dissipation times over several systems and a ν grid, in parallel.
    Sweep(SweepArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::DissipationTime(_) => "dissipation-time",
            Command::MixingRate(_) => "mixing-rate",
            Command::Bounds(_) => "bounds",
            Command::Cts(_) => "cts",
            Command::Verify(_) => "verify",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct SimulateArgs {
    /// Row-major integer matrix, e.g. 2,1,1,1.
    #[arg(long)]
    pub matrix: Option<String>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// field.json, `mode:k1,k2,...` or `random:modes,radius`.
    #[arg(long)]
    pub initial: Option<String>,
    /// lattice (λ = |k|²) or geometric (λ = 4π²|k|²).
    #[arg(long)]
    pub convention: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct DissipationArgs {
    #[arg(long)]
    pub matrix: Option<String>,
    /// lo:hi:points, log-spaced and inclusive.
    #[arg(long)]
    pub nu_grid: Option<String>,
    /// exact or operator.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub convention: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// report.json; a CSV mirror is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct MixingArgs {
    #[arg(long)]
    pub matrix: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// strong or weak.
    #[arg(long)]
    pub mode: Option<String>,
    /// Relative accuracy of the strong envelope scan.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Weak mode: mode-ball radius at n = 1, grown like n^(1/d).
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub convention: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct BoundsArgs {
    /// H1, H2, H3 or H4.
    #[arg(long)]
    pub which: Option<String>,
    /// power:c,p, exp:c1,c2 or file:path.
    #[arg(long)]
    pub rate: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// strong or weak rate.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub grad_u: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub vol: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub nu_grid: Option<String>,
    #[arg(long)]
    pub convention: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct CtsArgs {
    /// sin, zero or coeffs:a0,a1,b1,...
    #[arg(long)]
    pub shear: Option<String>,
    #[arg(long)]
    pub nu_grid: Option<String>,
    /// Largest |k1| kept.
    #[arg(long)]
    pub k1max: Option<usize>,
    /// Collocation points in y.
    #[arg(long)]
    pub ygrid: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub convention: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct VerifyArgs {
    /// identities, lemmas, bounds, decay or cts.
    pub suite: Option<String>,
    /// Dissipation report checked by the `bounds` suite instead of a fresh one.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct SweepArgs {
    /// dissipation or cts.
    #[arg(long)]
    pub target: Option<String>,
    /// Repeat for several matrices.
    #[arg(long)]
    pub matrix: Vec<String>,
    /// Repeat for several shear profiles.
    #[arg(long)]
    pub shear: Vec<String>,
    #[arg(long)]
    pub nu_grid: Option<String>,
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub k1max: Option<usize>,
    #[arg(long)]
    pub ygrid: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub convention: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Errors are reported on stderr.
pub fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command line. Returns 0 on success and 1 when a verify
/// suite reports a failed check.
pub fn run(cli: Cli) -> Result<i32> {
    let mut config = match &cli.config {
        Some(p) => read_config(p)?,
        None => Map::new(),
    };
    let name = cli.command.name();
    if let Some(sub) = config.remove("subcommand") {
        if sub.as_str() != Some(name) {
            return Err(Error::validation(format!("config is for subcommand {sub}, not {name}")));
        }
    }
    let config_jobs = match config.remove("jobs") {
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| Error::validation("config key jobs must be a positive integer"))? as usize,
        ),
        None => None,
    };
    let jobs = cli.jobs.or(config_jobs).unwrap_or(1);
    if jobs == 0 {
        return Err(Error::validation("--jobs must be at least 1"));
    }
    match cli.command {
        Command::Simulate(a) => commands::simulate(&merge(&a, config)?).map(|_| 0),
        Command::DissipationTime(a) => commands::dissipation_time(&merge(&a, config)?).map(|_| 0),
        Command::MixingRate(a) => commands::mixing_rate(&merge(&a, config)?).map(|_| 0),
        Command::Bounds(a) => commands::bounds(&merge(&a, config)?).map(|_| 0),
        Command::Cts(a) => commands::cts(&merge(&a, config)?).map(|_| 0),
        Command::Verify(a) => verify::verify(&merge(&a, config)?),
        Command::Sweep(a) => commands::sweep(&merge(&a, config)?, jobs).map(|_| 0),
    }
}

fn read_config(path: &std::path::Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path)?;
    match serde_json::from_str::<Value>(&text)? {
        Value::Object(m) => Ok(m),
        _ => Err(Error::validation("config file must hold a JSON object")),
    }
}

/// Overlays the flags that were given on top of the config object.
fn merge<T: Serialize + DeserializeOwned>(flags: &T, mut config: Map<String, Value>) -> Result<T> {
    // accept snake_case keys as well
    let keys: Vec<String> = config.keys().cloned().collect();
    for k in keys {
        if k.contains('_') {
            let v = config.remove(&k).expect("key listed");
            config.insert(k.replace('_', "-"), v);
        }
    }
    if let Value::Object(given) = serde_json::to_value(flags)? {
        for (k, v) in given {
            let unset = match &v {
                Value::Null => true,
                Value::Array(a) => a.is_empty(),
                _ => false,
            };
            if !unset {
                config.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(config)).map_err(|e| Error::validation(format!("config: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let flags = BoundsArgs {
            which: Some("H3".into()),
            ..Default::default()
        };
        let cfg: Map<String, Value> = serde_json::from_str(r#"{"which": "H1", "nu_grid": "1e-4:1e-2:3", "alpha": 2}"#).unwrap();
        let m = merge(&flags, cfg).unwrap();
        assert_eq!(m.which.as_deref(), Some("H3"));
        assert_eq!(m.nu_grid.as_deref(), Some("1e-4:1e-2:3"));
        assert_eq!(m.alpha, Some(2.0));
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let cfg: Map<String, Value> = serde_json::from_str(r#"{"whch": "H1"}"#).unwrap();
        let e = merge(&BoundsArgs::default(), cfg).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn repeated_flags_replace_config_lists() {
        let flags = SweepArgs {
            matrix: vec!["2,1,1,1".into()],
            ..Default::default()
        };
        let cfg: Map<String, Value> = serde_json::from_str(r#"{"matrix": ["3,1,2,1", "1,1,1,2"], "shear": ["sin"]}"#).unwrap();
        let m = merge(&flags, cfg).unwrap();
        assert_eq!(m.matrix, vec!["2,1,1,1".to_string()]);
        assert_eq!(m.shear, vec!["sin".to_string()]);
    }
}
