//! Float formatting, CSV tables and ν grids.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Version tag written on the first line of every CSV file.
pub const CSV_VERSION: &str = "v1";

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// A CSV table whose first line is `# disslab <kind> v1`.
#[derive(Clone, Debug)]
pub struct CsvTable {
    kind: String,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(kind: &str, columns: &[&str]) -> Self {
        CsvTable {
            kind: kind.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# disslab {} {}", self.kind, CSV_VERSION);
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

/// `lo:hi:n`, n log-spaced points from lo to hi inclusive, ascending.
pub fn parse_nu_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::validation(format!("nu grid '{s}' is not lo:hi:points")));
    }
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| Error::validation(format!("bad number '{x}' in nu grid")))
    };
    let (lo, hi) = (num(parts[0])?, num(parts[1])?);
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::validation(format!("bad point count '{}' in nu grid", parts[2])))?;
    if n == 0 {
        return Err(Error::validation("nu grid is empty"));
    }
    if !(lo > 0.0 && hi.is_finite() && lo <= hi) {
        return Err(Error::validation(format!("nu grid needs 0 < lo <= hi, got {lo}:{hi}")));
    }
    if n == 1 {
        if lo != hi {
            return Err(Error::validation("a one-point nu grid needs lo = hi"));
        }
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)
            }
        })
        .collect())
}
