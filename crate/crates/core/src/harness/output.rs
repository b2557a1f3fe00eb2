use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::fit::ScalingFit;
use super::sweep::{critical_abscissa, EnvelopeRow, SweepTable};
use crate::error::{Error, Result};

/// Fixed-width scientific notation; missing values print as `nan`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.10e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    num(x.unwrap_or(f64::NAN))
}

/// Comma-separated table with a header line; every line ends in a newline.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    text: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self {
            text,
            width: header.len(),
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        debug_assert_eq!(cells.len(), self.width);
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            self.text.push_str(c.as_ref());
        }
        self.text.push('\n');
    }

    /// Row of numbers.
    pub fn nums(&mut self, xs: &[f64]) {
        let cells: Vec<String> = xs.iter().map(|&x| num(x)).collect();
        self.row(&cells);
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(name);
        fs::write(&path, &self.text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Two whitespace-separated columns, no header.
pub fn plot_data(points: &[(f64, f64)]) -> String {
    let mut s = String::new();
    for (x, y) in points {
        let _ = writeln!(s, "{} {}", num(*x), num(*y));
    }
    s
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub const SWEEP_HEADER: [&str; 8] = [
    "eps", "T_est", "converged", "sensitivity", "h_finest", "horizon", "flagged", "error",
];

pub const FIT_HEADER: [&str; 9] = [
    "slope",
    "stderr",
    "theory_slope",
    "rel_err",
    "verdict",
    "r_squared",
    "points_used",
    "model",
    "source",
];

pub fn sweep_csv(table: Option<&SweepTable>) -> Csv {
    let mut csv = Csv::new(&SWEEP_HEADER);
    for r in table.map_or(&[][..], |t| &t.rows) {
        let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        csv.row(&[
            num(r.eps),
            opt(r.t_est),
            r.converged.to_string(),
            opt(r.sensitivity),
            num(r.h_finest),
            num(r.horizon),
            r.flagged.to_string(),
            err,
        ]);
    }
    csv
}

/// `model` is subcritical or critical; `source` names the data generator.
pub fn fit_csv(fit: Option<&ScalingFit>, model: &str, source: &str) -> Csv {
    let mut csv = Csv::new(&FIT_HEADER);
    if let Some(f) = fit {
        csv.row(&[
            num(f.slope),
            num(f.stderr_slope),
            num(f.theory_slope),
            num(f.rel_err),
            if f.pass { "pass" } else { "fail" }.to_string(),
            num(f.r_squared),
            f.points_used.to_string(),
            model.to_string(),
            source.to_string(),
        ]);
    }
    csv
}

/// Writes sweep.csv, fit.csv and plot_subcritical.dat.
pub fn emit_sweep(dir: &Path, table: Option<&SweepTable>, fit: Option<&ScalingFit>) -> Result<Vec<PathBuf>> {
    let points: Vec<(f64, f64)> = table
        .map(|t| t.usable().map(|r| (-r.eps.ln(), r.t_est.unwrap().ln())).collect())
        .unwrap_or_default();
    Ok(vec![
        sweep_csv(table).write(dir, "sweep.csv")?,
        fit_csv(fit, "subcritical", "pde-solver").write(dir, "fit.csv")?,
        write_text(dir, "plot_subcritical.dat", &plot_data(&points))?,
    ])
}

/// Writes envelope_sweep.csv, fit.csv and plot_critical.dat.
pub fn emit_envelope_sweep(
    dir: &Path,
    rows: &[EnvelopeRow],
    p: f64,
    fit: Option<&ScalingFit>,
) -> Result<Vec<PathBuf>> {
    let mut csv = Csv::new(&["eps", "eps_pow", "log_T", "sweeps_used"]);
    let mut points = Vec::new();
    for r in rows {
        let x = critical_abscissa(r.eps, p);
        csv.row(&[num(r.eps), num(x), opt(r.log_t), r.sweeps_used.to_string()]);
        if let Some(l) = r.log_t {
            points.push((x, l));
        }
    }
    Ok(vec![
        csv.write(dir, "envelope_sweep.csv")?,
        fit_csv(fit, "critical", "volterra-envelope").write(dir, "fit.csv")?,
        write_text(dir, "plot_critical.dat", &plot_data(&points))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::sweep::SweepRow;

    #[test]
    fn empty_results_give_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        emit_sweep(dir.path(), None, None).unwrap();
        let s = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(s, format!("{}\n", SWEEP_HEADER.join(",")));
        let f = fs::read_to_string(dir.path().join("fit.csv")).unwrap();
        assert_eq!(f.lines().count(), 1);
        assert!(fs::read_to_string(dir.path().join("plot_subcritical.dat")).unwrap().is_empty());
    }

    #[test]
    fn four_rows_and_one_fit_line() {
        let rows = (0..4)
            .map(|k| {
                let eps = 0.4 / 2f64.powi(k);
                SweepRow {
                    eps,
                    t_est: Some(7.0 / (eps * eps)),
                    converged: true,
                    sensitivity: Some(0.01),
                    h_finest: 0.1,
                    horizon: 100.0,
                    flagged: false,
                    error: None,
                }
            })
            .collect();
        let table = SweepTable { n: 3, p: 2.0, rows };
        let fit = table.fit(0.2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit_sweep(dir.path(), Some(&table), Some(&fit)).unwrap();
        let first = fs::read(dir.path().join("sweep.csv")).unwrap();
        let s = String::from_utf8(first.clone()).unwrap();
        assert_eq!(s.lines().count(), 5);
        assert!(s.ends_with('\n'));
        let f = fs::read_to_string(dir.path().join("fit.csv")).unwrap();
        assert_eq!(f.lines().count(), 2);
        assert!(f.lines().nth(1).unwrap().contains(",pass,"));
        emit_sweep(dir.path(), Some(&table), Some(&fit)).unwrap();
        assert_eq!(first, fs::read(dir.path().join("sweep.csv")).unwrap());
    }

    #[test]
    fn unwritable_path_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain");
        fs::write(&file, "x").unwrap();
        let err = emit_sweep(&file, None, None).unwrap_err().to_string();
        assert!(err.contains("plain"), "{err}");
    }
}
