//! CSV and text output.
//!
//! Every floating-point value is written with 17 significant digits
//! (scientific notation), which is enough for exact binary64 round-trips —
//! downstream tooling and regression tests can reparse outputs bitwise.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{ConvergenceReport, DiagnosticsRecord};
use crate::error::Result;
use crate::grid::Field;

/// 17-significant-digit scientific formatting; round-trips any finite f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Snapshot CSV: one line per grid row (j ascending), values comma-separated
/// with i ascending.
pub fn write_field_csv(path: &Path, field: &Field) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for j in 0..field.ny {
        let row = &field.values[j * field.nx..(j + 1) * field.nx];
        let mut line = String::with_capacity(row.len() * 24);
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&fmt_f64(*v));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Snapshot filename for a field at a step: `{field}_{stepindex}.csv`.
pub fn snapshot_name(field: &str, step: u64) -> String {
    format!("{field}_{step}.csv")
}

pub const DIAGNOSTICS_HEADER: &str = "step,t,energy,mass_c,min_phi,max_phi,min_c,max_c";

pub fn write_diagnostics_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{DIAGNOSTICS_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.step,
            fmt_f64(r.t),
            fmt_f64(r.energy),
            fmt_f64(r.mass_c),
            fmt_f64(r.min_phi),
            fmt_f64(r.max_phi),
            fmt_f64(r.min_c),
            fmt_f64(r.max_c)
        )?;
    }
    w.flush()?;
    Ok(())
}

pub const REPORT_HEADER: &str = "h,delta,m,rel_l2_error_percent,wall_time_s";

/// Convergence-study report CSV: one row per mesh, plus a trailing comment
/// carrying the fitted slope when one exists (two or more rows).
pub fn write_report_csv(path: &Path, report: &ConvergenceReport) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{REPORT_HEADER}")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(r.h),
            fmt_f64(r.delta),
            r.m,
            fmt_f64(r.rel_l2_error_percent),
            fmt_f64(r.wall_time_s)
        )?;
    }
    if let Some(slope) = report.fitted_slope {
        writeln!(w, "# fitted_slope={}", fmt_f64(slope))?;
    }
    w.flush()?;
    Ok(())
}

/// Single-line error log (`error.log` in the output directory).
pub fn write_error_log(dir: &Path, message: &str) -> Result<()> {
    let mut w = BufWriter::new(File::create(dir.join("error.log"))?);
    writeln!(w, "{message}")?;
    w.flush()?;
    Ok(())
}
