//! Report serialization: JSON array, CSV summary and plot-data files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::verify::VerificationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    /// One two-column file per named series, written into a directory.
    Plotdata,
}

pub fn render_json(reports: &[VerificationReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

/// `check_id,pass,margin,runtime` with LF line endings.
pub fn render_csv(reports: &[VerificationReport]) -> String {
    let mut s = String::from("check_id,pass,margin,runtime\n");
    for r in reports {
        let _ = writeln!(s, "{},{},{:e},{}", r.check_id, r.pass, r.margin, r.runtime);
    }
    s
}

/// `(file name, contents)` for every named series, in report order.
pub fn render_plotdata(reports: &[VerificationReport]) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for r in reports {
        for (name, points) in &r.series {
            let mut body = String::new();
            for [x, y] in points {
                let _ = writeln!(body, "{x:e} {y:e}");
            }
            files.push((format!("{}__{}.dat", r.check_id, sanitize(name)), body));
        }
    }
    files
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes `reports` to `path` (a directory for plot data). Returns the files written.
pub fn emit_report(
    reports: &[VerificationReport],
    format: ReportFormat,
    path: &Path,
) -> Result<Vec<PathBuf>> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument("no reports to emit".into()));
    }
    let io = |p: &Path, e: std::io::Error| Error::Io(format!("{}: {e}", p.display()));
    match format {
        ReportFormat::Json => {
            fs::write(path, render_json(reports)).map_err(|e| io(path, e))?;
            Ok(vec![path.to_path_buf()])
        }
        ReportFormat::Csv => {
            fs::write(path, render_csv(reports)).map_err(|e| io(path, e))?;
            Ok(vec![path.to_path_buf()])
        }
        ReportFormat::Plotdata => {
            fs::create_dir_all(path).map_err(|e| io(path, e))?;
            let mut written = Vec::new();
            for (name, body) in render_plotdata(reports) {
                let file = path.join(name);
                fs::write(&file, body).map_err(|e| io(&file, e))?;
                written.push(file);
            }
            Ok(written)
        }
    }
}

pub fn read_reports(path: &Path) -> Result<Vec<VerificationReport>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("{}: not a report array: {e}", path.display())))
}
