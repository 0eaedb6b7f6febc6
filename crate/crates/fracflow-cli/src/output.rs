use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fracflow::decay_lab::ExperimentReport;
use fracflow::transform_solver::Field;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits, '.' decimal.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

pub fn write(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    let path = dir.join(name);
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(&path, contents))
        .map_err(|source| CliError::Output { path: path.display().to_string(), source })?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, body: &T) -> CliResult<PathBuf> {
    let versioned = Versioned { schema_version: SCHEMA_VERSION, body };
    let mut text = serde_json::to_string_pretty(&versioned).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    write(dir, name, &text)
}

/// Columns x (and y in 2D), value.
pub fn field_csv(field: &Field) -> String {
    let g = &field.grid;
    let mut out = String::from(if g.d == 1 { "x,value\n" } else { "x,y,value\n" });
    for (idx, v) in field.values.iter().enumerate() {
        for c in g.point(idx) {
            let _ = write!(out, "{},", num(c));
        }
        let _ = writeln!(out, "{}", num(*v));
    }
    out
}

/// Report JSON plus one CSV per norm series; returns the written paths.
pub fn write_report(dir: &Path, stem: &str, report: &ExperimentReport) -> CliResult<Vec<PathBuf>> {
    let mut paths = vec![write_json(dir, &format!("{stem}.json"), report)?];
    for (i, series) in report.series.iter().enumerate() {
        paths.push(write(dir, &format!("{stem}_series{i}.csv"), &series.to_csv())?);
    }
    Ok(paths)
}

pub fn summary_line(stem: &str, report: &ExperimentReport) -> String {
    format!(
        "{} {stem}: fitted {:.4} predicted {:.4} tolerance {}",
        if report.pass { "PASS" } else { "FAIL" },
        report.fitted,
        report.predicted,
        report.tolerance
    )
}
