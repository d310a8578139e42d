//! Per-dimension reports.
//!
//! `fit` stores the full reports (traces included) as TOML; the plot-ready
//! CSV has one row per dimension with columns
//! `k,best_val_error,switch_iteration,iterations` (empty switch cell when
//! the loop never switched).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::DimensionReport;

use super::dataset::write_text;
use super::fmt_f64;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportFile {
    selected_k: usize,
    reports: Vec<DimensionReport>,
}

pub fn save_reports(reports: &[DimensionReport], selected_k: usize, path: impl AsRef<Path>) -> Result<()> {
    let file = ReportFile {
        selected_k,
        reports: reports.to_vec(),
    };
    let text = toml::to_string(&file).map_err(|e| Error::invalid(format!("cannot serialize reports: {e}")))?;
    write_text(path.as_ref(), &text)
}

/// Returns the reports and the selected dimension.
pub fn load_reports(path: impl AsRef<Path>) -> Result<(Vec<DimensionReport>, usize)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ReportFile = toml::from_str(&text).map_err(|e| Error::Parse {
        row: e.span().map_or(0, |s| text[..s.start].lines().count()),
        column: 0,
        message: e.message().to_owned(),
    })?;
    Ok((file.reports, file.selected_k))
}

pub fn save_report_csv(reports: &[DimensionReport], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("k,best_val_error,switch_iteration,iterations\n");
    for r in reports {
        let switch = r.switch_iteration.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", r.k, fmt_f64(r.best_val_error), switch, r.iterations));
    }
    write_text(path.as_ref(), &out)
}

/// Long-format gbest traces: `k,iteration,phase,gbest_loss`.
pub fn save_trace_csv(reports: &[DimensionReport], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("k,iteration,phase,gbest_loss\n");
    for r in reports {
        for (i, (loss, phase)) in r.trace.iter().zip(&r.phases).enumerate() {
            out.push_str(&format!("{},{},{},{}\n", r.k, i, phase.name(), fmt_f64(*loss)));
        }
    }
    write_text(path.as_ref(), &out)
}
