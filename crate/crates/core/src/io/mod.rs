//! File formats: dataset CSVs, model files, experiment configs and reports.

mod config;
mod dataset;
mod model;
mod report;

pub use config::{DataSource, ExperimentConfig, FeatureSection, InitChoice, KpcaSection, OutputSection, PsoSection, SolverSection};
pub use dataset::{load_csv, load_points, save_csv, save_predictions};
pub use model::{load_model, render_model, save_model, ModelFile, Provenance, FORMAT_VERSION};
pub use report::{load_reports, save_report_csv, save_reports, save_trace_csv};

/// Fixed-width scientific notation with 17 significant digits; parses back
/// to the identical `f64`.
pub(crate) fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
