//! Plain-text model files.
//!
//! ```text
//! surrogate-model
//! format_version 1
//! timestamp <unix seconds>
//! checksum <sha256 of everything after the `payload` line>
//! payload
//! <one `key value...` record per line>
//! ```
//!
//! Floats use 17 significant digits so every value reads back bit-exactly.
//! The timestamp sits outside the checksummed payload; two saves of the same
//! model differ only on that line.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::features::{BasisKind, FeatureWeights, RandomFeatureModel};
use crate::kpca::{KernelParams, KpcaModel};
use crate::pipeline::CompositeSurrogate;

use super::{fmt_f64, sha256_hex};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "surrogate-model";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    /// Hash of the experiment configuration that produced the model.
    pub config_hash: String,
    pub seed: u64,
    /// Unix seconds; `None` means "now" (or `SOURCE_DATE_EPOCH` if set).
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: CompositeSurrogate,
    pub provenance: Provenance,
}

fn now() -> u64 {
    if let Some(v) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return v;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn line_f64(out: &mut String, key: &str, values: impl IntoIterator<Item = f64>) {
    out.push_str(key);
    for v in values {
        out.push(' ');
        out.push_str(&fmt_f64(v));
    }
    out.push('\n');
}

fn payload(file: &ModelFile) -> String {
    let m = &file.model;
    let kp = &m.kpca;
    let w = &m.rfe.weights;
    let mut out = String::new();
    let _ = writeln!(out, "config_hash {}", file.provenance.config_hash);
    let _ = writeln!(out, "seed {}", file.provenance.seed);
    let _ = writeln!(out, "k_star {}", m.k_star);
    line_f64(&mut out, "validation_error", [m.validation_error]);

    let _ = writeln!(out, "kpca {} {} {} {}", kp.input_dim(), kp.training_points().len(), kp.k(), kp.requested_k());
    let _ = writeln!(out, "center {}", kp.centered());
    line_f64(&mut out, "theta", kp.params().theta().iter().copied());
    line_f64(&mut out, "eigenvalues", kp.eigenvalues().iter().copied());
    line_f64(&mut out, "grand_mean", [kp.grand_mean()]);
    line_f64(&mut out, "row_means", kp.row_means().iter().copied());
    for i in 0..kp.alphas().nrows() {
        line_f64(&mut out, "alpha", kp.alphas().row(i).iter().copied());
    }
    for p in kp.training_points() {
        line_f64(&mut out, "point", p.iter().copied());
    }

    let _ = writeln!(out, "basis {}", m.rfe.basis.name());
    let _ = writeln!(out, "features {} {} {} {}", w.dim(), w.q(), w.len(), w.seed());
    line_f64(&mut out, "sigma", [w.sigma()]);
    for (s, v) in w.supports().iter().zip(w.values()) {
        out.push_str("feature");
        for i in s {
            let _ = write!(out, " {i}");
        }
        out.push_str(" :");
        for x in v {
            out.push(' ');
            out.push_str(&fmt_f64(*x));
        }
        out.push('\n');
    }
    line_f64(&mut out, "coefficients", m.rfe.coefficients.iter().copied());
    line_f64(&mut out, "intercept", [m.rfe.intercept]);
    out.push_str("end\n");
    out
}

/// Render the full file text for `file`.
pub fn render_model(file: &ModelFile) -> String {
    let body = payload(file);
    let ts = file.provenance.timestamp.unwrap_or_else(now);
    format!(
        "{MAGIC}\nformat_version {FORMAT_VERSION}\ntimestamp {ts}\nchecksum {}\npayload\n{body}",
        sha256_hex(body.as_bytes())
    )
}

pub fn save_model(file: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    super::dataset::write_text(path.as_ref(), &render_model(file))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptFile(msg.into())
}

struct Lines<'a> {
    inner: std::str::Lines<'a>,
}

impl<'a> Lines<'a> {
    fn record(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let line = self.inner.next().ok_or_else(|| corrupt(format!("missing `{key}` record")))?;
        let mut toks = line.split_ascii_whitespace();
        if toks.next() != Some(key) {
            return Err(corrupt(format!("expected `{key}` record")));
        }
        Ok(toks.collect())
    }

    fn one(&mut self, key: &str) -> Result<&'a str> {
        match self.record(key)?.as_slice() {
            [v] => Ok(v),
            _ => Err(corrupt(format!("`{key}` takes exactly one value"))),
        }
    }

    fn parse<T: FromStr>(&mut self, key: &str) -> Result<T> {
        parse_tok(self.one(key)?, key)
    }

    fn floats(&mut self, key: &str, n: usize) -> Result<Vec<f64>> {
        let toks = self.record(key)?;
        if toks.len() != n {
            return Err(corrupt(format!("`{key}` has {} values, expected {n}", toks.len())));
        }
        toks.iter().map(|t| parse_tok(t, key)).collect()
    }
}

fn parse_tok<T: FromStr>(tok: &str, key: &str) -> Result<T> {
    tok.parse().map_err(|_| corrupt(format!("bad value `{tok}` in `{key}`")))
}

fn parse_model(text: &str) -> Result<ModelFile> {
    let (head, body) = text
        .split_once("\npayload\n")
        .ok_or_else(|| corrupt("missing payload marker"))?;
    let mut header = Lines { inner: head.lines() };
    if header.inner.next() != Some(MAGIC) {
        return Err(corrupt("not a surrogate model file"));
    }
    let version: u32 = header.parse("format_version")?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            expected: FORMAT_VERSION,
            found: version,
        });
    }
    let timestamp: u64 = header.parse("timestamp")?;
    let checksum = header.one("checksum")?;
    if sha256_hex(body.as_bytes()) != checksum {
        return Err(corrupt("payload checksum mismatch"));
    }

    let mut r = Lines { inner: body.lines() };
    let config_hash = r.one("config_hash")?.to_owned();
    let seed: u64 = r.parse("seed")?;
    let k_star: usize = r.parse("k_star")?;
    let validation_error = r.floats("validation_error", 1)?[0];

    let dims = r.record("kpca")?;
    let [d, n, k, requested_k]: [usize; 4] = match dims.as_slice() {
        [a, b, c, e] => [parse_tok(a, "kpca")?, parse_tok(b, "kpca")?, parse_tok(c, "kpca")?, parse_tok(e, "kpca")?],
        _ => return Err(corrupt("`kpca` takes four values")),
    };
    let center: bool = r.parse("center")?;
    let theta = r.floats("theta", d)?;
    let eigenvalues = r.floats("eigenvalues", k)?;
    let grand_mean = r.floats("grand_mean", 1)?[0];
    let row_means = r.floats("row_means", n)?;
    let mut alpha_rows = Vec::with_capacity(n * k);
    for _ in 0..n {
        alpha_rows.extend(r.floats("alpha", k)?);
    }
    let alphas = DMatrix::from_row_slice(n, k, &alpha_rows);
    let points = (0..n).map(|_| r.floats("point", d)).collect::<Result<Vec<_>>>()?;
    let kpca = KpcaModel::from_parts(
        points,
        KernelParams::new(theta)?,
        center,
        alphas,
        eigenvalues,
        row_means,
        grand_mean,
        requested_k,
    )?;

    let basis: BasisKind = r.parse("basis")?;
    let meta = r.record("features")?;
    let (fdim, q, count, fseed): (usize, usize, usize, u64) = match meta.as_slice() {
        [a, b, c, e] => (parse_tok(a, "features")?, parse_tok(b, "features")?, parse_tok(c, "features")?, parse_tok(e, "features")?),
        _ => return Err(corrupt("`features` takes four values")),
    };
    let sigma = r.floats("sigma", 1)?[0];
    let mut supports = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let toks = r.record("feature")?;
        let split = toks.iter().position(|t| *t == ":").ok_or_else(|| corrupt("feature record without `:`"))?;
        supports.push(toks[..split].iter().map(|t| parse_tok(t, "feature")).collect::<Result<Vec<usize>>>()?);
        values.push(toks[split + 1..].iter().map(|t| parse_tok(t, "feature")).collect::<Result<Vec<f64>>>()?);
    }
    let weights = FeatureWeights::from_parts(fdim, q, sigma, fseed, supports, values)?;
    let coefficients = DVector::from_vec(r.floats("coefficients", count)?);
    let intercept = r.floats("intercept", 1)?[0];
    if r.inner.next() != Some("end") || r.inner.next().is_some() {
        return Err(corrupt("missing or misplaced `end` record"));
    }
    let rfe = RandomFeatureModel::new(basis, weights, coefficients, intercept)?;
    if rfe.weights.dim() != kpca.k() || k_star != kpca.k() {
        return Err(corrupt("latent dimension differs between reduction and expansion"));
    }
    Ok(ModelFile {
        model: CompositeSurrogate {
            kpca,
            rfe,
            k_star,
            validation_error,
        },
        provenance: Provenance {
            config_hash,
            seed,
            timestamp: Some(timestamp),
        },
    })
}
