//! TOML experiment configuration.
//!
//! Every key is optional except the data source; omitted keys take the
//! defaults of [`PipelineConfig`]. Unknown keys are rejected. See the README
//! for a fully annotated example.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{reference_u, SobolSpec};
use crate::error::{Error, Result};
use crate::features::BasisKind;
use crate::pipeline::PipelineConfig;
use crate::pso::{Bounds, InitRegion, PsoConfig};
use crate::solvers::{Regularization, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    pub data: DataSource,
    #[serde(default)]
    pub features: FeatureSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub kpca: KpcaSection,
    #[serde(default)]
    pub pso: PsoSection,
    #[serde(default)]
    pub output: OutputSection,
    /// Optional `(n_features, order)` pairs to sweep.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<(usize, usize)>,
}

fn default_dims() -> Vec<usize> {
    PipelineConfig::default().dims
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum DataSource {
    /// G-function on a Sobol sequence, split into contiguous blocks.
    Sobol {
        dim: usize,
        /// Coefficients; omitted means the reference vector for `dim`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u: Option<Vec<f64>>,
        n_train: usize,
        n_val: usize,
        n_test: usize,
        #[serde(default = "default_skip")]
        skip: u64,
    },
    /// CSV files; relative paths resolve against the config file.
    Csv {
        train: PathBuf,
        validation: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        test: Option<PathBuf>,
    },
}

fn default_skip() -> u64 {
    1
}

impl DataSource {
    pub fn sobol_spec(&self) -> Result<Option<SobolSpec>> {
        match self {
            DataSource::Sobol {
                dim,
                u,
                n_train,
                n_val,
                n_test,
                skip,
            } => {
                let u = match u {
                    Some(u) => u.clone(),
                    None => reference_u(*dim)?,
                };
                Ok(Some(SobolSpec {
                    dim: *dim,
                    u,
                    n_train: *n_train,
                    n_val: *n_val,
                    n_test: *n_test,
                    skip: *skip,
                }))
            }
            DataSource::Csv { .. } => Ok(None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSection {
    pub n_features: usize,
    pub order: usize,
    pub sigma: f64,
    pub basis: BasisKind,
    pub fit_intercept: bool,
}

impl Default for FeatureSection {
    fn default() -> Self {
        let p = PipelineConfig::default();
        Self {
            n_features: p.n_features,
            order: p.order,
            sigma: p.sigma,
            basis: p.basis,
            fit_intercept: p.fit_intercept,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub lambda_ridge: Regularization,
    pub lambda_lasso: Regularization,
    pub tol: f64,
    pub max_iter: usize,
    pub standardize: bool,
    /// Phase-switch threshold; omitted means `1e-2 * sqrt(k)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        let p = PipelineConfig::default();
        Self {
            lambda_ridge: p.lambda_ridge,
            lambda_lasso: p.lambda_lasso,
            tol: p.solver.tol,
            max_iter: p.solver.max_iter,
            standardize: p.solver.standardize,
            eta: p.eta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KpcaSection {
    pub center: bool,
}

impl Default for KpcaSection {
    fn default() -> Self {
        Self {
            center: PipelineConfig::default().kpca_center,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitChoice {
    UnitCube,
    Bounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoSection {
    pub n_particles: usize,
    pub n_iterations: usize,
    pub inertia: f64,
    pub c_cognitive: f64,
    pub c_social: f64,
    pub xi1: f64,
    pub xi2: f64,
    /// Bandwidth search box, the same on every coordinate.
    pub low: f64,
    pub high: f64,
    pub init: InitChoice,
}

impl Default for PsoSection {
    fn default() -> Self {
        let p = PipelineConfig::default().pso;
        let (low, high) = match p.bounds {
            Bounds::Uniform { low, high } => (low, high),
            Bounds::PerCoordinate(_) => unreachable!("pipeline default uses uniform bounds"),
        };
        Self {
            n_particles: p.n_particles,
            n_iterations: p.n_iterations,
            inertia: p.inertia,
            c_cognitive: p.c_cognitive,
            c_social: p.c_social,
            xi1: p.xi1,
            xi2: p.xi2,
            low,
            high,
            init: match p.init {
                InitRegion::UnitCube => InitChoice::UnitCube,
                InitRegion::Bounds => InitChoice::Bounds,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub model: PathBuf,
    pub report: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            model: "model.txt".into(),
            report: "reports.toml".into(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(e.to_string()))
    }

    /// Parse a config file; relative data and output paths are resolved
    /// against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let DataSource::Csv { train, validation, test } = &mut cfg.data {
            fix(train);
            fix(validation);
            if let Some(t) = test {
                fix(t);
            }
        }
        fix(&mut cfg.output.model);
        fix(&mut cfg.output.report);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> String {
        super::sha256_hex(self.to_toml().as_bytes())
    }

    pub fn pipeline(&self) -> PipelineConfig {
        let f = &self.features;
        let s = &self.solver;
        let p = &self.pso;
        PipelineConfig {
            dims: self.dims.clone(),
            n_features: f.n_features,
            order: f.order,
            sigma: f.sigma,
            basis: f.basis,
            fit_intercept: f.fit_intercept,
            eta: s.eta,
            lambda_ridge: s.lambda_ridge,
            lambda_lasso: s.lambda_lasso,
            solver: SolverConfig {
                lambda: 0.0,
                tol: s.tol,
                max_iter: s.max_iter,
                standardize: s.standardize,
                fit_intercept: f.fit_intercept,
            },
            kpca_center: self.kpca.center,
            pso: PsoConfig {
                n_particles: p.n_particles,
                inertia: p.inertia,
                c_cognitive: p.c_cognitive,
                c_social: p.c_social,
                xi1: p.xi1,
                xi2: p.xi2,
                n_iterations: p.n_iterations,
                bounds: Bounds::Uniform { low: p.low, high: p.high },
                init: match p.init {
                    InitChoice::UnitCube => InitRegion::UnitCube,
                    InitChoice::Bounds => InitRegion::Bounds,
                },
                seed: 0,
            },
            seed: self.seed,
        }
    }
}
