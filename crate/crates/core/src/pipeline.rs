//! The self-supervised fitting loop.
//!
//! For every candidate latent dimension `k`, a particle swarm searches the
//! kernel bandwidths `theta` of the KPCA reduction. A particle's loss is the
//! relative validation error of a random feature expansion fitted on the
//! reduced training set. Early iterations fit the expansion with ridge
//! regression; once every particle moves by at most `eta` in one step the
//! loop switches (for good) to the LASSO. The dimension whose final LASSO
//! surrogate validates best is selected.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::features::{draw_feature_weights, evaluate_expansion, feature_matrix, BasisKind, FeatureWeights, RandomFeatureModel};
use crate::kpca::{self, KernelParams, KpcaModel, KpcaOptions};
use crate::metrics::relative_error;
use crate::pso::{self, Bounds, InitRegion, PsoConfig};
use crate::rng;
use crate::solvers::{solve_lasso, solve_ridge, Regularization, SolverConfig};

/// Default bandwidth search box. Much smaller bandwidths turn the Gram
/// matrix of a few hundred points in moderate dimension into the identity.
pub const DEFAULT_THETA_LOW: f64 = 0.3;
pub const DEFAULT_THETA_HIGH: f64 = 10.0;

const FEATURE_STREAM: u64 = 0xfea7;
const SWARM_STREAM: u64 = 0x5a4d;

/// Regression used to fit the expansion coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Ridge,
    Lasso,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Ridge => "ridge",
            Phase::Lasso => "lasso",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Candidate latent dimensions, ascending.
    pub dims: Vec<usize>,
    /// Number of random features R.
    pub n_features: usize,
    /// Sparsity order q of the feature weights.
    pub order: usize,
    /// Standard deviation of the nonzero feature weights.
    pub sigma: f64,
    pub basis: BasisKind,
    pub fit_intercept: bool,
    /// Phase-switch threshold; `None` uses `1e-2 * sqrt(k)`.
    pub eta: Option<f64>,
    pub lambda_ridge: Regularization,
    pub lambda_lasso: Regularization,
    /// Tolerance, iteration cap and standardization for both solvers.
    pub solver: SolverConfig,
    pub kpca_center: bool,
    /// Swarm settings. The seed is replaced by one derived from `seed`.
    pub pso: PsoConfig,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 4, 6, 8],
            n_features: 2000,
            order: 2,
            sigma: 1.0,
            basis: BasisKind::Cos,
            fit_intercept: true,
            eta: None,
            lambda_ridge: Regularization::Relative(1e-3),
            lambda_lasso: Regularization::Relative(1e-4),
            solver: SolverConfig::default(),
            kpca_center: true,
            pso: PsoConfig {
                n_particles: 10,
                n_iterations: 30,
                bounds: Bounds::Uniform {
                    low: DEFAULT_THETA_LOW,
                    high: DEFAULT_THETA_HIGH,
                },
                init: InitRegion::Bounds,
                ..PsoConfig::default()
            },
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn eta_for(&self, k: usize) -> f64 {
        self.eta.unwrap_or(1e-2 * (k as f64).sqrt())
    }

    pub fn validate(&self, input_dim: usize, n_train: usize) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::invalid("candidate dimension set is empty"));
        }
        if self.dims.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("candidate dimensions must be strictly ascending"));
        }
        for &k in &self.dims {
            if k == 0 || k > input_dim || k > n_train {
                return Err(Error::invalid(format!(
                    "latent dimension {k} must lie in 1..={}",
                    input_dim.min(n_train)
                )));
            }
        }
        if self.n_features == 0 || self.order == 0 {
            return Err(Error::invalid("feature count and order must be at least 1"));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::invalid("sigma must be positive"));
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0) {
                return Err(Error::invalid("eta must be positive"));
            }
        }
        if self.pso.n_iterations == 0 {
            return Err(Error::invalid("swarm needs at least one iteration"));
        }
        self.solver.validate()?;
        self.pso.validate()
    }

    fn swarm_config(&self) -> PsoConfig {
        PsoConfig {
            seed: rng::derive_seed(self.seed, &[SWARM_STREAM]),
            ..self.pso.clone()
        }
    }

    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            fit_intercept: self.fit_intercept,
            ..self.solver
        }
    }
}

/// Outcome of the search for one latent dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub k: usize,
    pub best_theta: Vec<f64>,
    /// Smallest global-best validation loss seen during the search.
    pub best_val_error: f64,
    /// Validation error of the final LASSO refit at `best_theta`
    /// (`+inf` if the dimension failed).
    pub final_val_error: f64,
    pub iterations: usize,
    /// Iteration after which the loop switched from ridge to LASSO.
    pub switch_iteration: Option<usize>,
    /// Global-best loss after each iteration.
    pub trace: Vec<f64>,
    /// Regression phase used in each iteration.
    pub phases: Vec<Phase>,
    /// Phase of the returned surrogate (always LASSO on success).
    pub final_phase: Phase,
    pub failure: Option<String>,
}

/// Reduction followed by the random feature expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSurrogate {
    pub kpca: KpcaModel,
    pub rfe: RandomFeatureModel,
    pub k_star: usize,
    pub validation_error: f64,
}

pub fn predict(model: &CompositeSurrogate, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let z = kpca::project(&model.kpca, points)?;
    evaluate_expansion(&model.rfe, &z)
}

struct Problem<'a> {
    train: &'a Dataset,
    val: &'a Dataset,
    k: usize,
    weights: FeatureWeights,
    cfg: &'a PipelineConfig,
}

impl Problem<'_> {
    fn fit(&self, theta: &[f64], phase: Phase) -> Result<(CompositeSurrogate, f64)> {
        let params = KernelParams::new(theta.to_vec())?;
        let kpca = kpca::fit_kpca_with(
            self.train.points(),
            &params,
            self.k,
            KpcaOptions {
                center: self.cfg.kpca_center,
            },
        )?;
        if kpca.k() < self.k {
            return Err(Error::DegenerateKernel);
        }
        let z_train = kpca::project(&kpca, self.train.points())?;
        let a = feature_matrix(&z_train, &self.weights, self.cfg.basis)?;
        let y = DVector::from_column_slice(self.train.responses());
        let base = self.cfg.solver_config();
        let fit = match phase {
            Phase::Ridge => {
                let lambda = self.cfg.lambda_ridge.resolve_ridge(&a, base.fit_intercept);
                solve_ridge(&a, &y, &base.with_lambda(lambda))?
            }
            Phase::Lasso => {
                let lambda = self.cfg.lambda_lasso.resolve_lasso(&a, &y, base.fit_intercept);
                solve_lasso(&a, &y, &base.with_lambda(lambda))?
            }
        };
        let rfe = RandomFeatureModel::new(self.cfg.basis, self.weights.clone(), fit.coefficients, fit.intercept)?;
        let z_val = kpca::project(&kpca, self.val.points())?;
        let pred = evaluate_expansion(&rfe, &z_val)?;
        let err = relative_error(self.val.responses(), &pred)?.error;
        if !err.is_finite() {
            return Err(Error::NonFinite("validation error"));
        }
        let model = CompositeSurrogate {
            kpca,
            rfe,
            k_star: self.k,
            validation_error: err,
        };
        Ok((model, err))
    }

    /// Failures count as an infinitely bad particle.
    fn loss(&self, theta: &[f64], phase: Phase) -> f64 {
        self.fit(theta, phase).map_or(f64::INFINITY, |(_, e)| e)
    }

    fn losses(&self, thetas: &[Vec<f64>], phase: Phase) -> Vec<f64> {
        thetas.par_iter().map(|t| self.loss(t, phase)).collect()
    }
}

fn check_inputs(train: &Dataset, val: &Dataset) -> Result<()> {
    if train.dim() != val.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            found: val.dim(),
        });
    }
    Ok(())
}

/// Search bandwidths for latent dimension `k` and refit the best with LASSO.
pub fn fit_dimension(
    train: &Dataset,
    val: &Dataset,
    k: usize,
    cfg: &PipelineConfig,
) -> Result<(DimensionReport, CompositeSurrogate)> {
    check_inputs(train, val)?;
    let d = train.dim();
    if k == 0 || k > d || k > train.len() {
        return Err(Error::invalid(format!("latent dimension {k} out of range")));
    }
    let weights = draw_feature_weights(
        k,
        cfg.order,
        cfg.n_features,
        cfg.sigma,
        rng::derive_seed(cfg.seed, &[FEATURE_STREAM, k as u64]),
    )?;
    let problem = Problem {
        train,
        val,
        k,
        weights,
        cfg,
    };
    let swarm_cfg = cfg.swarm_config();
    let eta = cfg.eta_for(k);
    let n_iter = swarm_cfg.n_iterations;

    let mut state = pso::init_swarm(&swarm_cfg, d)?;
    let mut phase = Phase::Ridge;
    let mut switch_iteration = None;
    let mut trace = Vec::with_capacity(n_iter);
    let mut phases = Vec::with_capacity(n_iter);
    for it in 0..n_iter {
        let losses = problem.losses(&state.positions, phase);
        if losses.iter().all(|l| l.is_infinite()) {
            return Err(Error::invalid(format!(
                "every particle failed in iteration {it} for latent dimension {k}"
            )));
        }
        let before = state.positions.clone();
        pso::pso_step(&mut state, &losses, &swarm_cfg)?;
        trace.push(state.gbest_loss);
        phases.push(phase);
        let last = it + 1 == n_iter;
        if phase == Phase::Ridge && !last && pso::convergence_check(&before, &state.positions, eta) {
            phase = Phase::Lasso;
            switch_iteration = Some(it);
            let rescored = problem.losses(&state.pbest_positions, Phase::Lasso);
            state.rescore(&rescored)?;
        }
    }

    let best_theta = state.gbest_position.clone();
    let (model, final_err) = problem.fit(&best_theta, Phase::Lasso)?;
    let report = DimensionReport {
        k,
        best_theta,
        best_val_error: trace.iter().cloned().fold(f64::INFINITY, f64::min),
        final_val_error: final_err,
        iterations: n_iter,
        switch_iteration,
        trace,
        phases,
        final_phase: Phase::Lasso,
        failure: None,
    };
    Ok((report, model))
}

/// Fit every candidate dimension and keep the one with the smallest final
/// validation error (ties go to the smaller dimension).
pub fn sweep_dimensions(
    train: &Dataset,
    val: &Dataset,
    cfg: &PipelineConfig,
) -> Result<(CompositeSurrogate, Vec<DimensionReport>)> {
    check_inputs(train, val)?;
    cfg.validate(train.dim(), train.len())?;
    let mut reports = Vec::with_capacity(cfg.dims.len());
    let mut best: Option<CompositeSurrogate> = None;
    for &k in &cfg.dims {
        match fit_dimension(train, val, k, cfg) {
            Ok((report, model)) => {
                if improves(best.as_ref().map(|b| b.validation_error), model.validation_error) {
                    best = Some(model);
                }
                reports.push(report);
            }
            Err(e) => reports.push(DimensionReport {
                k,
                best_theta: Vec::new(),
                best_val_error: f64::INFINITY,
                final_val_error: f64::INFINITY,
                iterations: cfg.pso.n_iterations,
                switch_iteration: None,
                trace: Vec::new(),
                phases: Vec::new(),
                final_phase: Phase::Lasso,
                failure: Some(e.to_string()),
            }),
        }
    }
    best.map(|b| (b, reports)).ok_or(Error::AllDimensionsFailed)
}

/// Candidates arrive in ascending `k`, so strict improvement keeps the
/// smaller dimension on ties.
fn improves(current: Option<f64>, candidate: f64) -> bool {
    current.is_none_or(|c| candidate < c)
}

/// One grid point of the optional (feature count, order) search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub n_features: usize,
    pub order: usize,
    pub validation_error: f64,
}

/// Run [`sweep_dimensions`] for every `(R, q)` pair and keep the best.
pub fn sweep_grid(
    train: &Dataset,
    val: &Dataset,
    cfg: &PipelineConfig,
    grid: &[(usize, usize)],
) -> Result<(CompositeSurrogate, Vec<DimensionReport>, Vec<GridResult>)> {
    if grid.is_empty() {
        return sweep_dimensions(train, val, cfg).map(|(m, r)| {
            let g = GridResult {
                n_features: cfg.n_features,
                order: cfg.order,
                validation_error: m.validation_error,
            };
            (m, r, vec![g])
        });
    }
    let mut best: Option<(CompositeSurrogate, Vec<DimensionReport>)> = None;
    let mut table = Vec::with_capacity(grid.len());
    for &(n_features, order) in grid {
        let point_cfg = PipelineConfig {
            n_features,
            order,
            ..cfg.clone()
        };
        let (model, reports) = match sweep_dimensions(train, val, &point_cfg) {
            Ok(v) => v,
            Err(Error::AllDimensionsFailed) => continue,
            Err(e) => return Err(e),
        };
        table.push(GridResult {
            n_features,
            order,
            validation_error: model.validation_error,
        });
        if best.as_ref().is_none_or(|(b, _)| model.validation_error < b.validation_error) {
            best = Some((model, reports));
        }
    }
    best.map(|(m, r)| (m, r, table)).ok_or(Error::AllDimensionsFailed)
}
