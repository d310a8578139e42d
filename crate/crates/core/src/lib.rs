//! Self-supervised surrogate modelling with sparse random features.
//!
//! Inputs are reduced with kernel PCA (nonisotropic Gaussian kernel) whose
//! bandwidths are tuned by particle swarm optimization against the validation
//! error of a low-order sparse random feature expansion fitted in the reduced
//! space. See [`pipeline`] for the orchestration.

pub mod bench;
pub mod data;
pub mod eigen;
pub mod error;
pub mod features;
pub mod io;
pub mod kpca;
pub mod metrics;
pub mod pipeline;
pub mod pso;
pub mod rng;
pub mod solvers;

pub use data::{split_dataset, Dataset, SplitDataset};
pub use error::{Error, Result};
pub use features::{draw_feature_weights, evaluate_expansion, feature_matrix, BasisKind, FeatureWeights, RandomFeatureModel};
pub use kpca::{fit_kpca, gaussian_kernel, project, KernelParams, KpcaModel};
pub use metrics::{relative_error, EvalReport};
pub use pipeline::{
    fit_dimension, predict, sweep_dimensions, CompositeSurrogate, DimensionReport, Phase, PipelineConfig,
};
pub use pso::{convergence_check, init_swarm, pso_minimize, pso_step, PsoConfig, SwarmState};
pub use solvers::{solve_lasso, solve_ridge, FitResult, Regularization, SolverConfig};
