//! Rank-based Lasso variable selection.
//!
//! The response is replaced by its centered ranks `R_i/n - 0.5` and a
//! quadratic-loss Lasso is solved on the result. Around that core the crate
//! provides thresholded, adaptive and cross-validated variants, a LAD-Lasso
//! baseline, population-level oracles for the estimated parameter, seeded
//! simulation scenarios, selection metrics and a CLI runner that writes
//! CSV/SVG reports.

pub mod error;
pub mod estimators;
pub mod lad;
pub mod metrics;
pub mod rank;
pub mod runner;
pub mod simdata;
pub mod solver;
pub mod theory;

pub use error::{Error, Result};
pub use estimators::{
    adaptive_rank_lasso, cv_plain_lasso, cv_rank_lasso, lad_lasso, rank_lasso, select,
    thresholded_rank_lasso, LambdaRule, Method, SelectionResult, SelectorSpec,
};
pub use lad::{fit_lad_lasso, LadFit};
pub use metrics::{eval_selection, fd_tp_curve, opq, FdTpCurve, ReplicateEval};
pub use rank::{centered_ranks, ranks, CenteredRanks, ResponseVector};
pub use simdata::{ScenarioConfig, SimulatedDataset};
pub use solver::{fit_weighted_lasso, lambda_path, standardize, DesignMatrix, FitResult, PenaltySpec, SolverOptions};
