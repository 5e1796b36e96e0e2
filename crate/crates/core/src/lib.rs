//! Linear binary classification with the L0/1 soft-margin SVM.
//!
//! The model `min ½‖w‖² + C ‖(1 − Aw − by)₊‖₀` is trained by a proximal ADMM
//! whose working set keeps only the samples near the margin, and each
//! returned point carries its P-stationarity residuals as an optimality
//! certificate.

pub mod bench;
pub mod dataio;
pub mod error;
pub mod l01;
pub mod linalg;
pub mod model;
pub mod modelsel;
pub mod par;
pub mod report;
pub mod solver;
pub mod synthgen;

pub use dataio::{apply_scaler, fit_scaler, parse_libsvm, signed_design, write_libsvm, Dataset, ScalingMap, SignedDesign};
pub use error::{Error, Result};
pub use l01::{
    initial_point, l01_count, primal_objective, prox_l01, stationarity_residuals, PrimalDualPoint, ProxThreshold,
    StationarityResiduals,
};
pub use linalg::Matrix;
pub use modelsel::{cross_validate, k_fold_split, CvPlan, CvReport, Grid};
pub use par::Execution;
pub use report::{accuracy, MetricsReport};
pub use solver::{predict, solve, SolverConfig, SolverResult};
