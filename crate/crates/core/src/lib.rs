//! Active model aggregation with entropy-regularized stochastic mirror descent.
//!
//! Learns a convex combination `theta` of binary base classifiers from a
//! stream, querying labels only with a data-dependent probability and
//! correcting for it with importance weights.
//!
//! - [`ensemble`]: decision-stump base models and the prediction vector `b(x)`.
//! - [`loss`]: margin losses, their derivatives and probability links.
//! - [`mirror`]: the dual-averaging engine on the simplex.
//! - [`active`]: the active (SMD-AMA) and passive (SMD-PMA) stream learners.
//! - [`baselines`]: AdaBoost and query-by-boosting.
//! - [`harness`]: CSV ingestion, splits, oracles, experiments and outputs.

pub mod active;
pub mod baselines;
pub mod ensemble;
pub mod error;
pub mod example;
pub mod harness;
pub mod loss;
pub mod mirror;

pub use active::{
    compute_beta0, epsilon_schedule, evaluate, iw_gradient, query_probability, run_smd_ama, run_smd_pma,
    Beta0, DatasetOracle, Evaluation, Evaluator, LabelOracle, Learner, QueryPolicy, RoundTrace, RunOutput,
};
pub use ensemble::{build_stump_grid, Ensemble, PredictionVector, Stump};
pub use error::{Error, OracleError, Result};
pub use example::{Example, Label};
pub use loss::Loss;
pub use mirror::{beta_schedule, dual_value, primal_map, AggregatorState, Averaging};
