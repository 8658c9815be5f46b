//! Experiment plumbing: datasets, splits, oracles, replicated runs and
//! their on-disk outputs.

pub mod data;
pub mod experiment;
pub mod oracle;
pub mod output;

pub use data::{load_csv, split_and_stream, Dataset, Split};
pub use experiment::{
    match_budget_qbb, mean_std, run_experiment, sweep_mu, AggregateRow, Algo, Comparison, ComparisonRow,
    ExperimentConfig, ExperimentResult, MetricsRecord, OracleKind, QbbSettings, ReplicateResult, Summary,
    SweepResult, SweepRow,
};
pub use oracle::PromptOracle;
