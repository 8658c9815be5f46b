//! Comparison baselines: AdaBoost and pool-based query-by-boosting.

pub mod adaboost;
pub mod qbb;

pub use adaboost::{adaboost_fit, boosted_margin, stump_weight, BoostedModel};
pub use qbb::{run_qbb, QbbConfig, QbbOutput, QbbPoint};
