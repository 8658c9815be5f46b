//! Query-by-boosting: a pool-based active learner that boosts on the labeled
//! set and queries the smallest-margin point among `R` random unqueried
//! candidates.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adaboost::{fit_predictions, BoostedModel};
use crate::active::{Evaluator, LabelOracle};
use crate::ensemble::{Ensemble, PredictionVector};
use crate::error::{Error, Result};
use crate::example::{Example, Label};
use crate::loss::Loss;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QbbConfig {
    /// Total labels requested, including the initial seed set.
    pub budget: usize,
    /// Candidates `R` drawn per query.
    pub candidate_size: usize,
    pub boost_rounds: usize,
    /// Uniformly sampled labels taken before the first boost.
    pub seed_size: usize,
    pub seed: u64,
}

impl QbbConfig {
    pub const DEFAULT_CANDIDATE_SIZE: usize = 100;
    pub const DEFAULT_BOOST_ROUNDS: usize = 50;
    pub const DEFAULT_SEED_SIZE: usize = 10;

    pub fn new(budget: usize, seed: u64) -> Self {
        QbbConfig {
            budget,
            candidate_size: Self::DEFAULT_CANDIDATE_SIZE,
            boost_rounds: Self::DEFAULT_BOOST_ROUNDS,
            seed_size: Self::DEFAULT_SEED_SIZE,
            seed,
        }
    }
}

/// Test error of the boosted model trained on `queries` labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QbbPoint {
    pub queries: usize,
    pub test_error: f64,
    /// Loss of the normalized score `h(x) / sum(alpha)`, which lies in `[-1, 1]`.
    pub test_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QbbOutput {
    pub model: BoostedModel,
    /// Pool indices in the order they were queried.
    pub queried: Vec<usize>,
    pub curve: Vec<QbbPoint>,
    pub final_error: f64,
}

pub fn run_qbb(
    ensemble: &Ensemble,
    pool: &[Example],
    oracle: &mut dyn LabelOracle,
    test: &[Example],
    cfg: &QbbConfig,
) -> Result<QbbOutput> {
    let evaluator = Evaluator::new(ensemble, test)?;
    run_qbb_with(ensemble, pool, oracle, &evaluator, Loss::default(), cfg)
}

/// [`run_qbb`] against a prepared test evaluator.
pub fn run_qbb_with(
    ensemble: &Ensemble,
    pool: &[Example],
    oracle: &mut dyn LabelOracle,
    test: &Evaluator,
    loss: Loss,
    cfg: &QbbConfig,
) -> Result<QbbOutput> {
    if cfg.budget == 0 {
        return Err(Error::input("QBB budget must be at least 1"));
    }
    if cfg.candidate_size == 0 {
        return Err(Error::input("QBB candidate size must be at least 1"));
    }
    if cfg.boost_rounds == 0 {
        return Err(Error::input("QBB needs at least one boosting round"));
    }
    if cfg.budget > pool.len() {
        return Err(Error::input(format!(
            "QBB budget {} exceeds pool size {}",
            cfg.budget,
            pool.len()
        )));
    }

    let preds = pool
        .iter()
        .map(|e| ensemble.predict_vector(&e.features))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut labels: Vec<Option<Label>> = vec![None; pool.len()];
    let mut queried = Vec::with_capacity(cfg.budget);

    let mut ask = |i: usize, labels: &mut Vec<Option<Label>>, queried: &mut Vec<usize>| -> Result<()> {
        let y = oracle.label(i, &pool[i].features).map_err(|source| Error::Oracle {
            round: queried.len() as u64 + 1,
            source,
            partial: Vec::new(),
        })?;
        labels[i] = Some(y);
        queried.push(i);
        Ok(())
    };

    let seed_size = cfg.seed_size.clamp(1, cfg.budget);
    for i in sample(&mut rng, pool.len(), seed_size) {
        ask(i, &mut labels, &mut queried)?;
    }

    let mut curve = Vec::new();
    loop {
        let model = fit_labeled(&preds, &labels, ensemble.len(), cfg.boost_rounds)?;
        let ev = test.evaluate(&model.to_simplex(ensemble.len()), loss);
        let test_error = ev.error_rate;
        curve.push(QbbPoint {
            queries: queried.len(),
            test_error,
            test_loss: ev.mean_loss,
        });
        if queried.len() == cfg.budget {
            return Ok(QbbOutput {
                model,
                queried,
                curve,
                final_error: test_error,
            });
        }
        let open: Vec<usize> = (0..pool.len()).filter(|&i| labels[i].is_none()).collect();
        let k = cfg.candidate_size.min(open.len());
        let pick = sample(&mut rng, open.len(), k)
            .into_iter()
            .map(|c| open[c])
            .fold((usize::MAX, f64::INFINITY), |best, i| {
                let margin = model.score(&preds[i]).abs();
                if margin < best.1 {
                    (i, margin)
                } else {
                    best
                }
            })
            .0;
        ask(pick, &mut labels, &mut queried)?;
    }
}

/// Boosts on the labeled pool points in pool order, so the result does not
/// depend on the order labels arrived in.
fn fit_labeled(
    preds: &[PredictionVector],
    labels: &[Option<Label>],
    m: usize,
    rounds: usize,
) -> Result<BoostedModel> {
    let (p, y): (Vec<&PredictionVector>, Vec<Label>) = preds
        .iter()
        .zip(labels)
        .filter_map(|(b, y)| y.map(|y| (b, y)))
        .unzip();
    fit_predictions(&p, &y, m, rounds)
}
