//! Replicated experiments: SMD-AMA / SMD-PMA / QBB runs, mu sweeps and
//! budget-matched QBB comparisons.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::data::{split_and_stream, Dataset, Split};
use super::oracle::PromptOracle;
use crate::active::{Beta0, DatasetOracle, Evaluator, LabelOracle, Learner, QueryPolicy};
use crate::baselines::qbb::{run_qbb_with, QbbConfig};
use crate::ensemble::{build_stump_grid, Ensemble};
use crate::error::{Error, Result};
use crate::example::Example;
use crate::loss::Loss;
use crate::mirror::Averaging;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    SmdAma,
    SmdPma,
    Qbb,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::SmdAma => "smd-ama",
            Algo::SmdPma => "smd-pma",
            Algo::Qbb => "qbb",
        })
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "smd-ama" => Ok(Algo::SmdAma),
            "smd-pma" => Ok(Algo::SmdPma),
            "qbb" => Ok(Algo::Qbb),
            other => Err(format!("unknown algorithm '{other}' (expected smd-ama, smd-pma or qbb)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    /// Reveal the stored label.
    #[default]
    Dataset,
    /// Ask on the terminal (stdin / stderr).
    Prompt,
}

impl FromStr for OracleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dataset" => Ok(OracleKind::Dataset),
            "prompt" => Ok(OracleKind::Prompt),
            other => Err(format!("unknown oracle '{other}' (expected dataset or prompt)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QbbSettings {
    /// Label budget for standalone QBB runs. Budget-matched comparisons
    /// take it from the SMD-AMA run instead.
    pub budget: Option<usize>,
    pub candidate_size: usize,
    pub boost_rounds: usize,
    pub seed_size: usize,
}

impl Default for QbbSettings {
    fn default() -> Self {
        QbbSettings {
            budget: None,
            candidate_size: QbbConfig::DEFAULT_CANDIDATE_SIZE,
            boost_rounds: QbbConfig::DEFAULT_BOOST_ROUNDS,
            seed_size: QbbConfig::DEFAULT_SEED_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub algo: Algo,
    pub mu: f64,
    pub beta0: Beta0,
    pub stumps_per_dim: usize,
    pub loss: Loss,
    pub replicates: usize,
    pub seed: u64,
    /// Fraction of the data used as the training stream.
    pub split: f64,
    /// Rounds between test evaluations; `None` means `max(1, T / 200)`.
    pub eval_every: Option<usize>,
    pub oracle: OracleKind,
    pub averaging: Averaging,
    pub qbb: QbbSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            algo: Algo::SmdAma,
            mu: 0.3,
            beta0: Beta0::Auto,
            stumps_per_dim: 80,
            loss: Loss::Squared,
            replicates: 10,
            seed: 42,
            split: 0.7,
            eval_every: None,
            oracle: OracleKind::Dataset,
            averaging: Averaging::PostUpdate,
            qbb: QbbSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::input("replicates must be at least 1"));
        }
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::input(format!("split must lie in (0, 1), got {}", self.split)));
        }
        if !(0.0..1.0).contains(&self.mu) {
            return Err(Error::input(format!("mu must lie in [0, 1), got {}", self.mu)));
        }
        if self.stumps_per_dim == 0 {
            return Err(Error::input("stumps_per_dim must be at least 1"));
        }
        if self.eval_every == Some(0) {
            return Err(Error::input("eval_every must be at least 1"));
        }
        if let Beta0::Fixed(b) = self.beta0 {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::input(format!("beta0 must be positive, got {b}")));
            }
        }
        Ok(())
    }
}

/// Test metrics of the current hypothesis at one evaluation point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub replicate: usize,
    /// Stream round (QBB: number of labels used).
    pub t: u64,
    pub queries: u64,
    pub test_error: f64,
    pub test_loss: f64,
    /// Mean query probability over rounds `1..=t`; absent for QBB.
    pub mean_p_query: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateResult {
    pub replicate: usize,
    pub stream_length: usize,
    pub test_size: usize,
    pub models: usize,
    /// Resolved `beta0`; absent for QBB.
    pub beta0: Option<f64>,
    pub metrics: Vec<MetricsRecord>,
    /// Averaged iterate at the end of the stream; absent for QBB.
    pub theta_hat: Option<Vec<f64>>,
    pub queries: u64,
    /// `sum_t p_t` over the stream.
    pub sum_p_query: f64,
    /// `sum_t eps_t`, the lower bound on expected queries.
    pub epsilon_floor: f64,
}

impl ReplicateResult {
    pub fn final_record(&self) -> &MetricsRecord {
        self.metrics.last().expect("every replicate records its final round")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub t: u64,
    pub err_mean: f64,
    pub err_std: f64,
    pub loss_mean: f64,
    pub loss_std: f64,
    pub queries_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub dataset: String,
    pub algo: Algo,
    pub replicates: usize,
    pub stream_length: usize,
    pub test_size: usize,
    pub models: usize,
    pub mu: f64,
    pub beta0: Option<f64>,
    pub err_mean: f64,
    pub err_std: f64,
    pub loss_mean: f64,
    pub loss_std: f64,
    pub queries_mean: f64,
    pub queries_std: f64,
    /// Queries divided by stream length, averaged over replicates.
    pub query_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub replicates: Vec<ReplicateResult>,
    pub aggregate: Vec<AggregateRow>,
    pub summary: Summary,
}

/// Mean and sample standard deviation (zero for fewer than two values).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Independent split and algorithm seeds for replicate `r`.
fn replicate_seeds(base: u64, r: usize) -> [u64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(r as u64);
    [rng.next_u64(), rng.next_u64(), rng.next_u64()]
}

struct Prepared {
    split: Split,
    ensemble: Ensemble,
    evaluator: Evaluator,
    algo_seed: u64,
    qbb_seed: u64,
}

fn prepare(cfg: &ExperimentConfig, ds: &Dataset, r: usize) -> Result<Prepared> {
    let [split_seed, algo_seed, qbb_seed] = replicate_seeds(cfg.seed, r);
    let split = split_and_stream(ds, cfg.split, split_seed)?;
    let ensemble = build_stump_grid(&split.train, cfg.stumps_per_dim)?;
    let evaluator = Evaluator::new(&ensemble, &split.test)?;
    Ok(Prepared {
        split,
        ensemble,
        evaluator,
        algo_seed,
        qbb_seed,
    })
}

fn make_oracle(kind: OracleKind, train: &[Example]) -> Box<dyn LabelOracle + '_> {
    match kind {
        OracleKind::Dataset => Box::new(DatasetOracle::new(train)),
        OracleKind::Prompt => Box::new(PromptOracle::new(std::io::stdin().lock(), std::io::stderr())),
    }
}

fn run_smd(cfg: &ExperimentConfig, algo: Algo, p: &Prepared, r: usize) -> Result<ReplicateResult> {
    let train = &p.split.train;
    let mut learner = match algo {
        Algo::SmdAma => Learner::active(
            &p.ensemble,
            cfg.loss,
            QueryPolicy::new(cfg.mu, p.algo_seed)?,
            cfg.beta0,
            cfg.averaging,
        )?,
        Algo::SmdPma => Learner::passive(&p.ensemble, cfg.loss, cfg.beta0, cfg.averaging)?,
        Algo::Qbb => unreachable!("QBB is not a stream learner"),
    };
    let mut oracle = make_oracle(cfg.oracle, train);
    let total = train.len() as u64;
    let every = cfg.eval_every.unwrap_or((train.len() / 200).max(1)) as u64;
    let mut metrics = Vec::new();
    let mut floor = 0.0;
    for (i, ex) in train.iter().enumerate() {
        let trace = learner.step(i, &ex.features, oracle.as_mut())?;
        floor += trace.epsilon;
        if trace.t % every == 0 || trace.t == total {
            let theta = learner.state().averaged_iterate()?;
            let ev = p.evaluator.evaluate(&theta, cfg.loss);
            metrics.push(MetricsRecord {
                replicate: r,
                t: trace.t,
                queries: learner.queries(),
                test_error: ev.error_rate,
                test_loss: ev.mean_loss,
                mean_p_query: Some(learner.sum_query_probability() / trace.t as f64),
            });
        }
    }
    Ok(ReplicateResult {
        replicate: r,
        stream_length: train.len(),
        test_size: p.evaluator.len(),
        models: p.ensemble.len(),
        beta0: Some(learner.state().beta0()),
        metrics,
        theta_hat: Some(learner.state().averaged_iterate()?),
        queries: learner.queries(),
        sum_p_query: learner.sum_query_probability(),
        epsilon_floor: floor,
    })
}

fn run_qbb_replicate(cfg: &ExperimentConfig, p: &Prepared, budget: usize, r: usize) -> Result<ReplicateResult> {
    let qcfg = QbbConfig {
        budget,
        candidate_size: cfg.qbb.candidate_size,
        boost_rounds: cfg.qbb.boost_rounds,
        seed_size: cfg.qbb.seed_size,
        seed: p.qbb_seed,
    };
    let mut oracle = make_oracle(cfg.oracle, &p.split.train);
    let out = run_qbb_with(&p.ensemble, &p.split.train, oracle.as_mut(), &p.evaluator, cfg.loss, &qcfg)?;
    let every = cfg.eval_every.unwrap_or((budget / 200).max(1));
    let last = out.curve.len() - 1;
    let metrics = out
        .curve
        .iter()
        .enumerate()
        .filter(|&(k, pt)| pt.queries % every == 0 || k == last)
        .map(|(_, pt)| MetricsRecord {
            replicate: r,
            t: pt.queries as u64,
            queries: pt.queries as u64,
            test_error: pt.test_error,
            test_loss: pt.test_loss,
            mean_p_query: None,
        })
        .collect();
    Ok(ReplicateResult {
        replicate: r,
        stream_length: p.split.train.len(),
        test_size: p.evaluator.len(),
        models: p.ensemble.len(),
        beta0: None,
        metrics,
        theta_hat: None,
        queries: out.queried.len() as u64,
        sum_p_query: out.queried.len() as f64,
        epsilon_floor: 0.0,
    })
}

fn run_replicate(cfg: &ExperimentConfig, ds: &Dataset, r: usize) -> Result<ReplicateResult> {
    let p = prepare(cfg, ds, r)?;
    match cfg.algo {
        Algo::Qbb => {
            let budget = cfg
                .qbb
                .budget
                .ok_or_else(|| Error::input("QBB runs need a label budget"))?;
            run_qbb_replicate(cfg, &p, budget, r)
        }
        algo => run_smd(cfg, algo, &p, r),
    }
}

/// Runs `f` for every replicate, in parallel unless the oracle is interactive.
/// Results come back in replicate order.
fn for_replicates<T: Send>(
    cfg: &ExperimentConfig,
    f: impl Fn(usize) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    let wrap = |r: usize| {
        f(r).map_err(|e| Error::Replicate {
            index: r,
            source: Box::new(e),
        })
    };
    match cfg.oracle {
        OracleKind::Dataset => (0..cfg.replicates).into_par_iter().map(wrap).collect(),
        OracleKind::Prompt => (0..cfg.replicates).map(wrap).collect(),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, ds: &Dataset) -> Result<ExperimentResult> {
    cfg.validate()?;
    let replicates = for_replicates(cfg, |r| run_replicate(cfg, ds, r))?;
    let aggregate = aggregate(&replicates)?;
    let summary = summarize(cfg, ds, &replicates);
    Ok(ExperimentResult {
        replicates,
        aggregate,
        summary,
    })
}

fn aggregate(reps: &[ReplicateResult]) -> Result<Vec<AggregateRow>> {
    let first = &reps[0].metrics;
    if reps.iter().any(|r| r.metrics.len() != first.len()) {
        return Err(Error::State("replicates have different evaluation schedules".into()));
    }
    let mut rows = Vec::with_capacity(first.len());
    for (k, rec) in first.iter().enumerate() {
        let col: Vec<&MetricsRecord> = reps.iter().map(|r| &r.metrics[k]).collect();
        if col.iter().any(|m| m.t != rec.t) {
            return Err(Error::State("replicates have different evaluation schedules".into()));
        }
        let (err_mean, err_std) = mean_std(&col.iter().map(|m| m.test_error).collect::<Vec<_>>());
        let (loss_mean, loss_std) = mean_std(&col.iter().map(|m| m.test_loss).collect::<Vec<_>>());
        let (queries_mean, _) = mean_std(&col.iter().map(|m| m.queries as f64).collect::<Vec<_>>());
        rows.push(AggregateRow {
            t: rec.t,
            err_mean,
            err_std,
            loss_mean,
            loss_std,
            queries_mean,
        });
    }
    Ok(rows)
}

fn summarize(cfg: &ExperimentConfig, ds: &Dataset, reps: &[ReplicateResult]) -> Summary {
    let finals: Vec<&MetricsRecord> = reps.iter().map(ReplicateResult::final_record).collect();
    let col = |f: &dyn Fn(&MetricsRecord) -> f64| mean_std(&finals.iter().map(|m| f(m)).collect::<Vec<_>>());
    let (err_mean, err_std) = col(&|m| m.test_error);
    let (loss_mean, loss_std) = col(&|m| m.test_loss);
    let (queries_mean, queries_std) = col(&|m| m.queries as f64);
    let (query_fraction, _) = mean_std(
        &reps
            .iter()
            .map(|r| r.queries as f64 / r.stream_length as f64)
            .collect::<Vec<_>>(),
    );
    Summary {
        dataset: ds.name.clone(),
        algo: cfg.algo,
        replicates: reps.len(),
        stream_length: reps[0].stream_length,
        test_size: reps[0].test_size,
        models: reps[0].models,
        mu: if cfg.algo == Algo::SmdAma { cfg.mu } else { 0.0 },
        beta0: reps[0].beta0,
        err_mean,
        err_std,
        loss_mean,
        loss_std,
        queries_mean,
        queries_std,
        query_fraction,
    }
}

/// One row of the mu trade-off table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub mu: f64,
    pub err_mean: f64,
    pub err_std: f64,
    pub loss_mean: f64,
    pub loss_std: f64,
    pub queries_mean: f64,
    pub queries_std: f64,
    /// Mean over replicates of `sum_t p_t`.
    pub sum_p_mean: f64,
    /// `sum_{t=1}^T t^-mu`.
    pub epsilon_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub runs: Vec<ExperimentResult>,
}

/// SMD-AMA at each `mu`, all sharing the configured base seed.
pub fn sweep_mu(cfg: &ExperimentConfig, ds: &Dataset, mus: &[f64]) -> Result<SweepResult> {
    if mus.is_empty() {
        return Err(Error::input("no mu values given"));
    }
    if let Some(bad) = mus.iter().find(|m| !(0.0..1.0).contains(*m)) {
        return Err(Error::input(format!("mu must lie in [0, 1), got {bad}")));
    }
    let mut rows = Vec::with_capacity(mus.len());
    let mut runs = Vec::with_capacity(mus.len());
    for &mu in mus {
        let c = ExperimentConfig {
            algo: Algo::SmdAma,
            mu,
            ..cfg.clone()
        };
        let res = run_experiment(&c, ds)?;
        let (sum_p_mean, _) = mean_std(&res.replicates.iter().map(|r| r.sum_p_query).collect::<Vec<_>>());
        let s = &res.summary;
        rows.push(SweepRow {
            mu,
            err_mean: s.err_mean,
            err_std: s.err_std,
            loss_mean: s.loss_mean,
            loss_std: s.loss_std,
            queries_mean: s.queries_mean,
            queries_std: s.queries_std,
            sum_p_mean,
            epsilon_floor: res.replicates[0].epsilon_floor,
        });
        runs.push(res);
    }
    Ok(SweepResult { rows, runs })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub replicate: usize,
    /// Labels used by SMD-AMA, given to QBB as its budget.
    pub budget: u64,
    pub smd_ama_error: f64,
    pub qbb_error: f64,
    pub qbb_queries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonSummary {
    pub dataset: String,
    pub budget_mean: f64,
    pub smd_ama_error_mean: f64,
    pub smd_ama_error_std: f64,
    pub qbb_error_mean: f64,
    pub qbb_error_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub summary: ComparisonSummary,
}

/// Runs SMD-AMA, then QBB on the same training pool with the number of
/// labels SMD-AMA actually queried as its budget.
pub fn match_budget_qbb(cfg: &ExperimentConfig, ds: &Dataset) -> Result<Comparison> {
    let cfg = ExperimentConfig {
        algo: Algo::SmdAma,
        ..cfg.clone()
    };
    cfg.validate()?;
    let rows = for_replicates(&cfg, |r| {
        let p = prepare(&cfg, ds, r)?;
        let active = run_smd(&cfg, Algo::SmdAma, &p, r)?;
        let budget = active.queries as usize;
        let qbb = run_qbb_replicate(&cfg, &p, budget, r)?;
        Ok(ComparisonRow {
            replicate: r,
            budget: active.queries,
            smd_ama_error: active.final_record().test_error,
            qbb_error: qbb.final_record().test_error,
            qbb_queries: qbb.queries,
        })
    })?;
    let col = |f: fn(&ComparisonRow) -> f64| mean_std(&rows.iter().map(f).collect::<Vec<_>>());
    let (budget_mean, _) = col(|r| r.budget as f64);
    let (smd_ama_error_mean, smd_ama_error_std) = col(|r| r.smd_ama_error);
    let (qbb_error_mean, qbb_error_std) = col(|r| r.qbb_error);
    Ok(Comparison {
        summary: ComparisonSummary {
            dataset: ds.name.clone(),
            budget_mean,
            smd_ama_error_mean,
            smd_ama_error_std,
            qbb_error_mean,
            qbb_error_std,
        },
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example::Label;
    use rand::Rng;

    fn synthetic(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ex = (0..n)
            .map(|_| {
                let x: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
                let p = if x[0] + x[1] > 1.0 { 0.85 } else { 0.2 };
                let y = if rng.random::<f64>() < p { Label::Positive } else { Label::Negative };
                Example::labeled(x, y)
            })
            .collect();
        Dataset::new("synthetic", ex).unwrap()
    }

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            stumps_per_dim: 10,
            replicates: 3,
            eval_every: Some(50),
            ..Default::default()
        }
    }

    #[test]
    fn mean_std_basics() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_passive_replicate_has_zero_spread() {
        let ds = synthetic(300, 1);
        let cfg = ExperimentConfig {
            algo: Algo::SmdPma,
            replicates: 1,
            ..small_cfg()
        };
        let res = run_experiment(&cfg, &ds).unwrap();
        assert!(res.aggregate.iter().all(|r| r.err_std == 0.0 && r.loss_std == 0.0));
        assert_eq!(res.summary.queries_mean, 210.0);
        assert_eq!(res.summary.query_fraction, 1.0);
        assert_eq!(res.aggregate.last().unwrap().t, 210);
    }

    #[test]
    fn active_mu_zero_matches_passive_metrics() {
        let ds = synthetic(400, 2);
        let a = run_experiment(
            &ExperimentConfig {
                mu: 0.0,
                ..small_cfg()
            },
            &ds,
        )
        .unwrap();
        let p = run_experiment(
            &ExperimentConfig {
                algo: Algo::SmdPma,
                ..small_cfg()
            },
            &ds,
        )
        .unwrap();
        assert_eq!(a.replicates, p.replicates);
        assert_eq!(a.aggregate, p.aggregate);
    }

    #[test]
    fn metric_invariants_and_aggregation() {
        let ds = synthetic(500, 3);
        let res = run_experiment(&small_cfg(), &ds).unwrap();
        for rep in &res.replicates {
            for w in rep.metrics.windows(2) {
                assert!(w[1].t > w[0].t);
                assert!(w[1].queries >= w[0].queries);
            }
            for m in &rep.metrics {
                assert!((0.0..=1.0).contains(&m.test_error));
                assert!((0.0..=4.0).contains(&m.test_loss));
            }
            assert!(rep.sum_p_query >= rep.epsilon_floor);
        }
        let finals: Vec<f64> = res.replicates.iter().map(|r| r.final_record().test_error).collect();
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        assert!((res.summary.err_mean - mean).abs() <= 1e-12);
        assert_eq!(res, run_experiment(&small_cfg(), &ds).unwrap());
    }

    #[test]
    fn sweep_mu_zero_queries_everything() {
        let ds = synthetic(300, 4);
        let s = sweep_mu(&small_cfg(), &ds, &[0.0, 0.6]).unwrap();
        assert_eq!(s.rows[0].queries_mean, 210.0);
        assert_eq!(s.rows[0].epsilon_floor, 210.0);
        assert!(s.rows[0].queries_mean >= s.rows[1].epsilon_floor);
        assert!(sweep_mu(&small_cfg(), &ds, &[1.0]).is_err());
        assert!(sweep_mu(&small_cfg(), &ds, &[]).is_err());
    }

    #[test]
    fn qbb_budget_matches_active_queries() {
        let ds = synthetic(300, 5);
        let cfg = ExperimentConfig {
            qbb: QbbSettings {
                candidate_size: 20,
                boost_rounds: 10,
                ..Default::default()
            },
            ..small_cfg()
        };
        let cmp = match_budget_qbb(&cfg, &ds).unwrap();
        for row in &cmp.rows {
            assert_eq!(row.budget, row.qbb_queries);
        }
    }

    #[test]
    fn qbb_run_requires_budget() {
        let ds = synthetic(100, 6);
        let cfg = ExperimentConfig {
            algo: Algo::Qbb,
            ..small_cfg()
        };
        assert!(matches!(run_experiment(&cfg, &ds), Err(Error::Replicate { .. })));
        let cfg = ExperimentConfig {
            qbb: QbbSettings {
                budget: Some(30),
                candidate_size: 10,
                boost_rounds: 5,
                ..Default::default()
            },
            eval_every: Some(1),
            ..cfg
        };
        let res = run_experiment(&cfg, &ds).unwrap();
        assert_eq!(res.summary.queries_mean, 30.0);
        assert_eq!(res.aggregate.first().unwrap().t, 10);
        assert_eq!(res.aggregate.last().unwrap().t, 30);
    }

    #[test]
    fn config_validation() {
        let bad = [
            ExperimentConfig { replicates: 0, ..Default::default() },
            ExperimentConfig { split: 1.0, ..Default::default() },
            ExperimentConfig { mu: 1.0, ..Default::default() },
            ExperimentConfig { eval_every: Some(0), ..Default::default() },
            ExperimentConfig { stumps_per_dim: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
        assert!(ExperimentConfig::default().validate().is_ok());
    }
}
