//! Stream-based active aggregation (SMD-AMA) and its passive counterpart (SMD-PMA).
//!
//! Each round: score the incoming point with the previous iterate, turn the
//! score into a label-probability estimate, query the label with probability
//! `p_t = 4 p+ (1 - p+) (1 - eps_t) + eps_t`, and feed the importance-weighted
//! subgradient `(Q_t / p_t) L'(y <theta, b>) y b` into the dual-averaging
//! state. The state advances on every round, queried or not.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::{Ensemble, PredictionVector};
use crate::error::{Error, OracleError, Result};
use crate::example::{Example, Label};
use crate::loss::Loss;
use crate::mirror::{check_simplex, AggregatorState, Averaging};

/// Source of labels for queried points.
pub trait LabelOracle {
    /// Label of the point at stream position `index`.
    fn label(&mut self, index: usize, x: &[f64]) -> Result<Label, OracleError>;
}

/// Oracle that reveals stored labels by index.
#[derive(Debug, Clone)]
pub struct DatasetOracle {
    labels: Vec<Option<Label>>,
}

impl DatasetOracle {
    pub fn new(examples: &[Example]) -> Self {
        DatasetOracle {
            labels: examples.iter().map(|e| e.label).collect(),
        }
    }
}

impl LabelOracle for DatasetOracle {
    fn label(&mut self, index: usize, _x: &[f64]) -> Result<Label, OracleError> {
        self.labels
            .get(index)
            .copied()
            .flatten()
            .ok_or(OracleError::Missing(index))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryPolicy {
    /// Exploration exponent in `[0, 1)`; `eps_t = t^-mu`.
    pub mu: f64,
    pub seed: u64,
}

impl QueryPolicy {
    pub fn new(mu: f64, seed: u64) -> Result<Self> {
        check_mu(mu)?;
        Ok(QueryPolicy { mu, seed })
    }
}

/// `beta0` either fixed or derived from the excess-risk bound. Serializes as
/// `"auto"` or a number, like the command-line flag.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Beta0 {
    #[default]
    Auto,
    Fixed(f64),
}

impl Beta0 {
    pub fn resolve(self, loss: Loss, m: usize, mu: f64) -> Result<f64> {
        match self {
            Beta0::Auto => compute_beta0(loss, m, mu),
            Beta0::Fixed(b) if b > 0.0 && b.is_finite() => Ok(b),
            Beta0::Fixed(b) => Err(Error::input(format!("beta0 must be positive, got {b}"))),
        }
    }
}

impl Serialize for Beta0 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Beta0::Auto => s.serialize_str("auto"),
            Beta0::Fixed(b) => s.serialize_f64(*b),
        }
    }
}

impl<'de> Deserialize<'de> for Beta0 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Word(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(b) => Ok(Beta0::Fixed(b)),
            Repr::Word(w) => w.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl std::str::FromStr for Beta0 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Beta0::Auto);
        }
        match s.parse::<f64>() {
            Ok(b) if b > 0.0 && b.is_finite() => Ok(Beta0::Fixed(b)),
            _ => Err(format!("beta0 must be 'auto' or a positive number, got '{s}'")),
        }
    }
}

/// Everything decided in one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    /// 1-based round index.
    pub t: u64,
    pub epsilon: f64,
    pub p_plus: f64,
    pub p_query: f64,
    pub queried: bool,
    /// Present iff `queried`.
    pub label: Option<Label>,
    /// `<theta_{t-1}, b(x_t)>`.
    pub score: f64,
    /// `y_t * score`, known only when the label was queried.
    pub margin: Option<f64>,
}

fn check_mu(mu: f64) -> Result<()> {
    if (0.0..1.0).contains(&mu) {
        Ok(())
    } else {
        Err(Error::input(format!("mu must lie in [0, 1), got {mu}")))
    }
}

/// `eps_t = t^-mu` for `t >= 1`.
pub fn epsilon_schedule(mu: f64, t: u64) -> Result<f64> {
    if t == 0 {
        return Err(Error::input("rounds are numbered from 1"));
    }
    Ok((t as f64).powf(-mu))
}

/// `4 p+ (1 - p+) (1 - eps) + eps`, always in `[eps, 1]`.
pub fn query_probability(p_plus: f64, epsilon: f64) -> f64 {
    4.0 * p_plus * (1.0 - p_plus) * (1.0 - epsilon) + epsilon
}

/// Importance-weighted stochastic subgradient at `theta_prev`.
///
/// Zero when the point was not queried. The label is ignored in that case.
pub fn iw_gradient(
    loss: Loss,
    theta_prev: &[f64],
    b: &PredictionVector,
    label: Option<Label>,
    queried: bool,
    p_query: f64,
) -> Result<Vec<f64>> {
    if theta_prev.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            found: theta_prev.len(),
        });
    }
    let mut g = vec![0.0; b.len()];
    let score = b.dot(theta_prev);
    iw_gradient_into(loss, score, b, label, queried, p_query, &mut g)?;
    Ok(g)
}

fn iw_gradient_into(
    loss: Loss,
    score: f64,
    b: &PredictionVector,
    label: Option<Label>,
    queried: bool,
    p_query: f64,
    out: &mut [f64],
) -> Result<()> {
    if !(p_query > 0.0 && p_query <= 1.0) {
        return Err(Error::input(format!("query probability must be in (0, 1], got {p_query}")));
    }
    if !queried {
        out.iter_mut().for_each(|v| *v = 0.0);
        return Ok(());
    }
    let y = label
        .ok_or_else(|| Error::Protocol("point marked as queried but no label supplied".into()))?
        .sign();
    let coef = loss.derivative(y * score) * y / p_query;
    for (o, &bj) in out.iter_mut().zip(b.values()) {
        *o = if bj > 0 { coef } else { -coef };
    }
    Ok(())
}

/// `beta0 = sqrt( L^2 / (2 log M * sqrt(2^(mu+1)) * (1 + mu)) )` with `L` the
/// loss's Lipschitz bound on `[-1, 1]`.
pub fn compute_beta0(loss: Loss, m: usize, mu: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::input(format!("beta0 needs at least 2 models, got {m}")));
    }
    check_mu(mu)?;
    let l = loss.lipschitz_bound();
    let denom = 2.0 * (m as f64).ln() * 2f64.powf(mu + 1.0).sqrt() * (1.0 + mu);
    Ok((l * l / denom).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    Active,
    Passive,
}

/// Sequential learner over a stream. One instance per run.
#[derive(Debug, Clone)]
pub struct Learner<'e> {
    ensemble: &'e Ensemble,
    loss: Loss,
    mode: Mode,
    state: AggregatorState,
    rng: ChaCha8Rng,
    grad: Vec<f64>,
    queries: u64,
    sum_p: f64,
}

impl<'e> Learner<'e> {
    /// SMD-AMA learner. Query decisions draw from a ChaCha8 stream seeded by
    /// `policy.seed`, one draw per round.
    pub fn active(
        ensemble: &'e Ensemble,
        loss: Loss,
        policy: QueryPolicy,
        beta0: Beta0,
        averaging: Averaging,
    ) -> Result<Self> {
        check_mu(policy.mu)?;
        let m = ensemble.len();
        let b0 = beta0.resolve(loss, m, policy.mu)?;
        Ok(Learner {
            ensemble,
            loss,
            mode: Mode::Active,
            state: AggregatorState::new(m, b0, policy.mu)?.with_averaging(averaging),
            rng: ChaCha8Rng::seed_from_u64(policy.seed),
            grad: vec![0.0; m],
            queries: 0,
            sum_p: 0.0,
        })
    }

    /// SMD-PMA learner: every label is observed and `p_t = 1`.
    pub fn passive(ensemble: &'e Ensemble, loss: Loss, beta0: Beta0, averaging: Averaging) -> Result<Self> {
        let m = ensemble.len();
        let b0 = beta0.resolve(loss, m, 0.0)?;
        Ok(Learner {
            ensemble,
            loss,
            mode: Mode::Passive,
            state: AggregatorState::new(m, b0, 0.0)?.with_averaging(averaging),
            rng: ChaCha8Rng::seed_from_u64(0),
            grad: vec![0.0; m],
            queries: 0,
            sum_p: 0.0,
        })
    }

    pub fn state(&self) -> &AggregatorState {
        &self.state
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Sum of query probabilities so far.
    pub fn sum_query_probability(&self) -> f64 {
        self.sum_p
    }

    /// Processes the point at stream position `index`. On oracle failure the
    /// learner is left unchanged and the error carries no partial trace.
    pub fn step(&mut self, index: usize, x: &[f64], oracle: &mut dyn LabelOracle) -> Result<RoundTrace> {
        let b = self.ensemble.predict_vector(x)?;
        let t = self.state.rounds() + 1;
        let score = b.dot(self.state.theta());
        let p_plus = self.loss.prob_from_score(score);
        let (epsilon, p_query, queried) = match self.mode {
            Mode::Active => {
                let eps = epsilon_schedule(self.state.mu(), t)?;
                let p = query_probability(p_plus, eps);
                let u: f64 = self.rng.random();
                (eps, p, u < p)
            }
            Mode::Passive => (1.0, 1.0, true),
        };
        let label = if queried {
            let y = oracle.label(index, x).map_err(|source| Error::Oracle {
                round: t,
                source,
                partial: Vec::new(),
            })?;
            Some(y)
        } else {
            None
        };
        iw_gradient_into(self.loss, score, &b, label, queried, p_query, &mut self.grad)?;
        self.state.accumulate(&self.grad)?;
        self.queries += queried as u64;
        self.sum_p += p_query;
        Ok(RoundTrace {
            t,
            epsilon,
            p_plus,
            p_query,
            queried,
            label,
            score,
            margin: label.map(|y| y.sign() * score),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// Averaged iterate after the last round.
    pub theta_hat: Vec<f64>,
    pub traces: Vec<RoundTrace>,
}

impl RunOutput {
    pub fn queries(&self) -> usize {
        self.traces.iter().filter(|r| r.queried).count()
    }
}

fn drive(mut learner: Learner<'_>, stream: &[Example], oracle: &mut dyn LabelOracle) -> Result<RunOutput> {
    if stream.is_empty() {
        return Err(Error::input("stream is empty"));
    }
    let mut traces = Vec::with_capacity(stream.len());
    for (i, ex) in stream.iter().enumerate() {
        match learner.step(i, &ex.features, oracle) {
            Ok(tr) => traces.push(tr),
            Err(Error::Oracle { round, source, .. }) => {
                return Err(Error::Oracle {
                    round,
                    source,
                    partial: traces,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(RunOutput {
        theta_hat: learner.state.averaged_iterate()?,
        traces,
    })
}

/// Runs SMD-AMA over `stream`. Labels are obtained only through `oracle`;
/// labels stored on the stream examples are never read.
pub fn run_smd_ama(
    ensemble: &Ensemble,
    loss: Loss,
    stream: &[Example],
    oracle: &mut dyn LabelOracle,
    policy: QueryPolicy,
    beta0: Beta0,
) -> Result<RunOutput> {
    let learner = Learner::active(ensemble, loss, policy, beta0, Averaging::PostUpdate)?;
    drive(learner, stream, oracle)
}

/// Runs SMD-PMA over a fully labeled stream.
pub fn run_smd_pma(ensemble: &Ensemble, loss: Loss, stream: &[Example], beta0: Beta0) -> Result<RunOutput> {
    if let Some(i) = stream.iter().position(|e| e.label.is_none()) {
        return Err(Error::input(format!("passive run needs labels; example {i} has none")));
    }
    let learner = Learner::passive(ensemble, loss, beta0, Averaging::PostUpdate)?;
    drive(learner, stream, &mut DatasetOracle::new(stream))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub error_rate: f64,
    pub mean_loss: f64,
}

/// Labeled test set with base-model predictions computed once.
#[derive(Debug, Clone)]
pub struct Evaluator {
    preds: Vec<PredictionVector>,
    labels: Vec<Label>,
}

impl Evaluator {
    pub fn new(ensemble: &Ensemble, test: &[Example]) -> Result<Self> {
        if test.is_empty() {
            return Err(Error::input("test set is empty"));
        }
        let mut preds = Vec::with_capacity(test.len());
        let mut labels = Vec::with_capacity(test.len());
        for (i, e) in test.iter().enumerate() {
            let y = e
                .label
                .ok_or_else(|| Error::input(format!("test example {i} has no label")))?;
            preds.push(ensemble.predict_vector(&e.features)?);
            labels.push(y);
        }
        Ok(Evaluator { preds, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Error rate of an arbitrary classifier over base-model outputs.
    pub fn error_rate_with(&self, classify: impl Fn(&PredictionVector) -> Label) -> f64 {
        let errors = self
            .preds
            .iter()
            .zip(&self.labels)
            .filter(|(b, &y)| classify(b) != y)
            .count();
        errors as f64 / self.labels.len() as f64
    }

    /// Error of `sign(<theta, b(x)>)` (zero counts as `+1`) and mean loss.
    pub fn evaluate(&self, theta: &[f64], loss: Loss) -> Evaluation {
        let mut errors = 0usize;
        let mut total = 0.0;
        for (b, &y) in self.preds.iter().zip(&self.labels) {
            let z = b.dot(theta);
            errors += (Label::from_score(z) != y) as usize;
            total += loss.value(y.sign() * z);
        }
        let n = self.labels.len() as f64;
        Evaluation {
            error_rate: errors as f64 / n,
            mean_loss: total / n,
        }
    }
}

pub fn evaluate(ensemble: &Ensemble, theta: &[f64], loss: Loss, test: &[Example]) -> Result<Evaluation> {
    check_simplex(theta, ensemble.len())?;
    Ok(Evaluator::new(ensemble, test)?.evaluate(theta, loss))
}
