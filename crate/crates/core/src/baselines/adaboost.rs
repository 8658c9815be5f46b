//! Discrete AdaBoost over a fixed stump collection.

use serde::{Deserialize, Serialize};

use crate::ensemble::{Ensemble, PredictionVector};
use crate::error::{Error, Result};
use crate::example::{Example, Label};

/// Weighted error used in place of zero when a stump is perfect.
pub const PERFECT_STUMP_DELTA: f64 = 1e-6;

/// `h(x) = sum_k alpha_k b_{j_k}(x)` with every `alpha_k > 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoostedModel {
    /// `(model index, alpha)`, one entry per completed round.
    pub terms: Vec<(usize, f64)>,
    /// Weighted 0-1 error of the stump picked in each completed round.
    pub weighted_errors: Vec<f64>,
}

impl BoostedModel {
    pub fn rounds(&self) -> usize {
        self.terms.len()
    }

    /// `h(x)` from precomputed base-model predictions.
    pub fn score(&self, b: &PredictionVector) -> f64 {
        let v = b.values();
        self.terms.iter().map(|&(j, a)| a * v[j] as f64).sum()
    }

    pub fn predict(&self, b: &PredictionVector) -> Label {
        Label::from_score(self.score(b))
    }

    /// Weights normalized onto the simplex over `m` models; uniform when the
    /// model is empty. `sign(<theta, b>)` agrees with `sign(h)`.
    pub fn to_simplex(&self, m: usize) -> Vec<f64> {
        let total: f64 = self.terms.iter().map(|t| t.1).sum();
        if total <= 0.0 {
            return vec![1.0 / m as f64; m];
        }
        let mut theta = vec![0.0; m];
        for &(j, a) in &self.terms {
            theta[j] += a / total;
        }
        theta
    }

    /// The model after its first `rounds` rounds.
    pub fn truncated(&self, rounds: usize) -> BoostedModel {
        let r = rounds.min(self.terms.len());
        BoostedModel {
            terms: self.terms[..r].to_vec(),
            weighted_errors: self.weighted_errors[..r].to_vec(),
        }
    }

    /// `prod_k 2 sqrt(eps_k (1 - eps_k))`, the standard bound on training error.
    pub fn training_error_bound(&self) -> f64 {
        self.weighted_errors
            .iter()
            .map(|&e| 2.0 * (e * (1.0 - e)).sqrt())
            .product()
    }
}

/// `|h(x)|`.
pub fn boosted_margin(model: &BoostedModel, ensemble: &Ensemble, x: &[f64]) -> Result<f64> {
    if let Some(&(j, _)) = model.terms.iter().find(|(j, _)| *j >= ensemble.len()) {
        return Err(Error::input(format!("model index {j} out of range")));
    }
    Ok(model.score(&ensemble.predict_vector(x)?).abs())
}

/// `alpha = 0.5 ln((1 - eps) / eps)`, with `eps` floored at [`PERFECT_STUMP_DELTA`].
pub fn stump_weight(weighted_error: f64) -> f64 {
    let e = weighted_error.max(PERFECT_STUMP_DELTA);
    0.5 * ((1.0 - e) / e).ln()
}

pub fn adaboost_fit(ensemble: &Ensemble, labeled: &[Example], rounds: usize) -> Result<BoostedModel> {
    if labeled.is_empty() {
        return Err(Error::input("AdaBoost needs at least one labeled example"));
    }
    let mut preds = Vec::with_capacity(labeled.len());
    let mut labels = Vec::with_capacity(labeled.len());
    for (i, e) in labeled.iter().enumerate() {
        labels.push(
            e.label
                .ok_or_else(|| Error::input(format!("example {i} has no label")))?,
        );
        preds.push(ensemble.predict_vector(&e.features)?);
    }
    let refs: Vec<&PredictionVector> = preds.iter().collect();
    fit_predictions(&refs, &labels, ensemble.len(), rounds)
}

/// AdaBoost on precomputed predictions. Stops early when no stump beats
/// chance or a stump classifies every weighted example correctly.
pub(crate) fn fit_predictions(
    preds: &[&PredictionVector],
    labels: &[Label],
    m: usize,
    rounds: usize,
) -> Result<BoostedModel> {
    if preds.is_empty() {
        return Err(Error::input("AdaBoost needs at least one labeled example"));
    }
    if rounds == 0 {
        return Err(Error::input("AdaBoost needs at least one round"));
    }
    let n = preds.len();
    let mut w = vec![1.0 / n as f64; n];
    // agree[i][j]: does stump j classify example i correctly
    let agree: Vec<Vec<bool>> = preds
        .iter()
        .zip(labels)
        .map(|(b, &y)| {
            let y: i8 = y.into();
            b.values().iter().map(|&v| v == y).collect()
        })
        .collect();

    let mut model = BoostedModel::default();
    let mut err = vec![0.0; m];
    for _ in 0..rounds {
        err.iter_mut().for_each(|e| *e = 0.0);
        for (row, &wi) in agree.iter().zip(&w) {
            for (e, &ok) in err.iter_mut().zip(row) {
                if !ok {
                    *e += wi;
                }
            }
        }
        let (best, eps) = err
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (j, e)| if e < acc.1 { (j, e) } else { acc });
        if eps >= 0.5 {
            break;
        }
        let alpha = stump_weight(eps);
        model.terms.push((best, alpha));
        model.weighted_errors.push(eps);
        if eps == 0.0 {
            break;
        }
        let (up, down) = (alpha.exp(), (-alpha).exp());
        for (wi, row) in w.iter_mut().zip(&agree) {
            *wi *= if row[best] { down } else { up };
        }
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
    }
    Ok(model)
}
