//! Decision-stump base models and the symmetric collection they form.
//!
//! An [`Ensemble`] is the ordered set of base classifiers whose convex
//! combinations are learned. Every stump is stored next to its negation, so
//! model `2k + 1` is always `-(model 2k)`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::example::{Example, Label};
use crate::mirror::check_simplex;

/// Threshold classifier on a single feature.
///
/// Predicts `polarity` when `x[dim] > threshold` and `-polarity` otherwise,
/// so a point lying exactly on the threshold gets `-polarity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub dim: usize,
    pub threshold: f64,
    pub polarity: Label,
}

impl Stump {
    pub fn new(dim: usize, threshold: f64, polarity: Label) -> Self {
        Stump {
            dim,
            threshold,
            polarity,
        }
    }

    pub fn negated(&self) -> Self {
        let polarity = match self.polarity {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        };
        Stump { polarity, ..*self }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        let v = x.get(self.dim).ok_or_else(|| {
            Error::input(format!(
                "stump dimension {} out of range for a {}-dimensional point",
                self.dim,
                x.len()
            ))
        })?;
        Ok(self.predict_value(*v))
    }

    #[inline]
    fn predict_value(&self, v: f64) -> Label {
        let above = v > self.threshold;
        match (above, self.polarity) {
            (true, p) => p,
            (false, Label::Positive) => Label::Negative,
            (false, Label::Negative) => Label::Positive,
        }
    }

    fn key(&self) -> (usize, u64, i8) {
        // +0.0 folds -0.0 into 0.0 so both hash the same
        (self.dim, (self.threshold + 0.0).to_bits(), self.polarity.into())
    }
}

/// Outputs of every base model at one point, each exactly `-1` or `+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionVector {
    values: Vec<i8>,
}

impl PredictionVector {
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `<theta, b(x)>`. The caller guarantees `theta.len() == self.len()`.
    #[inline]
    pub fn dot(&self, theta: &[f64]) -> f64 {
        debug_assert_eq!(theta.len(), self.values.len());
        self.values
            .iter()
            .zip(theta)
            .map(|(&b, &w)| if b > 0 { w } else { -w })
            .sum()
    }
}

/// Ordered, symmetric collection of stumps over a `d`-dimensional space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    models: Vec<Stump>,
    d: usize,
}

impl Ensemble {
    /// Wraps an explicit model list. Fails unless the list is nonempty, every
    /// stump indexes a valid dimension, and the list is closed under negation.
    pub fn new(models: Vec<Stump>, d: usize) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::input("ensemble must contain at least one model"));
        }
        for s in &models {
            if s.dim >= d {
                return Err(Error::input(format!(
                    "stump dimension {} out of range for d = {d}",
                    s.dim
                )));
            }
            if !s.threshold.is_finite() {
                return Err(Error::input("stump threshold must be finite"));
            }
        }
        let keys: HashSet<_> = models.iter().map(Stump::key).collect();
        if let Some(s) = models.iter().find(|s| !keys.contains(&s.negated().key())) {
            return Err(Error::input(format!(
                "ensemble is not symmetric: negation of {s:?} is missing"
            )));
        }
        Ok(Ensemble { models, d })
    }

    /// Builds the symmetric closure of `base`: each stump followed by its
    /// negation, with exact duplicates removed.
    pub fn symmetric(base: impl IntoIterator<Item = Stump>, d: usize) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut models = Vec::new();
        for s in base {
            for m in [s, s.negated()] {
                if seen.insert(m.key()) {
                    models.push(m);
                }
            }
        }
        Ensemble::new(models, d)
    }

    pub fn models(&self) -> &[Stump] {
        &self.models
    }

    /// Number of base models `M`.
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn predict_vector(&self, x: &[f64]) -> Result<PredictionVector> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: x.len(),
            });
        }
        let values = self
            .models
            .iter()
            .map(|s| s.predict_value(x[s.dim]).into())
            .collect();
        Ok(PredictionVector { values })
    }

    /// `f(x) = <theta, b(x)>`, always in `[-1, 1]` for `theta` on the simplex.
    pub fn aggregate_score(&self, theta: &[f64], x: &[f64]) -> Result<f64> {
        check_simplex(theta, self.len())?;
        Ok(self.predict_vector(x)?.dot(theta))
    }
}

/// Candidate stumps before symmetric closure and deduplication:
/// for each dimension, `stumps_per_dim` positive-polarity stumps at the
/// `k / (stumps_per_dim + 1)` empirical quantiles, each followed by its
/// negation. The result always has `2 * d * stumps_per_dim` entries.
pub fn stump_grid_candidates(train: &[Example], stumps_per_dim: usize) -> Result<(Vec<Stump>, usize)> {
    let first = train
        .first()
        .ok_or_else(|| Error::input("cannot build stumps from an empty training set"))?;
    if stumps_per_dim == 0 {
        return Err(Error::input("stumps_per_dim must be at least 1"));
    }
    let d = first.dim();
    if d == 0 {
        return Err(Error::input("examples must have at least one feature"));
    }
    if let Some(bad) = train.iter().find(|e| e.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.dim(),
        });
    }

    let mut out = Vec::with_capacity(2 * d * stumps_per_dim);
    let mut column = Vec::with_capacity(train.len());
    for dim in 0..d {
        column.clear();
        column.extend(train.iter().map(|e| e.features[dim]));
        if column.iter().any(|v| !v.is_finite()) {
            return Err(Error::input(format!("feature {dim} has non-finite values")));
        }
        column.sort_by(f64::total_cmp);
        for k in 1..=stumps_per_dim {
            let q = k as f64 / (stumps_per_dim + 1) as f64;
            let s = Stump::new(dim, quantile_sorted(&column, q), Label::Positive);
            out.push(s);
            out.push(s.negated());
        }
    }
    Ok((out, d))
}

/// Stump grid over the training sample with symmetric closure and duplicate
/// removal. `M` can be smaller than `2 * d * stumps_per_dim` when quantiles
/// coincide, e.g. on a constant feature.
pub fn build_stump_grid(train: &[Example], stumps_per_dim: usize) -> Result<Ensemble> {
    let (candidates, d) = stump_grid_candidates(train, stumps_per_dim)?;
    Ensemble::symmetric(candidates, d)
}

/// Linear-interpolation quantile of a sorted, nonempty slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    if frac == 0.0 || lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}
