//! Stream elements: a feature vector with an optional binary label.

use serde::{Deserialize, Serialize};

/// Binary class label, serialized as `-1` / `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    /// The label as a real sign, `-1.0` or `+1.0`.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    /// Label predicted by a real score. A zero score maps to `Positive`.
    #[inline]
    pub fn from_score(score: f64) -> Self {
        if score >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

impl From<Label> for i8 {
    fn from(l: Label) -> i8 {
        match l {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            -1 => Ok(Label::Negative),
            1 => Ok(Label::Positive),
            other => Err(format!("label must be -1 or +1, got {other}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub features: Vec<f64>,
    pub label: Option<Label>,
}

impl Example {
    pub fn labeled(features: Vec<f64>, label: Label) -> Self {
        Example {
            features,
            label: Some(label),
        }
    }

    pub fn unlabeled(features: Vec<f64>) -> Self {
        Example {
            features,
            label: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }
}
