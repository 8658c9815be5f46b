#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smd_ama::harness::Dataset;
use smd_ama::{Example, Label};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bernoulli_label(rng: &mut ChaCha8Rng, p_pos: f64) -> Label {
    if rng.random::<f64>() < p_pos {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// Noisy labels from a sparse linear rule over `d` uniform features.
pub fn noisy_linear(n: usize, d: usize, noise: f64, seed: u64) -> Vec<Example> {
    let mut r = rng(seed);
    let w: Vec<f64> = (0..d).map(|j| if j < 3 { 1.0 / (j + 1) as f64 } else { 0.0 }).collect();
    let bias: f64 = w.iter().sum::<f64>() / 2.0;
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| r.random::<f64>()).collect();
            let s: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() - bias;
            let clean = if s > 0.0 { Label::Positive } else { Label::Negative };
            let y = if r.random::<f64>() < noise {
                match clean {
                    Label::Positive => Label::Negative,
                    Label::Negative => Label::Positive,
                }
            } else {
                clean
            };
            Example::labeled(x, y)
        })
        .collect()
}

pub fn dataset(name: &str, examples: Vec<Example>) -> Dataset {
    Dataset::new(name, examples).unwrap()
}

pub fn write_csv(path: &std::path::Path, examples: &[Example]) {
    let mut s = String::from("f0");
    for j in 1..examples[0].dim() {
        s.push_str(&format!(",f{j}"));
    }
    s.push_str(",class\n");
    for e in examples {
        for v in &e.features {
            s.push_str(&format!("{v},"));
        }
        s.push_str(if e.label == Some(Label::Positive) { "pos\n" } else { "neg\n" });
    }
    std::fs::write(path, s).unwrap();
}
