//! Entropy-regularized dual averaging on the probability simplex.
//!
//! The state accumulates (sub)gradients in a dual vector `xi` and maps it to
//! the simplex through the negative gradient of the smoothed conjugate of the
//! normalized entropy `R(theta) = log M + sum_j theta_j log theta_j`:
//!
//! ```text
//! R*_beta(xi)       = beta * log( (1/M) * sum_j exp(-xi_j / beta) )
//! -grad R*_beta(xi) = softmax(-xi / beta)
//! ```
//!
//! The temperature grows as `beta_t = beta0 * (t + 1)^((1 + mu) / 2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum(theta) == 1` for simplex membership checks.
pub const SIMPLEX_TOL: f64 = 1e-9;

pub(crate) fn check_simplex(theta: &[f64], m: usize) -> Result<()> {
    if theta.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: theta.len(),
        });
    }
    if theta.iter().any(|&v| v.is_nan() || v < -SIMPLEX_TOL) {
        return Err(Error::input("weights must be nonnegative"));
    }
    let sum: f64 = theta.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::input(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

/// `beta0 * (t + 1)^((1 + mu) / 2)`.
pub fn beta_schedule(beta0: f64, mu: f64, t: u64) -> f64 {
    beta0 * ((t + 1) as f64).powf((1.0 + mu) / 2.0)
}

/// Conjugate `R*_beta(xi)` of the normalized entropy, evaluated with a
/// min-shift so no exponent is positive.
pub fn dual_value(xi: &[f64], beta: f64) -> f64 {
    assert!(!xi.is_empty(), "dual_value on an empty vector");
    let lo = xi.iter().copied().fold(f64::INFINITY, f64::min);
    let s: f64 = xi.iter().map(|&v| (-(v - lo) / beta).exp()).sum();
    -lo + beta * (s.ln() - (xi.len() as f64).ln())
}

/// `theta = softmax(-xi / beta)`.
pub fn primal_map(xi: &[f64], beta: f64) -> Vec<f64> {
    let mut out = vec![0.0; xi.len()];
    primal_map_into(xi, beta, &mut out);
    out
}

pub fn primal_map_into(xi: &[f64], beta: f64, out: &mut [f64]) {
    assert_eq!(xi.len(), out.len());
    let lo = xi.iter().copied().fold(f64::INFINITY, f64::min);
    let mut s = 0.0;
    for (o, &v) in out.iter_mut().zip(xi) {
        *o = (-(v - lo) / beta).exp();
        s += *o;
    }
    out.iter_mut().for_each(|o| *o /= s);
}

/// Which iterates enter the returned average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Averaging {
    /// `(theta_1 + ... + theta_T) / T`, the iterates produced by each update.
    #[default]
    PostUpdate,
    /// `(theta_0 + ... + theta_{T-1}) / T`, the iterates each gradient was taken at.
    PreUpdate,
}

/// Dual-averaging state for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatorState {
    xi: Vec<f64>,
    theta: Vec<f64>,
    theta_sum: Vec<f64>,
    t: u64,
    beta0: f64,
    mu: f64,
    averaging: Averaging,
}

impl AggregatorState {
    pub fn new(m: usize, beta0: f64, mu: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::input("number of models must be at least 1"));
        }
        if !(beta0 > 0.0 && beta0.is_finite()) {
            return Err(Error::input(format!("beta0 must be positive, got {beta0}")));
        }
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::input(format!("mu must lie in [0, 1), got {mu}")));
        }
        Ok(AggregatorState {
            xi: vec![0.0; m],
            theta: vec![1.0 / m as f64; m],
            theta_sum: vec![0.0; m],
            t: 0,
            beta0,
            mu,
            averaging: Averaging::PostUpdate,
        })
    }

    pub fn with_averaging(mut self, averaging: Averaging) -> Self {
        self.averaging = averaging;
        self
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// Current iterate `theta_t`.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Number of completed rounds.
    pub fn rounds(&self) -> u64 {
        self.t
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Temperature used for the current iterate.
    pub fn beta(&self) -> f64 {
        beta_schedule(self.beta0, self.mu, self.t)
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// One round: `xi += g`, advance `t` and `beta`, recompute `theta`.
    /// Runs on every round, including rounds where `g` is zero.
    pub fn accumulate(&mut self, g: &[f64]) -> Result<()> {
        if g.len() != self.xi.len() {
            return Err(Error::DimensionMismatch {
                expected: self.xi.len(),
                found: g.len(),
            });
        }
        if self.averaging == Averaging::PreUpdate {
            add_assign(&mut self.theta_sum, &self.theta);
        }
        add_assign(&mut self.xi, g);
        self.t += 1;
        let beta = beta_schedule(self.beta0, self.mu, self.t);
        primal_map_into(&self.xi, beta, &mut self.theta);
        if self.averaging == Averaging::PostUpdate {
            add_assign(&mut self.theta_sum, &self.theta);
        }
        Ok(())
    }

    /// Running average of the iterates, renormalized onto the simplex.
    pub fn averaged_iterate(&self) -> Result<Vec<f64>> {
        if self.t == 0 {
            return Err(Error::State("no rounds have been run; nothing to average".into()));
        }
        let n = self.t as f64;
        let mut avg: Vec<f64> = self.theta_sum.iter().map(|s| s / n).collect();
        let s: f64 = avg.iter().sum();
        avg.iter_mut().for_each(|v| *v /= s);
        Ok(avg)
    }
}

fn add_assign(acc: &mut [f64], v: &[f64]) {
    acc.iter_mut().zip(v).for_each(|(a, b)| *a += b);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_simplex(theta: &[f64], tol: f64) {
        assert!(theta.iter().all(|v| v.is_finite() && *v >= 0.0));
        assert!((theta.iter().sum::<f64>() - 1.0).abs() <= tol);
    }

    #[test]
    fn init_state() {
        let s = AggregatorState::new(4, 1.0, 0.3).unwrap();
        assert_eq!(s.theta(), &[0.25; 4]);
        assert_eq!(s.xi(), &[0.0; 4]);
        assert_eq!(s.rounds(), 0);
        assert_eq!(AggregatorState::new(1, 1.0, 0.0).unwrap().theta(), &[1.0]);
    }

    #[test]
    fn init_rejects_bad_parameters() {
        assert!(AggregatorState::new(0, 1.0, 0.0).is_err());
        assert!(AggregatorState::new(3, 0.0, 0.0).is_err());
        assert!(AggregatorState::new(3, -1.0, 0.0).is_err());
        assert!(AggregatorState::new(3, 1.0, 1.0).is_err());
        assert!(AggregatorState::new(3, 1.0, -0.1).is_err());
    }

    #[test]
    fn beta_schedule_values() {
        assert_eq!(beta_schedule(1.0, 0.0, 0), 1.0);
        assert_eq!(beta_schedule(1.0, 0.0, 3), 2.0);
        let b = beta_schedule(2.0, 0.3, 9);
        assert!((b - 2.0 * 10f64.powf(0.65)).abs() < 1e-12);
        assert!((b - 8.934).abs() < 1e-3);
        for t in 0..100 {
            assert!(beta_schedule(0.7, 0.3, t + 1) > beta_schedule(0.7, 0.3, t));
        }
    }

    #[test]
    fn dual_value_examples() {
        for beta in [0.1, 1.0, 7.5] {
            assert_eq!(dual_value(&[0.0; 5], beta), 0.0);
            let v = dual_value(&[0.0, beta * 3f64.ln()], beta);
            assert!((v - beta * (2.0f64 / 3.0).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn primal_map_examples() {
        assert_eq!(primal_map(&[0.0; 4], 0.3), vec![0.25; 4]);
        let beta = 1.7;
        let th = primal_map(&[0.0, beta * 3f64.ln()], beta);
        assert!((th[0] - 0.75).abs() < 1e-12 && (th[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn primal_map_is_stable_for_large_duals() {
        let xi = [1e4, -1e4, 5e3, -9.9e3, 0.0];
        let th = primal_map(&xi, 1.0);
        assert_simplex(&th, 1e-12);
        assert_eq!(th[1], 1.0);
        assert!(dual_value(&xi, 1.0).is_finite());
    }

    #[test]
    fn accumulate_is_additive() {
        let mut s = AggregatorState::new(3, 1.0, 0.3).unwrap();
        s.accumulate(&[1.0, -2.0, 0.5]).unwrap();
        s.accumulate(&[0.25, 1.0, -0.5]).unwrap();
        assert_eq!(s.xi(), &[1.25, -1.0, 0.0]);
        assert_eq!(s.rounds(), 2);
        assert!(matches!(
            s.accumulate(&[1.0]),
            Err(Error::DimensionMismatch { expected: 3, found: 1 })
        ));
    }

    #[test]
    fn zero_gradient_still_moves_theta() {
        let mut s = AggregatorState::new(3, 1.0, 0.5).unwrap();
        s.accumulate(&[-2.0, 0.0, 1.0]).unwrap();
        let before = s.theta().to_vec();
        s.accumulate(&[0.0; 3]).unwrap();
        let after = s.theta().to_vec();
        let beta = beta_schedule(1.0, 0.5, 2);
        let expect = primal_map(&[-2.0, 0.0, 1.0], beta);
        for (a, e) in after.iter().zip(&expect) {
            assert!((a - e).abs() < 1e-15);
        }
        // larger beta flattens the weights
        assert!(after[0] < before[0] && after[2] > before[2]);

        let mut z = AggregatorState::new(4, 2.0, 0.3).unwrap();
        z.accumulate(&[0.0; 4]).unwrap();
        assert_eq!(z.theta(), &[0.25; 4]);
    }

    #[test]
    fn averaging_modes() {
        let mut s = AggregatorState::new(2, 1.0, 0.0).unwrap();
        assert!(matches!(s.averaged_iterate(), Err(Error::State(_))));
        s.accumulate(&[0.0, 0.0]).unwrap();
        s.accumulate(&[0.0, 0.0]).unwrap();
        assert_eq!(s.averaged_iterate().unwrap(), vec![0.5, 0.5]);

        let g = [2.0, -1.0];
        let mut post = AggregatorState::new(2, 1.0, 0.0).unwrap();
        let mut pre = post.clone().with_averaging(Averaging::PreUpdate);
        post.accumulate(&g).unwrap();
        pre.accumulate(&g).unwrap();
        assert_eq!(pre.averaged_iterate().unwrap(), vec![0.5, 0.5]);
        let th1 = primal_map(&g, beta_schedule(1.0, 0.0, 1));
        let avg = post.averaged_iterate().unwrap();
        assert!((avg[0] - th1[0]).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn primal_map_shift_invariant(
            xi in prop::collection::vec(-50.0f64..50.0, 1..40),
            beta in 0.05f64..20.0,
            c in -100.0f64..100.0,
        ) {
            let shifted: Vec<f64> = xi.iter().map(|v| v + c).collect();
            let a = primal_map(&xi, beta);
            let b = primal_map(&shifted, beta);
            assert_simplex(&a, 1e-12);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-9 * x.max(1e-300).max(*y) + 1e-15);
            }
        }

        #[test]
        fn dual_value_nonincreasing_in_beta(
            xi in prop::collection::vec(-10.0f64..10.0, 1..30),
            b1 in 0.05f64..10.0,
            db in 0.0f64..10.0,
        ) {
            let lo = dual_value(&xi, b1);
            let hi = dual_value(&xi, b1 + db);
            prop_assert!(hi <= lo + 1e-12 * (1.0 + lo.abs()));
        }

        #[test]
        fn averages_stay_on_simplex(
            gs in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 6), 1..50),
            mu in 0.0f64..0.99,
        ) {
            let mut s = AggregatorState::new(6, 0.8, mu).unwrap();
            for g in &gs {
                s.accumulate(g).unwrap();
                assert_simplex(s.theta(), 1e-9);
            }
            assert_simplex(&s.averaged_iterate().unwrap(), 1e-9);
        }
    }
}
