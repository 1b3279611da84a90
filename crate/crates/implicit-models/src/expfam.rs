//! The shared contract for conditional distributions in exponential-family
//! form: `p(target | given; θ) ∝ exp(⟨η(given, target), θ⟩)`.
//!
//! Every model trained in this crate exposes its sufficient statistics through
//! this trait, which is what makes the gradient computations plain statistic
//! differences.

use crate::error::Result;
use crate::prob::{normalize, ProbVector};
use crate::rng::RngStream;

/// A conditional distribution `p(target | given; θ)` with sufficient
/// statistics `η` and a natural parameter vector `θ`.
pub trait ExpFamConditional {
    type Given: Clone;
    type Target: Clone;

    fn feature_dim(&self) -> usize;

    fn params(&self) -> &[f64];

    fn params_mut(&mut self) -> &mut [f64];

    /// Sufficient statistics `η(given, target)`, of length [`feature_dim`].
    ///
    /// [`feature_dim`]: ExpFamConditional::feature_dim
    fn features(&self, given: &Self::Given, target: &Self::Target) -> Vec<f64>;

    /// `⟨η(given, target), θ⟩`, the log unnormalized density.
    fn score(&self, given: &Self::Given, target: &Self::Target) -> f64 {
        dot(&self.features(given, target), self.params())
    }

    /// `log Z(given, θ)`: exact summation for discrete targets, closed form
    /// for Gaussian targets.
    fn log_norm(&self, given: &Self::Given) -> Result<f64>;

    /// `log p(target | given; θ) = ⟨η, θ⟩ − log Z(given, θ)`.
    fn log_prob(&self, given: &Self::Given, target: &Self::Target) -> Result<f64> {
        Ok(self.score(given, target) - self.log_norm(given)?)
    }

    fn sample(&self, given: &Self::Given, rng: &mut RngStream) -> Result<Self::Target>;

    /// Clamps parameters back into the feasible region after an update.
    /// Returns the number of coordinates that needed correction.
    fn project(&mut self) -> usize {
        0
    }
}

/// Conditionals whose target space is small enough to enumerate, enabling
/// exact normalization and exact expected statistics.
pub trait EnumerableTargets: ExpFamConditional {
    fn targets(&self) -> Vec<Self::Target>;

    /// Exact conditional over the enumerated targets.
    fn conditional(&self, given: &Self::Given) -> Result<ProbVector> {
        let scores: Vec<f64> = self
            .targets()
            .iter()
            .map(|t| self.score(given, t))
            .collect();
        normalize(&scores)
    }

    /// `E_{p(·|given)}[η(given, ·)]` by enumeration.
    fn expected_features(&self, given: &Self::Given) -> Result<Vec<f64>> {
        let targets = self.targets();
        let p = self.conditional(given)?;
        let mut out = vec![0.0; self.feature_dim()];
        for (i, t) in targets.iter().enumerate() {
            let f = self.features(given, t);
            for (o, v) in out.iter_mut().zip(f) {
                *o += p[i] * v;
            }
        }
        Ok(out)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn axpy(acc: &mut [f64], scale: f64, v: &[f64]) {
    debug_assert_eq!(acc.len(), v.len());
    for (a, x) in acc.iter_mut().zip(v) {
        *a += scale * x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::TablePosterior;
    use crate::prob::TOLERANCES;

    #[test]
    fn zero_params_are_uniform() {
        let m = TablePosterior::zeros(4, 5);
        for x in 0..4 {
            for y in 0..5 {
                let lp = m.log_prob(&x, &y).unwrap();
                assert!((lp - (1.0f64 / 5.0).ln()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn log_probs_normalize() {
        let mut rng = crate::rng::RngStream::new(13);
        for _ in 0..20 {
            let m = TablePosterior::random(3, 4, 2.0, &mut rng);
            for x in 0..3 {
                let total: f64 = (0..4)
                    .map(|y| m.log_prob(&x, &y).unwrap().exp())
                    .sum();
                assert!(
                    (total - 1.0).abs() <= TOLERANCES.probability,
                    "sum {total}"
                );
            }
        }
    }

    #[test]
    fn log_prob_matches_direct_enumeration() {
        let mut rng = crate::rng::RngStream::new(14);
        let m = TablePosterior::random(2, 4, 3.0, &mut rng);
        for x in 0..2 {
            let scores: Vec<f64> = (0..4).map(|y| m.score(&x, &y)).collect();
            let z: f64 = scores.iter().map(|s| s.exp()).sum();
            for y in 0..4 {
                let direct = (scores[y].exp() / z).ln();
                let lp = m.log_prob(&x, &y).unwrap();
                assert!((lp - direct).abs() < 1e-12);
            }
        }
    }
}
