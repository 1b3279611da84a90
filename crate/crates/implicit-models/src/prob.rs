//! Discrete probability primitives: validated probability vectors, stable
//! normalization of log-weights, and seeded categorical sampling.

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Central tolerance knobs shared by validation and property checks.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Absolute tolerance for "entries sum to one" checks.
    pub normalization: f64,
    /// Absolute tolerance for probability identities (e.g. sums of
    /// exponentiated log-densities).
    pub probability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            normalization: 1e-12,
            probability: 1e-10,
        }
    }
}

pub const TOLERANCES: Tolerances = Tolerances {
    normalization: 1e-12,
    probability: 1e-10,
};

/// Compensated (Kahan) summation.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// log(Σ exp(x_i)) with max-shift; `-inf` if every entry is `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + kahan_sum(xs.iter().map(|&x| (x - max).exp())).ln()
}

/// A finite discrete distribution: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    values: Vec<f64>,
}

impl ProbVector {
    /// Validates nonnegativity and normalization against the default
    /// [`Tolerances`].
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_tolerances(values, &TOLERANCES)
    }

    pub fn with_tolerances(values: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidProbabilities("empty support".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidProbabilities(format!(
                "negative or non-finite entry {v}"
            )));
        }
        let sum = kahan_sum(values.iter().copied());
        if (sum - 1.0).abs() > tol.normalization {
            return Err(Error::InvalidProbabilities(format!(
                "entries sum to {sum}, expected 1"
            )));
        }
        Ok(Self { values })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            values: vec![1.0 / n as f64; n],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Total-variation distance to another distribution on the same support.
    pub fn tv_distance(&self, other: &ProbVector) -> f64 {
        assert_eq!(self.len(), other.len());
        0.5 * kahan_sum(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(p, q)| (p - q).abs()),
        )
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Exponentiates and normalizes log-weights with a max shift.
///
/// Errors with [`Error::DegenerateDistribution`] when every entry is `-inf`,
/// and rejects `+inf`/NaN entries as improper.
pub fn normalize(log_weights: &[f64]) -> Result<ProbVector> {
    if log_weights.is_empty() {
        return Err(Error::InvalidProbabilities("empty support".into()));
    }
    if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
        return Err(Error::ImproperDistribution(
            "non-finite log-weight".into(),
        ));
    }
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::DegenerateDistribution);
    }
    let mut values: Vec<f64> = log_weights.iter().map(|&w| (w - max).exp()).collect();
    let sum = kahan_sum(values.iter().copied());
    for v in &mut values {
        *v /= sum;
    }
    Ok(ProbVector { values })
}

/// Draws an index `i` with probability `p[i]`, consuming exactly one uniform.
pub fn sample_discrete(p: &ProbVector, rng: &mut RngStream) -> usize {
    let u = rng.uniform();
    let mut cum = 0.0;
    for (i, &v) in p.values.iter().enumerate() {
        cum += v;
        if u < cum {
            return i;
        }
    }
    p.values.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_symmetric() {
        let p = normalize(&[0.0, 0.0, 0.0]).unwrap();
        for i in 0..3 {
            assert!((p[i] - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_analytic() {
        let p = normalize(&[2f64.ln(), 0.0]).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn normalize_large_magnitude() {
        // Entries near +700 overflow a naive exp; the max shift must not.
        let mut rng = RngStream::new(3);
        let w: Vec<f64> = (0..1000).map(|_| 690.0 + 20.0 * rng.uniform()).collect();
        let p = normalize(&w).unwrap();
        assert!(p.values().iter().all(|v| v.is_finite()));
        let sum = kahan_sum(p.values().iter().copied());
        assert!((sum - 1.0).abs() < 1e-12, "sum {sum}");
    }

    #[test]
    fn normalize_all_neg_inf_is_degenerate() {
        let err = normalize(&[f64::NEG_INFINITY, f64::NEG_INFINITY]).unwrap_err();
        assert!(matches!(err, Error::DegenerateDistribution));
    }

    #[test]
    fn normalize_shift_invariance() {
        let mut rng = RngStream::new(17);
        for _ in 0..50 {
            let v: Vec<f64> = (0..8).map(|_| 4.0 * rng.normal()).collect();
            let c = 100.0 * rng.normal();
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            let p = normalize(&v).unwrap();
            let q = normalize(&shifted).unwrap();
            for i in 0..v.len() {
                assert!((p[i] - q[i]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn sample_point_mass() {
        let p = ProbVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        let mut rng = RngStream::new(5);
        for _ in 0..100 {
            assert_eq!(sample_discrete(&p, &mut rng), 0);
        }
    }

    #[test]
    fn sample_fair_coin_frequency() {
        let p = ProbVector::new(vec![0.5, 0.5]).unwrap();
        let mut rng = RngStream::new(6);
        let n = 100_000;
        let zeros = (0..n).filter(|_| sample_discrete(&p, &mut rng) == 0).count();
        let freq = zeros as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.01, "freq {freq}");
    }

    #[test]
    fn sample_chi_squared_goodness_of_fit() {
        let probs = [0.2, 0.3, 0.5];
        let p = ProbVector::new(probs.to_vec()).unwrap();
        let mut rng = RngStream::new(7);
        let n = 100_000usize;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[sample_discrete(&p, &mut rng)] += 1;
        }
        let chi2: f64 = (0..3)
            .map(|i| {
                let expect = probs[i] * n as f64;
                (counts[i] as f64 - expect).powi(2) / expect
            })
            .sum();
        // p-value > 0.001 for 2 degrees of freedom: chi2 < -2 ln(0.001).
        let threshold = -2.0 * 0.001f64.ln();
        assert!(chi2 < threshold, "chi2 {chi2} >= {threshold}");
    }

    #[test]
    fn sample_consumes_one_uniform() {
        let p = ProbVector::new(vec![0.25, 0.75]).unwrap();
        let mut a = RngStream::new(8);
        let mut b = RngStream::new(8);
        sample_discrete(&p, &mut a);
        b.uniform();
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn prob_vector_rejects_bad_input() {
        assert!(ProbVector::new(vec![0.5, -0.1, 0.6]).is_err());
        assert!(ProbVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbVector::new(vec![]).is_err());
    }
}
