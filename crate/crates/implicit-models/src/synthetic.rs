//! The artificial 1-D three-class study: the Gaussian generating model, the
//! quadratic-logistic-regression posterior, and the per-class Gaussian
//! likelihood in natural-parameter form (with an optional shared-variance
//! restriction for misspecification experiments).

use crate::error::{Error, Result};
use crate::expfam::{EnumerableTargets, ExpFamConditional};
use crate::prob::{log_sum_exp, normalize, sample_discrete};
use crate::rng::RngStream;

pub const NUM_CLASSES: usize = 3;

/// The data-generating mixture: uniform class prior, one Gaussian per class.
#[derive(Debug, Clone, Copy)]
pub struct GeneratorConfig {
    pub means: [f64; NUM_CLASSES],
    pub sigmas: [f64; NUM_CLASSES],
}

impl GeneratorConfig {
    /// Shared unit variance, means -1, 0, 1.
    pub fn well_specified() -> Self {
        Self {
            means: [-1.0, 0.0, 1.0],
            sigmas: [1.0, 1.0, 1.0],
        }
    }

    /// Heteroscedastic generator used for the misspecification study.
    pub fn misspecified() -> Self {
        Self {
            means: [-1.0, 0.0, 1.0],
            sigmas: [0.7, 1.0, 1.4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigmas.iter().any(|s| *s <= 0.0) {
            return Err(Error::InvalidConfig("sigma must be positive".into()));
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut RngStream) -> (f64, usize) {
        let y = rng.below(NUM_CLASSES);
        let x = rng.normal_with(self.means[y], self.sigmas[y]);
        (x, y)
    }
}

/// Draws `count` labeled observations from the generating model.
pub fn sample_generator(
    config: &GeneratorConfig,
    count: usize,
    rng: &mut RngStream,
) -> Vec<(f64, usize)> {
    (0..count).map(|_| config.sample(rng)).collect()
}

/// Quadratic logistic regression `p(y|x) ∝ exp(a_y x² + b_y x + c_y)`;
/// nine parameters laid out as `[a_0, b_0, c_0, a_1, ..., c_2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadLogReg {
    params: Vec<f64>,
}

/// Block one-hot statistics: the class block holds `(x², x, 1)`.
pub fn qlr_features(x: f64, y: usize) -> Vec<f64> {
    let mut f = vec![0.0; 3 * NUM_CLASSES];
    f[3 * y] = x * x;
    f[3 * y + 1] = x;
    f[3 * y + 2] = 1.0;
    f
}

impl QuadLogReg {
    pub fn zeros() -> Self {
        Self {
            params: vec![0.0; 3 * NUM_CLASSES],
        }
    }

    pub fn from_params(params: Vec<f64>) -> Result<Self> {
        if params.len() != 3 * NUM_CLASSES {
            return Err(Error::DimensionMismatch("expected 9 parameters".into()));
        }
        Ok(Self { params })
    }

    /// The posterior induced by the generating mixture itself
    /// (`a_y = -1/(2σ_y²)`, `b_y = μ_y/σ_y²`, `c_y = -μ_y²/(2σ_y²) - ln σ_y`).
    pub fn bayes_optimal(config: &GeneratorConfig) -> Self {
        let mut params = vec![0.0; 3 * NUM_CLASSES];
        for y in 0..NUM_CLASSES {
            let (mu, sigma) = (config.means[y], config.sigmas[y]);
            let var = sigma * sigma;
            params[3 * y] = -0.5 / var;
            params[3 * y + 1] = mu / var;
            params[3 * y + 2] = -0.5 * mu * mu / var - sigma.ln();
        }
        Self { params }
    }

    fn class_score(&self, x: f64, y: usize) -> f64 {
        let p = &self.params[3 * y..3 * y + 3];
        p[0] * x * x + p[1] * x + p[2]
    }

    /// Maximum a-posteriori class; ties break toward the smallest index.
    pub fn map_decision(&self, x: f64) -> usize {
        let mut best = 0;
        let mut best_score = self.class_score(x, 0);
        for y in 1..NUM_CLASSES {
            let s = self.class_score(x, y);
            if s > best_score {
                best = y;
                best_score = s;
            }
        }
        best
    }
}

impl ExpFamConditional for QuadLogReg {
    type Given = f64;
    type Target = usize;

    fn feature_dim(&self) -> usize {
        3 * NUM_CLASSES
    }

    fn params(&self) -> &[f64] {
        &self.params
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn features(&self, x: &f64, y: &usize) -> Vec<f64> {
        qlr_features(*x, *y)
    }

    fn score(&self, x: &f64, y: &usize) -> f64 {
        self.class_score(*x, *y)
    }

    fn log_norm(&self, x: &f64) -> Result<f64> {
        let scores: Vec<f64> = (0..NUM_CLASSES).map(|y| self.class_score(*x, y)).collect();
        Ok(log_sum_exp(&scores))
    }

    fn sample(&self, x: &f64, rng: &mut RngStream) -> Result<usize> {
        let scores: Vec<f64> = (0..NUM_CLASSES).map(|y| self.class_score(*x, y)).collect();
        Ok(sample_discrete(&normalize(&scores)?, rng))
    }
}

impl EnumerableTargets for QuadLogReg {
    fn targets(&self) -> Vec<usize> {
        (0..NUM_CLASSES).collect()
    }
}

/// Feasibility margin: the quadratic natural parameter stays at or below
/// `-MIN_NEG_CURVATURE` so the implied variance is positive and bounded.
pub const MIN_NEG_CURVATURE: f64 = 1e-3;

/// Per-class Gaussians in natural form `p(x|y) ∝ exp(d_y x² + e_y x)`,
/// parameters `[d_0, e_0, d_1, e_1, d_2, e_2]`. With `shared_d` the three
/// curvatures are tied (the equal-variance restriction).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassGauss {
    params: Vec<f64>,
    shared_d: bool,
}

impl ClassGauss {
    /// Standard-normal members for every class (`d = -1/2`, `e = 0`); the
    /// all-zero natural parameter is improper, so this is the neutral
    /// feasible starting point.
    pub fn standard(shared_d: bool) -> Self {
        let mut params = vec![0.0; 2 * NUM_CLASSES];
        for y in 0..NUM_CLASSES {
            params[2 * y] = -0.5;
        }
        Self { params, shared_d }
    }

    pub fn from_params(params: Vec<f64>, shared_d: bool) -> Result<Self> {
        if params.len() != 2 * NUM_CLASSES {
            return Err(Error::DimensionMismatch("expected 6 parameters".into()));
        }
        let mut model = Self { params, shared_d };
        if (0..NUM_CLASSES).any(|y| model.d(y) > -MIN_NEG_CURVATURE) {
            return Err(Error::ImproperDistribution(
                "quadratic natural parameter must be negative".into(),
            ));
        }
        model.project();
        Ok(model)
    }

    /// Builds the class-conditional member from moments.
    pub fn from_moments(moments: [(f64, f64); NUM_CLASSES], shared_d: bool) -> Result<Self> {
        let mut params = vec![0.0; 2 * NUM_CLASSES];
        for (y, (mean, var)) in moments.iter().enumerate() {
            if *var <= 0.0 {
                return Err(Error::ImproperDistribution("variance must be positive".into()));
            }
            params[2 * y] = -0.5 / var;
            params[2 * y + 1] = mean / var;
        }
        Self::from_params(params, shared_d)
    }

    pub fn shared_d(&self) -> bool {
        self.shared_d
    }

    pub fn d(&self, y: usize) -> f64 {
        self.params[2 * y]
    }

    pub fn e(&self, y: usize) -> f64 {
        self.params[2 * y + 1]
    }

    /// Natural-to-moment conversion: `mean = -e/(2d)`, `var = -1/(2d)`.
    pub fn moments(&self, y: usize) -> (f64, f64) {
        let (d, e) = (self.d(y), self.e(y));
        (-e / (2.0 * d), -1.0 / (2.0 * d))
    }
}

impl ExpFamConditional for ClassGauss {
    type Given = usize;
    type Target = f64;

    fn feature_dim(&self) -> usize {
        2 * NUM_CLASSES
    }

    fn params(&self) -> &[f64] {
        &self.params
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn features(&self, y: &usize, x: &f64) -> Vec<f64> {
        let mut f = vec![0.0; 2 * NUM_CLASSES];
        f[2 * y] = x * x;
        f[2 * y + 1] = *x;
        f
    }

    fn score(&self, y: &usize, x: &f64) -> f64 {
        self.d(*y) * x * x + self.e(*y) * x
    }

    fn log_norm(&self, y: &usize) -> Result<f64> {
        let (d, e) = (self.d(*y), self.e(*y));
        if d >= 0.0 {
            return Err(Error::ImproperDistribution(format!(
                "d_{y} = {d} is not integrable"
            )));
        }
        // ∫ exp(d x² + e x) dx = sqrt(π / -d) · exp(-e² / (4d)).
        Ok(0.5 * (std::f64::consts::PI / -d).ln() - e * e / (4.0 * d))
    }

    fn sample(&self, y: &usize, rng: &mut RngStream) -> Result<f64> {
        let d = self.d(*y);
        if d >= 0.0 {
            return Err(Error::ImproperDistribution(format!(
                "d_{y} = {d} is not integrable"
            )));
        }
        let (mean, var) = self.moments(*y);
        Ok(rng.normal_with(mean, var.sqrt()))
    }

    fn project(&mut self) -> usize {
        let mut corrections = 0;
        if self.shared_d {
            let mean_d: f64 =
                (0..NUM_CLASSES).map(|y| self.d(y)).sum::<f64>() / NUM_CLASSES as f64;
            for y in 0..NUM_CLASSES {
                if self.params[2 * y] != mean_d {
                    self.params[2 * y] = mean_d;
                    corrections += 1;
                }
            }
        }
        for y in 0..NUM_CLASSES {
            if self.params[2 * y] > -MIN_NEG_CURVATURE {
                self.params[2 * y] = -MIN_NEG_CURVATURE;
                corrections += 1;
            }
        }
        corrections
    }
}

/// Draws one observation from the class-conditional Gaussian.
pub fn gauss_conditional_sample(model: &ClassGauss, y: usize, rng: &mut RngStream) -> Result<f64> {
    model.sample(&y, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expfam::dot;

    #[test]
    fn generator_degenerate_sigma_pins_samples_to_means() {
        let config = GeneratorConfig {
            means: [-1.0, 0.0, 1.0],
            sigmas: [1e-9; 3],
        };
        let mut rng = RngStream::new(1);
        for _ in 0..1000 {
            let (x, y) = config.sample(&mut rng);
            assert!((x - config.means[y]).abs() < 1e-6);
        }
    }

    #[test]
    fn generator_class_frequencies_uniform() {
        let config = GeneratorConfig::well_specified();
        let mut rng = RngStream::new(2);
        let n = 300_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[config.sample(&mut rng).1] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 1.0 / 3.0).abs() < 0.01);
        }
    }

    #[test]
    fn generator_per_class_moments() {
        let config = GeneratorConfig::well_specified();
        let mut rng = RngStream::new(3);
        let n = 100_000;
        let mut sums = [0.0f64; 3];
        let mut sq = [0.0f64; 3];
        let mut counts = [0usize; 3];
        for _ in 0..n {
            let (x, y) = config.sample(&mut rng);
            sums[y] += x;
            sq[y] += x * x;
            counts[y] += 1;
        }
        for y in 0..3 {
            let mean = sums[y] / counts[y] as f64;
            let var = sq[y] / counts[y] as f64 - mean * mean;
            assert!((mean - config.means[y]).abs() < 0.02, "mean[{y}] {mean}");
            assert!((var - 1.0).abs() < 0.02, "var[{y}] {var}");
        }
    }

    #[test]
    fn qlr_feature_layout() {
        assert_eq!(
            qlr_features(2.0, 0),
            vec![4.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            qlr_features(0.0, 2),
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn qlr_inner_product_reproduces_quadratic() {
        let mut rng = RngStream::new(4);
        for _ in 0..100 {
            let theta: Vec<f64> = (0..9).map(|_| rng.normal()).collect();
            let model = QuadLogReg::from_params(theta.clone()).unwrap();
            let x = 4.0 * rng.normal();
            let y = rng.below(3);
            let direct = theta[3 * y] * x * x + theta[3 * y + 1] * x + theta[3 * y + 2];
            assert!((dot(&qlr_features(x, y), &theta) - direct).abs() < 1e-12);
            assert!((model.score(&x, &y) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn qlr_softmax_sums_to_one_on_grid() {
        let mut rng = RngStream::new(5);
        let theta: Vec<f64> = (0..9).map(|_| rng.normal()).collect();
        let model = QuadLogReg::from_params(theta).unwrap();
        let mut x = -10.0;
        while x <= 10.0 {
            let total: f64 = (0..3).map(|y| model.log_prob(&x, &y).unwrap().exp()).sum();
            assert!((total - 1.0).abs() < 1e-10, "x={x} total {total}");
            x += 0.25;
        }
    }

    #[test]
    fn map_decision_tie_rule_and_shift_invariance() {
        let model = QuadLogReg::zeros();
        for x in [-3.0, 0.0, 2.5] {
            assert_eq!(model.map_decision(x), 0);
        }
        let mut rng = RngStream::new(6);
        let theta: Vec<f64> = (0..9).map(|_| rng.normal()).collect();
        let model = QuadLogReg::from_params(theta.clone()).unwrap();
        let mut shifted = theta.clone();
        for y in 0..3 {
            shifted[3 * y + 2] += 17.5;
        }
        let shifted = QuadLogReg::from_params(shifted).unwrap();
        for i in 0..100 {
            let x = -5.0 + 0.1 * i as f64;
            assert_eq!(model.map_decision(x), shifted.map_decision(x));
        }
    }

    #[test]
    fn map_decision_bayes_params_at_minus_two() {
        let model = QuadLogReg::bayes_optimal(&GeneratorConfig::well_specified());
        assert_eq!(model.map_decision(-2.0), 0);
        assert_eq!(model.map_decision(0.0), 1);
        assert_eq!(model.map_decision(2.0), 2);
    }

    #[test]
    fn gauss_natural_parameter_identities() {
        let model = ClassGauss::from_params(vec![-0.5, 0.0, -0.5, 1.0, -0.25, 0.0], false).unwrap();
        assert_eq!(model.moments(0), (0.0, 1.0));
        assert_eq!(model.moments(1), (1.0, 1.0));
        assert_eq!(model.moments(2), (0.0, 2.0));
    }

    #[test]
    fn gauss_sample_moments() {
        let model = ClassGauss::from_params(vec![-0.5, 0.0, -0.5, 1.0, -1.0, 0.5], false).unwrap();
        let mut rng = RngStream::new(7);
        for y in 0..3 {
            let (mean, var) = model.moments(y);
            let n = 100_000;
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let x = gauss_conditional_sample(&model, y, &mut rng).unwrap();
                s += x;
                s2 += x * x;
            }
            let m = s / n as f64;
            let v = s2 / n as f64 - m * m;
            assert!((m - mean).abs() < 0.02, "class {y} mean {m} vs {mean}");
            assert!((v - var).abs() < 0.02, "class {y} var {v} vs {var}");
        }
    }

    #[test]
    fn gauss_normalizer_matches_quadrature() {
        // exp of log_prob integrates to one over a wide grid.
        let model = ClassGauss::from_params(vec![-0.7, 0.3, -0.5, 0.0, -2.0, -1.0], false).unwrap();
        for y in 0..3 {
            let mut total = 0.0;
            let (lo, hi, n) = (-30.0, 30.0, 600_000);
            let h = (hi - lo) / n as f64;
            for i in 0..n {
                let x = lo + (i as f64 + 0.5) * h;
                total += model.log_prob(&y, &x).unwrap().exp() * h;
            }
            assert!((total - 1.0).abs() < 1e-6, "class {y} mass {total}");
        }
    }

    #[test]
    fn gauss_rejects_improper_parameters() {
        assert!(ClassGauss::from_params(vec![0.1, 0.0, -0.5, 0.0, -0.5, 0.0], false).is_err());
        let mut model = ClassGauss::standard(false);
        model.params_mut()[0] = 0.5;
        assert!(model.log_norm(&0).is_err());
        assert!(model.sample(&0, &mut RngStream::new(8)).is_err());
    }

    #[test]
    fn moment_round_trip_is_identity() {
        let mut rng = RngStream::new(9);
        for _ in 0..200 {
            let d = -(0.01 + 3.0 * rng.uniform());
            let e = 4.0 * rng.normal();
            let model =
                ClassGauss::from_params(vec![d, e, -0.5, 0.0, -0.5, 0.0], false).unwrap();
            let (mean, var) = model.moments(0);
            let back = ClassGauss::from_moments([(mean, var), (0.0, 1.0), (0.0, 1.0)], false)
                .unwrap();
            assert!((back.d(0) - d).abs() < 1e-12 * d.abs().max(1.0));
            assert!((back.e(0) - e).abs() < 1e-12 * e.abs().max(1.0));
        }
    }

    #[test]
    fn shared_d_projection_ties_curvatures() {
        let mut model =
            ClassGauss::from_params(vec![-0.4, 0.0, -0.6, 0.2, -0.8, -0.1], true).unwrap();
        assert_eq!(model.d(0), model.d(1));
        assert_eq!(model.d(1), model.d(2));
        // After a simulated update step the projection restores the tie.
        model.params_mut()[0] = -0.3;
        model.params_mut()[2] = -0.9;
        model.project();
        assert_eq!(model.d(0), model.d(1));
        assert_eq!(model.d(1), model.d(2));
        assert!(model.d(0) <= -MIN_NEG_CURVATURE);
    }
}
