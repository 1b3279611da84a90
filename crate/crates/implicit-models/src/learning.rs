//! Training engines: the implicit-model stochastic gradient step driven by
//! reverse chains, the conditional-likelihood baseline with optional L2
//! regularization, step-size schedules, batching and gradient clipping.

use crate::coupling::{sample_reverse_chain, Chain};
use crate::error::{Error, Result};
use crate::expfam::{axpy, EnumerableTargets, ExpFamConditional};
use crate::rng::RngStream;

/// Step-size schedule; `t` is the 1-based update index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    Constant,
    /// `λ/t`, never below `floor`.
    InvT { floor: f64 },
    /// `λ/√t`, never below `floor`.
    InvSqrtT { floor: f64 },
}

impl Schedule {
    pub fn rate(&self, base: f64, t: usize) -> f64 {
        match self {
            Schedule::Constant => base,
            Schedule::InvT { floor } => (base / t as f64).max(*floor),
            Schedule::InvSqrtT { floor } => (base / (t as f64).sqrt()).max(*floor),
        }
    }
}

/// Shared knobs for both trainers.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub step_size: f64,
    pub schedule: Schedule,
    pub epochs: usize,
    pub batch_size: usize,
    /// L2 weight on the mean log-likelihood objective (baseline only).
    pub l2_weight: f64,
    pub seed: u64,
    /// Gibbs sweeps advanced per gradient update (segmentation only).
    pub gibbs_sweeps_per_update: usize,
    /// Reuse per-example chain states across updates (segmentation only).
    pub warm_start: bool,
    /// Sampled elements per reverse chain; odd, minimum 3.
    pub chain_steps: usize,
    /// Per-batch gradient clip at this infinity norm; `None` disables.
    pub clip_inf_norm: Option<f64>,
    /// When set, the returned parameters are the average of the iterates
    /// over this final fraction of epochs (Polyak-style tail averaging for
    /// the stochastic trainer).
    pub tail_average: Option<f64>,
}

impl TrainConfig {
    /// Preset L2 weight for the weakly regularized baseline.
    pub const WEAK_L2: f64 = 1e-3;
    /// Preset L2 weight for the strongly regularized baseline.
    pub const STRONG_L2: f64 = 1e-1;

    pub fn new(step_size: f64, epochs: usize, seed: u64) -> Self {
        Self {
            step_size,
            epochs,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size >= 0.0) {
            return Err(Error::InvalidConfig("step size must be >= 0".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be >= 1".into()));
        }
        if self.l2_weight < 0.0 {
            return Err(Error::InvalidConfig("l2 weight must be >= 0".into()));
        }
        if self.chain_steps < 3 || self.chain_steps % 2 == 0 {
            return Err(Error::InvalidConfig(
                "chain steps must be odd and >= 3".into(),
            ));
        }
        if self.gibbs_sweeps_per_update == 0 {
            return Err(Error::InvalidConfig("gibbs sweeps must be >= 1".into()));
        }
        if let Some(frac) = self.tail_average {
            if !(0.0 < frac && frac <= 1.0) {
                return Err(Error::InvalidConfig(
                    "tail-average fraction must be in (0, 1]".into(),
                ));
            }
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            step_size: 0.1,
            schedule: Schedule::Constant,
            epochs: 100,
            batch_size: usize::MAX,
            l2_weight: 0.0,
            seed: 0,
            gibbs_sweeps_per_update: 1,
            warm_start: true,
            chain_steps: 3,
            clip_inf_norm: Some(10.0),
            tail_average: None,
        }
    }
}

/// The pair of parameter increments produced by one implicit step.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair {
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
}

impl GradientPair {
    pub fn zeros(d1: usize, d2: usize) -> Self {
        Self {
            g1: vec![0.0; d1],
            g2: vec![0.0; d2],
        }
    }

    pub fn add_scaled(&mut self, other: &GradientPair, scale: f64) {
        axpy(&mut self.g1, scale, &other.g1);
        axpy(&mut self.g2, scale, &other.g2);
    }

    pub fn scale(&mut self, s: f64) {
        self.g1.iter_mut().for_each(|v| *v *= s);
        self.g2.iter_mut().for_each(|v| *v *= s);
    }
}

/// Rescales `g` in place so its infinity norm is at most `max_norm`.
pub fn clip_inf_norm(g: &mut [f64], max_norm: f64) {
    let norm = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if norm > max_norm {
        let s = max_norm / norm;
        g.iter_mut().for_each(|v| *v *= s);
    }
}

/// Assembles the gradient pair from a sampled reverse chain and the training
/// pair `(x*, y*)`.
///
/// For the minimal chain `(x*, ỹ, x̃, ŷ)` this is
/// `g1 = η₁(x̃,ỹ) − η₁(x̃,ŷ) + η₁(x*,y*) − η₁(x*,ỹ)` and
/// `g2 = η₂(x*,ỹ) − η₂(x̃,ỹ)`; longer chains extend the same telescoping
/// pattern down the chain. A chain of one step degenerates to the stochastic
/// conditional-likelihood gradient with `g2 = 0`.
pub fn gradients_from_chain<X, Y, P, L>(
    posterior: &P,
    likelihood: &L,
    x_star: &X,
    y_star: &Y,
    chain: &Chain<X, Y>,
) -> GradientPair
where
    X: Clone,
    Y: Clone,
    P: ExpFamConditional<Given = X, Target = Y>,
    L: ExpFamConditional<Given = Y, Target = X>,
{
    let labels = chain.labels();
    let obs = chain.observations();
    assert!(!labels.is_empty(), "chain must contain at least one label");

    // Data-fit term at the anchor.
    let mut data_part = vec![0.0; posterior.feature_dim()];
    axpy(&mut data_part, 1.0, &posterior.features(x_star, y_star));
    axpy(&mut data_part, -1.0, &posterior.features(x_star, labels[0]));
    // Chain terms: each generated observation is an extra labeled example,
    // with the following label draw standing in for the model expectation.
    let mut chain_part = vec![0.0; posterior.feature_dim()];
    for (i, x) in obs.iter().enumerate() {
        if i + 1 < labels.len() {
            axpy(&mut chain_part, 1.0, &posterior.features(x, labels[i]));
            axpy(&mut chain_part, -1.0, &posterior.features(x, labels[i + 1]));
        }
    }
    let g1: Vec<f64> = data_part
        .iter()
        .zip(&chain_part)
        .map(|(d, c)| d + c)
        .collect();

    let mut g2 = vec![0.0; likelihood.feature_dim()];
    let mut prev_x: &X = x_star;
    for (i, x) in obs.iter().enumerate() {
        axpy(&mut g2, 1.0, &likelihood.features(labels[i], prev_x));
        axpy(&mut g2, -1.0, &likelihood.features(labels[i], x));
        prev_x = x;
    }

    let pair = GradientPair { g1, g2 };
    debug_assert!(
        decomposition_holds(posterior, likelihood, x_star, y_star, chain, &pair),
        "gradient decomposition check failed"
    );
    pair
}

/// Recomputes the statistic differences from scratch and compares exactly.
/// Only evaluated under `debug_assert!`.
fn decomposition_holds<X, Y, P, L>(
    posterior: &P,
    likelihood: &L,
    x_star: &X,
    y_star: &Y,
    chain: &Chain<X, Y>,
    pair: &GradientPair,
) -> bool
where
    X: Clone,
    Y: Clone,
    P: ExpFamConditional<Given = X, Target = Y>,
    L: ExpFamConditional<Given = Y, Target = X>,
{
    let labels = chain.labels();
    let obs = chain.observations();
    let mut data_part = vec![0.0; posterior.feature_dim()];
    axpy(&mut data_part, 1.0, &posterior.features(x_star, y_star));
    axpy(&mut data_part, -1.0, &posterior.features(x_star, labels[0]));
    let mut chain_part = vec![0.0; posterior.feature_dim()];
    for (i, x) in obs.iter().enumerate() {
        if i + 1 < labels.len() {
            axpy(&mut chain_part, 1.0, &posterior.features(x, labels[i]));
            axpy(&mut chain_part, -1.0, &posterior.features(x, labels[i + 1]));
        }
    }
    let g1_ok = pair
        .g1
        .iter()
        .zip(data_part.iter().zip(&chain_part))
        .all(|(g, (d, c))| *g == d + c);

    let mut g2 = vec![0.0; likelihood.feature_dim()];
    let mut prev_x: &X = x_star;
    for (i, x) in obs.iter().enumerate() {
        axpy(&mut g2, 1.0, &likelihood.features(labels[i], prev_x));
        axpy(&mut g2, -1.0, &likelihood.features(labels[i], x));
        prev_x = x;
    }
    g1_ok && pair.g2.iter().zip(&g2).all(|(a, b)| a == b)
}

/// One stochastic ascent step for a single training example: samples the
/// reverse chain `ỹ, x̃, ŷ` and returns the statistic-difference gradients.
pub fn implicit_sgd_step<X, Y, P, L>(
    posterior: &P,
    likelihood: &L,
    x_star: &X,
    y_star: &Y,
    chain_steps: usize,
    rng: &mut RngStream,
) -> Result<GradientPair>
where
    X: Clone,
    Y: Clone,
    P: ExpFamConditional<Given = X, Target = Y>,
    L: ExpFamConditional<Given = Y, Target = X>,
{
    let chain = sample_reverse_chain(posterior, likelihood, x_star, chain_steps, rng)?;
    Ok(gradients_from_chain(
        posterior, likelihood, x_star, y_star, &chain,
    ))
}

/// Exact conditional-likelihood gradient `η₁(x,y) − E[η₁(x,·)]` for models
/// with an enumerable target space.
pub fn cl_gradient<P>(posterior: &P, x: &P::Given, y: &P::Target) -> Result<Vec<f64>>
where
    P: EnumerableTargets,
{
    let mut g = posterior.features(x, y);
    let expected = posterior.expected_features(x)?;
    axpy(&mut g, -1.0, &expected);
    Ok(g)
}

/// Per-epoch record of a training run.
#[derive(Debug, Clone, Default)]
pub struct TrainTrace {
    /// Mean (penalized) conditional log-likelihood after each epoch.
    pub objective: Vec<f64>,
    /// Feasibility-projection corrections applied over the whole run.
    pub projections: usize,
    /// Total parameter updates performed.
    pub updates: usize,
}

fn shuffled_indices(n: usize, rng: &mut RngStream) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i + 1);
        idx.swap(i, j);
    }
    idx
}

fn mean_log_likelihood<P>(posterior: &P, dataset: &[(P::Given, P::Target)]) -> Result<f64>
where
    P: ExpFamConditional,
{
    let mut total = 0.0;
    for (x, y) in dataset {
        total += posterior.log_prob(x, y)?;
    }
    Ok(total / dataset.len() as f64)
}

/// Maximizes `mean_t log p(y_t|x_t;θ) − l2·‖θ‖²` by (mini-)batch gradient
/// ascent with exact per-example gradients. Deterministic given the seed.
pub fn train_conditional_likelihood<P>(
    dataset: &[(P::Given, P::Target)],
    posterior: &mut P,
    config: &TrainConfig,
) -> Result<TrainTrace>
where
    P: EnumerableTargets,
{
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::InvalidConfig("empty dataset".into()));
    }
    let mut rng = RngStream::new(config.seed);
    let batch = config.batch_size.min(dataset.len());
    let mut trace = TrainTrace::default();
    let mut t = 0usize;
    for _epoch in 0..config.epochs {
        let order = shuffled_indices(dataset.len(), &mut rng);
        let prev = posterior.params().to_vec();
        for chunk in order.chunks(batch) {
            let mut g = vec![0.0; posterior.feature_dim()];
            for &i in chunk {
                let (x, y) = &dataset[i];
                axpy(&mut g, 1.0, &cl_gradient(posterior, x, y)?);
            }
            let inv = 1.0 / chunk.len() as f64;
            g.iter_mut().for_each(|v| *v *= inv);
            if config.l2_weight > 0.0 {
                axpy(&mut g, -2.0 * config.l2_weight, posterior.params());
            }
            if let Some(max_norm) = config.clip_inf_norm {
                clip_inf_norm(&mut g, max_norm);
            }
            t += 1;
            let rate = config.schedule.rate(config.step_size, t);
            axpy(posterior.params_mut(), rate, &g);
            trace.projections += posterior.project();
            trace.updates += 1;
        }
        let penalty = config.l2_weight
            * posterior.params().iter().map(|p| p * p).sum::<f64>();
        let objective = mean_log_likelihood(posterior, dataset)? - penalty;
        if !objective.is_finite() {
            posterior.params_mut().copy_from_slice(&prev);
            return Err(Error::Diverged {
                epoch: _epoch,
                detail: format!("objective {objective}"),
            });
        }
        trace.objective.push(objective);
    }
    Ok(trace)
}

/// Trains the implicit pair by repeating [`implicit_sgd_step`] over the
/// dataset, averaging gradient pairs inside each batch.
pub fn train_implicit<X, Y, P, L>(
    dataset: &[(X, Y)],
    posterior: &mut P,
    likelihood: &mut L,
    config: &TrainConfig,
) -> Result<TrainTrace>
where
    X: Clone,
    Y: Clone,
    P: ExpFamConditional<Given = X, Target = Y>,
    L: ExpFamConditional<Given = Y, Target = X>,
{
    train_implicit_traced(dataset, posterior, likelihood, config, |_, _, _| {})
}

/// [`train_implicit`] with a per-epoch hook for diagnostics (for example the
/// strong-consistency residual of the current pair).
pub fn train_implicit_traced<X, Y, P, L, H>(
    dataset: &[(X, Y)],
    posterior: &mut P,
    likelihood: &mut L,
    config: &TrainConfig,
    mut epoch_hook: H,
) -> Result<TrainTrace>
where
    X: Clone,
    Y: Clone,
    P: ExpFamConditional<Given = X, Target = Y>,
    L: ExpFamConditional<Given = Y, Target = X>,
    H: FnMut(usize, &P, &L),
{
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::InvalidConfig("empty dataset".into()));
    }
    let root = RngStream::new(config.seed);
    let mut order_rng = root.split(u64::MAX);
    let batch = config.batch_size.min(dataset.len());
    let mut trace = TrainTrace::default();
    let mut t = 0usize;
    let tail_start = config
        .tail_average
        .map(|frac| config.epochs - ((config.epochs as f64 * frac).ceil() as usize).clamp(1, config.epochs));
    let mut tail_sum1 = vec![0.0; posterior.feature_dim()];
    let mut tail_sum2 = vec![0.0; likelihood.feature_dim()];
    let mut tail_count = 0usize;
    for epoch in 0..config.epochs {
        let epoch_stream = root.split(epoch as u64);
        let order = shuffled_indices(dataset.len(), &mut order_rng);
        let prev1 = posterior.params().to_vec();
        let prev2 = likelihood.params().to_vec();
        for chunk in order.chunks(batch) {
            let mut mean = GradientPair::zeros(posterior.feature_dim(), likelihood.feature_dim());
            for &i in chunk {
                let (x, y) = &dataset[i];
                let mut ex_rng = epoch_stream.split(i as u64);
                let g = implicit_sgd_step(
                    posterior,
                    likelihood,
                    x,
                    y,
                    config.chain_steps,
                    &mut ex_rng,
                )?;
                mean.add_scaled(&g, 1.0);
            }
            mean.scale(1.0 / chunk.len() as f64);
            if let Some(max_norm) = config.clip_inf_norm {
                clip_inf_norm(&mut mean.g1, max_norm);
                clip_inf_norm(&mut mean.g2, max_norm);
            }
            t += 1;
            let rate = config.schedule.rate(config.step_size, t);
            axpy(posterior.params_mut(), rate, &mean.g1);
            axpy(likelihood.params_mut(), rate, &mean.g2);
            trace.projections += posterior.project() + likelihood.project();
            trace.updates += 1;
        }
        if posterior.params().iter().any(|p| !p.is_finite())
            || likelihood.params().iter().any(|p| !p.is_finite())
        {
            posterior.params_mut().copy_from_slice(&prev1);
            likelihood.params_mut().copy_from_slice(&prev2);
            return Err(Error::Diverged {
                epoch,
                detail: "non-finite parameters".into(),
            });
        }
        if let Some(start) = tail_start {
            if epoch >= start {
                axpy(&mut tail_sum1, 1.0, posterior.params());
                axpy(&mut tail_sum2, 1.0, likelihood.params());
                tail_count += 1;
            }
        }
        let objective = mean_log_likelihood(posterior, dataset)?;
        trace.objective.push(objective);
        epoch_hook(epoch, posterior, likelihood);
    }
    if tail_count > 0 {
        let inv = 1.0 / tail_count as f64;
        for (p, s) in posterior.params_mut().iter_mut().zip(&tail_sum1) {
            *p = s * inv;
        }
        for (p, s) in likelihood.params_mut().iter_mut().zip(&tail_sum2) {
            *p = s * inv;
        }
        trace.projections += posterior.project() + likelihood.project();
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expfam::EnumerableTargets;
    use crate::oracle::{central_difference, TableLikelihood, TablePosterior, ToyDiscreteModel};
    use crate::prob::{normalize, ProbVector};

    #[test]
    fn telescoping_gives_zero_gradient() {
        // Point-mass posterior at label 0 and point-mass likelihood at x = 2:
        // the sampled chain repeats (x*, y*) so all differences cancel.
        let mut model = ToyDiscreteModel::zeros(4, 3);
        for x in 0..4 {
            for y in 0..3 {
                model.posterior.theta_mut()[x * 3 + y] = if y == 0 { 300.0 } else { -300.0 };
                model.likelihood.theta_mut()[x * 3 + y] = if x == 2 { 300.0 } else { -300.0 };
            }
        }
        let mut rng = RngStream::new(1);
        let g = implicit_sgd_step(&model.posterior, &model.likelihood, &2, &0, 3, &mut rng)
            .unwrap();
        assert!(g.g1.iter().all(|v| *v == 0.0));
        assert!(g.g2.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn one_step_chain_is_stochastic_cl_gradient() {
        let mut rng = RngStream::new(2);
        let model = ToyDiscreteModel::random(4, 3, 1.0, &mut rng);
        let (x_star, y_star) = (1usize, 2usize);
        let chain = crate::coupling::sample_reverse_chain(
            &model.posterior,
            &model.likelihood,
            &x_star,
            1,
            &mut rng.split(9),
        )
        .unwrap();
        let g = gradients_from_chain(&model.posterior, &model.likelihood, &x_star, &y_star, &chain);
        let y_tilde = *chain.labels()[0];
        let mut expect = model.posterior.features(&x_star, &y_star);
        axpy(&mut expect, -1.0, &model.posterior.features(&x_star, &y_tilde));
        assert_eq!(g.g1, expect);
        assert!(g.g2.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn cl_gradient_uniform_at_zero_params() {
        let model = TablePosterior::zeros(3, 4);
        let g = cl_gradient(&model, &1, &2).unwrap();
        // η(x,y) − mean over targets of η(x,y′).
        let mut expect = model.features(&1, &2);
        for y in 0..4 {
            axpy(&mut expect, -0.25, &model.features(&1, &y));
        }
        for (a, b) in g.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn cl_gradient_matches_finite_differences() {
        let mut rng = RngStream::new(3);
        let model = TablePosterior::random(3, 4, 1.5, &mut rng);
        let (x, y) = (2usize, 1usize);
        let grad = cl_gradient(&model, &x, &y).unwrap();
        let theta = model.params().to_vec();
        let fd = central_difference(
            |p| {
                let mut m = model.clone();
                m.params_mut().copy_from_slice(p);
                m.log_prob(&x, &y).unwrap()
            },
            &theta,
            1e-5,
        );
        for (g, f) in grad.iter().zip(&fd) {
            let denom = f.abs().max(1e-8);
            assert!(
                ((g - f) / denom).abs() <= 1e-6,
                "analytic {g} vs fd {f}"
            );
        }
    }

    #[test]
    fn cl_training_fits_one_example() {
        let mut posterior = TablePosterior::zeros(2, 3);
        let data = vec![(0usize, 1usize)];
        let config = TrainConfig {
            step_size: 1.0,
            epochs: 400,
            seed: 1,
            clip_inf_norm: None,
            ..TrainConfig::default()
        };
        let trace = train_conditional_likelihood(&data, &mut posterior, &config).unwrap();
        let last = *trace.objective.last().unwrap();
        assert!(last < 0.0 && last > -0.05, "objective {last}");
        // Objective is non-decreasing toward 0 from below.
        assert!(trace.objective.first().unwrap() <= trace.objective.last().unwrap());
    }

    #[test]
    fn strong_l2_drives_parameters_to_zero() {
        let mut rng = RngStream::new(4);
        let mut posterior = TablePosterior::random(2, 3, 1.0, &mut rng);
        let data: Vec<(usize, usize)> = (0..6).map(|i| (i % 2, i % 3)).collect();
        let config = TrainConfig {
            step_size: 0.01,
            epochs: 2000,
            l2_weight: 20.0,
            seed: 2,
            ..TrainConfig::default()
        };
        train_conditional_likelihood(&data, &mut posterior, &config).unwrap();
        let norm = posterior.params().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(norm < 3e-2, "norm {norm}");
        // Predictions near uniform.
        let p = posterior.conditional(&0).unwrap();
        for y in 0..3 {
            assert!((p[y] - 1.0 / 3.0).abs() < 0.02);
        }
    }

    #[test]
    fn zero_step_size_leaves_parameters_unchanged() {
        let mut rng = RngStream::new(5);
        let model = ToyDiscreteModel::random(3, 3, 1.0, &mut rng);
        let mut posterior = model.posterior.clone();
        let mut likelihood = model.likelihood.clone();
        let before1 = posterior.params().to_vec();
        let before2 = likelihood.params().to_vec();
        let data = vec![(0usize, 0usize), (1, 2), (2, 1)];
        let config = TrainConfig {
            step_size: 0.0,
            epochs: 7,
            seed: 3,
            ..TrainConfig::default()
        };
        train_implicit(&data, &mut posterior, &mut likelihood, &config).unwrap();
        assert_eq!(posterior.params(), &before1[..]);
        assert_eq!(likelihood.params(), &before2[..]);
    }

    #[test]
    fn seed_determinism_bitwise() {
        let mut rng = RngStream::new(6);
        let model = ToyDiscreteModel::random(4, 3, 0.8, &mut rng);
        let data: Vec<(usize, usize)> = (0..12).map(|i| (i % 4, (i * 7) % 3)).collect();
        let config = TrainConfig {
            step_size: 0.2,
            epochs: 25,
            batch_size: 4,
            seed: 11,
            ..TrainConfig::default()
        };
        let mut run = |seed: u64| {
            let mut p = model.posterior.clone();
            let mut l = model.likelihood.clone();
            let cfg = TrainConfig { seed, ..config.clone() };
            train_implicit(&data, &mut p, &mut l, &cfg).unwrap();
            (p.params().to_vec(), l.params().to_vec())
        };
        let (p1, l1) = run(11);
        let (p2, l2) = run(11);
        assert_eq!(p1, p2);
        assert_eq!(l1, l2);
        let (p3, _) = run(12);
        assert_ne!(p1, p3);
    }

    #[test]
    fn batch_update_is_mean_of_example_gradients() {
        let mut rng = RngStream::new(7);
        let model = ToyDiscreteModel::random(3, 3, 0.7, &mut rng);
        let data: Vec<(usize, usize)> = vec![(0, 1), (1, 0), (2, 2), (1, 1)];
        let config = TrainConfig {
            step_size: 0.3,
            epochs: 1,
            seed: 21,
            clip_inf_norm: None,
            ..TrainConfig::default()
        };
        let mut posterior = model.posterior.clone();
        let mut likelihood = model.likelihood.clone();
        train_implicit(&data, &mut posterior, &mut likelihood, &config).unwrap();

        // Replay the exact same streams by hand.
        let root = RngStream::new(config.seed);
        let mut order_rng = root.split(u64::MAX);
        let order = shuffled_indices(data.len(), &mut order_rng);
        let epoch_stream = root.split(0);
        let mut mean = GradientPair::zeros(9, 9);
        for &i in &order {
            let (x, y) = &data[i];
            let mut ex_rng = epoch_stream.split(i as u64);
            let g = implicit_sgd_step(&model.posterior, &model.likelihood, x, y, 3, &mut ex_rng)
                .unwrap();
            mean.add_scaled(&g, 1.0);
        }
        mean.scale(1.0 / data.len() as f64);
        for i in 0..9 {
            let applied = posterior.params()[i] - model.posterior.params()[i];
            assert!((applied - config.step_size * mean.g1[i]).abs() <= 1e-12);
            let applied = likelihood.params()[i] - model.likelihood.params()[i];
            assert!((applied - config.step_size * mean.g2[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn schedules_decay_with_floor() {
        let s = Schedule::InvT { floor: 0.01 };
        assert!((s.rate(1.0, 1) - 1.0).abs() < 1e-15);
        assert!((s.rate(1.0, 4) - 0.25).abs() < 1e-15);
        assert!((s.rate(1.0, 1000) - 0.01).abs() < 1e-15);
        let s = Schedule::InvSqrtT { floor: 0.0 };
        assert!((s.rate(2.0, 4) - 1.0).abs() < 1e-15);
    }

    /// Posterior whose statistics ignore the conditioning value: the
    /// generative extreme.
    #[derive(Debug, Clone)]
    struct MarginalPosterior {
        ny: usize,
        theta: Vec<f64>,
    }

    impl ExpFamConditional for MarginalPosterior {
        type Given = usize;
        type Target = usize;
        fn feature_dim(&self) -> usize {
            self.ny
        }
        fn params(&self) -> &[f64] {
            &self.theta
        }
        fn params_mut(&mut self) -> &mut [f64] {
            &mut self.theta
        }
        fn features(&self, _x: &usize, y: &usize) -> Vec<f64> {
            let mut f = vec![0.0; self.ny];
            f[*y] = 1.0;
            f
        }
        fn log_norm(&self, _x: &usize) -> crate::error::Result<f64> {
            Ok(crate::prob::log_sum_exp(&self.theta))
        }
        fn sample(&self, _x: &usize, rng: &mut RngStream) -> crate::error::Result<usize> {
            let p = normalize(&self.theta)?;
            Ok(crate::prob::sample_discrete(&p, rng))
        }
    }

    impl EnumerableTargets for MarginalPosterior {
        fn targets(&self) -> Vec<usize> {
            (0..self.ny).collect()
        }
    }

    #[test]
    fn posterior_constant_in_x_learns_label_marginal() {
        // Generative extreme: the posterior ignores x, so implicit training
        // fits only the label marginal.
        let mut posterior = MarginalPosterior {
            ny: 3,
            theta: vec![0.0; 3],
        };
        let mut rng = RngStream::new(8);
        let mut likelihood = TableLikelihood::random(4, 3, 0.5, &mut rng);
        // Empirical label frequencies 0.5 / 0.3 / 0.2 over 10 examples.
        let labels = [0, 0, 0, 0, 0, 1, 1, 1, 2, 2];
        let data: Vec<(usize, usize)> = labels
            .iter()
            .enumerate()
            .map(|(i, &y)| (i % 4, y))
            .collect();
        let config = TrainConfig {
            step_size: 0.5,
            schedule: Schedule::InvSqrtT { floor: 0.004 },
            epochs: 4000,
            seed: 5,
            ..TrainConfig::default()
        };
        train_implicit(&data, &mut posterior, &mut likelihood, &config).unwrap();
        let p = normalize(posterior.params()).unwrap();
        let expect = ProbVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        assert!(p.tv_distance(&expect) < 0.03, "tv {}", p.tv_distance(&expect));
    }
}
