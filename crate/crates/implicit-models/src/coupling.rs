//! Coupling a pair of conditional models into an implicitly defined joint:
//! stationary marginals by power iteration, the strong-consistency check, and
//! the alternating chains that drive stochastic training.

use crate::error::{Error, Result};
use crate::expfam::ExpFamConditional;
use crate::prob::{kahan_sum, ProbVector};
use crate::rng::RngStream;

/// Whether [`stationary_marginals`] insists on a strictly positive `B·A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityCheck {
    /// Error out unless every entry of `B·A` is strictly positive.
    Strict,
    /// Accept zeros and rely on power iteration converging; the returned
    /// residual still certifies the fixed point.
    Relaxed,
}

/// A pair of discrete conditionals `p(y|x)` and `p(x|y)` as column-stochastic
/// matrices: `A[y,x] = p(y|x)` (|Y|×|X|), `B[x,y] = p(x|y)` (|X|×|Y|).
#[derive(Debug, Clone)]
pub struct DiscreteConditionalPair {
    nx: usize,
    ny: usize,
    a: Vec<f64>, // a[y * nx + x]
    b: Vec<f64>, // b[x * ny + y]
}

impl DiscreteConditionalPair {
    pub fn new(nx: usize, ny: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != nx * ny || b.len() != nx * ny {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries per matrix, got a: {}, b: {}",
                nx * ny,
                a.len(),
                b.len()
            )));
        }
        for x in 0..nx {
            let col = kahan_sum((0..ny).map(|y| a[y * nx + x]));
            if (col - 1.0).abs() > 1e-12 || (0..ny).any(|y| a[y * nx + x] < 0.0) {
                return Err(Error::InvalidProbabilities(format!(
                    "column {x} of p(y|x) sums to {col}"
                )));
            }
        }
        for y in 0..ny {
            let col = kahan_sum((0..nx).map(|x| b[x * ny + y]));
            if (col - 1.0).abs() > 1e-12 || (0..nx).any(|x| b[x * ny + y] < 0.0) {
                return Err(Error::InvalidProbabilities(format!(
                    "column {y} of p(x|y) sums to {col}"
                )));
            }
        }
        Ok(Self { nx, ny, a, b })
    }

    /// Derives both conditionals from an explicit joint `p[x * ny + y]`.
    /// Requires strictly positive marginals.
    pub fn from_joint(nx: usize, ny: usize, joint: &[f64]) -> Result<Self> {
        if joint.len() != nx * ny {
            return Err(Error::DimensionMismatch("joint size".into()));
        }
        let px: Vec<f64> = (0..nx)
            .map(|x| kahan_sum((0..ny).map(|y| joint[x * ny + y])))
            .collect();
        let py: Vec<f64> = (0..ny)
            .map(|y| kahan_sum((0..nx).map(|x| joint[x * ny + y])))
            .collect();
        if px.iter().chain(py.iter()).any(|&m| m <= 0.0) {
            return Err(Error::InvalidProbabilities(
                "joint has a zero marginal".into(),
            ));
        }
        let mut a = vec![0.0; nx * ny];
        let mut b = vec![0.0; nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                a[y * nx + x] = joint[x * ny + y] / px[x];
                b[x * ny + y] = joint[x * ny + y] / py[y];
            }
        }
        Self::new(nx, ny, a, b)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// `p(y|x)`.
    pub fn a(&self, y: usize, x: usize) -> f64 {
        self.a[y * self.nx + x]
    }

    /// `p(x|y)`.
    pub fn b(&self, x: usize, y: usize) -> f64 {
        self.b[x * self.ny + y]
    }

    /// The |X|×|X| composition `C = B·A`, row-major.
    pub fn c_matrix(&self) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let mut c = vec![0.0; nx * nx];
        for x in 0..nx {
            for xp in 0..nx {
                c[x * nx + xp] =
                    kahan_sum((0..ny).map(|y| self.b(x, y) * self.a(y, xp)));
            }
        }
        c
    }

    /// `A · v` for a distribution `v` over X.
    pub fn apply_a(&self, v: &[f64]) -> Vec<f64> {
        (0..self.ny)
            .map(|y| kahan_sum((0..self.nx).map(|x| self.a(y, x) * v[x])))
            .collect()
    }

    /// `B · w` for a distribution `w` over Y.
    pub fn apply_b(&self, w: &[f64]) -> Vec<f64> {
        (0..self.nx)
            .map(|x| kahan_sum((0..self.ny).map(|y| self.b(x, y) * w[y])))
            .collect()
    }

    /// One forward step of the alternating chain: `x -> y ~ p(y|x) -> x' ~ p(x'|y)`.
    pub fn forward_step(&self, x: usize, rng: &mut RngStream) -> (usize, usize) {
        let col_a: Vec<f64> = (0..self.ny).map(|y| self.a(y, x)).collect();
        let y = sample_column(&col_a, rng);
        let col_b: Vec<f64> = (0..self.nx).map(|xp| self.b(xp, y)).collect();
        let xp = sample_column(&col_b, rng);
        (y, xp)
    }
}

fn sample_column(col: &[f64], rng: &mut RngStream) -> usize {
    let u = rng.uniform();
    let mut cum = 0.0;
    for (i, &v) in col.iter().enumerate() {
        cum += v;
        if u < cum {
            return i;
        }
    }
    col.len() - 1
}

/// Computes the pair of marginals fixed under the alternating chain:
/// `pX = (B·A)·pX` and `pY = A·pX`, by power iteration from the uniform
/// vector.
pub fn stationary_marginals(
    pair: &DiscreteConditionalPair,
    tol: f64,
    max_iter: usize,
    check: PositivityCheck,
) -> Result<(ProbVector, ProbVector)> {
    let nx = pair.nx();
    let c = pair.c_matrix();
    if check == PositivityCheck::Strict && c.iter().any(|&v| v <= 0.0) {
        return Err(Error::LemmaPreconditions);
    }
    let mut v = vec![1.0 / nx as f64; nx];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let mut next = vec![0.0; nx];
        for x in 0..nx {
            next[x] = kahan_sum((0..nx).map(|xp| c[x * nx + xp] * v[xp]));
        }
        let sum = kahan_sum(next.iter().copied());
        for n in &mut next {
            *n /= sum;
        }
        residual = v
            .iter()
            .zip(&next)
            .map(|(old, new)| (old - new).abs())
            .fold(0.0, f64::max);
        v = next;
        if residual <= tol {
            let px = ProbVector::new(v.clone())?;
            let py = ProbVector::new(pair.apply_a(&v))?;
            return Ok((px, py));
        }
    }
    Err(Error::NoConvergence { max_iter, residual })
}

/// Outcome of the strong-consistency check `p(x)·p(y|x) = p(y)·p(x|y)`.
#[derive(Debug, Clone, Copy)]
pub struct StrongImplicitCheck {
    pub holds: bool,
    pub max_residual: f64,
}

/// Checks whether the two conditionals and the given marginals reconstruct a
/// single common joint, reporting the worst-case entry residual.
pub fn check_strong_implicit(
    pair: &DiscreteConditionalPair,
    px: &ProbVector,
    py: &ProbVector,
    tol: f64,
) -> StrongImplicitCheck {
    let mut max_residual = 0.0f64;
    for x in 0..pair.nx() {
        for y in 0..pair.ny() {
            let lhs = px[x] * pair.a(y, x);
            let rhs = py[y] * pair.b(x, y);
            max_residual = max_residual.max((lhs - rhs).abs());
        }
    }
    StrongImplicitCheck {
        holds: max_residual <= tol,
        max_residual,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainDirection {
    Forward,
    Reverse,
}

/// One element of an alternating chain.
#[derive(Debug, Clone)]
pub enum ChainItem<X, Y> {
    Label(Y),
    Obs(X),
}

/// An alternating observation/label sequence anchored at a training
/// observation. Reverse chains start at the anchor and alternate
/// label, observation, label, ...
#[derive(Debug, Clone)]
pub struct Chain<X, Y> {
    start: X,
    items: Vec<ChainItem<X, Y>>,
    direction: ChainDirection,
}

impl<X: Clone, Y: Clone> Chain<X, Y> {
    pub fn start(&self) -> &X {
        &self.start
    }

    pub fn direction(&self) -> ChainDirection {
        self.direction
    }

    pub fn items(&self) -> &[ChainItem<X, Y>] {
        &self.items
    }

    /// Number of sampled elements (the anchor not included).
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Sampled labels in order: `ỹ, ŷ, ...`.
    pub fn labels(&self) -> Vec<&Y> {
        self.items
            .iter()
            .filter_map(|it| match it {
                ChainItem::Label(y) => Some(y),
                ChainItem::Obs(_) => None,
            })
            .collect()
    }

    /// Sampled observations in order: `x̃, ...`.
    pub fn observations(&self) -> Vec<&X> {
        self.items
            .iter()
            .filter_map(|it| match it {
                ChainItem::Obs(x) => Some(x),
                ChainItem::Label(_) => None,
            })
            .collect()
    }

    fn alternates(&self) -> bool {
        self.items.iter().enumerate().all(|(i, it)| {
            if i % 2 == 0 {
                matches!(it, ChainItem::Label(_))
            } else {
                matches!(it, ChainItem::Obs(_))
            }
        })
    }
}

/// Samples the reverse-direction chain of Algorithm-style training: starting
/// from the anchor `x*`, draw `ỹ ~ p(Y|x*)`, `x̃ ~ p(X|ỹ)`, `ŷ ~ p(Y|x̃)`, ...
/// for `steps` draws in total.
pub fn sample_reverse_chain<X, Y, P, L>(
    posterior: &P,
    likelihood: &L,
    x_star: &X,
    steps: usize,
    rng: &mut RngStream,
) -> Result<Chain<X, Y>>
where
    X: Clone,
    Y: Clone,
    P: ExpFamConditional<Given = X, Target = Y>,
    L: ExpFamConditional<Given = Y, Target = X>,
{
    assert!(steps >= 1, "chain needs at least one step");
    let mut items: Vec<ChainItem<X, Y>> = Vec::with_capacity(steps);
    let mut cur_x = x_star.clone();
    let mut cur_y: Option<Y> = None;
    for i in 0..steps {
        if i % 2 == 0 {
            let y = posterior.sample(&cur_x, rng)?;
            cur_y = Some(y.clone());
            items.push(ChainItem::Label(y));
        } else {
            let x = likelihood.sample(cur_y.as_ref().expect("label precedes obs"), rng)?;
            cur_x = x.clone();
            items.push(ChainItem::Obs(x));
        }
    }
    let chain = Chain {
        start: x_star.clone(),
        items,
        direction: ChainDirection::Reverse,
    };
    debug_assert!(chain.alternates());
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ToyDiscreteModel;
    use crate::prob::TOLERANCES;

    fn pair_from_random_joint(seed: u64, nx: usize, ny: usize) -> (DiscreteConditionalPair, Vec<f64>) {
        let mut rng = RngStream::new(seed);
        let mut joint: Vec<f64> = (0..nx * ny).map(|_| 0.05 + rng.uniform()).collect();
        let sum = kahan_sum(joint.iter().copied());
        for j in &mut joint {
            *j /= sum;
        }
        (
            DiscreteConditionalPair::from_joint(nx, ny, &joint).unwrap(),
            joint,
        )
    }

    #[test]
    fn stationary_symmetric_pair() {
        let a = vec![0.5, 0.5, 0.5, 0.5]; // both columns (0.5, 0.5)
        let b = vec![0.5, 0.5, 0.5, 0.5];
        let pair = DiscreteConditionalPair::new(2, 2, a, b).unwrap();
        let (px, py) =
            stationary_marginals(&pair, 1e-12, 10_000, PositivityCheck::Strict).unwrap();
        assert!((px[0] - 0.5).abs() < 1e-12);
        assert!((py[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn stationary_recovers_joint_marginals() {
        for seed in 0..20 {
            let (pair, joint) = pair_from_random_joint(100 + seed, 4, 3);
            let (px, py) =
                stationary_marginals(&pair, 1e-13, 100_000, PositivityCheck::Strict).unwrap();
            for x in 0..4 {
                let truth = kahan_sum((0..3).map(|y| joint[x * 3 + y]));
                assert!((px[x] - truth).abs() < 1e-10, "px[{x}]");
            }
            for y in 0..3 {
                let truth = kahan_sum((0..4).map(|x| joint[x * 3 + y]));
                assert!((py[y] - truth).abs() < 1e-10, "py[{y}]");
            }
        }
    }

    #[test]
    fn stationary_satisfies_both_fixed_points() {
        let (pair, _) = pair_from_random_joint(7, 5, 4);
        let tol = 1e-12;
        let (px, py) = stationary_marginals(&pair, tol, 100_000, PositivityCheck::Strict).unwrap();
        let ay = pair.apply_a(px.values());
        let bx = pair.apply_b(py.values());
        for y in 0..4 {
            assert!((py[y] - ay[y]).abs() <= tol);
        }
        for x in 0..5 {
            assert!((px[x] - bx[x]).abs() <= 10.0 * tol, "{}", (px[x] - bx[x]).abs());
        }
    }

    #[test]
    fn strict_mode_rejects_zero_entries() {
        // Both conditionals deterministic: C = B·A is the identity, with zeros.
        let a = vec![1.0, 0.0, 0.0, 1.0];
        let b = vec![1.0, 0.0, 0.0, 1.0];
        let pair = DiscreteConditionalPair::new(2, 2, a, b).unwrap();
        assert!(matches!(
            stationary_marginals(&pair, 1e-10, 1000, PositivityCheck::Strict),
            Err(Error::LemmaPreconditions)
        ));
        assert!(stationary_marginals(&pair, 1e-10, 1000, PositivityCheck::Relaxed).is_ok());
    }

    #[test]
    fn strong_check_holds_for_derived_pair() {
        let (pair, joint) = pair_from_random_joint(11, 4, 3);
        let (px, py) =
            stationary_marginals(&pair, 1e-13, 100_000, PositivityCheck::Strict).unwrap();
        let check = check_strong_implicit(&pair, &px, &py, 1e-12);
        assert!(check.holds, "residual {}", check.max_residual);
        // The reconstructed joint matches the original entrywise.
        for x in 0..4 {
            for y in 0..3 {
                let rebuilt = px[x] * pair.a(y, x);
                assert!((rebuilt - joint[x * 3 + y]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn strong_check_fails_for_independence_counterexample() {
        // p(x|y) ignores y while p(y|x) genuinely depends on x.
        let a = vec![0.9, 0.1, 0.1, 0.9]; // columns (0.9, 0.1) and (0.1, 0.9)
        let b = vec![0.5, 0.5, 0.5, 0.5];
        let pair = DiscreteConditionalPair::new(2, 2, a, b).unwrap();
        let (px, py) =
            stationary_marginals(&pair, 1e-12, 100_000, PositivityCheck::Strict).unwrap();
        let check = check_strong_implicit(&pair, &px, &py, 1e-12);
        assert!(!check.holds);
        assert!(check.max_residual > 1e-3, "residual {}", check.max_residual);
    }

    #[test]
    fn strong_check_residual_matches_brute_force() {
        let (pair, _) = pair_from_random_joint(13, 3, 5);
        let mut rng = RngStream::new(99);
        // Random marginals, not the stationary ones: residual is just the max.
        let raw: Vec<f64> = (0..3).map(|_| 0.2 + rng.uniform()).collect();
        let s = kahan_sum(raw.iter().copied());
        let px = ProbVector::new(raw.iter().map(|v| v / s).collect()).unwrap();
        let raw: Vec<f64> = (0..5).map(|_| 0.2 + rng.uniform()).collect();
        let s = kahan_sum(raw.iter().copied());
        let py = ProbVector::new(raw.iter().map(|v| v / s).collect()).unwrap();
        let check = check_strong_implicit(&pair, &px, &py, 1e-12);
        let mut brute = 0.0f64;
        for x in 0..3 {
            for y in 0..5 {
                brute = brute.max((px[x] * pair.a(y, x) - py[y] * pair.b(x, y)).abs());
            }
        }
        assert_eq!(check.max_residual, brute);
    }

    #[test]
    fn reverse_chain_minimal_layout() {
        let mut rng = RngStream::new(5);
        let model = ToyDiscreteModel::random(4, 3, 1.0, &mut rng);
        let chain =
            sample_reverse_chain(&model.posterior, &model.likelihood, &2, 3, &mut rng).unwrap();
        assert_eq!(*chain.start(), 2);
        assert_eq!(chain.len(), 3);
        assert_eq!(chain.labels().len(), 2);
        assert_eq!(chain.observations().len(), 1);
        assert_eq!(chain.direction(), ChainDirection::Reverse);
    }

    #[test]
    fn reverse_chain_point_mass_posterior() {
        // A posterior that is a point mass at label 1 for every x.
        let mut rng = RngStream::new(6);
        let mut model = ToyDiscreteModel::random(3, 3, 0.5, &mut rng);
        for x in 0..3 {
            for y in 0..3 {
                model.posterior.theta_mut()[x * 3 + y] = if y == 1 { 200.0 } else { -200.0 };
            }
        }
        for seed in 0..20 {
            let mut rng = RngStream::new(1000 + seed);
            let chain =
                sample_reverse_chain(&model.posterior, &model.likelihood, &0, 1, &mut rng)
                    .unwrap();
            match chain.items()[0] {
                ChainItem::Label(y) => assert_eq!(y, 1),
                _ => panic!("first item must be a label"),
            }
        }
    }

    #[test]
    fn reverse_chain_first_label_matches_exact_conditional() {
        use crate::expfam::EnumerableTargets;
        let mut rng = RngStream::new(8);
        let model = ToyDiscreteModel::random(4, 3, 1.2, &mut rng);
        let x_star = 1usize;
        let exact = model.posterior.conditional(&x_star).unwrap();
        let mut counts = vec![0usize; 3];
        let n = 100_000;
        for i in 0..n {
            let mut stream = rng.split(i as u64);
            let chain = sample_reverse_chain(
                &model.posterior,
                &model.likelihood,
                &x_star,
                1,
                &mut stream,
            )
            .unwrap();
            if let ChainItem::Label(y) = chain.items()[0] {
                counts[y] += 1;
            }
        }
        let empirical =
            ProbVector::new(counts.iter().map(|&c| c as f64 / n as f64).collect()).unwrap();
        assert!(empirical.tv_distance(&exact) <= 0.01);
    }

    #[test]
    fn forward_chain_converges_to_stationary() {
        // Long forward-simulated alternating chains: the empirical law of the
        // final observation approaches the stationary marginal.
        for seed in [21u64, 22, 23] {
            let (pair, _) = pair_from_random_joint(seed, 6, 4);
            let (px, _) =
                stationary_marginals(&pair, 1e-12, 100_000, PositivityCheck::Strict).unwrap();
            let base = RngStream::new(seed ^ 0xabcd);
            let chains = 20_000;
            let mut counts = vec![0usize; 6];
            for c in 0..chains {
                let mut rng = base.split(c);
                let mut x = rng.below(6);
                for _ in 0..200 {
                    let (_, xp) = pair.forward_step(x, &mut rng);
                    x = xp;
                }
                counts[x] += 1;
            }
            let empirical = ProbVector::new(
                counts.iter().map(|&c| c as f64 / chains as f64).collect(),
            )
            .unwrap();
            assert!(
                empirical.tv_distance(&px) <= 0.02,
                "tv {}",
                empirical.tv_distance(&px)
            );
        }
    }

    #[test]
    fn pair_validation_rejects_non_stochastic() {
        let a = vec![0.6, 0.5, 0.5, 0.5];
        let b = vec![0.5, 0.5, 0.5, 0.5];
        assert!(DiscreteConditionalPair::new(2, 2, a, b).is_err());
    }

    #[test]
    fn derived_pair_round_trips_tolerances() {
        let (pair, _) = pair_from_random_joint(31, 8, 8);
        let (px, _) = stationary_marginals(&pair, 1e-12, 100_000, PositivityCheck::Strict).unwrap();
        let sum = kahan_sum(px.values().iter().copied());
        assert!((sum - 1.0).abs() <= TOLERANCES.normalization);
    }
}
