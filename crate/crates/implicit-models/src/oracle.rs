//! Independent brute-force verifiers used by tests and the `verify` command:
//! exact chain enumeration, a dense direct solve for stationary marginals,
//! numeric Bayes error by adaptive quadrature, and finite-difference gradient
//! checks. Everything here deliberately reimplements its numerics instead of
//! calling the production code paths it is meant to check.

use crate::coupling::DiscreteConditionalPair;
use crate::error::{Error, Result};
use crate::expfam::{EnumerableTargets, ExpFamConditional};
use crate::learning::GradientPair;
use crate::prob::{kahan_sum, log_sum_exp, normalize, sample_discrete, ProbVector};
use crate::rng::RngStream;
use crate::synthetic::GeneratorConfig;

/// Fully parameterized discrete posterior: `p(y|x) ∝ exp(θ[x,y])`, one
/// natural parameter per table cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TablePosterior {
    nx: usize,
    ny: usize,
    theta: Vec<f64>, // theta[x * ny + y]
}

impl TablePosterior {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            theta: vec![0.0; nx * ny],
        }
    }

    pub fn random(nx: usize, ny: usize, scale: f64, rng: &mut RngStream) -> Self {
        Self {
            nx,
            ny,
            theta: (0..nx * ny).map(|_| scale * rng.normal()).collect(),
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }
}

impl ExpFamConditional for TablePosterior {
    type Given = usize;
    type Target = usize;

    fn feature_dim(&self) -> usize {
        self.nx * self.ny
    }

    fn params(&self) -> &[f64] {
        &self.theta
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    fn features(&self, x: &usize, y: &usize) -> Vec<f64> {
        let mut f = vec![0.0; self.nx * self.ny];
        f[x * self.ny + y] = 1.0;
        f
    }

    fn score(&self, x: &usize, y: &usize) -> f64 {
        self.theta[x * self.ny + y]
    }

    fn log_norm(&self, x: &usize) -> Result<f64> {
        Ok(log_sum_exp(&self.theta[x * self.ny..(x + 1) * self.ny]))
    }

    fn sample(&self, x: &usize, rng: &mut RngStream) -> Result<usize> {
        let p = normalize(&self.theta[x * self.ny..(x + 1) * self.ny])?;
        Ok(sample_discrete(&p, rng))
    }
}

impl EnumerableTargets for TablePosterior {
    fn targets(&self) -> Vec<usize> {
        (0..self.ny).collect()
    }
}

/// Fully parameterized discrete likelihood: `p(x|y) ∝ exp(θ[x,y])`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableLikelihood {
    nx: usize,
    ny: usize,
    theta: Vec<f64>, // theta[x * ny + y]
}

impl TableLikelihood {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            theta: vec![0.0; nx * ny],
        }
    }

    pub fn random(nx: usize, ny: usize, scale: f64, rng: &mut RngStream) -> Self {
        Self {
            nx,
            ny,
            theta: (0..nx * ny).map(|_| scale * rng.normal()).collect(),
        }
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }
}

impl ExpFamConditional for TableLikelihood {
    type Given = usize;
    type Target = usize;

    fn feature_dim(&self) -> usize {
        self.nx * self.ny
    }

    fn params(&self) -> &[f64] {
        &self.theta
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    fn features(&self, y: &usize, x: &usize) -> Vec<f64> {
        let mut f = vec![0.0; self.nx * self.ny];
        f[x * self.ny + y] = 1.0;
        f
    }

    fn score(&self, y: &usize, x: &usize) -> f64 {
        self.theta[x * self.ny + y]
    }

    fn log_norm(&self, y: &usize) -> Result<f64> {
        let col: Vec<f64> = (0..self.nx).map(|x| self.theta[x * self.ny + y]).collect();
        Ok(log_sum_exp(&col))
    }

    fn sample(&self, y: &usize, rng: &mut RngStream) -> Result<usize> {
        let col: Vec<f64> = (0..self.nx).map(|x| self.theta[x * self.ny + y]).collect();
        let p = normalize(&col)?;
        Ok(sample_discrete(&p, rng))
    }
}

impl EnumerableTargets for TableLikelihood {
    fn targets(&self) -> Vec<usize> {
        (0..self.nx).collect()
    }
}

/// A small discrete test substrate: both conditionals as full
/// exponential-family tables. Strictly positive by construction.
#[derive(Debug, Clone)]
pub struct ToyDiscreteModel {
    pub posterior: TablePosterior,
    pub likelihood: TableLikelihood,
}

impl ToyDiscreteModel {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            posterior: TablePosterior::zeros(nx, ny),
            likelihood: TableLikelihood::zeros(nx, ny),
        }
    }

    pub fn random(nx: usize, ny: usize, scale: f64, rng: &mut RngStream) -> Self {
        Self {
            posterior: TablePosterior::random(nx, ny, scale, rng),
            likelihood: TableLikelihood::random(nx, ny, scale, rng),
        }
    }

    pub fn nx(&self) -> usize {
        self.posterior.nx
    }

    pub fn ny(&self) -> usize {
        self.posterior.ny
    }

    /// Materializes both conditionals as stochastic matrices.
    pub fn as_pair(&self) -> Result<DiscreteConditionalPair> {
        let (nx, ny) = (self.nx(), self.ny());
        let mut a = vec![0.0; nx * ny];
        let mut b = vec![0.0; nx * ny];
        for x in 0..nx {
            let col = normalize(&self.posterior.theta[x * ny..(x + 1) * ny])?;
            for y in 0..ny {
                a[y * nx + x] = col[y];
            }
        }
        for y in 0..ny {
            let col: Vec<f64> = (0..nx).map(|x| self.likelihood.theta[x * ny + y]).collect();
            let col = normalize(&col)?;
            for x in 0..nx {
                b[x * ny + y] = col[x];
            }
        }
        DiscreteConditionalPair::new(nx, ny, a, b)
    }
}

/// Start distribution for the enumerated forward chain.
#[derive(Debug, Clone)]
pub enum StartDist {
    Uniform,
    /// An explicit distribution over X, treated as parameter-independent.
    Fixed(Vec<f64>),
}

impl StartDist {
    fn prob(&self, x: usize, nx: usize) -> f64 {
        match self {
            StartDist::Uniform => 1.0 / nx as f64,
            StartDist::Fixed(p) => p[x],
        }
    }
}

// Oracle-side conditional tables, recomputed from the raw parameters.
fn oracle_tables(model: &ToyDiscreteModel) -> (Vec<f64>, Vec<f64>) {
    let (nx, ny) = (model.nx(), model.ny());
    let mut a = vec![0.0; nx * ny]; // a[x * ny + y] = p(y|x)
    for x in 0..nx {
        let row = &model.posterior.theta[x * ny..(x + 1) * ny];
        let lz = log_sum_exp(row);
        for y in 0..ny {
            a[x * ny + y] = (row[y] - lz).exp();
        }
    }
    let mut b = vec![0.0; nx * ny]; // b[y * nx + x] = p(x|y)
    for y in 0..ny {
        let col: Vec<f64> = (0..nx).map(|x| model.likelihood.theta[x * ny + y]).collect();
        let lz = log_sum_exp(&col);
        for x in 0..nx {
            b[y * nx + x] = (col[x] - lz).exp();
        }
    }
    (a, b)
}

fn check_budget(nx: usize, ny: usize, pairs: usize) -> Result<()> {
    let mut total: usize = 1;
    for _ in 0..pairs {
        total = total
            .checked_mul(nx * ny)
            .ok_or_else(|| Error::BudgetExceeded("sequence count overflow".into()))?;
        if total > 2_000_000 {
            return Err(Error::BudgetExceeded(format!(
                "{total} sequences exceed the enumeration budget"
            )));
        }
    }
    Ok(())
}

fn for_each_sequence(nx: usize, ny: usize, pairs: usize, mut f: impl FnMut(&[usize], &[usize])) {
    let mut xs = vec![0usize; pairs];
    let mut ys = vec![0usize; pairs];
    loop {
        f(&xs, &ys);
        // Odometer over the interleaved digits (x_0, y_0, x_1, y_1, ...).
        let mut pos = 0;
        loop {
            if pos == 2 * pairs {
                return;
            }
            let (digits, radix) = if pos % 2 == 0 {
                (&mut xs, nx)
            } else {
                (&mut ys, ny)
            };
            let d = &mut digits[pos / 2];
            *d += 1;
            if *d < radix {
                break;
            }
            *d = 0;
            pos += 1;
        }
    }
}

/// Joint weight of one enumerated forward sequence ending at the anchor.
fn sequence_weight(
    a: &[f64],
    b: &[f64],
    nx: usize,
    ny: usize,
    xs: &[usize],
    ys: &[usize],
    x_star: usize,
    start: &StartDist,
) -> f64 {
    let pairs = xs.len();
    let mut w = start.prob(xs[0], nx) * a[xs[0] * ny + ys[0]];
    for i in 1..pairs {
        w *= b[ys[i - 1] * nx + xs[i]] * a[xs[i] * ny + ys[i]];
    }
    w * b[ys[pairs - 1] * nx + x_star]
}

/// Exact gradient of the enumerated chain log-marginal: the posterior-weighted
/// sum over every forward sequence ending at the anchor of the per-factor
/// log-density gradients. `pairs` is the number of `(x, y)` pairs before the
/// anchor.
pub fn exact_chain_gradient(
    model: &ToyDiscreteModel,
    x_star: usize,
    pairs: usize,
    start: &StartDist,
) -> Result<GradientPair> {
    assert!(pairs >= 1);
    let (nx, ny) = (model.nx(), model.ny());
    check_budget(nx, ny, pairs)?;
    let (a, b) = oracle_tables(model);
    let mut g1 = vec![0.0; nx * ny];
    let mut g2 = vec![0.0; nx * ny];
    let mut total = 0.0;
    for_each_sequence(nx, ny, pairs, |xs, ys| {
        let w = sequence_weight(&a, &b, nx, ny, xs, ys, x_star, start);
        total += w;
        // d/dθ1 of Σ_i log p(y_i | x_i).
        for i in 0..pairs {
            let x = xs[i];
            for y in 0..ny {
                let indicator = if y == ys[i] { 1.0 } else { 0.0 };
                g1[x * ny + y] += w * (indicator - a[x * ny + y]);
            }
        }
        // d/dθ2 of Σ_i log p(x_i | y_{i-1}) plus the transition into the anchor.
        for i in 1..=pairs {
            let y = ys[i - 1];
            let x_obs = if i < pairs { xs[i] } else { x_star };
            for x in 0..nx {
                let indicator = if x == x_obs { 1.0 } else { 0.0 };
                g2[x * ny + y] += w * (indicator - b[y * nx + x]);
            }
        }
    });
    let inv = 1.0 / total;
    g1.iter_mut().for_each(|v| *v *= inv);
    g2.iter_mut().for_each(|v| *v *= inv);
    Ok(GradientPair { g1, g2 })
}

/// `log Σ_z p(z, x*)` over all enumerated forward sequences.
pub fn chain_log_marginal(
    model: &ToyDiscreteModel,
    x_star: usize,
    pairs: usize,
    start: &StartDist,
) -> Result<f64> {
    assert!(pairs >= 1);
    let (nx, ny) = (model.nx(), model.ny());
    check_budget(nx, ny, pairs)?;
    let (a, b) = oracle_tables(model);
    let mut total = 0.0;
    for_each_sequence(nx, ny, pairs, |xs, ys| {
        total += sequence_weight(&a, &b, nx, ny, xs, ys, x_star, start);
    });
    Ok(total.ln())
}

/// Per-position L2 norms of the θ₁ chain-gradient contribution, ordered by
/// distance from the anchor (entry 0 is the pair adjacent to the anchor).
pub fn chain_position_norms(
    model: &ToyDiscreteModel,
    x_star: usize,
    pairs: usize,
    start: &StartDist,
) -> Result<Vec<f64>> {
    assert!(pairs >= 1);
    let (nx, ny) = (model.nx(), model.ny());
    check_budget(nx, ny, pairs)?;
    let (a, b) = oracle_tables(model);
    let mut per_pos = vec![vec![0.0; nx * ny]; pairs];
    let mut total = 0.0;
    for_each_sequence(nx, ny, pairs, |xs, ys| {
        let w = sequence_weight(&a, &b, nx, ny, xs, ys, x_star, start);
        total += w;
        for i in 0..pairs {
            let x = xs[i];
            for y in 0..ny {
                let indicator = if y == ys[i] { 1.0 } else { 0.0 };
                per_pos[i][x * ny + y] += w * (indicator - a[x * ny + y]);
            }
        }
    });
    let mut norms: Vec<f64> = per_pos
        .iter()
        .map(|g| (g.iter().map(|v| (v / total) * (v / total)).sum::<f64>()).sqrt())
        .collect();
    norms.reverse(); // position pairs-1 is adjacent to the anchor
    Ok(norms)
}

/// Exact expectation of the single-step gradient pair over all `(ỹ, x̃, ŷ)`
/// triples of the minimal reverse chain.
pub fn exact_step_expectation(
    model: &ToyDiscreteModel,
    x_star: usize,
    y_star: usize,
) -> GradientPair {
    let (nx, ny) = (model.nx(), model.ny());
    let (a, b) = oracle_tables(model);
    let mut g1 = vec![0.0; nx * ny];
    let mut g2 = vec![0.0; nx * ny];
    for y_tilde in 0..ny {
        let p_y = a[x_star * ny + y_tilde];
        for x_tilde in 0..nx {
            let p_xy = p_y * b[y_tilde * nx + x_tilde];
            for y_hat in 0..ny {
                let w = p_xy * a[x_tilde * ny + y_hat];
                g1[x_tilde * ny + y_tilde] += w;
                g1[x_tilde * ny + y_hat] -= w;
                g1[x_star * ny + y_star] += w;
                g1[x_star * ny + y_tilde] -= w;
                g2[x_star * ny + y_tilde] += w;
                g2[x_tilde * ny + y_tilde] -= w;
            }
        }
    }
    GradientPair { g1, g2 }
}

/// Direct dense computation of the stationary marginals: solves
/// `(C − I) v = 0` with the normalization row appended, by LU with partial
/// pivoting, then certifies the eigenvalue-1 residual.
pub fn dense_stationary(pair: &DiscreteConditionalPair) -> Result<(ProbVector, ProbVector)> {
    let (nx, ny) = (pair.nx(), pair.ny());
    if nx > 32 || ny > 32 {
        return Err(Error::BudgetExceeded(format!(
            "dense solve limited to 32 states, got {nx}x{ny}"
        )));
    }
    // Own composition of C = B * A, row-major.
    let mut c = vec![0.0; nx * nx];
    for x in 0..nx {
        for xp in 0..nx {
            let mut s = 0.0;
            for y in 0..ny {
                s += pair.b(x, y) * pair.a(y, xp);
            }
            c[x * nx + xp] = s;
        }
    }

    // Bordered system: rows of (C - I) except the last, then the sum-to-one row.
    let n = nx;
    let mut m = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    for r in 0..n - 1 {
        for s in 0..n {
            m[r * n + s] = c[r * n + s] - if r == s { 1.0 } else { 0.0 };
        }
    }
    for s in 0..n {
        m[(n - 1) * n + s] = 1.0;
    }
    rhs[n - 1] = 1.0;

    // Gaussian elimination with partial pivoting.
    for col in 0..n {
        let mut pivot = col;
        for r in col + 1..n {
            if m[r * n + col].abs() > m[pivot * n + col].abs() {
                pivot = r;
            }
        }
        if m[pivot * n + col].abs() < 1e-14 {
            return Err(Error::NoUnitEigenvalue {
                tol: 1e-8,
                residual: f64::INFINITY,
            });
        }
        if pivot != col {
            for s in 0..n {
                m.swap(col * n + s, pivot * n + s);
            }
            rhs.swap(col, pivot);
        }
        for r in col + 1..n {
            let factor = m[r * n + col] / m[col * n + col];
            if factor == 0.0 {
                continue;
            }
            for s in col..n {
                m[r * n + s] -= factor * m[col * n + s];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut v = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = rhs[r];
        for cidx in r + 1..n {
            s -= m[r * n + cidx] * v[cidx];
        }
        v[r] = s / m[r * n + r];
    }

    // Certify: v must be an eigenvalue-1 eigenvector of C.
    let mut residual = 0.0f64;
    for x in 0..n {
        let mut cv = 0.0;
        for xp in 0..n {
            cv += c[x * n + xp] * v[xp];
        }
        residual = residual.max((cv - v[x]).abs());
    }
    if residual > 1e-8 || v.iter().any(|&p| p < -1e-9) {
        return Err(Error::NoUnitEigenvalue {
            tol: 1e-8,
            residual,
        });
    }
    let sum = kahan_sum(v.iter().map(|p| p.max(0.0)));
    let px: Vec<f64> = v.iter().map(|p| p.max(0.0) / sum).collect();
    let mut py = vec![0.0; ny];
    for (y, out) in py.iter_mut().enumerate() {
        let mut s = 0.0;
        for (x, &p) in px.iter().enumerate() {
            s += pair.a(y, x) * p;
        }
        *out = s;
    }
    Ok((ProbVector::new(px)?, ProbVector::new(py)?))
}

/// `1 − ∫ max_y p(y)·N(x; μ_y, σ_y) dx` by adaptive Simpson quadrature.
pub fn bayes_error_numeric(config: &GeneratorConfig) -> f64 {
    let density = |x: f64| {
        let mut best = f64::NEG_INFINITY;
        for y in 0..3 {
            let (mu, sigma) = (config.means[y], config.sigmas[y]);
            let z = (x - mu) / sigma;
            let p = (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt()) / 3.0;
            best = best.max(p);
        }
        best
    };
    let max_sigma = config.sigmas.iter().fold(0.0f64, |m, s| m.max(*s));
    let lo = config.means.iter().fold(f64::INFINITY, |m, v| m.min(*v)) - 8.0 * max_sigma;
    let hi = config.means.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) + 8.0 * max_sigma;
    1.0 - adaptive_simpson(&density, lo, hi, 1e-8)
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
}

/// Adaptive Simpson with interval bisection; `tol` is the local error target.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        recurse(f, a, m, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, right, tol / 2.0, depth - 1)
    }
    recurse(f, a, b, simpson(f, a, b), tol, 48)
}

/// Exhaustive enumeration of a tiny grid-CRF: per-labeling probabilities,
/// per-pixel marginals and the log partition value, all computed by direct
/// energy evaluation (not via the production feature path).
#[derive(Debug, Clone)]
pub struct GridEnumeration {
    pub num_labels: usize,
    pub num_pixels: usize,
    /// Probability of each labeling, indexed by base-`num_labels` encoding.
    pub probs: Vec<f64>,
    /// Per-pixel label marginals, `marginals[pixel][label]`.
    pub marginals: Vec<Vec<f64>>,
    pub log_partition: f64,
}

impl GridEnumeration {
    pub fn decode_state(&self, mut code: usize) -> Vec<u8> {
        let mut labels = vec![0u8; self.num_pixels];
        for l in labels.iter_mut() {
            *l = (code % self.num_labels) as u8;
            code /= self.num_labels;
        }
        labels
    }

    pub fn encode_state(&self, labels: &[u8]) -> usize {
        let mut code = 0usize;
        for &l in labels.iter().rev() {
            code = code * self.num_labels + l as usize;
        }
        code
    }
}

/// Enumerates every labeling of a small grid under the CRF density.
pub fn enumerate_grid(
    params: &crate::seg::SegCrfParams,
    x: &crate::seg::RgbImage,
    unary: &crate::seg::LabelMap,
    graph: &crate::seg::GridGraph,
) -> Result<GridEnumeration> {
    let num_labels = params.num_labels();
    let num_pixels = graph.num_pixels();
    let states = num_labels
        .checked_pow(num_pixels as u32)
        .filter(|s| *s <= 6561)
        .ok_or_else(|| Error::BudgetExceeded("grid state space too large".into()))?;
    let mut energies = Vec::with_capacity(states);
    let mut labels = vec![0u8; num_pixels];
    for code in 0..states {
        let mut c = code;
        for l in labels.iter_mut() {
            *l = (c % num_labels) as u8;
            c /= num_labels;
        }
        // Direct energy: unary reliability plus symmetrized pairwise terms.
        let mut energy = 0.0;
        for (i, &l) in labels.iter().enumerate() {
            energy += params.q(l as usize, unary.get(i) as usize);
        }
        for e in graph.edges() {
            let (l, m) = (
                labels[e.i as usize] as usize,
                labels[e.j as usize] as usize,
            );
            let d = x.sq_diff(e.i as usize, e.j as usize);
            energy += params.a_sym(e.ty, l, m) + params.b_sym(e.ty, l, m) * d;
        }
        energies.push(energy);
    }
    let log_partition = log_sum_exp(&energies);
    let probs: Vec<f64> = energies.iter().map(|e| (e - log_partition).exp()).collect();
    let mut marginals = vec![vec![0.0; num_labels]; num_pixels];
    for (code, &p) in probs.iter().enumerate() {
        let mut c = code;
        for m in marginals.iter_mut() {
            m[c % num_labels] += p;
            c /= num_labels;
        }
    }
    Ok(GridEnumeration {
        num_labels,
        num_pixels,
        probs,
        marginals,
        log_partition,
    })
}

/// Discretized marginal of one pixel channel for a two-pixel, same-label,
/// single-color-number instance of the color model: numeric integration of
/// `exp(c(x₁²+x₂²) + d(x₁+x₂) + e(x₁−x₂)²)` over the unit square on a
/// midpoint grid, marginalized to the first coordinate.
pub fn color_pair_channel_marginal(c: f64, d: f64, e: f64, bins: usize) -> Vec<f64> {
    let h = 1.0 / bins as f64;
    let mut joint = vec![0.0; bins * bins];
    for i in 0..bins {
        let x1 = (i as f64 + 0.5) * h;
        for j in 0..bins {
            let x2 = (j as f64 + 0.5) * h;
            let energy = c * (x1 * x1 + x2 * x2) + d * (x1 + x2) + e * (x1 - x2) * (x1 - x2);
            joint[i * bins + j] = energy;
        }
    }
    let lz = log_sum_exp(&joint);
    let mut marginal = vec![0.0; bins];
    for i in 0..bins {
        for j in 0..bins {
            marginal[i] += (joint[i * bins + j] - lz).exp();
        }
    }
    marginal
}

/// Central finite differences of `f` at `theta`, one coordinate at a time.
pub fn central_difference(
    mut f: impl FnMut(&[f64]) -> f64,
    theta: &[f64],
    step: f64,
) -> Vec<f64> {
    let mut grad = vec![0.0; theta.len()];
    let mut point = theta.to_vec();
    for i in 0..theta.len() {
        point[i] = theta[i] + step;
        let up = f(&point);
        point[i] = theta[i] - step;
        let down = f(&point);
        point[i] = theta[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    grad
}
