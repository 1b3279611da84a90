//! Implicitly defined joint probability models.
//!
//! A joint distribution over observations and labels is specified here by a
//! *pair of conditionals* — a discriminative posterior `p(y|x; θ₁)` and a
//! generative likelihood `p(x|y; θ₂)` — rather than by an explicit joint.
//! The marginals are pinned down as the stationary distributions of the
//! alternating Markov chain that samples from the two conditionals in turn,
//! and the pair is trained by a stochastic joint-likelihood ascent whose
//! gradients are plain sufficient-statistic differences along short reverse
//! chains started at the training observations.
//!
//! The crate ships:
//!
//! - [`prob`], [`rng`]: validated discrete distributions, stable
//!   normalization, and counter-based splittable random streams;
//! - [`expfam`]: the exponential-family conditional contract every model
//!   implements;
//! - [`coupling`]: stationary marginals by power iteration, the
//!   strong-consistency check, and reverse-chain sampling;
//! - [`learning`]: the implicit-pair trainer and the conditional-likelihood
//!   baseline with L2 presets;
//! - [`synthetic`]: the 1-D three-class Gaussian study (well-specified and
//!   misspecified variants);
//! - [`seg`]: grid-CRF semantic segmentation with a random-forest unary,
//!   a latent-palette color model, Gibbs samplers and warm-start training;
//! - [`oracle`]: independent brute-force verifiers (chain enumeration, dense
//!   stationary solves, exhaustive grid enumeration, numeric Bayes error);
//! - [`exp`]: the experiment harness — seeded sweeps, CSV/SVG outputs,
//!   parameter archives, and the acceptance checks behind `verify`.
//!
//! See the `examples/` directory for one runnable walk-through per
//! capability, and the `imod` binary for the command-line harness.

pub mod coupling;
pub mod error;
pub mod exp;
pub mod expfam;
pub mod learning;
pub mod oracle;
pub mod prob;
pub mod rng;
pub mod seg;
pub mod synthetic;

pub use error::{Error, Result};
pub use expfam::{EnumerableTargets, ExpFamConditional};
pub use prob::{normalize, sample_discrete, ProbVector, Tolerances};
pub use rng::RngStream;
