//! Grid-CRF semantic segmentation: the labeling posterior on an 8-connected
//! pixel graph over a black-box unary classifier, the latent-palette
//! generative color model, Gibbs samplers for both, warm-start training, and
//! max-marginal decoding.

pub mod color;
pub mod corpus;
pub mod crf;
pub mod forest;
pub mod grid;
pub mod image;
pub mod train;

pub use color::GenColorParams;
pub use corpus::CorpusConfig;
pub use crf::{CrfContext, SegCrfParams};
pub use forest::{ForestConfig, UnaryForest};
pub use grid::{EdgeType, GridGraph};
pub use image::{LabelMap, RgbImage};
pub use train::{SegExample, WarmStartBuffer};
