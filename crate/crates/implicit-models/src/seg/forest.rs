//! Pixel-wise independent decision-forest classifier, the "black box" unary
//! predictor the CRF is built on top of. Features per pixel: RGB plus 3×3
//! window mean and variance per channel.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::seg::image::{LabelMap, RgbImage};

pub const PIXEL_FEATURES: usize = 9;

#[derive(Debug, Clone)]
pub struct ForestConfig {
    pub trees: usize,
    pub max_depth: usize,
    pub features_per_split: usize,
    pub thresholds_per_feature: usize,
    pub min_leaf: usize,
    /// Cap on bootstrap sample size per tree.
    pub max_samples: usize,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            trees: 16,
            max_depth: 10,
            features_per_split: 3,
            thresholds_per_feature: 8,
            min_leaf: 4,
            max_samples: 20_000,
        }
    }
}

/// Per-pixel feature rows for one image.
pub fn pixel_features(img: &RgbImage) -> Vec<[f64; PIXEL_FEATURES]> {
    let (w, h) = (img.width(), img.height());
    let mut rows = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            let mut f = [0.0; PIXEL_FEATURES];
            let px = img.pixel(r * w + c);
            f[0] = px[0];
            f[1] = px[1];
            f[2] = px[2];
            let mut sums = [0.0f64; 3];
            let mut sqs = [0.0f64; 3];
            let mut count = 0.0;
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    let (rr, cc) = (r as i64 + dr, c as i64 + dc);
                    if rr < 0 || cc < 0 || rr >= h as i64 || cc >= w as i64 {
                        continue;
                    }
                    let p = img.pixel(rr as usize * w + cc as usize);
                    for ch in 0..3 {
                        sums[ch] += p[ch];
                        sqs[ch] += p[ch] * p[ch];
                    }
                    count += 1.0;
                }
            }
            for ch in 0..3 {
                let mean = sums[ch] / count;
                f[3 + ch] = mean;
                f[6 + ch] = (sqs[ch] / count - mean * mean).max(0.0);
            }
            rows.push(f);
        }
    }
    rows
}

#[derive(Debug, Clone)]
enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        label: u8,
    },
}

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, features: &[f64; PIXEL_FEATURES]) -> u8 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { label } => return *label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if features[*feature] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }
}

/// A bagged ensemble of axis-aligned decision trees with majority voting.
#[derive(Debug, Clone)]
pub struct UnaryForest {
    trees: Vec<Tree>,
    num_labels: usize,
}

struct TrainSet<'a> {
    features: &'a [[f64; PIXEL_FEATURES]],
    labels: &'a [u8],
}

fn majority(counts: &[usize]) -> u8 {
    let mut best = 0;
    for l in 1..counts.len() {
        if counts[l] > counts[best] {
            best = l;
        }
    }
    best as u8
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let mut impurity = 1.0;
    for &c in counts {
        let p = c as f64 / total as f64;
        impurity -= p * p;
    }
    impurity
}

fn build_node(
    set: &TrainSet<'_>,
    indices: &mut [u32],
    depth: usize,
    num_labels: usize,
    config: &ForestConfig,
    rng: &mut RngStream,
    nodes: &mut Vec<Node>,
) -> u32 {
    let mut counts = vec![0usize; num_labels];
    for &i in indices.iter() {
        counts[set.labels[i as usize] as usize] += 1;
    }
    let node_impurity = gini(&counts, indices.len());
    let make_leaf = indices.len() < 2 * config.min_leaf
        || depth >= config.max_depth
        || node_impurity == 0.0;
    if make_leaf {
        nodes.push(Node::Leaf {
            label: majority(&counts),
        });
        return (nodes.len() - 1) as u32;
    }

    // Random candidate (feature, threshold) pairs scored by Gini gain.
    let mut best: Option<(usize, f64, f64)> = None; // feature, threshold, score
    for _ in 0..config.features_per_split {
        let feature = rng.below(PIXEL_FEATURES);
        for _ in 0..config.thresholds_per_feature {
            let pick = indices[rng.below(indices.len())] as usize;
            let threshold = set.features[pick][feature];
            let mut left_counts = vec![0usize; num_labels];
            let mut left_total = 0usize;
            for &i in indices.iter() {
                if set.features[i as usize][feature] <= threshold {
                    left_counts[set.labels[i as usize] as usize] += 1;
                    left_total += 1;
                }
            }
            let right_total = indices.len() - left_total;
            if left_total < config.min_leaf || right_total < config.min_leaf {
                continue;
            }
            let right_counts: Vec<usize> = counts
                .iter()
                .zip(&left_counts)
                .map(|(c, l)| c - l)
                .collect();
            let score = left_total as f64 * gini(&left_counts, left_total)
                + right_total as f64 * gini(&right_counts, right_total);
            if best.map_or(true, |(_, _, s)| score < s) {
                best = Some((feature, threshold, score));
            }
        }
    }
    let Some((feature, threshold, _)) = best else {
        nodes.push(Node::Leaf {
            label: majority(&counts),
        });
        return (nodes.len() - 1) as u32;
    };

    let split_at = partition(indices, |i| set.features[i as usize][feature] <= threshold);
    let slot = nodes.len();
    nodes.push(Node::Leaf { label: 0 }); // placeholder
    let (left_idx, right_idx) = indices.split_at_mut(split_at);
    let left = build_node(set, left_idx, depth + 1, num_labels, config, rng, nodes);
    let right = build_node(set, right_idx, depth + 1, num_labels, config, rng, nodes);
    nodes[slot] = Node::Split {
        feature,
        threshold,
        left,
        right,
    };
    slot as u32
}

fn partition(indices: &mut [u32], pred: impl Fn(u32) -> bool) -> usize {
    let mut store = 0;
    for i in 0..indices.len() {
        if pred(indices[i]) {
            indices.swap(store, i);
            store += 1;
        }
    }
    store
}

impl UnaryForest {
    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    /// Trains the forest on per-pixel features pooled over the training
    /// images, bootstrap-sampling each tree.
    pub fn train(
        images: &[RgbImage],
        labels: &[LabelMap],
        num_labels: usize,
        config: &ForestConfig,
        rng: &mut RngStream,
    ) -> Result<Self> {
        if images.is_empty() || images.len() != labels.len() {
            return Err(Error::InvalidConfig(
                "forest training needs matching nonempty image and label sets".into(),
            ));
        }
        let mut features = Vec::new();
        let mut targets = Vec::new();
        for (img, map) in images.iter().zip(labels) {
            if img.num_pixels() != map.len() {
                return Err(Error::DimensionMismatch(
                    "image and label map differ in size".into(),
                ));
            }
            features.extend(pixel_features(img));
            targets.extend_from_slice(map.labels());
        }
        if targets.iter().any(|&l| l as usize >= num_labels) {
            return Err(Error::DimensionMismatch("label out of range".into()));
        }
        let set = TrainSet {
            features: &features,
            labels: &targets,
        };
        let sample_size = features.len().min(config.max_samples);
        let mut trees = Vec::with_capacity(config.trees);
        for t in 0..config.trees {
            let mut tree_rng = rng.split(t as u64);
            let mut indices: Vec<u32> = (0..sample_size)
                .map(|_| tree_rng.below(features.len()) as u32)
                .collect();
            let mut nodes = Vec::new();
            build_node(
                &set,
                &mut indices,
                0,
                num_labels,
                config,
                &mut tree_rng,
                &mut nodes,
            );
            trees.push(Tree { nodes });
        }
        Ok(Self { trees, num_labels })
    }

    pub fn predict_pixel(&self, features: &[f64; PIXEL_FEATURES]) -> u8 {
        let mut votes = vec![0usize; self.num_labels];
        for tree in &self.trees {
            votes[tree.predict(features) as usize] += 1;
        }
        majority(&votes)
    }

    /// The per-pixel majority-vote label map for one image. Deterministic:
    /// inference involves no randomness.
    pub fn predict_map(&self, img: &RgbImage) -> LabelMap {
        let rows = pixel_features(img);
        let mut out = LabelMap::filled(img.width(), img.height(), 0);
        for (i, row) in rows.iter().enumerate() {
            out.set(i, self.predict_pixel(row));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_color_corpus() -> (Vec<RgbImage>, Vec<LabelMap>) {
        // One constant color per label; trivially separable.
        let colors = [[0.9, 0.1, 0.1], [0.1, 0.9, 0.1], [0.1, 0.1, 0.9]];
        let mut images = Vec::new();
        let mut labels = Vec::new();
        for (l, color) in colors.iter().enumerate() {
            images.push(RgbImage::filled(8, 8, *color));
            labels.push(LabelMap::filled(8, 8, l as u8));
        }
        (images, labels)
    }

    #[test]
    fn separable_corpus_reaches_perfect_accuracy() {
        let (images, labels) = constant_color_corpus();
        let mut rng = RngStream::new(51);
        let forest =
            UnaryForest::train(&images, &labels, 3, &ForestConfig::default(), &mut rng).unwrap();
        for (img, truth) in images.iter().zip(&labels) {
            let pred = forest.predict_map(img);
            assert_eq!(pred.hamming_error(truth), 0.0);
        }
    }

    #[test]
    fn prediction_is_deterministic() {
        let (images, labels) = constant_color_corpus();
        let mut rng = RngStream::new(52);
        let forest =
            UnaryForest::train(&images, &labels, 3, &ForestConfig::default(), &mut rng).unwrap();
        let a = forest.predict_map(&images[0]);
        let b = forest.predict_map(&images[0]);
        assert_eq!(a, b);
    }

    #[test]
    fn window_features_capture_local_moments() {
        let mut img = RgbImage::filled(3, 3, [0.0; 3]);
        img.set_pixel(4, [0.9, 0.0, 0.0]);
        let rows = pixel_features(&img);
        // Center pixel: mean over the full 3x3 window.
        assert!((rows[4][3] - 0.1).abs() < 1e-12);
        assert!(rows[4][6] > 0.0);
        // Corner pixel windows are clipped to 4 cells.
        assert!((rows[0][3] - 0.9 / 4.0).abs() < 1e-12);
    }
}
