//! Desk-scale segmentation corpus: synthetic images with smooth label regions
//! (thresholded low-frequency noise) and overlapping per-label color
//! distributions, plus a loader for external image/label-map pairs.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::seg::image::{load_label_map, load_rgb, LabelMap, RgbImage};
use std::path::Path;

#[derive(Debug, Clone)]
pub struct CorpusConfig {
    pub width: usize,
    pub height: usize,
    pub num_labels: usize,
    /// Per-label base colors; must have `num_labels` entries.
    pub base_colors: Vec<[f64; 3]>,
    /// Standard deviation of the per-image, per-label color offset.
    pub color_jitter: f64,
    /// Standard deviation of per-pixel additive noise.
    pub pixel_noise: f64,
    /// Number of low-frequency waves shaping the label field.
    pub waves: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            width: 32,
            height: 32,
            num_labels: 3,
            base_colors: vec![[0.62, 0.42, 0.28], [0.35, 0.55, 0.30], [0.40, 0.55, 0.72]],
            color_jitter: 0.10,
            pixel_noise: 0.16,
            waves: 4,
        }
    }
}

impl CorpusConfig {
    pub fn validate(&self) -> Result<()> {
        if self.base_colors.len() != self.num_labels {
            return Err(Error::InvalidConfig(
                "one base color per label required".into(),
            ));
        }
        if self.num_labels < 2 {
            return Err(Error::InvalidConfig("at least two labels".into()));
        }
        Ok(())
    }
}

/// Smooth scalar field: a few random low-frequency cosine waves.
fn low_frequency_field(cfg: &CorpusConfig, rng: &mut RngStream) -> Vec<f64> {
    let (w, h) = (cfg.width, cfg.height);
    let mut field = vec![0.0f64; w * h];
    for wave in 0..cfg.waves {
        // Mostly single-period waves; an occasional two-period one adds
        // region-shape variety without fragmenting the label field.
        let freq = if wave == 0 { 1.0 } else { (rng.below(4) / 3 + 1) as f64 };
        let angle = 2.0 * std::f64::consts::PI * rng.uniform();
        let (fu, fv) = (freq * angle.sin(), freq * angle.cos());
        let phase = 2.0 * std::f64::consts::PI * rng.uniform();
        // A dominant backbone wave keeps regions large; the rest perturb.
        let amp = if wave == 0 { 1.6 } else { 0.3 + 0.4 * rng.uniform() };
        for r in 0..h {
            for c in 0..w {
                let t = 2.0 * std::f64::consts::PI
                    * (fu * r as f64 / h as f64 + fv * c as f64 / w as f64)
                    + phase;
                field[r * w + c] += amp * t.cos();
            }
        }
    }
    field
}

/// One synthetic image with its ground-truth labeling.
pub fn generate_pair(cfg: &CorpusConfig, rng: &mut RngStream) -> (RgbImage, LabelMap) {
    let (w, h) = (cfg.width, cfg.height);
    let field = low_frequency_field(cfg, rng);

    // Threshold at empirical quantiles so every label gets roughly equal area.
    let mut sorted = field.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let thresholds: Vec<f64> = (1..cfg.num_labels)
        .map(|k| sorted[k * sorted.len() / cfg.num_labels])
        .collect();
    let mut labels = LabelMap::filled(w, h, 0);
    for i in 0..w * h {
        let mut l = 0u8;
        for (k, t) in thresholds.iter().enumerate() {
            if field[i] > *t {
                l = k as u8 + 1;
            }
        }
        labels.set(i, l);
    }

    // Per-image label-color offsets, then per-pixel noise.
    let offsets: Vec<[f64; 3]> = (0..cfg.num_labels)
        .map(|_| {
            [
                cfg.color_jitter * rng.normal(),
                cfg.color_jitter * rng.normal(),
                cfg.color_jitter * rng.normal(),
            ]
        })
        .collect();
    let mut img = RgbImage::filled(w, h, [0.0; 3]);
    for i in 0..w * h {
        let l = labels.get(i) as usize;
        let mut px = [0.0f64; 3];
        for ch in 0..3 {
            px[ch] = (cfg.base_colors[l][ch] + offsets[l][ch] + cfg.pixel_noise * rng.normal())
                .clamp(0.0, 1.0);
        }
        img.set_pixel(i, px);
    }
    (img, labels)
}

pub fn generate_set(
    cfg: &CorpusConfig,
    count: usize,
    rng: &mut RngStream,
) -> Vec<(RgbImage, LabelMap)> {
    (0..count)
        .map(|i| generate_pair(cfg, &mut rng.split(i as u64)))
        .collect()
}

/// Loads `<stem>.png` / `<stem>.labels.png` pairs from a directory, sorted by
/// file name.
pub fn load_dir(dir: &Path) -> Result<Vec<(RgbImage, LabelMap)>> {
    let mut stems = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let name = match path.file_name().and_then(|n| n.to_str()) {
            Some(n) => n.to_string(),
            None => continue,
        };
        if let Some(stem) = name.strip_suffix(".labels.png") {
            stems.push(stem.to_string());
        }
    }
    stems.sort();
    if stems.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "no <stem>.labels.png files in {}",
            dir.display()
        )));
    }
    let mut out = Vec::with_capacity(stems.len());
    for stem in stems {
        let img = load_rgb(&dir.join(format!("{stem}.png")))?;
        let map = load_label_map(&dir.join(format!("{stem}.labels.png")))?;
        if img.num_pixels() != map.len() {
            return Err(Error::DimensionMismatch(format!(
                "{stem}: image and label map sizes differ"
            )));
        }
        out.push((img, map));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_cover_all_classes_with_smooth_regions() {
        let cfg = CorpusConfig::default();
        let mut rng = RngStream::new(61);
        let mut agree_total = 0.0;
        for trial in 0..20 {
            let (_, labels) = generate_pair(&cfg, &mut rng.split(trial));
            let mut counts = [0usize; 3];
            for &l in labels.labels() {
                counts[l as usize] += 1;
            }
            for (l, c) in counts.iter().enumerate() {
                assert!(*c > 0, "trial {trial}: label {l} missing");
            }
            // Smoothness: horizontally adjacent pixels mostly share labels.
            let (w, h) = (labels.width(), labels.height());
            let mut same = 0usize;
            for r in 0..h {
                for c in 0..w - 1 {
                    if labels.get(r * w + c) == labels.get(r * w + c + 1) {
                        same += 1;
                    }
                }
            }
            agree_total += same as f64 / ((w - 1) * h) as f64;
        }
        assert!(agree_total / 20.0 > 0.9, "mean agreement {}", agree_total / 20.0);
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let cfg = CorpusConfig::default();
        let a = generate_set(&cfg, 3, &mut RngStream::new(7));
        let b = generate_set(&cfg, 3, &mut RngStream::new(7));
        assert_eq!(a, b);
    }

    #[test]
    fn directory_round_trip() {
        let cfg = CorpusConfig::default();
        let dir = std::env::temp_dir().join("implicit_models_corpus_test");
        std::fs::create_dir_all(&dir).unwrap();
        let mut rng = RngStream::new(62);
        let set = generate_set(&cfg, 2, &mut rng);
        for (i, (img, map)) in set.iter().enumerate() {
            crate::seg::image::save_rgb(&dir.join(format!("im{i}.png")), img).unwrap();
            crate::seg::image::save_label_map(&dir.join(format!("im{i}.labels.png")), map)
                .unwrap();
        }
        let loaded = load_dir(&dir).unwrap();
        assert_eq!(loaded.len(), 2);
        for ((img, map), (limg, lmap)) in set.iter().zip(&loaded) {
            assert_eq!(map, lmap);
            assert_eq!(img.width(), limg.width());
        }
    }
}
