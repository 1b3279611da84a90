//! Run configurations for the two studies, a simple sectioned key=value
//! config-file format, and resolved-config emission for provenance.

use crate::error::{Error, Result};
use crate::learning::{Schedule, TrainConfig};
use crate::seg::{CorpusConfig, ForestConfig};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// Settings for the artificial-data study.
#[derive(Debug, Clone)]
pub struct SyntheticRunConfig {
    pub misspecified: bool,
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub test_size: usize,
    pub cl_step: f64,
    pub cl_epochs: usize,
    pub weak_l2: f64,
    pub strong_l2: f64,
    pub im_step: f64,
    pub im_epochs: usize,
    /// Examples per implicit update; 0 averages over the full training set.
    pub im_batch: usize,
}

impl Default for SyntheticRunConfig {
    fn default() -> Self {
        Self {
            misspecified: false,
            sizes: vec![10, 20, 50, 100, 500],
            repetitions: 50,
            seed: 42,
            test_size: 100_000,
            cl_step: 0.05,
            cl_epochs: 1500,
            weak_l2: TrainConfig::WEAK_L2,
            strong_l2: TrainConfig::STRONG_L2,
            im_step: 0.05,
            im_epochs: 3000,
            im_batch: 0,
        }
    }
}

impl SyntheticRunConfig {
    pub fn experiment_name(&self) -> &'static str {
        if self.misspecified {
            "synthetic-misspecified"
        } else {
            "synthetic"
        }
    }

    pub fn cl_train(&self, l2_weight: f64, seed: u64) -> TrainConfig {
        TrainConfig {
            step_size: self.cl_step,
            schedule: Schedule::Constant,
            epochs: self.cl_epochs,
            l2_weight,
            seed,
            ..TrainConfig::default()
        }
    }

    pub fn im_train(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            step_size: self.im_step,
            schedule: Schedule::Constant,
            epochs: self.im_epochs,
            batch_size: if self.im_batch == 0 {
                usize::MAX
            } else {
                self.im_batch
            },
            seed,
            tail_average: Some(0.5),
            ..TrainConfig::default()
        }
    }
}

/// Settings for the desk-scale segmentation study.
#[derive(Debug, Clone)]
pub struct SegRunConfig {
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub held_out: usize,
    pub corpus: CorpusConfig,
    pub forest: ForestConfig,
    pub palette_size: usize,
    pub crf_step: f64,
    pub crf_updates: usize,
    pub im_step: f64,
    pub im_updates: usize,
    pub burn_in: usize,
    pub decode_samples: usize,
}

impl Default for SegRunConfig {
    fn default() -> Self {
        Self {
            sizes: vec![5, 10, 20, 40],
            repetitions: 10,
            seed: 42,
            held_out: 20,
            corpus: CorpusConfig::default(),
            forest: ForestConfig::default(),
            palette_size: 8,
            crf_step: 0.05,
            crf_updates: 150,
            im_step: 0.05,
            im_updates: 100,
            burn_in: 30,
            decode_samples: 100,
        }
    }
}

impl SegRunConfig {
    pub fn experiment_name(&self) -> &'static str {
        "segmentation"
    }

    pub fn crf_train(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            step_size: self.crf_step,
            schedule: Schedule::InvSqrtT { floor: 1e-3 },
            epochs: self.crf_updates,
            seed,
            tail_average: Some(0.3),
            ..TrainConfig::default()
        }
    }

    pub fn im_train(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            step_size: self.im_step,
            schedule: Schedule::InvSqrtT { floor: 1e-3 },
            epochs: self.im_updates,
            seed,
            tail_average: Some(0.3),
            ..TrainConfig::default()
        }
    }
}

/// Parses a sectioned `key = value` config file. Lines starting with `#` are
/// comments; section headers are `[name]`.
pub fn parse_ini(text: &str) -> Result<BTreeMap<(String, String), String>> {
    let mut map = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("line {}: expected key = value", lineno + 1))
        })?;
        map.insert(
            (section.clone(), key.trim().to_string()),
            value.trim().to_string(),
        );
    }
    Ok(map)
}

fn get<T: std::str::FromStr>(
    map: &BTreeMap<(String, String), String>,
    section: &str,
    key: &str,
    into: &mut T,
) -> Result<()> {
    if let Some(raw) = map.get(&(section.to_string(), key.to_string())) {
        *into = raw
            .parse()
            .map_err(|_| Error::Parse(format!("[{section}] {key}: bad value {raw:?}")))?;
    }
    Ok(())
}

fn get_sizes(
    map: &BTreeMap<(String, String), String>,
    section: &str,
    key: &str,
    into: &mut Vec<usize>,
) -> Result<()> {
    if let Some(raw) = map.get(&(section.to_string(), key.to_string())) {
        *into = raw
            .split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("[{section}] {key}: bad list {raw:?}")))
            })
            .collect::<Result<_>>()?;
        if into.is_empty() {
            return Err(Error::Parse(format!("[{section}] {key}: empty list")));
        }
    }
    Ok(())
}

/// Applies `[synthetic]` overrides from a config file onto the defaults.
pub fn apply_synthetic_overrides(
    config: &mut SyntheticRunConfig,
    map: &BTreeMap<(String, String), String>,
) -> Result<()> {
    let s = "synthetic";
    get_sizes(map, s, "sizes", &mut config.sizes)?;
    get(map, s, "repetitions", &mut config.repetitions)?;
    get(map, s, "seed", &mut config.seed)?;
    get(map, s, "test_size", &mut config.test_size)?;
    get(map, s, "misspecified", &mut config.misspecified)?;
    get(map, s, "cl_step", &mut config.cl_step)?;
    get(map, s, "cl_epochs", &mut config.cl_epochs)?;
    get(map, s, "weak_l2", &mut config.weak_l2)?;
    get(map, s, "strong_l2", &mut config.strong_l2)?;
    get(map, s, "im_step", &mut config.im_step)?;
    get(map, s, "im_epochs", &mut config.im_epochs)?;
    get(map, s, "im_batch", &mut config.im_batch)?;
    Ok(())
}

/// Applies `[segment]` overrides from a config file onto the defaults.
pub fn apply_seg_overrides(
    config: &mut SegRunConfig,
    map: &BTreeMap<(String, String), String>,
) -> Result<()> {
    let s = "segment";
    get_sizes(map, s, "sizes", &mut config.sizes)?;
    get(map, s, "repetitions", &mut config.repetitions)?;
    get(map, s, "seed", &mut config.seed)?;
    get(map, s, "held_out", &mut config.held_out)?;
    get(map, s, "palette", &mut config.palette_size)?;
    get(map, s, "crf_step", &mut config.crf_step)?;
    get(map, s, "crf_updates", &mut config.crf_updates)?;
    get(map, s, "im_step", &mut config.im_step)?;
    get(map, s, "im_updates", &mut config.im_updates)?;
    get(map, s, "burn_in", &mut config.burn_in)?;
    get(map, s, "decode_samples", &mut config.decode_samples)?;
    get(map, s, "width", &mut config.corpus.width)?;
    get(map, s, "height", &mut config.corpus.height)?;
    get(map, s, "pixel_noise", &mut config.corpus.pixel_noise)?;
    get(map, s, "color_jitter", &mut config.corpus.color_jitter)?;
    get(map, s, "trees", &mut config.forest.trees)?;
    get(map, s, "tree_depth", &mut config.forest.max_depth)?;
    Ok(())
}

fn join_sizes(sizes: &[usize]) -> String {
    sizes
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// The fully resolved configuration, written next to every run's outputs.
pub fn resolved_synthetic_ini(config: &SyntheticRunConfig) -> String {
    let mut out = String::from("[synthetic]\n");
    let _ = writeln!(out, "sizes = {}", join_sizes(&config.sizes));
    let _ = writeln!(out, "repetitions = {}", config.repetitions);
    let _ = writeln!(out, "seed = {}", config.seed);
    let _ = writeln!(out, "test_size = {}", config.test_size);
    let _ = writeln!(out, "misspecified = {}", config.misspecified);
    let _ = writeln!(out, "cl_step = {}", config.cl_step);
    let _ = writeln!(out, "cl_epochs = {}", config.cl_epochs);
    let _ = writeln!(out, "weak_l2 = {}", config.weak_l2);
    let _ = writeln!(out, "strong_l2 = {}", config.strong_l2);
    let _ = writeln!(out, "im_step = {}", config.im_step);
    let _ = writeln!(out, "im_epochs = {}", config.im_epochs);
    let _ = writeln!(out, "im_batch = {}", config.im_batch);
    out
}

pub fn resolved_seg_ini(config: &SegRunConfig) -> String {
    let mut out = String::from("[segment]\n");
    let _ = writeln!(out, "sizes = {}", join_sizes(&config.sizes));
    let _ = writeln!(out, "repetitions = {}", config.repetitions);
    let _ = writeln!(out, "seed = {}", config.seed);
    let _ = writeln!(out, "held_out = {}", config.held_out);
    let _ = writeln!(out, "palette = {}", config.palette_size);
    let _ = writeln!(out, "crf_step = {}", config.crf_step);
    let _ = writeln!(out, "crf_updates = {}", config.crf_updates);
    let _ = writeln!(out, "im_step = {}", config.im_step);
    let _ = writeln!(out, "im_updates = {}", config.im_updates);
    let _ = writeln!(out, "burn_in = {}", config.burn_in);
    let _ = writeln!(out, "decode_samples = {}", config.decode_samples);
    let _ = writeln!(out, "width = {}", config.corpus.width);
    let _ = writeln!(out, "height = {}", config.corpus.height);
    let _ = writeln!(out, "pixel_noise = {}", config.corpus.pixel_noise);
    let _ = writeln!(out, "color_jitter = {}", config.corpus.color_jitter);
    let _ = writeln!(out, "trees = {}", config.forest.trees);
    let _ = writeln!(out, "tree_depth = {}", config.forest.max_depth);
    out
}

/// Loads a config file and applies it over the defaults for both studies.
pub fn load_config_file(
    path: &Path,
) -> Result<(SyntheticRunConfig, SegRunConfig)> {
    let map = parse_ini(&std::fs::read_to_string(path)?)?;
    let mut synthetic = SyntheticRunConfig::default();
    let mut seg = SegRunConfig::default();
    apply_synthetic_overrides(&mut synthetic, &map)?;
    apply_seg_overrides(&mut seg, &map)?;
    Ok((synthetic, seg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ini_round_trip_applies_overrides() {
        let text = "# comment\n[synthetic]\nsizes = 5, 7\nrepetitions = 3\nmisspecified = true\n\n[segment]\nseed = 9\n";
        let map = parse_ini(text).unwrap();
        let mut synthetic = SyntheticRunConfig::default();
        apply_synthetic_overrides(&mut synthetic, &map).unwrap();
        assert_eq!(synthetic.sizes, vec![5, 7]);
        assert_eq!(synthetic.repetitions, 3);
        assert!(synthetic.misspecified);
        let mut seg = SegRunConfig::default();
        apply_seg_overrides(&mut seg, &map).unwrap();
        assert_eq!(seg.seed, 9);
    }

    #[test]
    fn resolved_ini_parses_back() {
        let config = SyntheticRunConfig::default();
        let text = resolved_synthetic_ini(&config);
        let map = parse_ini(&text).unwrap();
        let mut rebuilt = SyntheticRunConfig {
            sizes: vec![],
            ..SyntheticRunConfig::default()
        };
        apply_synthetic_overrides(&mut rebuilt, &map).unwrap();
        assert_eq!(rebuilt.sizes, config.sizes);
        assert_eq!(rebuilt.test_size, config.test_size);
    }

    #[test]
    fn bad_lines_are_rejected() {
        assert!(parse_ini("[s]\nnot a pair\n").is_err());
        let map = parse_ini("[synthetic]\nrepetitions = many\n").unwrap();
        let mut config = SyntheticRunConfig::default();
        assert!(apply_synthetic_overrides(&mut config, &map).is_err());
    }
}
