//! Segmentation training: conditional-likelihood learning of the CRF with a
//! persistent sampled surrogate for the intractable expectation, and implicit
//! training of the CRF/color-model pair with warm-started Gibbs chains.

use crate::error::Result;
use crate::expfam::axpy;
use crate::learning::{clip_inf_norm, GradientPair, TrainConfig, TrainTrace};
use crate::rng::RngStream;
use crate::seg::color::GenColorParams;
use crate::seg::crf::{CrfContext, SegCrfParams};
use crate::seg::forest::UnaryForest;
use crate::seg::grid::GridGraph;
use crate::seg::image::{LabelMap, RgbImage};

/// Initializes the reliability table from the unary predictor's confusion
/// counts on the training set: `q(l, z) = log p̂(true = l | predicted = z)`,
/// add-one smoothed. Pairwise tables start at zero.
pub fn init_crf_from_confusion(
    num_labels: usize,
    truths: &[LabelMap],
    predictions: &[LabelMap],
) -> SegCrfParams {
    let mut counts = vec![0f64; num_labels * num_labels]; // [truth][pred]
    for (truth, pred) in truths.iter().zip(predictions) {
        for (t, p) in truth.labels().iter().zip(pred.labels()) {
            counts[*t as usize * num_labels + *p as usize] += 1.0;
        }
    }
    let mut params = SegCrfParams::zeros(num_labels);
    for z in 0..num_labels {
        let col: f64 = (0..num_labels).map(|l| counts[l * num_labels + z]).sum();
        for l in 0..num_labels {
            let p = (counts[l * num_labels + z] + 1.0) / (col + num_labels as f64);
            params.set_q(l, z, p.ln());
        }
    }
    params
}

/// One training example with its precomputed unary prediction and sweep
/// context inputs.
pub struct SegExample {
    pub image: RgbImage,
    pub truth: LabelMap,
    pub unary: LabelMap,
}

/// Per-example chain state for implicit training. `x_tilde` starts at the
/// original image, the labelings start random, and every entry advances by
/// `gibbs_sweeps_per_update` sweeps per update.
pub struct WarmStartBuffer {
    pub y_tilde: LabelMap,
    pub x_tilde: RgbImage,
    pub y_hat: LabelMap,
    pub g_tilde: LabelMap,
    /// Sweeps each chain in this entry has received.
    pub sweeps_done: usize,
}

fn random_labeling(w: usize, h: usize, num_labels: usize, rng: &mut RngStream) -> LabelMap {
    let mut map = LabelMap::filled(w, h, 0);
    for i in 0..w * h {
        map.set(i, rng.below(num_labels) as u8);
    }
    map
}

impl WarmStartBuffer {
    pub fn init(
        example: &SegExample,
        color: &GenColorParams,
        num_labels: usize,
        rng: &mut RngStream,
    ) -> Result<Self> {
        let (w, h) = (example.image.width(), example.image.height());
        let y_tilde = random_labeling(w, h, num_labels, rng);
        let x_tilde = example.image.clone();
        let y_hat = random_labeling(w, h, num_labels, rng);
        let g_tilde = color.sample_g(&x_tilde, &y_tilde, rng)?;
        Ok(Self {
            y_tilde,
            x_tilde,
            y_hat,
            g_tilde,
            sweeps_done: 0,
        })
    }
}

/// Conditional-likelihood training of the CRF. The expectation term is
/// approximated by a persistent per-example sample advanced by a few Gibbs
/// sweeps per update (the sampled surrogate for an intractable exact
/// gradient).
pub fn train_cl_crf(
    examples: &[SegExample],
    graph: &GridGraph,
    num_labels: usize,
    config: &TrainConfig,
) -> Result<(SegCrfParams, TrainTrace)> {
    config.validate()?;
    let mut params = init_crf_from_confusion(
        num_labels,
        &examples.iter().map(|e| e.truth.clone()).collect::<Vec<_>>(),
        &examples.iter().map(|e| e.unary.clone()).collect::<Vec<_>>(),
    );
    let root = RngStream::new(config.seed);
    // Persistent chains start at the unary argmax.
    let mut surrogates: Vec<LabelMap> = examples
        .iter()
        .map(|e| params.unary_argmax(&e.unary))
        .collect();
    let data_features: Vec<Vec<f64>> = examples
        .iter()
        .map(|e| params.features_on(&e.image, &e.unary, &e.truth, graph))
        .collect();
    let mut trace = TrainTrace::default();
    let tail_start = config.tail_average.map(|frac| {
        config.epochs - ((config.epochs as f64 * frac).ceil() as usize).clamp(1, config.epochs)
    });
    let mut tail_sum = vec![0.0; params.feature_dim()];
    let mut tail_count = 0usize;
    for update in 0..config.epochs {
        let update_stream = root.split(update as u64);
        let mut g = vec![0.0; params.feature_dim()];
        for (t, example) in examples.iter().enumerate() {
            let mut rng = update_stream.split(t as u64);
            let ctx = CrfContext::new(graph, &example.image, &example.unary);
            params.gibbs_sweep(
                &ctx,
                &mut surrogates[t],
                &mut rng,
                config.gibbs_sweeps_per_update,
            )?;
            axpy(&mut g, 1.0, &data_features[t]);
            axpy(
                &mut g,
                -1.0,
                &params.features_on(&example.image, &example.unary, &surrogates[t], graph),
            );
        }
        let inv = 1.0 / examples.len() as f64;
        g.iter_mut().for_each(|v| *v *= inv);
        if let Some(max_norm) = config.clip_inf_norm {
            clip_inf_norm(&mut g, max_norm);
        }
        let rate = config.schedule.rate(config.step_size, update + 1);
        axpy(params.params_mut(), rate, &g);
        trace.updates += 1;
        if let Some(start) = tail_start {
            if update >= start {
                axpy(&mut tail_sum, 1.0, params.params());
                tail_count += 1;
            }
        }
    }
    if tail_count > 0 {
        let inv = 1.0 / tail_count as f64;
        for (p, s) in params.params_mut().iter_mut().zip(&tail_sum) {
            *p = s * inv;
        }
    }
    Ok((params, trace))
}

/// Implicit training of the CRF posterior and the generative color model.
/// Each update advances every example's warm-started chains by one step of
/// the minimal reverse chain (`ỹ` from the real image, `x̃` from the color
/// model given `ỹ`, `ŷ` from the sampled image) and applies the
/// statistic-difference gradients.
pub fn train_implicit_seg(
    examples: &[SegExample],
    forest: &UnaryForest,
    graph: &GridGraph,
    num_labels: usize,
    palette_size: usize,
    config: &TrainConfig,
) -> Result<(SegCrfParams, GenColorParams, TrainTrace)> {
    let (crf, color, _, trace) =
        train_implicit_seg_inner(examples, forest, graph, num_labels, palette_size, config)?;
    Ok((crf, color, trace))
}

/// [`train_implicit_seg`] returning the final warm-start buffers as well,
/// for chain visualization.
pub fn train_implicit_seg_with_buffers(
    examples: &[SegExample],
    forest: &UnaryForest,
    graph: &GridGraph,
    num_labels: usize,
    palette_size: usize,
    config: &TrainConfig,
) -> Result<(SegCrfParams, GenColorParams, Vec<WarmStartBuffer>)> {
    let (crf, color, buffers, _) =
        train_implicit_seg_inner(examples, forest, graph, num_labels, palette_size, config)?;
    Ok((crf, color, buffers))
}

fn train_implicit_seg_inner(
    examples: &[SegExample],
    forest: &UnaryForest,
    graph: &GridGraph,
    num_labels: usize,
    palette_size: usize,
    config: &TrainConfig,
) -> Result<(
    SegCrfParams,
    GenColorParams,
    Vec<WarmStartBuffer>,
    TrainTrace,
)> {
    config.validate()?;
    let mut crf = init_crf_from_confusion(
        num_labels,
        &examples.iter().map(|e| e.truth.clone()).collect::<Vec<_>>(),
        &examples.iter().map(|e| e.unary.clone()).collect::<Vec<_>>(),
    );
    let mut color = GenColorParams::standard(num_labels, palette_size);
    let root = RngStream::new(config.seed);
    let mut init_rng = root.split(u64::MAX);
    let mut buffers: Vec<WarmStartBuffer> = examples
        .iter()
        .map(|e| WarmStartBuffer::init(e, &color, num_labels, &mut init_rng))
        .collect::<Result<_>>()?;
    let data_features: Vec<Vec<f64>> = examples
        .iter()
        .map(|e| crf.features_on(&e.image, &e.unary, &e.truth, graph))
        .collect();
    let mut trace = TrainTrace::default();
    let tail_start = config.tail_average.map(|frac| {
        config.epochs - ((config.epochs as f64 * frac).ceil() as usize).clamp(1, config.epochs)
    });
    let mut tail_crf = vec![0.0; crf.feature_dim()];
    let mut tail_color = vec![0.0; color.feature_dim()];
    let mut tail_count = 0usize;
    for update in 0..config.epochs {
        let update_stream = root.split(update as u64);
        let mut mean = GradientPair::zeros(crf.feature_dim(), color.feature_dim());
        for (t, example) in examples.iter().enumerate() {
            let mut rng = update_stream.split(t as u64);
            let buffer = &mut buffers[t];
            if !config.warm_start {
                *buffer = WarmStartBuffer::init(example, &color, num_labels, &mut rng)?;
            }

            // ỹ ~ p(Y | x*, θ1), warm-started.
            let ctx_star = CrfContext::new(graph, &example.image, &example.unary);
            crf.gibbs_sweep(
                &ctx_star,
                &mut buffer.y_tilde,
                &mut rng,
                config.gibbs_sweeps_per_update,
            )?;
            // (x̃, g̃) ~ p(X, G | ỹ, θ2), warm-started.
            color.gibbs_sweep(
                &buffer.y_tilde,
                &mut buffer.x_tilde,
                &mut buffer.g_tilde,
                graph,
                &mut rng,
                config.gibbs_sweeps_per_update,
            )?;
            // The black box is re-run on the sampled image.
            let unary_tilde = forest.predict_map(&buffer.x_tilde);
            // ŷ ~ p(Y | x̃, θ1), warm-started.
            let ctx_tilde = CrfContext::new(graph, &buffer.x_tilde, &unary_tilde);
            crf.gibbs_sweep(
                &ctx_tilde,
                &mut buffer.y_hat,
                &mut rng,
                config.gibbs_sweeps_per_update,
            )?;
            buffer.sweeps_done += config.gibbs_sweeps_per_update;

            // Posterior gradient: chain pair plus data pair.
            axpy(&mut mean.g1, 1.0, &data_features[t]);
            axpy(
                &mut mean.g1,
                -1.0,
                &crf.features_on(&example.image, &example.unary, &buffer.y_tilde, graph),
            );
            axpy(
                &mut mean.g1,
                1.0,
                &crf.features_on(&buffer.x_tilde, &unary_tilde, &buffer.y_tilde, graph),
            );
            axpy(
                &mut mean.g1,
                -1.0,
                &crf.features_on(&buffer.x_tilde, &unary_tilde, &buffer.y_hat, graph),
            );

            // Likelihood gradient: the data-side color numbers are drawn from
            // their exact factorized conditional given (x*, ỹ).
            let g_star = color.sample_g(&example.image, &buffer.y_tilde, &mut rng)?;
            axpy(
                &mut mean.g2,
                1.0,
                &color.features(&example.image, &g_star, &buffer.y_tilde, graph),
            );
            axpy(
                &mut mean.g2,
                -1.0,
                &color.features(&buffer.x_tilde, &buffer.g_tilde, &buffer.y_tilde, graph),
            );
        }
        mean.scale(1.0 / examples.len() as f64);
        if let Some(max_norm) = config.clip_inf_norm {
            clip_inf_norm(&mut mean.g1, max_norm);
            clip_inf_norm(&mut mean.g2, max_norm);
        }
        let rate = config.schedule.rate(config.step_size, update + 1);
        axpy(crf.params_mut(), rate, &mean.g1);
        axpy(color.params_mut(), rate, &mean.g2);
        trace.projections += color.project();
        trace.updates += 1;
        if let Some(start) = tail_start {
            if update >= start {
                axpy(&mut tail_crf, 1.0, crf.params());
                axpy(&mut tail_color, 1.0, color.params());
                tail_count += 1;
            }
        }
    }
    if tail_count > 0 {
        let inv = 1.0 / tail_count as f64;
        for (p, s) in crf.params_mut().iter_mut().zip(&tail_crf) {
            *p = s * inv;
        }
        for (p, s) in color.params_mut().iter_mut().zip(&tail_color) {
            *p = s * inv;
        }
        trace.projections += color.project();
    }
    Ok((crf, color, buffers, trace))
}

/// Mean per-pixel Hamming error of max-marginal decoding over a set.
pub fn evaluate_crf(
    params: &SegCrfParams,
    examples: &[SegExample],
    graph: &GridGraph,
    burn_in: usize,
    samples: usize,
    rng: &RngStream,
) -> Result<f64> {
    let mut total = 0.0;
    for (t, example) in examples.iter().enumerate() {
        let ctx = CrfContext::new(graph, &example.image, &example.unary);
        let mut stream = rng.split(t as u64);
        let decoded = params.max_marginal_decode(&ctx, &mut stream, burn_in, samples)?;
        total += decoded.hamming_error(&example.truth);
    }
    Ok(total / examples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learning::Schedule;
    use crate::seg::corpus::{generate_set, CorpusConfig};
    use crate::seg::forest::ForestConfig;

    fn make_examples(count: usize, seed: u64) -> (Vec<SegExample>, UnaryForest, GridGraph) {
        let cfg = CorpusConfig {
            width: 12,
            height: 12,
            ..CorpusConfig::default()
        };
        let mut rng = RngStream::new(seed);
        let set = generate_set(&cfg, count, &mut rng);
        let images: Vec<RgbImage> = set.iter().map(|(i, _)| i.clone()).collect();
        let labels: Vec<LabelMap> = set.iter().map(|(_, l)| l.clone()).collect();
        let forest = UnaryForest::train(
            &images,
            &labels,
            3,
            &ForestConfig {
                trees: 8,
                max_depth: 6,
                ..ForestConfig::default()
            },
            &mut rng.split(1),
        )
        .unwrap();
        let examples: Vec<SegExample> = set
            .into_iter()
            .map(|(image, truth)| {
                let unary = forest.predict_map(&image);
                SegExample {
                    image,
                    truth,
                    unary,
                }
            })
            .collect();
        let graph = GridGraph::new(cfg.width, cfg.height);
        (examples, forest, graph)
    }

    fn quick_config(updates: usize, seed: u64) -> TrainConfig {
        TrainConfig {
            step_size: 0.05,
            schedule: Schedule::InvSqrtT { floor: 1e-3 },
            epochs: updates,
            seed,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn confusion_init_prefers_agreeing_labels() {
        let truth = LabelMap::from_labels(4, 1, vec![0, 1, 2, 0]).unwrap();
        let pred = LabelMap::from_labels(4, 1, vec![0, 1, 2, 1]).unwrap();
        let params = init_crf_from_confusion(3, &[truth], &[pred]);
        for z in 0..3 {
            for l in 0..3 {
                if l != z {
                    assert!(params.q(z, z) >= params.q(l, z));
                }
            }
        }
    }

    #[test]
    fn cl_crf_training_improves_training_error() {
        let (examples, _, graph) = make_examples(4, 71);
        let (params, trace) = train_cl_crf(&examples, &graph, 3, &quick_config(60, 5)).unwrap();
        assert_eq!(trace.updates, 60);
        let rng = RngStream::new(99);
        let err = evaluate_crf(&params, &examples, &graph, 10, 30, &rng).unwrap();
        // Unary-only baseline error on the same set.
        let unary_err: f64 = examples
            .iter()
            .map(|e| e.unary.hamming_error(&e.truth))
            .sum::<f64>()
            / examples.len() as f64;
        assert!(
            err <= unary_err + 0.01,
            "crf {err} vs unary {unary_err}"
        );
    }

    #[test]
    fn implicit_seg_runs_and_keeps_color_model_proper() {
        let (examples, forest, graph) = make_examples(3, 72);
        let (crf, color, trace) =
            train_implicit_seg(&examples, &forest, &graph, 3, 4, &quick_config(25, 6)).unwrap();
        assert_eq!(trace.updates, 25);
        color.validate().unwrap();
        assert_eq!(crf.feature_dim(), 81);
        assert!(crf.params().iter().all(|p| p.is_finite()));
        assert!(color.params().iter().all(|p| p.is_finite()));
    }

    #[test]
    fn warm_buffers_receive_expected_sweep_counts() {
        let (examples, forest, graph) = make_examples(2, 73);
        let config = TrainConfig {
            gibbs_sweeps_per_update: 2,
            ..quick_config(7, 8)
        };
        // Mirror the trainer's bookkeeping through a tiny run.
        let color = GenColorParams::standard(3, 4);
        let root = RngStream::new(config.seed);
        let mut init_rng = root.split(u64::MAX);
        let mut buffer =
            WarmStartBuffer::init(&examples[0], &color, 3, &mut init_rng).unwrap();
        for update in 0..config.epochs {
            let mut rng = root.split(update as u64).split(0);
            let crf = init_crf_from_confusion(
                3,
                &[examples[0].truth.clone()],
                &[examples[0].unary.clone()],
            );
            let ctx = CrfContext::new(&graph, &examples[0].image, &examples[0].unary);
            crf.gibbs_sweep(
                &ctx,
                &mut buffer.y_tilde,
                &mut rng,
                config.gibbs_sweeps_per_update,
            )
            .unwrap();
            buffer.sweeps_done += config.gibbs_sweeps_per_update;
        }
        assert_eq!(
            buffer.sweeps_done,
            config.epochs * config.gibbs_sweeps_per_update
        );
        let _ = forest;
    }

    #[test]
    fn implicit_training_is_seed_deterministic() {
        let (examples, forest, graph) = make_examples(2, 74);
        let run = |seed: u64| {
            let (crf, color, _) =
                train_implicit_seg(&examples, &forest, &graph, 3, 4, &quick_config(10, seed))
                    .unwrap();
            (crf.params().to_vec(), color.params().to_vec())
        };
        let (a1, a2) = run(3);
        let (b1, b2) = run(3);
        assert_eq!(a1, b1);
        assert_eq!(a2, b2);
    }
}
