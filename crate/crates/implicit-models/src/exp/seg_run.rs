//! The segmentation study: per (training size, repetition) generate a corpus
//! split, train the unary forest, then the conditional-likelihood CRF and the
//! implicit pair on top of it, and score max-marginal decodings by Hamming
//! error on held-out images.

use crate::error::Result;
use crate::exp::config::SegRunConfig;
use crate::exp::output::save_chain_strip;
use crate::exp::records::{ExperimentRecord, Method};
use crate::rng::RngStream;
use crate::seg::corpus::generate_set;
use crate::seg::train::{evaluate_crf, train_cl_crf, train_implicit_seg, SegExample};
use crate::seg::{GridGraph, LabelMap, SegCrfParams, UnaryForest};
use rayon::prelude::*;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct SegRun {
    pub records: Vec<ExperimentRecord>,
    pub divergences: Vec<String>,
    /// Chain-strip images written during the run (first repetition only).
    pub strips: Vec<PathBuf>,
}

fn unary_error(examples: &[SegExample]) -> f64 {
    examples
        .iter()
        .map(|e| e.unary.hamming_error(&e.truth))
        .sum::<f64>()
        / examples.len() as f64
}

fn make_examples(set: Vec<(crate::seg::RgbImage, LabelMap)>, forest: &UnaryForest) -> Vec<SegExample> {
    set.into_iter()
        .map(|(image, truth)| {
            let unary = forest.predict_map(&image);
            SegExample {
                image,
                truth,
                unary,
            }
        })
        .collect()
}

struct CellOutcome {
    records: Vec<ExperimentRecord>,
    failures: Vec<String>,
    strips: Vec<PathBuf>,
}

fn crf_errors(
    params: &SegCrfParams,
    train: &[SegExample],
    test: &[SegExample],
    graph: &GridGraph,
    config: &SegRunConfig,
    rng: &RngStream,
) -> Result<(f64, f64)> {
    let train_err = evaluate_crf(
        params,
        train,
        graph,
        config.burn_in,
        config.decode_samples,
        &rng.split(0),
    )?;
    let test_err = evaluate_crf(
        params,
        test,
        graph,
        config.burn_in,
        config.decode_samples,
        &rng.split(1),
    )?;
    Ok((train_err, test_err))
}

fn run_cell(
    config: &SegRunConfig,
    size_idx: usize,
    rep: usize,
    strips_dir: Option<&PathBuf>,
) -> CellOutcome {
    let t = config.sizes[size_idx];
    let experiment = "segmentation";
    let cell = RngStream::new(config.seed)
        .split(1000 + size_idx as u64)
        .split(rep as u64);
    let train_set = generate_set(&config.corpus, t, &mut cell.split(0));
    let test_set = generate_set(&config.corpus, config.held_out, &mut cell.split(1));

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut strips = Vec::new();

    let forest_started = Instant::now();
    let images: Vec<_> = train_set.iter().map(|(i, _)| i.clone()).collect();
    let labels: Vec<_> = train_set.iter().map(|(_, l)| l.clone()).collect();
    let forest = match UnaryForest::train(
        &images,
        &labels,
        config.corpus.num_labels,
        &config.forest,
        &mut cell.split(2),
    ) {
        Ok(f) => f,
        Err(err) => {
            failures.push(format!("{experiment} T={t} rep={rep} RF: {err}"));
            return CellOutcome {
                records,
                failures,
                strips,
            };
        }
    };
    let forest_time = forest_started.elapsed().as_secs_f64();
    let train_examples = make_examples(train_set, &forest);
    let test_examples = make_examples(test_set, &forest);
    records.push(ExperimentRecord::new(
        experiment,
        Method::Rf,
        t,
        rep,
        unary_error(&train_examples),
        unary_error(&test_examples),
        config.seed,
        forest_time,
    ));

    let graph = GridGraph::new(config.corpus.width, config.corpus.height);
    let num_labels = config.corpus.num_labels;

    let started = Instant::now();
    let crf_config = config.crf_train(cell.split(3).next_u64());
    match train_cl_crf(&train_examples, &graph, num_labels, &crf_config).and_then(|(params, _)| {
        crf_errors(
            &params,
            &train_examples,
            &test_examples,
            &graph,
            config,
            &cell.split(4),
        )
    }) {
        Ok((train_err, test_err)) => records.push(ExperimentRecord::new(
            experiment,
            Method::ClCrf,
            t,
            rep,
            train_err,
            test_err,
            config.seed,
            started.elapsed().as_secs_f64(),
        )),
        Err(err) => failures.push(format!("{experiment} T={t} rep={rep} CL-CRF: {err}")),
    }

    let started = Instant::now();
    let im_config = config.im_train(cell.split(5).next_u64());
    match train_implicit_seg(
        &train_examples,
        &forest,
        &graph,
        num_labels,
        config.palette_size,
        &im_config,
    ) {
        Ok((params, _color, _trace)) => {
            match crf_errors(
                &params,
                &train_examples,
                &test_examples,
                &graph,
                config,
                &cell.split(6),
            ) {
                Ok((train_err, test_err)) => {
                    records.push(ExperimentRecord::new(
                        experiment,
                        Method::Im,
                        t,
                        rep,
                        train_err,
                        test_err,
                        config.seed,
                        started.elapsed().as_secs_f64(),
                    ));
                }
                Err(err) => {
                    failures.push(format!("{experiment} T={t} rep={rep} IM eval: {err}"))
                }
            }
            // Chain strips from the first repetition, mirroring the generated
            // examples alongside data and decoding.
            if rep == 0 {
                if let Some(dir) = strips_dir {
                    if let Err(err) = emit_strips(
                        dir,
                        t,
                        &train_examples,
                        &forest,
                        &graph,
                        num_labels,
                        config,
                        &cell.split(7),
                        &mut strips,
                    ) {
                        failures.push(format!("{experiment} T={t} strips: {err}"));
                    }
                }
            }
        }
        Err(err) => failures.push(format!("{experiment} T={t} rep={rep} IM: {err}")),
    }

    CellOutcome {
        records,
        failures,
        strips,
    }
}

#[allow(clippy::too_many_arguments)]
fn emit_strips(
    dir: &PathBuf,
    t: usize,
    train_examples: &[SegExample],
    forest: &UnaryForest,
    graph: &GridGraph,
    num_labels: usize,
    config: &SegRunConfig,
    rng: &RngStream,
    written: &mut Vec<PathBuf>,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    // Retrain briefly to capture warm-start buffers in their final state.
    let im_config = config.im_train(rng.split(100).next_u64());
    let (params, _color, buffers) = crate::seg::train::train_implicit_seg_with_buffers(
        train_examples,
        forest,
        graph,
        num_labels,
        config.palette_size,
        &im_config,
    )?;
    for (i, (example, buffer)) in train_examples.iter().zip(&buffers).enumerate().take(3) {
        let ctx = crate::seg::CrfContext::new(graph, &example.image, &example.unary);
        let decoded = params.max_marginal_decode(
            &ctx,
            &mut rng.split(200 + i as u64),
            config.burn_in,
            config.decode_samples,
        )?;
        let path = dir.join(format!("chain_T{t}_example{i}.png"));
        save_chain_strip(
            &path,
            &buffer.y_hat,
            &buffer.x_tilde,
            &buffer.y_tilde,
            &example.image,
            &example.truth,
            &decoded,
        )?;
        written.push(path);
    }
    Ok(())
}

/// Runs the segmentation sweep. Cells run in parallel; outputs are ordered
/// and fully determined by the configuration.
pub fn run_segmentation(config: &SegRunConfig, strips_dir: Option<PathBuf>) -> Result<SegRun> {
    let cells: Vec<(usize, usize)> = (0..config.sizes.len())
        .flat_map(|s| (0..config.repetitions).map(move |r| (s, r)))
        .collect();
    let outcomes: Vec<CellOutcome> = cells
        .par_iter()
        .map(|&(s, r)| run_cell(config, s, r, strips_dir.as_ref()))
        .collect();
    let mut run = SegRun {
        records: Vec::new(),
        divergences: Vec::new(),
        strips: Vec::new(),
    };
    for outcome in outcomes {
        run.records.extend(outcome.records);
        run.divergences.extend(outcome.failures);
        run.strips.extend(outcome.strips);
    }
    Ok(run)
}
