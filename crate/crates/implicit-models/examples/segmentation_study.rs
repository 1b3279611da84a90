//! The segmentation study on the synthetic desk-scale corpus: Hamming-error
//! learning curves for the raw forest, the conditional-likelihood CRF, and
//! the implicit pair, plus chain-visualization strips.
//!
//! Run with e.g.
//!
//! ```bash
//! cargo run --release --example segmentation_study -- --sizes 5,10 --reps 3
//! ```

use implicit_models::exp::config::{resolved_seg_ini, SegRunConfig};
use implicit_models::exp::output::{plot_experiment, write_csv};
use implicit_models::exp::records::{cell_values, mean_stderr, Method};
use implicit_models::exp::seg_run::run_segmentation;
use std::path::PathBuf;

fn main() -> implicit_models::Result<()> {
    let mut config = SegRunConfig::default();
    let mut out_dir = PathBuf::from("out-segmentation");
    let mut strips = true;
    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--reps" => config.repetitions = args.next().expect("--reps N").parse().unwrap(),
            "--seed" => config.seed = args.next().expect("--seed S").parse().unwrap(),
            "--sizes" => {
                config.sizes = args
                    .next()
                    .expect("--sizes a,b,c")
                    .split(',')
                    .map(|s| s.parse().unwrap())
                    .collect()
            }
            "--held-out" => config.held_out = args.next().expect("--held-out N").parse().unwrap(),
            "--crf-updates" => {
                config.crf_updates = args.next().expect("--crf-updates N").parse().unwrap()
            }
            "--im-updates" => {
                config.im_updates = args.next().expect("--im-updates N").parse().unwrap()
            }
            "--crf-step" => config.crf_step = args.next().expect("--crf-step X").parse().unwrap(),
            "--im-step" => config.im_step = args.next().expect("--im-step X").parse().unwrap(),
            "--no-strips" => strips = false,
            "--out" => out_dir = PathBuf::from(args.next().expect("--out DIR")),
            other => panic!("unknown flag {other}"),
        }
    }

    std::fs::create_dir_all(&out_dir)?;
    let strips_dir = strips.then(|| out_dir.join("chains"));
    let started = std::time::Instant::now();
    let run = run_segmentation(&config, strips_dir)?;
    eprintln!(
        "swept {} cells in {:.1}s",
        config.sizes.len() * config.repetitions,
        started.elapsed().as_secs_f64()
    );
    for line in &run.divergences {
        eprintln!("divergence: {line}");
    }

    let methods = [Method::Rf, Method::ClCrf, Method::Im];
    println!("segmentation (Hamming error)");
    println!(
        "{:>6} {:>24} {:>24} {:>24}",
        "T", "RF", "CL-CRF", "IM"
    );
    for &t in &config.sizes {
        let mut row = format!("{t:>6}");
        for m in methods {
            let (train, _) = mean_stderr(&cell_values(&run.records, m, t, |r| r.train_error));
            let (test, se) = mean_stderr(&cell_values(&run.records, m, t, |r| r.test_error));
            row.push_str(&format!(" {train:>6.4}/{test:>6.4}±{se:.4}"));
        }
        println!("{row}   (train/test±se)");
    }

    write_csv(&out_dir.join("results.csv"), &run.records)?;
    std::fs::write(out_dir.join("resolved-config.ini"), resolved_seg_ini(&config))?;
    plot_experiment(&out_dir, "segmentation", &run.records, &methods, false)?;
    println!(
        "wrote results.csv, plots and {} chain strips to {}",
        run.strips.len(),
        out_dir.display()
    );
    Ok(())
}
