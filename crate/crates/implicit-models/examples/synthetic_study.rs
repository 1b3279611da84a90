//! The artificial-data study: learning curves of test error and risk
//! difference for the conditional-likelihood baselines and the implicit
//! model, over a sweep of training sizes.
//!
//! Run with e.g.
//!
//! ```bash
//! cargo run --release --example synthetic_study -- --reps 10 --out out-synthetic
//! cargo run --release --example synthetic_study -- --misspecified
//! ```

use implicit_models::exp::config::{resolved_synthetic_ini, SyntheticRunConfig};
use implicit_models::exp::output::{plot_experiment, write_csv};
use implicit_models::exp::records::{cell_values, mean_stderr, Method};
use implicit_models::exp::synthetic_run::run_synthetic;
use std::path::PathBuf;

fn main() -> implicit_models::Result<()> {
    let mut config = SyntheticRunConfig::default();
    let mut out_dir = PathBuf::from("out-synthetic");
    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--misspecified" => config.misspecified = true,
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
            "--test-size" => {
                config.test_size = args.next().expect("--test-size N").parse().unwrap()
            }
            "--im-step" => config.im_step = args.next().expect("--im-step X").parse().unwrap(),
            "--im-epochs" => {
                config.im_epochs = args.next().expect("--im-epochs N").parse().unwrap()
            }
            "--im-batch" => {
                config.im_batch = args.next().expect("--im-batch N").parse().unwrap()
            }
            "--cl-step" => config.cl_step = args.next().expect("--cl-step X").parse().unwrap(),
            "--cl-epochs" => {
                config.cl_epochs = args.next().expect("--cl-epochs N").parse().unwrap()
            }
            "--out" => out_dir = PathBuf::from(args.next().expect("--out DIR")),
            other => panic!("unknown flag {other}"),
        }
    }

    let started = std::time::Instant::now();
    let run = run_synthetic(&config)?;
    eprintln!(
        "swept {} cells in {:.1}s",
        config.sizes.len() * config.repetitions,
        started.elapsed().as_secs_f64()
    );
    for line in &run.divergences {
        eprintln!("divergence: {line}");
    }

    let methods = [
        Method::Cl,
        Method::ClWeakReg,
        Method::ClStrongReg,
        Method::Im,
    ];
    println!("{}", config.experiment_name());
    println!(
        "{:>6} {:>22} {:>22} {:>22} {:>22}",
        "T", "CL", "CL-weak-reg", "CL-strong-reg", "IM"
    );
    for &t in &config.sizes {
        let mut row = format!("{t:>6}");
        for m in methods {
            let (test, test_se) = mean_stderr(&cell_values(&run.records, m, t, |r| r.test_error));
            let (risk, _) = mean_stderr(&cell_values(&run.records, m, t, |r| r.risk_diff));
            row.push_str(&format!(" {test:>7.4}±{test_se:.4}/{risk:>6.4}"));
        }
        println!("{row}   (test±se/riskdiff)");
    }

    std::fs::create_dir_all(&out_dir)?;
    write_csv(&out_dir.join("results.csv"), &run.records)?;
    std::fs::write(
        out_dir.join("resolved-config.ini"),
        resolved_synthetic_ini(&config),
    )?;
    let plots = plot_experiment(
        &out_dir,
        config.experiment_name(),
        &run.records,
        &methods,
        true,
    )?;
    println!(
        "wrote {} and {} plot files to {}",
        "results.csv",
        plots.len(),
        out_dir.display()
    );
    Ok(())
}
