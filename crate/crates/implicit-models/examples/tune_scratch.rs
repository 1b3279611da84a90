// Scratch calibration probe (not part of the deliverable surface): compares
// the CL MLE against a directly fitted generative classifier and an implicit
// run, per training size.

use implicit_models::exp::config::SyntheticRunConfig;
use implicit_models::learning::{train_conditional_likelihood, train_implicit, Schedule};
use implicit_models::rng::RngStream;
use implicit_models::synthetic::{
    sample_generator, ClassGauss, GeneratorConfig, QuadLogReg, NUM_CLASSES,
};

fn error(model: &QuadLogReg, data: &[(f64, usize)]) -> f64 {
    data.iter()
        .filter(|(x, y)| model.map_decision(*x) != *y)
        .count() as f64
        / data.len() as f64
}

fn generative_fit(train: &[(f64, usize)]) -> QuadLogReg {
    let mut params = vec![0.0; 9];
    for y in 0..NUM_CLASSES {
        let xs: Vec<f64> = train
            .iter()
            .filter(|(_, t)| *t == y)
            .map(|(x, _)| *x)
            .collect();
        let n = xs.len().max(1) as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).max(1e-3);
        params[3 * y] = -0.5 / var;
        params[3 * y + 1] = mean / var;
        params[3 * y + 2] = -0.5 * mean * mean / var - 0.5 * var.ln()
            + (xs.len() as f64 / train.len() as f64).max(1e-9).ln();
    }
    QuadLogReg::from_params(params).unwrap()
}

fn main() {
    let cfg = SyntheticRunConfig::default();
    let gen = GeneratorConfig::well_specified();
    let reps = 12;
    println!("T      CL(test/risk)    GEN(test/risk)   IM-decay(test/risk)");
    for (si, &t) in cfg.sizes.iter().enumerate() {
        let mut agg = [[0.0f64; 2]; 3];
        for rep in 0..reps {
            let cell = RngStream::new(99).split(si as u64).split(rep);
            let train = sample_generator(&gen, t, &mut cell.split(0));
            let test = sample_generator(&gen, 20_000, &mut cell.split(1));

            let mut cl = QuadLogReg::zeros();
            let cl_cfg = cfg.cl_train(0.0, cell.split(2).next_u64());
            train_conditional_likelihood(&train, &mut cl, &cl_cfg).unwrap();
            agg[0][0] += error(&cl, &test);
            agg[0][1] += (error(&cl, &train) - error(&cl, &test)).abs();

            let g = generative_fit(&train);
            agg[1][0] += error(&g, &test);
            agg[1][1] += (error(&g, &train) - error(&g, &test)).abs();

            let mut posterior = QuadLogReg::zeros();
            let mut likelihood = ClassGauss::standard(false);
            let mut im_cfg = cfg.im_train(cell.split(9).next_u64());
            im_cfg.schedule = Schedule::Constant;
            im_cfg.step_size = std::env::var("IM_STEP").map(|v| v.parse().unwrap()).unwrap_or(0.05);
            im_cfg.epochs = std::env::var("IM_EPOCHS").map(|v| v.parse().unwrap()).unwrap_or(1500);
            im_cfg.batch_size = usize::MAX;
            im_cfg.tail_average = Some(std::env::var("IM_TAIL").map(|v| v.parse().unwrap()).unwrap_or(0.5));
            train_implicit(&train, &mut posterior, &mut likelihood, &im_cfg).unwrap();
            agg[2][0] += error(&posterior, &test);
            agg[2][1] += (error(&posterior, &train) - error(&posterior, &test)).abs();
        }
        let r = reps as f64;
        println!(
            "{t:>5}  {:.4}/{:.4}    {:.4}/{:.4}    {:.4}/{:.4}",
            agg[0][0] / r,
            agg[0][1] / r,
            agg[1][0] / r,
            agg[1][1] / r,
            agg[2][0] / r,
            agg[2][1] / r
        );
    }
}
