// Scratch probe for one segmentation cell: traces parameter magnitudes of
// the implicit trainer to find instabilities. Not part of the deliverable.

use implicit_models::exp::config::SegRunConfig;
use implicit_models::rng::RngStream;
use implicit_models::seg::corpus::generate_set;
use implicit_models::seg::train::{evaluate_crf, train_implicit_seg, SegExample};
use implicit_models::seg::{GridGraph, UnaryForest};

fn main() {
    let config = SegRunConfig::default();
    let size_idx: usize = std::env::var("SIZE_IDX").map(|v| v.parse().unwrap()).unwrap_or(1);
    let t = config.sizes[size_idx];
    for rep in 0..3u64 {
        let cell = RngStream::new(config.seed)
            .split(1000 + size_idx as u64)
            .split(rep);
        let train_set = generate_set(&config.corpus, t, &mut cell.split(0));
        let test_set = generate_set(&config.corpus, config.held_out, &mut cell.split(1));
        let images: Vec<_> = train_set.iter().map(|(i, _)| i.clone()).collect();
        let labels: Vec<_> = train_set.iter().map(|(_, l)| l.clone()).collect();
        let forest = UnaryForest::train(
            &images,
            &labels,
            3,
            &config.forest,
            &mut cell.split(2),
        )
        .unwrap();
        let train_ex: Vec<SegExample> = train_set
            .into_iter()
            .map(|(image, truth)| {
                let unary = forest.predict_map(&image);
                SegExample { image, truth, unary }
            })
            .collect();
        let test_ex: Vec<SegExample> = test_set
            .into_iter()
            .map(|(image, truth)| {
                let unary = forest.predict_map(&image);
                SegExample { image, truth, unary }
            })
            .collect();
        let graph = GridGraph::new(config.corpus.width, config.corpus.height);
        let mut im_config = config.im_train(cell.split(5).next_u64());
        if let Ok(u) = std::env::var("IM_UPDATES") { im_config.epochs = u.parse().unwrap(); }
        if let Ok(st) = std::env::var("IM_STEP") { im_config.step_size = st.parse().unwrap(); }
        let (crf, color, _) =
            train_implicit_seg(&train_ex, &forest, &graph, 3, config.palette_size, &im_config)
                .unwrap();
        let q_max = crf.params()[..9].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ab_max = crf.params()[9..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let (tr, te) = (
            evaluate_crf(&crf, &train_ex, &graph, config.burn_in, config.decode_samples, &cell.split(6)).unwrap(),
            evaluate_crf(&crf, &test_ex, &graph, config.burn_in, config.decode_samples, &cell.split(7)).unwrap(),
        );
        // Same-label attraction per edge type, and decode at long burn-in.
        let mut diag = [0.0f64; 4];
        for ty in 0..4 {
            for l in 0..3 {
                diag[ty] += crf.a_sym(implicit_models::seg::EdgeType::from_index(ty), l, l) / 3.0;
            }
        }
        let te_long = evaluate_crf(&crf, &test_ex, &graph, 300, 300, &cell.split(8)).unwrap();
        println!("  a_diag {:?} test_long {te_long:.4}", diag);
        print!("  q rows:");
        for l in 0..3 {
            print!(" [");
            for z in 0..3 {
                print!("{:+.2} ", crf.q(l, z));
            }
            print!("]");
        }
        println!();
        // Per-image test errors.
        print!("  per-image:");
        for (i, ex) in test_ex.iter().enumerate().take(10) {
            let e = evaluate_crf(&crf, std::slice::from_ref(ex), &graph, 60, 60, &cell.split(40 + i as u64)).unwrap();
            print!(" {e:.2}");
        }
        println!();
        let mut h_max = 0.0f64;
        for l in 0..3 {
            for g in 0..config.palette_size {
                h_max = h_max.max(color.h(l, g).abs());
            }
        }
        println!(
            "rep {rep}: train {tr:.4} test {te:.4} | q_max {q_max:.2} ab_max {ab_max:.2} c {:.3} e {:.4} h_max {h_max:.2}",
            color.c(),
            color.e(),
        );
    }
}
