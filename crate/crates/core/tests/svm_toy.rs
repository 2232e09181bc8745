mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use softskill::svm::{primal_objective, train_binary};

const TOY_EPOCHS: usize = 2000;

#[test]
fn toy_set_reaches_grid_optimum() {
    for data_seed in 1..=5 {
        let (xs, ys) = common::toy_blobs(data_seed, 40);
        let (opt, _) = common::grid_optimum(&xs, &ys, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let (m, _) = train_binary(&xs, &ys, 2, 1.0, TOY_EPOCHS, &mut rng);
        let correct = xs.iter().zip(&ys).filter(|(x, &y)| y * m.score(x) > 0.0).count();
        assert_eq!(correct, xs.len(), "data seed {data_seed}");
        let obj = primal_objective(&m.weights(), m.bias, &xs, &ys, 1.0);
        assert!((obj - opt) / opt < 0.01, "data seed {data_seed}: {obj} vs {opt}");
    }
}

#[test]
fn block_averaged_objective_does_not_increase() {
    let (xs, ys) = common::toy_blobs(1, 40);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (_, history) = train_binary(&xs, &ys, 2, 1.0, TOY_EPOCHS, &mut rng);
    let blocks: Vec<f64> = history
        .chunks(200)
        .map(|b| b.iter().sum::<f64>() / b.len() as f64)
        .collect();
    for pair in blocks.windows(2) {
        assert!(pair[1] <= pair[0] * 1.01, "{blocks:?}");
    }
}
