use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use softskill::features::{EncodedChunk, WordVocab};
use softskill::mlp::{MlpConfig, MlpModel, MlpParams};

pub fn small_config(seed: u64) -> MlpConfig {
    MlpConfig {
        max_len: 6,
        embed_dim: 5,
        hidden: 7,
        batch_size: 8,
        seed,
        ..MlpConfig::default()
    }
}

pub fn random_model(cfg: MlpConfig, rng: &mut ChaCha8Rng) -> MlpModel {
    let vocab = WordVocab::from_words((2..20).map(|i| format!("w{i}")));
    let mut params = MlpParams::random(vocab.len(), &cfg, rng);
    // larger embeddings and nonzero biases give every tensor a visible gradient
    params.b1.iter_mut().for_each(|b| *b = rng.random_range(-0.3..0.3));
    params.b2.iter_mut().for_each(|b| *b = rng.random_range(-0.3..0.3));
    params.embedding.iter_mut().skip(cfg.embed_dim).for_each(|v| *v *= 10.0);
    MlpModel::new(vocab, cfg, params)
}

pub fn random_chunks(rng: &mut ChaCha8Rng, count: usize, max_len: usize) -> Vec<EncodedChunk> {
    (0..count)
        .map(|_| {
            let len = rng.random_range(1..=max_len);
            let mut chunk = EncodedChunk {
                ids: vec![0; max_len],
                mask: vec![false; max_len],
                labels: vec![0; max_len],
                offset: 0,
            };
            for i in 0..len {
                chunk.ids[i] = rng.random_range(1..20);
                chunk.mask[i] = true;
                chunk.labels[i] = rng.random_range(0..3);
            }
            chunk
        })
        .collect()
}

/// Smallest |pre-activation| over all real positions; finite differences are
/// only meaningful away from the ReLU kink.
pub fn min_abs_preactivation(model: &MlpModel, chunks: &[EncodedChunk]) -> f64 {
    let cfg = &model.config;
    let (e, h) = (cfg.embed_dim, cfg.hidden);
    let p = &model.params;
    let mut min = f64::INFINITY;
    for chunk in chunks {
        for i in (0..chunk.ids.len()).filter(|&i| chunk.mask[i]) {
            for j in 0..h {
                let mut pre = p.b1[j];
                for (slot, off) in [-1i64, 0, 1].into_iter().enumerate() {
                    let k = i as i64 + off;
                    if k < 0 || k as usize >= chunk.ids.len() || !chunk.mask[k as usize] {
                        continue;
                    }
                    let row = chunk.ids[k as usize];
                    for d in 0..e {
                        pre += p.embedding[row * e + d] * p.w1[(slot * e + d) * h + j];
                    }
                }
                min = min.min(pre.abs());
            }
        }
    }
    min
}

pub fn tensor_mut(p: &mut MlpParams, t: usize) -> &mut Vec<f64> {
    p.tensors_mut().into_iter().nth(t).unwrap()
}

/// A random small model and batch whose ReLU pre-activations all sit at
/// least 1e-2 away from zero.
pub fn smooth_case(config_seed: u64) -> (MlpModel, Vec<EncodedChunk>) {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + config_seed);
    loop {
        let model = random_model(small_config(config_seed), &mut rng);
        let chunks = random_chunks(&mut rng, 3, 6);
        if min_abs_preactivation(&model, &chunks) > 1e-2 {
            return (model, chunks);
        }
    }
}

/// `‖analytic − numeric‖ / (‖analytic‖ + ‖numeric‖)` per parameter tensor,
/// with central differences of step `h` and dropout off.
pub fn gradient_errors(model: &MlpModel, chunks: &[EncodedChunk], h: f64) -> Vec<(&'static str, f64)> {
    let refs: Vec<&EncodedChunk> = chunks.iter().collect();
    let (_, grad) = model.loss_and_grad(&model.params, &refs, None);
    (0..5)
        .map(|t| {
            let analytic = grad.tensors()[t].1.clone();
            let numeric: Vec<f64> = (0..analytic.len())
                .map(|i| {
                    let mut plus = model.params.clone();
                    tensor_mut(&mut plus, t)[i] += h;
                    let mut minus = model.params.clone();
                    tensor_mut(&mut minus, t)[i] -= h;
                    let lp = model.loss_and_grad(&plus, &refs, None).0;
                    let lm = model.loss_and_grad(&minus, &refs, None).0;
                    (lp - lm) / (2.0 * h)
                })
                .collect();
            let diff = analytic.iter().zip(&numeric).map(|(a, n)| (a - n).powi(2)).sum::<f64>().sqrt();
            let norm = analytic.iter().map(|a| a * a).sum::<f64>().sqrt()
                + numeric.iter().map(|n| n * n).sum::<f64>().sqrt();
            let rel = if norm == 0.0 { 0.0 } else { diff / norm };
            (grad.tensors()[t].0, rel)
        })
        .collect()
}

/// Two copies of a random chunk differing only at masked positions.
pub fn masked_variants(rng: &mut ChaCha8Rng) -> (EncodedChunk, EncodedChunk) {
    let chunk = random_chunks(rng, 1, 6).remove(0);
    let mut other = chunk.clone();
    for i in 0..6 {
        if !other.mask[i] {
            other.ids[i] = rng.random_range(0..20);
            other.labels[i] = rng.random_range(0..3);
        }
    }
    (chunk, other)
}
