//! Linear SVM token classifier.
//!
//! One binary machine per BIO label (one-vs-rest). Each machine minimizes
//!
//! ```text
//! 1/2 ‖w‖² + C Σᵢ max(0, 1 − yᵢ (w·xᵢ + b))
//! ```
//!
//! with Pegasos-style stochastic subgradient steps. Dividing by `C·n` gives
//! the per-example form `λ/2 ‖w‖² + hinge(yᵢ(w·xᵢ + b))` with `λ = 1/(C n)`,
//! whose subgradient is followed with step size `ηₜ = 1/(λ t)`. The bias is
//! not regularized. Shuffling uses a seeded ChaCha stream, so training is
//! bitwise reproducible.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{Sentence, Tag};
use crate::features::{FeatureError, FeatureVocab, DEFAULT_WINDOW};

#[derive(Debug, Error)]
pub enum SvmError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("sentence {0} is not fully tagged")]
    Untagged(usize),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmConfig {
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
    pub window: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            epochs: 20,
            seed: 42,
            window: DEFAULT_WINDOW,
        }
    }
}

/// Sparse real-valued input: (column, value) pairs.
pub type SparseVec = Vec<(usize, f64)>;

fn sparse_dot(w: &[f64], x: &[(usize, f64)]) -> f64 {
    x.iter().map(|&(j, v)| w[j] * v).sum()
}

/// Per-example objective `λ/2 ‖w‖² + max(0, 1 − y(w·x + b))`.
pub fn example_objective(w: &[f64], b: f64, x: &[(usize, f64)], y: f64, lambda: f64) -> f64 {
    let norm2: f64 = w.iter().map(|v| v * v).sum();
    0.5 * lambda * norm2 + (1.0 - y * (sparse_dot(w, x) + b)).max(0.0)
}

/// Subgradient of [`example_objective`] with respect to `(w, b)`.
pub fn example_subgradient(
    w: &[f64],
    b: f64,
    x: &[(usize, f64)],
    y: f64,
    lambda: f64,
) -> (Vec<f64>, f64) {
    let mut gw: Vec<f64> = w.iter().map(|v| lambda * v).collect();
    let mut gb = 0.0;
    if y * (sparse_dot(w, x) + b) < 1.0 {
        for &(j, v) in x {
            gw[j] -= y * v;
        }
        gb = -y;
    }
    (gw, gb)
}

/// `1/2 ‖w‖² + C Σ hinge` over a whole training set.
pub fn primal_objective(w: &[f64], b: f64, xs: &[SparseVec], ys: &[f64], c: f64) -> f64 {
    let norm2: f64 = w.iter().map(|v| v * v).sum();
    let loss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| (1.0 - y * (sparse_dot(w, x) + b)).max(0.0))
        .sum();
    0.5 * norm2 + c * loss
}

/// Binary machine stored as `w = scale · v` so the shrink step of every
/// update costs O(1) instead of O(dim).
#[derive(Debug, Clone)]
pub struct BinaryMachine {
    v: Vec<f64>,
    scale: f64,
    pub bias: f64,
}

impl BinaryMachine {
    pub fn new(dim: usize) -> Self {
        BinaryMachine {
            v: vec![0.0; dim],
            scale: 1.0,
            bias: 0.0,
        }
    }

    pub fn score(&self, x: &[(usize, f64)]) -> f64 {
        self.scale * sparse_dot(&self.v, x) + self.bias
    }

    pub fn weights(&self) -> Vec<f64> {
        self.v.iter().map(|v| v * self.scale).collect()
    }

    /// One subgradient step `(w, b) ← (w, b) − η g` on example `(x, y)`.
    pub fn step(&mut self, x: &[(usize, f64)], y: f64, eta: f64, lambda: f64) {
        let violated = y * self.score(x) < 1.0;
        let shrink = 1.0 - eta * lambda;
        if shrink <= 0.0 {
            // happens at t = 1, where η λ = 1
            self.v.iter_mut().for_each(|v| *v = 0.0);
            self.scale = 1.0;
        } else {
            self.scale *= shrink;
            if self.scale < 1e-9 {
                let s = self.scale;
                self.v.iter_mut().for_each(|v| *v *= s);
                self.scale = 1.0;
            }
        }
        if violated {
            let k = eta * y / self.scale;
            for &(j, val) in x {
                self.v[j] += k * val;
            }
            self.bias += eta * y;
        }
    }
}

/// Train one machine; returns it with the primal objective after each epoch.
pub fn train_binary(
    xs: &[SparseVec],
    ys: &[f64],
    dim: usize,
    c: f64,
    epochs: usize,
    rng: &mut ChaCha8Rng,
) -> (BinaryMachine, Vec<f64>) {
    assert_eq!(xs.len(), ys.len());
    let mut machine = BinaryMachine::new(dim);
    let n = xs.len();
    if n == 0 {
        return (machine, Vec::new());
    }
    let lambda = 1.0 / (c * n as f64);
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0u64;
    let mut history = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        order.shuffle(rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            machine.step(&xs[i], ys[i], eta, lambda);
        }
        history.push(primal_objective(&machine.weights(), machine.bias, xs, ys, c));
    }
    (machine, history)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvmModel {
    pub config: SvmConfig,
    pub vocab: FeatureVocab,
    /// Indexed by `Tag::index`; each of length `vocab.len()`.
    pub weights: [Vec<f64>; 3],
    pub bias: [f64; 3],
}

impl LinearSvmModel {
    pub fn zeros(vocab: FeatureVocab, config: SvmConfig) -> Self {
        let dim = vocab.len();
        LinearSvmModel {
            config,
            vocab,
            weights: [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]],
            bias: [0.0; 3],
        }
    }

    pub fn scores(&self, active: &[usize]) -> [f64; 3] {
        let mut out = self.bias;
        for (label, w) in self.weights.iter().enumerate() {
            out[label] += active.iter().map(|&j| w[j]).sum::<f64>();
        }
        out
    }

    pub fn predict(&self, sentence: &Sentence) -> Vec<Tag> {
        self.vocab
            .vectorize_sentence(sentence)
            .iter()
            .map(|active| argmax(&self.scores(active)))
            .collect()
    }
}

/// Highest-scoring label; ties go to the earlier label (O, then B, then I).
pub fn argmax(scores: &[f64; 3]) -> Tag {
    let mut best = 0;
    for i in 1..3 {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    Tag::ALL[best]
}

fn to_sparse(active: Vec<usize>) -> SparseVec {
    active.into_iter().map(|j| (j, 1.0)).collect()
}

pub fn train_svm(corpus: &[Sentence], config: &SvmConfig) -> Result<LinearSvmModel, SvmError> {
    if corpus.iter().all(Sentence::is_empty) {
        return Err(SvmError::EmptyCorpus);
    }
    let mut gold = Vec::new();
    for (i, sentence) in corpus.iter().enumerate() {
        gold.extend(sentence.tags().ok_or(SvmError::Untagged(i))?);
    }
    let vocab = FeatureVocab::fit(corpus, config.window)?;
    let xs: Vec<SparseVec> = corpus
        .iter()
        .flat_map(|s| vocab.vectorize_sentence(s))
        .map(to_sparse)
        .collect();

    let mut model = LinearSvmModel::zeros(vocab, config.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for tag in Tag::ALL {
        if !gold.contains(&tag) {
            log::warn!("label {tag} never occurs in the training data; its machine stays zero");
            continue;
        }
        let ys: Vec<f64> = gold.iter().map(|&g| if g == tag { 1.0 } else { -1.0 }).collect();
        let (machine, _) = train_binary(&xs, &ys, model.vocab.len(), config.c, config.epochs, &mut rng);
        model.weights[tag.index()] = machine.weights();
        model.bias[tag.index()] = machine.bias;
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::AnnotatedToken;
    use rand::Rng;

    fn tagged(rows: &[(&str, Tag)]) -> Sentence {
        Sentence::new(
            rows.iter()
                .map(|(l, t)| AnnotatedToken::new(l, l, "NOUN", "dep").with_tag(*t))
                .collect(),
            "s",
        )
    }

    #[test]
    fn zero_model_predicts_outside() {
        let s = tagged(&[("a", Tag::B), ("b", Tag::I)]);
        let vocab = FeatureVocab::fit(std::slice::from_ref(&s), 1).unwrap();
        let model = LinearSvmModel::zeros(vocab, SvmConfig::default());
        assert_eq!(model.predict(&s), vec![Tag::O, Tag::O]);
    }

    #[test]
    fn constructed_weight_selects_begin() {
        let s = tagged(&[("skill", Tag::O), ("other", Tag::O)]);
        let vocab = FeatureVocab::fit(std::slice::from_ref(&s), 0).unwrap();
        let col = vocab
            .column(&crate::features::FeatureKey {
                kind: crate::features::FeatureKind::Lemma,
                offset: 0,
                value: "skill".into(),
            })
            .unwrap();
        let mut model = LinearSvmModel::zeros(vocab, SvmConfig::default());
        model.weights[Tag::B.index()][col] = 1.0;
        assert_eq!(model.predict(&s), vec![Tag::B, Tag::O]);
    }

    #[test]
    fn hand_computed_scores() {
        let s = tagged(&[("x", Tag::O), ("y", Tag::O)]);
        let vocab = FeatureVocab::fit(std::slice::from_ref(&s), 0).unwrap();
        let mut model = LinearSvmModel::zeros(vocab.clone(), SvmConfig::default());
        // columns are dense; give each label a distinct pattern
        for j in 0..vocab.len() {
            model.weights[0][j] = 0.1 * j as f64;
            model.weights[1][j] = 0.3 - 0.05 * j as f64;
            model.weights[2][j] = if j % 2 == 0 { 0.2 } else { -0.2 };
        }
        model.bias = [-0.5, 0.1, 0.0];
        for i in 0..s.len() {
            let active = vocab.vectorize_token(&s, i);
            let mut expected = [0.0; 3];
            for label in 0..3 {
                let mut sum = model.bias[label];
                for &j in &active {
                    sum += model.weights[label][j];
                }
                expected[label] = sum;
            }
            let got = model.scores(&active);
            for label in 0..3 {
                assert!((got[label] - expected[label]).abs() < 1e-12);
            }
            let best = (0..3)
                .fold(0, |b, l| if expected[l] > expected[b] { l } else { b });
            assert_eq!(model.predict(&s)[i], Tag::ALL[best]);
        }
    }

    #[test]
    fn argmax_ties_prefer_label_order() {
        assert_eq!(argmax(&[0.0, 0.0, 0.0]), Tag::O);
        assert_eq!(argmax(&[0.0, 1.0, 1.0]), Tag::B);
        assert_eq!(argmax(&[-1.0, -2.0, 3.0]), Tag::I);
    }

    #[test]
    fn single_label_corpus_predicts_that_label() {
        let corpus: Vec<Sentence> = (0..5)
            .map(|i| tagged(&[(&format!("w{i}"), Tag::B), ("x", Tag::B)]))
            .collect();
        let model = train_svm(&corpus, &SvmConfig::default()).unwrap();
        assert!(model.weights[Tag::O.index()].iter().all(|&w| w == 0.0));
        for s in &corpus {
            assert!(model.predict(s).iter().all(|&t| t == Tag::B));
        }
        let unseen = tagged(&[("zzz", Tag::O)]);
        assert_eq!(model.predict(&unseen), vec![Tag::B]);
    }

    #[test]
    fn training_errors() {
        assert!(matches!(train_svm(&[], &SvmConfig::default()), Err(SvmError::EmptyCorpus)));
        let untagged = Sentence::new(vec![AnnotatedToken::new("a", "a", "X", "d")], "s");
        assert!(matches!(
            train_svm(&[untagged], &SvmConfig::default()),
            Err(SvmError::Untagged(0))
        ));
    }

    #[test]
    fn training_is_bitwise_deterministic() {
        let corpus: Vec<Sentence> = (0..20)
            .map(|i| {
                tagged(&[
                    ("the", Tag::O),
                    ("ability", Tag::B),
                    ("to", Tag::I),
                    (if i % 2 == 0 { "lead" } else { "listen" }, Tag::I),
                ])
            })
            .collect();
        let a = train_svm(&corpus, &SvmConfig::default()).unwrap();
        let b = train_svm(&corpus, &SvmConfig::default()).unwrap();
        for l in 0..3 {
            let wa: Vec<u64> = a.weights[l].iter().map(|w| w.to_bits()).collect();
            let wb: Vec<u64> = b.weights[l].iter().map(|w| w.to_bits()).collect();
            assert_eq!(wa, wb);
            assert_eq!(a.bias[l].to_bits(), b.bias[l].to_bits());
        }
        for s in &corpus {
            assert_eq!(a.predict(s), s.tags().unwrap());
        }
    }

    #[test]
    fn positive_rescaling_preserves_predictions() {
        let corpus: Vec<Sentence> = (0..10)
            .map(|i| tagged(&[("a", Tag::O), (&format!("s{}", i % 3), Tag::B), ("b", Tag::I)]))
            .collect();
        let model = train_svm(&corpus, &SvmConfig::default()).unwrap();
        let mut scaled = model.clone();
        for l in 0..3 {
            scaled.weights[l].iter_mut().for_each(|w| *w *= 3.5);
            scaled.bias[l] *= 3.5;
        }
        for s in &corpus {
            assert_eq!(model.predict(s), scaled.predict(s));
        }
    }

    fn random_sparse(rng: &mut ChaCha8Rng, dim: usize) -> SparseVec {
        let mut cols: Vec<usize> = (0..dim).filter(|_| rng.random_bool(0.5)).collect();
        if cols.is_empty() {
            cols.push(0);
        }
        cols.into_iter().map(|j| (j, rng.random_range(-2.0..2.0))).collect()
    }

    #[test]
    fn step_follows_finite_difference_subgradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dim = 6;
        let h = 1e-6;
        let mut checked = 0;
        while checked < 25 {
            let w: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b = rng.random_range(-1.0..1.0);
            let x = random_sparse(&mut rng, dim);
            let y = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let lambda = rng.random_range(0.01..1.0);
            let margin = y * (sparse_dot(&w, &x) + b);
            if (margin - 1.0).abs() < 1e-3 {
                continue;
            }
            let (gw, gb) = example_subgradient(&w, b, &x, y, lambda);
            let f = |w: &[f64], b: f64| example_objective(w, b, &x, y, lambda);
            for j in 0..dim {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[j] += h;
                wm[j] -= h;
                let fd = (f(&wp, b) - f(&wm, b)) / (2.0 * h);
                let rel = (fd - gw[j]).abs() / fd.abs().max(gw[j].abs()).max(1e-8);
                assert!(rel < 1e-5, "dw{j}: fd {fd} analytic {}", gw[j]);
            }
            let fd_b = (f(&w, b + h) - f(&w, b - h)) / (2.0 * h);
            assert!((fd_b - gb).abs() < 1e-6);

            // the scaled machine performs exactly (w, b) − η g
            let mut machine = BinaryMachine::new(dim);
            machine.v = w.clone();
            machine.bias = b;
            let eta = rng.random_range(0.01..0.5);
            machine.step(&x, y, eta, lambda);
            let got = machine.weights();
            for j in 0..dim {
                assert!((got[j] - (w[j] - eta * gw[j])).abs() < 1e-12);
            }
            assert!((machine.bias - (b - eta * gb)).abs() < 1e-12);
            checked += 1;
        }
    }
}
