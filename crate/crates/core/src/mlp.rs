//! Time-distributed multilayer perceptron tagger.
//!
//! Every token position is classified independently from the embeddings of
//! a small window around it:
//!
//! ```text
//! x = [e(i-1) ; e(i) ; e(i+1)]          (3 × 50 inputs for context 1)
//! h = ReLU(x W1 + b1)                   (64 hidden units)
//! h = dropout(h)                        (inverted scaling, training only)
//! p = softmax(h W2 + b2)                (O, B-EXTR, I-EXTR)
//! ```
//!
//! Padding, masked positions and out-of-sentence neighbours contribute a zero
//! embedding, so ids at masked positions never influence anything. Training
//! minimizes the masked mean cross-entropy with Adam.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{Sentence, Tag};
use crate::features::{encode_sequence, EncodedChunk, WordVocab, DEFAULT_MAX_LEN, PAD_ID};

pub const NUM_LABELS: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum MlpError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("sentence {0} is not fully tagged")]
    Untagged(usize),
    #[error("word id {id} out of range for vocabulary of {len}")]
    IdOutOfRange { id: usize, len: usize },
    #[error("expected {expected} ids, got {got}")]
    Length { expected: usize, got: usize },
    #[error("embedding line {line}: {message}")]
    Embedding { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub max_len: usize,
    pub embed_dim: usize,
    pub hidden: usize,
    /// Neighbours on each side feeding a token's input.
    pub context: usize,
    pub dropout: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub init_scale: f64,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            batch_size: 128,
            epochs: 20,
            max_len: DEFAULT_MAX_LEN,
            embed_dim: 50,
            hidden: 64,
            context: 1,
            dropout: 0.5,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            init_scale: 0.05,
            seed: 42,
        }
    }
}

impl MlpConfig {
    pub fn input_dim(&self) -> usize {
        (2 * self.context + 1) * self.embed_dim
    }
}

/// Trainable tensors, all row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    /// vocab × embed_dim; row `PAD_ID` is never read.
    pub embedding: Vec<f64>,
    /// input_dim × hidden
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// hidden × 3
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl MlpParams {
    pub fn zeros(vocab_len: usize, cfg: &MlpConfig) -> Self {
        MlpParams {
            embedding: vec![0.0; vocab_len * cfg.embed_dim],
            w1: vec![0.0; cfg.input_dim() * cfg.hidden],
            b1: vec![0.0; cfg.hidden],
            w2: vec![0.0; cfg.hidden * NUM_LABELS],
            b2: vec![0.0; NUM_LABELS],
        }
    }

    /// Embeddings uniform in ±init_scale, dense layers Glorot-uniform,
    /// biases zero.
    pub fn random(vocab_len: usize, cfg: &MlpConfig, rng: &mut ChaCha8Rng) -> Self {
        let mut p = Self::zeros(vocab_len, cfg);
        let s = cfg.init_scale;
        p.embedding.iter_mut().for_each(|v| *v = rng.random_range(-s..=s));
        for row in 0..PAD_ID + 1 {
            p.embedding[row * cfg.embed_dim..(row + 1) * cfg.embed_dim].fill(0.0);
        }
        let g1 = (6.0 / (cfg.input_dim() + cfg.hidden) as f64).sqrt();
        p.w1.iter_mut().for_each(|v| *v = rng.random_range(-g1..=g1));
        let g2 = (6.0 / (cfg.hidden + NUM_LABELS) as f64).sqrt();
        p.w2.iter_mut().for_each(|v| *v = rng.random_range(-g2..=g2));
        p
    }

    pub fn tensors(&self) -> [(&'static str, &Vec<f64>); 5] {
        [
            ("embedding", &self.embedding),
            ("w1", &self.w1),
            ("b1", &self.b1),
            ("w2", &self.w2),
            ("b2", &self.b2),
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<f64>; 5] {
        [
            &mut self.embedding,
            &mut self.w1,
            &mut self.b1,
            &mut self.w2,
            &mut self.b2,
        ]
    }

    pub fn all_finite(&self) -> bool {
        self.tensors().iter().all(|(_, t)| t.iter().all(|v| v.is_finite()))
    }
}

/// First/second moment estimates for every tensor of [`MlpParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub step: u64,
    pub m: MlpParams,
    pub v: MlpParams,
}

impl AdamState {
    pub fn new(vocab_len: usize, cfg: &MlpConfig) -> Self {
        AdamState {
            step: 0,
            m: MlpParams::zeros(vocab_len, cfg),
            v: MlpParams::zeros(vocab_len, cfg),
        }
    }

    /// Bias-corrected Adam update of `params` with gradient `grad`.
    pub fn update(&mut self, params: &mut MlpParams, grad: &MlpParams, cfg: &MlpConfig) {
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - cfg.beta1.powi(t);
        let c2 = 1.0 - cfg.beta2.powi(t);
        let ps = params.tensors_mut();
        let ms = self.m.tensors_mut();
        let vs = self.v.tensors_mut();
        for (((p, m), v), (_, g)) in ps.into_iter().zip(ms).zip(vs).zip(grad.tensors()) {
            for i in 0..p.len() {
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                p[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
            }
        }
    }
}

/// Softmax with max subtraction; finite for any finite logits.
pub fn softmax(z: &[f64; NUM_LABELS]) -> [f64; NUM_LABELS] {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; NUM_LABELS];
    let mut sum = 0.0;
    for (o, &v) in out.iter_mut().zip(z) {
        *o = (v - max).exp();
        sum += *o;
    }
    out.iter_mut().for_each(|o| *o /= sum);
    out
}

/// Highest probability label; ties go to the earlier label.
pub fn argmax_row(row: &[f64; NUM_LABELS]) -> Tag {
    let mut best = 0;
    for i in 1..NUM_LABELS {
        if row[i] > row[best] {
            best = i;
        }
    }
    Tag::ALL[best]
}

/// Per-position intermediates kept for backpropagation.
struct PositionCache {
    pos: usize,
    /// Embedding row feeding each window slot, or None for a zero input.
    inputs: Vec<Option<usize>>,
    pre: Vec<f64>,
    /// Dropout multipliers (1.0 when not training).
    keep: Vec<f64>,
    probs: [f64; NUM_LABELS],
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub config: MlpConfig,
    pub vocab: WordVocab,
    pub params: MlpParams,
    pub adam: AdamState,
}

impl MlpModel {
    pub fn new(vocab: WordVocab, config: MlpConfig, params: MlpParams) -> Self {
        let adam = AdamState::new(vocab.len(), &config);
        MlpModel {
            config,
            vocab,
            params,
            adam,
        }
    }

    pub fn zeros(vocab: WordVocab, config: MlpConfig) -> Self {
        let params = MlpParams::zeros(vocab.len(), &config);
        Self::new(vocab, config, params)
    }

    fn check_ids(&self, ids: &[usize], mask: &[bool]) -> Result<(), MlpError> {
        if ids.len() != self.config.max_len || mask.len() != ids.len() {
            return Err(MlpError::Length {
                expected: self.config.max_len,
                got: ids.len().min(mask.len()),
            });
        }
        let len = self.vocab.len();
        match ids.iter().find(|&&id| id >= len) {
            Some(&id) => Err(MlpError::IdOutOfRange { id, len }),
            None => Ok(()),
        }
    }

    fn window_inputs(&self, ids: &[usize], mask: &[bool], pos: usize) -> Vec<Option<usize>> {
        let c = self.config.context as isize;
        (-c..=c)
            .map(|off| {
                let j = pos as isize + off;
                if j < 0 || j as usize >= ids.len() || !mask[j as usize] {
                    return None;
                }
                let id = ids[j as usize];
                (id != PAD_ID).then_some(id)
            })
            .collect()
    }

    fn forward_position(
        &self,
        params: &MlpParams,
        ids: &[usize],
        mask: &[bool],
        pos: usize,
        rng: Option<&mut ChaCha8Rng>,
    ) -> PositionCache {
        let cfg = &self.config;
        let (e, h) = (cfg.embed_dim, cfg.hidden);
        // a masked position is computed from an all-zero input
        let inputs = if mask[pos] {
            self.window_inputs(ids, mask, pos)
        } else {
            vec![None; 2 * cfg.context + 1]
        };
        let mut pre = params.b1.clone();
        for (slot, input) in inputs.iter().enumerate() {
            let Some(row) = *input else { continue };
            let emb = &params.embedding[row * e..(row + 1) * e];
            for (k, &xk) in emb.iter().enumerate() {
                let w_row = &params.w1[(slot * e + k) * h..(slot * e + k + 1) * h];
                for (p, &w) in pre.iter_mut().zip(w_row) {
                    *p += xk * w;
                }
            }
        }
        let keep: Vec<f64> = match rng {
            Some(rng) if cfg.dropout > 0.0 => {
                let scale = 1.0 / (1.0 - cfg.dropout);
                (0..h)
                    .map(|_| if rng.random::<f64>() < cfg.dropout { 0.0 } else { scale })
                    .collect()
            }
            _ => vec![1.0; h],
        };
        let mut logits = [0.0; NUM_LABELS];
        logits.copy_from_slice(&params.b2);
        for j in 0..h {
            let a = pre[j].max(0.0) * keep[j];
            if a != 0.0 {
                for (l, logit) in logits.iter_mut().enumerate() {
                    *logit += a * params.w2[j * NUM_LABELS + l];
                }
            }
        }
        PositionCache {
            pos,
            inputs,
            pre,
            keep,
            probs: softmax(&logits),
        }
    }

    /// Probability rows for every one of the `max_len` positions. Dropout is
    /// applied only when `dropout_rng` is given.
    pub fn forward(
        &self,
        ids: &[usize],
        mask: &[bool],
        mut dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<Vec<[f64; NUM_LABELS]>, MlpError> {
        self.check_ids(ids, mask)?;
        Ok((0..ids.len())
            .map(|pos| {
                self.forward_position(&self.params, ids, mask, pos, dropout_rng.as_deref_mut())
                    .probs
            })
            .collect())
    }

    /// Post-dropout hidden activations for one position.
    pub fn hidden_activations(
        &self,
        ids: &[usize],
        mask: &[bool],
        pos: usize,
        dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Vec<f64> {
        let cache = self.forward_position(&self.params, ids, mask, pos, dropout_rng);
        cache
            .pre
            .iter()
            .zip(&cache.keep)
            .map(|(p, k)| p.max(0.0) * k)
            .collect()
    }

    /// Masked mean cross-entropy over `chunks` and its gradient at `params`.
    pub fn loss_and_grad(
        &self,
        params: &MlpParams,
        chunks: &[&EncodedChunk],
        mut dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> (f64, MlpParams) {
        let cfg = &self.config;
        let (e, h) = (cfg.embed_dim, cfg.hidden);
        let mut grad = MlpParams::zeros(self.vocab.len(), cfg);
        let count: usize = chunks.iter().map(|c| c.real_len()).sum();
        if count == 0 {
            return (0.0, grad);
        }
        let norm = 1.0 / count as f64;
        let mut loss = 0.0;
        let mut dpre = vec![0.0; h];
        for chunk in chunks {
            for pos in (0..chunk.ids.len()).filter(|&p| chunk.mask[p]) {
                let cache =
                    self.forward_position(params, &chunk.ids, &chunk.mask, pos, dropout_rng.as_deref_mut());
                let label = chunk.labels[cache.pos];
                loss -= cache.probs[label].max(f64::MIN_POSITIVE).ln() * norm;

                let mut dz = cache.probs;
                dz[label] -= 1.0;
                dz.iter_mut().for_each(|d| *d *= norm);
                for (l, d) in dz.iter().enumerate() {
                    grad.b2[l] += d;
                }
                for j in 0..h {
                    let a = cache.pre[j].max(0.0) * cache.keep[j];
                    let w2_row = &params.w2[j * NUM_LABELS..(j + 1) * NUM_LABELS];
                    let g2_row = &mut grad.w2[j * NUM_LABELS..(j + 1) * NUM_LABELS];
                    let mut da = 0.0;
                    for l in 0..NUM_LABELS {
                        g2_row[l] += a * dz[l];
                        da += w2_row[l] * dz[l];
                    }
                    dpre[j] = if cache.pre[j] > 0.0 { da * cache.keep[j] } else { 0.0 };
                    grad.b1[j] += dpre[j];
                }
                for (slot, input) in cache.inputs.iter().enumerate() {
                    let Some(row) = *input else { continue };
                    for k in 0..e {
                        let xk = params.embedding[row * e + k];
                        let base = (slot * e + k) * h;
                        let w_row = &params.w1[base..base + h];
                        let g_row = &mut grad.w1[base..base + h];
                        let mut dx = 0.0;
                        for j in 0..h {
                            g_row[j] += xk * dpre[j];
                            dx += w_row[j] * dpre[j];
                        }
                        grad.embedding[row * e + k] += dx;
                    }
                }
            }
        }
        (loss, grad)
    }

    /// Masked mean cross-entropy with dropout disabled.
    pub fn loss(&self, chunks: &[&EncodedChunk]) -> f64 {
        self.loss_and_grad(&self.params, chunks, None).0
    }

    pub fn predict(&self, sentence: &Sentence) -> Vec<Tag> {
        let mut tags = Vec::with_capacity(sentence.len());
        for chunk in encode_sequence(sentence, &self.vocab, self.config.max_len) {
            let rows = self
                .forward(&chunk.ids, &chunk.mask, None)
                .expect("encoded ids are within the vocabulary");
            tags.extend(
                rows.iter()
                    .zip(&chunk.mask)
                    .filter(|(_, &m)| m)
                    .map(|(row, _)| argmax_row(row)),
            );
        }
        tags
    }

    /// Overwrite embedding rows from `word v1 ... vN` lines. Returns the
    /// number of vocabulary words that received a vector.
    pub fn load_pretrained_embeddings(&mut self, text: &str) -> Result<usize, MlpError> {
        let e = self.config.embed_dim;
        let mut loaded = 0;
        for (i, line) in text.lines().enumerate() {
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let values = parts
                .map(str::parse::<f64>)
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|err| MlpError::Embedding {
                    line: i + 1,
                    message: err.to_string(),
                })?;
            if values.len() != e {
                return Err(MlpError::Embedding {
                    line: i + 1,
                    message: format!("expected {e} values, found {}", values.len()),
                });
            }
            if let Some(id) = self.vocab.get(word).filter(|&id| id != PAD_ID) {
                self.params.embedding[id * e..(id + 1) * e].copy_from_slice(&values);
                loaded += 1;
            }
        }
        Ok(loaded)
    }

    /// Train in place on pre-encoded chunks. Returns the mean training loss
    /// of each epoch (as measured during the epoch, with dropout).
    pub fn fit_chunks(&mut self, chunks: &[EncodedChunk], epochs: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut order: Vec<usize> = (0..chunks.len()).filter(|&i| chunks[i].real_len() > 0).collect();
        let batch = self.config.batch_size.max(1);
        let mut history = Vec::with_capacity(epochs);
        for _ in 0..epochs {
            order.shuffle(rng);
            let mut epoch_loss = 0.0;
            let mut batches = 0;
            for idx in order.chunks(batch) {
                let refs: Vec<&EncodedChunk> = idx.iter().map(|&i| &chunks[i]).collect();
                let (loss, grad) = self.loss_and_grad(&self.params, &refs, Some(rng));
                let cfg = self.config.clone();
                self.adam.update(&mut self.params, &grad, &cfg);
                epoch_loss += loss;
                batches += 1;
            }
            history.push(if batches > 0 { epoch_loss / batches as f64 } else { 0.0 });
        }
        history
    }
}

pub fn encode_corpus(corpus: &[Sentence], vocab: &WordVocab, max_len: usize) -> Vec<EncodedChunk> {
    corpus
        .iter()
        .flat_map(|s| encode_sequence(s, vocab, max_len))
        .collect()
}

pub fn train_mlp(corpus: &[Sentence], config: &MlpConfig) -> Result<MlpModel, MlpError> {
    train_mlp_with_embeddings(corpus, config, None).map(|(m, _)| m)
}

/// Like [`train_mlp`], with embedding rows optionally initialized from
/// `word v1 ... vN` text before training. Also returns how many vocabulary
/// words received a pretrained vector.
pub fn train_mlp_with_embeddings(
    corpus: &[Sentence],
    config: &MlpConfig,
    embeddings: Option<&str>,
) -> Result<(MlpModel, usize), MlpError> {
    if corpus.iter().all(Sentence::is_empty) {
        return Err(MlpError::EmptyCorpus);
    }
    if let Some(i) = corpus.iter().position(|s| s.tags().is_none()) {
        return Err(MlpError::Untagged(i));
    }
    let vocab = WordVocab::fit(corpus);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let params = MlpParams::random(vocab.len(), config, &mut rng);
    let chunks = encode_corpus(corpus, &vocab, config.max_len);
    let mut model = MlpModel::new(vocab, config.clone(), params);
    let loaded = match embeddings {
        Some(text) => model.load_pretrained_embeddings(text)?,
        None => 0,
    };
    model.fit_chunks(&chunks, config.epochs, &mut rng);
    Ok((model, loaded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::AnnotatedToken;

    fn small_config() -> MlpConfig {
        MlpConfig {
            max_len: 6,
            embed_dim: 4,
            hidden: 5,
            batch_size: 4,
            ..MlpConfig::default()
        }
    }

    fn tagged(rows: &[(&str, Tag)]) -> Sentence {
        Sentence::new(
            rows.iter()
                .map(|(l, t)| AnnotatedToken::new(l, l, "X", "dep").with_tag(*t))
                .collect(),
            "s",
        )
    }

    fn random_model(cfg: MlpConfig, vocab_len: usize, seed: u64) -> MlpModel {
        let vocab = WordVocab::from_words((2..vocab_len).map(|i| format!("w{i}")));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = MlpParams::random(vocab.len(), &cfg, &mut rng);
        params.b1.iter_mut().for_each(|b| *b = rng.random_range(-0.5..0.5));
        params.b2.iter_mut().for_each(|b| *b = rng.random_range(-0.5..0.5));
        MlpModel::new(vocab, cfg, params)
    }

    #[test]
    fn zero_model_rows_are_uniform_and_predict_outside() {
        let cfg = small_config();
        let s = tagged(&[("a", Tag::B), ("b", Tag::I)]);
        let model = MlpModel::zeros(WordVocab::fit(std::slice::from_ref(&s)), cfg);
        let chunk = &encode_sequence(&s, &model.vocab, 6)[0];
        for row in model.forward(&chunk.ids, &chunk.mask, None).unwrap() {
            for p in row {
                assert!((p - 1.0 / 3.0).abs() < 1e-15);
            }
        }
        assert_eq!(model.predict(&s), vec![Tag::O, Tag::O]);
    }

    #[test]
    fn all_pad_input_has_zero_loss() {
        let model = random_model(small_config(), 10, 1);
        let chunk = EncodedChunk {
            ids: vec![PAD_ID; 6],
            mask: vec![false; 6],
            labels: vec![0; 6],
            offset: 0,
        };
        assert_eq!(model.forward(&chunk.ids, &chunk.mask, None).unwrap().len(), 6);
        let (loss, grad) = model.loss_and_grad(&model.params, &[&chunk], None);
        assert_eq!(loss, 0.0);
        assert!(grad.tensors().iter().all(|(_, t)| t.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn forward_rejects_bad_ids() {
        let model = random_model(small_config(), 10, 1);
        assert_eq!(
            model.forward(&[0, 1, 2, 3, 4, 99], &[true; 6], None),
            Err(MlpError::IdOutOfRange { id: 99, len: 10 })
        );
        assert!(matches!(
            model.forward(&[0, 1], &[true; 2], None),
            Err(MlpError::Length { .. })
        ));
    }

    #[test]
    fn argmax_of_probability_row() {
        assert_eq!(argmax_row(&[0.1, 0.7, 0.2]), Tag::B);
        assert_eq!(argmax_row(&[0.4, 0.2, 0.4]), Tag::O);
    }

    #[test]
    fn softmax_is_stable_for_huge_logits() {
        for z in [[1e4, -1e4, 0.0], [-1e4, -1e4, -1e4], [1e4, 1e4, 1e4 - 1.0]] {
            let p = softmax(&z);
            assert!(p.iter().all(|v| v.is_finite()));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    /// Straightforward re-implementation with explicit input vectors.
    fn reference_forward(model: &MlpModel, ids: &[usize], mask: &[bool]) -> Vec<[f64; 3]> {
        let cfg = &model.config;
        let (e, h, c) = (cfg.embed_dim, cfg.hidden, cfg.context as i64);
        let p = &model.params;
        (0..ids.len())
            .map(|i| {
                let mut x = vec![0.0; cfg.input_dim()];
                if mask[i] {
                    for (slot, off) in (-c..=c).enumerate() {
                        let j = i as i64 + off;
                        if j >= 0 && (j as usize) < ids.len() && mask[j as usize] && ids[j as usize] != 0 {
                            let row = ids[j as usize];
                            x[slot * e..(slot + 1) * e].copy_from_slice(&p.embedding[row * e..(row + 1) * e]);
                        }
                    }
                }
                let hidden: Vec<f64> = (0..h)
                    .map(|j| {
                        let s: f64 = (0..x.len()).map(|k| x[k] * p.w1[k * h + j]).sum();
                        (s + p.b1[j]).max(0.0)
                    })
                    .collect();
                let mut z = [0.0; 3];
                for (l, zl) in z.iter_mut().enumerate() {
                    *zl = p.b2[l] + (0..h).map(|j| hidden[j] * p.w2[j * 3 + l]).sum::<f64>();
                }
                let m = z.iter().cloned().fold(f64::MIN, f64::max);
                let ex: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
                let sum: f64 = ex.iter().sum();
                [ex[0] / sum, ex[1] / sum, ex[2] / sum]
            })
            .collect()
    }

    #[test]
    fn forward_matches_reference_implementation() {
        for seed in 0..10 {
            let model = random_model(small_config(), 12, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let len = rng.random_range(0..=6);
            let ids: Vec<usize> = (0..6).map(|i| if i < len { rng.random_range(0..12) } else { 0 }).collect();
            let mask: Vec<bool> = (0..6).map(|i| i < len).collect();
            let got = model.forward(&ids, &mask, None).unwrap();
            let want = reference_forward(&model, &ids, &mask);
            for (g, w) in got.iter().zip(&want) {
                assert!((g.iter().sum::<f64>() - 1.0).abs() < 1e-6);
                for l in 0..3 {
                    assert!((g[l] - w[l]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_learning_rate_leaves_parameters_unchanged() {
        let corpus = vec![tagged(&[("a", Tag::B), ("b", Tag::I), ("c", Tag::O)])];
        let cfg = MlpConfig {
            learning_rate: 0.0,
            epochs: 3,
            ..small_config()
        };
        let vocab = WordVocab::fit(&corpus);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let initial = MlpParams::random(vocab.len(), &cfg, &mut rng);
        let trained = train_mlp(&corpus, &cfg).unwrap();
        assert_eq!(trained.params, initial);
        assert_eq!(trained.adam.step, 3);
    }

    #[test]
    fn training_errors() {
        assert_eq!(train_mlp(&[], &small_config()), Err(MlpError::EmptyCorpus));
        let untagged = Sentence::new(vec![AnnotatedToken::new("a", "a", "X", "d")], "s");
        assert_eq!(train_mlp(&[untagged], &small_config()), Err(MlpError::Untagged(0)));
    }

    #[test]
    fn pretrained_embeddings_overwrite_known_rows() {
        let cfg = small_config();
        let mut model = random_model(cfg, 6, 3);
        let text = "w2 1 2 3 4\nunknown 0 0 0 0\n<PAD> 9 9 9 9\n";
        assert_eq!(model.load_pretrained_embeddings(text).unwrap(), 1);
        assert_eq!(&model.params.embedding[2 * 4..3 * 4], &[1.0, 2.0, 3.0, 4.0]);
        assert!(model.params.embedding[..4].iter().all(|&v| v == 0.0));
        assert!(matches!(
            model.load_pretrained_embeddings("w3 1 2\n"),
            Err(MlpError::Embedding { line: 1, .. })
        ));
    }
}
