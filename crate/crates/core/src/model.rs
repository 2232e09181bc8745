//! Tagger model files.
//!
//! A model file is UTF-8 text: `# key = value` provenance lines, then
//! `[section]` blocks of tab-separated rows. Floats are written in Rust's
//! shortest round-trip form, so a reloaded model scores bit-identically.
//! The model id is a hash of everything after the header.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{Sentence, Tag};
use crate::eval::Tagger;
use crate::features::{FeatureKey, FeatureKind, FeatureVocab, WordVocab};
use crate::mlp::{AdamState, MlpConfig, MlpModel, MlpParams};
use crate::svm::{LinearSvmModel, SvmConfig};

pub const FORMAT_VERSION: u32 = 1;
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("model file lacks section [{0}]")]
    MissingSection(String),
    #[error("unsupported model format version {0}")]
    Version(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaggerModel {
    Svm(LinearSvmModel),
    Mlp(MlpModel),
}

impl TaggerModel {
    pub fn kind(&self) -> &'static str {
        match self {
            TaggerModel::Svm(_) => "svm",
            TaggerModel::Mlp(_) => "mlp",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            TaggerModel::Svm(m) => m.config.seed,
            TaggerModel::Mlp(m) => m.config.seed,
        }
    }

    fn body(&self) -> String {
        match self {
            TaggerModel::Svm(m) => svm_body(m),
            TaggerModel::Mlp(m) => mlp_body(m),
        }
    }

    /// First 16 hex digits of the SHA-256 of the serialized parameters.
    pub fn model_id(&self) -> String {
        hash_id(&self.body())
    }
}

impl Tagger for TaggerModel {
    fn tag(&self, sentence: &Sentence) -> Vec<Tag> {
        match self {
            TaggerModel::Svm(m) => m.predict(sentence),
            TaggerModel::Mlp(m) => m.predict(sentence),
        }
    }
}

fn hash_id(body: &str) -> String {
    let digest = Sha256::digest(body.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// A model plus the provenance header it was stored with.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredModel {
    pub model: TaggerModel,
    pub meta: Vec<(String, String)>,
}

impl StoredModel {
    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Serialize with a provenance header. `extra` pairs (annotator, corpus
/// name, ...) are written after the fixed keys.
pub fn format_model(model: &TaggerModel, extra: &[(String, String)]) -> String {
    let body = model.body();
    let mut out = String::new();
    let _ = writeln!(out, "# format = softskill-model {FORMAT_VERSION}");
    let _ = writeln!(out, "# kind = {}", model.kind());
    let _ = writeln!(out, "# toolkit_version = {TOOLKIT_VERSION}");
    let _ = writeln!(out, "# model_id = {}", hash_id(&body));
    let _ = writeln!(out, "# seed = {}", model.seed());
    for (k, v) in extra {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out.push_str(&body);
    out
}

pub fn write_model(model: &TaggerModel, extra: &[(String, String)], path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    std::fs::write(path, format_model(model, extra)).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_model(path: impl AsRef<Path>) -> Result<StoredModel, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&text)
}

fn svm_body(m: &LinearSvmModel) -> String {
    let mut out = String::from("[svm-config]\n");
    let _ = writeln!(out, "c\t{:?}", m.config.c);
    let _ = writeln!(out, "epochs\t{}", m.config.epochs);
    let _ = writeln!(out, "seed\t{}", m.config.seed);
    let _ = writeln!(out, "window\t{}", m.config.window);
    out.push_str("[features]\n");
    for (key, col) in m.vocab.entries() {
        let _ = writeln!(out, "{col}\t{}\t{}\t{}", key.kind, key.offset, key.value);
    }
    out.push_str("[bias]\n");
    for tag in Tag::ALL {
        let _ = writeln!(out, "{tag}\t{:?}", m.bias[tag.index()]);
    }
    out.push_str("[weights]\n");
    for tag in Tag::ALL {
        for (col, w) in m.weights[tag.index()].iter().enumerate() {
            if *w != 0.0 {
                let _ = writeln!(out, "{tag}\t{col}\t{w:?}");
            }
        }
    }
    out
}

fn write_tensor(out: &mut String, name: &str, values: &[f64], cols: usize) {
    let rows = if cols == 0 { 0 } else { values.len() / cols };
    let _ = writeln!(out, "[tensor {name} {rows} {cols}]");
    for row in values.chunks(cols.max(1)) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join("\t"));
        out.push('\n');
    }
}

fn write_params(out: &mut String, prefix: &str, p: &MlpParams, cfg: &MlpConfig) {
    write_tensor(out, &format!("{prefix}embedding"), &p.embedding, cfg.embed_dim);
    write_tensor(out, &format!("{prefix}w1"), &p.w1, cfg.hidden);
    write_tensor(out, &format!("{prefix}b1"), &p.b1, cfg.hidden);
    write_tensor(out, &format!("{prefix}w2"), &p.w2, crate::mlp::NUM_LABELS);
    write_tensor(out, &format!("{prefix}b2"), &p.b2, crate::mlp::NUM_LABELS);
}

fn mlp_body(m: &MlpModel) -> String {
    let c = &m.config;
    let mut out = String::from("[mlp-config]\n");
    let fields: [(&str, String); 13] = [
        ("batch_size", c.batch_size.to_string()),
        ("epochs", c.epochs.to_string()),
        ("max_len", c.max_len.to_string()),
        ("embed_dim", c.embed_dim.to_string()),
        ("hidden", c.hidden.to_string()),
        ("context", c.context.to_string()),
        ("dropout", format!("{:?}", c.dropout)),
        ("learning_rate", format!("{:?}", c.learning_rate)),
        ("beta1", format!("{:?}", c.beta1)),
        ("beta2", format!("{:?}", c.beta2)),
        ("epsilon", format!("{:?}", c.epsilon)),
        ("init_scale", format!("{:?}", c.init_scale)),
        ("seed", c.seed.to_string()),
    ];
    for (k, v) in fields {
        let _ = writeln!(out, "{k}\t{v}");
    }
    out.push_str("[words]\n");
    for (i, w) in m.vocab.words().iter().enumerate() {
        let _ = writeln!(out, "{}\t{w}", i + 2);
    }
    write_params(&mut out, "", &m.params, c);
    let _ = writeln!(out, "[adam]\nstep\t{}", m.adam.step);
    write_params(&mut out, "m.", &m.adam.m, c);
    write_params(&mut out, "v.", &m.adam.v, c);
    out
}

struct Section {
    name: String,
    /// (1-based line number, content)
    rows: Vec<(usize, String)>,
}

fn perr(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        message: message.into(),
    }
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, ModelError> {
    s.parse::<T>().map_err(|_| perr(line, format!("bad number {s:?}")))
}

struct Sections {
    list: Vec<Section>,
}

impl Sections {
    fn get(&self, name: &str) -> Result<&Section, ModelError> {
        self.list
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| ModelError::MissingSection(name.to_string()))
    }

    fn key_values(&self, name: &str) -> Result<BTreeMap<String, (usize, String)>, ModelError> {
        let mut out = BTreeMap::new();
        for (line, row) in &self.get(name)?.rows {
            let (k, v) = row.split_once('\t').ok_or_else(|| perr(*line, "expected key<TAB>value"))?;
            out.insert(k.to_string(), (*line, v.to_string()));
        }
        Ok(out)
    }

    /// Tensor values and their declared (rows, cols).
    fn tensor(&self, name: &str) -> Result<Vec<f64>, ModelError> {
        let prefix = format!("tensor {name} ");
        let section = self
            .list
            .iter()
            .find(|s| s.name.starts_with(&prefix))
            .ok_or_else(|| ModelError::MissingSection(format!("tensor {name}")))?;
        let dims: Vec<&str> = section.name[prefix.len()..].split(' ').collect();
        let header_line = section.rows.first().map_or(0, |r| r.0.saturating_sub(1));
        if dims.len() != 2 {
            return Err(perr(header_line, "tensor header needs rows and cols"));
        }
        let rows: usize = num(header_line, dims[0])?;
        let cols: usize = num(header_line, dims[1])?;
        if section.rows.len() != rows {
            return Err(perr(header_line, format!("expected {rows} rows, found {}", section.rows.len())));
        }
        let mut values = Vec::with_capacity(rows * cols);
        for (line, row) in &section.rows {
            let before = values.len();
            for cell in row.split('\t').filter(|c| !c.is_empty()) {
                values.push(num::<f64>(*line, cell)?);
            }
            if values.len() - before != cols {
                return Err(perr(*line, format!("expected {cols} values")));
            }
        }
        Ok(values)
    }
}

fn split_sections(text: &str) -> Result<(Vec<(String, String)>, Sections), ModelError> {
    let mut meta = Vec::new();
    let mut list: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if list.is_empty() {
            if let Some(rest) = raw.strip_prefix('#') {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| perr(line, "header lines are '# key = value'"))?;
                meta.push((k.trim().to_string(), v.trim().to_string()));
                continue;
            }
        }
        if let Some(name) = raw.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            list.push(Section {
                name: name.to_string(),
                rows: Vec::new(),
            });
        } else if let Some(section) = list.last_mut() {
            section.rows.push((line, raw.to_string()));
        } else if !raw.trim().is_empty() {
            return Err(perr(line, "content before the first section"));
        }
    }
    Ok((meta, Sections { list }))
}

pub fn parse_model(text: &str) -> Result<StoredModel, ModelError> {
    let (meta, sections) = split_sections(text)?;
    let get = |k: &str| meta.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
    let format = get("format").unwrap_or("");
    if format != format!("softskill-model {FORMAT_VERSION}") {
        return Err(ModelError::Version(format.to_string()));
    }
    let model = match get("kind") {
        Some("svm") => TaggerModel::Svm(parse_svm(&sections)?),
        Some("mlp") => TaggerModel::Mlp(parse_mlp(&sections)?),
        other => return Err(perr(0, format!("unknown model kind {other:?}"))),
    };
    Ok(StoredModel { model, meta })
}

fn parse_svm(s: &Sections) -> Result<LinearSvmModel, ModelError> {
    let cfg = s.key_values("svm-config")?;
    let field = |k: &str| cfg.get(k).ok_or_else(|| perr(0, format!("svm-config lacks {k}")));
    let (l, v) = field("c")?;
    let c: f64 = num(*l, v)?;
    let (l, v) = field("epochs")?;
    let epochs: usize = num(*l, v)?;
    let (l, v) = field("seed")?;
    let seed: u64 = num(*l, v)?;
    let (l, v) = field("window")?;
    let window: usize = num(*l, v)?;
    let config = SvmConfig { c, epochs, seed, window };

    let mut entries = Vec::new();
    for (line, row) in &s.get("features")?.rows {
        let parts: Vec<&str> = row.splitn(4, '\t').collect();
        if parts.len() != 4 {
            return Err(perr(*line, "feature rows are column, kind, offset, value"));
        }
        let kind: FeatureKind = parts[1].parse().map_err(|e: String| perr(*line, e))?;
        entries.push((
            FeatureKey {
                kind,
                offset: num(*line, parts[2])?,
                value: parts[3].to_string(),
            },
            num::<usize>(*line, parts[0])?,
        ));
    }
    let vocab = FeatureVocab::from_entries(window, entries).map_err(|e| perr(0, e.to_string()))?;
    let mut model = LinearSvmModel::zeros(vocab, config);
    for (line, row) in &s.get("bias")?.rows {
        let (tag, value) = row.split_once('\t').ok_or_else(|| perr(*line, "bias rows are label, value"))?;
        let tag: Tag = tag.parse().map_err(|e: crate::corpus::UnknownTag| perr(*line, e.to_string()))?;
        model.bias[tag.index()] = num(*line, value)?;
    }
    let dim = model.vocab.len();
    for (line, row) in &s.get("weights")?.rows {
        let parts: Vec<&str> = row.split('\t').collect();
        if parts.len() != 3 {
            return Err(perr(*line, "weight rows are label, column, weight"));
        }
        let tag: Tag = parts[0].parse().map_err(|e: crate::corpus::UnknownTag| perr(*line, e.to_string()))?;
        let col: usize = num(*line, parts[1])?;
        if col >= dim {
            return Err(perr(*line, format!("column {col} out of range")));
        }
        model.weights[tag.index()][col] = num(*line, parts[2])?;
    }
    Ok(model)
}

fn parse_params(s: &Sections, prefix: &str, vocab_len: usize, cfg: &MlpConfig) -> Result<MlpParams, ModelError> {
    let p = MlpParams {
        embedding: s.tensor(&format!("{prefix}embedding"))?,
        w1: s.tensor(&format!("{prefix}w1"))?,
        b1: s.tensor(&format!("{prefix}b1"))?,
        w2: s.tensor(&format!("{prefix}w2"))?,
        b2: s.tensor(&format!("{prefix}b2"))?,
    };
    let expected = MlpParams::zeros(vocab_len, cfg);
    for ((name, got), (_, want)) in p.tensors().iter().zip(expected.tensors().iter()) {
        if got.len() != want.len() {
            return Err(perr(0, format!("tensor {prefix}{name} has {} values, expected {}", got.len(), want.len())));
        }
    }
    Ok(p)
}

fn parse_mlp(s: &Sections) -> Result<MlpModel, ModelError> {
    let kv = s.key_values("mlp-config")?;
    let field = |k: &str| kv.get(k).ok_or_else(|| perr(0, format!("mlp-config lacks {k}")));
    macro_rules! read {
        ($k:literal, $t:ty) => {{
            let (l, v) = field($k)?;
            num::<$t>(*l, v)?
        }};
    }
    let config = MlpConfig {
        batch_size: read!("batch_size", usize),
        epochs: read!("epochs", usize),
        max_len: read!("max_len", usize),
        embed_dim: read!("embed_dim", usize),
        hidden: read!("hidden", usize),
        context: read!("context", usize),
        dropout: read!("dropout", f64),
        learning_rate: read!("learning_rate", f64),
        beta1: read!("beta1", f64),
        beta2: read!("beta2", f64),
        epsilon: read!("epsilon", f64),
        init_scale: read!("init_scale", f64),
        seed: read!("seed", u64),
    };
    let mut words = Vec::new();
    for (line, row) in &s.get("words")?.rows {
        let (id, word) = row.split_once('\t').ok_or_else(|| perr(*line, "word rows are id, word"))?;
        if num::<usize>(*line, id)? != words.len() + 2 {
            return Err(perr(*line, "word ids must be consecutive from 2"));
        }
        words.push(word.to_string());
    }
    let vocab = WordVocab::from_words(words);
    let params = parse_params(s, "", vocab.len(), &config)?;
    let adam_kv = s.key_values("adam")?;
    let (l, v) = adam_kv.get("step").ok_or_else(|| perr(0, "adam lacks step"))?;
    let adam = AdamState {
        step: num(*l, v)?,
        m: parse_params(s, "m.", vocab.len(), &config)?,
        v: parse_params(s, "v.", vocab.len(), &config)?,
    };
    Ok(MlpModel {
        config,
        vocab,
        params,
        adam,
    })
}
