//! Feature extraction for the two taggers.
//!
//! The SVM sees a sparse binary vector per token: one column for every
//! observed (attribute, window offset, value) triple, with `<PAD>` standing
//! in for positions outside the sentence. The MLP sees lemma ids, padded or
//! chunked to a fixed sequence length.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::{Sentence, Tag};

pub const PAD_VALUE: &str = "<PAD>";
pub const DEFAULT_WINDOW: usize = 2;
pub const DEFAULT_MAX_LEN: usize = 50;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error("cannot fit a vocabulary on an empty corpus")]
    EmptyCorpus,
    #[error("duplicate vocabulary entry {0}")]
    Duplicate(String),
    #[error("vocabulary ids are not dense: {0}")]
    NotDense(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKind {
    Lemma,
    Pos,
    Dep,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 3] = [FeatureKind::Lemma, FeatureKind::Pos, FeatureKind::Dep];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Lemma => "LEMMA",
            FeatureKind::Pos => "POS",
            FeatureKind::Dep => "DEP",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "LEMMA" => Ok(FeatureKind::Lemma),
            "POS" => Ok(FeatureKind::Pos),
            "DEP" => Ok(FeatureKind::Dep),
            other => Err(format!("unknown feature kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureKey {
    pub kind: FeatureKind,
    pub offset: i32,
    pub value: String,
}

fn windowed_value(sentence: &Sentence, index: usize, offset: i32, kind: FeatureKind) -> &str {
    let pos = index as i64 + offset as i64;
    if pos < 0 || pos >= sentence.len() as i64 {
        return PAD_VALUE;
    }
    let tok = &sentence.tokens[pos as usize];
    match kind {
        FeatureKind::Lemma => &tok.lemma,
        FeatureKind::Pos => &tok.pos,
        FeatureKind::Dep => &tok.dep,
    }
}

/// Column assignment for the SVM's windowed categorical features.
///
/// Columns are assigned in sorted key order, so fitting is independent of
/// sentence order. A fitted vocabulary never grows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVocab {
    window: usize,
    columns: BTreeMap<FeatureKey, usize>,
}

impl FeatureVocab {
    pub fn fit(corpus: &[Sentence], window: usize) -> Result<Self, FeatureError> {
        if corpus.iter().all(Sentence::is_empty) {
            return Err(FeatureError::EmptyCorpus);
        }
        let w = window as i32;
        let mut keys = BTreeSet::new();
        for sentence in corpus {
            for index in 0..sentence.len() {
                for offset in -w..=w {
                    for kind in FeatureKind::ALL {
                        keys.insert(FeatureKey {
                            kind,
                            offset,
                            value: windowed_value(sentence, index, offset, kind).to_string(),
                        });
                    }
                }
            }
        }
        let columns = keys.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
        Ok(FeatureVocab { window, columns })
    }

    /// Rebuild from stored (key, column) pairs, validating density.
    pub fn from_entries(
        window: usize,
        entries: impl IntoIterator<Item = (FeatureKey, usize)>,
    ) -> Result<Self, FeatureError> {
        let mut columns = BTreeMap::new();
        for (key, col) in entries {
            let label = format!("{}[{}]={}", key.kind, key.offset, key.value);
            if columns.insert(key, col).is_some() {
                return Err(FeatureError::Duplicate(label));
            }
        }
        let mut seen: Vec<usize> = columns.values().copied().collect();
        seen.sort_unstable();
        if seen.iter().enumerate().any(|(i, &c)| i != c) {
            return Err(FeatureError::NotDense(format!("{} entries", seen.len())));
        }
        Ok(FeatureVocab { window, columns })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, key: &FeatureKey) -> Option<usize> {
        self.columns.get(key).copied()
    }

    /// Entries ordered by column index.
    pub fn entries(&self) -> Vec<(&FeatureKey, usize)> {
        let mut out: Vec<(&FeatureKey, usize)> = self.columns.iter().map(|(k, &c)| (k, c)).collect();
        out.sort_by_key(|&(_, c)| c);
        out
    }

    /// Active columns of token `index`, ascending. Values never seen during
    /// fitting contribute nothing.
    pub fn vectorize_token(&self, sentence: &Sentence, index: usize) -> Vec<usize> {
        let w = self.window as i32;
        let mut key = FeatureKey {
            kind: FeatureKind::Lemma,
            offset: 0,
            value: String::new(),
        };
        let mut active = Vec::with_capacity((2 * self.window + 1) * 3);
        for offset in -w..=w {
            for kind in FeatureKind::ALL {
                key.kind = kind;
                key.offset = offset;
                key.value.clear();
                key.value.push_str(windowed_value(sentence, index, offset, kind));
                if let Some(col) = self.column(&key) {
                    active.push(col);
                }
            }
        }
        active.sort_unstable();
        active
    }

    pub fn vectorize_sentence(&self, sentence: &Sentence) -> Vec<Vec<usize>> {
        (0..sentence.len())
            .map(|i| self.vectorize_token(sentence, i))
            .collect()
    }
}

pub const PAD_ID: usize = 0;
pub const UNK_ID: usize = 1;
pub const PAD_WORD: &str = "<PAD>";
pub const UNK_WORD: &str = "<UNK>";

/// Lemma → integer id, with 0 and 1 reserved for padding and unknown words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordVocab {
    words: Vec<String>,
    ids: BTreeMap<String, usize>,
}

impl WordVocab {
    pub fn fit(corpus: &[Sentence]) -> Self {
        let lemmas: BTreeSet<&str> = corpus
            .iter()
            .flat_map(|s| s.tokens.iter().map(|t| t.lemma.as_str()))
            .filter(|l| *l != PAD_WORD && *l != UNK_WORD)
            .collect();
        Self::from_words(lemmas.into_iter().map(str::to_string))
    }

    /// Build from non-reserved words in id order (ids start at 2).
    pub fn from_words(words: impl IntoIterator<Item = String>) -> Self {
        let mut all = vec![PAD_WORD.to_string(), UNK_WORD.to_string()];
        all.extend(words);
        let ids = all.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        WordVocab { words: all, ids }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn id(&self, lemma: &str) -> usize {
        self.ids.get(lemma).copied().unwrap_or(UNK_ID)
    }

    pub fn get(&self, lemma: &str) -> Option<usize> {
        self.ids.get(lemma).copied()
    }

    pub fn word(&self, id: usize) -> Option<&str> {
        self.words.get(id).map(String::as_str)
    }

    /// Non-reserved words in id order.
    pub fn words(&self) -> &[String] {
        &self.words[2..]
    }
}

/// One fixed-length slice of a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedChunk {
    pub ids: Vec<usize>,
    pub mask: Vec<bool>,
    /// Label ids (`Tag::index`); 0 on padding.
    pub labels: Vec<usize>,
    /// Position of the chunk's first token in the sentence.
    pub offset: usize,
}

impl EncodedChunk {
    pub fn real_len(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Lemma ids right-padded to `max_len`; longer sentences become consecutive
/// chunks so that every token lands in exactly one chunk.
pub fn encode_sequence(sentence: &Sentence, vocab: &WordVocab, max_len: usize) -> Vec<EncodedChunk> {
    assert!(max_len > 0, "max_len must be positive");
    let mut chunks = Vec::new();
    let mut offset = 0;
    while offset < sentence.len() || (offset == 0 && chunks.is_empty()) {
        let end = (offset + max_len).min(sentence.len());
        let mut ids = vec![PAD_ID; max_len];
        let mut mask = vec![false; max_len];
        let mut labels = vec![0; max_len];
        for (slot, tok) in sentence.tokens[offset..end].iter().enumerate() {
            ids[slot] = vocab.id(&tok.lemma);
            mask[slot] = true;
            labels[slot] = tok.tag.unwrap_or(Tag::O).index();
        }
        chunks.push(EncodedChunk {
            ids,
            mask,
            labels,
            offset,
        });
        if end == sentence.len() {
            break;
        }
        offset = end;
    }
    chunks
}
