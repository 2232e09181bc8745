//! Clue mining from seed skills.
//!
//! Every seed skill yields two patterns: a noun-led prefix context ending in
//! the seed lemmas, and a suffix context running from the seed lemmas to
//! "soft skill". The tokens of each match that are not the seed itself form
//! a clue. Clues are grouped by the lemma of their first content word,
//! ranked by frequency, and cut at a cumulative-frequency threshold.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::corpus::{spans_to_bio, AnnotatedToken, Sentence, Span};
use crate::matcher::{find_all, Match, Pattern, PatternError, PatternStep, DEFAULT_MAX_WILDCARD};

#[derive(Debug, Error)]
pub enum ClueError {
    #[error("seed list is empty")]
    NoSeeds,
    #[error("seed {0:?} has no lemmas")]
    EmptySeed(String),
    #[error("threshold must lie in (0, 1], got {0}")]
    Threshold(f64),
    #[error("seed file line {line}: {message}")]
    SeedFile { line: usize, message: String },
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSkill {
    pub label: String,
    pub lemmas: Vec<String>,
}

impl SeedSkill {
    pub fn new(label: &str, lemmas: &[&str]) -> Self {
        SeedSkill {
            label: label.to_string(),
            lemmas: lemmas.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClueSide {
    Before,
    After,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionContextHit {
    pub matched: Match,
    /// Index into the seed list.
    pub skill: usize,
    pub side: ClueSide,
    /// Token range of the clue within the sentence.
    pub clue_start: usize,
    pub clue_end: usize,
    pub clue_tokens: Vec<AnnotatedToken>,
}

impl ExtractionContextHit {
    pub fn clue_text(&self) -> String {
        self.clue_tokens
            .iter()
            .map(|t| t.text.to_lowercase())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClueRecord {
    pub head_lemma: String,
    /// Surface phrase (lowercased) → occurrences.
    pub variants: BTreeMap<String, usize>,
    pub frequency: usize,
}

const PREFIX_SUFFIX: &str = "#before";
const SUFFIX_SUFFIX: &str = "#after";

/// Two patterns per seed: `[NOUN, *, seed...]` and `[seed..., *, soft, skill]`.
pub fn build_seed_patterns(seeds: &[SeedSkill]) -> Result<Vec<Pattern>, ClueError> {
    build_seed_patterns_with_cap(seeds, DEFAULT_MAX_WILDCARD)
}

pub fn build_seed_patterns_with_cap(
    seeds: &[SeedSkill],
    max_wildcard: usize,
) -> Result<Vec<Pattern>, ClueError> {
    if seeds.is_empty() {
        return Err(ClueError::NoSeeds);
    }
    let mut patterns = Vec::with_capacity(seeds.len() * 2);
    for (i, seed) in seeds.iter().enumerate() {
        if seed.lemmas.is_empty() {
            return Err(ClueError::EmptySeed(seed.label.clone()));
        }
        let seed_steps = seed.lemmas.iter().map(|l| PatternStep::lemma(l));

        let mut prefix = vec![PatternStep::pos("NOUN"), PatternStep::wildcard()];
        prefix.extend(seed_steps.clone());
        patterns.push(Pattern::new(format!("{i}{PREFIX_SUFFIX}"), prefix)?.with_max_wildcard(max_wildcard));

        let mut suffix: Vec<PatternStep> = seed_steps.collect();
        suffix.push(PatternStep::wildcard());
        suffix.push(PatternStep::lemma("soft"));
        suffix.push(PatternStep::lemma("skill"));
        patterns.push(Pattern::new(format!("{i}{SUFFIX_SUFFIX}"), suffix)?.with_max_wildcard(max_wildcard));
    }
    Ok(patterns)
}

fn parse_pattern_name(name: &str) -> Option<(usize, ClueSide)> {
    if let Some(idx) = name.strip_suffix(PREFIX_SUFFIX) {
        return idx.parse().ok().map(|i| (i, ClueSide::Before));
    }
    name.strip_suffix(SUFFIX_SUFFIX)
        .and_then(|idx| idx.parse().ok())
        .map(|i| (i, ClueSide::After))
}

/// Run the seed patterns over a corpus and cut each match into seed and clue.
pub fn collect_contexts(
    seeds: &[SeedSkill],
    corpus: &[Sentence],
) -> Result<Vec<ExtractionContextHit>, ClueError> {
    let patterns = build_seed_patterns(seeds)?;
    Ok(contexts_from_matches(seeds, corpus, find_all(&patterns, corpus)))
}

pub fn contexts_from_matches(
    seeds: &[SeedSkill],
    corpus: &[Sentence],
    matches: Vec<Match>,
) -> Vec<ExtractionContextHit> {
    matches
        .into_iter()
        .filter_map(|m| {
            let (skill, side) = parse_pattern_name(&m.pattern)?;
            let seed_len = seeds.get(skill)?.lemmas.len();
            let (clue_start, clue_end) = match side {
                ClueSide::Before => (m.start, m.end - seed_len),
                ClueSide::After => (m.start + seed_len, m.end),
            };
            if clue_start >= clue_end {
                return None;
            }
            let clue_tokens = corpus[m.sentence].tokens[clue_start..clue_end].to_vec();
            Some(ExtractionContextHit {
                matched: m,
                skill,
                side,
                clue_start,
                clue_end,
                clue_tokens,
            })
        })
        .collect()
}

/// Tag every sentence with the extraction contexts matched by the seed
/// patterns, as a starting point for manual annotation. Overlapping matches
/// are resolved in favour of the shorter one, then the earlier one. Returns
/// the number of spans written.
pub fn pre_annotate(seeds: &[SeedSkill], corpus: &mut [Sentence], max_wildcard: usize) -> Result<usize, ClueError> {
    let patterns = build_seed_patterns_with_cap(seeds, max_wildcard)?;
    let mut by_sentence: Vec<Vec<Match>> = vec![Vec::new(); corpus.len()];
    for m in find_all(&patterns, corpus) {
        by_sentence[m.sentence].push(m);
    }
    let mut written = 0;
    for (sentence, mut matches) in corpus.iter_mut().zip(by_sentence) {
        matches.sort_by_key(|m| (m.end - m.start, m.start));
        let mut taken = vec![false; sentence.len()];
        let mut spans = Vec::new();
        for m in matches {
            if taken[m.start..m.end].iter().all(|t| !t) {
                taken[m.start..m.end].iter_mut().for_each(|t| *t = true);
                spans.push(Span::new(m.start, m.end));
            }
        }
        spans.sort_by_key(|s| s.start);
        written += spans.len();
        let tags = spans_to_bio(sentence.len(), &spans).expect("disjoint spans within the sentence");
        sentence.set_tags(&tags);
    }
    Ok(written)
}

/// Universal POS tags of closed word classes.
const FUNCTION_POS: &[&str] = &[
    "ADP", "AUX", "CCONJ", "CONJ", "DET", "INTJ", "NUM", "PART", "PRON", "PUNCT", "SCONJ", "SYM",
];

/// Closed-class English words, used when no POS information is available.
const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "been", "before", "being", "below", "between", "both", "but", "by", "can",
    "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for", "from",
    "further", "had", "has", "have", "having", "he", "her", "here", "hers", "him", "his", "how",
    "i", "if", "in", "into", "is", "it", "its", "itself", "me", "more", "most", "my", "no", "nor",
    "not", "of", "off", "on", "once", "only", "or", "other", "our", "ours", "out", "over", "own",
    "same", "she", "should", "so", "some", "such", "than", "that", "the", "their", "them", "then",
    "there", "these", "they", "this", "those", "through", "to", "too", "under", "until", "up",
    "very", "was", "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why",
    "will", "with", "would", "you", "your",
];

fn is_function_word(token: &AnnotatedToken) -> bool {
    if token.pos.is_empty() || token.pos == "X" {
        let lemma = token.lemma.to_lowercase();
        STOPWORDS.binary_search(&lemma.as_str()).is_ok() || !lemma.chars().any(char::is_alphanumeric)
    } else {
        FUNCTION_POS.contains(&token.pos.as_str())
    }
}

/// Grouping key of a clue: the lemma of its first content word, or of its
/// first token when every token is a function word.
pub fn head_lemma(clue: &[AnnotatedToken]) -> String {
    clue.iter()
        .find(|t| !is_function_word(t))
        .or_else(|| clue.first())
        .map(|t| t.lemma.to_lowercase())
        .unwrap_or_default()
}

/// Aggregate hits into clue records, most frequent first (ties by head).
pub fn group_variants(hits: &[ExtractionContextHit]) -> Vec<ClueRecord> {
    let mut groups: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for hit in hits {
        *groups
            .entry(head_lemma(&hit.clue_tokens))
            .or_default()
            .entry(hit.clue_text())
            .or_default() += 1;
    }
    let mut records: Vec<ClueRecord> = groups
        .into_iter()
        .map(|(head_lemma, variants)| ClueRecord {
            frequency: variants.values().sum(),
            head_lemma,
            variants,
        })
        .collect();
    records.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then_with(|| a.head_lemma.cmp(&b.head_lemma))
    });
    records
}

// Slack for decimal thresholds such as 0.8 whose binary value sits a hair
// above the intended fraction.
const THRESHOLD_EPS: f64 = 1e-12;

/// Shortest prefix of frequency-sorted `records` whose share of the total
/// frequency reaches `threshold` (inclusive).
pub fn pareto_cutoff(records: &[ClueRecord], threshold: f64) -> Result<Vec<ClueRecord>, ClueError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(ClueError::Threshold(threshold));
    }
    let total: usize = records.iter().map(|r| r.frequency).sum();
    if total == 0 {
        return Ok(Vec::new());
    }
    let mut cumulative = 0usize;
    for (i, record) in records.iter().enumerate() {
        cumulative += record.frequency;
        if cumulative as f64 / total as f64 >= threshold - THRESHOLD_EPS {
            return Ok(records[..=i].to_vec());
        }
    }
    Ok(records.to_vec())
}

/// Seed file: `label<TAB>lemma lemma ...` per line; `#` comments allowed.
pub fn parse_seed_file(text: &str) -> Result<Vec<SeedSkill>, ClueError> {
    let mut seeds = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, lemmas) = line.split_once('\t').ok_or_else(|| ClueError::SeedFile {
            line: i + 1,
            message: "expected `label<TAB>lemmas`".into(),
        })?;
        let lemmas: Vec<String> = lemmas.split_whitespace().map(str::to_string).collect();
        if lemmas.is_empty() {
            return Err(ClueError::EmptySeed(label.to_string()));
        }
        seeds.push(SeedSkill {
            label: label.trim().to_string(),
            lemmas,
        });
    }
    Ok(seeds)
}

pub fn read_seed_file(path: impl AsRef<Path>) -> Result<Vec<SeedSkill>, ClueError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ClueError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_seed_file(&text)
}

/// TSV rows `head_lemma<TAB>frequency<TAB>variant|variant|...`.
pub fn format_clue_tsv(records: &[ClueRecord]) -> String {
    let mut out = String::from("head_lemma\tfrequency\tvariants\n");
    for r in records {
        let variants: Vec<&str> = r.variants.keys().map(String::as_str).collect();
        let _ = writeln!(out, "{}\t{}\t{}", r.head_lemma, r.frequency, variants.join("|"));
    }
    out
}
