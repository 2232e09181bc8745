//! Rule-based token pattern matching.
//!
//! A pattern is a list of steps. Each step either matches exactly one token
//! whose attributes satisfy its constraints, or is the pure wildcard
//! `{"OP": "*"}` which matches zero or more tokens of any kind:
//!
//! ```json
//! [{"POS": "NOUN"}, {"OP": "*"}, {"LEMMA": "solve"}, {"LEMMA": "problem"}]
//! ```
//!
//! Matching is anchored at every start position and reports the shortest
//! window that satisfies the whole pattern (wildcards are lazy). Each
//! wildcard may absorb at most [`DEFAULT_MAX_WILDCARD`] tokens unless the
//! pattern is configured otherwise. Matches never cross sentence boundaries.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde_json::Value;
use thiserror::Error;

use crate::corpus::{AnnotatedToken, Sentence};

pub const DEFAULT_MAX_WILDCARD: usize = 10;

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("invalid pattern JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("pattern must be a JSON array of step objects")]
    NotAnArray,
    #[error("step {0} is not a JSON object")]
    StepNotObject(usize),
    #[error("step {step}: unknown attribute {name:?}")]
    UnknownAttribute { step: usize, name: String },
    #[error("step {step}: value of {name} must be a string")]
    NonStringValue { step: usize, name: String },
    #[error("step {step}: unsupported operator {op:?} (only \"*\" is supported)")]
    UnsupportedOperator { step: usize, op: String },
    #[error("step {0}: a wildcard step cannot carry attribute constraints")]
    ConstrainedWildcard(usize),
    #[error("pattern has no steps")]
    Empty,
    #[error("pattern consists only of wildcards")]
    OnlyWildcards,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Attr {
    Text,
    Lemma,
    Pos,
    Dep,
}

impl Attr {
    pub fn as_str(self) -> &'static str {
        match self {
            Attr::Text => "TEXT",
            Attr::Lemma => "LEMMA",
            Attr::Pos => "POS",
            Attr::Dep => "DEP",
        }
    }

    /// TEXT compares case-insensitively, the others exactly.
    pub fn matches(self, token: &AnnotatedToken, value: &str) -> bool {
        match self {
            Attr::Text => token.text.to_lowercase() == value.to_lowercase(),
            Attr::Lemma => token.lemma == value,
            Attr::Pos => token.pos == value,
            Attr::Dep => token.dep == value,
        }
    }
}

impl FromStr for Attr {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "TEXT" => Ok(Attr::Text),
            "LEMMA" => Ok(Attr::Lemma),
            "POS" => Ok(Attr::Pos),
            "DEP" => Ok(Attr::Dep),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    One,
    ZeroOrMore,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternStep {
    pub constraints: BTreeMap<Attr, String>,
    pub quantifier: Quantifier,
}

impl PatternStep {
    pub fn wildcard() -> Self {
        PatternStep {
            constraints: BTreeMap::new(),
            quantifier: Quantifier::ZeroOrMore,
        }
    }

    pub fn attr(attr: Attr, value: &str) -> Self {
        PatternStep {
            constraints: BTreeMap::from([(attr, value.to_string())]),
            quantifier: Quantifier::One,
        }
    }

    pub fn lemma(value: &str) -> Self {
        Self::attr(Attr::Lemma, value)
    }

    pub fn pos(value: &str) -> Self {
        Self::attr(Attr::Pos, value)
    }

    pub fn is_wildcard(&self) -> bool {
        self.quantifier == Quantifier::ZeroOrMore
    }

    /// Whether a single token satisfies every constraint of the step.
    pub fn accepts(&self, token: &AnnotatedToken) -> bool {
        self.constraints
            .iter()
            .all(|(attr, value)| attr.matches(token, value))
    }

    fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        if self.is_wildcard() {
            obj.insert("OP".into(), Value::String("*".into()));
        }
        for (attr, value) in &self.constraints {
            obj.insert(attr.as_str().into(), Value::String(value.clone()));
        }
        Value::Object(obj)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub name: String,
    pub steps: Vec<PatternStep>,
    pub max_wildcard: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Match {
    /// Index of the sentence in the corpus being searched.
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
    pub pattern: String,
}

impl Pattern {
    /// Validate a list of steps into a pattern.
    pub fn new(name: impl Into<String>, steps: Vec<PatternStep>) -> Result<Self, PatternError> {
        if steps.is_empty() {
            return Err(PatternError::Empty);
        }
        for (i, step) in steps.iter().enumerate() {
            if step.is_wildcard() && !step.constraints.is_empty() {
                return Err(PatternError::ConstrainedWildcard(i));
            }
        }
        if steps.iter().all(PatternStep::is_wildcard) {
            return Err(PatternError::OnlyWildcards);
        }
        Ok(Pattern {
            name: name.into(),
            steps,
            max_wildcard: DEFAULT_MAX_WILDCARD,
        })
    }

    pub fn with_max_wildcard(mut self, max_wildcard: usize) -> Self {
        self.max_wildcard = max_wildcard;
        self
    }

    /// Compile one pattern from its JSON listing.
    pub fn compile(name: impl Into<String>, listing: &str) -> Result<Self, PatternError> {
        let value: Value = serde_json::from_str(listing)?;
        Self::from_json(name, &value)
    }

    pub fn from_json(name: impl Into<String>, value: &Value) -> Result<Self, PatternError> {
        let steps = value.as_array().ok_or(PatternError::NotAnArray)?;
        let steps = steps
            .iter()
            .enumerate()
            .map(|(i, step)| parse_step(i, step))
            .collect::<Result<Vec<_>, _>>()?;
        Pattern::new(name, steps)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.steps.iter().map(PatternStep::to_json).collect())
    }

    /// End positions reachable from `start` after consuming every step,
    /// ascending and deduplicated.
    fn reachable_ends(&self, tokens: &[AnnotatedToken], start: usize) -> Vec<usize> {
        let n = tokens.len();
        // positions[p] == true iff the prefix of steps consumed so far can end at p
        let mut positions = vec![false; n + 1];
        positions[start] = true;
        for step in &self.steps {
            let mut next = vec![false; n + 1];
            for p in start..=n {
                if !positions[p] {
                    continue;
                }
                match step.quantifier {
                    Quantifier::One => {
                        if p < n && step.accepts(&tokens[p]) {
                            next[p + 1] = true;
                        }
                    }
                    Quantifier::ZeroOrMore => {
                        let last = (p + self.max_wildcard).min(n);
                        for slot in &mut next[p..=last] {
                            *slot = true;
                        }
                    }
                }
            }
            positions = next;
        }
        (start..=n).filter(|&p| positions[p]).collect()
    }

    /// Shortest non-empty match anchored at `start`, if any.
    pub fn shortest_at(&self, tokens: &[AnnotatedToken], start: usize) -> Option<usize> {
        self.reachable_ends(tokens, start)
            .into_iter()
            .find(|&end| end > start)
    }

    /// Whether `tokens[start..end]` as a whole satisfies the pattern.
    pub fn matches_window(&self, tokens: &[AnnotatedToken], start: usize, end: usize) -> bool {
        end > start && self.reachable_ends(&tokens[..end], start).contains(&end)
    }
}

fn parse_step(index: usize, value: &Value) -> Result<PatternStep, PatternError> {
    let obj = value.as_object().ok_or(PatternError::StepNotObject(index))?;
    let mut constraints = BTreeMap::new();
    let mut quantifier = Quantifier::One;
    for (key, val) in obj {
        let text = val.as_str().ok_or_else(|| PatternError::NonStringValue {
            step: index,
            name: key.clone(),
        })?;
        if key == "OP" {
            if text != "*" {
                return Err(PatternError::UnsupportedOperator {
                    step: index,
                    op: text.to_string(),
                });
            }
            quantifier = Quantifier::ZeroOrMore;
            continue;
        }
        let attr = key
            .parse::<Attr>()
            .map_err(|_| PatternError::UnknownAttribute {
                step: index,
                name: key.clone(),
            })?;
        constraints.insert(attr, text.to_string());
    }
    if quantifier == Quantifier::ZeroOrMore && !constraints.is_empty() {
        return Err(PatternError::ConstrainedWildcard(index));
    }
    Ok(PatternStep {
        constraints,
        quantifier,
    })
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// Parse a pattern file: a JSON array of patterns, each an array of steps.
/// Patterns are named `pattern-<index>`.
pub fn parse_pattern_file(text: &str) -> Result<Vec<Pattern>, PatternError> {
    let value: Value = serde_json::from_str(text)?;
    let list = value.as_array().ok_or(PatternError::NotAnArray)?;
    list.iter()
        .enumerate()
        .map(|(i, p)| Pattern::from_json(format!("pattern-{i}"), p))
        .collect()
}

pub fn read_pattern_file(path: impl AsRef<Path>) -> Result<Vec<Pattern>, PatternError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| PatternError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_pattern_file(&text)
}

/// All matches of one pattern in one sentence: at most one per start
/// position, each the shortest window starting there.
pub fn find_matches(pattern: &Pattern, sentence_index: usize, sentence: &Sentence) -> Vec<Match> {
    let tokens = &sentence.tokens;
    (0..tokens.len())
        .filter_map(|start| {
            pattern.shortest_at(tokens, start).map(|end| Match {
                sentence: sentence_index,
                start,
                end,
                pattern: pattern.name.clone(),
            })
        })
        .collect()
}

/// Matches of every pattern over every sentence, ordered by
/// (sentence, start, end) and then by pattern order.
pub fn find_all(patterns: &[Pattern], corpus: &[Sentence]) -> Vec<Match> {
    let mut out = Vec::new();
    for (si, sentence) in corpus.iter().enumerate() {
        let mut local: Vec<(usize, Match)> = patterns
            .iter()
            .enumerate()
            .flat_map(|(pi, p)| find_matches(p, si, sentence).into_iter().map(move |m| (pi, m)))
            .collect();
        local.sort_by_key(|(pi, m)| (m.start, m.end, *pi));
        out.extend(local.into_iter().map(|(_, m)| m));
    }
    out
}
