//! Token-level precision, recall and F1.
//!
//! Per-label counts use exact tag matches. The headline (micro) figures pool
//! the counts of `B-EXTR` and `I-EXTR`; `O` is reported but never pooled.
//! Any 0/0 ratio is reported as 0 and flagged.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{bio_to_spans, Annotator, Sentence, Tag};
use crate::mlp::{train_mlp, MlpConfig, MlpError, MlpModel};
use crate::svm::{train_svm, LinearSvmModel, SvmConfig, SvmError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold has {gold} sequences but prediction has {pred}")]
    SequenceCount { gold: usize, pred: usize },
    #[error("sequence {index}: gold has {gold} tags but prediction has {pred}")]
    SequenceLength { index: usize, gold: usize, pred: usize },
    #[error("sentence {0} is not fully tagged")]
    Untagged(usize),
    #[error("corpus of {size} sentences is too small to split with test fraction {fraction}")]
    TooSmall { size: usize, fraction: f64 },
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error(transparent)]
    Mlp(#[from] MlpError),
}

/// Confusion counts for one label (or a pool of labels).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl Counts {
    pub fn merge(self, other: Counts) -> Counts {
        Counts {
            tp: self.tp + other.tp,
            fp: self.fp + other.fp,
            fn_: self.fn_ + other.fn_,
        }
    }

    pub fn scores(&self) -> Scores {
        Scores::from_counts(*self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Set when the corresponding ratio was 0/0 and reported as 0.
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    pub f1_undefined: bool,
}

impl Scores {
    pub fn from_counts(c: Counts) -> Scores {
        let ratio = |num: u64, den: u64| {
            if den == 0 {
                (0.0, true)
            } else {
                (num as f64 / den as f64, false)
            }
        };
        let (precision, precision_undefined) = ratio(c.tp, c.tp + c.fp);
        let (recall, recall_undefined) = ratio(c.tp, c.tp + c.fn_);
        let (f1, f1_undefined) = if precision + recall > 0.0 {
            (2.0 * precision * recall / (precision + recall), false)
        } else {
            (0.0, true)
        };
        Scores {
            precision,
            recall,
            f1,
            precision_undefined,
            recall_undefined,
            f1_undefined,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.precision_undefined || self.recall_undefined || self.f1_undefined
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Indexed by `Tag::index`.
    pub per_label: [Counts; 3],
    /// Pooled over `B-EXTR` and `I-EXTR`.
    pub micro: Counts,
    /// Binary entity-token view: positive iff the tag is B-EXTR or I-EXTR.
    pub entity: Counts,
    pub tokens: u64,
    pub gold_positive: u64,
    pub pred_positive: u64,
    pub annotator: Option<Annotator>,
}

impl EvalReport {
    pub fn label_scores(&self, tag: Tag) -> Scores {
        self.per_label[tag.index()].scores()
    }

    pub fn micro_scores(&self) -> Scores {
        self.micro.scores()
    }

    pub fn entity_scores(&self) -> Scores {
        self.entity.scores()
    }

    /// Human-readable reasons the headline figures are vacuous, if any.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.gold_positive == 0 {
            out.push("gold data contains no B-EXTR/I-EXTR tokens; positive-class metrics are 0".to_string());
        }
        if self.pred_positive == 0 {
            out.push("prediction contains no B-EXTR/I-EXTR tokens; precision is 0".to_string());
        }
        out
    }

    pub fn is_degenerate(&self) -> bool {
        self.micro_scores().is_degenerate()
    }
}

/// Token-level scores of `pred` against `gold`.
pub fn score_tokens(gold: &[Vec<Tag>], pred: &[Vec<Tag>]) -> Result<EvalReport, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::SequenceCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut per_label = [Counts::default(); 3];
    let mut entity = Counts::default();
    let (mut tokens, mut gold_positive, mut pred_positive) = (0, 0, 0);
    for (index, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(EvalError::SequenceLength {
                index,
                gold: g.len(),
                pred: p.len(),
            });
        }
        for (&gt, &pt) in g.iter().zip(p) {
            tokens += 1;
            if gt == pt {
                per_label[gt.index()].tp += 1;
            } else {
                per_label[pt.index()].fp += 1;
                per_label[gt.index()].fn_ += 1;
            }
            match (gt.is_entity(), pt.is_entity()) {
                (true, true) => entity.tp += 1,
                (false, true) => entity.fp += 1,
                (true, false) => entity.fn_ += 1,
                (false, false) => {}
            }
            gold_positive += gt.is_entity() as u64;
            pred_positive += pt.is_entity() as u64;
        }
    }
    Ok(EvalReport {
        micro: per_label[Tag::B.index()].merge(per_label[Tag::I.index()]),
        per_label,
        entity,
        tokens,
        gold_positive,
        pred_positive,
        annotator: None,
    })
}

/// Exact-span scoring, kept separate from the token-level protocol.
pub fn score_spans(gold: &[Vec<Tag>], pred: &[Vec<Tag>]) -> Result<Counts, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::SequenceCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut counts = Counts::default();
    for (index, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(EvalError::SequenceLength {
                index,
                gold: g.len(),
                pred: p.len(),
            });
        }
        let gs = bio_to_spans(g);
        let ps = bio_to_spans(p);
        let hits = ps.iter().filter(|s| gs.contains(s)).count() as u64;
        counts.tp += hits;
        counts.fp += ps.len() as u64 - hits;
        counts.fn_ += gs.len() as u64 - hits;
    }
    Ok(counts)
}

/// Anything that assigns one tag per token.
pub trait Tagger {
    fn tag(&self, sentence: &Sentence) -> Vec<Tag>;
}

impl Tagger for LinearSvmModel {
    fn tag(&self, sentence: &Sentence) -> Vec<Tag> {
        self.predict(sentence)
    }
}

impl Tagger for MlpModel {
    fn tag(&self, sentence: &Sentence) -> Vec<Tag> {
        self.predict(sentence)
    }
}

fn gold_tags(corpus: &[Sentence]) -> Result<Vec<Vec<Tag>>, EvalError> {
    corpus
        .iter()
        .enumerate()
        .map(|(i, s)| s.tags().ok_or(EvalError::Untagged(i)))
        .collect()
}

/// Score a tagger on a tagged corpus.
pub fn evaluate<T: Tagger + ?Sized>(tagger: &T, corpus: &[Sentence]) -> Result<EvalReport, EvalError> {
    let gold = gold_tags(corpus)?;
    let pred: Vec<Vec<Tag>> = corpus.iter().map(|s| tagger.tag(s)).collect();
    score_tokens(&gold, &pred)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            test_fraction: 0.2,
            seed: 42,
        }
    }
}

/// Seeded sentence-level split into (train, test) indices, each sorted.
pub fn split_indices(n: usize, split: &SplitConfig) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    let too_small = EvalError::TooSmall {
        size: n,
        fraction: split.test_fraction,
    };
    if !(split.test_fraction > 0.0 && split.test_fraction < 1.0) {
        return Err(too_small);
    }
    let n_test = (n as f64 * split.test_fraction).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(too_small);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(split.seed));
    let mut test = order[..n_test].to_vec();
    let mut train = order[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

pub fn split_corpus(corpus: &[Sentence], split: &SplitConfig) -> Result<(Vec<Sentence>, Vec<Sentence>), EvalError> {
    let (train, test) = split_indices(corpus.len(), split)?;
    let pick = |idx: &[usize]| idx.iter().map(|&i| corpus[i].clone()).collect();
    Ok((pick(&train), pick(&test)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    First,
    Second,
    Tie,
}

/// Compare two reports by micro-F1; exactly equal scores are a tie.
pub fn winner(first: &EvalReport, second: &EvalReport) -> Winner {
    let (a, b) = (first.micro_scores().f1, second.micro_scores().f1);
    if a > b {
        Winner::First
    } else if b > a {
        Winner::Second
    } else {
        Winner::Tie
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub svm: EvalReport,
    pub mlp: EvalReport,
    /// `First` means the SVM won.
    pub winner: Winner,
    pub train_size: usize,
    pub test_size: usize,
    pub split: SplitConfig,
}

/// Train both taggers on the same seeded split and score them on the same
/// held-out sentences.
pub fn compare_models(
    corpus: &[Sentence],
    split: &SplitConfig,
    svm_config: &SvmConfig,
    mlp_config: &MlpConfig,
) -> Result<Comparison, EvalError> {
    gold_tags(corpus)?;
    let (train, test) = split_corpus(corpus, split)?;
    let svm_model = train_svm(&train, svm_config)?;
    let mlp_model = train_mlp(&train, mlp_config)?;
    let svm = evaluate(&svm_model, &test)?;
    let mlp = evaluate(&mlp_model, &test)?;
    Ok(Comparison {
        winner: winner(&svm, &mlp),
        svm,
        mlp,
        train_size: train.len(),
        test_size: test.len(),
        split: *split,
    })
}

fn pct(v: f64) -> String {
    format!("{:.2}", 100.0 * v)
}

/// Header lines shared by the TSV and table renderings.
pub fn report_header(reports: &[(&str, &EvalReport)]) -> Vec<String> {
    let mut lines = vec![
        "aggregation = micro over B-EXTR and I-EXTR, token level".to_string(),
    ];
    for (name, report) in reports {
        let annotator = report.annotator.map_or("unknown", Annotator::as_str);
        lines.push(format!("{name}: tokens = {}, annotator = {annotator}", report.tokens));
        for w in report.warnings() {
            lines.push(format!("{name}: warning: {w}"));
        }
    }
    lines
}

/// One row per model and label plus a `micro` row; values in percent.
pub fn format_report_tsv(reports: &[(&str, &EvalReport)]) -> String {
    let mut out = String::new();
    for line in report_header(reports) {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str("model\tlabel\tprecision\trecall\tf1\ttp\tfp\tfn\tdegenerate\n");
    for (name, report) in reports {
        let mut rows: Vec<(&str, Counts)> = Tag::ALL
            .iter()
            .map(|t| (t.as_str(), report.per_label[t.index()]))
            .collect();
        rows.push(("micro", report.micro));
        for (label, counts) in rows {
            let s = counts.scores();
            let _ = writeln!(
                out,
                "{name}\t{label}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                pct(s.precision),
                pct(s.recall),
                pct(s.f1),
                counts.tp,
                counts.fp,
                counts.fn_,
                s.is_degenerate()
            );
        }
    }
    out
}

/// Aligned table of micro scores, one line per model.
pub fn format_report_table(reports: &[(&str, &EvalReport)]) -> String {
    let width = reports.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(5);
    let mut out = String::new();
    for line in report_header(reports) {
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out, "{:<width$}  {:>9}  {:>9}  {:>9}", "Model", "Precision", "Recall", "F1-score");
    for (name, report) in reports {
        let s = report.micro_scores();
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>9}  {:>9}",
            name,
            pct(s.precision),
            pct(s.recall),
            pct(s.f1)
        );
    }
    out
}
