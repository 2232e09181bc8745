//! Token, sentence and corpus data model.
//!
//! Corpora are stored in a tab-separated CoNLL-like format: one token per
//! line with the columns `text`, `lemma`, `pos`, `dep` and an optional BIO
//! `tag`, and a blank line after every sentence. Two kinds of comment lines
//! carry metadata:
//!
//! ```text
//! # annotator = naive          file-level key/value pairs (before any sentence)
//! # source_id = doc-17         attached to the sentence that follows
//! ```
//!
//! Files written by [`write_conll`] read back field-for-field and re-write
//! to identical bytes.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown tag {value:?}")]
    Tag { line: usize, value: String },
    #[error("invalid span ({start}, {end}) for sentence of length {len}")]
    SpanRange { start: usize, end: usize, len: usize },
    #[error("span ({start}, {end}) overlaps a preceding span")]
    SpanOverlap { start: usize, end: usize },
}

/// One of the three BIO labels. The declaration order is the label order
/// used everywhere (argmax tie-breaks, label ids).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    O,
    B,
    I,
}

impl Tag {
    pub const ALL: [Tag; 3] = [Tag::O, Tag::B, Tag::I];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::O => "O",
            Tag::B => "B-EXTR",
            Tag::I => "I-EXTR",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Tag> {
        Tag::ALL.get(i).copied()
    }

    /// Part of an extraction context.
    pub fn is_entity(self) -> bool {
        self != Tag::O
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownTag(pub String);

impl fmt::Display for UnknownTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown tag {:?}", self.0)
    }
}

impl std::error::Error for UnknownTag {}

impl FromStr for Tag {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "O" => Ok(Tag::O),
            "B-EXTR" => Ok(Tag::B),
            "I-EXTR" => Ok(Tag::I),
            other => Err(UnknownTag(other.to_string())),
        }
    }
}

/// Which tool produced the linguistic annotation of a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Annotator {
    /// Lemma/POS/dependency columns supplied by an external parser.
    External,
    /// The built-in whitespace/punctuation tokenizer ([`naive_annotate`]).
    Naive,
}

impl Annotator {
    pub fn as_str(self) -> &'static str {
        match self {
            Annotator::External => "external-conll",
            Annotator::Naive => "naive",
        }
    }
}

impl fmt::Display for Annotator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Annotator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "external-conll" | "external" | "conll" => Ok(Annotator::External),
            "naive" => Ok(Annotator::Naive),
            other => Err(format!("unknown annotator {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedToken {
    pub text: String,
    pub lemma: String,
    pub pos: String,
    pub dep: String,
    pub tag: Option<Tag>,
}

impl AnnotatedToken {
    pub fn new(text: &str, lemma: &str, pos: &str, dep: &str) -> Self {
        debug_assert!(!text.is_empty(), "token text must be non-empty");
        AnnotatedToken {
            text: text.to_string(),
            lemma: lemma.to_string(),
            pos: pos.to_string(),
            dep: dep.to_string(),
            tag: None,
        }
    }

    pub fn with_tag(mut self, tag: Tag) -> Self {
        self.tag = Some(tag);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sentence {
    pub tokens: Vec<AnnotatedToken>,
    pub source_id: String,
}

impl Sentence {
    pub fn new(tokens: Vec<AnnotatedToken>, source_id: impl Into<String>) -> Self {
        Sentence {
            tokens,
            source_id: source_id.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Gold tags, if every token carries one.
    pub fn tags(&self) -> Option<Vec<Tag>> {
        self.tokens.iter().map(|t| t.tag).collect()
    }

    pub fn set_tags(&mut self, tags: &[Tag]) {
        assert_eq!(tags.len(), self.tokens.len());
        for (tok, &tag) in self.tokens.iter_mut().zip(tags) {
            tok.tag = Some(tag);
        }
    }

    /// Surface text of tokens `start..end`, space-joined.
    pub fn text_of(&self, start: usize, end: usize) -> String {
        self.tokens[start..end]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A half-open token range `[start, end)` marking one extraction context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

/// Sentences plus file-level metadata.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    /// `# key = value` lines preceding the first sentence, in file order.
    pub meta: Vec<(String, String)>,
    pub sentences: Vec<Sentence>,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        Corpus {
            meta: Vec::new(),
            sentences,
        }
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn set_meta(&mut self, key: &str, value: &str) {
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value.to_string(),
            None => self.meta.push((key.to_string(), value.to_string())),
        }
    }

    /// The annotator recorded in the file header, if any.
    pub fn annotator(&self) -> Option<Annotator> {
        self.meta_value("annotator").and_then(|v| v.parse().ok())
    }

    pub fn set_annotator(&mut self, annotator: Annotator) {
        self.set_meta("annotator", annotator.as_str());
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }
}

const SOURCE_ID_KEY: &str = "source_id";

fn parse_meta_line(line: &str) -> Option<(&str, &str)> {
    let rest = line.strip_prefix('#')?.trim_start();
    let (key, value) = rest.split_once(" = ")?;
    Some((key.trim(), value))
}

/// Parse CoNLL-style text. See the module docs for the format.
pub fn parse_conll(input: &str) -> Result<Corpus, CorpusError> {
    let mut corpus = Corpus::default();
    let mut tokens = Vec::new();
    let mut source_id: Option<String> = None;

    let flush = |tokens: &mut Vec<AnnotatedToken>, source_id: &mut Option<String>, out: &mut Vec<Sentence>| {
        if !tokens.is_empty() || source_id.is_some() {
            out.push(Sentence {
                tokens: std::mem::take(tokens),
                source_id: source_id.take().unwrap_or_default(),
            });
        }
    };

    for (idx, line) in input.split('\n').enumerate() {
        let lineno = idx + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            flush(&mut tokens, &mut source_id, &mut corpus.sentences);
            continue;
        }
        if line.starts_with('#') && !line.contains('\t') {
            match parse_meta_line(line) {
                Some((SOURCE_ID_KEY, value)) => {
                    if !tokens.is_empty() {
                        return Err(CorpusError::Parse {
                            line: lineno,
                            message: "source_id inside a sentence".into(),
                        });
                    }
                    source_id = Some(value.to_string());
                }
                Some((key, value)) => corpus.meta.push((key.to_string(), value.to_string())),
                // plain comment
                None => {}
            }
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 && cols.len() != 5 {
            return Err(CorpusError::Parse {
                line: lineno,
                message: format!("expected 4 or 5 tab-separated columns, found {}", cols.len()),
            });
        }
        if cols[0].is_empty() {
            return Err(CorpusError::Parse {
                line: lineno,
                message: "empty token text".into(),
            });
        }
        let tag = match cols.get(4) {
            Some(raw) => Some(raw.parse::<Tag>().map_err(|e| CorpusError::Tag {
                line: lineno,
                value: e.0,
            })?),
            None => None,
        };
        tokens.push(AnnotatedToken {
            text: cols[0].to_string(),
            lemma: cols[1].to_string(),
            pos: cols[2].to_string(),
            dep: cols[3].to_string(),
            tag,
        });
    }
    flush(&mut tokens, &mut source_id, &mut corpus.sentences);
    Ok(corpus)
}

/// Render a corpus in the CoNLL-style format.
pub fn format_conll(corpus: &Corpus) -> String {
    let mut out = String::new();
    for (key, value) in &corpus.meta {
        out.push_str(&format!("# {key} = {value}\n"));
    }
    for sentence in &corpus.sentences {
        if !sentence.source_id.is_empty() {
            out.push_str(&format!("# {SOURCE_ID_KEY} = {}\n", sentence.source_id));
        }
        for tok in &sentence.tokens {
            out.push_str(&tok.text);
            for col in [&tok.lemma, &tok.pos, &tok.dep] {
                out.push('\t');
                out.push_str(col);
            }
            if let Some(tag) = tok.tag {
                out.push('\t');
                out.push_str(tag.as_str());
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

pub fn read_conll(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_conll(&text)
}

pub fn write_conll(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    fs::write(path, format_conll(corpus)).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// True iff no `I-EXTR` follows `O` or starts the sequence.
pub fn is_well_formed(tags: &[Tag]) -> bool {
    let mut prev = Tag::O;
    for &tag in tags {
        if tag == Tag::I && prev == Tag::O {
            return false;
        }
        prev = tag;
    }
    true
}

/// Encode spans as BIO tags over a sentence of `sentence_len` tokens.
///
/// Spans may be given in any order but must be non-empty, in range and
/// pairwise disjoint.
pub fn spans_to_bio(sentence_len: usize, spans: &[Span]) -> Result<Vec<Tag>, CorpusError> {
    let mut sorted = spans.to_vec();
    sorted.sort();
    let mut tags = vec![Tag::O; sentence_len];
    let mut covered_to = 0;
    for span in sorted {
        if span.start >= span.end || span.end > sentence_len {
            return Err(CorpusError::SpanRange {
                start: span.start,
                end: span.end,
                len: sentence_len,
            });
        }
        if span.start < covered_to {
            return Err(CorpusError::SpanOverlap {
                start: span.start,
                end: span.end,
            });
        }
        tags[span.start] = Tag::B;
        for tag in &mut tags[span.start + 1..span.end] {
            *tag = Tag::I;
        }
        covered_to = span.end;
    }
    Ok(tags)
}

/// Decode BIO tags into maximal spans. A stray `I-EXTR` (after `O` or at
/// the start) opens a new span as if it were `B-EXTR`.
pub fn bio_to_spans(tags: &[Tag]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &tag) in tags.iter().enumerate() {
        match tag {
            Tag::B => {
                if let Some(start) = open.take() {
                    spans.push(Span::new(start, i));
                }
                open = Some(i);
            }
            Tag::I => {
                if open.is_none() {
                    open = Some(i);
                }
            }
            Tag::O => {
                if let Some(start) = open.take() {
                    spans.push(Span::new(start, i));
                }
            }
        }
    }
    if let Some(start) = open {
        spans.push(Span::new(start, tags.len()));
    }
    spans
}

/// Rewrite stray `I-EXTR` tags as `B-EXTR` so the sequence is well formed.
pub fn repair_bio(tags: &[Tag]) -> Vec<Tag> {
    let spans = bio_to_spans(tags);
    spans_to_bio(tags.len(), &spans).expect("decoded spans are valid")
}

fn is_sentence_final(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Crude fallback annotation for raw text.
///
/// Tokens are maximal alphanumeric runs; every other non-space character is
/// a token of its own. A sentence ends after `.`, `!` or `?`. Lemmas are the
/// lowercased text, POS is `X` and the dependency label is `dep`.
pub fn naive_annotate(text: &str, source_id: &str) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut tokens: Vec<AnnotatedToken> = Vec::new();
    let mut word = String::new();

    fn push_token(tokens: &mut Vec<AnnotatedToken>, text: &str) {
        tokens.push(AnnotatedToken::new(text, &text.to_lowercase(), "X", "dep"));
    }

    for c in text.chars() {
        if c.is_alphanumeric() {
            word.push(c);
            continue;
        }
        if !word.is_empty() {
            push_token(&mut tokens, &word);
            word.clear();
        }
        if c.is_whitespace() {
            continue;
        }
        push_token(&mut tokens, c.encode_utf8(&mut [0; 4]));
        if is_sentence_final(c) {
            sentences.push(Sentence::new(std::mem::take(&mut tokens), source_id));
        }
    }
    if !word.is_empty() {
        push_token(&mut tokens, &word);
    }
    if !tokens.is_empty() {
        sentences.push(Sentence::new(tokens, source_id));
    }
    sentences
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tok(text: &str, tag: Option<Tag>) -> AnnotatedToken {
        AnnotatedToken {
            text: text.into(),
            lemma: text.to_lowercase(),
            pos: "NOUN".into(),
            dep: "dobj".into(),
            tag,
        }
    }

    #[test]
    fn single_tagged_token() {
        let corpus = parse_conll("teamwork\tteamwork\tNOUN\tdobj\tB-EXTR\n\n").unwrap();
        assert_eq!(corpus.sentences.len(), 1);
        assert_eq!(corpus.sentences[0].tokens.len(), 1);
        assert_eq!(corpus.sentences[0].tokens[0].tag, Some(Tag::B));
    }

    #[test]
    fn empty_input() {
        assert!(parse_conll("").unwrap().sentences.is_empty());
    }

    #[test]
    fn hand_counted_fixture() {
        let text = "\
# source_id = a
The\tthe\tDET\tdet\tO
ability\tability\tNOUN\tnsubj\tB-EXTR
to\tto\tPART\taux\tI-EXTR

# source_id = b
Teamwork\tteamwork\tNOUN\tROOT\tB-EXTR
matters\tmatter\tVERB\tROOT\tO
.\t.\tPUNCT\tpunct\tO

Leadership\tleadership\tNOUN\tROOT\tB-EXTR
wins\twin\tVERB\tROOT\tO
";
        let corpus = parse_conll(text).unwrap();
        let counts: Vec<usize> = corpus.sentences.iter().map(Sentence::len).collect();
        assert_eq!(counts, vec![3, 3, 2]);
        assert_eq!(corpus.sentences[1].source_id, "b");
        assert_eq!(corpus.sentences[2].source_id, "");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_conll("a\ta\tX\tdep\n\nbad line\n").unwrap_err();
        match err {
            CorpusError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_tag_is_tag_error() {
        let err = parse_conll("a\ta\tX\tdep\tB-PER\n").unwrap_err();
        assert!(matches!(err, CorpusError::Tag { line: 1, ref value } if value == "B-PER"));
    }

    #[test]
    fn untagged_sentence_writes_four_columns() {
        let corpus = Corpus::new(vec![Sentence::new(vec![tok("skill", None)], "")]);
        assert_eq!(format_conll(&corpus), "skill\tskill\tNOUN\tdobj\n\n");
    }

    #[test]
    fn empty_corpus_writes_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.conll");
        write_conll(&Corpus::default(), &path).unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"");
        assert!(read_conll(&path).unwrap().sentences.is_empty());
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let err = write_conll(&Corpus::default(), "/nonexistent-dir/x.conll").unwrap_err();
        assert!(matches!(err, CorpusError::Io { .. }));
    }

    #[test]
    fn annotator_header_round_trips() {
        let mut corpus = Corpus::new(vec![Sentence::new(vec![tok("a", Some(Tag::O))], "s1")]);
        corpus.set_annotator(Annotator::Naive);
        let text = format_conll(&corpus);
        assert!(text.starts_with("# annotator = naive\n# source_id = s1\n"));
        let back = parse_conll(&text).unwrap();
        assert_eq!(back, corpus);
        assert_eq!(back.annotator(), Some(Annotator::Naive));
    }

    #[test]
    fn critical_thinking_sentence() {
        // The evaluation of participants is based on the assessment of their
        // level of critical thinking and problem solving .
        //  0    1     2      3       4  5    6  7     8      9  10    11 12
        let words = "The evaluation of participants is based on the assessment of their level of critical thinking and problem solving .";
        let n = words.split(' ').count();
        assert_eq!(n, 19);
        let spans = [Span::new(11, 15), Span::new(16, 18)];
        let tags = spans_to_bio(n, &spans).unwrap();
        assert_eq!(tags[11], Tag::B);
        assert_eq!(&tags[12..15], &[Tag::I, Tag::I, Tag::I]);
        assert_eq!(tags[15], Tag::O);
        assert_eq!(tags[16], Tag::B);
        assert_eq!(tags[17], Tag::I);
        assert_eq!(tags[18], Tag::O);
        assert_eq!(bio_to_spans(&tags), spans);
    }

    #[test]
    fn adjacent_spans_get_two_beginnings() {
        let tags = spans_to_bio(12, &[Span::new(8, 11), Span::new(11, 12)]).unwrap();
        assert_eq!(tags[8], Tag::B);
        assert_eq!(tags[9], Tag::I);
        assert_eq!(tags[10], Tag::I);
        assert_eq!(tags[11], Tag::B);
        assert!(tags[..8].iter().all(|&t| t == Tag::O));
    }

    #[test]
    fn spans_to_bio_trivial_cases() {
        assert_eq!(spans_to_bio(5, &[]).unwrap(), vec![Tag::O; 5]);
        assert_eq!(
            spans_to_bio(3, &[Span::new(0, 3)]).unwrap(),
            vec![Tag::B, Tag::I, Tag::I]
        );
    }

    #[test]
    fn spans_to_bio_rejects_bad_spans() {
        assert!(matches!(
            spans_to_bio(3, &[Span::new(1, 4)]),
            Err(CorpusError::SpanRange { .. })
        ));
        assert!(matches!(
            spans_to_bio(3, &[Span::new(1, 1)]),
            Err(CorpusError::SpanRange { .. })
        ));
        assert!(matches!(
            spans_to_bio(5, &[Span::new(0, 3), Span::new(2, 4)]),
            Err(CorpusError::SpanOverlap { .. })
        ));
    }

    #[test]
    fn bio_to_spans_examples() {
        assert_eq!(
            bio_to_spans(&[Tag::O, Tag::B, Tag::I, Tag::O]),
            vec![Span::new(1, 3)]
        );
        // stray I opens a span
        assert_eq!(bio_to_spans(&[Tag::I, Tag::O]), vec![Span::new(0, 1)]);
        assert_eq!(
            bio_to_spans(&[Tag::O, Tag::I, Tag::I, Tag::B]),
            vec![Span::new(1, 3), Span::new(3, 4)]
        );
    }

    #[test]
    fn repair_turns_stray_inside_into_begin() {
        assert_eq!(
            repair_bio(&[Tag::I, Tag::I, Tag::O, Tag::I]),
            vec![Tag::B, Tag::I, Tag::O, Tag::B]
        );
    }

    #[test]
    fn naive_annotate_examples() {
        assert!(naive_annotate("", "x").is_empty());
        let s = naive_annotate("Teamwork matters.", "x");
        assert_eq!(s.len(), 1);
        let texts: Vec<&str> = s[0].tokens.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, vec!["Teamwork", "matters", "."]);
        assert_eq!(s[0].tokens[0].lemma, "teamwork");
        assert_eq!(s[0].tokens[0].pos, "X");
        assert_eq!(s[0].tokens[0].dep, "dep");
        assert_eq!(naive_annotate("A. B.", "x").len(), 2);
        assert_eq!(naive_annotate("no final stop", "x").len(), 1);
    }

    fn tag_strategy() -> impl Strategy<Value = Tag> {
        prop_oneof![Just(Tag::O), Just(Tag::B), Just(Tag::I)]
    }

    /// Brute-force well-formedness: every I must have B or I immediately before it.
    fn well_formed_oracle(tags: &[Tag]) -> bool {
        (0..tags.len()).all(|i| tags[i] != Tag::I || (i > 0 && tags[i - 1] != Tag::O))
    }

    fn field() -> impl Strategy<Value = String> {
        "[^\t\n\r]{1,8}".prop_filter("no leading '#'", |s| !s.starts_with('#'))
    }

    fn token_strategy() -> impl Strategy<Value = AnnotatedToken> {
        (
            field(),
            "[^\t\n\r]{0,8}",
            "[^\t\n\r]{0,4}",
            "[^\t\n\r]{0,4}",
            proptest::option::of(tag_strategy()),
        )
            .prop_map(|(text, lemma, pos, dep, tag)| AnnotatedToken {
                text,
                lemma,
                pos,
                dep,
                tag,
            })
    }

    proptest! {
        #[test]
        fn well_formed_matches_oracle(tags in proptest::collection::vec(tag_strategy(), 0..12)) {
            prop_assert_eq!(is_well_formed(&tags), well_formed_oracle(&tags));
        }

        #[test]
        fn decode_encode_identity_on_well_formed(tags in proptest::collection::vec(tag_strategy(), 0..20)) {
            prop_assume!(is_well_formed(&tags));
            let spans = bio_to_spans(&tags);
            prop_assert_eq!(spans_to_bio(tags.len(), &spans).unwrap(), tags);
        }

        #[test]
        fn repaired_output_is_well_formed(tags in proptest::collection::vec(tag_strategy(), 0..20)) {
            prop_assert!(is_well_formed(&repair_bio(&tags)));
        }

        #[test]
        fn conll_round_trip(
            sentences in proptest::collection::vec(
                (proptest::collection::vec(token_strategy(), 1..6), "[a-z0-9-]{0,6}"),
                0..5,
            )
        ) {
            let corpus = Corpus::new(
                sentences.into_iter().map(|(tokens, id)| Sentence::new(tokens, id)).collect(),
            );
            let text = format_conll(&corpus);
            let back = parse_conll(&text).unwrap();
            prop_assert_eq!(&back, &corpus);
            prop_assert_eq!(format_conll(&back), text);
        }

        #[test]
        fn naive_tokens_cover_input(text in "[a-zA-Z0-9 .,!?;:'()-]{0,60}") {
            let sentences = naive_annotate(&text, "p");
            let joined: String = sentences
                .iter()
                .flat_map(|s| s.tokens.iter())
                .map(|t| {
                    assert!(!t.text.is_empty());
                    t.text.as_str()
                })
                .collect();
            let expected: String = text.chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(joined, expected);
        }
    }
}
