//! Synthetic job-ad corpus with a known tagging function.
//!
//! Each positive sentence wraps one or two extraction contexts (a clue phrase
//! followed by a skill phrase) in filler text. The context is tagged
//! `B-EXTR I-EXTR ...` from the first clue token to the last skill token and
//! everything else is `O`. Distractor sentences reuse skill and clue words
//! outside that construction and are tagged `O` throughout.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{AnnotatedToken, Sentence, Tag};

/// (text, lemma, pos, dep)
type Tok = (&'static str, &'static str, &'static str, &'static str);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Takes {
    Verb,
    Noun,
}

struct Clue {
    tokens: &'static [Tok],
    takes: Takes,
}

const CLUES: [Clue; 12] = [
    Clue { tokens: &[("ability", "ability", "NOUN", "dobj"), ("to", "to", "PART", "aux")], takes: Takes::Verb },
    Clue { tokens: &[("capacity", "capacity", "NOUN", "dobj"), ("to", "to", "PART", "aux")], takes: Takes::Verb },
    Clue { tokens: &[("willingness", "willingness", "NOUN", "dobj"), ("to", "to", "PART", "aux")], takes: Takes::Verb },
    Clue { tokens: &[("able", "able", "ADJ", "acomp"), ("to", "to", "PART", "aux")], takes: Takes::Verb },
    Clue { tokens: &[("skills", "skill", "NOUN", "dobj"), ("in", "in", "ADP", "prep")], takes: Takes::Noun },
    Clue { tokens: &[("experience", "experience", "NOUN", "dobj"), ("in", "in", "ADP", "prep")], takes: Takes::Noun },
    Clue { tokens: &[("knowledge", "knowledge", "NOUN", "dobj"), ("of", "of", "ADP", "prep")], takes: Takes::Noun },
    Clue { tokens: &[("commitment", "commitment", "NOUN", "dobj"), ("to", "to", "ADP", "prep")], takes: Takes::Noun },
    Clue { tokens: &[("aptitude", "aptitude", "NOUN", "dobj"), ("for", "for", "ADP", "prep")], takes: Takes::Noun },
    Clue { tokens: &[("proficiency", "proficiency", "NOUN", "dobj"), ("in", "in", "ADP", "prep")], takes: Takes::Noun },
    Clue { tokens: &[("excellent", "excellent", "ADJ", "amod")], takes: Takes::Noun },
    Clue { tokens: &[("strong", "strong", "ADJ", "amod")], takes: Takes::Noun },
];

const VERB_SKILLS: &[&[Tok]] = &[
    &[("solve", "solve", "VERB", "xcomp"), ("problems", "problem", "NOUN", "dobj")],
    &[("work", "work", "VERB", "xcomp"), ("in", "in", "ADP", "prep"), ("teams", "team", "NOUN", "pobj")],
    &[("communicate", "communicate", "VERB", "xcomp"), ("clearly", "clearly", "ADV", "advmod")],
    &[("lead", "lead", "VERB", "xcomp"), ("people", "people", "NOUN", "dobj")],
    &[("manage", "manage", "VERB", "xcomp"), ("conflicts", "conflict", "NOUN", "dobj")],
    &[("adapt", "adapt", "VERB", "xcomp"), ("to", "to", "ADP", "prep"), ("change", "change", "NOUN", "pobj")],
    &[("negotiate", "negotiate", "VERB", "xcomp")],
    &[("think", "think", "VERB", "xcomp"), ("critically", "critically", "ADV", "advmod")],
    &[("motivate", "motivate", "VERB", "xcomp"), ("others", "other", "NOUN", "dobj")],
    &[("prioritise", "prioritise", "VERB", "xcomp"), ("tasks", "task", "NOUN", "dobj")],
];

const NOUN_SKILLS: &[&[Tok]] = &[
    &[("problem", "problem", "NOUN", "compound"), ("solving", "solving", "NOUN", "pobj")],
    &[("teamwork", "teamwork", "NOUN", "pobj")],
    &[("communication", "communication", "NOUN", "pobj")],
    &[("leadership", "leadership", "NOUN", "pobj")],
    &[("time", "time", "NOUN", "compound"), ("management", "management", "NOUN", "pobj")],
    &[("critical", "critical", "ADJ", "amod"), ("thinking", "thinking", "NOUN", "pobj")],
    &[("negotiation", "negotiation", "NOUN", "pobj")],
    &[("public", "public", "ADJ", "amod"), ("speaking", "speaking", "NOUN", "pobj")],
    &[("conflict", "conflict", "NOUN", "compound"), ("resolution", "resolution", "NOUN", "pobj")],
    &[("creativity", "creativity", "NOUN", "pobj")],
];

const PREFIXES: &[&[Tok]] = &[
    &[("We", "we", "PRON", "nsubj"), ("seek", "seek", "VERB", "ROOT"), ("a", "a", "DET", "det"), ("candidate", "candidate", "NOUN", "dobj"), ("with", "with", "ADP", "prep")],
    &[("The", "the", "DET", "det"), ("role", "role", "NOUN", "nsubj"), ("requires", "require", "VERB", "ROOT")],
    &[("Applicants", "applicant", "NOUN", "nsubj"), ("must", "must", "AUX", "aux"), ("show", "show", "VERB", "ROOT")],
    &[("You", "you", "PRON", "nsubj"), ("will", "will", "AUX", "aux"), ("need", "need", "VERB", "ROOT")],
    &[("This", "this", "DET", "det"), ("position", "position", "NOUN", "nsubj"), ("demands", "demand", "VERB", "ROOT")],
    &[("Our", "our", "PRON", "poss"), ("company", "company", "NOUN", "nsubj"), ("values", "value", "VERB", "ROOT")],
    &[("Ideal", "ideal", "ADJ", "amod"), ("profiles", "profile", "NOUN", "nsubj"), ("have", "have", "VERB", "ROOT")],
];

const CONNECTORS: &[&[Tok]] = &[
    &[("and", "and", "CCONJ", "cc")],
    &[(",", ",", "PUNCT", "punct"), ("as", "as", "ADV", "advmod"), ("well", "well", "ADV", "advmod"), ("as", "as", "ADP", "prep")],
    &[("together", "together", "ADV", "advmod"), ("with", "with", "ADP", "prep")],
];

const SUFFIXES: &[&[Tok]] = &[
    &[],
    &[("in", "in", "ADP", "prep"), ("a", "a", "DET", "det"), ("busy", "busy", "ADJ", "amod"), ("office", "office", "NOUN", "pobj")],
    &[("across", "across", "ADP", "prep"), ("international", "international", "ADJ", "amod"), ("projects", "project", "NOUN", "pobj")],
    &[("from", "from", "ADP", "prep"), ("day", "day", "NOUN", "pobj"), ("one", "one", "NUM", "nummod")],
];

/// Sentences with no skill material at all.
const FILLERS: &[&[Tok]] = &[
    &[("The", "the", "DET", "det"), ("office", "office", "NOUN", "nsubj"), ("is", "be", "AUX", "ROOT"), ("located", "locate", "VERB", "acomp"), ("downtown", "downtown", "ADV", "advmod")],
    &[("Salary", "salary", "NOUN", "nsubj"), ("depends", "depend", "VERB", "ROOT"), ("on", "on", "ADP", "prep"), ("experience", "experience", "NOUN", "pobj")],
    &[("Contracts", "contract", "NOUN", "nsubj"), ("start", "start", "VERB", "ROOT"), ("in", "in", "ADP", "prep"), ("March", "march", "PROPN", "pobj")],
    &[("The", "the", "DET", "det"), ("capacity", "capacity", "NOUN", "nsubj"), ("of", "of", "ADP", "prep"), ("the", "the", "DET", "det"), ("warehouse", "warehouse", "NOUN", "pobj"), ("is", "be", "AUX", "ROOT"), ("large", "large", "ADJ", "acomp")],
    &[("Send", "send", "VERB", "ROOT"), ("your", "your", "PRON", "poss"), ("application", "application", "NOUN", "dobj"), ("by", "by", "ADP", "prep"), ("email", "email", "NOUN", "pobj")],
    &[("We", "we", "PRON", "nsubj"), ("offer", "offer", "VERB", "ROOT"), ("a", "a", "DET", "det"), ("strong", "strong", "ADJ", "amod"), ("salary", "salary", "NOUN", "dobj")],
    &[("The", "the", "DET", "det"), ("team", "team", "NOUN", "nsubj"), ("works", "work", "VERB", "ROOT"), ("remotely", "remotely", "ADV", "advmod")],
];

/// Subjects for distractors that use a skill phrase without a clue.
const DISTRACTOR_SUBJECTS: &[&[Tok]] = &[
    &[("Engineers", "engineer", "NOUN", "nsubj"), ("here", "here", "ADV", "advmod")],
    &[("The", "the", "DET", "det"), ("manager", "manager", "NOUN", "nsubj"), ("will", "will", "AUX", "aux")],
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub sentences: usize,
    pub seed: u64,
    /// Share of sentences carrying at least one extraction context.
    pub positive_rate: f64,
    /// Share of positive sentences carrying a second context.
    pub second_context_rate: f64,
    /// Share of negative sentences that mention a skill without a clue.
    pub bare_skill_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            sentences: 5000,
            seed: 7,
            positive_rate: 0.7,
            second_context_rate: 0.3,
            bare_skill_rate: 0.3,
        }
    }
}

/// Surface forms of the planted clue phrases.
pub fn clue_phrases() -> Vec<String> {
    CLUES.iter().map(|c| join(c.tokens)).collect()
}

fn join(tokens: &[Tok]) -> String {
    tokens.iter().map(|t| t.0).collect::<Vec<_>>().join(" ")
}

fn push(out: &mut Vec<AnnotatedToken>, tokens: &[Tok], tag: impl Fn(usize) -> Tag) {
    for (i, &(text, lemma, pos, dep)) in tokens.iter().enumerate() {
        out.push(AnnotatedToken::new(text, lemma, pos, dep).with_tag(tag(i)));
    }
}

fn push_context(out: &mut Vec<AnnotatedToken>, rng: &mut ChaCha8Rng) {
    let clue = &CLUES[rng.random_range(0..CLUES.len())];
    let skills = match clue.takes {
        Takes::Verb => VERB_SKILLS,
        Takes::Noun => NOUN_SKILLS,
    };
    let skill = skills.choose(rng).expect("non-empty");
    push(out, clue.tokens, |i| if i == 0 { Tag::B } else { Tag::I });
    push(out, skill, |_| Tag::I);
}

fn pick<'a>(list: &'a [&'a [Tok]], rng: &mut ChaCha8Rng) -> &'a [Tok] {
    list.choose(rng).expect("non-empty")
}

fn positive(rng: &mut ChaCha8Rng, cfg: &SynthConfig) -> Vec<AnnotatedToken> {
    let mut out = Vec::new();
    push(&mut out, pick(PREFIXES, rng), |_| Tag::O);
    push_context(&mut out, rng);
    if rng.random_bool(cfg.second_context_rate) {
        push(&mut out, pick(CONNECTORS, rng), |_| Tag::O);
        push_context(&mut out, rng);
    }
    push(&mut out, pick(SUFFIXES, rng), |_| Tag::O);
    out
}

fn negative(rng: &mut ChaCha8Rng, cfg: &SynthConfig) -> Vec<AnnotatedToken> {
    let mut out = Vec::new();
    if rng.random_bool(cfg.bare_skill_rate) {
        push(&mut out, pick(DISTRACTOR_SUBJECTS, rng), |_| Tag::O);
        push(&mut out, pick(VERB_SKILLS, rng), |_| Tag::O);
        push(&mut out, pick(SUFFIXES, rng), |_| Tag::O);
    } else {
        push(&mut out, pick(FILLERS, rng), |_| Tag::O);
    }
    out
}

/// Generate a fully tagged corpus; identical config gives identical output.
pub fn generate(cfg: &SynthConfig) -> Vec<Sentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.sentences)
        .map(|i| {
            let mut tokens = if rng.random_bool(cfg.positive_rate) {
                positive(&mut rng, cfg)
            } else {
                negative(&mut rng, cfg)
            };
            push(&mut tokens, &[(".", ".", "PUNCT", "punct")], |_| Tag::O);
            Sentence::new(tokens, format!("synth-{i}"))
        })
        .collect()
}
