//! ESCO-style CSV ingestion and soft-skill extraction over skill texts.
//!
//! Expected headers (first alias is canonical, the rest are accepted):
//!
//! | file        | column              | aliases                               |
//! |-------------|---------------------|---------------------------------------|
//! | skills      | `skill_id`          | `conceptUri`, `skillUri`, `id`        |
//! |             | `skill_label`       | `preferredLabel`, `label`             |
//! |             | `skill_description` | `description` (optional column)       |
//! | occupations | `occupation_id`     | `conceptUri`, `occupationUri`, `id`   |
//! |             | `occupation_label`  | `preferredLabel`, `label`             |
//! | relations   | `occupation_id`     | `occupationUri`                       |
//! |             | `skill_id`          | `skillUri`                            |
//! |             | `relation_type`     | `relationType`                        |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::{bio_to_spans, naive_annotate, repair_bio, Annotator, Sentence};
use crate::eval::Tagger;
use crate::graph::Assignment;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{file}: missing required column {column} (accepted: {aliases})")]
    MissingColumn {
        file: String,
        column: &'static str,
        aliases: String,
    },
    #[error("{file} row {row}: {message}")]
    Row { file: String, row: usize, message: String },
    #[error("{file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },
    #[error("{file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RelationType {
    Essential,
    Optional,
}

impl RelationType {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationType::Essential => "essential",
            RelationType::Optional => "optional",
        }
    }
}

impl FromStr for RelationType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "essential" => Ok(RelationType::Essential),
            "optional" => Ok(RelationType::Optional),
            other => Err(format!("relation type {other:?} is neither essential nor optional")),
        }
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One occupation-skill relation joined with both endpoints.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EscoRecord {
    pub occupation_id: String,
    pub occupation_label: String,
    pub skill_id: String,
    pub skill_label: String,
    pub skill_description: String,
    pub relation_type: RelationType,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub records: Vec<EscoRecord>,
    pub missing_skill: usize,
    pub missing_occupation: usize,
    pub duplicate_relations: usize,
}

impl IngestReport {
    pub fn dropped(&self) -> usize {
        self.missing_skill + self.missing_occupation + self.duplicate_relations
    }
}

struct Table {
    file: String,
    headers: Vec<String>,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn parse(file: &str, text: &str) -> Result<Table, IngestError> {
        let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(text.as_bytes());
        let csv_err = |source| IngestError::Csv {
            file: file.to_string(),
            source,
        };
        let headers = rdr
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(|h| h.trim().trim_start_matches('\u{feff}').to_string())
            .collect();
        let rows = rdr.records().collect::<Result<Vec<_>, _>>().map_err(csv_err)?;
        Ok(Table {
            file: file.to_string(),
            headers,
            rows,
        })
    }

    fn column(&self, canonical: &'static str, aliases: &[&str]) -> Option<usize> {
        std::iter::once(&canonical)
            .chain(aliases)
            .find_map(|name| self.headers.iter().position(|h| h == name))
    }

    fn require(&self, canonical: &'static str, aliases: &[&str]) -> Result<usize, IngestError> {
        self.column(canonical, aliases).ok_or_else(|| IngestError::MissingColumn {
            file: self.file.clone(),
            column: canonical,
            aliases: aliases.join(", "),
        })
    }

    /// Trimmed non-empty cell, or a row error naming the column.
    fn id(&self, row: usize, col: usize) -> Result<String, IngestError> {
        let v = self.rows[row].get(col).unwrap_or("").trim();
        if v.is_empty() {
            return Err(IngestError::Row {
                file: self.file.clone(),
                row: row + 2,
                message: format!("empty {}", self.headers[col]),
            });
        }
        Ok(v.to_string())
    }

    fn cell(&self, row: usize, col: Option<usize>) -> String {
        col.and_then(|c| self.rows[row].get(c)).unwrap_or("").trim().to_string()
    }
}

const SKILL_ID: &[&str] = &["conceptUri", "skillUri", "id"];
const LABEL: &[&str] = &["preferredLabel", "label"];
const DESCRIPTION: &[&str] = &["description"];
const OCC_ID: &[&str] = &["conceptUri", "occupationUri", "id"];
const REL_OCC: &[&str] = &["occupationUri"];
const REL_SKILL: &[&str] = &["skillUri"];
const REL_TYPE: &[&str] = &["relationType"];

/// Join the three tables. Relations pointing at unknown skills or
/// occupations are dropped and counted, as are repeated
/// (occupation, skill) pairs. Records come out sorted.
pub fn ingest_esco_str(skills: &str, occupations: &str, relations: &str) -> Result<IngestReport, IngestError> {
    let skills = Table::parse("skills", skills)?;
    let occupations = Table::parse("occupations", occupations)?;
    let relations = Table::parse("relations", relations)?;

    let s_id = skills.require("skill_id", SKILL_ID)?;
    let s_label = skills.require("skill_label", LABEL)?;
    let s_desc = skills.column("skill_description", DESCRIPTION);
    let mut skill_map: BTreeMap<String, (String, String)> = BTreeMap::new();
    for row in 0..skills.rows.len() {
        skill_map.insert(
            skills.id(row, s_id)?,
            (skills.cell(row, Some(s_label)), skills.cell(row, s_desc)),
        );
    }

    let o_id = occupations.require("occupation_id", OCC_ID)?;
    let o_label = occupations.require("occupation_label", LABEL)?;
    let mut occ_map: BTreeMap<String, String> = BTreeMap::new();
    for row in 0..occupations.rows.len() {
        occ_map.insert(occupations.id(row, o_id)?, occupations.cell(row, Some(o_label)));
    }

    let r_occ = relations.require("occupation_id", REL_OCC)?;
    let r_skill = relations.require("skill_id", REL_SKILL)?;
    let r_type = relations.require("relation_type", REL_TYPE)?;
    let mut report = IngestReport::default();
    let mut seen = BTreeSet::new();
    for row in 0..relations.rows.len() {
        let occ = relations.id(row, r_occ)?;
        let skill = relations.id(row, r_skill)?;
        let relation_type: RelationType = relations
            .cell(row, Some(r_type))
            .parse()
            .map_err(|message| IngestError::Row {
                file: relations.file.clone(),
                row: row + 2,
                message,
            })?;
        let Some((skill_label, skill_description)) = skill_map.get(&skill) else {
            report.missing_skill += 1;
            continue;
        };
        let Some(occupation_label) = occ_map.get(&occ) else {
            report.missing_occupation += 1;
            continue;
        };
        if !seen.insert((occ.clone(), skill.clone())) {
            report.duplicate_relations += 1;
            continue;
        }
        report.records.push(EscoRecord {
            occupation_id: occ,
            occupation_label: occupation_label.clone(),
            skill_id: skill,
            skill_label: skill_label.clone(),
            skill_description: skill_description.clone(),
            relation_type,
        });
    }
    report.records.sort();
    if report.dropped() > 0 {
        log::warn!(
            "dropped {} relations ({} unknown skill, {} unknown occupation, {} duplicate)",
            report.dropped(),
            report.missing_skill,
            report.missing_occupation,
            report.duplicate_relations
        );
    }
    Ok(report)
}

fn read(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        file: path.display().to_string(),
        source,
    })
}

pub fn ingest_esco(
    skills_csv: impl AsRef<Path>,
    occupations_csv: impl AsRef<Path>,
    relations_csv: impl AsRef<Path>,
) -> Result<IngestReport, IngestError> {
    ingest_esco_str(
        &read(skills_csv.as_ref())?,
        &read(occupations_csv.as_ref())?,
        &read(relations_csv.as_ref())?,
    )
}

/// Occupation-skill pairs for graph projection, optionally restricted to a
/// set of skill ids.
pub fn to_assignments(records: &[EscoRecord], keep: Option<&BTreeSet<String>>) -> Vec<Assignment> {
    records
        .iter()
        .filter(|r| keep.is_none_or(|k| k.contains(&r.skill_id)))
        .map(|r| Assignment::new(&r.occupation_id, &r.occupation_label, &r.skill_id, &r.skill_label))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextField {
    Label,
    Description,
}

impl TextField {
    pub fn as_str(self) -> &'static str {
        match self {
            TextField::Label => "label",
            TextField::Description => "description",
        }
    }
}

/// Which skill texts are run through the tagger.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fields {
    Label,
    Description,
    Both,
}

impl Fields {
    pub fn list(self) -> &'static [TextField] {
        match self {
            Fields::Label => &[TextField::Label],
            Fields::Description => &[TextField::Description],
            Fields::Both => &[TextField::Label, TextField::Description],
        }
    }
}

impl FromStr for Fields {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "label" => Ok(Fields::Label),
            "description" => Ok(Fields::Description),
            "both" => Ok(Fields::Both),
            other => Err(format!("unknown field selection {other:?}")),
        }
    }
}

/// A skill's texts, tokenized either here or by an external annotator.
#[derive(Debug, Clone, PartialEq)]
pub struct SkillText {
    pub skill_id: String,
    pub skill_label: String,
    /// (field, sentences of that field)
    pub parts: Vec<(TextField, Vec<Sentence>)>,
}

/// Unique skills of `records` in id order, tokenized with the built-in
/// annotator. Sentence source ids are `skill_id#field`.
pub fn naive_skill_texts(records: &[EscoRecord], fields: Fields) -> Vec<SkillText> {
    let mut skills: BTreeMap<&str, &EscoRecord> = BTreeMap::new();
    for r in records {
        skills.entry(r.skill_id.as_str()).or_insert(r);
    }
    skills
        .values()
        .map(|r| SkillText {
            skill_id: r.skill_id.clone(),
            skill_label: r.skill_label.clone(),
            parts: fields
                .list()
                .iter()
                .map(|&f| {
                    let text = match f {
                        TextField::Label => &r.skill_label,
                        TextField::Description => &r.skill_description,
                    };
                    (f, naive_annotate(text, &format!("{}#{}", r.skill_id, f.as_str())))
                })
                .collect(),
        })
        .collect()
}

/// Group externally annotated sentences by their `skill_id#field` source
/// id. Skills with no annotated sentence still appear, with no parts.
pub fn conll_skill_texts(records: &[EscoRecord], annotated: &[Sentence], fields: Fields) -> Vec<SkillText> {
    let mut by_source: BTreeMap<&str, Vec<Sentence>> = BTreeMap::new();
    for s in annotated {
        by_source.entry(s.source_id.as_str()).or_default().push(s.clone());
    }
    let mut skills: BTreeMap<&str, &EscoRecord> = BTreeMap::new();
    for r in records {
        skills.entry(r.skill_id.as_str()).or_insert(r);
    }
    skills
        .values()
        .map(|r| SkillText {
            skill_id: r.skill_id.clone(),
            skill_label: r.skill_label.clone(),
            parts: fields
                .list()
                .iter()
                .filter_map(|&f| {
                    by_source
                        .get(format!("{}#{}", r.skill_id, f.as_str()).as_str())
                        .map(|s| (f, s.clone()))
                })
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedSpan {
    pub field: TextField,
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionResult {
    pub skill_id: String,
    pub skill_label: String,
    pub spans: Vec<ExtractedSpan>,
    pub model_id: String,
    pub annotator: Annotator,
}

impl ExtractionResult {
    /// A skill is soft iff at least one extraction context was found.
    pub fn is_soft(&self) -> bool {
        !self.spans.is_empty()
    }
}

/// Tag every text and collect predicted extraction contexts. Each skill is
/// handled independently, so results do not depend on the other records.
pub fn extract_skills<T: Tagger + ?Sized>(
    texts: &[SkillText],
    tagger: &T,
    model_id: &str,
    annotator: Annotator,
) -> Vec<ExtractionResult> {
    texts
        .iter()
        .map(|t| {
            let mut spans = Vec::new();
            for (field, sentences) in &t.parts {
                for (si, s) in sentences.iter().enumerate() {
                    let tags = repair_bio(&tagger.tag(s));
                    for span in bio_to_spans(&tags) {
                        spans.push(ExtractedSpan {
                            field: *field,
                            sentence: si,
                            start: span.start,
                            end: span.end,
                            text: s.text_of(span.start, span.end),
                        });
                    }
                }
            }
            ExtractionResult {
                skill_id: t.skill_id.clone(),
                skill_label: t.skill_label.clone(),
                spans,
                model_id: model_id.to_string(),
                annotator,
            }
        })
        .collect()
}

/// One row per extracted span; skills without spans get a single row with
/// `soft = false` and empty span columns.
pub fn format_extractions_tsv(results: &[ExtractionResult], meta: &[(String, String)]) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    for (k, v) in meta {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out.push_str("skill_id\tskill_label\tsoft\tfield\tsentence\tstart\tend\ttext\n");
    let clean = |s: &str| s.replace(['\t', '\n', '\r'], " ");
    for r in results {
        if r.spans.is_empty() {
            let _ = writeln!(out, "{}\t{}\tfalse\t\t\t\t\t", clean(&r.skill_id), clean(&r.skill_label));
        }
        for s in &r.spans {
            let _ = writeln!(
                out,
                "{}\t{}\ttrue\t{}\t{}\t{}\t{}\t{}",
                clean(&r.skill_id),
                clean(&r.skill_label),
                s.field.as_str(),
                s.sentence,
                s.start,
                s.end,
                clean(&s.text)
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Tag;

    const SKILLS: &str = "skill_id,skill_label,skill_description\n\
        s1,teamwork,Ability to work in teams.\n\
        s2,welding,Join metal parts.\n\
        s3,leadership,\n";
    const OCCS: &str = "occupation_id,occupation_label\no1,nurse\no2,welder\n";
    const RELS: &str = "occupation_id,skill_id,relation_type\n\
        o1,s1,essential\n\
        o2,s2,optional\n\
        o1,s3,optional\n";

    #[test]
    fn consistent_fixture_joins_every_row() {
        let r = ingest_esco_str(SKILLS, OCCS, RELS).unwrap();
        assert_eq!(r.records.len(), 3);
        assert_eq!(r.dropped(), 0);
        assert_eq!(r.records[0].skill_description, "Ability to work in teams.");
        assert_eq!(r.records[2].relation_type, RelationType::Optional);
    }

    #[test]
    fn dangling_relation_is_dropped_and_counted() {
        let rels = format!("{RELS}o1,s9,essential\n");
        let r = ingest_esco_str(SKILLS, OCCS, &rels).unwrap();
        assert_eq!((r.records.len(), r.missing_skill, r.missing_occupation), (3, 1, 0));
        let rels = format!("{RELS}o9,s1,essential\no1,s1,optional\n");
        let r = ingest_esco_str(SKILLS, OCCS, &rels).unwrap();
        assert_eq!((r.missing_occupation, r.duplicate_relations), (1, 1));
    }

    #[test]
    fn esco_header_aliases_are_accepted() {
        let skills = "conceptUri,preferredLabel,description\ns1,teamwork,x\n";
        let occs = "conceptUri,preferredLabel\no1,nurse\n";
        let rels = "occupationUri,relationType,skillUri\no1,Essential,s1\n";
        let r = ingest_esco_str(skills, occs, rels).unwrap();
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.records[0].relation_type, RelationType::Essential);
    }

    #[test]
    fn ingest_errors() {
        assert!(matches!(
            ingest_esco_str("id_x,label\n", OCCS, RELS),
            Err(IngestError::MissingColumn { column: "skill_id", .. })
        ));
        let bad = "occupation_id,skill_id,relation_type\no1,s1,sometimes\n";
        assert!(matches!(ingest_esco_str(SKILLS, OCCS, bad), Err(IngestError::Row { row: 2, .. })));
        let empty_id = "skill_id,skill_label\n,x\n";
        assert!(matches!(ingest_esco_str(empty_id, OCCS, RELS), Err(IngestError::Row { .. })));
    }

    /// Tags a token B when its lowercased text is "ability" and the next
    /// tokens I until the end of the sentence punctuation.
    struct AbilityTagger;

    impl Tagger for AbilityTagger {
        fn tag(&self, s: &Sentence) -> Vec<Tag> {
            let mut inside = false;
            s.tokens
                .iter()
                .map(|t| {
                    if t.lemma == "ability" {
                        inside = true;
                        Tag::B
                    } else if inside && t.text != "." {
                        Tag::I
                    } else {
                        inside = false;
                        Tag::O
                    }
                })
                .collect()
        }
    }

    #[test]
    fn extraction_flags_soft_skills() {
        let r = ingest_esco_str(SKILLS, OCCS, RELS).unwrap();
        let texts = naive_skill_texts(&r.records, Fields::Both);
        assert_eq!(texts.len(), 3);
        let results = extract_skills(&texts, &AbilityTagger, "m0", Annotator::Naive);
        let soft: Vec<&str> = results.iter().filter(|r| r.is_soft()).map(|r| r.skill_id.as_str()).collect();
        assert_eq!(soft, ["s1"]);
        assert_eq!(results[0].spans[0].text, "Ability to work in teams");
        assert_eq!(results[0].spans[0].field, TextField::Description);
        assert!(results[2].spans.is_empty());
        let tsv = format_extractions_tsv(&results, &[("model_id".into(), "m0".into())]);
        assert!(tsv.starts_with("# model_id = m0\n"));
        assert_eq!(tsv.lines().count(), 2 + 3);
    }

    #[test]
    fn conll_texts_are_grouped_by_source() {
        let r = ingest_esco_str(SKILLS, OCCS, RELS).unwrap();
        let annotated = naive_annotate("Ability to lead.", "s3#description");
        let texts = conll_skill_texts(&r.records, &annotated, Fields::Both);
        assert_eq!(texts[2].parts.len(), 1);
        assert!(texts[0].parts.is_empty());
        let results = extract_skills(&texts, &AbilityTagger, "m0", Annotator::External);
        assert!(results[2].is_soft() && !results[0].is_soft());
    }

    #[test]
    fn assignments_can_be_restricted() {
        let r = ingest_esco_str(SKILLS, OCCS, RELS).unwrap();
        assert_eq!(to_assignments(&r.records, None).len(), 3);
        let keep: BTreeSet<String> = ["s1".to_string()].into();
        let rows = to_assignments(&r.records, Some(&keep));
        assert_eq!(rows, vec![Assignment::new("o1", "nurse", "s1", "teamwork")]);
    }
}
