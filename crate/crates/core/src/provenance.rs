//! `# key = value` header lines shared by every output artifact.

use std::fmt::Write as _;

use crate::model::TOOLKIT_VERSION;

/// Placeholder for artifacts produced without a trained model.
pub const NO_MODEL: &str = "none";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub model_id: String,
    pub seed: u64,
    pub annotator: String,
}

impl Provenance {
    pub fn new(model_id: impl Into<String>, seed: u64, annotator: impl Into<String>) -> Self {
        Provenance {
            model_id: model_id.into(),
            seed,
            annotator: annotator.into(),
        }
    }

    /// Key/value pairs in a fixed order, followed by `extra`.
    pub fn pairs(&self, extra: &[(&str, String)]) -> Vec<(String, String)> {
        let mut out = vec![
            ("model_id".to_string(), self.model_id.clone()),
            ("seed".to_string(), self.seed.to_string()),
            ("annotator".to_string(), self.annotator.clone()),
            ("toolkit_version".to_string(), TOOLKIT_VERSION.to_string()),
        ];
        out.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
        out
    }

    /// Recover provenance from a header; absent keys fall back to
    /// [`NO_MODEL`], seed 0 and `unknown`.
    pub fn from_header(pairs: &[(String, String)]) -> Self {
        let get = |k: &str| pairs.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
        Provenance {
            model_id: get("model_id").unwrap_or(NO_MODEL).to_string(),
            seed: get("seed").and_then(|s| s.parse().ok()).unwrap_or(0),
            annotator: get("annotator").unwrap_or("unknown").to_string(),
        }
    }
}

pub fn format_header(pairs: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out
}

/// Leading `# key = value` lines; parsing stops at the first other line.
pub fn parse_header(text: &str) -> Vec<(String, String)> {
    text.lines()
        .map_while(|line| line.strip_prefix('#'))
        .filter_map(|line| line.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}
