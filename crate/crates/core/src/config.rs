//! Optional TOML configuration. Every key may be omitted; command-line flags
//! take precedence over the file, and the file over built-in defaults.
//!
//! ```toml
//! seed = 42
//!
//! [clues]
//! threshold = 0.8
//! max_wildcard = 10
//!
//! [svm]
//! c = 1.0
//! epochs = 20
//! window = 2
//!
//! [mlp]
//! epochs = 20
//! batch_size = 128
//! learning_rate = 0.001
//!
//! [eval]
//! test_fraction = 0.2
//!
//! [graph]
//! resolution = 1.0
//! mode = "skill"
//!
//! [extract]
//! fields = "both"
//! annotator = "naive"
//! ```

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::mlp::MlpConfig;
use crate::svm::SvmConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Toml {
        path: String,
        #[source]
        source: toml::de::Error,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    #[serde(default)]
    pub clues: ClueSection,
    #[serde(default)]
    pub svm: SvmSection,
    #[serde(default)]
    pub mlp: MlpSection,
    #[serde(default)]
    pub eval: EvalSection,
    #[serde(default)]
    pub graph: GraphSection,
    #[serde(default)]
    pub extract: ExtractSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClueSection {
    pub threshold: Option<f64>,
    pub max_wildcard: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvmSection {
    pub c: Option<f64>,
    pub epochs: Option<usize>,
    pub window: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpSection {
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub max_len: Option<usize>,
    pub embed_dim: Option<usize>,
    pub hidden: Option<usize>,
    pub dropout: Option<f64>,
    pub learning_rate: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub test_fraction: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub resolution: Option<f64>,
    pub mode: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractSection {
    pub fields: Option<String>,
    pub annotator: Option<String>,
}

impl Config {
    pub fn parse(text: &str, path: &str) -> Result<Config, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Toml {
            path: path.to_string(),
            source,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Config, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Config::parse(&text, &path.display().to_string())
    }

    /// Defaults overlaid with this file's `[svm]` section.
    pub fn svm_config(&self, seed: u64) -> SvmConfig {
        let d = SvmConfig::default();
        SvmConfig {
            c: self.svm.c.unwrap_or(d.c),
            epochs: self.svm.epochs.unwrap_or(d.epochs),
            window: self.svm.window.unwrap_or(d.window),
            seed,
        }
    }

    /// Defaults overlaid with this file's `[mlp]` section.
    pub fn mlp_config(&self, seed: u64) -> MlpConfig {
        let d = MlpConfig::default();
        let m = &self.mlp;
        MlpConfig {
            epochs: m.epochs.unwrap_or(d.epochs),
            batch_size: m.batch_size.unwrap_or(d.batch_size),
            max_len: m.max_len.unwrap_or(d.max_len),
            embed_dim: m.embed_dim.unwrap_or(d.embed_dim),
            hidden: m.hidden.unwrap_or(d.hidden),
            dropout: m.dropout.unwrap_or(d.dropout),
            learning_rate: m.learning_rate.unwrap_or(d.learning_rate),
            seed,
            ..d
        }
    }
}
