//! TOML configuration: tag vocabulary, input columns, CWE lists, defaults.
//!
//! ```toml
//! vocabulary = "s2sv"          # preset: default | s2sv
//! format = "csv"
//! source_column = "source"
//! target_column = "target"
//! mode = "raw"
//! out = "vulnaudit-out"
//!
//! [tags]                       # explicit tags override the preset
//! mod_start = "<ModStart>"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vulnaudit_core::presets::{self, REVIEWED_CWES, TOP10_CWES};
use vulnaudit_core::{CwePattern, NormalizationMode, TagVocabulary};

use crate::error::{Error, Result};
use crate::io::{InputFormat, LoadOptions};

pub const CONFIG_ENV: &str = "VULNAUDIT_CONFIG";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagOverrides {
    pub start_bug: Option<String>,
    pub end_bug: Option<String>,
    pub mod_start: Option<String>,
    pub mod_end: Option<String>,
    pub cwe_prefix: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cwe_extra_labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub vocabulary: String,
    pub tags: TagOverrides,
    pub format: Option<InputFormat>,
    pub source_column: String,
    pub target_column: String,
    pub top10: Vec<String>,
    pub reviewed: Vec<String>,
    pub mode: NormalizationMode,
    pub out: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            vocabulary: "default".into(),
            tags: TagOverrides::default(),
            format: None,
            source_column: "source".into(),
            target_column: "target".into(),
            top10: TOP10_CWES.iter().map(|s| s.to_string()).collect(),
            reviewed: REVIEWED_CWES.iter().map(|s| s.to_string()).collect(),
            mode: NormalizationMode::Raw,
            out: PathBuf::from("vulnaudit-out"),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// `explicit`, else `$VULNAUDIT_CONFIG`, else defaults.
    pub fn discover(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }

    /// The preset with explicit tag overrides applied, validated.
    pub fn vocabulary(&self) -> Result<TagVocabulary> {
        let mut v = presets::vocabulary(&self.vocabulary).ok_or_else(|| {
            Error::Config(format!(
                "unknown vocabulary preset `{}` (expected default or s2sv)",
                self.vocabulary
            ))
        })?;
        let t = &self.tags;
        for (slot, value) in [
            (&mut v.start_bug, &t.start_bug),
            (&mut v.end_bug, &t.end_bug),
            (&mut v.mod_start, &t.mod_start),
            (&mut v.mod_end, &t.mod_end),
        ] {
            if let Some(value) = value {
                *slot = value.clone();
            }
        }
        v.cwe_pattern = CwePattern {
            prefix: t.cwe_prefix.clone().unwrap_or(v.cwe_pattern.prefix),
            extra_labels: t.cwe_extra_labels.clone(),
        };
        v.validate()?;
        Ok(v)
    }

    pub fn load_options(&self, format: Option<InputFormat>, skip_malformed: bool) -> LoadOptions {
        LoadOptions {
            format: format.or(self.format),
            source_column: self.source_column.clone(),
            target_column: self.target_column.clone(),
            skip_malformed,
        }
    }
}
