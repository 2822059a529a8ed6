//! The four frozen VQA questions and user-defined prompt variants.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::vocab::PromptId;

/// Prefix shared by every frozen question. It nudges the model towards a
/// one-word answer.
pub const SINGLE_WORD_PREFIX: &str = "In a single word, ";

const EMOQ0: &str =
    "In a single word, is the person angry, disgusted, happy, sad, fearful, surprised or neutral?";
const EMOQ1: &str = "In a single word, what is the facial expression of the person?";
const EMOQ2: &str = "In a single word, what facial expression is the person displaying?";
const EMOQ3: &str = "In a single word, what basic facial expression is the person displaying?";

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("custom prompt text is empty")]
    EmptyCustom,
    #[error("prompt file {path}: {message}")]
    File { path: String, message: String },
    #[error("prompt file {path}: id {id:?} is reserved for the frozen prompt set")]
    ReservedId { path: String, id: String },
    #[error("unknown prompt {0:?}")]
    Unknown(String),
}

/// A fully rendered question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub id: PromptId,
    /// Display name: `emoq0`..`emoq3`, the prompt-file key, or the cache key.
    pub name: String,
    pub text: String,
}

impl PromptSpec {
    /// Stable key used to address cached answers.
    pub fn cache_key(&self) -> String {
        match &self.id {
            PromptId::Custom(text) => {
                let digest = Sha256::digest(text.as_bytes());
                let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
                format!("custom-{}", &hex[..16])
            }
            named => named.to_string(),
        }
    }
}

/// Renders a prompt id to its exact question text.
///
/// Custom text is passed through verbatim, without the single-word prefix.
pub fn render_prompt(id: &PromptId) -> Result<PromptSpec, PromptError> {
    let text = match id {
        PromptId::Emoq0 => EMOQ0,
        PromptId::Emoq1 => EMOQ1,
        PromptId::Emoq2 => EMOQ2,
        PromptId::Emoq3 => EMOQ3,
        PromptId::Custom(text) => {
            if text.trim().is_empty() {
                return Err(PromptError::EmptyCustom);
            }
            let mut spec = PromptSpec {
                id: id.clone(),
                name: String::new(),
                text: text.clone(),
            };
            spec.name = spec.cache_key();
            return Ok(spec);
        }
    };
    Ok(PromptSpec {
        id: id.clone(),
        name: id.to_string(),
        text: text.to_string(),
    })
}

/// Frozen prompts plus custom variants loaded from a prompt file.
#[derive(Debug, Clone, Default)]
pub struct PromptCatalog {
    custom: BTreeMap<String, String>,
}

impl PromptCatalog {
    pub fn builtin() -> Self {
        Self::default()
    }

    /// Parses a TOML document of `name = "question text"` pairs.
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, PromptError> {
        let table: BTreeMap<String, String> =
            toml::from_str(text).map_err(|e| PromptError::File {
                path: origin.to_string(),
                message: e.to_string(),
            })?;
        let mut custom = BTreeMap::new();
        for (id, text) in table {
            if PromptId::named(&id).is_some() {
                return Err(PromptError::ReservedId {
                    path: origin.to_string(),
                    id,
                });
            }
            if text.trim().is_empty() {
                return Err(PromptError::File {
                    path: origin.to_string(),
                    message: format!("prompt {id:?} has empty text"),
                });
            }
            custom.insert(id, text);
        }
        Ok(PromptCatalog { custom })
    }

    pub fn from_file(path: &Path) -> Result<Self, PromptError> {
        let text = std::fs::read_to_string(path).map_err(|e| PromptError::File {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text, &path.display().to_string())
    }

    /// Resolves a frozen id, a prompt-file key, or `custom:<text>`.
    pub fn resolve(&self, name: &str) -> Result<PromptSpec, PromptError> {
        if let Some(id) = PromptId::named(name) {
            return render_prompt(&id);
        }
        if let Some(text) = self.custom.get(name) {
            let mut spec = render_prompt(&PromptId::Custom(text.clone()))?;
            spec.name = name.to_string();
            return Ok(spec);
        }
        if let Some(text) = name.strip_prefix("custom:") {
            return render_prompt(&PromptId::Custom(text.to_string()));
        }
        Err(PromptError::Unknown(name.to_string()))
    }

    pub fn custom_names(&self) -> impl Iterator<Item = &str> {
        self.custom.keys().map(String::as_str)
    }
}
