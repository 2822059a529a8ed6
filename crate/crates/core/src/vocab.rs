//! Shared vocabulary: the seven basic expressions, the eight prediction
//! classes (the seven plus `Unknown`), ground-truth labels, samples and
//! prompt identifiers.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One of the seven basic facial expressions.
///
/// The declaration order is the canonical order used wherever classes are
/// serialized (matrix columns, report rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicExpression {
    Anger,
    Disgust,
    Fear,
    Happiness,
    Neutral,
    Sadness,
    Surprise,
}

impl BasicExpression {
    pub const ALL: [BasicExpression; 7] = [
        BasicExpression::Anger,
        BasicExpression::Disgust,
        BasicExpression::Fear,
        BasicExpression::Happiness,
        BasicExpression::Neutral,
        BasicExpression::Sadness,
        BasicExpression::Surprise,
    ];

    /// Lowercase self-name, e.g. `"happiness"`.
    pub fn name(self) -> &'static str {
        match self {
            BasicExpression::Anger => "anger",
            BasicExpression::Disgust => "disgust",
            BasicExpression::Fear => "fear",
            BasicExpression::Happiness => "happiness",
            BasicExpression::Neutral => "neutral",
            BasicExpression::Sadness => "sadness",
            BasicExpression::Surprise => "surprise",
        }
    }

    /// Position in [`canonical_class_order`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// Case-insensitive lookup by self-name.
    pub fn from_name(name: &str) -> Option<Self> {
        let name = name.trim();
        Self::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for BasicExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unrecognized class name {0:?}")]
pub struct ParseClassError(pub String);

impl FromStr for BasicExpression {
    type Err = ParseClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_name(s).ok_or_else(|| ParseClassError(s.to_string()))
    }
}

/// A predicted class: a basic expression, or `Unknown` when the answer
/// could not be mapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredictedClass {
    Expression(BasicExpression),
    Unknown,
}

/// Number of prediction classes (7 expressions + Unknown).
pub const NUM_PREDICTED_CLASSES: usize = 8;

impl PredictedClass {
    pub fn name(self) -> &'static str {
        match self {
            PredictedClass::Expression(e) => e.name(),
            PredictedClass::Unknown => "unknown",
        }
    }

    /// Column index in [`canonical_class_order`].
    pub fn index(self) -> usize {
        match self {
            PredictedClass::Expression(e) => e.index(),
            PredictedClass::Unknown => 7,
        }
    }

    /// Short column label used by confusion-matrix exports.
    pub fn abbreviation(self) -> &'static str {
        match self {
            PredictedClass::Expression(BasicExpression::Anger) => "Ang",
            PredictedClass::Expression(BasicExpression::Disgust) => "Dis",
            PredictedClass::Expression(BasicExpression::Fear) => "Fea",
            PredictedClass::Expression(BasicExpression::Happiness) => "Hap",
            PredictedClass::Expression(BasicExpression::Neutral) => "Neu",
            PredictedClass::Expression(BasicExpression::Sadness) => "Sad",
            PredictedClass::Expression(BasicExpression::Surprise) => "Sur",
            PredictedClass::Unknown => "Unk",
        }
    }
}

impl From<BasicExpression> for PredictedClass {
    fn from(e: BasicExpression) -> Self {
        PredictedClass::Expression(e)
    }
}

impl fmt::Display for PredictedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PredictedClass {
    type Err = ParseClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("unknown") {
            return Ok(PredictedClass::Unknown);
        }
        s.parse::<BasicExpression>().map(PredictedClass::Expression)
    }
}

/// The 7 basic expressions in canonical order followed by `Unknown`.
pub fn canonical_class_order() -> [PredictedClass; NUM_PREDICTED_CLASSES] {
    let mut out = [PredictedClass::Unknown; NUM_PREDICTED_CLASSES];
    for (slot, e) in out.iter_mut().zip(BasicExpression::ALL) {
        *slot = PredictedClass::Expression(e);
    }
    out
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let raw = String::deserialize(d)?;
                raw.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(BasicExpression);
string_serde!(PredictedClass);

/// Result of mapping one free-text answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub class: PredictedClass,
    pub raw_answer: String,
    /// Lexicon key that produced the class; always `None` for `Unknown`.
    pub matched_synonym: Option<String>,
}

impl Prediction {
    pub fn unknown(raw_answer: impl Into<String>) -> Self {
        Prediction {
            class: PredictedClass::Unknown,
            raw_answer: raw_answer.into(),
            matched_synonym: None,
        }
    }

    pub fn matched(
        expression: BasicExpression,
        raw_answer: impl Into<String>,
        synonym: impl Into<String>,
    ) -> Self {
        Prediction {
            class: PredictedClass::Expression(expression),
            raw_answer: raw_answer.into(),
            matched_synonym: Some(synonym.into()),
        }
    }
}

/// A ground-truth label token from a dataset's vocabulary.
///
/// Tokens are normalized to trimmed lowercase; membership in the owning
/// vocabulary is checked at ingestion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroundTruthLabel(String);

impl GroundTruthLabel {
    pub fn new(token: &str) -> Self {
        GroundTruthLabel(normalize_label_token(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The basic expression whose self-name matches this label, if any.
    pub fn aligned_expression(&self) -> Option<BasicExpression> {
        BasicExpression::from_name(&self.0)
    }
}

impl AsRef<str> for GroundTruthLabel {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GroundTruthLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for GroundTruthLabel {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(GroundTruthLabel::new(s))
    }
}

pub(crate) fn normalize_label_token(token: &str) -> String {
    token.trim().to_lowercase()
}

/// Where a sample's image lives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageRef {
    Path(PathBuf),
    Bytes(Arc<[u8]>),
}

impl ImageRef {
    pub fn path(&self) -> Option<&Path> {
        match self {
            ImageRef::Path(p) => Some(p),
            ImageRef::Bytes(_) => None,
        }
    }

    /// Reads the image. Files are only touched here, so a missing image
    /// surfaces as a per-sample error at run time.
    pub async fn load(&self) -> std::io::Result<Arc<[u8]>> {
        match self {
            ImageRef::Path(p) => tokio::fs::read(p)
                .await
                .map(Arc::from)
                .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", p.display()))),
            ImageRef::Bytes(b) => Ok(Arc::clone(b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub id: String,
    pub image: ImageRef,
    pub gt: GroundTruthLabel,
}

/// Identifier of a question posed to the model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PromptId {
    Emoq0,
    Emoq1,
    Emoq2,
    Emoq3,
    /// Free-form question text, used verbatim.
    Custom(String),
}

impl PromptId {
    pub const NAMED: [PromptId; 4] = [
        PromptId::Emoq0,
        PromptId::Emoq1,
        PromptId::Emoq2,
        PromptId::Emoq3,
    ];

    pub fn is_named(&self) -> bool {
        !matches!(self, PromptId::Custom(_))
    }

    /// Returns the frozen id for `emoq0`..`emoq3`.
    pub fn named(name: &str) -> Option<PromptId> {
        match name.trim().to_ascii_lowercase().as_str() {
            "emoq0" => Some(PromptId::Emoq0),
            "emoq1" => Some(PromptId::Emoq1),
            "emoq2" => Some(PromptId::Emoq2),
            "emoq3" => Some(PromptId::Emoq3),
            _ => None,
        }
    }
}

impl fmt::Display for PromptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PromptId::Emoq0 => f.write_str("emoq0"),
            PromptId::Emoq1 => f.write_str("emoq1"),
            PromptId::Emoq2 => f.write_str("emoq2"),
            PromptId::Emoq3 => f.write_str("emoq3"),
            PromptId::Custom(text) => write!(f, "custom:{text}"),
        }
    }
}

impl FromStr for PromptId {
    type Err = ParseClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(text) = s.strip_prefix("custom:") {
            return Ok(PromptId::Custom(text.to_string()));
        }
        match s {
            "emoq0" => Ok(PromptId::Emoq0),
            "emoq1" => Ok(PromptId::Emoq1),
            "emoq2" => Ok(PromptId::Emoq2),
            "emoq3" => Ok(PromptId::Emoq3),
            other => Err(ParseClassError(other.to_string())),
        }
    }
}

string_serde!(PromptId);
