//! Synonym lexicon: canonicalizes free-text answers and maps them onto the
//! basic expressions, falling back to `Unknown`.
//!
//! The lexicon file is line oriented and mirrors a two-column table:
//!
//! ```text
//! # comment
//! Happiness: happy, smiling, slight smile
//! Sadness: sad, crying
//! ```
//!
//! Answers are matched with a fixed ladder, first hit wins:
//!
//! 1. the whole canonicalized answer is a key;
//! 2. the first whitespace token is a key;
//! 3. the longest key occurring as a whole-word substring;
//! 4. otherwise `Unknown`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vocab::{BasicExpression, Prediction};

const BUILTIN: &str = include_str!("../data/builtin_lexicon.txt");

const QUOTES: &[char] = &[
    '"', '\'', '`', '\u{2018}', '\u{2019}', '\u{201c}', '\u{201d}',
];
const SENTENCE_END: &[char] = &['.', '!', '?'];

/// Lowercases, collapses internal whitespace, trims, and strips trailing
/// sentence punctuation and surrounding quotes. Idempotent.
pub fn canonicalize(raw: &str) -> String {
    let lower = raw.to_lowercase();
    let collapsed = lower.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut s = collapsed.as_str();
    loop {
        let next = s.trim().trim_end_matches(SENTENCE_END).trim_matches(QUOTES);
        if next.len() == s.len() {
            break;
        }
        s = next;
    }
    s.to_string()
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },
    #[error(
        "{origin}:{line}: {synonym:?} is the name of {owner} and cannot be mapped to {claimed}"
    )]
    SelfNameReassigned {
        origin: String,
        line: usize,
        synonym: String,
        owner: BasicExpression,
        claimed: BasicExpression,
    },
    #[error("invalid precedence: {0}")]
    Precedence(String),
    #[error("reading lexicon {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Where a lexicon came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LexiconSource {
    BuiltIn,
    File(PathBuf),
}

impl std::fmt::Display for LexiconSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LexiconSource::BuiltIn => f.write_str("built-in"),
            LexiconSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Order in which duplicate synonyms are awarded: the earliest claimant wins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BasicExpression>", into = "Vec<BasicExpression>")]
pub struct Precedence(Vec<BasicExpression>);

impl Precedence {
    pub fn new(order: Vec<BasicExpression>) -> Result<Self, LexiconError> {
        let unique: BTreeSet<_> = order.iter().copied().collect();
        if order.len() != BasicExpression::ALL.len() || unique.len() != order.len() {
            return Err(LexiconError::Precedence(format!(
                "expected each of the 7 expressions exactly once, got [{}]",
                order
                    .iter()
                    .map(|e| e.name())
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        Ok(Precedence(order))
    }

    pub fn as_slice(&self) -> &[BasicExpression] {
        &self.0
    }

    fn rank(&self, e: BasicExpression) -> usize {
        self.0.iter().position(|&x| x == e).unwrap_or(usize::MAX)
    }
}

impl Default for Precedence {
    /// Neutral last, so "slightly surprised" resolves to Surprise.
    fn default() -> Self {
        use BasicExpression::*;
        Precedence(vec![
            Surprise, Anger, Disgust, Fear, Happiness, Sadness, Neutral,
        ])
    }
}

impl TryFrom<Vec<BasicExpression>> for Precedence {
    type Error = LexiconError;

    fn try_from(v: Vec<BasicExpression>) -> Result<Self, Self::Error> {
        Precedence::new(v)
    }
}

impl From<Precedence> for Vec<BasicExpression> {
    fn from(p: Precedence) -> Self {
        p.0
    }
}

/// A synonym claimed by more than one expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LexiconConflict {
    pub synonym: String,
    pub claimants: BTreeSet<BasicExpression>,
    pub resolution: BasicExpression,
}

/// Validated synonym → expression mapping. Immutable after load.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: BTreeMap<String, BasicExpression>,
    precedence: Precedence,
    source: LexiconSource,
}

/// Loads the built-in table or a lexicon file and resolves duplicates.
pub fn load_lexicon(
    source: &LexiconSource,
    precedence: &Precedence,
) -> Result<(Lexicon, Vec<LexiconConflict>), LexiconError> {
    match source {
        LexiconSource::BuiltIn => Lexicon::parse(BUILTIN, source.clone(), precedence),
        LexiconSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
                path: path.clone(),
                source,
            })?;
            Lexicon::parse(&text, LexiconSource::File(path.clone()), precedence)
        }
    }
}

impl Lexicon {
    /// Built-in table with the default precedence.
    pub fn builtin() -> Lexicon {
        load_lexicon(&LexiconSource::BuiltIn, &Precedence::default())
            .expect("built-in lexicon is valid")
            .0
    }

    pub fn from_file(
        path: &Path,
        precedence: &Precedence,
    ) -> Result<(Lexicon, Vec<LexiconConflict>), LexiconError> {
        load_lexicon(&LexiconSource::File(path.to_path_buf()), precedence)
    }

    /// Parses lexicon text. `source` only labels errors and provenance.
    pub fn parse(
        text: &str,
        source: LexiconSource,
        precedence: &Precedence,
    ) -> Result<(Lexicon, Vec<LexiconConflict>), LexiconError> {
        let origin = source.to_string();
        let mut claims: BTreeMap<String, BTreeSet<BasicExpression>> = BTreeMap::new();

        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| LexiconError::Parse {
                origin: origin.clone(),
                line: line_no,
                message,
            };
            let (head, tail) = line
                .split_once(':')
                .ok_or_else(|| parse_err("expected `expression: synonym, ...`".into()))?;
            let expression = BasicExpression::from_name(head)
                .ok_or_else(|| parse_err(format!("unknown expression {:?}", head.trim())))?;
            for raw in tail.split(',') {
                let synonym = canonicalize(raw);
                if synonym.is_empty() {
                    continue;
                }
                if let Some(owner) = BasicExpression::from_name(&synonym) {
                    if owner != expression {
                        return Err(LexiconError::SelfNameReassigned {
                            origin: origin.clone(),
                            line: line_no,
                            synonym,
                            owner,
                            claimed: expression,
                        });
                    }
                }
                claims.entry(synonym).or_default().insert(expression);
            }
        }

        for e in BasicExpression::ALL {
            claims.entry(e.name().to_string()).or_default().insert(e);
        }

        let mut entries = BTreeMap::new();
        let mut conflicts = Vec::new();
        for (synonym, claimants) in claims {
            let resolution = *claimants
                .iter()
                .min_by_key(|e| precedence.rank(**e))
                .expect("claimant set is never empty");
            if claimants.len() > 1 {
                conflicts.push(LexiconConflict {
                    synonym: synonym.clone(),
                    claimants,
                    resolution,
                });
            }
            entries.insert(synonym, resolution);
        }

        let lexicon = Lexicon {
            entries,
            precedence: precedence.clone(),
            source,
        };
        Ok((lexicon, conflicts))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, synonym: &str) -> Option<BasicExpression> {
        self.entries.get(synonym).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, BasicExpression)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn precedence(&self) -> &Precedence {
        &self.precedence
    }

    pub fn source(&self) -> &LexiconSource {
        &self.source
    }

    /// Maps a raw answer to a prediction. Total: never fails.
    pub fn map_answer(&self, raw: &str) -> Prediction {
        let canon = canonicalize(raw);
        if canon.is_empty() {
            return Prediction::unknown(raw);
        }
        if let Some(e) = self.get(&canon) {
            return Prediction::matched(e, raw, canon);
        }
        if let Some(first) = canon.split(' ').next() {
            if first.len() < canon.len() {
                if let Some(e) = self.get(first) {
                    return Prediction::matched(e, raw, first);
                }
            }
        }
        match self.longest_whole_word_key(&canon) {
            Some((key, e)) => Prediction::matched(e, raw, key),
            None => Prediction::unknown(raw),
        }
    }

    fn longest_whole_word_key(&self, text: &str) -> Option<(&str, BasicExpression)> {
        // (char length, byte position, key); longer wins, then earlier, then key order.
        let mut best: Option<(usize, usize, &str, BasicExpression)> = None;
        for (key, &e) in &self.entries {
            let Some(pos) = whole_word_find(text, key) else {
                continue;
            };
            let len = key.chars().count();
            let better = match best {
                None => true,
                Some((blen, bpos, _, _)) => len > blen || (len == blen && pos < bpos),
            };
            if better {
                best = Some((len, pos, key.as_str(), e));
            }
        }
        best.map(|(_, _, key, e)| (key, e))
    }

    /// Renders the resolved mapping in lexicon-file format. Reloading the
    /// output yields the same mapping with no conflicts.
    pub fn to_file_format(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# resolved lexicon ({})", self.source);
        for e in BasicExpression::ALL {
            let syns: Vec<&str> = self
                .entries
                .iter()
                .filter(|(_, v)| **v == e)
                .map(|(k, _)| k.as_str())
                .collect();
            let _ = writeln!(out, "{}: {}", e.name(), syns.join(", "));
        }
        out
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Byte offset of the first occurrence of `needle` in `haystack` bounded by
/// non-word characters (or the string ends) on both sides.
fn whole_word_find(haystack: &str, needle: &str) -> Option<usize> {
    if needle.is_empty() {
        return None;
    }
    haystack.match_indices(needle).map(|(i, _)| i).find(|&i| {
        let before_ok = haystack[..i]
            .chars()
            .next_back()
            .is_none_or(|c| !is_word_char(c));
        let after_ok = haystack[i + needle.len()..]
            .chars()
            .next()
            .is_none_or(|c| !is_word_char(c));
        before_ok && after_ok
    })
}
