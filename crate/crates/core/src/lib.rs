//! Zero-shot facial expression recognition with vision-language models.
//!
//! A served model is asked a fixed question about each face image. Its
//! free-text answer is mapped to one of seven basic expressions (or
//! `unknown`) through a synonym lexicon, and the predictions are scored
//! with unweighted and weighted average recall.
//!
//! ```
//! use fer_probe::lexicon::Lexicon;
//! use fer_probe::vocab::{BasicExpression, PredictedClass};
//!
//! let lexicon = Lexicon::builtin();
//! let p = lexicon.map_answer("Grossed out.");
//! assert_eq!(p.class, PredictedClass::Expression(BasicExpression::Disgust));
//! ```

pub mod backend;
pub mod cli;
pub mod datasets;
pub mod lexicon;
pub mod metrics;
pub mod prompting;
pub mod report;
pub mod vocab;

pub use lexicon::{canonicalize, load_lexicon, Lexicon, LexiconSource, Precedence};
pub use metrics::{cross_dataset_mean, ConfusionMatrix, MetricsReport};
pub use prompting::{render_prompt, PromptSpec};
pub use vocab::{BasicExpression, GroundTruthLabel, PredictedClass, Prediction, PromptId, Sample};

/// Compiles the guide's code blocks as doc-tests so the book cannot drift.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/prompts.md")]
    mod prompts {}
    #[doc = include_str!("../../../book/src/lexicon.md")]
    mod lexicon {}
    #[doc = include_str!("../../../book/src/datasets.md")]
    mod datasets {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/running.md")]
    mod running {}
}
