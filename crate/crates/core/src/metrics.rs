//! Confusion matrices and recall-based scores (per-class recall, UAR, WAR).
//!
//! Rows are ground-truth classes taken from the dataset vocabulary; columns
//! are the eight prediction classes in canonical order. A ground-truth row
//! whose token equals an expression name (case-insensitively) has its true
//! positives in that expression's column. Rows without such a column (for
//! example `contempt`) can never score a true positive.
//!
//! UAR is the unweighted mean of per-class recall over classes that have at
//! least one sample. WAR weights each recall by its class share, which
//! collapses to `diagonal / N_total`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vocab::{
    canonical_class_order, GroundTruthLabel, PredictedClass, NUM_PREDICTED_CLASSES,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("ground-truth label {0:?} is not one of the matrix classes")]
    UnknownGroundTruth(String),
    #[error("duplicate ground-truth class {0:?}")]
    DuplicateClass(String),
    #[error("metric undefined: {0}")]
    Undefined(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    gt_classes: Vec<GroundTruthLabel>,
    counts: Vec<[u64; NUM_PREDICTED_CLASSES]>,
}

impl ConfusionMatrix {
    pub fn new(gt_classes: Vec<GroundTruthLabel>) -> Result<Self, MetricsError> {
        let mut seen = BTreeSet::new();
        for g in &gt_classes {
            if !seen.insert(g.as_str()) {
                return Err(MetricsError::DuplicateClass(g.to_string()));
            }
        }
        let counts = vec![[0; NUM_PREDICTED_CLASSES]; gt_classes.len()];
        Ok(ConfusionMatrix { gt_classes, counts })
    }

    /// Builds a matrix from `(ground truth, prediction)` pairs.
    pub fn accumulate<G, I>(
        gt_classes: Vec<GroundTruthLabel>,
        pairs: I,
    ) -> Result<Self, MetricsError>
    where
        G: AsRef<str>,
        I: IntoIterator<Item = (G, PredictedClass)>,
    {
        let mut cm = ConfusionMatrix::new(gt_classes)?;
        for (gt, pred) in pairs {
            cm.record(gt.as_ref(), pred)?;
        }
        Ok(cm)
    }

    pub fn record(&mut self, gt: &str, pred: PredictedClass) -> Result<(), MetricsError> {
        let row = self
            .row_index(gt)
            .ok_or_else(|| MetricsError::UnknownGroundTruth(gt.to_string()))?;
        self.counts[row][pred.index()] += 1;
        Ok(())
    }

    fn row_index(&self, gt: &str) -> Option<usize> {
        let gt = GroundTruthLabel::new(gt);
        self.gt_classes.iter().position(|g| *g == gt)
    }

    pub fn gt_classes(&self) -> &[GroundTruthLabel] {
        &self.gt_classes
    }

    pub fn pred_classes(&self) -> [PredictedClass; NUM_PREDICTED_CLASSES] {
        canonical_class_order()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&GroundTruthLabel, &[u64; NUM_PREDICTED_CLASSES])> {
        self.gt_classes.iter().zip(&self.counts)
    }

    pub fn count(&self, gt: &str, pred: PredictedClass) -> u64 {
        self.row_index(gt)
            .map_or(0, |r| self.counts[r][pred.index()])
    }

    /// `N_i`: number of samples whose ground truth is `gt`.
    pub fn row_total(&self, gt: &str) -> u64 {
        self.row_index(gt)
            .map_or(0, |r| self.counts[r].iter().sum())
    }

    pub fn n_total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Count of samples predicted `Unknown`.
    pub fn unknown_total(&self) -> u64 {
        self.counts
            .iter()
            .map(|r| r[PredictedClass::Unknown.index()])
            .sum()
    }

    fn true_positives_at(&self, row: usize) -> u64 {
        match self.gt_classes[row].aligned_expression() {
            Some(e) => self.counts[row][e.index()],
            None => 0,
        }
    }

    pub fn true_positives(&self, gt: &str) -> u64 {
        self.row_index(gt).map_or(0, |r| self.true_positives_at(r))
    }

    /// Sum of diagonal-aligned entries.
    pub fn trace(&self) -> u64 {
        (0..self.gt_classes.len())
            .map(|r| self.true_positives_at(r))
            .sum()
    }

    /// `TP / N` for one class; `None` when the class has no samples (or is
    /// not a row of this matrix).
    pub fn recall(&self, gt: &str) -> Option<f64> {
        let row = self.row_index(gt)?;
        let n: u64 = self.counts[row].iter().sum();
        (n > 0).then(|| self.true_positives_at(row) as f64 / n as f64)
    }

    /// Unweighted average recall over non-empty classes.
    pub fn uar(&self) -> Result<f64, MetricsError> {
        let recalls: Vec<f64> = self
            .gt_classes
            .iter()
            .filter_map(|g| self.recall(g.as_str()))
            .collect();
        if recalls.is_empty() {
            return Err(MetricsError::Undefined(
                "UAR needs at least one non-empty class",
            ));
        }
        Ok(recalls.iter().sum::<f64>() / recalls.len() as f64)
    }

    /// Weighted average recall, equal to micro-accuracy.
    pub fn war(&self) -> Result<f64, MetricsError> {
        let n = self.n_total();
        if n == 0 {
            return Err(MetricsError::Undefined(
                "WAR needs at least one scored sample",
            ));
        }
        Ok(self.trace() as f64 / n as f64)
    }

    /// CSV with a header of prediction classes and one row per GT class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gt");
        for p in canonical_class_order() {
            out.push(',');
            out.push_str(p.name());
        }
        out.push('\n');
        for (g, row) in self.rows() {
            out.push_str(g.as_str());
            for c in row {
                out.push(',');
                out.push_str(&c.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Scores for one (model, prompt, dataset) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Recall per non-empty GT class, in matrix row order.
    pub per_class_recall: Vec<(GroundTruthLabel, f64)>,
    pub uar: f64,
    pub war: f64,
    pub n_total: u64,
    /// GT classes with no scored samples; left out of the UAR mean.
    pub excluded_classes: Vec<GroundTruthLabel>,
}

impl MetricsReport {
    pub fn from_matrix(cm: &ConfusionMatrix) -> Result<Self, MetricsError> {
        let mut per_class_recall = Vec::new();
        let mut excluded_classes = Vec::new();
        for g in cm.gt_classes() {
            match cm.recall(g.as_str()) {
                Some(r) => per_class_recall.push((g.clone(), r)),
                None => excluded_classes.push(g.clone()),
            }
        }
        Ok(MetricsReport {
            per_class_recall,
            uar: cm.uar()?,
            war: cm.war()?,
            n_total: cm.n_total(),
            excluded_classes,
        })
    }
}

/// Anything carrying a WAR/UAR pair.
pub trait AverageRecall {
    fn war(&self) -> f64;
    fn uar(&self) -> f64;
}

impl AverageRecall for MetricsReport {
    fn war(&self) -> f64 {
        self.war
    }
    fn uar(&self) -> f64 {
        self.uar
    }
}

/// A bare WAR/UAR pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub war: f64,
    pub uar: f64,
}

impl AverageRecall for Scores {
    fn war(&self) -> f64 {
        self.war
    }
    fn uar(&self) -> f64 {
        self.uar
    }
}

/// Unweighted mean of WAR and of UAR across datasets.
pub fn cross_dataset_mean<T: AverageRecall>(reports: &[T]) -> Result<Scores, MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::Undefined("mean over zero datasets"));
    }
    let n = reports.len() as f64;
    Ok(Scores {
        war: reports.iter().map(AverageRecall::war).sum::<f64>() / n,
        uar: reports.iter().map(AverageRecall::uar).sum::<f64>() / n,
    })
}

/// Rounds half-up to two decimals, as printed in reports.
///
/// Values are nudged by 1e-9 first so that binary representations of
/// decimal halves (0.285 is stored as 0.28499…) round up.
pub fn round_2dp(x: f64) -> f64 {
    (x * 100.0 + 0.5 + 1e-9).floor() / 100.0
}

pub fn format_2dp(x: f64) -> String {
    format!("{:.2}", round_2dp(x))
}
