//! Inequality trial reports: per-trial rows, aggregates, and pass logic.

use serde::{Deserialize, Serialize};

/// One trial of an inequality check.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrialRow {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub seed: u64,
    pub scale: f64,
    pub resolution: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TrialRow {
    pub fn new(lhs: f64, rhs: f64, ratio: f64) -> Self {
        TrialRow {
            lhs,
            rhs,
            ratio,
            seed: 0,
            scale: 1.0,
            resolution: 0,
            note: None,
        }
    }

    pub fn with_context(mut self, seed: u64, scale: f64, resolution: usize) -> Self {
        self.seed = seed;
        self.scale = scale;
        self.resolution = resolution;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Stability thresholds a report is judged against. Unset fields do not
/// constrain the verdict.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct Thresholds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<f64>,
    /// Largest allowed spread max/min of ratios within a seed group
    /// (i.e. across scales and resolutions of the same configuration).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_drift: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Aggregate {
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Max over seed groups of (max ratio / min ratio) within the group,
    /// groups with a vanishing ratio excluded.
    pub drift: f64,
}

/// Outcome of one inequality scenario: rows, aggregate, and a pass flag that
/// is a pure function of the rows and thresholds.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InequalityReport {
    pub name: String,
    #[serde(default)]
    pub config: serde_json::Value,
    pub rows: Vec<TrialRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    pub aggregate: Aggregate,
    pub thresholds: Thresholds,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl InequalityReport {
    /// Assemble a report from trial rows, computing the aggregate and verdict.
    pub fn assemble(
        name: impl Into<String>,
        config: serde_json::Value,
        rows: Vec<TrialRow>,
        errors: Vec<String>,
        thresholds: Thresholds,
    ) -> Self {
        let aggregate = Self::aggregate(&rows);
        let mut warning = None;
        let pass = if rows.is_empty() {
            warning = Some("no trials executed; vacuous pass".into());
            errors.is_empty()
        } else {
            let ratio_ok = thresholds
                .max_ratio
                .map_or(true, |t| aggregate.max_ratio <= t);
            let drift_ok = thresholds.max_drift.map_or(true, |t| aggregate.drift <= t);
            ratio_ok && drift_ok && errors.is_empty()
        };
        InequalityReport {
            name: name.into(),
            config,
            rows,
            errors,
            aggregate,
            thresholds,
            pass,
            warning,
        }
    }

    /// Single-row convenience for direct inequality evaluations.
    pub fn single(name: impl Into<String>, config: serde_json::Value, row: TrialRow) -> Self {
        Self::assemble(name, config, vec![row], Vec::new(), Thresholds::default())
    }

    fn aggregate(rows: &[TrialRow]) -> Aggregate {
        let mut max_ratio = 0.0f64;
        let mut min_ratio = f64::INFINITY;
        for r in rows {
            max_ratio = max_ratio.max(r.ratio);
            min_ratio = min_ratio.min(r.ratio);
        }
        if rows.is_empty() {
            min_ratio = 0.0;
        }
        // Group by seed; spread of ratios within a group measures drift
        // across scales/resolutions of one configuration.
        let mut groups: std::collections::BTreeMap<u64, (f64, f64)> =
            std::collections::BTreeMap::new();
        for r in rows {
            let e = groups.entry(r.seed).or_insert((f64::INFINITY, 0.0));
            e.0 = e.0.min(r.ratio);
            e.1 = e.1.max(r.ratio);
        }
        let mut drift = 1.0f64;
        for (_, (lo, hi)) in groups {
            if lo > 0.0 {
                drift = drift.max(hi / lo);
            }
        }
        Aggregate {
            max_ratio,
            min_ratio,
            drift,
        }
    }
}
