use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Counts after the first `cursor` work items.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub cursor: u64,
    pub items: u64,
    pub counts: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    /// Height bound or box size, in decimal.
    pub bound: String,
    pub items: u64,
    pub counts: BTreeMap<String, u64>,
    /// Derived quantities (ratios, densities, intervals) as decimal strings.
    pub derived: BTreeMap<String, String>,
    pub checkpoints: Vec<Checkpoint>,
    pub elapsed_ms: u128,
}

impl CountReport {
    pub fn new(bound: impl ToString) -> Self {
        CountReport {
            bound: bound.to_string(),
            items: 0,
            counts: BTreeMap::new(),
            derived: BTreeMap::new(),
            checkpoints: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// Adds the counts of `other`; the monoid used to merge chunks.
    pub fn absorb(&mut self, other: &BTreeMap<String, u64>, items: u64) {
        for (k, v) in other {
            *self.counts.entry(k.clone()).or_insert(0) += v;
        }
        self.items += items;
    }

    /// The report without timing, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        CountReport { elapsed_ms: 0, ..self.clone() }
    }
}

/// Items between checkpoints in long scans.
pub const CHECKPOINT_INTERVAL: u64 = 1_000_000;

/// Folds per-unit counts in order, recording a checkpoint each time the running
/// item total crosses a multiple of `CHECKPOINT_INTERVAL`.
/// Each unit carries its counts, its item count and the cursor after it.
pub(crate) fn fold_units(report: &mut CountReport, units: impl IntoIterator<Item = (BTreeMap<String, u64>, u64, u64)>) {
    for (counts, items, cursor) in units {
        let before = report.items / CHECKPOINT_INTERVAL;
        report.absorb(&counts, items);
        if report.items / CHECKPOINT_INTERVAL > before {
            report.checkpoints.push(Checkpoint { cursor, items: report.items, counts: report.counts.clone() });
        }
    }
}
