use serde::{Deserialize, Serialize};

use crate::approx::VertexId;
use crate::metric::PointSet;

/// Ratios within this relative slack of their bound count as satisfied.
///
/// Checks whose bound is attained exactly in real arithmetic (snowflake maps
/// against their own exponent, say) land an ulp either side of 1 in floating
/// point.
pub const RATIO_SLACK: f64 = 1e-12;

/// The point configuration at which a check attained its worst value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Points `x, a, b` of a distance-ratio comparison.
    Triple { x: usize, a: usize, b: usize },
    /// Nested sets `inner ⊆ outer`.
    SetPair { inner: PointSet, outer: PointSet },
    /// A target-space set together with its preimage diameter.
    Preimage { set: PointSet },
    /// A source point and a source vertex.
    PointVertex { point: usize, vertex: VertexId },
    /// Source vertices involved in a graph-level check.
    Vertices { vertices: Vec<VertexId> },
}

/// Outcome of an exhaustive sweep.
///
/// `worst_ratio` is the largest value of checked-quantity / bound seen, so a
/// sweep passes when it is at most 1 (up to [`RATIO_SLACK`]). Re-evaluating
/// the quantity at `witness` reproduces `worst_ratio`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub passed: bool,
    pub worst_ratio: f64,
    pub witness: Option<Witness>,
    pub checked: usize,
    pub violations: usize,
}

impl ViolationReport {
    pub(crate) fn empty() -> Self {
        ViolationReport {
            passed: true,
            worst_ratio: 0.0,
            witness: None,
            checked: 0,
            violations: 0,
        }
    }

    /// Folds in one observation; ties keep the earlier witness.
    pub(crate) fn observe(&mut self, ratio: f64, witness: impl FnOnce() -> Witness) {
        self.observe_with(ratio, exceeds(ratio), witness);
    }

    /// Like [`observe`](Self::observe) with the pass/fail decision made by
    /// the caller, for checks that are exact set relations.
    pub(crate) fn observe_with(
        &mut self,
        ratio: f64,
        violated: bool,
        witness: impl FnOnce() -> Witness,
    ) {
        self.checked += 1;
        if violated {
            self.violations += 1;
            self.passed = false;
        }
        if ratio > self.worst_ratio || self.witness.is_none() {
            self.worst_ratio = ratio;
            self.witness = Some(witness());
        }
    }
}

/// `ratio > 1` beyond the rounding slack.
pub fn exceeds(ratio: f64) -> bool {
    ratio > 1.0 + RATIO_SLACK || ratio.is_nan()
}

impl ViolationReport {
    /// Combines sweeps over disjoint parts; on equal worst ratios the
    /// receiver (the earlier part) keeps its witness.
    pub(crate) fn merge(mut self, later: ViolationReport) -> ViolationReport {
        self.checked += later.checked;
        self.violations += later.violations;
        self.passed &= later.passed;
        if later.witness.is_some()
            && (self.witness.is_none() || later.worst_ratio > self.worst_ratio)
        {
            self.worst_ratio = later.worst_ratio;
            self.witness = later.witness;
        }
        self
    }
}
