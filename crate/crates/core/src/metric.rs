//! Finite metric spaces and point subsets.
//!
//! A [`FiniteMetricSpace`] is an exact distance matrix over labelled points.
//! Construction always goes through [`FiniteMetricSpace::new`], which checks
//! every metric axiom and reports the first violation with witness indices.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::MetricError;

/// Relative slack allowed in the triangle inequality check.
///
/// Distances read from decimal files or produced by square roots can miss the
/// triangle inequality by an ulp on collinear triples.
pub const TRIANGLE_RELATIVE_SLACK: f64 = 1e-12;

/// A sorted set of point indices of some [`FiniteMetricSpace`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct PointSet(Vec<usize>);

impl PointSet {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        PointSet(members)
    }

    pub fn singleton(point: usize) -> Self {
        PointSet(vec![point])
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, point: usize) -> bool {
        self.0.binary_search(&point).is_ok()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut theirs = other.0.iter();
        'outer: for p in &self.0 {
            for q in theirs.by_ref() {
                match q.cmp(p) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn is_proper_subset(&self, other: &PointSet) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut all = Vec::with_capacity(self.len() + other.len());
        all.extend_from_slice(&self.0);
        all.extend_from_slice(&other.0);
        PointSet::new(all)
    }

    /// Image of the set under a point map.
    pub fn map(&self, f: impl Fn(usize) -> usize) -> PointSet {
        PointSet::new(self.0.iter().map(|&p| f(p)).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        PointSet::new(iter.into_iter().collect())
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// A validated finite metric space: labels plus a symmetric distance matrix.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    dist: Vec<f64>,
    n: usize,
    diam: f64,
    min_pos_dist: f64,
}

impl PartialEq for FiniteMetricSpace {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.dist == other.dist
    }
}

impl FiniteMetricSpace {
    /// Validates a square matrix against the metric axioms.
    ///
    /// Checks run in a fixed order (shape, finiteness, diagonal, sign,
    /// symmetry, distinctness, triangle inequality) and scan indices in
    /// row-major order, so the reported witness is the first violation.
    pub fn new(labels: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let n = labels.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        if matrix.len() != n {
            return Err(MetricError::LabelMismatch {
                labels: n,
                rows: matrix.len(),
            });
        }
        for (row, entries) in matrix.iter().enumerate() {
            if entries.len() != n {
                return Err(MetricError::NotSquare {
                    row,
                    len: entries.len(),
                    expected: n,
                });
            }
        }
        let dist: Vec<f64> = matrix.into_iter().flatten().collect();
        Self::from_flat(labels, dist)
    }

    /// Same as [`FiniteMetricSpace::new`] with a row-major flat matrix.
    pub fn from_flat(labels: Vec<String>, dist: Vec<f64>) -> Result<Self, MetricError> {
        let n = labels.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        if dist.len() != n * n {
            return Err(MetricError::LabelMismatch {
                labels: n,
                rows: dist.len() / n.max(1),
            });
        }
        let mut index = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(MetricError::DuplicateLabel(label.clone()));
            }
        }
        let d = |i: usize, j: usize| dist[i * n + j];

        for i in 0..n {
            for j in 0..n {
                if !d(i, j).is_finite() {
                    return Err(MetricError::NonFinite(i, j));
                }
            }
        }
        for i in 0..n {
            if d(i, i) != 0.0 {
                return Err(MetricError::NonzeroDiagonal(i));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if d(i, j) < 0.0 {
                    return Err(MetricError::NegativeEntry(i, j));
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if d(i, j) != d(j, i) {
                    return Err(MetricError::NotSymmetric(i, j));
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if d(i, j) == 0.0 {
                    return Err(MetricError::DuplicatePoint(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let via = d(i, j) + d(j, k);
                    if d(i, k) > via * (1.0 + TRIANGLE_RELATIVE_SLACK) {
                        return Err(MetricError::TriangleViolation(i, j, k));
                    }
                }
            }
        }

        let mut diam = 0.0f64;
        let mut min_pos_dist = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                diam = diam.max(d(i, j));
                min_pos_dist = min_pos_dist.min(d(i, j));
            }
        }
        Ok(FiniteMetricSpace {
            labels,
            index,
            dist,
            n,
            diam,
            min_pos_dist,
        })
    }

    /// Points in `R^d` under the Minkowski `p`-norm (`p = ∞` allowed).
    pub fn from_points(
        labels: Vec<String>,
        coords: &[Vec<f64>],
        norm: f64,
    ) -> Result<Self, MetricError> {
        if norm.is_nan() || norm < 1.0 {
            return Err(MetricError::InvalidNorm(norm));
        }
        if coords.len() != labels.len() {
            return Err(MetricError::LabelMismatch {
                labels: labels.len(),
                rows: coords.len(),
            });
        }
        let dim = coords.first().map_or(0, Vec::len);
        if let Some(row) = coords.iter().position(|c| c.len() != dim) {
            return Err(MetricError::NotSquare {
                row,
                len: coords[row].len(),
                expected: dim,
            });
        }
        let n = coords.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = minkowski(&coords[i], &coords[j], norm);
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        Self::from_flat(labels, dist)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    /// Smallest distance between distinct points; `+∞` for a singleton.
    pub fn min_pos_dist(&self) -> f64 {
        self.min_pos_dist
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn whole(&self) -> PointSet {
        PointSet((0..self.n).collect())
    }

    /// Closed ball `{z : d(center, z) ≤ radius}`.
    pub fn ball(&self, center: usize, radius: f64) -> PointSet {
        PointSet(
            (0..self.n)
                .filter(|&z| self.d(center, z) <= radius)
                .collect(),
        )
    }

    /// The space with every distance raised to `alpha`.
    pub fn snowflake(&self, alpha: f64) -> Result<Self, MetricError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(MetricError::AlphaOutOfRange(alpha));
        }
        if alpha == 1.0 {
            return Ok(self.clone());
        }
        let dist = self.dist.iter().map(|d| d.powf(alpha)).collect();
        Self::from_flat(self.labels.clone(), dist)
    }

    /// Largest pairwise distance within `set`; 0 for a singleton.
    pub fn subset_diameter(&self, set: &PointSet) -> Result<f64, MetricError> {
        if set.is_empty() {
            return Err(MetricError::EmptySet);
        }
        Ok(self.diameter_of(set.members()))
    }

    /// Diameter of a slice of indices; 0 for slices shorter than two.
    pub fn diameter_of(&self, members: &[usize]) -> f64 {
        let mut best = 0.0f64;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                best = best.max(self.d(i, j));
            }
        }
        best
    }
}

fn minkowski(a: &[f64], b: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
    }
    if p == 2.0 {
        return a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
    }
    if p == 1.0 {
        return a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Point labels `p0, p1, …`.
pub fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}
