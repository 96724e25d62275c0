//! Truncated hyperbolic approximation graphs of finite metric spaces.
//!
//! Level `k` holds one vertex per distinct ball `B(v) = {z : d(v, z) ≤ 2r^k}`
//! centered at a maximal `r^k`-separated net point `v`. Same-level vertices
//! are joined when their balls share a point (horizontal edges); vertices on
//! neighbouring levels are joined when the upper ball is contained in the
//! lower one (radial edges). Levels run from the truncation level `k₀` up to
//! a ceiling `k_max` at which every ball is a singleton.

mod geodesic;
pub mod lemmas;
mod structure;

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ApproxError;
use crate::metric::{FiniteMetricSpace, PointSet};

pub use geodesic::{check_geodesic_normal_form, NormalFormReport};
pub use structure::{GeodesicPath, TieBreak};

/// Dense vertex index into an [`ApproximationGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Rule deciding horizontal adjacency within a level.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeRule {
    /// Closed balls share at least one point of the space.
    #[default]
    Pointset,
    /// Centers are within `4r^k` of each other.
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Horizontal,
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: VertexId,
    pub level: i32,
    /// Net point the ball is centered at; the lowest index among identified centers.
    pub center: usize,
    pub ball: PointSet,
    /// `2r^level`
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    pub edge_rule: EdgeRule,
    /// Overrides the default ceiling; any value `≥ k₀` is accepted.
    pub k_max: Option<i32>,
}

/// `r^k` with integer exponent. Every scale in the crate goes through here so
/// that thresholds compare bit-identically.
///
/// Computed by explicit multiplication: `powi` may be constant-folded with a
/// different rounding than its runtime call, which breaks exact comparisons.
pub fn level_scale(r: f64, k: i32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..k.unsigned_abs() {
        acc *= r;
    }
    if k < 0 {
        1.0 / acc
    } else {
        acc
    }
}

pub fn check_parameter(r: f64) -> Result<(), ApproxError> {
    if r > 0.0 && r <= 1.0 / 6.0 {
        Ok(())
    } else {
        Err(ApproxError::InvalidParameter(format!(
            "r = {r} must lie in (0, 1/6]"
        )))
    }
}

/// Maximal `a`-separated subset chosen greedily in index order.
pub fn greedy_separated_net(space: &FiniteMetricSpace, a: f64) -> PointSet {
    let mut chosen: Vec<usize> = Vec::new();
    for z in 0..space.len() {
        if chosen.iter().all(|&s| space.d(s, z) >= a) {
            chosen.push(z);
        }
    }
    PointSet::new(chosen)
}

/// Largest integer `k` with `diam Z < r^k`.
pub fn truncation_level(space: &FiniteMetricSpace, r: f64) -> Result<i32, ApproxError> {
    check_parameter(r)?;
    if space.len() < 2 {
        return Err(ApproxError::DegenerateSpace);
    }
    let diam = space.diam();
    // r^k decreases in k, so diam < r^k iff k < ln(diam) / ln(r).
    let mut k = (diam.ln() / r.ln()).ceil() as i32 - 1;
    while diam >= level_scale(r, k) {
        k -= 1;
    }
    while diam < level_scale(r, k + 1) {
        k += 1;
    }
    Ok(k)
}

/// Smallest `k ≥ k₀` with `2r^k < min_pos_dist`; every ball at that level is a singleton.
pub fn singleton_level(space: &FiniteMetricSpace, r: f64, k0: i32) -> i32 {
    let mut k = k0;
    while 2.0 * level_scale(r, k) >= space.min_pos_dist() {
        k += 1;
    }
    k
}

/// All-pairs hop distances.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    n: usize,
    hops: Vec<u32>,
}

impl DistanceTable {
    #[inline]
    pub fn get(&self, u: VertexId, v: VertexId) -> u32 {
        self.hops[u.0 * self.n + v.0]
    }

    pub fn row(&self, u: VertexId) -> &[u32] {
        &self.hops[u.0 * self.n..(u.0 + 1) * self.n]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// The truncated hyperbolic approximation of a finite metric space.
#[derive(Debug)]
pub struct ApproximationGraph {
    space: FiniteMetricSpace,
    r: f64,
    edge_rule: EdgeRule,
    k_min: i32,
    k_max: i32,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    neighbors: Vec<Vec<VertexId>>,
    horizontal: Vec<Vec<VertexId>>,
    children: Vec<Vec<VertexId>>,
    parents: Vec<Vec<VertexId>>,
    levels: Vec<Vec<VertexId>>,
    /// Vertices reachable by level-increasing radial paths (reflexive).
    descendants: Vec<FixedBitSet>,
    distances: OnceLock<DistanceTable>,
}

impl Clone for ApproximationGraph {
    fn clone(&self) -> Self {
        ApproximationGraph {
            space: self.space.clone(),
            r: self.r,
            edge_rule: self.edge_rule,
            k_min: self.k_min,
            k_max: self.k_max,
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            neighbors: self.neighbors.clone(),
            horizontal: self.horizontal.clone(),
            children: self.children.clone(),
            parents: self.parents.clone(),
            levels: self.levels.clone(),
            descendants: self.descendants.clone(),
            distances: OnceLock::new(),
        }
    }
}

/// Builds the truncated approximation with default options.
pub fn build_approximation(
    space: &FiniteMetricSpace,
    r: f64,
) -> Result<ApproximationGraph, ApproxError> {
    ApproximationGraph::build(space, r, BuildOptions::default())
}

impl ApproximationGraph {
    pub fn build(
        space: &FiniteMetricSpace,
        r: f64,
        options: BuildOptions,
    ) -> Result<Self, ApproxError> {
        check_parameter(r)?;
        let k_min = truncation_level(space, r)?;
        let k_max = match options.k_max {
            Some(k) if k < k_min => {
                return Err(ApproxError::InvalidParameter(format!(
                    "k_max = {k} is below the truncation level {k_min}"
                )))
            }
            Some(k) => k,
            None => singleton_level(space, r, k_min),
        };

        let mut vertices: Vec<Vertex> = Vec::new();
        let mut levels: Vec<Vec<VertexId>> = Vec::new();
        for k in k_min..=k_max {
            let radius = 2.0 * level_scale(r, k);
            let net = greedy_separated_net(space, level_scale(r, k));
            let mut ids: Vec<VertexId> = Vec::new();
            for center in net.iter() {
                let ball = space.ball(center, radius);
                // Net points come in index order, so the first center seen for
                // a ball is its lowest-index representative.
                if ids.iter().any(|id| vertices[id.0].ball == ball) {
                    continue;
                }
                let id = VertexId(vertices.len());
                vertices.push(Vertex {
                    id,
                    level: k,
                    center,
                    ball,
                    radius,
                });
                ids.push(id);
            }
            levels.push(ids);
        }

        let n = vertices.len();
        let mut edges = Vec::new();
        let mut horizontal = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut parents = vec![Vec::new(); n];
        for (li, ids) in levels.iter().enumerate() {
            let k = k_min + li as i32;
            for (a, &u) in ids.iter().enumerate() {
                for &v in &ids[a + 1..] {
                    let (bu, bv) = (&vertices[u.0], &vertices[v.0]);
                    let joined = match options.edge_rule {
                        EdgeRule::Pointset => bu.ball.intersects(&bv.ball),
                        EdgeRule::Distance => {
                            space.d(bu.center, bv.center) <= 4.0 * level_scale(r, k)
                        }
                    };
                    if joined {
                        edges.push(Edge {
                            u,
                            v,
                            kind: EdgeKind::Horizontal,
                        });
                        horizontal[u.0].push(v);
                        horizontal[v.0].push(u);
                    }
                }
            }
            if let Some(upper) = levels.get(li + 1) {
                for &u in ids {
                    for &v in upper {
                        if vertices[v.0].ball.is_subset(&vertices[u.0].ball) {
                            edges.push(Edge {
                                u,
                                v,
                                kind: EdgeKind::Radial,
                            });
                            children[u.0].push(v);
                            parents[v.0].push(u);
                        }
                    }
                }
            }
        }

        let mut neighbors = vec![Vec::new(); n];
        for i in 0..n {
            let mut all: Vec<VertexId> = horizontal[i]
                .iter()
                .chain(&children[i])
                .chain(&parents[i])
                .copied()
                .collect();
            all.sort_unstable();
            neighbors[i] = all;
            horizontal[i].sort_unstable();
        }

        let mut descendants = vec![FixedBitSet::with_capacity(n); n];
        for ids in levels.iter().rev() {
            for &u in ids {
                let mut set = FixedBitSet::with_capacity(n);
                set.insert(u.0);
                for c in &children[u.0] {
                    set.union_with(&descendants[c.0]);
                }
                descendants[u.0] = set;
            }
        }

        Ok(ApproximationGraph {
            space: space.clone(),
            r,
            edge_rule: options.edge_rule,
            k_min,
            k_max,
            vertices,
            edges,
            neighbors,
            horizontal,
            children,
            parents,
            levels,
            descendants,
            distances: OnceLock::new(),
        })
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn edge_rule(&self) -> EdgeRule {
        self.edge_rule
    }

    pub fn k_min(&self) -> i32 {
        self.k_min
    }

    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.0]
    }

    pub fn vertex_ids(&self) -> impl ExactSizeIterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), ApproxError> {
        if v.0 < self.vertices.len() {
            Ok(())
        } else {
            Err(ApproxError::InvalidVertex(v.0))
        }
    }

    pub fn level(&self, v: VertexId) -> i32 {
        self.vertices[v.0].level
    }

    pub fn ball(&self, v: VertexId) -> &PointSet {
        &self.vertices[v.0].ball
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[v.0]
    }

    pub fn horizontal_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.horizontal[v.0]
    }

    /// Radial neighbours one level up, in id order.
    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v.0]
    }

    /// Radial neighbours one level down, in id order.
    pub fn parents(&self, v: VertexId) -> &[VertexId] {
        &self.parents[v.0]
    }

    pub fn level_vertices(&self, k: i32) -> &[VertexId] {
        if k < self.k_min || k > self.k_max {
            return &[];
        }
        &self.levels[(k - self.k_min) as usize]
    }

    pub fn root(&self) -> VertexId {
        self.levels[0][0]
    }

    pub fn descendants(&self, v: VertexId) -> &FixedBitSet {
        &self.descendants[v.0]
    }

    /// True when a level-monotone radial path runs from `low` up to `high`.
    pub fn is_radial_ancestor(&self, low: VertexId, high: VertexId) -> bool {
        self.descendants[low.0].contains(high.0)
    }

    /// Joined by a radial geodesic in either direction.
    pub fn radially_joined(&self, a: VertexId, b: VertexId) -> bool {
        self.is_radial_ancestor(a, b) || self.is_radial_ancestor(b, a)
    }

    pub fn are_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors[u.0].binary_search(&v).is_ok()
    }

    pub fn is_horizontal_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.horizontal[u.0].binary_search(&v).is_ok()
    }

    /// Hop distances from one vertex.
    pub fn bfs(&self, source: VertexId) -> Vec<u32> {
        bfs_from(&self.neighbors, &[source])
    }

    /// Hop distance from the nearest vertex of `sources`.
    pub fn multi_source_bfs(&self, sources: &[VertexId]) -> Vec<u32> {
        bfs_from(&self.neighbors, sources)
    }

    /// All-pairs hop distances, computed on first use.
    pub fn distances(&self) -> &DistanceTable {
        self.distances.get_or_init(|| {
            let n = self.vertices.len();
            let rows: Vec<Vec<u32>> = (0..n)
                .into_par_iter()
                .map(|s| self.bfs(VertexId(s)))
                .collect();
            DistanceTable {
                n,
                hops: rows.into_iter().flatten().collect(),
            }
        })
    }

    pub fn graph_distance(&self, u: VertexId, v: VertexId) -> u32 {
        self.distances().get(u, v)
    }

    pub fn is_connected(&self) -> bool {
        self.bfs(self.root()).iter().all(|&d| d != u32::MAX)
    }

    /// Vertices whose ball is `B(v)` at the same level, used for identification checks.
    pub fn find_ball(&self, level: i32, ball: &PointSet) -> Option<VertexId> {
        self.level_vertices(level)
            .iter()
            .copied()
            .find(|&u| self.ball(u) == ball)
    }
}

fn bfs_from(neighbors: &[Vec<VertexId>], sources: &[VertexId]) -> Vec<u32> {
    let mut dist = vec![u32::MAX; neighbors.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s.0] != 0 {
            dist[s.0] = 0;
            queue.push_back(s.0);
        }
    }
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for w in &neighbors[u] {
            if dist[w.0] == u32::MAX {
                dist[w.0] = next;
                queue.push_back(w.0);
            }
        }
    }
    dist
}
