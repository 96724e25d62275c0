//! Splitting vertices, cone and branch points, radial geodesics.

use serde::{Deserialize, Serialize};

use super::{ApproximationGraph, VertexId};
use crate::error::ApproxError;

/// Which candidate wins when several vertices qualify.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreak {
    #[default]
    Lowest,
    Highest,
}

impl TieBreak {
    /// Picks from an id-ordered candidate list.
    pub fn pick<I>(self, candidates: I) -> Option<VertexId>
    where
        I: IntoIterator<Item = VertexId>,
    {
        let mut it = candidates.into_iter();
        match self {
            TieBreak::Lowest => it.next(),
            TieBreak::Highest => it.last(),
        }
    }
}

/// A vertex path with its hop length and horizontal edge count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub vertices: Vec<VertexId>,
    pub length: usize,
    pub horizontal_edge_count: usize,
}

impl GeodesicPath {
    pub fn from_vertices(g: &ApproximationGraph, vertices: Vec<VertexId>) -> Self {
        let horizontal_edge_count = vertices
            .windows(2)
            .filter(|w| g.is_horizontal_edge(w[0], w[1]))
            .count();
        GeodesicPath {
            length: vertices.len().saturating_sub(1),
            vertices,
            horizontal_edge_count,
        }
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().expect("paths are non-empty")
    }
}

impl ApproximationGraph {
    /// Whether some next-level ball is a proper subset of `B(v)`.
    ///
    /// Always false on the ceiling level, which has no next level in the graph.
    pub fn is_splitting(&self, v: VertexId) -> bool {
        if self.level(v) >= self.k_max() {
            return false;
        }
        let ball = self.ball(v);
        self.children(v)
            .iter()
            .any(|&c| self.ball(c).len() < ball.len())
    }

    pub fn splitting_vertices(&self) -> Vec<VertexId> {
        self.vertex_ids()
            .filter(|&v| self.is_splitting(v))
            .collect()
    }

    /// Vertices at or below the lowest level of `vs` that reach every member
    /// of `vs` by a level-increasing radial path. Sorted by id.
    pub fn cone_points(&self, vs: &[VertexId]) -> Vec<VertexId> {
        let Some(min_level) = vs.iter().map(|&v| self.level(v)).min() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for k in self.k_min()..=min_level {
            for &u in self.level_vertices(k) {
                let reach = self.descendants(u);
                if vs.iter().all(|v| reach.contains(v.0)) {
                    out.push(u);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Cone point of maximal level for `{v, w}`.
    pub fn branch_point(&self, v: VertexId, w: VertexId) -> VertexId {
        self.branch_point_with(&[v, w], TieBreak::Lowest)
    }

    pub fn branch_point_with(&self, vs: &[VertexId], tie: TieBreak) -> VertexId {
        let min_level = vs
            .iter()
            .map(|&v| self.level(v))
            .min()
            .unwrap_or(self.k_min());
        for k in (self.k_min()..=min_level).rev() {
            let found = tie.pick(
                self.level_vertices(k)
                    .iter()
                    .copied()
                    .filter(|u| vs.iter().all(|v| self.descendants(*u).contains(v.0))),
            );
            if let Some(u) = found {
                return u;
            }
        }
        // The level-k₀ root has every vertex as a radial descendant.
        self.root()
    }

    /// Level-increasing radial path from `low` to `high`, choosing the lowest
    /// id child that still reaches `high` at each step.
    pub fn radial_geodesic(
        &self,
        low: VertexId,
        high: VertexId,
    ) -> Result<GeodesicPath, ApproxError> {
        self.radial_geodesic_with(low, high, TieBreak::Lowest)
    }

    pub fn radial_geodesic_with(
        &self,
        low: VertexId,
        high: VertexId,
        tie: TieBreak,
    ) -> Result<GeodesicPath, ApproxError> {
        self.check_vertex(low)?;
        self.check_vertex(high)?;
        if !self.is_radial_ancestor(low, high) {
            return Err(ApproxError::NoRadialPath {
                from: low.0,
                to: high.0,
            });
        }
        let mut path = vec![low];
        let mut cur = low;
        while cur != high {
            cur = tie
                .pick(
                    self.children(cur)
                        .iter()
                        .copied()
                        .filter(|c| self.descendants(*c).contains(high.0)),
                )
                .expect("descendant sets are closed under radial children");
            path.push(cur);
        }
        Ok(GeodesicPath {
            length: path.len() - 1,
            vertices: path,
            horizontal_edge_count: 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::build_approximation;
    use crate::metric::{default_labels, FiniteMetricSpace};

    fn two_point() -> ApproximationGraph {
        let s = FiniteMetricSpace::new(default_labels(2), vec![vec![0.0, 1.0], vec![1.0, 0.0]])
            .unwrap();
        build_approximation(&s, 1.0 / 6.0).unwrap()
    }

    #[test]
    fn splitting_in_two_point_space() {
        let g = two_point();
        let l0 = g.level_vertices(0)[0];
        assert!(g.is_splitting(l0));
        assert!(!g.is_splitting(g.root()));
        for &v in g.level_vertices(1) {
            assert!(!g.is_splitting(v));
        }
    }

    #[test]
    fn cones_and_branches_in_two_point_space() {
        let g = two_point();
        let l0 = g.level_vertices(0)[0];
        let top = g.level_vertices(1).to_vec();
        assert_eq!(g.cone_points(&[g.root()]), vec![g.root()]);
        assert_eq!(g.cone_points(&top), vec![g.root(), l0]);
        assert!(g.cone_points(&[top[0]]).contains(&top[0]));
        assert_eq!(g.branch_point(top[0], top[1]), l0);
        assert_eq!(g.branch_point(l0, top[1]), l0);
        assert_eq!(g.branch_point(top[1], top[1]), top[1]);
    }

    #[test]
    fn radial_paths() {
        let g = two_point();
        let top = g.level_vertices(1).to_vec();
        let p = g.radial_geodesic(g.root(), top[1]).unwrap();
        assert_eq!(p.length as i32, g.k_max() - g.k_min());
        assert_eq!(p.length as u32, g.graph_distance(g.root(), top[1]));
        let trivial = g.radial_geodesic(top[0], top[0]).unwrap();
        assert_eq!(trivial.length, 0);
        assert_eq!(
            g.radial_geodesic(top[0], top[1]),
            Err(ApproxError::NoRadialPath {
                from: top[0].0,
                to: top[1].0
            })
        );
        assert!(g.radial_geodesic(top[1], g.root()).is_err());
    }

    #[test]
    fn tie_break_picks_ends() {
        let ids = [VertexId(3), VertexId(5), VertexId(9)];
        assert_eq!(TieBreak::Lowest.pick(ids), Some(VertexId(3)));
        assert_eq!(TieBreak::Highest.pick(ids), Some(VertexId(9)));
        assert_eq!(TieBreak::Lowest.pick([]), None);
    }
}
