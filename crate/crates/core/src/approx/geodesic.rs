//! Existence checks for geodesics of a restricted shape.
//!
//! Every path in the breadth-first DAG from `s` that ends at `t` is a
//! geodesic, so a dynamic program over that DAG decides, for all `t` at once,
//! whether some geodesic from `s` to `t` has a given shape.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ApproximationGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalFormReport {
    pub pairs_checked: usize,
    /// First pair with no geodesic using at most one horizontal edge placed
    /// on the lowest level of the path.
    pub horizontal_violation: Option<(VertexId, VertexId)>,
    /// First pair with no geodesic whose interior vertices all sit strictly
    /// below one of their two path neighbours.
    pub valley_violation: Option<(VertexId, VertexId)>,
    pub passed: bool,
}

pub fn check_geodesic_normal_form(g: &ApproximationGraph) -> NormalFormReport {
    let n = g.len();
    let per_source: Vec<(Option<VertexId>, Option<VertexId>)> = (0..n)
        .into_par_iter()
        .map(|s| sweep_from(g, VertexId(s)))
        .collect();
    let mut horizontal_violation = None;
    let mut valley_violation = None;
    for (s, (h, v)) in per_source.into_iter().enumerate() {
        if horizontal_violation.is_none() {
            horizontal_violation = h.map(|t| (VertexId(s), t));
        }
        if valley_violation.is_none() {
            valley_violation = v.map(|t| (VertexId(s), t));
        }
    }
    NormalFormReport {
        pairs_checked: n * n,
        passed: horizontal_violation.is_none() && valley_violation.is_none(),
        horizontal_violation,
        valley_violation,
    }
}

/// First targets (by id) failing each shape, from one source.
fn sweep_from(g: &ApproximationGraph, s: VertexId) -> (Option<VertexId>, Option<VertexId>) {
    let n = g.len();
    let dist = g.distances().row(s);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| dist[v]);

    // radial-only path exists, and the best (largest) minimum level along one
    let mut radial = vec![false; n];
    let mut radial_floor = vec![i32::MIN; n];
    // smallest level of the single horizontal edge over admissible paths
    let mut horizontal_floor = vec![i32::MAX; n];
    // valley shape: arrived from a higher vertex (or at the source) / from a
    // vertex at the same or lower level
    let mut from_above = vec![false; n];
    let mut from_below = vec![false; n];

    radial[s.0] = true;
    radial_floor[s.0] = g.level(s);
    from_above[s.0] = true;

    for &x in &order {
        let lx = g.level(VertexId(x));
        for &y in g.neighbors(VertexId(x)) {
            let y = y.0;
            if dist[y] != dist[x] + 1 {
                continue;
            }
            let ly = g.level(VertexId(y));
            if ly != lx {
                if radial[x] {
                    radial[y] = true;
                    radial_floor[y] = radial_floor[y].max(radial_floor[x].min(ly));
                }
                if horizontal_floor[x] != i32::MAX && ly >= horizontal_floor[x] {
                    horizontal_floor[y] = horizontal_floor[y].min(horizontal_floor[x]);
                }
            } else if radial[x] && radial_floor[x] >= lx {
                horizontal_floor[y] = horizontal_floor[y].min(lx);
            }

            let step = ly - lx;
            if from_above[x] || (from_below[x] && step == 1) {
                if step == -1 {
                    from_above[y] = true;
                } else {
                    from_below[y] = true;
                }
            }
        }
    }

    let h = (0..n).find(|&t| !radial[t] && horizontal_floor[t] == i32::MAX);
    let v = (0..n).find(|&t| !from_above[t] && !from_below[t]);
    (h.map(VertexId), v.map(VertexId))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::build_approximation;
    use crate::metric::{default_labels, FiniteMetricSpace};

    /// Enumerates every geodesic explicitly.
    fn all_geodesics(g: &ApproximationGraph, s: VertexId, t: VertexId) -> Vec<Vec<VertexId>> {
        let d = g.distances();
        let mut out = Vec::new();
        let mut stack = vec![vec![s]];
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap();
            if last == t {
                out.push(path);
                continue;
            }
            for &w in g.neighbors(last) {
                if d.get(s, w) == d.get(s, last) + 1 && d.get(w, t) + 1 == d.get(last, t) {
                    let mut p = path.clone();
                    p.push(w);
                    stack.push(p);
                }
            }
        }
        out
    }

    fn normal(g: &ApproximationGraph, p: &[VertexId]) -> bool {
        let horiz: Vec<usize> = (0..p.len() - 1)
            .filter(|&i| g.level(p[i]) == g.level(p[i + 1]))
            .collect();
        let lowest = p.iter().map(|&v| g.level(v)).min().unwrap();
        horiz.len() <= 1 && horiz.iter().all(|&i| g.level(p[i]) == lowest)
    }

    fn valley(g: &ApproximationGraph, p: &[VertexId]) -> bool {
        (1..p.len().saturating_sub(1))
            .all(|i| g.level(p[i]) < g.level(p[i - 1]).max(g.level(p[i + 1])))
    }

    #[test]
    fn dynamic_program_matches_enumeration() {
        let xs = [0.0, 0.07, 0.19, 0.33, 0.61, 0.64, 0.98];
        let coords: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let s = FiniteMetricSpace::from_points(default_labels(xs.len()), &coords, 2.0).unwrap();
        for r in [1.0 / 6.0, 0.1] {
            let g = build_approximation(&s, r).unwrap();
            for a in g.vertex_ids() {
                let (h, v) = sweep_from(&g, a);
                let expect_h = g
                    .vertex_ids()
                    .find(|&b| !all_geodesics(&g, a, b).iter().any(|p| normal(&g, p)));
                let expect_v = g
                    .vertex_ids()
                    .find(|&b| !all_geodesics(&g, a, b).iter().any(|p| valley(&g, p)));
                assert_eq!(h, expect_h);
                assert_eq!(v, expect_v);
            }
            assert!(check_geodesic_normal_form(&g).passed);
        }
    }

    #[test]
    fn two_point_level_one_pair() {
        let s = FiniteMetricSpace::new(default_labels(2), vec![vec![0.0, 1.0], vec![1.0, 0.0]])
            .unwrap();
        let g = build_approximation(&s, 1.0 / 6.0).unwrap();
        let top = g.level_vertices(1);
        let paths = all_geodesics(&g, top[0], top[1]);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0][1], g.level_vertices(0)[0]);
        assert!(normal(&g, &paths[0]));
        let report = check_geodesic_normal_form(&g);
        assert!(report.passed);
        assert_eq!(report.pairs_checked, 16);
    }
}
