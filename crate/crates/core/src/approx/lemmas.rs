//! Exhaustive checks of the structural lemmas on a built graph.
//!
//! Each check enumerates every qualifying vertex pair or triple and reports
//! how many it examined, how many failed, and the first failing witness.

use serde::{Deserialize, Serialize};

use super::{check_geodesic_normal_form, level_scale, ApproximationGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    pub witness: Option<Vec<VertexId>>,
}

impl LemmaReport {
    fn new(name: &str) -> Self {
        LemmaReport {
            name: name.to_owned(),
            checked: 0,
            violations: 0,
            witness: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Vec<VertexId>) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// `r^{k+1} ≤ diam B(v) ≤ 4r^k` at every splitting vertex of level `k`.
pub fn splitting_diameter_bounds(g: &ApproximationGraph) -> LemmaReport {
    let mut rep = LemmaReport::new("splitting-diameter");
    let space = g.space();
    for v in g.splitting_vertices() {
        let k = g.level(v);
        let diam = space.diameter_of(g.ball(v).members());
        let ok = level_scale(g.r(), k + 1) <= diam && diam <= 4.0 * level_scale(g.r(), k);
        rep.record(ok, || vec![v]);
    }
    rep
}

/// Branch points of pairs not joined by a radial geodesic are splitting.
pub fn branch_points_split(g: &ApproximationGraph) -> LemmaReport {
    let mut rep = LemmaReport::new("branch-is-splitting");
    for a in g.vertex_ids() {
        for b in (a.0 + 1..g.len()).map(VertexId) {
            if g.radially_joined(a, b) {
                continue;
            }
            let w = g.branch_point(a, b);
            rep.record(g.is_splitting(w), || vec![a, b, w]);
        }
    }
    rep
}

/// `|vv'| ≤ |l(v) − l(v')| + 1` whenever `B(v) ∩ B(v') ≠ ∅`.
pub fn intersecting_balls_are_close(g: &ApproximationGraph) -> LemmaReport {
    let mut rep = LemmaReport::new("intersecting-balls");
    let d = g.distances();
    for a in g.vertex_ids() {
        for b in (a.0..g.len()).map(VertexId) {
            if !g.ball(a).intersects(g.ball(b)) {
                continue;
            }
            let bound = (g.level(a) - g.level(b)).unsigned_abs() + 1;
            rep.record(d.get(a, b) <= bound, || vec![a, b]);
        }
    }
    rep
}

/// For `v''` below `v, v'` whose ball meets both `B(v)` and `B(v')`, a common
/// cone point exists one level below `v''` (when that level is present).
pub fn cone_below_meeting_ball(g: &ApproximationGraph) -> LemmaReport {
    let mut rep = LemmaReport::new("cone-below-meeting-ball");
    for low in g.vertex_ids() {
        let k = g.level(low);
        if k - 1 < g.k_min() {
            continue;
        }
        let hosts: Vec<VertexId> = g
            .level_vertices(k - 1)
            .iter()
            .copied()
            .filter(|w| g.is_radial_ancestor(*w, low))
            .collect();
        let meeting: Vec<VertexId> = g
            .vertex_ids()
            .filter(|&v| g.level(v) >= k && g.ball(v).intersects(g.ball(low)))
            .collect();
        // masks[i] bit j: hosts[j] reaches meeting[i]
        let masks: Vec<Vec<bool>> = meeting
            .iter()
            .map(|&v| hosts.iter().map(|&w| g.is_radial_ancestor(w, v)).collect())
            .collect();
        for i in 0..meeting.len() {
            for j in i..meeting.len() {
                let ok = (0..hosts.len()).any(|h| masks[i][h] && masks[j][h]);
                rep.record(ok, || vec![meeting[i], meeting[j], low]);
            }
        }
    }
    rep
}

/// `diam(B(v₁) ∪ B(v₂)) ≥ (r²/4) diam B(w)` for the branch point `w` of each
/// pair, skipping pairs whose branch ball is a single point.
pub fn branch_ball_ratio(g: &ApproximationGraph) -> LemmaReport {
    let mut rep = LemmaReport::new("branch-ball-ratio");
    let space = g.space();
    let factor = g.r() * g.r() / 4.0;
    for a in g.vertex_ids() {
        for b in (a.0..g.len()).map(VertexId) {
            let w = g.branch_point(a, b);
            let dw = space.diameter_of(g.ball(w).members());
            if dw == 0.0 {
                continue;
            }
            let du = space.diameter_of(g.ball(a).union(g.ball(b)).members());
            rep.record(du >= factor * dw, || vec![a, b, w]);
        }
    }
    rep
}

/// Some geodesic between every pair has at most one horizontal edge, on its
/// lowest level; some geodesic has no interior local maximum of the level.
pub fn geodesic_shapes(g: &ApproximationGraph) -> Vec<LemmaReport> {
    let nf = check_geodesic_normal_form(g);
    let mut single = LemmaReport::new("geodesic-one-horizontal");
    single.checked = nf.pairs_checked;
    if let Some((a, b)) = nf.horizontal_violation {
        single.violations = 1;
        single.witness = Some(vec![a, b]);
    }
    let mut valley = LemmaReport::new("geodesic-valley-shape");
    valley.checked = nf.pairs_checked;
    if let Some((a, b)) = nf.valley_violation {
        valley.violations = 1;
        valley.witness = Some(vec![a, b]);
    }
    vec![single, valley]
}

/// Every lemma check in a fixed order.
pub fn run_all(g: &ApproximationGraph) -> Vec<LemmaReport> {
    let mut out = vec![
        splitting_diameter_bounds(g),
        branch_points_split(g),
        intersecting_balls_are_close(g),
        cone_below_meeting_ball(g),
        branch_ball_ratio(g),
    ];
    out.extend(geodesic_shapes(g));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::build_approximation;
    use crate::metric::{default_labels, FiniteMetricSpace};

    #[test]
    fn all_lemmas_hold_on_small_line() {
        let xs = [0.0, 0.04, 0.23, 0.29, 0.71, 0.88, 1.0];
        let coords: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let s = FiniteMetricSpace::from_points(default_labels(xs.len()), &coords, 2.0).unwrap();
        for r in [1.0 / 6.0, 0.125, 0.1] {
            let g = build_approximation(&s, r).unwrap();
            for rep in run_all(&g) {
                assert!(rep.passed(), "{rep:?} at r = {r}");
                if rep.name != "branch-is-splitting" {
                    assert!(rep.checked > 0, "{}", rep.name);
                }
            }
        }
    }

    #[test]
    fn record_keeps_first_witness() {
        let mut rep = LemmaReport::new("x");
        rep.record(true, || vec![VertexId(0)]);
        rep.record(false, || vec![VertexId(1)]);
        rep.record(false, || vec![VertexId(2)]);
        assert_eq!((rep.checked, rep.violations), (3, 2));
        assert_eq!(rep.witness, Some(vec![VertexId(1)]));
        assert!(!rep.passed());
    }
}
