//! JSON and DOT renderings of graphs and extensions.

use std::fmt::Write as _;

use serde::Serialize;

use crate::approx::{ApproximationGraph, Edge, EdgeKind, EdgeRule, VertexId};
use crate::extension::{DerivedConstants, ExtensionMap, Provenance, QIEstimate};
use crate::metric::PointSet;

#[derive(Debug, Serialize)]
pub struct VertexJson {
    pub id: VertexId,
    pub level: i32,
    pub center: usize,
    pub ball: PointSet,
    pub radius: f64,
}

#[derive(Debug, Serialize)]
pub struct GraphJson<'a> {
    pub r: f64,
    pub k_min: i32,
    pub k_max: i32,
    pub edge_rule: EdgeRule,
    pub labels: &'a [String],
    pub vertices: Vec<VertexJson>,
    pub edges: &'a [Edge],
}

pub fn graph_json(g: &ApproximationGraph) -> GraphJson<'_> {
    GraphJson {
        r: g.r(),
        k_min: g.k_min(),
        k_max: g.k_max(),
        edge_rule: g.edge_rule(),
        labels: g.space().labels(),
        vertices: g
            .vertices()
            .iter()
            .map(|v| VertexJson {
                id: v.id,
                level: v.level,
                center: v.center,
                ball: v.ball.clone(),
                radius: v.radius,
            })
            .collect(),
        edges: g.edges(),
    }
}

/// Levels share a rank; radial edges are solid and horizontal ones dashed.
pub fn graph_dot(g: &ApproximationGraph) -> String {
    let mut out = String::new();
    out.push_str("graph approximation {\n  rankdir=BT;\n  node [shape=box, fontsize=10];\n");
    for k in g.k_min()..=g.k_max() {
        let _ = write!(out, "  {{ rank=same;");
        for &v in g.level_vertices(k) {
            let _ = write!(out, " {};", v.0);
        }
        out.push_str(" }\n");
    }
    for v in g.vertices() {
        let _ = writeln!(
            out,
            "  {} [label=\"{} L{}\\n{}\"];",
            v.id.0, v.id, v.level, v.ball
        );
    }
    for e in g.edges() {
        let style = match e.kind {
            EdgeKind::Radial => "solid",
            EdgeKind::Horizontal => "dashed",
        };
        let _ = writeln!(out, "  {} -- {} [style={style}];", e.u.0, e.v.0);
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Serialize)]
pub struct ProvenanceJson {
    pub vertex: VertexId,
    pub tag: Provenance,
    pub clamped: bool,
}

#[derive(Debug, Serialize)]
pub struct ExtensionJson {
    pub vertex_map: Vec<(VertexId, VertexId)>,
    pub provenance: Vec<ProvenanceJson>,
    pub derived_constants: Option<DerivedConstants>,
    pub qi_estimate: Option<QIEstimate>,
}

pub fn extension_json(
    em: &ExtensionMap<'_>,
    constants: Option<DerivedConstants>,
    qi: Option<QIEstimate>,
) -> ExtensionJson {
    let ids = em.source().vertex_ids();
    ExtensionJson {
        vertex_map: em.source().vertex_ids().map(|v| (v, em.image(v))).collect(),
        provenance: ids
            .map(|v| ProvenanceJson {
                vertex: v,
                tag: em.provenance(v),
                clamped: em.is_clamped(v),
            })
            .collect(),
        derived_constants: constants,
        qi_estimate: qi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::build_approximation;
    use crate::extension::build_extension;
    use crate::metric::{default_labels, FiniteMetricSpace};
    use crate::pq::MapSpec;

    fn two_point() -> FiniteMetricSpace {
        FiniteMetricSpace::new(default_labels(2), vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn graph_json_shape() {
        let g = build_approximation(&two_point(), 1.0 / 6.0).unwrap();
        let v = serde_json::to_value(graph_json(&g)).unwrap();
        assert_eq!(v["k_min"], -1);
        assert_eq!(v["k_max"], 1);
        assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
        assert_eq!(v["edges"].as_array().unwrap().len(), 3);
        assert_eq!(v["edges"][0]["kind"], "radial");
        assert_eq!(v["vertices"][0]["ball"], serde_json::json!([0, 1]));
    }

    #[test]
    fn dot_marks_edge_kinds() {
        let s = FiniteMetricSpace::from_points(
            default_labels(4),
            &[vec![0.0], vec![0.1], vec![0.5], vec![1.0]],
            2.0,
        )
        .unwrap();
        let g = build_approximation(&s, 1.0 / 6.0).unwrap();
        let dot = graph_dot(&g);
        assert!(dot.starts_with("graph approximation {"));
        assert_eq!(
            dot.matches("style=solid").count(),
            g.edges()
                .iter()
                .filter(|e| e.kind == EdgeKind::Radial)
                .count()
        );
        assert_eq!(
            dot.matches("style=dashed").count(),
            g.edges()
                .iter()
                .filter(|e| e.kind == EdgeKind::Horizontal)
                .count()
        );
        assert_eq!(
            dot.matches("rank=same").count(),
            (g.k_max() - g.k_min() + 1) as usize
        );
    }

    #[test]
    fn extension_json_shape() {
        let s = two_point();
        let g = build_approximation(&s, 1.0 / 6.0).unwrap();
        let f = MapSpec::identity(&s);
        let em = build_extension(&g, &g, &f).unwrap();
        let v = serde_json::to_value(extension_json(&em, None, None)).unwrap();
        assert_eq!(v["vertex_map"][0], serde_json::json!([0, 0]));
        assert_eq!(v["provenance"][0]["tag"], "root");
        assert!(v["derived_constants"].is_null());
    }
}
