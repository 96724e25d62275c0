//! Hyperbolic approximation graphs of finite metric spaces, PQ-symmetric
//! maps between them, and quasi-isometric extensions of those maps.

pub mod approx;
pub mod error;
pub mod export;
pub mod extension;
pub mod fixtures;
pub mod hyperbolicity;
pub mod io;
pub mod metric;
pub mod pq;
pub mod report;

pub use approx::{
    build_approximation, ApproximationGraph, BuildOptions, EdgeKind, EdgeRule, GeodesicPath,
    TieBreak, VertexId,
};
pub use error::Error;
pub use extension::{
    build_extension, derived_constants, estimate_qi, DerivedConstants, ExtensionMap, QIEstimate,
};
pub use hyperbolicity::{delta_four_point, delta_of_matrix, HalfInteger, HyperbolicityReport};
pub use metric::{FiniteMetricSpace, PointSet};
pub use pq::{check_diam_ratio, check_pq, fit_pq, DiamRatioParams, MapSpec, PQParams, SetFamily};
pub use report::{ViolationReport, Witness};
