//! Extending a PQ-symmetric map of metric spaces to a quasi-isometry of
//! their approximation graphs.
//!
//! The vertex map is assembled in stages:
//!
//! 1. The source root, and every non-splitting vertex whose ball is the whole
//!    space, goes to the target root.
//! 2. A splitting vertex `v` goes to a deepest target vertex whose ball
//!    contains `f(B(v))`.
//! 3. Any other vertex with a ball of at least two points lies on a radial
//!    geodesic between two splitting vertices `v₁` (below) and `v₂` (above,
//!    with the same ball). Its image sits at the same relative height on a
//!    radial geodesic from a neighbour of `F(v₁)` to `F(v₂)`.
//! 4. A singleton ball `{z}` starts a radial ray; the ray is sent
//!    isometrically onto a radial ray towards `f(z)` that starts one level
//!    below the image of the ray's parent.
//!
//! Each stage records its [`Provenance`], and the checks at the bottom of the
//! module compare the result with the constants of [`DerivedConstants`].

use serde::{Deserialize, Serialize};

use crate::approx::{ApproximationGraph, TieBreak, VertexId};
use crate::error::ExtensionError;
use crate::metric::PointSet;
use crate::pq::MapSpec;
use crate::report::{ViolationReport, Witness};

/// How a source vertex received its image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Root,
    #[serde(rename = "claim1-splitting")]
    Claim1Splitting,
    Interpolated,
    DegenerateRay,
    /// Deepest containing target vertex, used when a vertex has no splitting
    /// vertex above or below it (possible only with a lowered ceiling).
    #[serde(rename = "truncated-claim1")]
    TruncatedClaim1,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Root => "root",
            Provenance::Claim1Splitting => "claim1-splitting",
            Provenance::Interpolated => "interpolated",
            Provenance::DegenerateRay => "degenerate-ray",
            Provenance::TruncatedClaim1 => "truncated-claim1",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtensionOptions {
    /// Resolves every choice among equally valid vertices.
    pub tie: TieBreak,
}

/// The vertex map `F` together with the graphs and the point map it extends.
#[derive(Debug, Clone)]
pub struct ExtensionMap<'a> {
    source: &'a ApproximationGraph,
    target: &'a ApproximationGraph,
    f: &'a MapSpec,
    vertex_map: Vec<VertexId>,
    provenance: Vec<Provenance>,
    clamped: Vec<bool>,
    tie: TieBreak,
}

impl<'a> ExtensionMap<'a> {
    pub fn source(&self) -> &'a ApproximationGraph {
        self.source
    }

    pub fn target(&self) -> &'a ApproximationGraph {
        self.target
    }

    pub fn map(&self) -> &'a MapSpec {
        self.f
    }

    pub fn tie(&self) -> TieBreak {
        self.tie
    }

    #[inline]
    pub fn image(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.0]
    }

    pub fn vertex_map(&self) -> &[VertexId] {
        &self.vertex_map
    }

    pub fn provenance(&self, v: VertexId) -> Provenance {
        self.provenance[v.0]
    }

    pub fn provenances(&self) -> &[Provenance] {
        &self.provenance
    }

    /// Degenerate-ray vertices whose image level was cut at the target ceiling.
    pub fn is_clamped(&self, v: VertexId) -> bool {
        self.clamped[v.0]
    }

    pub fn clamped_vertices(&self) -> Vec<VertexId> {
        self.source
            .vertex_ids()
            .filter(|&v| self.clamped[v.0])
            .collect()
    }

    /// Replaces one image, for building negative controls.
    pub fn remap(&mut self, v: VertexId, image: VertexId) {
        self.vertex_map[v.0] = image;
    }
}

/// Constants bounding the quasi-isometry, derived from `(r, λ, A)`.
///
/// `C1, C2` bound the level change along nested splitting balls; `C4` bounds
/// how far the image of a branch point sits from the branch point of the
/// images; `C6` bounds the level gap between branch points of degenerate and
/// non-degenerate representatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub r: f64,
    pub lambda: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C3")]
    pub c3: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "C4")]
    pub c4: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C6")]
    pub c6: f64,
    #[serde(rename = "C5")]
    pub c5: f64,
    #[serde(rename = "C_prime")]
    pub c_prime: f64,
    #[serde(rename = "C7")]
    pub c7: f64,
}

fn log_base(r: f64, x: f64) -> f64 {
    x.ln() / r.ln()
}

/// Evaluates the constant chain for `0 < r ≤ 1/6`, `λ ≥ 1`, `0 < A ≤ 1`.
pub fn derived_constants(r: f64, lambda: f64, a: f64) -> Result<DerivedConstants, ExtensionError> {
    if !(r > 0.0 && r <= 1.0 / 6.0) {
        return Err(ExtensionError::InvalidParameter(format!(
            "r = {r} must lie in (0, 1/6]"
        )));
    }
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(ExtensionError::InvalidParameter(format!(
            "lambda = {lambda} must be at least 1"
        )));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(ExtensionError::InvalidParameter(format!(
            "A = {a} must lie in (0, 1]"
        )));
    }
    // A(r/4 · r^Δk)^λ ≤ diam ratio of images ≤ (1/A)(4/r · r^Δk)^{1/λ}, with
    // the image ratio itself within [r/4, 4/r]·r^Δk'.
    let c1 = log_base(r, a * (r / 4.0).powf(1.0 + lambda));
    let c2 = log_base(r, (1.0 / a) * (4.0 / r).powf(1.0 + 1.0 / lambda));
    let c3 = c1.abs().max(c2.abs());
    let c0 = c3 + 1.0;
    // With Δ = l(w') − l(F(w)) for the branch points:
    //   A(r²/4)^λ ≤ (4/r)·r^Δ        gives  Δ ≤ log_r(A(r²/4)^λ · r/4)
    //   r²/(4(16+2r))·r^Δ ≤ 1        gives  Δ ≥ −log_r(r²/(4(16+2r)))
    // and |F(w)w'| ≤ |Δ| + 1.
    let c4 = log_base(r, a * (r * r / 4.0).powf(lambda) * r / 4.0).abs()
        + log_base(r, r * r / (4.0 * (16.0 + 2.0 * r))).abs()
        + 1.0;
    let c = c0 + 2.0 * c4;
    // Level gap of branch points: ratio ≥ (r/4)·A(r⁴/16)^λ, turned into
    // levels against diameters within [r^{k+1}, 4r^k], plus the C4 offset.
    let c6 = log_base(r, (r / 4.0).powi(2) * a * (r.powi(4) / 16.0).powf(lambda)).abs() + c4;
    let c5 = c6 + 1.0;
    let c_prime = c + 2.0 * c5 + 1.0;
    let c7 = lambda + c + 1.0;
    Ok(DerivedConstants {
        r,
        lambda,
        a,
        c1,
        c2,
        c3,
        c0,
        c4,
        c,
        c6,
        c5,
        c_prime,
        c7,
    })
}

fn check_compatible(
    gs: &ApproximationGraph,
    gt: &ApproximationGraph,
    f: &MapSpec,
) -> Result<(), ExtensionError> {
    if gs.r() != gt.r() {
        return Err(ExtensionError::ParameterMismatch {
            source_r: gs.r(),
            target_r: gt.r(),
        });
    }
    if f.source() != gs.space() {
        return Err(ExtensionError::SpaceMismatch("source"));
    }
    if f.target() != gt.space() {
        return Err(ExtensionError::SpaceMismatch("target"));
    }
    Ok(())
}

/// Deepest target vertex whose ball contains `set`, ties broken by `tie`.
fn deepest_containing(gt: &ApproximationGraph, set: &PointSet, tie: TieBreak) -> VertexId {
    for k in (gt.k_min()..=gt.k_max()).rev() {
        let found = tie.pick(
            gt.level_vertices(k)
                .iter()
                .copied()
                .filter(|&w| set.is_subset(gt.ball(w))),
        );
        if let Some(w) = found {
            return w;
        }
    }
    gt.root()
}

/// A deepest target vertex whose ball contains `f(B(v))`, lowest id on ties.
pub fn claim1_image(
    gs: &ApproximationGraph,
    gt: &ApproximationGraph,
    f: &MapSpec,
    v: VertexId,
) -> VertexId {
    claim1_image_with(gs, gt, f, v, TieBreak::Lowest)
}

pub fn claim1_image_with(
    gs: &ApproximationGraph,
    gt: &ApproximationGraph,
    f: &MapSpec,
    v: VertexId,
    tie: TieBreak,
) -> VertexId {
    deepest_containing(gt, &f.image(gs.ball(v)), tie)
}

pub fn build_extension<'a>(
    gs: &'a ApproximationGraph,
    gt: &'a ApproximationGraph,
    f: &'a MapSpec,
) -> Result<ExtensionMap<'a>, ExtensionError> {
    build_extension_with(gs, gt, f, ExtensionOptions::default())
}

pub fn build_extension_with<'a>(
    gs: &'a ApproximationGraph,
    gt: &'a ApproximationGraph,
    f: &'a MapSpec,
    options: ExtensionOptions,
) -> Result<ExtensionMap<'a>, ExtensionError> {
    check_compatible(gs, gt, f)?;
    let tie = options.tie;
    let n = gs.len();
    let whole = gs.space().len();
    let mut image: Vec<Option<VertexId>> = vec![None; n];
    let mut provenance = vec![Provenance::Root; n];
    let mut clamped = vec![false; n];

    let splitting: Vec<bool> = gs.vertex_ids().map(|v| gs.is_splitting(v)).collect();

    for v in gs.vertex_ids() {
        if v == gs.root() || (!splitting[v.0] && gs.ball(v).len() == whole) {
            image[v.0] = Some(gt.root());
            provenance[v.0] = Provenance::Root;
        } else if splitting[v.0] {
            image[v.0] = Some(claim1_image_with(gs, gt, f, v, tie));
            provenance[v.0] = Provenance::Claim1Splitting;
        }
    }

    for v in gs.vertex_ids() {
        if image[v.0].is_some() || gs.ball(v).len() < 2 {
            continue;
        }
        let interpolated = interpolate(gs, gt, &image, &splitting, v, tie);
        match interpolated {
            Some(w) => {
                image[v.0] = Some(w);
                provenance[v.0] = Provenance::Interpolated;
            }
            None => {
                image[v.0] = Some(claim1_image_with(gs, gt, f, v, tie));
                provenance[v.0] = Provenance::TruncatedClaim1;
            }
        }
    }

    // Degenerate rays, one per point, starting at the first singleton level.
    let mut rays: Vec<Option<RayImage>> = vec![None; whole];
    for v in gs.vertex_ids() {
        if image[v.0].is_some() {
            continue;
        }
        let z = gs.ball(v).members()[0];
        if rays[z].is_none() {
            rays[z] = Some(ray_image(gs, gt, f, &image, z, tie));
        }
        let ray = rays[z].as_ref().expect("just filled");
        let want = gs.level(v) - ray.k_v + ray.k_f;
        let level = want.min(gt.k_max());
        image[v.0] = Some(ray.at(level));
        provenance[v.0] = Provenance::DegenerateRay;
        clamped[v.0] = want > gt.k_max();
    }

    Ok(ExtensionMap {
        source: gs,
        target: gt,
        f,
        vertex_map: image
            .into_iter()
            .map(|w| w.expect("every vertex assigned"))
            .collect(),
        provenance,
        clamped,
        tie,
    })
}

/// Image of a non-splitting vertex with a ball of at least two points, or
/// `None` when no splitting vertex bounds it from above or below.
fn interpolate(
    gs: &ApproximationGraph,
    gt: &ApproximationGraph,
    image: &[Option<VertexId>],
    splitting: &[bool],
    v: VertexId,
    tie: TieBreak,
) -> Option<VertexId> {
    // v₂: follow the (unique) equal-ball children upward to the first split.
    let ball = gs.ball(v);
    let mut v2 = v;
    while !splitting[v2.0] {
        v2 = *gs.children(v2).iter().find(|&&c| gs.ball(c) == ball)?;
    }
    // v₁: deepest splitting vertex strictly below v with a radial path to v.
    let l = gs.level(v);
    let v1 = (gs.k_min()..l).rev().find_map(|k| {
        tie.pick(
            gs.level_vertices(k)
                .iter()
                .copied()
                .filter(|&u| splitting[u.0] && gs.is_radial_ancestor(u, v)),
        )
    })?;
    let (f1, f2) = (image[v1.0]?, image[v2.0]?);
    let w1 = if gt.is_radial_ancestor(f1, f2) {
        f1
    } else {
        tie.pick(
            gt.horizontal_neighbors(f1)
                .iter()
                .copied()
                .filter(|&w| gt.is_radial_ancestor(w, f2)),
        )
        .or_else(|| {
            tie.pick(
                gt.level_vertices(gt.level(f1))
                    .iter()
                    .copied()
                    .filter(|&w| gt.is_radial_ancestor(w, f2)),
            )
        })?
    };
    let path = gt.radial_geodesic_with(w1, f2, tie).ok()?;
    let (l1, l2) = (gs.level(v1), gs.level(v2));
    Some(path.vertices[interpolation_offset(l - l1, l2 - l1, path.length)])
}

/// `round(num·len / den)` with halves rounded up, in exact integer arithmetic.
fn interpolation_offset(num: i32, den: i32, len: usize) -> usize {
    let (num, den, len) = (num as i64, den as i64, len as i64);
    ((2 * num * len + den) / (2 * den)) as usize
}

#[derive(Debug, Clone)]
struct RayImage {
    k_v: i32,
    k_f: i32,
    /// Target vertices containing `f(z)` indexed by level from `gt.k_min()`,
    /// each a radial parent of the next.
    chain: Vec<VertexId>,
    k_min: i32,
}

impl RayImage {
    fn at(&self, level: i32) -> VertexId {
        self.chain[(level - self.k_min) as usize]
    }
}

fn ray_image(
    gs: &ApproximationGraph,
    gt: &ApproximationGraph,
    f: &MapSpec,
    image: &[Option<VertexId>],
    z: usize,
    tie: TieBreak,
) -> RayImage {
    let single = PointSet::singleton(z);
    let k_v = (gs.k_min()..=gs.k_max())
        .find(|&k| gs.find_ball(k, &single).is_some())
        .expect("z owns a singleton ball at the ceiling or above");
    let first = gs.find_ball(k_v, &single).expect("found above");
    // The root ball has at least two points, so k_v lies above k_min and the
    // first singleton vertex has parents.
    let u = tie
        .pick(gs.parents(first).iter().copied())
        .expect("non-root vertices have radial parents");
    let fu = image[u.0].expect("parents have non-degenerate balls, mapped earlier");
    let k_f = gt.level(fu) + 1;

    let fz = f.apply(z);
    let mut chain = vec![gt.root(); (gt.k_max() - gt.k_min() + 1) as usize];
    let top = tie
        .pick(
            gt.level_vertices(gt.k_max())
                .iter()
                .copied()
                .filter(|&w| gt.ball(w).contains(fz)),
        )
        .expect("some ceiling ball contains every point");
    let mut cur = top;
    for k in (gt.k_min()..=gt.k_max()).rev() {
        chain[(k - gt.k_min()) as usize] = cur;
        if k > gt.k_min() {
            cur = tie
                .pick(gt.parents(cur).iter().copied())
                .expect("non-root vertices have radial parents");
        }
    }
    RayImage {
        k_v,
        k_f,
        chain,
        k_min: gt.k_min(),
    }
}

/// Empirical quasi-isometry constants of an extension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QIEstimate {
    pub lambda_used: f64,
    /// Least `C` with `|uv|/λ − C ≤ |F(u)F(v)| ≤ λ|uv| + C` on all vertex pairs.
    #[serde(rename = "C_emp")]
    pub c_emp: f64,
    /// Largest distance from a target vertex to the image.
    pub net_const: f64,
}

pub fn estimate_qi(em: &ExtensionMap<'_>, lambda: f64) -> QIEstimate {
    estimate_qi_on(em, lambda, |_| true)
}

/// [`estimate_qi`] with the additive constant measured only on vertex pairs
/// that both satisfy `keep`.
pub fn estimate_qi_on(
    em: &ExtensionMap<'_>,
    lambda: f64,
    keep: impl Fn(VertexId) -> bool,
) -> QIEstimate {
    let (gs, gt) = (em.source, em.target);
    let ds = gs.distances();
    let dt = gt.distances();
    let kept: Vec<VertexId> = gs.vertex_ids().filter(|&v| keep(v)).collect();
    let mut c_emp = 0.0f64;
    for (i, &u) in kept.iter().enumerate() {
        for &v in &kept[i + 1..] {
            let d = ds.get(u, v) as f64;
            let e = dt.get(em.image(u), em.image(v)) as f64;
            c_emp = c_emp.max(e - lambda * d).max(d / lambda - e);
        }
    }
    let net = gt.multi_source_bfs(&em.vertex_map);
    let net_const = net.iter().copied().max().unwrap_or(0) as f64;
    QIEstimate {
        lambda_used: lambda,
        c_emp,
        net_const,
    }
}

/// `d'(f(z), center of F(v)) / radius of F(v)`; at most 1 exactly when
/// `f(z) ∈ B(F(v))`.
pub fn trace_value(em: &ExtensionMap<'_>, z: usize, v: VertexId) -> f64 {
    let gt = em.target;
    let w = gt.vertex(em.image(v));
    gt.space().d(w.center, em.f.apply(z)) / w.radius
}

/// `f(z) ∈ B(F(v))` for every splitting `v` and every `z ∈ B(v)`.
pub fn boundary_trace_check(em: &ExtensionMap<'_>) -> ViolationReport {
    let (gs, gt) = (em.source, em.target);
    let mut rep = ViolationReport::empty();
    for v in gs.splitting_vertices() {
        let target_ball = gt.ball(em.image(v));
        for z in gs.ball(v).iter() {
            let inside = target_ball.contains(em.f.apply(z));
            rep.observe_with(trace_value(em, z, v), !inside, || Witness::PointVertex {
                point: z,
                vertex: v,
            });
        }
    }
    rep
}

/// A measured quantity compared against a constant it must not exceed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub bound: f64,
    pub worst: f64,
    pub checked: usize,
    pub violations: usize,
    pub witness: Option<Witness>,
    pub passed: bool,
}

impl BoundCheck {
    fn new(name: &str, bound: f64) -> Self {
        BoundCheck {
            name: name.to_owned(),
            bound,
            worst: 0.0,
            checked: 0,
            violations: 0,
            witness: None,
            passed: true,
        }
    }

    fn observe(&mut self, value: f64, witness: impl FnOnce() -> Witness) {
        self.checked += 1;
        if value > self.bound {
            self.violations += 1;
            self.passed = false;
        }
        if value > self.worst || self.witness.is_none() {
            self.worst = value;
            self.witness = Some(witness());
        }
    }
}

/// `|F(w) w'| ≤ C4` where `w` is the branch point of splitting `v₁, v₂` not
/// joined radially and `w'` is the branch point of `F(v₁), F(v₂)`.
pub fn branch_distance_check(em: &ExtensionMap<'_>, consts: &DerivedConstants) -> BoundCheck {
    let (gs, gt) = (em.source, em.target);
    let dt = gt.distances();
    let split = gs.splitting_vertices();
    let mut out = BoundCheck::new("branch-distance", consts.c4);
    for (i, &v1) in split.iter().enumerate() {
        for &v2 in &split[i + 1..] {
            if gs.radially_joined(v1, v2) {
                continue;
            }
            let w = gs.branch_point_with(&[v1, v2], em.tie);
            let wp = gt.branch_point_with(&[em.image(v1), em.image(v2)], em.tie);
            out.observe(dt.get(em.image(w), wp) as f64, || Witness::Vertices {
                vertices: vec![v1, v2, w],
            });
        }
    }
    out
}

/// For splitting non-root `v`: `f(B(v)) ⊆ B(F(v))` and no deeper target ball
/// contains `f(B(v))`. The measured value is the level gap to the deepest
/// containing vertex, plus one when `B(F(v))` misses part of `f(B(v))`.
pub fn claim1_maximality_check(em: &ExtensionMap<'_>) -> BoundCheck {
    let (gs, gt) = (em.source, em.target);
    let mut out = BoundCheck::new("claim1-maximality", 0.0);
    for v in gs.splitting_vertices() {
        if v == gs.root() {
            continue;
        }
        let set = em.f.image(gs.ball(v));
        let fv = em.image(v);
        let deepest = gt.level(deepest_containing(gt, &set, TieBreak::Lowest));
        let mut gap = (deepest - gt.level(fv)) as f64;
        if !set.is_subset(gt.ball(fv)) {
            gap = gap.max(0.0) + 1.0;
        }
        out.observe(gap, || Witness::Vertices { vertices: vec![v] });
    }
    out
}

/// Largest image displacement between the extension and its rebuild under
/// the opposite tie-break, against `2λ + C' + 3`.
pub fn stability_check(
    em: &ExtensionMap<'_>,
    consts: &DerivedConstants,
) -> Result<BoundCheck, ExtensionError> {
    let other_tie = match em.tie {
        TieBreak::Lowest => TieBreak::Highest,
        TieBreak::Highest => TieBreak::Lowest,
    };
    let alt = build_extension_with(
        em.source,
        em.target,
        em.f,
        ExtensionOptions { tie: other_tie },
    )?;
    let dt = em.target.distances();
    let mut out = BoundCheck::new(
        "tie-break-stability",
        2.0 * consts.lambda + consts.c_prime + 3.0,
    );
    for v in em.source.vertex_ids() {
        out.observe(dt.get(em.image(v), alt.image(v)) as f64, || {
            Witness::Vertices { vertices: vec![v] }
        });
    }
    Ok(out)
}

/// `l(F(v)) ≥ l(F(u)) − C'` along every radial source edge from `u` up to `v`.
pub fn monotone_level_check(em: &ExtensionMap<'_>, consts: &DerivedConstants) -> BoundCheck {
    let (gs, gt) = (em.source, em.target);
    let mut out = BoundCheck::new("monotone-level", consts.c_prime);
    for u in gs.vertex_ids() {
        for &v in gs.children(u) {
            let drop = gt.level(em.image(u)) - gt.level(em.image(v));
            out.observe(drop as f64, || Witness::Vertices {
                vertices: vec![u, v],
            });
        }
    }
    out
}

/// `|F(v_k)F(v_j)| = |k − j|` on each singleton ray, away from the clamp.
pub fn degenerate_ray_check(em: &ExtensionMap<'_>) -> BoundCheck {
    let (gs, gt) = (em.source, em.target);
    let dt = gt.distances();
    let mut out = BoundCheck::new("degenerate-ray-isometry", 0.0);
    for z in 0..gs.space().len() {
        let single = PointSet::singleton(z);
        let ray: Vec<VertexId> = (gs.k_min()..=gs.k_max())
            .filter_map(|k| gs.find_ball(k, &single))
            .filter(|&v| em.provenance(v) == Provenance::DegenerateRay && !em.is_clamped(v))
            .collect();
        for (i, &a) in ray.iter().enumerate() {
            for &b in &ray[i + 1..] {
                let want = (gs.level(b) - gs.level(a)).unsigned_abs();
                let got = dt.get(em.image(a), em.image(b));
                out.observe(got.abs_diff(want) as f64, || Witness::Vertices {
                    vertices: vec![a, b],
                });
            }
        }
    }
    out
}

/// Least-squares line `l(F(v)) ≈ slope·l(v) + intercept` over splitting vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub points: usize,
}

pub fn level_fit(em: &ExtensionMap<'_>) -> Option<LevelFit> {
    let (gs, gt) = (em.source, em.target);
    let pts: Vec<(f64, f64)> = gs
        .splitting_vertices()
        .into_iter()
        .map(|v| (gs.level(v) as f64, gt.level(em.image(v)) as f64))
        .collect();
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).abs())
        .fold(0.0, f64::max);
    Some(LevelFit {
        slope,
        intercept,
        max_residual,
        points: pts.len(),
    })
}
