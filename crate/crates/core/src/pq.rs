//! PQ-symmetric maps between finite metric spaces.
//!
//! A bijection `f` is `(p, q)`-symmetric when for all `x ∉ {a, b}`
//!
//! ```text
//! |f(x)f(a)| ≤ q·max{t^p, t^{1/p}}·|f(x)f(b)|,   t = |xa| / |xb|.
//! ```
//!
//! The equivalent diameter-ratio form with constants `(λ, A)` asks that for
//! nested non-trivial sets `B₂ ⊆ B₁`
//!
//! ```text
//! A·u^λ ≤ diam f(B₂) / diam f(B₁) ≤ (1/A)·u^{1/λ},   u = diam B₂ / diam B₁.
//! ```
//!
//! Every check here is an exhaustive sweep returning a [`ViolationReport`]
//! whose witness re-evaluates to the reported worst ratio.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::build_approximation;
use crate::error::PqError;
use crate::metric::{FiniteMetricSpace, PointSet};
use crate::report::{ViolationReport, Witness, RATIO_SLACK};

/// Largest space accepted by [`SetFamily::PowerSet`].
pub const POWER_SET_LIMIT: usize = 12;

/// Scale at which the default diameter-ratio family takes its balls.
pub const DEFAULT_FAMILY_R: f64 = 1.0 / 6.0;

/// A bijection between the points of two finite metric spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    source: FiniteMetricSpace,
    target: FiniteMetricSpace,
    forward: Vec<usize>,
    backward: Vec<usize>,
}

impl MapSpec {
    /// `forward[i]` is the target index of source point `i`.
    pub fn new(
        source: FiniteMetricSpace,
        target: FiniteMetricSpace,
        forward: Vec<usize>,
    ) -> Result<Self, PqError> {
        let n = source.len();
        if target.len() != n {
            return Err(PqError::NotBijective(format!(
                "source has {n} points, target has {}",
                target.len()
            )));
        }
        if forward.len() != n {
            return Err(PqError::NotBijective(format!(
                "assignment covers {} of {n} points",
                forward.len()
            )));
        }
        let mut backward = vec![usize::MAX; n];
        for (i, &j) in forward.iter().enumerate() {
            if j >= n {
                return Err(PqError::NotBijective(format!(
                    "image index {j} out of range"
                )));
            }
            if backward[j] != usize::MAX {
                return Err(PqError::NotBijective(format!(
                    "{} and {} both map to {}",
                    source.label(backward[j]),
                    source.label(i),
                    target.label(j)
                )));
            }
            backward[j] = i;
        }
        Ok(MapSpec {
            source,
            target,
            forward,
            backward,
        })
    }

    pub fn identity(space: &FiniteMetricSpace) -> Self {
        let forward: Vec<usize> = (0..space.len()).collect();
        MapSpec {
            source: space.clone(),
            target: space.clone(),
            backward: forward.clone(),
            forward,
        }
    }

    /// The identity of the points from `space` onto its `d^alpha` snowflake.
    pub fn snowflake(space: &FiniteMetricSpace, alpha: f64) -> Result<Self, PqError> {
        let target = space
            .snowflake(alpha)
            .map_err(|e| PqError::InvalidParams(e.to_string()))?;
        let forward: Vec<usize> = (0..space.len()).collect();
        Ok(MapSpec {
            source: space.clone(),
            target,
            backward: forward.clone(),
            forward,
        })
    }

    /// Builds the map from `(source label, target label)` pairs.
    pub fn from_label_pairs(
        source: FiniteMetricSpace,
        target: FiniteMetricSpace,
        pairs: &[(String, String)],
    ) -> Result<Self, PqError> {
        let n = source.len();
        if pairs.len() != n {
            return Err(PqError::NotBijective(format!(
                "{} pairs for {n} source points",
                pairs.len()
            )));
        }
        let mut forward = vec![usize::MAX; n];
        for (s, t) in pairs {
            let i = source
                .index_of(s)
                .ok_or_else(|| PqError::NotBijective(format!("unknown source label {s:?}")))?;
            let j = target
                .index_of(t)
                .ok_or_else(|| PqError::NotBijective(format!("unknown target label {t:?}")))?;
            if forward[i] != usize::MAX {
                return Err(PqError::NotBijective(format!(
                    "source label {s:?} mapped twice"
                )));
            }
            forward[i] = j;
        }
        Self::new(source, target, forward)
    }

    pub fn inverse(&self) -> MapSpec {
        MapSpec {
            source: self.target.clone(),
            target: self.source.clone(),
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    pub fn source(&self) -> &FiniteMetricSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteMetricSpace {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.forward[i]
    }

    #[inline]
    pub fn apply_inverse(&self, j: usize) -> usize {
        self.backward[j]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.forward
    }

    pub fn image(&self, set: &PointSet) -> PointSet {
        set.map(|i| self.forward[i])
    }

    pub fn preimage(&self, set: &PointSet) -> PointSet {
        set.map(|j| self.backward[j])
    }

    /// `(source label, target label)` for every source point in index order.
    pub fn label_pairs(&self) -> Vec<(String, String)> {
        (0..self.len())
            .map(|i| {
                (
                    self.source.label(i).to_owned(),
                    self.target.label(self.forward[i]).to_owned(),
                )
            })
            .collect()
    }
}

/// Constants of the control function `η(t) = q·max{t^p, t^{1/p}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PQParams {
    pub p: f64,
    pub q: f64,
}

impl PQParams {
    pub fn new(p: f64, q: f64) -> Result<Self, PqError> {
        if !(p >= 1.0 && p.is_finite()) || !(q >= 1.0 && q.is_finite()) {
            return Err(PqError::InvalidParams(format!(
                "p = {p}, q = {q}: both must be finite and at least 1"
            )));
        }
        Ok(PQParams { p, q })
    }

    pub fn eta(&self, t: f64) -> f64 {
        self.q * t.powf(self.p).max(t.powf(1.0 / self.p))
    }
}

/// Constants `(λ, A)` of the diameter-ratio inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiamRatioParams {
    pub lambda: f64,
    #[serde(rename = "A")]
    pub a: f64,
}

impl DiamRatioParams {
    pub fn new(lambda: f64, a: f64) -> Result<Self, PqError> {
        if !(lambda >= 1.0 && lambda.is_finite()) {
            return Err(PqError::InvalidParams(format!(
                "lambda = {lambda} must be at least 1"
            )));
        }
        if !(a > 0.0 && a <= 1.0) {
            return Err(PqError::InvalidParams(format!(
                "A = {a} must lie in (0, 1]"
            )));
        }
        Ok(DiamRatioParams { lambda, a })
    }
}

/// `λ = p`, `A = 1/max{2q·4^p, 2q·6^{1/p}}`.
pub fn pq_to_diam(params: PQParams) -> DiamRatioParams {
    let PQParams { p, q } = params;
    let a = 1.0 / (2.0 * q * 4f64.powf(p)).max(2.0 * q * 6f64.powf(1.0 / p));
    DiamRatioParams { lambda: p, a }
}

/// `p = λ`, `q = max{2^λ/A, 2^λ/A²}`.
pub fn diam_to_pq(params: DiamRatioParams) -> PQParams {
    let DiamRatioParams { lambda, a } = params;
    let two = 2f64.powf(lambda);
    PQParams {
        p: lambda,
        q: (two / a).max(two / (a * a)),
    }
}

/// `|f(x)f(a)| / (η(t)·|f(x)f(b)|)` for one triple; at most 1 when the
/// inequality holds there.
pub fn pq_ratio(f: &MapSpec, params: PQParams, x: usize, a: usize, b: usize) -> f64 {
    let (s, t) = (f.source(), f.target());
    let ts = s.d(x, a) / s.d(x, b);
    let (fx, fa, fb) = (f.apply(x), f.apply(a), f.apply(b));
    let image = t.d(fx, fa) / t.d(fx, fb);
    image / (params.q * ts.powf(params.p).max(ts.powf(1.0 / params.p)))
}

fn sweep_triples(f: &MapSpec, params: PQParams) -> ViolationReport {
    let n = f.len();
    (0..n)
        .into_par_iter()
        .map(|x| {
            let mut rep = ViolationReport::empty();
            for a in (0..n).filter(|&a| a != x) {
                for b in (0..n).filter(|&b| b != x && b != a) {
                    rep.observe(pq_ratio(f, params, x, a, b), || Witness::Triple { x, a, b });
                }
            }
            rep
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(ViolationReport::empty(), ViolationReport::merge)
}

/// Exhaustive check over all triples `x ∉ {a, b}`, `a ≠ b`.
pub fn check_pq(f: &MapSpec, params: PQParams) -> Result<ViolationReport, PqError> {
    if f.len() < 3 {
        return Err(PqError::TooFewPoints(f.len(), 3));
    }
    Ok(sweep_triples(f, params))
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= RATIO_SLACK * a.abs().max(b.abs())
}

/// For each `p` in the grid the least admissible `q ≥ 1`; returns the pair
/// with the smallest `q`, preferring the smaller `p` among near-equal values.
pub fn fit_pq(f: &MapSpec, p_grid: &[f64]) -> Result<(PQParams, ViolationReport), PqError> {
    if f.len() < 3 {
        return Err(PqError::TooFewPoints(f.len(), 3));
    }
    if p_grid.is_empty() {
        return Err(PqError::InvalidParams("empty p grid".into()));
    }
    let mut best: Option<PQParams> = None;
    for &p in p_grid {
        let probe = PQParams::new(p, 1.0)?;
        let q = sweep_triples(f, probe).worst_ratio.max(1.0);
        let cand = PQParams { p, q };
        best = Some(match best {
            None => cand,
            Some(b) if tied(q, b.q) => {
                if p < b.p {
                    cand
                } else {
                    b
                }
            }
            Some(b) if q < b.q => cand,
            Some(b) => b,
        });
    }
    let params = best.expect("grid is non-empty");
    Ok((params, sweep_triples(f, params)))
}

/// Nested set pairs `(inner, outer)` over which the diameter ratios are checked.
#[derive(Debug, Clone, PartialEq)]
pub enum SetFamily {
    /// Approximation balls of the source at `r = 1/6` plus the whole space,
    /// each paired with its 2-point subsets.
    Default,
    /// Given outer sets, each paired with its 2-point subsets.
    Balls(Vec<PointSet>),
    /// 2-point inner sets inside 2- and 3-point outer sets.
    SmallNested,
    /// Every nested pair of sets with at least two points.
    PowerSet,
}

/// Distinct balls of the approximation of `space` at scale `r`, with the
/// whole space, sorted.
pub fn ball_family(space: &FiniteMetricSpace, r: f64) -> Vec<PointSet> {
    let mut sets = vec![space.whole()];
    if let Ok(g) = build_approximation(space, r) {
        sets.extend(g.vertices().iter().map(|v| v.ball.clone()));
    }
    sets.sort();
    sets.dedup();
    sets
}

/// Worst of the two diameter-ratio inequalities at one nested pair, as a
/// quantity that is at most 1 when both hold.
pub fn diam_ratio_value(
    f: &MapSpec,
    params: DiamRatioParams,
    inner: &PointSet,
    outer: &PointSet,
) -> f64 {
    let (s, t) = (f.source(), f.target());
    let u = s.diameter_of(inner.members()) / s.diameter_of(outer.members());
    let rho = t.diameter_of(f.image(inner).members()) / t.diameter_of(f.image(outer).members());
    ratio_from(params, u, rho)
}

#[inline]
fn ratio_from(params: DiamRatioParams, u: f64, rho: f64) -> f64 {
    let lower = params.a * u.powf(params.lambda) / rho;
    let upper = rho * params.a / u.powf(1.0 / params.lambda);
    lower.max(upper)
}

fn pairs_in(set: &PointSet) -> impl Iterator<Item = PointSet> + '_ {
    let m = set.members();
    (0..m.len()).flat_map(move |i| (i + 1..m.len()).map(move |j| PointSet::new(vec![m[i], m[j]])))
}

fn sweep_outer_sets(f: &MapSpec, params: DiamRatioParams, outers: &[PointSet]) -> ViolationReport {
    outers
        .par_iter()
        .map(|outer| {
            let mut rep = ViolationReport::empty();
            if outer.len() < 2 {
                return rep;
            }
            for inner in pairs_in(outer) {
                rep.observe(diam_ratio_value(f, params, &inner, outer), || {
                    Witness::SetPair {
                        inner: inner.clone(),
                        outer: outer.clone(),
                    }
                });
            }
            rep
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(ViolationReport::empty(), ViolationReport::merge)
}

fn small_outer_sets(n: usize) -> Vec<PointSet> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(PointSet::new(vec![i, j]));
            for k in j + 1..n {
                out.push(PointSet::new(vec![i, j, k]));
            }
        }
    }
    out
}

fn mask_set(mask: u32) -> PointSet {
    PointSet::new((0..32).filter(|i| mask >> i & 1 == 1).collect())
}

fn sweep_power_set(f: &MapSpec, params: DiamRatioParams) -> Result<ViolationReport, PqError> {
    let n = f.len();
    if n > POWER_SET_LIMIT {
        return Err(PqError::FamilyTooLarge {
            got: n,
            limit: POWER_SET_LIMIT,
        });
    }
    let (s, t) = (f.source(), f.target());
    let full = 1u32 << n;
    let diam_of = |space: &FiniteMetricSpace, map: &dyn Fn(usize) -> usize| -> Vec<f64> {
        (0..full)
            .map(|m| {
                let pts: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).map(map).collect();
                space.diameter_of(&pts)
            })
            .collect()
    };
    let ds = diam_of(s, &|i| i);
    let dt = diam_of(t, &|i| f.apply(i));
    let report = (0..full)
        .into_par_iter()
        .filter(|m| m.count_ones() >= 2)
        .map(|outer| {
            let mut rep = ViolationReport::empty();
            // submasks of `outer` in decreasing order
            let mut inner = outer;
            while inner > 0 {
                if inner.count_ones() >= 2 {
                    let u = ds[inner as usize] / ds[outer as usize];
                    let rho = dt[inner as usize] / dt[outer as usize];
                    rep.observe(ratio_from(params, u, rho), || Witness::SetPair {
                        inner: mask_set(inner),
                        outer: mask_set(outer),
                    });
                }
                inner = (inner - 1) & outer;
            }
            rep
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(ViolationReport::empty(), ViolationReport::merge);
    Ok(report)
}

/// Checks both diameter-ratio inequalities over `family`.
pub fn check_diam_ratio(
    f: &MapSpec,
    params: DiamRatioParams,
    family: &SetFamily,
) -> Result<ViolationReport, PqError> {
    if f.len() < 2 {
        return Err(PqError::TooFewPoints(f.len(), 2));
    }
    match family {
        SetFamily::Default => Ok(sweep_outer_sets(
            f,
            params,
            &ball_family(f.source(), DEFAULT_FAMILY_R),
        )),
        SetFamily::Balls(sets) => Ok(sweep_outer_sets(f, params, sets)),
        SetFamily::SmallNested => Ok(sweep_outer_sets(f, params, &small_outer_sets(f.len()))),
        SetFamily::PowerSet => sweep_power_set(f, params),
    }
}

/// The largest `A ≤ 1` for which the diameter-ratio inequalities hold with
/// the given `λ` on `family`.
pub fn fit_diam_ratio(
    f: &MapSpec,
    lambda: f64,
    family: &SetFamily,
) -> Result<(DiamRatioParams, ViolationReport), PqError> {
    let probe = DiamRatioParams::new(lambda, 1.0)?;
    let worst = check_diam_ratio(f, probe, family)?.worst_ratio;
    // ratio_from is linear in A, so scaling A by 1/worst makes the worst pair tight.
    let a = if worst > 1.0 { 1.0 / worst } else { 1.0 };
    let params = DiamRatioParams::new(lambda, a)?;
    let report = check_diam_ratio(f, params, family)?;
    Ok((params, report))
}

/// Largest preimage diameter among target sets whose diameter lies in
/// `[2^log2, 2^{log2+1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProperBucket {
    pub log2_diam: i32,
    pub sets: usize,
    pub max_target_diam: f64,
    pub max_preimage_diam: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProperReport {
    pub buckets: Vec<ProperBucket>,
    /// Compares `diam f⁻¹(V)` against `diam Z·(diam V / (A·diam Z'))^{1/λ}`.
    pub bound: ViolationReport,
}

/// `diam f⁻¹(V) / (diam Z·(diam V/(A·diam Z'))^{1/λ})`.
pub fn preimage_ratio(f: &MapSpec, params: DiamRatioParams, set: &PointSet) -> f64 {
    let (s, t) = (f.source(), f.target());
    let pre = s.diameter_of(f.preimage(set).members());
    let bound =
        s.diam() * (t.diameter_of(set.members()) / (params.a * t.diam())).powf(1.0 / params.lambda);
    pre / bound
}

/// Preimage diameters of target sets, bucketed by diameter, with the bound
/// the diameter-ratio inequalities impose on them. Without an explicit
/// family the balls of the target approximation at `r = 1/6` are used.
pub fn check_metrically_proper(
    f: &MapSpec,
    family: Option<&[PointSet]>,
    params: DiamRatioParams,
) -> ProperReport {
    let owned;
    let sets: &[PointSet] = match family {
        Some(sets) => sets,
        None => {
            owned = ball_family(f.target(), DEFAULT_FAMILY_R);
            &owned
        }
    };
    let (s, t) = (f.source(), f.target());
    let mut buckets: Vec<ProperBucket> = Vec::new();
    let mut bound = ViolationReport::empty();
    for set in sets.iter().filter(|v| v.len() >= 2) {
        let dv = t.diameter_of(set.members());
        let dpre = s.diameter_of(f.preimage(set).members());
        let log2 = dv.log2().floor() as i32;
        match buckets.iter_mut().find(|b| b.log2_diam == log2) {
            Some(b) => {
                b.sets += 1;
                b.max_target_diam = b.max_target_diam.max(dv);
                b.max_preimage_diam = b.max_preimage_diam.max(dpre);
            }
            None => buckets.push(ProperBucket {
                log2_diam: log2,
                sets: 1,
                max_target_diam: dv,
                max_preimage_diam: dpre,
            }),
        }
        bound.observe(preimage_ratio(f, params, set), || Witness::Preimage {
            set: set.clone(),
        });
    }
    buckets.sort_by_key(|b| b.log2_diam);
    ProperReport { buckets, bound }
}

/// Whether `diam(D₁ ∪ D₂) < (4a + 2)·diam(A₁ ∪ A₂)`, after checking that the
/// inputs satisfy `Aᵢ ⊆ Dᵢ`, `diam Dᵢ ≤ a·diam Aᵢ` and `diam(A₁ ∪ A₂) > 0`.
pub fn union_lemma_check(
    space: &FiniteMetricSpace,
    a1: &PointSet,
    d1: &PointSet,
    a2: &PointSet,
    d2: &PointSet,
    a: f64,
) -> Result<bool, PqError> {
    let fail = |msg: String| Err(PqError::PreconditionViolated(msg));
    if a.is_nan() || a <= 1.0 {
        return fail(format!("a = {a} must exceed 1"));
    }
    if a1.is_empty() || a2.is_empty() {
        return fail("A₁ and A₂ must be non-empty".into());
    }
    if a1
        .iter()
        .chain(a2.iter())
        .chain(d1.iter())
        .chain(d2.iter())
        .any(|i| i >= space.len())
    {
        return fail("point index out of range".into());
    }
    if !a1.is_subset(d1) || !a2.is_subset(d2) {
        return fail("Aᵢ ⊄ Dᵢ".into());
    }
    for (ai, di, name) in [(a1, d1, 1), (a2, d2, 2)] {
        let (da, dd) = (
            space.diameter_of(ai.members()),
            space.diameter_of(di.members()),
        );
        if dd > a * da {
            return fail(format!(
                "diam D{name} = {dd} exceeds a·diam A{name} = {}",
                a * da
            ));
        }
    }
    let da = space.diameter_of(a1.union(a2).members());
    if da <= 0.0 {
        return fail("A₁ ∪ A₂ is a single point".into());
    }
    let dd = space.diameter_of(d1.union(d2).members());
    Ok(dd < (4.0 * a + 2.0) * da)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::default_labels;
    use proptest::prelude::*;

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        let n = xs.len();
        let m: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| (xs[i] - xs[j]).abs()).collect())
            .collect();
        FiniteMetricSpace::new(default_labels(n), m).unwrap()
    }

    fn golden(n: usize) -> FiniteMetricSpace {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let xs: Vec<f64> = (1..=n).map(|i| (i as f64 * phi).fract()).collect();
        line(&xs)
    }

    /// Direct evaluation of the defining inequality, without forming ratios.
    fn pq_holds(f: &MapSpec, p: f64, q: f64) -> bool {
        let (s, t) = (f.source(), f.target());
        let n = f.len();
        for x in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if x == a || x == b || a == b {
                        continue;
                    }
                    let tt = s.d(x, a) / s.d(x, b);
                    let eta = q * tt.powf(p).max(tt.powf(1.0 / p));
                    let lhs = t.d(f.apply(x), f.apply(a));
                    let rhs = eta * t.d(f.apply(x), f.apply(b));
                    if lhs > rhs * (1.0 + 1e-12) {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn identity_ratios_are_exactly_one() {
        let f = MapSpec::identity(&golden(7));
        let rep = check_pq(&f, PQParams::new(1.0, 1.0).unwrap()).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.worst_ratio, 1.0);
        assert_eq!(rep.checked, 7 * 6 * 5);
    }

    #[test]
    fn snowflake_half_is_two_one_symmetric() {
        let f = MapSpec::snowflake(&golden(10), 0.5).unwrap();
        let rep = check_pq(&f, PQParams::new(2.0, 1.0).unwrap()).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(pq_holds(&f, 2.0, 1.0));
        assert!(!pq_holds(&f, 1.0, 1.0));
    }

    #[test]
    fn equilateral_swap_is_isometric() {
        let m = vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        let s = FiniteMetricSpace::new(default_labels(3), m).unwrap();
        let f = MapSpec::new(s.clone(), s, vec![1, 0, 2]).unwrap();
        let rep = check_pq(&f, PQParams::new(1.0, 1.0).unwrap()).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.worst_ratio, 1.0);
    }

    #[test]
    fn too_few_points() {
        let f = MapSpec::identity(&line(&[0.0, 1.0]));
        assert_eq!(
            check_pq(&f, PQParams::new(1.0, 1.0).unwrap()),
            Err(PqError::TooFewPoints(2, 3))
        );
    }

    #[test]
    fn witness_reproduces_worst_ratio() {
        let s = line(&[0.0, 0.1, 0.35, 0.4, 0.8, 1.0]);
        let f = MapSpec::new(s.clone(), s, vec![3, 0, 5, 1, 4, 2]).unwrap();
        let params = PQParams::new(2.0, 1.0).unwrap();
        let rep = check_pq(&f, params).unwrap();
        assert!(!rep.passed);
        let Some(Witness::Triple { x, a, b }) = rep.witness else {
            panic!("expected a triple witness")
        };
        assert_eq!(pq_ratio(&f, params, x, a, b), rep.worst_ratio);
    }

    #[test]
    fn fit_identity_and_snowflake() {
        let grid = [1.0, 1.5, 2.0, 3.0, 4.0];
        let (p, rep) = fit_pq(&MapSpec::identity(&golden(8)), &grid).unwrap();
        assert_eq!((p.p, p.q), (1.0, 1.0));
        assert!(rep.passed);
        let (p, rep) = fit_pq(&MapSpec::snowflake(&golden(8), 0.5).unwrap(), &grid).unwrap();
        assert_eq!(p.p, 2.0);
        assert!((p.q - 1.0).abs() < 1e-12);
        assert!(rep.passed);
    }

    #[test]
    fn scrambled_line_needs_q_above_one() {
        let s = line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let f = MapSpec::new(s.clone(), s, vec![2, 5, 0, 4, 1, 3]).unwrap();
        for p in [1.0, 2.0, 4.0, 8.0] {
            let (fit, _) = fit_pq(&f, &[p]).unwrap();
            assert!(fit.q > 1.0, "p = {p}");
            // The fitted q is the least admissible one.
            assert!(pq_holds(&f, p, fit.q));
            assert!(!pq_holds(&f, p, fit.q * 0.999));
        }
    }

    #[test]
    fn conversion_examples() {
        let d = pq_to_diam(PQParams::new(1.0, 1.0).unwrap());
        assert_eq!(d.lambda, 1.0);
        assert!((d.a - 1.0 / 12.0).abs() < 1e-15);
        let d = pq_to_diam(PQParams::new(2.0, 1.0).unwrap());
        assert_eq!(d.lambda, 2.0);
        assert!((d.a - 1.0 / 32.0).abs() < 1e-15);
        let cases = [
            ((1.0, 1.0), 2.0),
            ((1.0, 1.0 / 12.0), 288.0),
            ((2.0, 0.5), 16.0),
        ];
        for ((l, a), q) in cases {
            let p = diam_to_pq(DiamRatioParams::new(l, a).unwrap());
            assert_eq!(p.p, l);
            assert!((p.q - q).abs() < 1e-12 * q, "{p:?}");
        }
        assert!(DiamRatioParams::new(1.0, 1.5).is_err());
        assert!(DiamRatioParams::new(0.5, 0.5).is_err());
        assert!(PQParams::new(1.0, 0.9).is_err());
    }

    #[test]
    fn identity_diam_ratio_is_tight_everywhere() {
        let f = MapSpec::identity(&golden(9));
        let params = DiamRatioParams::new(1.0, 1.0).unwrap();
        for family in [
            SetFamily::Default,
            SetFamily::SmallNested,
            SetFamily::PowerSet,
        ] {
            let rep = check_diam_ratio(&f, params, &family).unwrap();
            assert!(rep.passed, "{family:?}");
            assert_eq!(rep.worst_ratio, 1.0, "{family:?}");
        }
    }

    #[test]
    fn snowflake_passes_converted_constants() {
        let f = MapSpec::snowflake(&golden(12), 0.5).unwrap();
        let params = pq_to_diam(PQParams::new(2.0, 1.0).unwrap());
        for family in [
            SetFamily::Default,
            SetFamily::SmallNested,
            SetFamily::PowerSet,
        ] {
            let rep = check_diam_ratio(&f, params, &family).unwrap();
            assert!(rep.passed, "{family:?}: {rep:?}");
        }
    }

    #[test]
    fn power_set_limit() {
        let f = MapSpec::identity(&golden(13));
        let params = DiamRatioParams::new(1.0, 1.0).unwrap();
        assert_eq!(
            check_diam_ratio(&f, params, &SetFamily::PowerSet),
            Err(PqError::FamilyTooLarge { got: 13, limit: 12 })
        );
    }

    #[test]
    fn power_set_counts_and_witness() {
        let s = line(&[0.0, 0.3, 0.5, 1.0, 1.7]);
        let f = MapSpec::new(s.clone(), s, vec![4, 1, 3, 0, 2]).unwrap();
        let params = DiamRatioParams::new(1.0, 0.9).unwrap();
        let rep = check_diam_ratio(&f, params, &SetFamily::PowerSet).unwrap();
        // nested pairs of ≥2-point sets of a 5-point set
        let mut expect = 0;
        for outer in 0u32..32 {
            if outer.count_ones() < 2 {
                continue;
            }
            let k = outer.count_ones();
            expect += (1usize << k) - 1 - k as usize;
        }
        assert_eq!(rep.checked, expect);
        let Some(Witness::SetPair { inner, outer }) = rep.witness.clone() else {
            panic!()
        };
        assert_eq!(
            diam_ratio_value(&f, params, &inner, &outer),
            rep.worst_ratio
        );
        assert!(!rep.passed);
    }

    #[test]
    fn fitted_a_is_tight() {
        let s = golden(8);
        let f = MapSpec::snowflake(&s, 0.5).unwrap();
        let (params, rep) = fit_diam_ratio(&f, 2.0, &SetFamily::SmallNested).unwrap();
        assert!(rep.passed);
        assert!((rep.worst_ratio - 1.0).abs() < 1e-12);
        assert!(params.a <= 1.0);
    }

    #[test]
    fn proper_identity_and_snowflake() {
        let s = golden(10);
        let f = MapSpec::identity(&s);
        let rep = check_metrically_proper(&f, None, DiamRatioParams::new(1.0, 1.0).unwrap());
        for b in &rep.buckets {
            assert!(b.max_preimage_diam <= b.max_target_diam);
        }
        assert!(rep.bound.passed);
        let f = MapSpec::snowflake(&s, 0.5).unwrap();
        let sets = ball_family(f.target(), DEFAULT_FAMILY_R);
        for v in sets.iter().filter(|v| v.len() > 1) {
            // on a line every set's diameter is attained by a pair, so the square relation is exact
            let dv = f.target().diameter_of(v.members());
            let dp = f.source().diameter_of(f.preimage(v).members());
            assert!((dp - dv * dv).abs() < 1e-12);
        }
        let params = pq_to_diam(PQParams::new(2.0, 1.0).unwrap());
        assert!(
            check_metrically_proper(&f, Some(&sets), params)
                .bound
                .passed
        );
    }

    #[test]
    fn union_lemma_examples() {
        let s = line(&[0.0, 1.0, 5.0, 5.01, 9.0, 9.01]);
        let two = PointSet::new(vec![0, 1]);
        assert_eq!(union_lemma_check(&s, &two, &two, &two, &two, 2.0), Ok(true));
        let a1 = PointSet::new(vec![2, 3]);
        let d1 = PointSet::new(vec![0, 2, 3]);
        assert!(matches!(
            union_lemma_check(&s, &a1, &d1, &a1, &a1, 3.0),
            Err(PqError::PreconditionViolated(_))
        ));
        assert!(matches!(
            union_lemma_check(&s, &two, &two, &two, &two, 1.0),
            Err(PqError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn map_construction_and_inverse() {
        let s = line(&[0.0, 1.0, 3.0]);
        assert!(matches!(
            MapSpec::new(s.clone(), s.clone(), vec![0, 0, 1]),
            Err(PqError::NotBijective(_))
        ));
        let f = MapSpec::new(s.clone(), s.clone(), vec![2, 0, 1]).unwrap();
        let g = f.inverse();
        for i in 0..3 {
            assert_eq!(g.apply(f.apply(i)), i);
        }
        let pairs = f.label_pairs();
        assert_eq!(MapSpec::from_label_pairs(s.clone(), s, &pairs).unwrap(), f);
    }

    fn cloud(n: usize) -> impl Strategy<Value = FiniteMetricSpace> {
        prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), n).prop_filter_map(
            "distinct points",
            |pts| {
                let coords: Vec<Vec<f64>> = pts.iter().map(|&(x, y)| vec![x, y]).collect();
                FiniteMetricSpace::from_points(default_labels(coords.len()), &coords, 2.0).ok()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn passing_is_monotone_in_q(s in cloud(7), scale in 1.0f64..4.0) {
            let alpha = 1.0 / scale;
            let f = MapSpec::snowflake(&s, alpha).unwrap();
            let (fit, rep) = fit_pq(&f, &[1.0, 2.0]).unwrap();
            prop_assert!(rep.passed);
            for bump in [1.0, 1.5, 10.0] {
                let r = check_pq(&f, PQParams::new(fit.p, fit.q * bump).unwrap()).unwrap();
                prop_assert!(r.passed);
            }
        }

        #[test]
        fn forward_conversion(s in cloud(8), alpha in 0.3f64..1.0) {
            let f = MapSpec::snowflake(&s, alpha).unwrap();
            let (fit, rep) = fit_pq(&f, &[1.0, 2.0, 4.0]).unwrap();
            prop_assert!(rep.passed);
            let d = pq_to_diam(fit);
            prop_assert!(check_diam_ratio(&f, d, &SetFamily::Default).unwrap().passed);
            prop_assert!(check_diam_ratio(&f, d, &SetFamily::PowerSet).unwrap().passed);
        }

        #[test]
        fn reverse_conversion(
            s in cloud(8),
            alpha in 0.3f64..1.0,
            perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle(),
        ) {
            let target = s.snowflake(alpha).unwrap();
            let f = MapSpec::new(s, target, perm).unwrap();
            let (d, rep) = fit_diam_ratio(&f, 2.0, &SetFamily::SmallNested).unwrap();
            prop_assert!(rep.passed);
            prop_assert!(check_pq(&f, diam_to_pq(d)).unwrap().passed);
        }

        #[test]
        fn inverse_has_finite_constants(s in cloud(7), alpha in 0.3f64..1.0) {
            let f = MapSpec::snowflake(&s, alpha).unwrap();
            let (fit, _) = fit_pq(&f.inverse(), &[1.0, 2.0, 4.0]).unwrap();
            prop_assert!(fit.q.is_finite());
        }

        #[test]
        fn union_lemma_holds(
            s in cloud(30),
            seeds in prop::collection::vec(0usize..30, 4),
            a in 1.01f64..4.0,
        ) {
            // Dᵢ is Aᵢ plus every point close enough to Aᵢ's first point
            // that diam Dᵢ ≤ a·diam Aᵢ holds by the triangle inequality.
            let grow = |ai: &PointSet| {
                let c = ai.members()[0];
                let rho = (a - 1.0).min(a / 2.0) * s.diameter_of(ai.members());
                ai.union(&s.ball(c, rho))
            };
            let a1 = PointSet::new(seeds[0..2].to_vec());
            let a2 = PointSet::new(seeds[2..4].to_vec());
            let (d1, d2) = (grow(&a1), grow(&a2));
            prop_assert_eq!(union_lemma_check(&s, &a1, &d1, &a2, &d2, a), Ok(true));
        }
    }
}
