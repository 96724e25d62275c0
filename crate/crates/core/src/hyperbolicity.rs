//! Gromov products, four-point δ, and visual-metric constants on graphs.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::approx::{ApproximationGraph, DistanceTable, VertexId};
use crate::error::HyperbolicityError;
use crate::metric::FiniteMetricSpace;

/// A multiple of ½, stored as twice its value so arithmetic stays exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInteger(i64);

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger(0);

    pub fn from_twice(twice: i64) -> Self {
        HalfInteger(twice)
    }

    pub fn from_int(v: i64) -> Self {
        HalfInteger(2 * v)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}", self.as_f64())
        }
    }
}

impl Serialize for HalfInteger {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for HalfInteger {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        let twice = 2.0 * v;
        if twice.fract() != 0.0 {
            return Err(serde::de::Error::custom(format!(
                "{v} is not a half-integer"
            )));
        }
        Ok(HalfInteger(twice as i64))
    }
}

/// `(x|y)_o = ½(|xo| + |yo| − |xy|)`.
pub fn gromov_product(
    g: &ApproximationGraph,
    x: VertexId,
    y: VertexId,
    o: VertexId,
) -> HalfInteger {
    gromov_from_table(g.distances(), x, y, o)
}

fn gromov_from_table(d: &DistanceTable, x: VertexId, y: VertexId, o: VertexId) -> HalfInteger {
    HalfInteger(d.get(x, o) as i64 + d.get(y, o) as i64 - d.get(x, y) as i64)
}

/// `min{(x|z)_o, (z|y)_o} − (x|y)_o`.
pub fn four_point_defect(
    g: &ApproximationGraph,
    o: VertexId,
    x: VertexId,
    y: VertexId,
    z: VertexId,
) -> HalfInteger {
    let d = g.distances();
    let xz = gromov_from_table(d, x, z, o);
    let zy = gromov_from_table(d, z, y, o);
    let xy = gromov_from_table(d, x, y, o);
    HalfInteger(xz.0.min(zy.0) - xy.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadruple {
    pub o: VertexId,
    pub x: VertexId,
    pub y: VertexId,
    pub z: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub delta: HalfInteger,
    pub witness: Quadruple,
    /// False when quadruples were sampled; `delta` is then a lower bound.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaOptions {
    pub base: Option<VertexId>,
    pub exhaustive_limit: usize,
    /// Number of sampled quadruples above the limit; `None` refuses instead.
    pub samples: Option<usize>,
    pub seed: u64,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        DeltaOptions {
            base: None,
            exhaustive_limit: 60,
            samples: None,
            seed: 0,
        }
    }
}

/// Largest δ-inequality defect over base points and triples.
pub fn delta_four_point(
    g: &ApproximationGraph,
    options: &DeltaOptions,
) -> Result<HyperbolicityReport, HyperbolicityError> {
    let n = g.len();
    let d = g.distances();
    if n > options.exhaustive_limit {
        let Some(samples) = options.samples else {
            return Err(HyperbolicityError::TooLarge {
                vertices: n,
                limit: options.exhaustive_limit,
            });
        };
        return Ok(sampled(g, options.base, samples, options.seed));
    }
    if let Some(o) = options.base {
        return Ok(based(g, d, o));
    }

    let (twice, witness) = exhaustive_sweep(n, |a, b| d.get(VertexId(a), VertexId(b)) as i64);
    Ok(HyperbolicityReport {
        delta: HalfInteger(twice),
        witness,
        exhaustive: true,
    })
}

/// Exhaustive four-point δ for any finite metric given as a square matrix
/// of integer distances, e.g. hop counts of an arbitrary graph.
pub fn delta_of_matrix(dist: &[Vec<u32>]) -> HyperbolicityReport {
    let (twice, witness) = exhaustive_sweep(dist.len(), |a, b| dist[a][b] as i64);
    HyperbolicityReport {
        delta: HalfInteger(twice),
        witness,
        exhaustive: true,
    }
}

/// Over all base points the defect of `(o, x, y, z)` is half of
/// `(|xy| + |zo|) − max(|xz| + |yo|, |zy| + |xo|)`, so the maximum over
/// labelings of a 4-set is half the gap between its two largest pair sums.
/// Returns twice the maximum and a witness; ties keep the earliest 4-set.
fn exhaustive_sweep(n: usize, d: impl Fn(usize, usize) -> i64 + Sync) -> (i64, Quadruple) {
    let zero = Quadruple {
        o: VertexId(0),
        x: VertexId(0),
        y: VertexId(0),
        z: VertexId(0),
    };
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut best = (0i64, zero);
            for b in a + 1..n {
                for c in b + 1..n {
                    for e in c + 1..n {
                        let sums = [
                            (d(a, b) + d(c, e), [a, b, c, e]),
                            (d(a, c) + d(b, e), [a, c, b, e]),
                            (d(a, e) + d(b, c), [a, e, b, c]),
                        ];
                        let top = (0..3)
                            .max_by_key(|&i| (sums[i].0, std::cmp::Reverse(i)))
                            .unwrap();
                        let second = (0..3)
                            .filter(|&i| i != top)
                            .map(|i| sums[i].0)
                            .max()
                            .unwrap();
                        let gap = sums[top].0 - second;
                        if gap > best.0 {
                            let [x, y, z, o] = sums[top].1.map(VertexId);
                            best = (gap, Quadruple { o, x, y, z });
                        }
                    }
                }
            }
            best
        })
        .reduce_with(|l, r| if r.0 > l.0 { r } else { l })
        .unwrap_or((0, zero))
}

fn based(g: &ApproximationGraph, d: &DistanceTable, o: VertexId) -> HyperbolicityReport {
    let n = g.len();
    let mut best = (
        0i64,
        Quadruple {
            o,
            x: o,
            y: o,
            z: o,
        },
    );
    for x in (0..n).map(VertexId) {
        for y in (0..n).map(VertexId) {
            let xy = gromov_from_table(d, x, y, o).0;
            for z in (0..n).map(VertexId) {
                let m = gromov_from_table(d, x, z, o)
                    .0
                    .min(gromov_from_table(d, z, y, o).0);
                if m - xy > best.0 {
                    best = (m - xy, Quadruple { o, x, y, z });
                }
            }
        }
    }
    HyperbolicityReport {
        delta: HalfInteger(best.0),
        witness: best.1,
        exhaustive: true,
    }
}

fn sampled(
    g: &ApproximationGraph,
    base: Option<VertexId>,
    samples: usize,
    seed: u64,
) -> HyperbolicityReport {
    let n = g.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = base.unwrap_or(VertexId(0));
    let mut best = (
        HalfInteger::ZERO,
        Quadruple {
            o: first,
            x: first,
            y: first,
            z: first,
        },
    );
    for _ in 0..samples {
        let o = base.unwrap_or_else(|| VertexId(rng.gen_range(0..n)));
        let [x, y, z] = [(); 3].map(|_| VertexId(rng.gen_range(0..n)));
        let defect = four_point_defect(g, o, x, y, z);
        if defect > best.0 {
            best = (defect, Quadruple { o, x, y, z });
        }
    }
    HyperbolicityReport {
        delta: best.0,
        witness: best.1,
        exhaustive: false,
    }
}

/// Multiplicative constants sandwiching `d_Z` between multiples of
/// `a^{−(v|v')_o}` over deepest-level vertex pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualMetricFit {
    pub base: VertexId,
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
    pub sample_level: i32,
    pub pairs: usize,
}

pub fn fit_visual_constants(
    g: &ApproximationGraph,
    space: &FiniteMetricSpace,
    a: Option<f64>,
) -> Result<VisualMetricFit, HyperbolicityError> {
    let a = a.unwrap_or(1.0 / g.r());
    if a.is_nan() || a <= 1.0 {
        return Err(HyperbolicityError::InvalidBase(a));
    }
    let level = g.k_max();
    let deepest = g.level_vertices(level);
    if deepest.len() < 2 {
        return Err(HyperbolicityError::DegenerateLevel(deepest.len()));
    }
    let o = g.root();
    let (mut c1, mut c2, mut pairs) = (f64::INFINITY, 0.0f64, 0usize);
    for (i, &v) in deepest.iter().enumerate() {
        for &w in &deepest[i + 1..] {
            let (cv, cw) = (g.vertex(v).center, g.vertex(w).center);
            if cv == cw {
                continue;
            }
            let rho = space.d(cv, cw) * a.powf(gromov_product(g, v, w, o).as_f64());
            c1 = c1.min(rho);
            c2 = c2.max(rho);
            pairs += 1;
        }
    }
    Ok(VisualMetricFit {
        base: o,
        a,
        c1,
        c2,
        sample_level: level,
        pairs,
    })
}

/// `max_y [ |oy| − max_w (y|w)_o ]` with `w` over the deepest level and `o` the root.
pub fn visuality_constant(g: &ApproximationGraph) -> HalfInteger {
    let o = g.root();
    let deepest = g.level_vertices(g.k_max());
    let d = g.distances();
    g.vertex_ids()
        .map(|y| {
            let reach = deepest
                .iter()
                .map(|&w| gromov_from_table(d, y, w, o))
                .max()
                .unwrap_or(HalfInteger::ZERO);
            HalfInteger(2 * d.get(o, y) as i64 - reach.0)
        })
        .max()
        .unwrap_or(HalfInteger::ZERO)
}
