//! Generators for test and demonstration spaces.
//!
//! Graph construction compares distances against `r^k`, `2r^k` and `4r^k`
//! exactly, so a distance sitting on one of those thresholds makes the graph
//! depend on rounding. The standard corpus scales every generator by an
//! irrational factor and [`threshold_clearance`] measures how far the
//! resulting distances stay from all thresholds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx::{level_scale, singleton_level, truncation_level};
use crate::metric::FiniteMetricSpace;

/// `1/φ`, applied to generators whose distances are rational.
pub const IRRATIONAL_SCALE: f64 = 0.618_033_988_749_894_8;

fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn from_coords(prefix: &str, coords: &[Vec<f64>]) -> FiniteMetricSpace {
    let labels = (0..coords.len()).map(|i| format!("{prefix}{i}")).collect();
    FiniteMetricSpace::from_points(labels, coords, 2.0).expect("generated points are distinct")
}

/// `n` points `0, step, 2·step, …` on the real line.
pub fn uniform_line(n: usize, step: f64) -> FiniteMetricSpace {
    let coords: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 * step]).collect();
    from_coords("x", &coords)
}

/// The points `frac(iφ)` for `i = 1..=n`, an irregular subset of `[0, 1]`.
pub fn golden_line(n: usize) -> FiniteMetricSpace {
    let phi = golden_ratio();
    let coords: Vec<Vec<f64>> = (1..=n).map(|i| vec![(i as f64 * phi).fract()]).collect();
    from_coords("g", &coords)
}

/// A `w × h` grid with spacing `step` in the Euclidean plane.
pub fn grid(w: usize, h: usize, step: f64) -> FiniteMetricSpace {
    let coords: Vec<Vec<f64>> = (0..h)
        .flat_map(|y| (0..w).map(move |x| vec![x as f64 * step, y as f64 * step]))
        .collect();
    from_coords("q", &coords)
}

/// Leaves of a complete `branching`-ary tree of the given depth, with
/// `d(x, y) = scale·ratio^m` where `m` is the depth of their common ancestor.
pub fn ultrametric_tree(branching: usize, depth: u32, ratio: f64, scale: f64) -> FiniteMetricSpace {
    let n = branching.pow(depth);
    let digits = |mut i: usize| -> Vec<usize> {
        let mut out = vec![0; depth as usize];
        for slot in out.iter_mut().rev() {
            *slot = i % branching;
            i /= branching;
        }
        out
    };
    let addr: Vec<Vec<usize>> = (0..n).map(digits).collect();
    let matrix: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return 0.0;
                    }
                    let m = addr[i]
                        .iter()
                        .zip(&addr[j])
                        .take_while(|(a, b)| a == b)
                        .count();
                    scale * ratio.powi(m as i32)
                })
                .collect()
        })
        .collect();
    let labels = (0..n).map(|i| format!("u{i}")).collect();
    FiniteMetricSpace::new(labels, matrix).expect("ultrametrics satisfy the axioms")
}

/// Left endpoints of the `2^depth` intervals at the given depth of the
/// middle-thirds construction, scaled by `scale`.
pub fn cantor(depth: u32, scale: f64) -> FiniteMetricSpace {
    let mut xs = vec![0.0f64];
    let mut len = 1.0f64;
    for _ in 0..depth {
        len /= 3.0;
        xs = xs.iter().flat_map(|&x| [x, x + 2.0 * len]).collect();
    }
    let coords: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x * scale]).collect();
    from_coords("c", &coords)
}

/// `n` uniform points of `[0, 1]^dim` from a seeded generator.
pub fn random_cloud(n: usize, dim: usize, seed: u64) -> FiniteMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
        .collect();
    from_coords("p", &coords)
}

/// A seeded permutation of `0..n` meant to scramble a line: nearby points
/// land far apart, so the induced map is far from quasi-symmetric.
pub fn scrambled_line_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        // Long monotone runs would leave part of the line nearly intact.
        if longest_monotone_run(&perm) <= n / 2 {
            return perm;
        }
    }
}

fn longest_monotone_run(perm: &[usize]) -> usize {
    let mut best = 1;
    let (mut up, mut down) = (1, 1);
    for w in perm.windows(2) {
        if w[1] > w[0] {
            up += 1;
            down = 1;
        } else {
            down += 1;
            up = 1;
        }
        best = best.max(up).max(down);
    }
    best
}

/// A named fixture space.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub space: FiniteMetricSpace,
}

/// Lines, grids, ultrametric trees, a Cantor truncation and a random cloud,
/// each with at most 25 points.
pub fn standard_corpus(seed: u64) -> Vec<Fixture> {
    let s = IRRATIONAL_SCALE;
    vec![
        Fixture {
            name: "line12",
            space: uniform_line(12, s / 11.0),
        },
        Fixture {
            name: "golden20",
            space: golden_line(20),
        },
        Fixture {
            name: "grid4x4",
            space: grid(4, 4, s / 3.0),
        },
        Fixture {
            name: "grid5x5",
            space: grid(5, 5, s / 4.0),
        },
        Fixture {
            name: "tree2x4",
            space: ultrametric_tree(2, 4, 0.3, s),
        },
        Fixture {
            name: "tree3x2",
            space: ultrametric_tree(3, 2, 0.2, s),
        },
        Fixture {
            name: "cantor4",
            space: cantor(4, s),
        },
        Fixture {
            name: "cloud20",
            space: random_cloud(20, 2, seed),
        },
    ]
}

/// Smallest relative gap `|d − c·r^k| / (c·r^k)` over positive distances
/// `d`, `c ∈ {1, 2, 4}` and every level `k` the approximation at `r` uses.
pub fn threshold_clearance(space: &FiniteMetricSpace, r: f64) -> f64 {
    let Ok(k0) = truncation_level(space, r) else {
        return f64::INFINITY;
    };
    let k1 = singleton_level(space, r, k0);
    let mut best = f64::INFINITY;
    for i in 0..space.len() {
        for j in i + 1..space.len() {
            let d = space.d(i, j);
            for k in k0 - 1..=k1 + 1 {
                for c in [1.0, 2.0, 4.0] {
                    let t = c * level_scale(r, k);
                    best = best.min((d - t).abs() / t);
                }
            }
        }
    }
    best
}
