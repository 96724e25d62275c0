use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use hypext::fixtures::{golden_line, grid, random_cloud, IRRATIONAL_SCALE};
use hypext::hyperbolicity::{delta_four_point, DeltaOptions};
use hypext::pq::{check_diam_ratio, fit_pq};
use hypext::{build_approximation, build_extension, estimate_qi, MapSpec, SetFamily};

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    for n in [20, 60, 120] {
        let s = golden_line(n);
        group.bench_with_input(BenchmarkId::new("golden_line", n), &s, |b, s| {
            b.iter(|| build_approximation(black_box(s), 1.0 / 6.0).unwrap())
        });
    }
    let cloud = random_cloud(80, 2, 0);
    group.bench_function("cloud80", |b| {
        b.iter(|| build_approximation(black_box(&cloud), 1.0 / 6.0).unwrap())
    });
    group.finish();
}

fn delta(c: &mut Criterion) {
    let opts = DeltaOptions {
        exhaustive_limit: usize::MAX,
        ..DeltaOptions::default()
    };
    let mut group = c.benchmark_group("delta_exhaustive");
    group.sample_size(10);
    for (name, s) in [
        ("golden20", golden_line(20)),
        ("grid5x5", grid(5, 5, IRRATIONAL_SCALE / 4.0)),
        ("golden60", golden_line(60)),
    ] {
        let g = build_approximation(&s, 1.0 / 6.0).unwrap();
        group.bench_function(BenchmarkId::new(name, g.len()), |b| {
            b.iter(|| delta_four_point(black_box(&g), &opts).unwrap())
        });
    }
    group.finish();
}

fn pq(c: &mut Criterion) {
    let f = MapSpec::snowflake(&golden_line(20), 0.5).unwrap();
    c.bench_function("fit_pq/snowflake20", |b| {
        b.iter(|| fit_pq(black_box(&f), &[1.0, 2.0, 3.0, 4.0]).unwrap())
    });
    let (params, _) = fit_pq(&f, &[2.0]).unwrap();
    let d = hypext::pq::pq_to_diam(params);
    c.bench_function("diam_ratio/snowflake20", |b| {
        b.iter(|| check_diam_ratio(black_box(&f), d, &SetFamily::SmallNested).unwrap())
    });
}

fn extension(c: &mut Criterion) {
    let s = golden_line(20);
    let f = MapSpec::snowflake(&s, 0.5).unwrap();
    let gs = build_approximation(&s, 1.0 / 6.0).unwrap();
    let gt = build_approximation(f.target(), 1.0 / 6.0).unwrap();
    c.bench_function("extension/snowflake20", |b| {
        b.iter(|| build_extension(black_box(&gs), &gt, &f).unwrap())
    });
    let em = build_extension(&gs, &gt, &f).unwrap();
    c.bench_function("estimate_qi/snowflake20", |b| {
        b.iter(|| estimate_qi(black_box(&em), 2.0))
    });
}

criterion_group!(benches, build, delta, pq, extension);
criterion_main!(benches);
