//! Regenerates the files under `fixtures/` at the workspace root.
//!
//! `cargo run -p hypext-core --example write_fixtures [DIR]`

use std::fs;
use std::path::PathBuf;

use hypext::fixtures::{
    cantor, golden_line, grid, scrambled_line_permutation, ultrametric_tree, uniform_line,
    IRRATIONAL_SCALE,
};
use hypext::io::{map_to_json, space_to_csv};
use hypext::metric::FiniteMetricSpace;
use hypext::MapSpec;

fn main() -> std::io::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"));
    fs::create_dir_all(&dir)?;
    let write = |name: &str, text: String| fs::write(dir.join(name), text);

    let s = IRRATIONAL_SCALE;
    let two = FiniteMetricSpace::new(
        vec!["a".into(), "b".into()],
        vec![vec![0.0, 1.0], vec![1.0, 0.0]],
    )
    .expect("valid");
    write("two_point.csv", space_to_csv(&two))?;
    write("one_point.csv", "only\n0\n".into())?;

    let line = golden_line(20);
    let sqrt = line.snowflake(0.5).expect("valid exponent");
    write("line20.csv", space_to_csv(&line))?;
    write("line20_sqrt.csv", space_to_csv(&sqrt))?;
    write(
        "line20_identity_map.json",
        map_to_json(&MapSpec::identity(&line)) + "\n",
    )?;
    let snow = MapSpec::snowflake(&line, 0.5).expect("valid exponent");
    write("line20_sqrt_map.json", map_to_json(&snow) + "\n")?;

    let short = uniform_line(8, s / 7.0);
    let perm = scrambled_line_permutation(8, 0);
    let scrambled = MapSpec::new(short.clone(), short.clone(), perm).expect("a permutation");
    write("line8.csv", space_to_csv(&short))?;
    write("line8_scrambled_map.json", map_to_json(&scrambled) + "\n")?;

    write("line12.csv", space_to_csv(&uniform_line(12, s / 11.0)))?;
    write("grid4x4.csv", space_to_csv(&grid(4, 4, s / 3.0)))?;
    write("tree2x4.csv", space_to_csv(&ultrametric_tree(2, 4, 0.3, s)))?;
    write("tree3x2.csv", space_to_csv(&ultrametric_tree(3, 2, 0.2, s)))?;
    for depth in 3..=5 {
        write(
            &format!("cantor{depth}.csv"),
            space_to_csv(&cantor(depth, s)),
        )?;
    }

    let points: Vec<String> = (0..9)
        .map(|i| {
            let (x, y) = ((i % 3) as f64 * s, (i / 3) as f64 * s);
            format!("    {{\"label\": \"q{i}\", \"coords\": [{x}, {y}]}}")
        })
        .collect();
    write(
        "grid3x3_points.json",
        format!(
            "{{\n  \"norm\": 2,\n  \"points\": [\n{}\n  ]\n}}\n",
            points.join(",\n")
        ),
    )?;
    write(
        "triangle_violation.csv",
        "a,b,c\n0,1,5\n1,0,1\n5,1,0\n".into(),
    )?;
    Ok(())
}
