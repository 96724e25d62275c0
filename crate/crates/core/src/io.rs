//! Reading and writing spaces and maps.
//!
//! Spaces come as a CSV distance matrix whose first row holds the labels, or
//! as JSON in one of two shapes:
//!
//! ```text
//! {"labels": ["a", "b"], "matrix": [[0, 1], [1, 0]]}
//! {"points": [{"label": "a", "coords": [0, 0]}, ...], "norm": 2}
//! ```
//!
//! `norm` may also be the string `"inf"`. Maps are JSON
//! `{"pairs": [["src label", "dst label"], ...]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::IoError;
use crate::metric::FiniteMetricSpace;
use crate::pq::MapSpec;

fn read_to_string(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a space, choosing the format from the extension and falling back
/// to the first non-blank character (`{` means JSON).
pub fn read_space(path: impl AsRef<Path>) -> Result<FiniteMetricSpace, IoError> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("csv") => parse_space_csv(&text),
        Some("json") => parse_space_json(&text),
        _ if text.trim_start().starts_with('{') => parse_space_json(&text),
        _ => parse_space_csv(&text),
    }
}

pub fn parse_space_csv(text: &str) -> Result<FiniteMetricSpace, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let labels: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let mut matrix = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let values = record
            .iter()
            .enumerate()
            .map(|(col, cell)| {
                cell.parse::<f64>().map_err(|_| {
                    IoError::Parse(format!("row {row}, column {col}: {cell:?} is not a number"))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        matrix.push(values);
    }
    Ok(FiniteMetricSpace::new(labels, matrix)?)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Norm {
    Number(f64),
    Named(String),
}

impl Norm {
    fn value(&self) -> Result<f64, IoError> {
        match self {
            Norm::Number(p) => Ok(*p),
            Norm::Named(s) if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity") => {
                Ok(f64::INFINITY)
            }
            Norm::Named(s) => Err(IoError::Parse(format!("unknown norm {s:?}"))),
        }
    }
}

#[derive(Debug, Deserialize)]
struct PointJson {
    label: String,
    coords: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SpaceJson {
    Matrix {
        labels: Vec<String>,
        matrix: Vec<Vec<f64>>,
    },
    Points {
        points: Vec<PointJson>,
        #[serde(default)]
        norm: Option<Norm>,
    },
}

pub fn parse_space_json(text: &str) -> Result<FiniteMetricSpace, IoError> {
    let parsed: SpaceJson = serde_json::from_str(text).map_err(|e| {
        IoError::Parse(format!(
            "expected {{labels, matrix}} or {{points, norm}}: {e}"
        ))
    })?;
    match parsed {
        SpaceJson::Matrix { labels, matrix } => Ok(FiniteMetricSpace::new(labels, matrix)?),
        SpaceJson::Points { points, norm } => {
            let p = match norm {
                Some(n) => n.value()?,
                None => 2.0,
            };
            let (labels, coords): (Vec<String>, Vec<Vec<f64>>) =
                points.into_iter().map(|pt| (pt.label, pt.coords)).unzip();
            Ok(FiniteMetricSpace::from_points(labels, &coords, p)?)
        }
    }
}

/// CSV with shortest round-tripping decimals.
pub fn space_to_csv(space: &FiniteMetricSpace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(space.labels()).expect("writing to memory");
    for i in 0..space.len() {
        w.write_record((0..space.len()).map(|j| format!("{}", space.d(i, j))))
            .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

#[derive(Debug, Serialize)]
struct MatrixOut<'a> {
    labels: &'a [String],
    matrix: Vec<Vec<f64>>,
}

pub fn space_to_json(space: &FiniteMetricSpace) -> String {
    serde_json::to_string_pretty(&MatrixOut {
        labels: space.labels(),
        matrix: space.matrix(),
    })
    .expect("finite floats serialize")
}

#[derive(Debug, Serialize, Deserialize)]
struct MapJson {
    pairs: Vec<(String, String)>,
}

pub fn parse_map_json(
    text: &str,
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
) -> Result<MapSpec, IoError> {
    let parsed: MapJson = serde_json::from_str(text)?;
    Ok(MapSpec::from_label_pairs(
        source.clone(),
        target.clone(),
        &parsed.pairs,
    )?)
}

pub fn read_map(
    path: impl AsRef<Path>,
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
) -> Result<MapSpec, IoError> {
    parse_map_json(&read_to_string(path.as_ref())?, source, target)
}

pub fn map_to_json(f: &MapSpec) -> String {
    serde_json::to_string_pretty(&MapJson {
        pairs: f.label_pairs(),
    })
    .expect("strings serialize")
}
