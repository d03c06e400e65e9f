//! Plain-text input formats and the CSV/JSON artifacts.
//!
//! Vertices are referred to by label in every file. Edge lists map labels to
//! dense ids in order of first appearance; all other files resolve labels
//! through the graph. Floats are written with 17 significant digits so every
//! artifact re-reads to the same `f64`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::curvature::{Curvature, CurvatureProfile};
use crate::field::{FieldError, ScalarField};
use crate::graph::{GraphError, MeasureMode, WeightedGraph};
use crate::semigroup::{EvolutionTrace, HeatTrace};
use crate::verify::VerificationReport;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown vertex label {0:?}")]
    UnknownVertex(String),
    #[error("vertex {0:?} is listed more than once")]
    Duplicate(String),
    #[error("no value given for vertex {0:?}")]
    Missing(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

/// Non-empty lines with comments stripped, numbered from 1.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn parse_number(token: &str, line: usize) -> Result<f64, IoError> {
    token.parse::<f64>().map_err(|_| IoError::Parse { line, message: format!("{token:?} is not a number") })
}

/// Edge list with labels resolved to dense ids.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub edges: Vec<(usize, usize, f64)>,
    pub labels: Vec<String>,
}

impl EdgeList {
    pub fn label_index(&self) -> HashMap<&str, usize> {
        self.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
    }

    pub fn into_graph(self, measure: MeasureMode) -> Result<WeightedGraph, IoError> {
        Ok(WeightedGraph::from_edges(&self.edges, measure)?.with_labels(self.labels))
    }
}

/// Parses `u v w` lines; the weight defaults to 1 when omitted.
pub fn parse_edge_list(text: &str) -> Result<EdgeList, IoError> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut id = |label: &str, labels: &mut Vec<String>| {
        *index.entry(label.to_string()).or_insert_with(|| {
            labels.push(label.to_string());
            labels.len() - 1
        })
    };
    for (line, tokens) in records(text) {
        let w = match tokens.len() {
            2 => 1.0,
            3 => parse_number(tokens[2], line)?,
            _ => return Err(IoError::Parse { line, message: "expected `u v w`".into() }),
        };
        let u = id(tokens[0], &mut labels);
        let v = id(tokens[1], &mut labels);
        edges.push((u, v, w));
    }
    Ok(EdgeList { edges, labels })
}

/// `v value` lines covering every label exactly once, in label order.
fn parse_vertex_values(text: &str, labels: &[String]) -> Result<Vec<f64>, IoError> {
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut values: Vec<Option<f64>> = vec![None; labels.len()];
    for (line, tokens) in records(text) {
        if tokens.len() != 2 {
            return Err(IoError::Parse { line, message: "expected `vertex value`".into() });
        }
        let &i = index.get(tokens[0]).ok_or_else(|| IoError::UnknownVertex(tokens[0].to_string()))?;
        if values[i].replace(parse_number(tokens[1], line)?).is_some() {
            return Err(IoError::Duplicate(tokens[0].to_string()));
        }
    }
    values
        .into_iter()
        .zip(labels)
        .map(|(v, l)| v.ok_or_else(|| IoError::Missing(l.clone())))
        .collect()
}

pub fn parse_measure(text: &str, labels: &[String]) -> Result<Vec<f64>, IoError> {
    parse_vertex_values(text, labels)
}

pub fn parse_field(text: &str, g: &WeightedGraph) -> Result<ScalarField, IoError> {
    Ok(ScalarField::new(parse_vertex_values(text, g.labels())?)?)
}

/// Resolves labels (whitespace, comma or newline separated; `#` comments) to ids.
pub fn parse_vertex_set(text: &str, g: &WeightedGraph) -> Result<Vec<usize>, IoError> {
    let index: HashMap<&str, usize> = g.labels().iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut out = Vec::new();
    for (_, tokens) in records(text) {
        for label in tokens.iter().flat_map(|t| t.split(',')).filter(|t| !t.is_empty()) {
            out.push(*index.get(label).ok_or_else(|| IoError::UnknownVertex(label.to_string()))?);
        }
    }
    Ok(out)
}

pub fn write_edge_list(g: &WeightedGraph) -> String {
    let mut out = String::new();
    for (u, v, w) in g.edges() {
        let _ = writeln!(out, "{} {} {}", g.label(u), g.label(v), fmt_f64(w));
    }
    out
}

pub fn write_field(g: &WeightedGraph, f: &ScalarField) -> String {
    let mut out = String::new();
    for x in 0..g.vertex_count() {
        let _ = writeln!(out, "{} {}", g.label(x), fmt_f64(f[x]));
    }
    out
}

pub fn write_measure(g: &WeightedGraph) -> String {
    write_field(g, &ScalarField::from_vec(g.measures().to_vec()))
}

pub fn profile_csv(g: &WeightedGraph, profile: &CurvatureProfile) -> String {
    let mut out = String::from("vertex,dimension,curvature\n");
    for r in &profile.results {
        let k = match r.value {
            Curvature::Finite(k) => fmt_f64(k),
            Curvature::NegInfinity => "-inf".into(),
        };
        let _ = writeln!(out, "{},{},{}", g.label(r.vertex.index()), r.dimension, k);
    }
    out
}

#[derive(Serialize)]
struct ProfileRow<'a> {
    vertex: &'a str,
    dimension: String,
    curvature: serde_json::Value,
}

pub fn profile_json(g: &WeightedGraph, profile: &CurvatureProfile) -> Result<String, IoError> {
    let rows: Vec<ProfileRow> = profile
        .results
        .iter()
        .map(|r| ProfileRow {
            vertex: g.label(r.vertex.index()),
            dimension: r.dimension.to_string(),
            curvature: match r.value {
                Curvature::Finite(k) => serde_json::json!(k),
                Curvature::NegInfinity => serde_json::json!("-inf"),
            },
        })
        .collect();
    Ok(serde_json::to_string_pretty(&rows)? + "\n")
}

fn trace_rows<'a>(g: &WeightedGraph, rows: impl Iterator<Item = (f64, &'a ScalarField, &'a ScalarField)>) -> String {
    let mut out = String::from("t,vertex,value,gamma\n");
    for (t, f, gamma) in rows {
        for x in 0..g.vertex_count() {
            let _ = writeln!(out, "{},{},{},{}", fmt_f64(t), g.label(x), fmt_f64(f[x]), fmt_f64(gamma[x]));
        }
    }
    out
}

pub fn evolution_trace_csv(g: &WeightedGraph, tr: &EvolutionTrace) -> String {
    trace_rows(g, tr.times.iter().zip(&tr.fields).zip(&tr.gamma_fields).map(|((&t, f), gm)| (t, f.field(), gm)))
}

pub fn heat_trace_csv(g: &WeightedGraph, tr: &HeatTrace) -> String {
    trace_rows(g, tr.times.iter().zip(&tr.fields).zip(&tr.gamma_fields).map(|((&t, f), gm)| (t, f, gm)))
}

pub fn report_json(report: &VerificationReport) -> Result<String, IoError> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

pub fn summary_csv<'a>(reports: impl IntoIterator<Item = &'a VerificationReport>) -> String {
    let mut out = String::from("instance,theorem,worst_slack,verdict\n");
    for r in reports {
        let slack = r.worst_slack().map(fmt_f64).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", r.instance.name, r.theorem, slack, r.verdict);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Family;

    #[test]
    fn edge_list_labels_in_order_of_appearance() {
        let text = "# triangle\nb a 2\n\na c 0.5 # trailing\nc b\n";
        let el = parse_edge_list(text).unwrap();
        assert_eq!(el.labels, vec!["b", "a", "c"]);
        assert_eq!(el.edges, vec![(0, 1, 2.0), (1, 2, 0.5), (2, 0, 1.0)]);
        let g = el.into_graph(MeasureMode::Unit).unwrap();
        assert_eq!(g.weight(0, 1), 2.0);
        assert!(matches!(parse_edge_list("a b c d"), Err(IoError::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("a b x"), Err(IoError::Parse { .. })));
    }

    #[test]
    fn graph_round_trip() {
        let g = WeightedGraph::generate(&Family::ErdosRenyi { n: 9, p: 0.5, seed: 4 }, MeasureMode::Degree).unwrap();
        let el = parse_edge_list(&write_edge_list(&g)).unwrap();
        let m = parse_measure(&write_measure(&g), &el.labels).unwrap();
        // relabelling by first appearance may permute vertices, so compare through labels
        let h = el.into_graph(MeasureMode::Explicit(m)).unwrap();
        for (u, v, w) in h.edges() {
            let (a, b) = (h.label(u).parse::<usize>().unwrap(), h.label(v).parse::<usize>().unwrap());
            assert_eq!(g.weight(a, b), w);
        }
        for x in 0..h.vertex_count() {
            assert_eq!(h.measure(x), g.measure(h.label(x).parse().unwrap()));
        }
    }

    #[test]
    fn field_and_set_parsing() {
        let g = WeightedGraph::generate(&Family::Path(3), MeasureMode::Unit).unwrap();
        let f = ScalarField::new(vec![0.1, -2.5, 1e-17]).unwrap();
        assert_eq!(parse_field(&write_field(&g, &f), &g).unwrap(), f);
        assert!(matches!(parse_field("0 1\n1 2\n", &g), Err(IoError::Missing(l)) if l == "2"));
        assert!(matches!(parse_field("0 1\n0 2\n", &g), Err(IoError::Duplicate(_))));
        assert!(matches!(parse_field("7 1\n", &g), Err(IoError::UnknownVertex(_))));
        assert_eq!(parse_vertex_set("0,2\n# c\n1", &g).unwrap(), vec![0, 2, 1]);
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.0, 1e-300, 123456789.123456789] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
    }
}
