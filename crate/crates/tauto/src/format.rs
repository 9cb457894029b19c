//! JSON input files and the three output renderings.

use serde::Deserialize;
use std::fmt::Write as _;

use tauto_core::{BoundMatrix, CoefficientTensor, IntersectionGraph, Rational, SymbolicValue};

use crate::error::CliError;

/// `{"vertices": 2, "edges": [[1, 1], [1, 2]]}`
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorEntry {
    pub l: usize,
    pub j: usize,
    pub k: usize,
    pub t: String,
}

/// `{"r": 1, "factors": 2, "entries": [{"l": 1, "j": 1, "k": 1, "t": "-1"}]}`
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub r: usize,
    pub factors: usize,
    pub entries: Vec<TensorEntry>,
}

/// `{"r": 2, "t": ["1", "3", "3", "1"]}`, row-major.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub r: usize,
    pub t: Vec<String>,
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Validation(format!("malformed {what} file: {e}")))
}

pub fn parse_fraction(text: &str) -> Result<Rational, CliError> {
    text.parse().map_err(CliError::from)
}

pub fn parse_graph(text: &str) -> Result<IntersectionGraph, CliError> {
    let file: GraphFile = from_json(text, "graph")?;
    Ok(IntersectionGraph::new(file.vertices, file.edges.iter().map(|e| (e[0], e[1])))?)
}

pub fn parse_tensor(text: &str) -> Result<CoefficientTensor, CliError> {
    let file: TensorFile = from_json(text, "tensor")?;
    let records = file
        .entries
        .iter()
        .map(|e| Ok((e.l, e.j, e.k, parse_fraction(&e.t)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(CoefficientTensor::from_entries(file.r, file.factors, records)?)
}

pub fn parse_matrix(text: &str) -> Result<BoundMatrix, CliError> {
    let file: MatrixFile = from_json(text, "matrix")?;
    let t = file.t.iter().map(|s| parse_fraction(s)).collect::<Result<Vec<_>, _>>()?;
    Ok(BoundMatrix::new(file.r, t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    /// Aligned `name value` lines.
    #[default]
    Human,
    /// One JSON object with string values.
    Json,
    /// A header row and a value row.
    Tsv,
}

/// Named fields rendered in order. Values are exact fraction texts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Record(pub Vec<(&'static str, String)>);

impl Record {
    pub fn push(&mut self, name: &'static str, value: impl ToString) {
        self.0.push((name, value.to_string()));
    }

    pub fn extend_value(&mut self, v: &SymbolicValue) {
        self.push("scalar", &v.scalar);
        self.push("omega2", &v.omega2);
        self.push("phi", &v.phi);
        self.push("hnt", &v.hnt);
    }

    pub fn from_value(v: &SymbolicValue) -> Record {
        let mut r = Record::default();
        r.extend_value(v);
        r
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Human => {
                let width = self.0.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
                let mut out = String::new();
                for (name, value) in &self.0 {
                    let _ = writeln!(out, "{name:<width$}  {value}");
                }
                out
            }
            OutputFormat::Json => {
                let body: Vec<String> = self
                    .0
                    .iter()
                    .map(|(n, v)| format!("{}:{}", serde_json::Value::from(*n), serde_json::Value::from(v.as_str())))
                    .collect();
                format!("{{{}}}\n", body.join(","))
            }
            OutputFormat::Tsv => {
                let names: Vec<&str> = self.0.iter().map(|(n, _)| *n).collect();
                let values: Vec<&str> = self.0.iter().map(|(_, v)| v.as_str()).collect();
                format!("{}\n{}\n", names.join("\t"), values.join("\t"))
            }
        }
    }
}
