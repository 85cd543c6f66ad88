//! Network, attribute and weight-matrix readers, correlation thresholding,
//! and versioned result documents.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::FitResult;
use crate::gof::{GofReport, PlotData};
use crate::graph::{Graph, NodeAttributes};
use crate::netmetrics::{EnsembleMetrics, MetricReport};
use crate::selection::{CoordinateSummary, GroupComparison, SelectionTrace};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkFormat {
    /// Edge list when the first data line holds a single token, matrix otherwise.
    #[default]
    Auto,
    AdjacencyMatrix,
    EdgeList,
}

impl std::str::FromStr for NetworkFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(NetworkFormat::Auto),
            "matrix" | "adjacency-matrix" => Ok(NetworkFormat::AdjacencyMatrix),
            "edgelist" | "edge-list" => Ok(NetworkFormat::EdgeList),
            other => Err(Error::InvalidInput(format!("unknown network format `{other}`"))),
        }
    }
}

/// A parsed network with any warnings raised while reading it.
#[derive(Debug, Clone)]
pub struct LoadedNetwork {
    pub graph: Graph,
    pub warnings: Vec<String>,
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((k + 1, l))
    })
}

fn tokens(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn parse_network(text: &str, format: NetworkFormat) -> Result<LoadedNetwork> {
    let format = match format {
        NetworkFormat::Auto => {
            let width = data_lines(text).next().map_or(0, |(_, l)| tokens(l).len());
            if width > 1 && width == data_lines(text).count() {
                NetworkFormat::AdjacencyMatrix
            } else {
                NetworkFormat::EdgeList
            }
        }
        f => f,
    };
    let loaded = match format {
        NetworkFormat::EdgeList => parse_edge_list(text)?,
        _ => parse_matrix(text)?,
    };
    for w in &loaded.warnings {
        log::warn!("{w}");
    }
    Ok(loaded)
}

fn parse_matrix(text: &str) -> Result<LoadedNetwork> {
    let rows: Vec<(usize, Vec<&str>)> = data_lines(text).map(|(k, l)| (k, tokens(l))).collect();
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty adjacency matrix".into()));
    }
    let mut a = vec![vec![false; n]; n];
    for (r, (line, cells)) in rows.iter().enumerate() {
        if cells.len() != n {
            return Err(Error::Parse {
                line: *line,
                message: format!("row {r} has {} entries, matrix must be {n}×{n}", cells.len()),
            });
        }
        for (c, cell) in cells.iter().enumerate() {
            a[r][c] = match cell.parse::<f64>() {
                Ok(v) if v == 0.0 => false,
                Ok(v) if v == 1.0 => true,
                _ => {
                    return Err(Error::Parse {
                        line: *line,
                        message: format!("entry at row {r}, column {c} is `{cell}`, expected 0 or 1"),
                    })
                }
            };
        }
    }
    let mut warnings = Vec::new();
    let mut asymmetric = 0;
    let mut edges = Vec::new();
    for i in 0..n {
        if a[i][i] {
            warnings.push(format!("diagonal entry {i} ignored"));
        }
        for j in (i + 1)..n {
            if a[i][j] != a[j][i] {
                asymmetric += 1;
            }
            if a[i][j] || a[j][i] {
                edges.push((i, j));
            }
        }
    }
    if asymmetric > 0 {
        warnings.push(format!(
            "matrix is asymmetric in {asymmetric} pairs; symmetrized by logical OR"
        ));
    }
    Ok(LoadedNetwork {
        graph: Graph::from_edges(n, &edges)?,
        warnings,
    })
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{tok}` is not a node index"),
    })
}

/// Edge list: an optional header line holding the node count, then one
/// 0-based `i j` pair per line. Without a header the node count is one more
/// than the largest index.
fn parse_edge_list(text: &str) -> Result<LoadedNetwork> {
    let mut lines = data_lines(text).peekable();
    let mut n = None;
    if let Some(&(line, l)) = lines.peek() {
        let t = tokens(l);
        if t.len() == 1 {
            n = Some(parse_index(t[0], line)?);
            lines.next();
        }
    }
    let mut edges = Vec::new();
    let mut warnings = Vec::new();
    for (line, l) in lines {
        let t = tokens(l);
        if t.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected `i j`, found {} fields", t.len()),
            });
        }
        let (i, j) = (parse_index(t[0], line)?, parse_index(t[1], line)?);
        if let Some(n) = n {
            if i >= n || j >= n {
                return Err(Error::Parse {
                    line,
                    message: format!("node index out of range for {n} nodes"),
                });
            }
        }
        if i == j {
            warnings.push(format!("line {line}: self-loop on {i} ignored"));
            continue;
        }
        edges.push((i, j));
    }
    let n = n.unwrap_or_else(|| edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0));
    Ok(LoadedNetwork {
        graph: Graph::from_edges(n, &edges)?,
        warnings,
    })
}

pub fn read_network(path: impl AsRef<Path>, format: NetworkFormat) -> Result<LoadedNetwork> {
    parse_network(&std::fs::read_to_string(path)?, format)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut s = format!("{}\n", g.node_count());
    for (i, j) in g.edges() {
        s.push_str(&format!("{i} {j}\n"));
    }
    s
}

/// Attribute table with header `node,<name>`. Node ids are 0-based; when
/// `nodes` is given every id below it must appear exactly once. Empty cells
/// mark unknown labels, which never match.
pub fn parse_attributes(text: &str, nodes: Option<usize>) -> Result<NodeAttributes> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::InvalidInput(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "node" {
        return Err(Error::Parse {
            line: 1,
            message: "header must be `node,<attribute-name>`".into(),
        });
    }
    let name = headers[1].to_string();
    let mut labels: BTreeMap<usize, String> = BTreeMap::new();
    for (k, rec) in reader.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let id = parse_index(&rec[0], line)?;
        if labels.insert(id, rec[1].to_string()).is_some() {
            return Err(Error::Parse {
                line,
                message: format!("duplicate node {id}"),
            });
        }
    }
    let n = nodes.unwrap_or_else(|| labels.keys().next_back().map_or(0, |m| m + 1));
    let missing: Vec<String> = (0..n).filter(|i| !labels.contains_key(i)).map(|i| i.to_string()).collect();
    if !missing.is_empty() {
        return Err(Error::InvalidInput(format!("missing nodes: {}", missing.join(", "))));
    }
    if let Some((&id, _)) = labels.range(n..).next() {
        return Err(Error::InvalidInput(format!("node {id} out of range for {n} nodes")));
    }
    let values: Vec<String> = labels.into_values().collect();
    let unknown = values.iter().any(String::is_empty);
    let mut attrs = NodeAttributes::new(name, values);
    if unknown {
        attrs.unknown_label = Some(String::new());
    }
    Ok(attrs)
}

pub fn read_attributes(path: impl AsRef<Path>, nodes: Option<usize>) -> Result<NodeAttributes> {
    parse_attributes(&std::fs::read_to_string(path)?, nodes)
}

/// Symmetric matrix of association weights; the diagonal is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    values: Vec<f64>,
}

impl WeightMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!("row {r} has {} entries, expected {n}", row.len())));
            }
            values.extend_from_slice(row);
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[i * n + j];
                if i != j && !v.is_finite() {
                    return Err(Error::InvalidInput(format!("weight at ({i}, {j}) is not finite")));
                }
                if i < j && (v - values[j * n + i]).abs() > 1e-9 {
                    return Err(Error::InvalidInput(format!("weights at ({i}, {j}) and ({j}, {i}) differ")));
                }
            }
        }
        Ok(WeightMatrix { n, values })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

pub fn parse_weight_matrix(text: &str) -> Result<WeightMatrix> {
    let rows = data_lines(text)
        .map(|(line, l)| {
            tokens(l)
                .iter()
                .map(|t| {
                    t.parse::<f64>().map_err(|_| Error::Parse {
                        line,
                        message: format!("`{t}` is not a number"),
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    WeightMatrix::from_rows(rows)
}

pub fn read_weight_matrix(path: impl AsRef<Path>) -> Result<WeightMatrix> {
    parse_weight_matrix(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone)]
pub struct ThresholdResult {
    pub threshold: f64,
    pub graph: Graph,
    pub mean_degree: f64,
    /// `ln n / ln K`; absent when the achieved mean degree is at most 1.
    pub achieved_s: Option<f64>,
    pub target_mean_degree: f64,
}

/// Keeps the pairs whose weight is strictly above a threshold chosen so the
/// mean degree is as close as possible to `n^(1/s_target)`. Ties go to the
/// sparser graph. With `absolute` the magnitudes of the weights are used.
pub fn threshold_matrix(w: &WeightMatrix, s_target: f64, absolute: bool) -> Result<ThresholdResult> {
    let n = w.node_count();
    if n < 3 {
        return Err(Error::InvalidInput("thresholding needs at least 3 nodes".into()));
    }
    if !(s_target > 1.0) || !s_target.is_finite() {
        return Err(Error::InvalidControl(format!("s must exceed 1, got {s_target}")));
    }
    let value = |i: usize, j: usize| if absolute { w.get(i, j).abs() } else { w.get(i, j) };
    let mut weights: Vec<f64> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| value(i, j)).collect();
    weights.sort_by(|a, b| b.total_cmp(a));
    if weights.first() == weights.last() {
        return Err(Error::InvalidInput("all weights are equal; no threshold separates them".into()));
    }
    let target = (n as f64).powf(1.0 / s_target);
    // Thresholds are the distinct weights in decreasing order, then one just
    // below the smallest. Edge counts grow along that sequence.
    let mut best: Option<(f64, usize, f64)> = None;
    let mut k = 0;
    let mut candidates: Vec<f64> = Vec::new();
    for &v in &weights {
        if candidates.last() != Some(&v) {
            candidates.push(v);
        }
    }
    let below = *candidates.last().unwrap();
    candidates.push(below - below.abs().max(1.0) * 1e-9);
    for t in candidates {
        while k < weights.len() && weights[k] > t {
            k += 1;
        }
        let degree = 2.0 * k as f64 / n as f64;
        let gap = (degree - target).abs();
        if best.is_none_or(|(_, _, g)| gap < g) {
            best = Some((t, k, gap));
        }
    }
    let (threshold, _, _) = best.expect("at least two candidates");
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| value(i, j) > threshold)
        .collect();
    let graph = Graph::from_edges(n, &edges)?;
    let mean_degree = 2.0 * graph.edge_count() as f64 / n as f64;
    Ok(ThresholdResult {
        threshold,
        mean_degree,
        achieved_s: (mean_degree > 1.0).then(|| (n as f64).ln() / mean_degree.ln()),
        target_mean_degree: target,
        graph,
    })
}

/// Parses a group-summary table with header
/// `term,mean_a,se_a,n_a,mean_b,se_b,n_b`.
pub fn parse_group_summary(text: &str) -> Result<(Vec<String>, Vec<CoordinateSummary>, Vec<CoordinateSummary>)> {
    #[derive(Deserialize)]
    struct Row {
        term: String,
        mean_a: f64,
        se_a: f64,
        n_a: usize,
        mean_b: f64,
        se_b: f64,
        n_b: usize,
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let (mut terms, mut a, mut b) = (Vec::new(), Vec::new(), Vec::new());
    for (k, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            line: k + 2,
            message: e.to_string(),
        })?;
        terms.push(row.term);
        a.push(CoordinateSummary { mean: row.mean_a, se: row.se_a, n: row.n_a });
        b.push(CoordinateSummary { mean: row.mean_b, se: row.se_b, n: row.n_b });
    }
    if terms.is_empty() {
        return Err(Error::InvalidInput("summary table has no rows".into()));
    }
    Ok((terms, a, b))
}

/// Outcome of thresholding, as stored in a result document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub nodes: usize,
    pub s_target: f64,
    pub absolute: bool,
    pub threshold: f64,
    pub edges: usize,
    pub mean_degree: f64,
    pub target_mean_degree: f64,
    pub achieved_s: Option<f64>,
    pub edge_list: Vec<(usize, usize)>,
}

impl ThresholdSummary {
    pub fn new(r: &ThresholdResult, s_target: f64, absolute: bool) -> Self {
        ThresholdSummary {
            nodes: r.graph.node_count(),
            s_target,
            absolute,
            threshold: r.threshold,
            edges: r.graph.edge_count(),
            mean_degree: r.mean_degree,
            target_mean_degree: r.target_mean_degree,
            achieved_s: r.achieved_s,
            edge_list: r.graph.edge_list(),
        }
    }
}

/// Summary of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub terms: String,
    pub theta: Vec<f64>,
    pub nodes: usize,
    pub samples: usize,
    pub acceptance_rate: f64,
    pub mean_density: f64,
    pub statistic_means: Vec<f64>,
    pub metrics: EnsembleMetrics,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "body", rename_all = "kebab-case")]
pub enum ResultBody {
    Fit(FitResult),
    Gof(GofReport),
    GofPlotData(PlotData),
    Selection(SelectionTrace),
    Comparison(GroupComparison),
    Metrics(MetricReport),
    Threshold(ThresholdSummary),
    Simulation(SimulationSummary),
}

impl ResultBody {
    pub fn kind(&self) -> &'static str {
        match self {
            ResultBody::Fit(_) => "fit",
            ResultBody::Gof(_) => "gof",
            ResultBody::GofPlotData(_) => "gof-plot-data",
            ResultBody::Selection(_) => "selection",
            ResultBody::Comparison(_) => "comparison",
            ResultBody::Metrics(_) => "metrics",
            ResultBody::Threshold(_) => "threshold",
            ResultBody::Simulation(_) => "simulation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub tool_version: String,
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub result: ResultBody,
}

impl ResultDocument {
    pub fn new(result: ResultBody, seed: Option<u64>) -> Self {
        ResultDocument {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            seed,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        match value.get("schema_version").and_then(serde_json::Value::as_u64) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => {
                return Err(Error::SchemaVersion {
                    found: v as u32,
                    expected: SCHEMA_VERSION,
                })
            }
            None => return Err(Error::Schema("missing schema_version".into())),
        }
        // Deserialize from the text so floats keep their exact bits.
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }
}

pub fn write_result(doc: &ResultDocument, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, doc.to_json())?;
    Ok(())
}

pub fn read_result(path: impl AsRef<Path>) -> Result<ResultDocument> {
    ResultDocument::from_json(&std::fs::read_to_string(path)?)
}
