//! Graph search space over product-manifold signatures.
//!
//! Nodes are multisets of `{E², S², H²}` with up to `max_factors` factors.
//! Signatures differing by one swapped factor are joined with weight
//! `1/d_GH` of the swapped pair; a signature and its one-factor extension
//! are joined with weight 1. Searches look for the node minimizing a
//! pluggable [`Evaluator`].

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GhError, Result};
use crate::geometry::{ProductSignature, SpaceKind};
use crate::gh_estimate::{signature_distance, DistanceTable};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchGraph {
    pub nodes: Vec<ProductSignature>,
    pub edges: Vec<Edge>,
    pub max_factors: u32,
    pub table_snapshot: DistanceTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

impl std::str::FromStr for GraphFormat {
    type Err = GhError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(GraphFormat::Dot),
            "json" => Ok(GraphFormat::Json),
            other => Err(GhError::param(format!("unknown graph format {other:?}"))),
        }
    }
}

impl GraphFormat {
    /// Picks the format from a file extension, defaulting to JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("dot") || ext.eq_ignore_ascii_case("gv") => GraphFormat::Dot,
            _ => GraphFormat::Json,
        }
    }
}

/// Number of signatures with `1..=max_factors` factors.
pub fn node_count(max_factors: u32) -> usize {
    (1..=max_factors as usize).map(|k| (k + 1) * (k + 2) / 2).sum()
}

pub fn build_graph(max_factors: u32, table: &DistanceTable) -> Result<SearchGraph> {
    if max_factors < 1 {
        return Err(GhError::param("max_factors must be at least 1"));
    }
    table.validate()?;
    let nodes = ProductSignature::enumerate(max_factors);
    let mut edges = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if let Some(d) = signature_distance(&nodes[i], &nodes[j], table) {
                if d > 0.0 {
                    edges.push(Edge { a: i, b: j, weight: 1.0 / d });
                }
            }
        }
    }
    Ok(SearchGraph { nodes, edges, max_factors, table_snapshot: table.clone() })
}

/// Formats `x` with four significant figures.
pub fn four_sig_figs(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (3 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

impl SearchGraph {
    pub fn node_index(&self, sig: &ProductSignature) -> Option<usize> {
        self.nodes.iter().position(|n| n == sig)
    }

    /// Neighbors of every node as `(index, weight)`, sorted by index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.weight));
            adj[e.b].push((e.a, e.weight));
        }
        for list in &mut adj {
            list.sort_by_key(|&(j, _)| j);
        }
        adj
    }

    /// Indices of the connected component containing `start`, ascending.
    pub fn component(&self, start: usize) -> Vec<usize> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            for &(j, _) in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        (0..self.nodes.len()).filter(|&i| seen[i]).collect()
    }

    /// Distinct edge weights, ascending.
    pub fn distinct_weights(&self) -> Vec<f64> {
        let mut w: Vec<f64> = self.edges.iter().map(|e| e.weight).collect();
        w.sort_by(f64::total_cmp);
        w.dedup();
        w
    }

    /// Checks the structural invariants and that every weight agrees with
    /// the table snapshot.
    pub fn validate(&self) -> Result<()> {
        self.table_snapshot.validate()?;
        let expected = ProductSignature::enumerate(self.max_factors);
        if self.nodes != expected {
            return Err(GhError::Format(format!(
                "graph nodes do not match the {} signatures with at most {} factors",
                expected.len(),
                self.max_factors
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.a >= self.nodes.len() || e.b >= self.nodes.len() || e.a == e.b {
                return Err(GhError::Format(format!("bad edge ({}, {})", e.a, e.b)));
            }
            if !seen.insert((e.a.min(e.b), e.a.max(e.b))) {
                return Err(GhError::Format(format!("duplicate edge ({}, {})", e.a, e.b)));
            }
            let d = signature_distance(&self.nodes[e.a], &self.nodes[e.b], &self.table_snapshot);
            match d {
                Some(d) if d > 0.0 && e.weight == 1.0 / d => {}
                _ => {
                    return Err(GhError::Format(format!(
                        "edge ({}, {}) has weight {} inconsistent with the table",
                        self.nodes[e.a], self.nodes[e.b], e.weight
                    )))
                }
            }
        }
        let rebuilt = build_graph(self.max_factors, &self.table_snapshot)?;
        if rebuilt.edges.len() != self.edges.len() {
            return Err(GhError::Format(format!(
                "graph has {} edges, the table implies {}",
                self.edges.len(),
                rebuilt.edges.len()
            )));
        }
        Ok(())
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph signatures {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", n.canonical_key());
        }
        for e in &self.edges {
            let _ = writeln!(out, "  n{} -- n{} [label=\"{}\"];", e.a, e.b, four_sig_figs(e.weight));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: SearchGraph = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    pub fn export(&self, format: GraphFormat) -> Result<String> {
        match format {
            GraphFormat::Dot => Ok(self.to_dot()),
            GraphFormat::Json => self.to_json(),
        }
    }
}

/// Built-in objective functions for exercising the searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Synthetic {
    /// Number of factors.
    FactorCount,
    /// Number of factors that are not hyperbolic, plus a tenth of the factor count.
    HyperbolicPreference,
    /// Spread between the most and least frequent curvature sign.
    CurvatureImbalance,
}

impl Synthetic {
    pub const NAMES: [&'static str; 3] = ["factor-count", "hyperbolic-preference", "curvature-imbalance"];

    fn eval(self, sig: &ProductSignature) -> f64 {
        let [e, s, h] = sig.counts();
        match self {
            Synthetic::FactorCount => sig.factor_count() as f64,
            Synthetic::HyperbolicPreference => (e + s) as f64 + 0.1 * sig.factor_count() as f64,
            Synthetic::CurvatureImbalance => {
                let c = [e, s, h];
                (c.iter().max().unwrap() - c.iter().min().unwrap()) as f64
            }
        }
    }
}

impl std::str::FromStr for Synthetic {
    type Err = GhError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "factor-count" => Ok(Synthetic::FactorCount),
            "hyperbolic-preference" => Ok(Synthetic::HyperbolicPreference),
            "curvature-imbalance" => Ok(Synthetic::CurvatureImbalance),
            other => Err(GhError::param(format!(
                "unknown synthetic evaluator {other:?}; known: {}",
                Synthetic::NAMES.join(", ")
            ))),
        }
    }
}

/// Source of node values.
#[derive(Debug, Clone)]
pub enum Evaluator {
    /// Values keyed by canonical key, typically read from a `key,value` CSV.
    Table { source: PathBuf, values: HashMap<String, f64> },
    /// A command run with the canonical key as its only argument, printing one number.
    ExternalCommand { command: String, parallel_safe: bool },
    Synthetic(Synthetic),
}

impl Evaluator {
    /// Parses `table:PATH`, `cmd:COMMAND` or `synthetic:NAME`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| GhError::param(format!("evaluator {spec:?} must look like kind:source")))?;
        match kind {
            "table" => Evaluator::from_table_file(Path::new(rest)),
            "cmd" => Ok(Evaluator::ExternalCommand { command: rest.to_string(), parallel_safe: false }),
            "synthetic" => Ok(Evaluator::Synthetic(rest.parse()?)),
            other => Err(GhError::param(format!("unknown evaluator kind {other:?}"))),
        }
    }

    pub fn from_table_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let values = parse_value_table(&text)?;
        Ok(Evaluator::Table { source: path.to_path_buf(), values })
    }

    /// An in-memory table evaluator.
    pub fn from_values<'a>(values: impl IntoIterator<Item = (&'a ProductSignature, f64)>) -> Self {
        Evaluator::Table {
            source: PathBuf::new(),
            values: values.into_iter().map(|(s, v)| (s.canonical_key(), v)).collect(),
        }
    }

    pub fn parallel_safe(&self) -> bool {
        match self {
            Evaluator::Table { .. } | Evaluator::Synthetic(_) => true,
            Evaluator::ExternalCommand { parallel_safe, .. } => *parallel_safe,
        }
    }

    pub fn evaluate(&self, node: &ProductSignature) -> Result<f64> {
        let key = node.canonical_key();
        let fail = |message: String| GhError::Evaluation { node: key.clone(), message };
        let value = match self {
            Evaluator::Synthetic(f) => f.eval(node),
            Evaluator::Table { source, values } => *values
                .get(&key)
                .ok_or_else(|| fail(format!("no value in table {}", source.display())))?,
            Evaluator::ExternalCommand { command, .. } => {
                let output = Command::new("sh")
                    .arg("-c")
                    .arg(format!("{command} \"$1\""))
                    .arg("sh")
                    .arg(&key)
                    .output()
                    .map_err(|e| fail(format!("could not run {command:?}: {e}")))?;
                if !output.status.success() {
                    return Err(fail(format!("{command:?} exited with {}", output.status)));
                }
                let stdout = String::from_utf8_lossy(&output.stdout);
                stdout
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| fail(format!("expected one number on stdout, got {:?}", stdout.trim())))?
            }
        };
        if !value.is_finite() {
            return Err(fail(format!("value {value} is not finite")));
        }
        Ok(value)
    }
}

/// Parses `canonical_key,value` rows; blank lines and `#` comments are skipped.
pub fn parse_value_table(text: &str) -> Result<HashMap<String, f64>> {
    let mut values = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| GhError::Format(format!("line {}: {what}: {line:?}", lineno + 1));
        let (key, value) = line.split_once(',').ok_or_else(|| bad("expected key,value"))?;
        let sig: ProductSignature = key.trim().parse().map_err(|_| bad("bad signature"))?;
        let value: f64 = value.trim().parse().map_err(|_| bad("bad value"))?;
        if values.insert(sig.canonical_key(), value).is_some() {
            return Err(bad("duplicate signature"));
        }
    }
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub node: ProductSignature,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_node: ProductSignature,
    pub best_value: f64,
    pub trajectory: Vec<TrajectoryStep>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchAlgorithm {
    Exhaustive,
    Greedy,
    BestFirst,
}

impl std::str::FromStr for SearchAlgorithm {
    type Err = GhError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(SearchAlgorithm::Exhaustive),
            "greedy" => Ok(SearchAlgorithm::Greedy),
            "bestfirst" | "best-first" => Ok(SearchAlgorithm::BestFirst),
            other => Err(GhError::param(format!("unknown search algorithm {other:?}"))),
        }
    }
}

/// Memoized evaluation over one graph, recording the order of first evaluations.
struct Session<'a> {
    graph: &'a SearchGraph,
    evaluator: &'a Evaluator,
    values: Mutex<Vec<Option<f64>>>,
    trajectory: Vec<usize>,
}

impl<'a> Session<'a> {
    fn new(graph: &'a SearchGraph, evaluator: &'a Evaluator) -> Self {
        Session { graph, evaluator, values: Mutex::new(vec![None; graph.nodes.len()]), trajectory: Vec::new() }
    }

    fn value(&mut self, i: usize) -> Result<f64> {
        if let Some(v) = self.values.lock().unwrap()[i] {
            return Ok(v);
        }
        let v = self.evaluator.evaluate(&self.graph.nodes[i])?;
        self.values.lock().unwrap()[i] = Some(v);
        self.trajectory.push(i);
        Ok(v)
    }

    fn is_evaluated(&self, i: usize) -> bool {
        self.values.lock().unwrap()[i].is_some()
    }

    /// Builds the result; `settled` names the node a local search stopped
    /// at, otherwise the lowest (value, index) seen wins.
    fn finish(self, settled: Option<usize>) -> Result<SearchResult> {
        let values = self.values.into_inner().unwrap();
        let lowest = self
            .trajectory
            .iter()
            .copied()
            .min_by(|&i, &j| cmp_value_index(values[i].unwrap(), i, values[j].unwrap(), j))
            .ok_or_else(|| GhError::param("search evaluated no nodes"))?;
        let best = settled.unwrap_or(lowest);
        let trajectory: Vec<TrajectoryStep> = self
            .trajectory
            .iter()
            .map(|&i| TrajectoryStep { node: self.graph.nodes[i], value: values[i].unwrap() })
            .collect();
        Ok(SearchResult {
            best_node: self.graph.nodes[best],
            best_value: values[best].unwrap(),
            evaluations: trajectory.len(),
            trajectory,
        })
    }
}

fn cmp_value_index(a: f64, i: usize, b: f64, j: usize) -> Ordering {
    a.total_cmp(&b).then(i.cmp(&j))
}

fn start_index(graph: &SearchGraph, start: &ProductSignature) -> Result<usize> {
    graph
        .node_index(start)
        .ok_or_else(|| GhError::param(format!("start node {start} is not in the graph")))
}

/// Evaluates every node and returns the global minimum, ties going to
/// the earliest node in canonical order.
pub fn search_exhaustive(graph: &SearchGraph, evaluator: &Evaluator) -> Result<SearchResult> {
    let mut session = Session::new(graph, evaluator);
    if evaluator.parallel_safe() {
        let values: Vec<Result<f64>> = graph.nodes.par_iter().map(|n| evaluator.evaluate(n)).collect();
        let mut memo = session.values.lock().unwrap();
        for (i, v) in values.into_iter().enumerate() {
            memo[i] = Some(v?);
        }
        drop(memo);
        session.trajectory = (0..graph.nodes.len()).collect();
    } else {
        for i in 0..graph.nodes.len() {
            session.value(i)?;
        }
    }
    session.finish(None)
}

/// Steepest descent from `start`: moves to the lowest-valued neighbor
/// (higher edge weight, then canonical order, breaking ties) while that
/// strictly improves on the current value.
pub fn search_greedy(graph: &SearchGraph, evaluator: &Evaluator, start: &ProductSignature) -> Result<SearchResult> {
    let adj = graph.adjacency();
    let mut session = Session::new(graph, evaluator);
    let mut current = start_index(graph, start)?;
    let mut current_value = session.value(current)?;
    loop {
        let mut best: Option<(usize, f64, f64)> = None;
        for &(j, w) in &adj[current] {
            let v = session.value(j)?;
            let better = match best {
                None => true,
                Some((bj, bv, bw)) => v
                    .total_cmp(&bv)
                    .then(bw.total_cmp(&w))
                    .then(j.cmp(&bj))
                    .is_lt(),
            };
            if better {
                best = Some((j, v, w));
            }
        }
        match best {
            Some((j, v, _)) if v < current_value => {
                current = j;
                current_value = v;
            }
            _ => break,
        }
    }
    session.finish(Some(current))
}

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // Reversed so the max-heap pops the smallest (value, index).
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_value_index(other.0, other.1, self.0, self.1)
    }
}

/// Best-first expansion from `start` using at most `budget` evaluations.
pub fn search_best_first(
    graph: &SearchGraph,
    evaluator: &Evaluator,
    start: &ProductSignature,
    budget: usize,
) -> Result<SearchResult> {
    if budget < 1 {
        return Err(GhError::param("budget must be at least 1"));
    }
    let adj = graph.adjacency();
    let mut session = Session::new(graph, evaluator);
    let s = start_index(graph, start)?;
    let mut heap = BinaryHeap::from([Frontier(session.value(s)?, s)]);
    'expand: while let Some(Frontier(_, i)) = heap.pop() {
        for &(j, _) in &adj[i] {
            if session.is_evaluated(j) {
                continue;
            }
            if session.trajectory.len() >= budget {
                break 'expand;
            }
            heap.push(Frontier(session.value(j)?, j));
        }
    }
    session.finish(None)
}

pub fn search(
    graph: &SearchGraph,
    evaluator: &Evaluator,
    algorithm: SearchAlgorithm,
    start: Option<&ProductSignature>,
    budget: Option<usize>,
) -> Result<SearchResult> {
    let default_start = graph.nodes.first().copied().ok_or_else(|| GhError::param("empty graph"))?;
    let start = start.copied().unwrap_or(default_start);
    match algorithm {
        SearchAlgorithm::Exhaustive => search_exhaustive(graph, evaluator),
        SearchAlgorithm::Greedy => search_greedy(graph, evaluator, &start),
        SearchAlgorithm::BestFirst => {
            search_best_first(graph, evaluator, &start, budget.unwrap_or(graph.nodes.len()))
        }
    }
}

/// Whether `a` has fewer factors than `b`; the direction of an extension edge.
pub fn extends(a: &ProductSignature, b: &ProductSignature) -> bool {
    a.factor_count() < b.factor_count()
        && SpaceKind::ALL.iter().all(|&k| a.count(k) <= b.count(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(s: &str) -> ProductSignature {
        s.parse().unwrap()
    }

    #[test]
    fn single_factor_graph() {
        let g = build_graph(1, &DistanceTable::default()).unwrap();
        assert_eq!(g.nodes.len(), 3);
        assert_eq!(g.edges.len(), 3);
        let w = g.distinct_weights();
        assert!((w[0] - 1.0 / 0.84).abs() < 1e-12);
        assert!((w[1] - 1.0 / 0.77).abs() < 1e-12);
        assert!((w[2] - 1.0 / 0.23).abs() < 1e-12);
    }

    #[test]
    fn node_counts() {
        for m in 1..=7 {
            assert_eq!(ProductSignature::enumerate(m).len(), node_count(m));
        }
        assert_eq!(node_count(7), 119);
        assert!(build_graph(0, &DistanceTable::default()).is_err());
    }

    #[test]
    fn four_distinct_weights() {
        for m in 2..=5 {
            assert_eq!(build_graph(m, &DistanceTable::default()).unwrap().distinct_weights().len(), 4);
        }
    }

    #[test]
    fn no_edge_between_unrelated() {
        let g = build_graph(2, &DistanceTable::default()).unwrap();
        let (a, b) = (g.node_index(&sig("S2xS2")).unwrap(), g.node_index(&sig("E2xE2")).unwrap());
        assert!(!g.edges.iter().any(|e| (e.a, e.b) == (a.min(b), a.max(b))));
    }

    #[test]
    fn sig_figs() {
        assert_eq!(four_sig_figs(1.0 / 0.23), "4.348");
        assert_eq!(four_sig_figs(1.0), "1.000");
        assert_eq!(four_sig_figs(12.345), "12.35");
        assert_eq!(four_sig_figs(0.012345), "0.01235");
    }

    #[test]
    fn dot_and_json_export() {
        let g = build_graph(1, &DistanceTable::default()).unwrap();
        let dot = g.to_dot();
        assert_eq!(dot.lines().filter(|l| l.contains("[label=") && !l.contains("--")).count(), 3);
        assert_eq!(dot.lines().filter(|l| l.contains("--")).count(), 3);
        assert!(dot.contains("\"4.348\""));
        let g2 = build_graph(3, &DistanceTable::default()).unwrap();
        assert_eq!(SearchGraph::from_json(&g2.to_json().unwrap()).unwrap(), g2);
    }

    #[test]
    fn tampered_json_rejected() {
        let mut g = build_graph(2, &DistanceTable::default()).unwrap();
        g.edges[0].weight += 0.5;
        assert!(SearchGraph::from_json(&serde_json::to_string(&g).unwrap()).is_err());
    }

    #[test]
    fn value_table_parsing() {
        let v = parse_value_table("# comment\nH2xE2, 0.5\n\nS2,1\n").unwrap();
        assert_eq!(v["E2xH2"], 0.5);
        assert_eq!(v["S2"], 1.0);
        assert!(parse_value_table("E2,1\nE2,2").is_err());
        assert!(parse_value_table("Q2,1").is_err());
    }

    #[test]
    fn exhaustive_with_synthetic_and_table() {
        let g = build_graph(2, &DistanceTable::default()).unwrap();
        let r = search_exhaustive(&g, &Evaluator::Synthetic(Synthetic::FactorCount)).unwrap();
        assert_eq!(r.best_node, sig("E2"));
        assert_eq!(r.evaluations, 9);
        let target = sig("E2xH2");
        let ev = Evaluator::from_values(g.nodes.iter().map(|n| (n, if *n == target { 0.0 } else { 1.0 })));
        assert_eq!(search_exhaustive(&g, &ev).unwrap().best_node, target);
    }

    #[test]
    fn missing_table_value_is_an_error() {
        let g = build_graph(1, &DistanceTable::default()).unwrap();
        let ev = Evaluator::from_values([(&sig("E2"), 1.0)]);
        match search_exhaustive(&g, &ev) {
            Err(GhError::Evaluation { node, .. }) => assert_eq!(node, "S2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn greedy_stops_on_constant() {
        let g = build_graph(2, &DistanceTable::default()).unwrap();
        let ev = Evaluator::from_values(g.nodes.iter().map(|n| (n, 3.0)));
        let r = search_greedy(&g, &ev, &sig("S2xH2")).unwrap();
        assert_eq!(r.best_node, sig("S2xH2"));
    }

    #[test]
    fn greedy_follows_decreasing_path() {
        let g = build_graph(2, &DistanceTable::default()).unwrap();
        // H2 -> E2xH2 -> E2xE2 is strictly decreasing, everything else is high.
        let path = [("H2", 5.0), ("E2xH2", 3.0), ("E2xE2", 1.0)];
        let ev = Evaluator::from_values(g.nodes.iter().map(|n| {
            let v = path.iter().find(|(k, _)| sig(k) == *n).map_or(10.0, |p| p.1);
            (n, v)
        }));
        let r = search_greedy(&g, &ev, &sig("H2")).unwrap();
        assert_eq!(r.best_node, sig("E2xE2"));
        assert!(r.evaluations <= g.nodes.len());
    }

    #[test]
    fn best_first_budget() {
        let g = build_graph(3, &DistanceTable::default()).unwrap();
        let ev = Evaluator::Synthetic(Synthetic::CurvatureImbalance);
        let one = search_best_first(&g, &ev, &sig("H2xH2"), 1).unwrap();
        assert_eq!((one.evaluations, one.best_value), (1, 2.0));
        let all = search_best_first(&g, &ev, &sig("H2xH2"), 1000).unwrap();
        assert_eq!(all.evaluations, g.nodes.len());
        let ex = search_exhaustive(&g, &ev).unwrap();
        assert_eq!((all.best_node, all.best_value), (ex.best_node, ex.best_value));
        for budget in [2, 5, 11] {
            assert!(search_best_first(&g, &ev, &sig("E2"), budget).unwrap().evaluations <= budget);
        }
    }

    #[test]
    fn evaluator_specs() {
        assert!(matches!(
            Evaluator::from_spec("synthetic:factor-count").unwrap(),
            Evaluator::Synthetic(Synthetic::FactorCount)
        ));
        assert!(Evaluator::from_spec("synthetic:nope").is_err());
        assert!(Evaluator::from_spec("oops").is_err());
    }

    #[test]
    fn external_command_evaluator() {
        let ev = Evaluator::from_spec("cmd:printf '%s' 2.5; true").unwrap();
        assert!(!ev.parallel_safe());
        let ev = Evaluator::ExternalCommand { command: "echo ${#1} #".into(), parallel_safe: false };
        assert_eq!(ev.evaluate(&sig("E2xH2")).unwrap(), 5.0);
        let bad = Evaluator::ExternalCommand { command: "echo nan-ish".into(), parallel_safe: false };
        assert!(bad.evaluate(&sig("E2")).is_err());
    }

    #[test]
    fn extension_direction() {
        assert!(extends(&sig("E2"), &sig("E2xH2")));
        assert!(!extends(&sig("E2xH2"), &sig("E2")));
        assert!(!extends(&sig("S2"), &sig("E2xH2")));
    }
}
