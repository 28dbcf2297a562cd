//! Random walks to absorption, an exact absorbing-chain solver, and the
//! walk-derived information measures at node and whole-graph level.
//!
//! All sampling is driven by per-(rep, node) ChaCha substreams of one master
//! seed, so results are independent of thread count and identical across
//! runs.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::builder::{HonGraph, NEG_SINK_IDX, POS_SINK_IDX};
use crate::error::{Error, Result};
use crate::seqstats::binary_entropy;

/// How the whole-graph measure weights its start nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StartWeighting {
    /// Proportional to each first-order node's total out-edge weight.
    #[default]
    OutDegree,
    /// Equal weight per first-order node with out-edges.
    Uniform,
}

impl FromStr for StartWeighting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "out-degree" => Ok(StartWeighting::OutDegree),
            "uniform" => Ok(StartWeighting::Uniform),
            other => Err(Error::invalid(format!(
                "unknown start weighting `{other}` (expected `out-degree` or `uniform`)"
            ))),
        }
    }
}

impl fmt::Display for StartWeighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StartWeighting::OutDegree => "out-degree",
            StartWeighting::Uniform => "uniform",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub walks_per_start: usize,
    pub max_steps: usize,
    /// Independent repetitions of the whole-graph estimate.
    pub reps: usize,
    pub seed: u64,
    pub start_weighting: StartWeighting,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            walks_per_start: 10_000,
            max_steps: 100,
            reps: 10,
            seed: 0,
            start_weighting: StartWeighting::OutDegree,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walks_per_start < 1 {
            return Err(Error::invalid("walks_per_start must be at least 1"));
        }
        if self.max_steps < 1 {
            return Err(Error::invalid("max_steps must be at least 1"));
        }
        if self.reps < 1 {
            return Err(Error::invalid("reps must be at least 1"));
        }
        Ok(())
    }
}

/// Absorption estimate for one start node. `p_pos` and `p_neg` are
/// normalized over non-censored walks (`p_neg = 1 - p_pos` exactly);
/// `censored` is the fraction of walks that exhausted `max_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkDistribution {
    pub p_pos: f64,
    pub p_neg: f64,
    pub censored: f64,
}

/// Per-node cumulative transition probabilities. Probabilities are exact
/// integer-ratio quotients, so rescaling all weights by a common factor
/// leaves every table entry bit-identical.
pub(crate) struct StepTable {
    cum: Vec<f64>,
    targets: Vec<usize>,
}

impl StepTable {
    pub(crate) fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Transition choice for a uniform draw `u` in [0, 1).
    pub(crate) fn pick(&self, u: f64) -> usize {
        let i = self
            .cum
            .partition_point(|&c| c <= u)
            .min(self.targets.len() - 1);
        self.targets[i]
    }
}

pub(crate) fn step_tables(graph: &HonGraph) -> Vec<StepTable> {
    (0..graph.node_count())
        .map(|u| {
            let adj = graph.adj(u);
            let total = graph.out_weight(u) as f64;
            let mut cum = Vec::with_capacity(adj.len());
            let mut targets = Vec::with_capacity(adj.len());
            let mut acc = 0.0;
            for &(v, w) in adj {
                acc += w as f64 / total;
                cum.push(acc);
                targets.push(v);
            }
            StepTable { cum, targets }
        })
        .collect()
}

/// One walk to absorption. `Some(label)` on reaching a sink within
/// `max_steps` steps; `None` when the cap is hit or a dangling node is
/// reached mid-walk.
fn walk_from(
    tables: &[StepTable],
    start: usize,
    rng: &mut ChaCha8Rng,
    max_steps: usize,
) -> Option<bool> {
    let mut cur = start;
    for _ in 0..max_steps {
        let t = &tables[cur];
        if t.is_empty() {
            return None;
        }
        cur = t.pick(rng.random());
        match cur {
            POS_SINK_IDX => return Some(true),
            NEG_SINK_IDX => return Some(false),
            _ => {}
        }
    }
    None
}

fn check_start(graph: &HonGraph, start: usize) -> Result<()> {
    if start >= graph.node_count() {
        return Err(Error::invalid(format!("node index {start} out of range")));
    }
    if graph.is_sink(start) {
        return Err(Error::Walk(format!(
            "cannot start a walk at sink node `{}`",
            graph.encoding(start)
        )));
    }
    if graph.adj(start).is_empty() {
        return Err(Error::Walk(format!(
            "node `{}` has no out-edges",
            graph.encoding(start)
        )));
    }
    Ok(())
}

/// Single walk with caller-owned randomness. Uses the same transition
/// arithmetic as the bulk estimator.
pub fn sample_walk(
    graph: &HonGraph,
    start: usize,
    rng: &mut ChaCha8Rng,
    max_steps: usize,
) -> Result<Option<bool>> {
    check_start(graph, start)?;
    let mut cur = start;
    for _ in 0..max_steps {
        let adj = graph.adj(cur);
        if adj.is_empty() {
            return Ok(None);
        }
        let total = graph.out_weight(cur) as f64;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut next = adj[adj.len() - 1].0;
        for &(v, w) in adj {
            acc += w as f64 / total;
            if u < acc {
                next = v;
                break;
            }
        }
        cur = next;
        match cur {
            POS_SINK_IDX => return Ok(Some(true)),
            NEG_SINK_IDX => return Ok(Some(false)),
            _ => {}
        }
    }
    Ok(None)
}

fn substream(seed: u64, rep: usize, node: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((rep as u64) << 32) | node as u64);
    rng
}

/// Per-start substream for path sampling, kept disjoint from the absorption
/// estimators' streams by the high bit.
pub(crate) fn path_stream(seed: u64, node: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1 << 63 | node as u64);
    rng
}

fn estimate(
    graph: &HonGraph,
    tables: &[StepTable],
    node: usize,
    rep: usize,
    config: &WalkConfig,
) -> Result<SinkDistribution> {
    let mut rng = substream(config.seed, rep, node);
    let (mut pos, mut neg, mut cens) = (0u64, 0u64, 0u64);
    for _ in 0..config.walks_per_start {
        match walk_from(tables, node, &mut rng, config.max_steps) {
            Some(true) => pos += 1,
            Some(false) => neg += 1,
            None => cens += 1,
        }
    }
    if cens * 2 > config.walks_per_start as u64 {
        return Err(Error::Walk(format!(
            "{} of {} walks from `{}` were censored at {} steps",
            cens,
            config.walks_per_start,
            graph.encoding(node),
            config.max_steps
        )));
    }
    let p_pos = pos as f64 / (pos + neg) as f64;
    Ok(SinkDistribution {
        p_pos,
        p_neg: 1.0 - p_pos,
        censored: cens as f64 / config.walks_per_start as f64,
    })
}

/// Monte Carlo absorption estimate for one node, from
/// `config.walks_per_start` walks on its own substream.
pub fn sink_distribution(
    graph: &HonGraph,
    node: usize,
    config: &WalkConfig,
) -> Result<SinkDistribution> {
    config.validate()?;
    check_start(graph, node)?;
    let tables = step_tables(graph);
    estimate(graph, &tables, node, 0, config)
}

/// Monte Carlo absorption estimates for every walkable node, indexed by node.
/// Sinks and nodes without out-edges yield `None`.
pub fn sink_distributions(
    graph: &HonGraph,
    config: &WalkConfig,
) -> Result<Vec<Option<SinkDistribution>>> {
    config.validate()?;
    let tables = step_tables(graph);
    (0..graph.node_count())
        .into_par_iter()
        .map(|u| {
            if graph.is_sink(u) || graph.adj(u).is_empty() {
                Ok(None)
            } else {
                estimate(graph, &tables, u, 0, config).map(Some)
            }
        })
        .collect()
}

/// Exact absorption probabilities for every node, by fixed-point iteration
/// of p(u) = Σ_v P(u→v) p(v) with sink boundary values, run to a residual
/// below 1e-13. Errors if any node cannot reach a sink.
pub fn exact_absorption(graph: &HonGraph) -> Result<Vec<SinkDistribution>> {
    let n = graph.node_count();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, v, _) in graph.edges() {
        rev[v].push(u);
    }
    let mut reach = vec![false; n];
    reach[NEG_SINK_IDX] = true;
    reach[POS_SINK_IDX] = true;
    let mut stack = vec![NEG_SINK_IDX, POS_SINK_IDX];
    while let Some(v) = stack.pop() {
        for &u in &rev[v] {
            if !reach[u] {
                reach[u] = true;
                stack.push(u);
            }
        }
    }
    if let Some(bad) = (0..n).find(|&u| !reach[u]) {
        return Err(Error::Walk(format!(
            "node `{}` cannot reach a sink",
            graph.encoding(bad)
        )));
    }
    let mut p = vec![0.0f64; n];
    p[POS_SINK_IDX] = 1.0;
    let mut next = p.clone();
    for _ in 0..1_000_000 {
        let mut delta = 0.0f64;
        for u in 0..n {
            if graph.is_sink(u) {
                continue;
            }
            let total = graph.out_weight(u) as f64;
            let mut acc = 0.0;
            for &(v, w) in graph.adj(u) {
                acc += w as f64 / total * p[v];
            }
            delta = delta.max((acc - p[u]).abs());
            next[u] = acc;
        }
        std::mem::swap(&mut p, &mut next);
        if delta <= 1e-13 {
            return Ok(p
                .iter()
                .map(|&pp| SinkDistribution {
                    p_pos: pp,
                    p_neg: 1.0 - pp,
                    censored: 0.0,
                })
                .collect());
        }
    }
    Err(Error::Walk(
        "absorption probabilities did not converge".into(),
    ))
}

/// Per-node absorption table from either source, indexed by node; sinks
/// yield `None`, as do dangling nodes under the Monte Carlo source.
pub fn absorption_table(
    graph: &HonGraph,
    config: &WalkConfig,
    exact: bool,
) -> Result<Vec<Option<SinkDistribution>>> {
    if exact {
        let all = exact_absorption(graph)?;
        Ok(all
            .into_iter()
            .enumerate()
            .map(|(u, d)| (!graph.is_sink(u)).then_some(d))
            .collect())
    } else {
        sink_distributions(graph, config)
    }
}

/// Outcome-entropy reduction attributed to standing at a node with the given
/// absorption distribution, against the prior entropy `h_y`. Negative values
/// (a node less pure than the prior) clip to zero.
pub fn ig_from_distribution(dist: &SinkDistribution, h_y: f64) -> f64 {
    (h_y - binary_entropy(dist.p_pos)).max(0.0)
}

/// Walk-estimated information gain of one node.
pub fn node_ig(graph: &HonGraph, node: usize, config: &WalkConfig, h_y: f64) -> Result<f64> {
    let dist = sink_distribution(graph, node, config)?;
    Ok(ig_from_distribution(&dist, h_y))
}

/// Class entropy of the label counts recorded in the graph metadata.
pub fn prior_entropy(graph: &HonGraph) -> Result<f64> {
    if graph.meta.n_total == 0 {
        return Err(Error::invalid(
            "graph metadata records no trajectories; class entropy undefined",
        ));
    }
    Ok(binary_entropy(graph.prevalence()))
}

/// First-order start nodes paired with their normalized weights. Nodes
/// without out-edges carry zero weight and are excluded.
fn weighted_starts(graph: &HonGraph, weighting: StartWeighting) -> Result<Vec<(usize, f64)>> {
    let starts: Vec<usize> = graph
        .first_order()
        .into_iter()
        .filter(|&u| !graph.adj(u).is_empty())
        .collect();
    if starts.is_empty() {
        return Err(Error::Walk(
            "graph has no first-order node with out-edges".into(),
        ));
    }
    Ok(match weighting {
        StartWeighting::OutDegree => {
            let total = starts.iter().map(|&u| graph.out_weight(u)).sum::<u64>() as f64;
            starts
                .into_iter()
                .map(|u| (u, graph.out_weight(u) as f64 / total))
                .collect()
        }
        StartWeighting::Uniform => {
            let p = 1.0 / starts.len() as f64;
            starts.into_iter().map(|u| (u, p)).collect()
        }
    })
}

/// Whole-graph information gain over repeated Monte Carlo estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphIgReport {
    /// Class entropy the gains are measured against.
    pub h_y: f64,
    pub per_rep: Vec<f64>,
    pub mean_ig: f64,
    pub std_ig: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Information gain of the whole graph: prior class entropy minus the
/// expected absorption entropy over start nodes, estimated `config.reps`
/// times with fresh substreams.
pub fn graph_ig(graph: &HonGraph, config: &WalkConfig) -> Result<GraphIgReport> {
    config.validate()?;
    let h_y = prior_entropy(graph)?;
    let starts = weighted_starts(graph, config.start_weighting)?;
    let tables = step_tables(graph);
    let mut per_rep = Vec::with_capacity(config.reps);
    for rep in 0..config.reps {
        let entropies: Vec<f64> = starts
            .par_iter()
            .map(|&(u, _)| {
                estimate(graph, &tables, u, rep, config).map(|d| binary_entropy(d.p_pos))
            })
            .collect::<Result<_>>()?;
        let h_cond: f64 = starts
            .iter()
            .zip(&entropies)
            .map(|(&(_, pu), &h)| pu * h)
            .sum();
        per_rep.push(h_y - h_cond);
    }
    let (mean_ig, std_ig) = mean_std(&per_rep);
    Ok(GraphIgReport {
        h_y,
        per_rep,
        mean_ig,
        std_ig,
    })
}

/// Deterministic counterpart of [`graph_ig`] using exact absorption
/// probabilities.
pub fn graph_ig_exact(graph: &HonGraph, weighting: StartWeighting) -> Result<f64> {
    let h_y = prior_entropy(graph)?;
    let starts = weighted_starts(graph, weighting)?;
    let table = exact_absorption(graph)?;
    let h_cond: f64 = starts
        .iter()
        .map(|&(u, pu)| pu * binary_entropy(table[u].p_pos))
        .sum();
    Ok(h_y - h_cond)
}

fn push_headers(out: &mut String, headers: &[(&str, String)]) {
    for (key, value) in headers {
        out.push_str(&format!("# {key}={value}\n"));
    }
}

/// CSV with one row per walkable node: encoding, absorption estimates, and
/// node information gain. Header comment lines echo the caller's resolved
/// configuration.
pub fn render_node_csv(
    graph: &HonGraph,
    table: &[Option<SinkDistribution>],
    h_y: f64,
    headers: &[(&str, String)],
) -> String {
    let mut out = String::new();
    push_headers(&mut out, headers);
    out.push_str("node,p_pos,p_neg,censored,ig\n");
    for (u, dist) in table.iter().enumerate() {
        if let Some(d) = dist {
            let ig = ig_from_distribution(d, h_y);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                graph.encoding(u),
                d.p_pos,
                d.p_neg,
                d.censored,
                ig
            ));
        }
    }
    out
}

/// CSV with one row per repetition plus mean and std summary rows.
pub fn render_graph_ig_csv(report: &GraphIgReport, headers: &[(&str, String)]) -> String {
    let mut out = String::new();
    push_headers(&mut out, headers);
    out.push_str(&format!("# h_y={}\n", report.h_y));
    out.push_str("stat,ig\n");
    for (i, ig) in report.per_rep.iter().enumerate() {
        out.push_str(&format!("rep{},{}\n", i + 1, ig));
    }
    out.push_str(&format!("mean,{}\n", report.mean_ig));
    out.push_str(&format!("std,{}\n", report.std_ig));
    out
}
