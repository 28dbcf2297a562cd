//! Most-informative path extraction and cross-graph path comparison:
//! which outcome-reaching routes does one graph know that another misses?

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::builder::{HonGraph, HonNode};
use crate::error::{Error, Result};
use crate::walker::{self, WalkConfig};

/// A sampled walk from a first-order node to a sink, with the sink kept as
/// an outcome label rather than a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<HonNode>,
    pub outcome: bool,
}

impl Path {
    /// Non-sink node count.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node encodings joined by an arrow, ending at the sink encoding.
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = self.nodes.iter().map(HonNode::encoding).collect();
        parts.push(
            HonNode::Sink {
                label: self.outcome,
            }
            .encoding(),
        );
        parts.join("→")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathScore {
    pub mean_ig: f64,
    pub product_ig: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    pub samples_per_start: usize,
    /// Longest path (in non-sink nodes) kept; longer walks are abandoned.
    pub max_len: usize,
    pub seed: u64,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            samples_per_start: 10_000,
            max_len: 6,
            seed: 0,
        }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_start < 1 {
            return Err(Error::invalid("samples_per_start must be at least 1"));
        }
        if self.max_len < 1 {
            return Err(Error::invalid("max_len must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPath {
    pub path: Path,
    pub score: PathScore,
}

/// Best sampled path per exact length for one start node.
#[derive(Debug, Clone, PartialEq)]
pub struct StartPaths {
    pub start: HonNode,
    pub by_length: BTreeMap<usize, ScoredPath>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopPathsReport {
    pub per_start: Vec<StartPaths>,
    /// Starts from which no sampled walk reached the target sink.
    pub skipped: Vec<HonNode>,
}

fn path_score(nodes: &[usize], igs: &[Option<f64>]) -> Result<PathScore> {
    let mut sum = 0.0;
    let mut product = 1.0;
    for &u in nodes {
        let ig = igs.get(u).copied().flatten().ok_or_else(|| {
            Error::invalid(format!(
                "node index {u} missing from the information gain table"
            ))
        })?;
        sum += ig;
        product *= ig;
    }
    Ok(PathScore {
        mean_ig: sum / nodes.len() as f64,
        product_ig: product,
    })
}

/// Samples walks from every first-order node and keeps, per start and per
/// exact length, the distinct sink-reaching path with the highest product of
/// node information gains (ties to the lexicographically first node
/// sequence). Starts whose samples never reach the target sink are listed
/// as skipped.
pub fn top_paths(
    graph: &HonGraph,
    node_igs: &[Option<f64>],
    outcome: bool,
    config: &PathConfig,
) -> Result<TopPathsReport> {
    config.validate()?;
    if node_igs.len() != graph.node_count() {
        return Err(Error::invalid(
            "information gain table does not cover the graph's nodes",
        ));
    }
    let tables = walker::step_tables(graph);
    let starts: Vec<usize> = graph
        .first_order()
        .into_iter()
        .filter(|&u| !graph.adj(u).is_empty())
        .collect();
    let sampled: Vec<(usize, Vec<std::collections::BTreeSet<Vec<usize>>>)> = starts
        .par_iter()
        .map(|&u| {
            let mut rng = walker::path_stream(config.seed, u);
            let mut by_len: Vec<std::collections::BTreeSet<Vec<usize>>> =
                vec![Default::default(); config.max_len + 1];
            for _ in 0..config.samples_per_start {
                let mut nodes = vec![u];
                loop {
                    let t = &tables[*nodes.last().expect("nonempty")];
                    if t.is_empty() {
                        break;
                    }
                    match t.pick(rng.random()) {
                        v if graph.is_sink(v) => {
                            if HonGraph::sink_index(outcome) == v {
                                by_len[nodes.len()].insert(nodes.clone());
                            }
                            break;
                        }
                        v if nodes.len() == config.max_len => {
                            let _ = v;
                            break;
                        }
                        v => nodes.push(v),
                    }
                }
            }
            (u, by_len)
        })
        .collect();
    let mut per_start = Vec::new();
    let mut skipped = Vec::new();
    for (u, by_len) in sampled {
        let mut best_by_length = BTreeMap::new();
        for paths in by_len.iter() {
            let mut best: Option<(Vec<usize>, PathScore)> = None;
            for nodes in paths {
                let score = path_score(nodes, node_igs)?;
                if best
                    .as_ref()
                    .is_none_or(|(_, s)| score.product_ig > s.product_ig)
                {
                    best = Some((nodes.clone(), score));
                }
            }
            if let Some((nodes, score)) = best {
                let path = Path {
                    nodes: nodes.iter().map(|&i| graph.node(i).clone()).collect(),
                    outcome,
                };
                best_by_length.insert(path.len(), ScoredPath { path, score });
            }
        }
        if best_by_length.is_empty() {
            skipped.push(graph.node(u).clone());
        } else {
            per_start.push(StartPaths {
                start: graph.node(u).clone(),
                by_length: best_by_length,
            });
        }
    }
    Ok(TopPathsReport { per_start, skipped })
}

/// Result of replaying a path inside another graph.
#[derive(Debug, Clone, PartialEq)]
pub enum MatchOutcome {
    /// Every edge exists as sampled.
    Exact,
    /// A walk to the same sink exists after stripping conditions.
    Pruned(Path),
    /// No walk to the same sink survives even full stripping.
    Absent,
}

impl fmt::Display for MatchOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchOutcome::Exact => "exact",
            MatchOutcome::Pruned(_) => "pruned",
            MatchOutcome::Absent => "none",
        })
    }
}

/// The node with progressively fewer conditions: itself, then with the most
/// distant condition dropped, down to the bare base node.
fn strip_chain(node: &HonNode) -> Vec<HonNode> {
    let Some(base) = node.base() else {
        return vec![node.clone()];
    };
    let conditions = node.conditions();
    (0..=conditions.len())
        .rev()
        .map(|m| HonNode::entity(base, conditions[..m].to_vec()))
        .collect()
}

fn edge_exists(target: &HonGraph, u: usize, v: &HonNode) -> Option<usize> {
    let vi = target.node_index(&v.encoding())?;
    target.edge_weight(u, vi).map(|_| vi)
}

fn recover(
    target: &HonGraph,
    cur: usize,
    rest: &[HonNode],
    outcome: bool,
    taken: &mut Vec<HonNode>,
) -> bool {
    let Some((next, tail)) = rest.split_first() else {
        return target
            .edge_weight(cur, HonGraph::sink_index(outcome))
            .is_some();
    };
    for variant in strip_chain(next) {
        if let Some(vi) = edge_exists(target, cur, &variant) {
            taken.push(variant);
            if recover(target, vi, tail, outcome, taken) {
                return true;
            }
            taken.pop();
        }
    }
    false
}

/// Replays `path` inside `target`. Missing edges trigger condition
/// stripping on the successor node (most distant condition first, with
/// backtracking across strip levels); the outcome is `Pruned` when a full
/// walk to the same sink is recovered and `Exact` when no stripping was
/// needed. Paths of length 1 match on node presence alone: a first-order
/// start carries no route information to verify.
pub fn match_path(path: &Path, target: &HonGraph) -> MatchOutcome {
    if path.is_empty() {
        return MatchOutcome::Absent;
    }
    let first_chain = strip_chain(&path.nodes[0]);
    if path.len() == 1 {
        for variant in first_chain {
            if target.node_index(&variant.encoding()).is_some() {
                return if variant == path.nodes[0] {
                    MatchOutcome::Exact
                } else {
                    MatchOutcome::Pruned(Path {
                        nodes: vec![variant],
                        outcome: path.outcome,
                    })
                };
            }
        }
        return MatchOutcome::Absent;
    }
    for variant in first_chain {
        let Some(start) = target.node_index(&variant.encoding()) else {
            continue;
        };
        let mut taken = vec![variant];
        if recover(target, start, &path.nodes[1..], path.outcome, &mut taken) {
            return if taken == path.nodes {
                MatchOutcome::Exact
            } else {
                MatchOutcome::Pruned(Path {
                    nodes: taken,
                    outcome: path.outcome,
                })
            };
        }
    }
    MatchOutcome::Absent
}

/// One source path replayed against one target.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetCell {
    pub outcome: MatchOutcome,
    /// Mean information gain of the recovered path under the target's own
    /// node table; absent when the path has no counterpart.
    pub target_mean_ig: Option<f64>,
}

/// Per-length aggregate over one target's cells.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthBucket {
    pub length: usize,
    /// Paths with a counterpart in the target (non-`Absent`).
    pub comparable: usize,
    pub exact_pct: Option<f64>,
    /// Share of comparable paths whose source mean gain strictly exceeds
    /// the target's.
    pub ig_higher_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub start: HonNode,
    pub length: usize,
    pub path: Path,
    pub score: PathScore,
    pub per_target: Vec<TargetCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    pub rows: Vec<CompareRow>,
    /// Length buckets per target, parallel to the targets argument.
    pub buckets: Vec<Vec<LengthBucket>>,
    pub skipped: Vec<HonNode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CompareConfig {
    pub path: PathConfig,
    pub walk: WalkConfig,
    /// Solve absorption exactly instead of walking.
    pub exact: bool,
}

fn ig_table(graph: &HonGraph, config: &CompareConfig) -> Result<Vec<Option<f64>>> {
    let h_y = walker::prior_entropy(graph)?;
    let table = walker::absorption_table(graph, &config.walk, config.exact)?;
    Ok(table
        .into_iter()
        .map(|d| d.map(|d| walker::ig_from_distribution(&d, h_y)))
        .collect())
}

fn mean_ig_of(path: &Path, graph: &HonGraph, igs: &[Option<f64>]) -> Option<f64> {
    let mut sum = 0.0;
    for node in &path.nodes {
        let idx = graph.node_index(&node.encoding())?;
        sum += igs.get(idx).copied().flatten()?;
    }
    Some(sum / path.len() as f64)
}

/// Extracts the source's top paths toward `outcome` and replays each one
/// against every target, reporting per-length exact-match and
/// gain-comparison percentages over comparable paths only.
pub fn compare_graphs(
    source: &HonGraph,
    targets: &[HonGraph],
    outcome: bool,
    config: &CompareConfig,
) -> Result<MatchReport> {
    let source_igs = ig_table(source, config)?;
    let top = top_paths(source, &source_igs, outcome, &config.path)?;
    let target_igs: Vec<Vec<Option<f64>>> = targets
        .iter()
        .map(|t| ig_table(t, config))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for start in &top.per_start {
        for scored in start.by_length.values() {
            let per_target: Vec<TargetCell> = targets
                .iter()
                .zip(&target_igs)
                .map(|(target, igs)| {
                    let outcome = match_path(&scored.path, target);
                    let target_mean_ig = match &outcome {
                        MatchOutcome::Exact => mean_ig_of(&scored.path, target, igs),
                        MatchOutcome::Pruned(p) => mean_ig_of(p, target, igs),
                        MatchOutcome::Absent => None,
                    };
                    TargetCell {
                        outcome,
                        target_mean_ig,
                    }
                })
                .collect();
            rows.push(CompareRow {
                start: start.start.clone(),
                length: scored.path.len(),
                path: scored.path.clone(),
                score: scored.score,
                per_target,
            });
        }
    }
    let buckets = (0..targets.len())
        .map(|t| {
            let mut by_len: BTreeMap<usize, (usize, usize, usize, usize)> = BTreeMap::new();
            for row in &rows {
                let cell = &row.per_target[t];
                let entry = by_len.entry(row.length).or_insert((0, 0, 0, 0));
                if matches!(cell.outcome, MatchOutcome::Absent) {
                    continue;
                }
                entry.0 += 1;
                if matches!(cell.outcome, MatchOutcome::Exact) {
                    entry.1 += 1;
                }
                if let Some(tig) = cell.target_mean_ig {
                    entry.2 += 1;
                    if row.score.mean_ig > tig {
                        entry.3 += 1;
                    }
                }
            }
            by_len
                .into_iter()
                .map(
                    |(length, (comparable, exact, with_ig, higher))| LengthBucket {
                        length,
                        comparable,
                        exact_pct: (comparable > 0)
                            .then(|| 100.0 * exact as f64 / comparable as f64),
                        ig_higher_pct: (with_ig > 0)
                            .then(|| 100.0 * higher as f64 / with_ig as f64),
                    },
                )
                .collect()
        })
        .collect();
    Ok(MatchReport {
        rows,
        buckets,
        skipped: top.skipped,
    })
}

fn push_headers(out: &mut String, headers: &[(&str, String)]) {
    for (key, value) in headers {
        out.push_str(&format!("# {key}={value}\n"));
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "na".to_owned(), |x| x.to_string())
}

/// CSV of the best path per start and length.
pub fn render_paths_csv(report: &TopPathsReport, headers: &[(&str, String)]) -> String {
    let mut out = String::new();
    push_headers(&mut out, headers);
    for node in &report.skipped {
        out.push_str(&format!(
            "# no sampled walk reached the sink from {}\n",
            node.encoding()
        ));
    }
    out.push_str("start,length,path,mean_ig,product_ig\n");
    for start in &report.per_start {
        for scored in start.by_length.values() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                start.start.encoding(),
                scored.path.len(),
                scored.path.render(),
                scored.score.mean_ig,
                scored.score.product_ig
            ));
        }
    }
    out
}

/// CSV of the comparison rows followed by per-target length buckets.
pub fn render_compare_csv(
    report: &MatchReport,
    target_names: &[String],
    headers: &[(&str, String)],
) -> String {
    let mut out = String::new();
    push_headers(&mut out, headers);
    for node in &report.skipped {
        out.push_str(&format!(
            "# no sampled walk reached the sink from {}\n",
            node.encoding()
        ));
    }
    out.push_str("start,length,path,mean_ig,product_ig");
    for name in target_names {
        out.push_str(&format!(",match:{name},target_mean_ig:{name}"));
    }
    out.push('\n');
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{}",
            row.start.encoding(),
            row.length,
            row.path.render(),
            row.score.mean_ig,
            row.score.product_ig
        ));
        for cell in &row.per_target {
            out.push_str(&format!(
                ",{},{}",
                cell.outcome,
                fmt_opt(cell.target_mean_ig)
            ));
        }
        out.push('\n');
    }
    for (name, buckets) in target_names.iter().zip(&report.buckets) {
        for b in buckets {
            out.push_str(&format!(
                "# bucket target={} length={} comparable={} exact_pct={} ig_higher_pct={}\n",
                name,
                b.length,
                b.comparable,
                fmt_opt(b.exact_pct),
                fmt_opt(b.ig_higher_pct)
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{self, GraphMeta, Method};
    use crate::corpus::{fig1_toy, Fig1Variant, NEG_SINK, POS_SINK};
    use approx::assert_abs_diff_eq;

    fn g(n_pos: usize, n_total: usize, edges: &[(&str, &str, u64)]) -> HonGraph {
        let mut nodes: Vec<HonNode> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for &(u, v, _) in edges {
            for enc in [u, v] {
                if enc != POS_SINK && enc != NEG_SINK && seen.insert(enc) {
                    nodes.push(HonNode::parse(enc).unwrap());
                }
            }
        }
        let k = nodes.iter().map(HonNode::order).max().unwrap_or(1);
        let meta = GraphMeta {
            method: Method::Suphon,
            k,
            alpha: 0.0,
            n_perm: 0,
            seed: 0,
            n_pos,
            n_total,
        };
        let edges = edges
            .iter()
            .map(|&(u, v, w)| (u.to_owned(), v.to_owned(), w))
            .collect();
        HonGraph::from_parts(meta, nodes, edges).unwrap()
    }

    fn exact_igs(graph: &HonGraph) -> Vec<Option<f64>> {
        let h_y = walker::prior_entropy(graph).unwrap();
        walker::absorption_table(graph, &WalkConfig::default(), true)
            .unwrap()
            .into_iter()
            .map(|d| d.map(|d| walker::ig_from_distribution(&d, h_y)))
            .collect()
    }

    fn fig1_skip() -> HonGraph {
        let corpus = fig1_toy(Fig1Variant::Noisy, 100, 5).unwrap();
        let config = builder::BuildConfig {
            k: 2,
            min_support: 10,
            ..Default::default()
        };
        builder::build_suphon(&corpus, &config).unwrap()
    }

    fn fig1_noskip() -> HonGraph {
        let corpus = fig1_toy(Fig1Variant::Noisy, 100, 5).unwrap();
        let config = builder::BuildConfig {
            k: 2,
            min_support: 10,
            ..Default::default()
        };
        builder::build_suphon_noskip(&corpus, &config).unwrap()
    }

    #[test]
    fn toy_best_path_runs_through_conditional_node() {
        let graph = fig1_skip();
        let igs = exact_igs(&graph);
        let config = PathConfig {
            samples_per_start: 2000,
            ..Default::default()
        };
        let report = top_paths(&graph, &igs, true, &config).unwrap();
        let a = report
            .per_start
            .iter()
            .find(|s| s.start.encoding() == "A")
            .expect("start A sampled");
        let best2 = &a.by_length[&2];
        let encs: Vec<String> = best2.path.nodes.iter().map(HonNode::encoding).collect();
        assert_eq!(encs, ["A", "C|X"]);
        // ig(A) = 1 - h(0.8125); ig(C|X) = 1.
        assert_abs_diff_eq!(best2.score.product_ig, 0.30378774, epsilon = 1e-6);
        assert_abs_diff_eq!(
            best2.score.mean_ig,
            (0.30378774 + 1.0) / 2.0,
            epsilon = 1e-6
        );
        assert!(a.by_length.contains_key(&1), "direct sink hop sampled");
    }

    /// Every walk from `start` to the requested sink, depth-first.
    fn all_walks(graph: &HonGraph, start: usize, outcome: bool, max_len: usize) -> Vec<Vec<usize>> {
        let mut found = Vec::new();
        let mut stack = vec![vec![start]];
        while let Some(nodes) = stack.pop() {
            for &(v, _) in graph.adj(*nodes.last().unwrap()) {
                if graph.is_sink(v) {
                    if v == HonGraph::sink_index(outcome) {
                        found.push(nodes.clone());
                    }
                } else if nodes.len() < max_len {
                    let mut next = nodes.clone();
                    next.push(v);
                    stack.push(next);
                }
            }
        }
        found
    }

    #[test]
    fn sampled_top_paths_match_exhaustive_enumeration() {
        let graph = g(
            1,
            2,
            &[
                ("A", "B", 1),
                ("A", "C", 1),
                ("A", "D", 1),
                ("B", "C", 1),
                ("B", "D", 2),
                ("B", POS_SINK, 1),
                ("C", POS_SINK, 2),
                ("C", NEG_SINK, 1),
                ("D", POS_SINK, 1),
                ("D", NEG_SINK, 3),
            ],
        );
        let igs = exact_igs(&graph);
        let config = PathConfig {
            samples_per_start: 20_000,
            max_len: 4,
            seed: 1,
        };
        let report = top_paths(&graph, &igs, true, &config).unwrap();
        for start in &report.per_start {
            let s = graph.node_index(&start.start.encoding()).unwrap();
            let mut oracle: BTreeMap<usize, (Vec<usize>, f64)> = BTreeMap::new();
            for walk in all_walks(&graph, s, true, config.max_len) {
                let score = path_score(&walk, &igs).unwrap();
                let entry = oracle
                    .entry(walk.len())
                    .or_insert((walk.clone(), score.product_ig));
                if score.product_ig > entry.1 {
                    *entry = (walk, score.product_ig);
                }
            }
            assert_eq!(
                start.by_length.len(),
                oracle.len(),
                "start {}",
                start.start.encoding()
            );
            for (len, scored) in &start.by_length {
                let got: Vec<String> = scored.path.nodes.iter().map(HonNode::encoding).collect();
                let want: Vec<String> = oracle[len]
                    .0
                    .iter()
                    .map(|&i| graph.encoding(i).to_owned())
                    .collect();
                assert_eq!(got, want, "length {len}");
            }
        }
    }

    #[test]
    fn ranking_survives_global_ig_rescale() {
        let graph = fig1_skip();
        let igs = exact_igs(&graph);
        let scaled: Vec<Option<f64>> = igs.iter().map(|o| o.map(|v| v * 3.5)).collect();
        let config = PathConfig {
            samples_per_start: 1500,
            ..Default::default()
        };
        let base = top_paths(&graph, &igs, true, &config).unwrap();
        let rescaled = top_paths(&graph, &scaled, true, &config).unwrap();
        assert_eq!(base.per_start.len(), rescaled.per_start.len());
        for (a, b) in base.per_start.iter().zip(&rescaled.per_start) {
            assert_eq!(a.start, b.start);
            for (len, scored) in &a.by_length {
                assert_eq!(scored.path, b.by_length[len].path);
            }
        }
    }

    #[test]
    fn unreachable_outcome_marks_start_skipped() {
        let graph = g(1, 2, &[("A", POS_SINK, 1), ("B", NEG_SINK, 1)]);
        let igs = exact_igs(&graph);
        let report = top_paths(&graph, &igs, true, &PathConfig::default()).unwrap();
        assert_eq!(report.per_start.len(), 1);
        assert_eq!(report.per_start[0].start.encoding(), "A");
        assert_eq!(report.skipped.len(), 1);
        assert_eq!(report.skipped[0].encoding(), "B");
    }

    #[test]
    fn top_paths_is_deterministic() {
        let graph = fig1_skip();
        let igs = exact_igs(&graph);
        let config = PathConfig {
            samples_per_start: 800,
            ..Default::default()
        };
        let a = top_paths(&graph, &igs, true, &config).unwrap();
        let b = top_paths(&graph, &igs, true, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn self_match_is_exact_for_all_sampled_paths() {
        let graph = fig1_skip();
        let igs = exact_igs(&graph);
        let config = PathConfig {
            samples_per_start: 1000,
            ..Default::default()
        };
        let report = top_paths(&graph, &igs, true, &config).unwrap();
        assert!(!report.per_start.is_empty());
        for start in &report.per_start {
            for scored in start.by_length.values() {
                assert_eq!(match_path(&scored.path, &graph), MatchOutcome::Exact);
            }
        }
    }

    #[test]
    fn missing_conditional_edge_prunes_to_base() {
        // Path 403 → 414|403 → sink(1); target only knows 403 → 414 → sink(1).
        let path = Path {
            nodes: vec![
                HonNode::first_order("403"),
                HonNode::parse("414|403").unwrap(),
            ],
            outcome: true,
        };
        let target = g(1, 1, &[("403", "414", 1), ("414", POS_SINK, 1)]);
        match match_path(&path, &target) {
            MatchOutcome::Pruned(p) => {
                let encs: Vec<String> = p.nodes.iter().map(HonNode::encoding).collect();
                assert_eq!(encs, ["403", "414"]);
            }
            other => panic!("expected pruned, got {other:?}"),
        }
        // Without even the base edge the path has no counterpart.
        let bare = g(1, 1, &[("403", POS_SINK, 1), ("414", POS_SINK, 1)]);
        assert_eq!(match_path(&path, &bare), MatchOutcome::Absent);
        // With the conditional edge present the match is exact.
        let full = g(
            1,
            1,
            &[
                ("403", "414|403", 1),
                ("414|403", POS_SINK, 1),
                ("414", POS_SINK, 1),
            ],
        );
        assert_eq!(match_path(&path, &full), MatchOutcome::Exact);
    }

    #[test]
    fn stripping_backtracks_when_the_exact_edge_dead_ends() {
        // Target has A → B|A but B|A reaches only sink(0); the stripped B
        // completes the walk to sink(1).
        let path = Path {
            nodes: vec![HonNode::first_order("A"), HonNode::parse("B|A").unwrap()],
            outcome: true,
        };
        let target = g(
            1,
            2,
            &[
                ("A", "B|A", 1),
                ("B|A", NEG_SINK, 1),
                ("A", "B", 1),
                ("B", POS_SINK, 1),
            ],
        );
        match match_path(&path, &target) {
            MatchOutcome::Pruned(p) => {
                let encs: Vec<String> = p.nodes.iter().map(HonNode::encoding).collect();
                assert_eq!(encs, ["A", "B"]);
            }
            other => panic!("expected pruned, got {other:?}"),
        }
    }

    #[test]
    fn length_one_paths_match_on_presence() {
        let path = Path {
            nodes: vec![HonNode::first_order("A")],
            outcome: true,
        };
        // Target lacks any A → sink(1) edge yet still matches.
        let target = g(
            1,
            2,
            &[("A", "B", 1), ("B", NEG_SINK, 1), ("C", POS_SINK, 1)],
        );
        assert_eq!(match_path(&path, &target), MatchOutcome::Exact);
        let without = g(1, 1, &[("C", POS_SINK, 1)]);
        assert_eq!(match_path(&path, &without), MatchOutcome::Absent);
    }

    fn compare_config(samples: usize) -> CompareConfig {
        CompareConfig {
            path: PathConfig {
                samples_per_start: samples,
                ..Default::default()
            },
            walk: WalkConfig::default(),
            exact: true,
        }
    }

    #[test]
    fn self_comparison_is_all_exact_with_no_ig_gains() {
        let graph = fig1_skip();
        let report = compare_graphs(
            &graph,
            std::slice::from_ref(&graph),
            true,
            &compare_config(1000),
        )
        .unwrap();
        assert!(!report.rows.is_empty());
        for row in &report.rows {
            assert_eq!(row.per_target[0].outcome, MatchOutcome::Exact);
        }
        for bucket in &report.buckets[0] {
            assert_eq!(bucket.exact_pct, Some(100.0), "length {}", bucket.length);
            assert_eq!(bucket.ig_higher_pct, Some(0.0), "length {}", bucket.length);
        }
    }

    #[test]
    fn length_one_bucket_is_full_even_without_sink_edges() {
        let source = fig1_skip();
        let noskip = fig1_noskip();
        // A has no sink edge in the contiguous variant, yet its length-1
        // row still counts as matched.
        let a = noskip.node_index("A").unwrap();
        assert!(noskip.adj(a).iter().all(|&(v, _)| !noskip.is_sink(v)));
        let report = compare_graphs(
            &source,
            std::slice::from_ref(&noskip),
            true,
            &compare_config(1000),
        )
        .unwrap();
        let len1 = report.buckets[0]
            .iter()
            .find(|b| b.length == 1)
            .expect("length-1 bucket");
        assert_eq!(len1.exact_pct, Some(100.0));
    }

    #[test]
    fn comparison_excludes_absent_paths_from_denominators() {
        let source = g(
            1,
            2,
            &[
                ("A", "B", 1),
                ("B", POS_SINK, 1),
                ("A", POS_SINK, 1),
                ("C", NEG_SINK, 1),
            ],
        );
        // Target breaks every route from A but keeps the nodes.
        let target = g(
            1,
            2,
            &[("A", "C", 1), ("C", NEG_SINK, 1), ("B", POS_SINK, 1)],
        );
        let report = compare_graphs(
            &source,
            std::slice::from_ref(&target),
            true,
            &compare_config(500),
        )
        .unwrap();
        let len2 = report.buckets[0].iter().find(|b| b.length == 2).unwrap();
        assert_eq!(len2.comparable, 0);
        assert_eq!(len2.exact_pct, None);
        let len1 = report.buckets[0].iter().find(|b| b.length == 1).unwrap();
        assert_eq!(len1.exact_pct, Some(100.0));
    }

    #[test]
    fn csv_reports_are_complete_and_deterministic() {
        let graph = fig1_skip();
        let report = compare_graphs(
            &graph,
            std::slice::from_ref(&graph),
            true,
            &compare_config(600),
        )
        .unwrap();
        let csv = render_compare_csv(&report, &["self".to_owned()], &[("seed", "0".to_owned())]);
        assert!(csv.starts_with("# seed=0\n"));
        assert!(csv.contains("start,length,path,mean_ig,product_ig,match:self,target_mean_ig:self"));
        assert!(csv.contains("# bucket target=self"));
        assert!(csv.contains("→__Y=1__"));
        let igs = exact_igs(&graph);
        let top = top_paths(
            &graph,
            &igs,
            true,
            &PathConfig {
                samples_per_start: 600,
                ..Default::default()
            },
        )
        .unwrap();
        let paths_csv = render_paths_csv(&top, &[]);
        let rows = paths_csv.lines().filter(|l| !l.starts_with('#')).count() - 1;
        let expect: usize = top.per_start.iter().map(|s| s.by_length.len()).sum();
        assert_eq!(rows, expect);
    }

    #[test]
    fn config_contracts() {
        let graph = fig1_skip();
        let igs = exact_igs(&graph);
        let bad = PathConfig {
            samples_per_start: 0,
            ..Default::default()
        };
        assert!(top_paths(&graph, &igs, true, &bad).is_err());
        let bad = PathConfig {
            max_len: 0,
            ..Default::default()
        };
        assert!(top_paths(&graph, &igs, true, &bad).is_err());
        assert!(top_paths(&graph, &igs[1..], true, &PathConfig::default()).is_err());
    }
}
