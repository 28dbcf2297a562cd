//! Trajectory-level outcome scoring from a graph's absorption
//! probabilities, ranking evaluation, and the label-noise sweep harness.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::builder::{self, BuildConfig, HonGraph};
use crate::corpus::{self, Corpus, PatternSpec, Trajectory};
use crate::error::{Error, Result};
use crate::seqstats;
use crate::walker::{self, SinkDistribution, WalkConfig};

/// How per-position probabilities combine into one trajectory score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregator {
    #[default]
    Mean,
    /// Mean in log-odds space; resists saturation near 0 and 1.
    LogOddsMean,
}

impl FromStr for Aggregator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Aggregator::Mean),
            "log-odds-mean" => Ok(Aggregator::LogOddsMean),
            other => Err(Error::invalid(format!(
                "unknown aggregator `{other}` (expected `mean` or `log-odds-mean`)"
            ))),
        }
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregator::Mean => "mean",
            Aggregator::LogOddsMean => "log-odds-mean",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScorerConfig {
    pub aggregator: Aggregator,
    /// Take absorption probabilities from the exact solver rather than walk
    /// estimates.
    pub exact: bool,
    /// Walk settings when `exact` is off.
    pub walk: WalkConfig,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        Self {
            aggregator: Aggregator::Mean,
            exact: true,
            walk: WalkConfig::default(),
        }
    }
}

/// Node assigned to each trajectory position; `None` marks tokens without a
/// first-order node in the graph.
pub type NodeMapping = Vec<Option<usize>>;

/// Index from base token to the graph nodes carrying it, for repeated
/// mapping against one graph.
pub struct NodeLookup<'a> {
    graph: &'a HonGraph,
    by_base: HashMap<&'a str, Vec<usize>>,
}

impl<'a> NodeLookup<'a> {
    pub fn new(graph: &'a HonGraph) -> Self {
        let mut by_base: HashMap<&str, Vec<usize>> = HashMap::new();
        for idx in 2..graph.node_count() {
            if let Some(base) = graph.node(idx).base() {
                by_base.entry(base).or_default().push(idx);
            }
        }
        NodeLookup { graph, by_base }
    }
}

/// Positions of `conditions` (most recent first) matched backwards from
/// `end`, nearest occurrences first; `None` when the prefix lacks them in
/// order.
fn nearest_condition_positions(
    tokens: &[&str],
    end: usize,
    conditions: &[String],
) -> Option<Vec<usize>> {
    let mut positions = Vec::with_capacity(conditions.len());
    let mut bound = end;
    for cond in conditions {
        let pos = tokens[..bound].iter().rposition(|t| *t == cond.as_str())?;
        positions.push(pos);
        bound = pos;
    }
    Some(positions)
}

/// Maps every position to the highest-order applicable node: base equals
/// the token and the conditions occur, in order, among the strictly earlier
/// tokens. Order ties prefer the conditions nearest the token (smallest
/// total distance), then the lexicographically first encoding.
pub fn map_tokens_to_nodes(
    trajectory: &Trajectory,
    corpus: &Corpus,
    lookup: &NodeLookup,
) -> NodeMapping {
    let tokens: Vec<&str> = trajectory
        .tokens
        .iter()
        .map(|&t| corpus.vocab.token(t))
        .collect();
    tokens
        .iter()
        .enumerate()
        .map(|(i, tok)| {
            let candidates = lookup.by_base.get(tok)?;
            let mut best: Option<(usize, usize, &str, usize)> = None;
            for &idx in candidates {
                let node = lookup.graph.node(idx);
                let Some(positions) = nearest_condition_positions(&tokens, i, node.conditions())
                else {
                    continue;
                };
                let distance: usize = positions.iter().map(|&p| i - p).sum();
                let key = (node.order(), distance, lookup.graph.encoding(idx), idx);
                let better = match &best {
                    None => true,
                    Some((order, dist, enc, _)) => {
                        (key.0 > *order)
                            || (key.0 == *order && key.1 < *dist)
                            || (key.0 == *order && key.1 == *dist && key.2 < *enc)
                    }
                };
                if better {
                    best = Some(key);
                }
            }
            best.map(|(_, _, _, idx)| idx)
        })
        .collect()
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-6, 1.0 - 1e-6);
    (p / (1.0 - p)).ln()
}

/// Aggregates the absorption probabilities of a trajectory's mapped nodes
/// into a positive-outcome score in [0, 1]. Unknown tokens are skipped; a
/// trajectory with no known token is an error.
pub fn score_trajectory(
    trajectory: &Trajectory,
    corpus: &Corpus,
    lookup: &NodeLookup,
    sinks: &[Option<SinkDistribution>],
    config: &ScorerConfig,
) -> Result<f64> {
    let mapping = map_tokens_to_nodes(trajectory, corpus, lookup);
    let mut probs = Vec::with_capacity(mapping.len());
    for idx in mapping.into_iter().flatten() {
        let dist = sinks.get(idx).copied().flatten().ok_or_else(|| {
            Error::invalid(format!(
                "absorption table does not cover node `{}`",
                lookup.graph.encoding(idx)
            ))
        })?;
        probs.push(dist.p_pos);
    }
    if probs.is_empty() {
        return Err(Error::invalid(format!(
            "no token of trajectory `{}` exists in the graph",
            trajectory.id
        )));
    }
    let n = probs.len() as f64;
    Ok(match config.aggregator {
        Aggregator::Mean => probs.iter().sum::<f64>() / n,
        Aggregator::LogOddsMean => {
            let mean = probs.iter().map(|&p| logit(p)).sum::<f64>() / n;
            1.0 / (1.0 + (-mean).exp())
        }
    })
}

/// Scores every trajectory in corpus order.
pub fn score_corpus(corpus: &Corpus, graph: &HonGraph, config: &ScorerConfig) -> Result<Vec<f64>> {
    let sinks = walker::absorption_table(graph, &config.walk, config.exact)?;
    let lookup = NodeLookup::new(graph);
    corpus
        .trajectories
        .par_iter()
        .map(|t| score_trajectory(t, corpus, &lookup, &sinks, config))
        .collect()
}

/// Area under the precision-recall curve of the graph's scores against the
/// corpus labels.
pub fn evaluate(corpus: &Corpus, graph: &HonGraph, config: &ScorerConfig) -> Result<f64> {
    if corpus.is_empty() {
        return Err(Error::invalid("cannot evaluate an empty corpus"));
    }
    let scores = score_corpus(corpus, graph, config)?;
    let labels: Vec<bool> = corpus.trajectories.iter().map(|t| t.label).collect();
    seqstats::auprc(&scores, &labels)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub ratio: f64,
    pub seed: u64,
    pub auprc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub ratio: f64,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
    pub summary: Vec<SweepSummary>,
}

/// Label-noise robustness sweep. The corpus is relabeled by the pattern,
/// split once into train and held-out parts, and for every (ratio, seed)
/// cell the training labels are noised, the graph rebuilt, and the clean
/// held-out part scored. At ratio 0 all seeds coincide, so its std is 0.
#[allow(clippy::too_many_arguments)]
pub fn noise_sweep(
    corpus: &Corpus,
    pattern: &PatternSpec,
    ratios: &[f64],
    seeds: &[u64],
    split_seed: u64,
    train_frac: f64,
    build: &BuildConfig,
    scorer: &ScorerConfig,
) -> Result<SweepReport> {
    if ratios.is_empty() || seeds.is_empty() {
        return Err(Error::invalid(
            "noise sweep needs at least one ratio and one seed",
        ));
    }
    if ratios.iter().any(|r| !(0.0..=1.0).contains(r)) {
        return Err(Error::invalid("noise ratios must lie in [0, 1]"));
    }
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::invalid(
            "train fraction must lie strictly between 0 and 1",
        ));
    }
    build.validate()?;
    let labeled = corpus::label_by_pattern(corpus, pattern);
    let (train, _, test) = corpus::split(
        &labeled,
        [train_frac, 0.0, 1.0 - train_frac],
        split_seed,
        true,
    )?;
    if test.positives() == 0 {
        return Err(Error::invalid("held-out part has no positive trajectory"));
    }
    let cells: Vec<SweepCell> = ratios
        .iter()
        .flat_map(|&ratio| seeds.iter().map(move |&seed| (ratio, seed)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(ratio, seed)| {
            let noisy = corpus::inject_label_noise(&train, ratio, seed)?;
            let graph = builder::build_suphon(&noisy, build)?;
            let auprc = evaluate(&test, &graph, scorer)?;
            Ok(SweepCell { ratio, seed, auprc })
        })
        .collect::<Result<_>>()?;
    let summary = ratios
        .iter()
        .map(|&ratio| {
            let values: Vec<f64> = cells
                .iter()
                .filter(|c| c.ratio == ratio)
                .map(|c| c.auprc)
                .collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let std = if values.len() < 2 {
                0.0
            } else {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            };
            SweepSummary { ratio, mean, std }
        })
        .collect();
    Ok(SweepReport { cells, summary })
}

fn push_headers(out: &mut String, headers: &[(&str, String)]) {
    for (key, value) in headers {
        out.push_str(&format!("# {key}={value}\n"));
    }
}

/// CSV with one row per sweep cell followed by mean/std rows per ratio.
pub fn render_sweep_csv(report: &SweepReport, headers: &[(&str, String)]) -> String {
    let mut out = String::new();
    push_headers(&mut out, headers);
    out.push_str("row,ratio,seed,auprc\n");
    for cell in &report.cells {
        out.push_str(&format!(
            "run,{},{},{}\n",
            cell.ratio, cell.seed, cell.auprc
        ));
    }
    for s in &report.summary {
        out.push_str(&format!("mean,{},,{}\n", s.ratio, s.mean));
        out.push_str(&format!("std,{},,{}\n", s.ratio, s.std));
    }
    out
}

/// Feature file: one row per node (absorption probabilities, gain, and
/// weighted out-degree) followed by the edge list, as input for external
/// models.
pub fn export_features(
    graph: &HonGraph,
    sinks: &[Option<SinkDistribution>],
    h_y: f64,
    headers: &[(&str, String)],
) -> String {
    let mut out = String::new();
    push_headers(&mut out, headers);
    out.push_str("node,order,p_pos,p_neg,censored,ig,out_weight\n");
    for idx in 0..graph.node_count() {
        let dist = if graph.is_sink(idx) {
            let p = if idx == HonGraph::sink_index(true) {
                1.0
            } else {
                0.0
            };
            Some(SinkDistribution {
                p_pos: p,
                p_neg: 1.0 - p,
                censored: 0.0,
            })
        } else {
            sinks.get(idx).copied().flatten()
        };
        let (p_pos, p_neg, censored, ig) = match dist {
            Some(d) => (
                d.p_pos.to_string(),
                d.p_neg.to_string(),
                d.censored.to_string(),
                walker::ig_from_distribution(&d, h_y).to_string(),
            ),
            None => ("na".into(), "na".into(), "na".into(), "na".into()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            graph.encoding(idx),
            graph.node(idx).order(),
            p_pos,
            p_neg,
            censored,
            ig,
            graph.out_weight(idx)
        ));
    }
    out.push_str("edge,source,target,weight\n");
    for (u, v, w) in graph.edges() {
        out.push_str(&format!(
            "edge,{},{},{}\n",
            graph.encoding(u),
            graph.encoding(v),
            w
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{fig1_toy, Fig1Variant};
    use approx::assert_abs_diff_eq;

    fn parse(text: &str) -> Corpus {
        Corpus::parse_str(text).unwrap()
    }

    fn toy_graph() -> (Corpus, HonGraph) {
        let corpus = fig1_toy(Fig1Variant::Noisy, 100, 5).unwrap();
        let config = BuildConfig {
            k: 2,
            min_support: 10,
            ..Default::default()
        };
        let graph = builder::build_suphon(&corpus, &config).unwrap();
        (corpus, graph)
    }

    fn exact_sinks(graph: &HonGraph) -> Vec<Option<SinkDistribution>> {
        walker::absorption_table(graph, &WalkConfig::default(), true).unwrap()
    }

    #[test]
    fn mapping_prefers_higher_order_then_nearer_conditions() {
        let corpus = parse("t1\t1\te461 e250 e401\n");
        let full = {
            let c = parse("a\t1\te461 e250 e401\nb\t0\te250 e401\nc\t1\te461 e401\nd\t0\te401\n");
            builder::build_suphon(
                &c,
                &BuildConfig {
                    k: 2,
                    min_support: 1,
                    alpha: -1e18,
                    ..Default::default()
                },
            )
            .unwrap()
        };
        assert!(full.node_index("e401|e250").is_some());
        assert!(full.node_index("e401|e461").is_some());
        let lookup = NodeLookup::new(&full);
        let mapping = map_tokens_to_nodes(&corpus.trajectories[0], &corpus, &lookup);
        // Position 2 has both second-order candidates; e250 is closer.
        assert_eq!(mapping[2], full.node_index("e401|e250"));
        assert_eq!(mapping[0], full.node_index("e461"));
    }

    #[test]
    fn mapping_falls_back_without_the_nearest_node() {
        let corpus = parse("t1\t1\te461 e250 e401\n");
        // Graph knows e401|e461 but not e401|e250.
        let graph = {
            let c = parse("a\t1\te461 e401\nb\t0\te250\nc\t1\te401\n");
            builder::build_suphon(
                &c,
                &BuildConfig {
                    k: 2,
                    min_support: 1,
                    alpha: -1e18,
                    ..Default::default()
                },
            )
            .unwrap()
        };
        assert!(graph.node_index("e401|e250").is_none());
        let lookup = NodeLookup::new(&graph);
        let mapping = map_tokens_to_nodes(&corpus.trajectories[0], &corpus, &lookup);
        assert_eq!(mapping[2], graph.node_index("e401|e461"));
        // And with no conditional applicable, the base node.
        let first = parse("t1\t0\te401 e461\n");
        let mapping = map_tokens_to_nodes(&first.trajectories[0], &first, &lookup);
        assert_eq!(mapping[0], graph.node_index("e401"));
    }

    #[test]
    fn mapping_respects_condition_order() {
        // e401|e250|e461 requires e461 before e250 before e401.
        let graph = {
            let c = parse("a\t1\te461 e250 e401\nb\t0\te250 e461 e401\n");
            builder::build_suphon(
                &c,
                &BuildConfig {
                    k: 3,
                    min_support: 1,
                    alpha: -1e18,
                    ..Default::default()
                },
            )
            .unwrap()
        };
        assert!(graph.node_index("e401|e250|e461").is_some());
        let lookup = NodeLookup::new(&graph);
        let ordered = parse("t1\t1\te461 e250 e401\n");
        let mapping = map_tokens_to_nodes(&ordered.trajectories[0], &ordered, &lookup);
        assert_eq!(mapping[2], graph.node_index("e401|e250|e461"));
        let swapped = parse("t1\t1\te250 e461 e401\n");
        let mapping = map_tokens_to_nodes(&swapped.trajectories[0], &swapped, &lookup);
        assert_eq!(mapping[2], graph.node_index("e401|e461|e250"));
    }

    #[test]
    fn mapped_conditions_are_a_prefix_subsequence() {
        let (corpus, graph) = toy_graph();
        let lookup = NodeLookup::new(&graph);
        for t in &corpus.trajectories {
            let tokens: Vec<&str> = t
                .tokens
                .iter()
                .map(|&tok| corpus.vocab.token(tok))
                .collect();
            for (i, mapped) in map_tokens_to_nodes(t, &corpus, &lookup).iter().enumerate() {
                let node = graph.node(mapped.expect("toy tokens all known"));
                assert_eq!(node.base(), Some(tokens[i]));
                let mut bound = i;
                for cond in node.conditions() {
                    let pos = tokens[..bound]
                        .iter()
                        .rposition(|t| *t == cond.as_str())
                        .expect("condition in prefix");
                    bound = pos;
                }
            }
        }
    }

    #[test]
    fn unknown_tokens_are_skipped_and_all_unknown_errors() {
        let graph = {
            let c = parse("a\t1\tA B\nb\t0\tB A\n");
            builder::build_suphon(
                &c,
                &BuildConfig {
                    k: 2,
                    min_support: 1,
                    ..Default::default()
                },
            )
            .unwrap()
        };
        let lookup = NodeLookup::new(&graph);
        let sinks = exact_sinks(&graph);
        let mixed = parse("t1\t1\tQ A\n");
        let score = score_trajectory(
            &mixed.trajectories[0],
            &mixed,
            &lookup,
            &sinks,
            &ScorerConfig::default(),
        )
        .unwrap();
        assert!((0.0..=1.0).contains(&score));
        let unknown = parse("t1\t1\tQ R\n");
        let err = score_trajectory(
            &unknown.trajectories[0],
            &unknown,
            &lookup,
            &sinks,
            &ScorerConfig::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("t1"), "{err}");
    }

    #[test]
    fn scoring_contract_on_truncated_sink_table() {
        let (corpus, graph) = toy_graph();
        let lookup = NodeLookup::new(&graph);
        let mut sinks = exact_sinks(&graph);
        sinks.truncate(3);
        let err = score_trajectory(
            &corpus.trajectories[0],
            &corpus,
            &lookup,
            &sinks,
            &ScorerConfig::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("absorption table"), "{err}");
    }

    #[test]
    fn saturated_and_prior_level_scores() {
        let graph = {
            let c = parse("a\t1\tA B\nb\t1\tA B\n");
            builder::build_suphon(
                &c,
                &BuildConfig {
                    k: 1,
                    min_support: 1,
                    ..Default::default()
                },
            )
            .unwrap()
        };
        let lookup = NodeLookup::new(&graph);
        let sinks = exact_sinks(&graph);
        let t = parse("t\t1\tA B\n");
        let mean = score_trajectory(
            &t.trajectories[0],
            &t,
            &lookup,
            &sinks,
            &ScorerConfig::default(),
        )
        .unwrap();
        assert_eq!(mean, 1.0);
        // Log-odds clamps saturated probabilities just inside (0, 1).
        let config = ScorerConfig {
            aggregator: Aggregator::LogOddsMean,
            ..Default::default()
        };
        let log_odds = score_trajectory(&t.trajectories[0], &t, &lookup, &sinks, &config).unwrap();
        assert_abs_diff_eq!(log_odds, 1.0, epsilon = 2e-6);
        assert!(log_odds < 1.0);
        // Every node sits at the 50% prior: both aggregators return it.
        let (corpus, fon) = {
            let c = fig1_toy(Fig1Variant::Noisy, 50, 1).unwrap();
            let g = builder::build_fon(&c).unwrap();
            (c, g)
        };
        let lookup = NodeLookup::new(&fon);
        let sinks = exact_sinks(&fon);
        for aggregator in [Aggregator::Mean, Aggregator::LogOddsMean] {
            let config = ScorerConfig {
                aggregator,
                ..Default::default()
            };
            let score =
                score_trajectory(&corpus.trajectories[0], &corpus, &lookup, &sinks, &config)
                    .unwrap();
            assert_abs_diff_eq!(score, 0.5, epsilon = 1e-9);
        }
    }

    #[test]
    fn toy_positive_scores_above_negative() {
        let (corpus, graph) = toy_graph();
        let scores = score_corpus(&corpus, &graph, &ScorerConfig::default()).unwrap();
        let pos_min = scores
            .iter()
            .zip(&corpus.trajectories)
            .filter(|(_, t)| t.label)
            .map(|(s, _)| *s)
            .fold(f64::INFINITY, f64::min);
        let neg_max = scores
            .iter()
            .zip(&corpus.trajectories)
            .filter(|(_, t)| !t.label)
            .map(|(s, _)| *s)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(pos_min > neg_max, "pos_min {pos_min} neg_max {neg_max}");
        assert_eq!(
            evaluate(&corpus, &graph, &ScorerConfig::default()).unwrap(),
            1.0
        );
    }

    #[test]
    fn first_order_uniform_sinks_give_constant_scores() {
        let corpus = fig1_toy(Fig1Variant::Noisy, 50, 1).unwrap();
        let fon = builder::build_fon(&corpus).unwrap();
        let scores = score_corpus(&corpus, &fon, &ScorerConfig::default()).unwrap();
        for s in &scores {
            assert_abs_diff_eq!(*s, scores[0], epsilon = 1e-9);
        }
        // Constant scores rank nothing: the area equals prevalence.
        let auprc = evaluate(&corpus, &fon, &ScorerConfig::default()).unwrap();
        assert_abs_diff_eq!(auprc, corpus.prevalence(), epsilon = 1e-9);
    }

    #[test]
    fn evaluation_is_order_invariant() {
        let (corpus, graph) = toy_graph();
        let mut reversed = corpus.clone();
        reversed.trajectories.reverse();
        let config = ScorerConfig::default();
        assert_eq!(
            evaluate(&corpus, &graph, &config).unwrap(),
            evaluate(&reversed, &graph, &config).unwrap()
        );
    }

    fn sweep_corpus() -> (Corpus, PatternSpec) {
        let pattern = PatternSpec::parse("planted", "t1>t2").unwrap();
        let config = corpus::SynthConfig {
            vocab_size: 30,
            n_trajectories: 400,
            len_min: 8,
            len_max: 8,
            patterns: vec![corpus::PlantedPattern {
                pattern: pattern.clone(),
                prob: 0.3,
            }],
            seed: 11,
        };
        (corpus::synth_generate(&config).unwrap(), pattern)
    }

    #[test]
    fn noise_sweep_degrades_with_ratio() {
        let (corpus, pattern) = sweep_corpus();
        let build = BuildConfig {
            k: 2,
            min_support: 5,
            ..Default::default()
        };
        let report = noise_sweep(
            &corpus,
            &pattern,
            &[0.0, 0.8],
            &[1, 2],
            7,
            0.7,
            &build,
            &ScorerConfig::default(),
        )
        .unwrap();
        assert_eq!(report.cells.len(), 4);
        let clean = report.summary.iter().find(|s| s.ratio == 0.0).unwrap();
        let noisy = report.summary.iter().find(|s| s.ratio == 0.8).unwrap();
        // A constant scorer earns the prevalence; demand a clear lift.
        let baseline = corpus::label_by_pattern(&corpus, &pattern).prevalence();
        assert!(
            clean.mean > baseline + 0.25,
            "clean mean {} baseline {baseline}",
            clean.mean
        );
        assert!(
            clean.mean > noisy.mean + 0.05,
            "clean {} noisy {}",
            clean.mean,
            noisy.mean
        );
        assert_eq!(clean.std, 0.0);
        // Cells at ratio 0 coincide across seeds.
        let zero: Vec<f64> = report
            .cells
            .iter()
            .filter(|c| c.ratio == 0.0)
            .map(|c| c.auprc)
            .collect();
        assert_eq!(zero[0], zero[1]);
    }

    #[test]
    fn noise_sweep_contract_violations() {
        let (corpus, pattern) = sweep_corpus();
        let build = BuildConfig {
            k: 2,
            ..Default::default()
        };
        let scorer = ScorerConfig::default();
        assert!(noise_sweep(&corpus, &pattern, &[], &[1], 7, 0.7, &build, &scorer).is_err());
        assert!(noise_sweep(&corpus, &pattern, &[0.5], &[], 7, 0.7, &build, &scorer).is_err());
        assert!(noise_sweep(&corpus, &pattern, &[1.5], &[1], 7, 0.7, &build, &scorer).is_err());
        assert!(noise_sweep(&corpus, &pattern, &[0.5], &[1], 7, 1.0, &build, &scorer).is_err());
    }

    #[test]
    fn sweep_csv_lists_runs_and_summaries() {
        let (corpus, pattern) = sweep_corpus();
        let build = BuildConfig {
            k: 2,
            min_support: 5,
            ..Default::default()
        };
        let report = noise_sweep(
            &corpus,
            &pattern,
            &[0.0],
            &[1, 2],
            7,
            0.7,
            &build,
            &ScorerConfig::default(),
        )
        .unwrap();
        let csv = render_sweep_csv(&report, &[("k", "2".to_owned())]);
        assert!(csv.starts_with("# k=2\nrow,ratio,seed,auprc\n"));
        assert_eq!(csv.matches("\nrun,").count() + 1, 3);
        assert!(csv.contains("\nmean,0,,"));
        assert!(csv.contains("\nstd,0,,0\n"));
    }

    #[test]
    fn feature_export_round_trips_exactly() {
        let (_, graph) = toy_graph();
        let sinks = exact_sinks(&graph);
        let h_y = walker::prior_entropy(&graph).unwrap();
        let text = export_features(&graph, &sinks, h_y, &[]);
        let mut node_rows = 0;
        let mut edge_rows = 0;
        for line in text.lines().skip(1) {
            if let Some(rest) = line.strip_prefix("edge,") {
                if rest == "source,target,weight" {
                    continue;
                }
                let fields: Vec<&str> = rest.split(',').collect();
                let u = graph.node_index(fields[0]).unwrap();
                let v = graph.node_index(fields[1]).unwrap();
                assert_eq!(graph.edge_weight(u, v), Some(fields[2].parse().unwrap()));
                edge_rows += 1;
            } else {
                let fields: Vec<&str> = line.split(',').collect();
                let idx = graph.node_index(fields[0]).unwrap();
                if let Some(d) = sinks[idx] {
                    assert_eq!(fields[2].parse::<f64>().unwrap(), d.p_pos);
                    let ig: f64 = fields[5].parse().unwrap();
                    assert_eq!(ig, walker::ig_from_distribution(&d, h_y));
                }
                assert_eq!(fields[6].parse::<u64>().unwrap(), graph.out_weight(idx));
                node_rows += 1;
            }
        }
        assert_eq!(node_rows, graph.node_count());
        assert_eq!(edge_rows, graph.edge_count());
    }

    #[test]
    fn feature_probabilities_match_walk_report() {
        let (_, graph) = toy_graph();
        let config = WalkConfig {
            walks_per_start: 300,
            ..Default::default()
        };
        let table = walker::sink_distributions(&graph, &config).unwrap();
        let h_y = walker::prior_entropy(&graph).unwrap();
        let features = export_features(&graph, &table, h_y, &[]);
        let walk_csv = walker::render_node_csv(&graph, &table, h_y, &[]);
        for line in walk_csv.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            let expect = format!("{},", fields[1]);
            let row = features
                .lines()
                .find(|l| l.starts_with(&format!("{},", fields[0])))
                .expect("node row");
            assert!(row.contains(&expect), "row {row} expected p_pos {expect}");
        }
    }
}
