//! Candidate mining, permutation-threshold node selection, and the four
//! graph constructions: the supervised skip-step network, its contiguous
//! (no-skip) variant, the first-order network, and the unsupervised
//! divergence-grown network.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::corpus::{Corpus, EntityId};
use crate::error::{Error, Result};
use crate::seqstats::{
    self, contains_subsequence, ig_from_counts, Candidate, IgConvention, IgResult, PermutedLabels,
    SupportCount,
};

pub mod graph;

pub use graph::{
    deserialize_graph, graph_to_string, read_graph, serialize_graph, write_graph, GraphMeta,
    HonGraph, HonNode, Method, NEG_SINK_IDX, POS_SINK_IDX,
};

/// Knobs shared by the supervised constructions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildConfig {
    /// Maximum node order (condition count + 1).
    pub k: usize,
    /// Standard-score threshold a candidate must reach against its
    /// permutation null.
    pub alpha: f64,
    /// Label permutations per candidate.
    pub n_perm: usize,
    /// Minimum matching-trajectory count for a candidate to be tested.
    pub min_support: usize,
    pub seed: u64,
    pub convention: IgConvention,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            k: 4,
            alpha: 1.0,
            n_perm: 100,
            min_support: 10,
            seed: 0,
            convention: IgConvention::TwoBranch,
        }
    }
}

impl BuildConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if !self.alpha.is_finite() {
            return Err(Error::invalid("alpha must be finite"));
        }
        if self.n_perm < 2 {
            return Err(Error::invalid("n_perm must be at least 2"));
        }
        if self.min_support < 1 {
            return Err(Error::invalid("min_support must be at least 1"));
        }
        Ok(())
    }
}

/// Size of the per-trajectory subsequence universe Σ_{j=1..k} C(len, j),
/// before distinctness collapses repeats.
pub fn subsequence_universe_size(len: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for j in 1..=k.min(len) {
        binom = binom * (len - j + 1) as u128 / j as u128;
        total = total.saturating_add(binom);
    }
    total
}

/// Calls `f` once per distinct subsequence of length 1..=k with the
/// positions of its leftmost-greedy occurrence. Distinctness is by token
/// tuple: at each recursion level only the first occurrence of each token
/// value is explored, which also makes the reported positions leftmost.
fn for_each_distinct_subsequence<F: FnMut(&[EntityId], &[usize])>(
    tokens: &[EntityId],
    k: usize,
    f: &mut F,
) {
    fn rec<F: FnMut(&[EntityId], &[usize])>(
        tokens: &[EntityId],
        k: usize,
        from: usize,
        cand: &mut Vec<EntityId>,
        pos: &mut Vec<usize>,
        f: &mut F,
    ) {
        let mut seen: Vec<EntityId> = Vec::new();
        for i in from..tokens.len() {
            let t = tokens[i];
            if seen.contains(&t) {
                continue;
            }
            seen.push(t);
            cand.push(t);
            pos.push(i);
            f(cand, pos);
            if cand.len() < k {
                rec(tokens, k, i + 1, cand, pos, f);
            }
            cand.pop();
            pos.pop();
        }
    }
    rec(
        tokens,
        k,
        0,
        &mut Vec::with_capacity(k),
        &mut Vec::with_capacity(k),
        f,
    );
}

/// Calls `f` once per distinct contiguous run of length 1..=k with its
/// leftmost start position.
fn for_each_distinct_substring<F: FnMut(&[EntityId], usize)>(
    tokens: &[EntityId],
    k: usize,
    f: &mut F,
) {
    let mut seen: std::collections::HashSet<&[EntityId]> = std::collections::HashSet::new();
    for m in 1..=k.min(tokens.len()) {
        for start in 0..=tokens.len() - m {
            let run = &tokens[start..start + m];
            if seen.insert(run) {
                f(run, start);
            }
        }
    }
}

/// How candidates are located within a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MatchMode {
    Subsequence,
    Substring,
}

/// A candidate with its support and the sorted indices of the trajectories
/// containing it.
#[derive(Debug, Clone)]
struct MinedCandidate {
    candidate: Candidate,
    support: SupportCount,
    hits: Vec<u32>,
}

/// One pass over the corpus: every distinct candidate of length 2..=k with
/// per-trajectory hit lists, filtered by `min_support`, sorted by candidate.
fn mine_candidates(
    corpus: &Corpus,
    k: usize,
    min_support: usize,
    mode: MatchMode,
) -> Vec<MinedCandidate> {
    let maps: Vec<HashMap<Candidate, Vec<u32>>> = corpus
        .trajectories
        .par_iter()
        .enumerate()
        .fold(
            HashMap::new,
            |mut acc: HashMap<Candidate, Vec<u32>>, (idx, t)| {
                let mut record = |cand: &[EntityId]| {
                    if cand.len() >= 2 {
                        acc.entry(cand.to_vec()).or_default().push(idx as u32);
                    }
                };
                match mode {
                    MatchMode::Subsequence => {
                        for_each_distinct_subsequence(&t.tokens, k, &mut |cand, _| record(cand))
                    }
                    MatchMode::Substring => {
                        for_each_distinct_substring(&t.tokens, k, &mut |cand, _| record(cand))
                    }
                }
                acc
            },
        )
        .collect();
    let mut merged: HashMap<Candidate, Vec<u32>> = HashMap::new();
    for map in maps {
        for (cand, hits) in map {
            merged.entry(cand).or_default().extend(hits);
        }
    }
    let labels: Vec<bool> = corpus.trajectories.iter().map(|t| t.label).collect();
    let n_pos = labels.iter().filter(|&&y| y).count();
    let mut out: Vec<MinedCandidate> = merged
        .into_iter()
        .filter(|(_, hits)| hits.len() >= min_support)
        .map(|(candidate, mut hits)| {
            hits.sort_unstable();
            let n_match_pos = hits.iter().filter(|&&i| labels[i as usize]).count();
            let support = SupportCount {
                n_match: hits.len(),
                n_match_pos,
                n_total: corpus.len(),
                n_pos,
            };
            MinedCandidate {
                candidate,
                support,
                hits,
            }
        })
        .collect();
    out.sort_unstable_by(|a, b| a.candidate.cmp(&b.candidate));
    out
}

/// Every distinct subsequence of length 2..=k occurring in at least
/// `min_support` trajectories (each trajectory counted once), sorted.
pub fn enumerate_candidates(
    corpus: &Corpus,
    k: usize,
    min_support: usize,
) -> Result<Vec<(Candidate, SupportCount)>> {
    if k < 2 {
        return Err(Error::invalid("candidate enumeration needs k >= 2"));
    }
    if min_support < 1 {
        return Err(Error::invalid("min_support must be at least 1"));
    }
    Ok(
        mine_candidates(corpus, k, min_support, MatchMode::Subsequence)
            .into_iter()
            .map(|m| (m.candidate, m.support))
            .collect(),
    )
}

fn pack_bits(n: usize, set: impl Iterator<Item = usize>) -> Vec<u64> {
    let mut words = vec![0u64; n.div_ceil(64)];
    for i in set {
        words[i / 64] |= 1 << (i % 64);
    }
    words
}

fn and_popcount(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x & y).count_ones() as usize)
        .sum()
}

/// Label permutations packed to bitsets, shared across all candidates of one
/// selection run.
struct NullDeck {
    n_total: usize,
    n_pos: usize,
    label_bits: Vec<u64>,
    perm_bits: Vec<Vec<u64>>,
}

impl NullDeck {
    fn new(labels: &[bool], n_perm: usize, seed: u64) -> Self {
        let n_total = labels.len();
        let truthy = |v: &[bool]| {
            v.iter()
                .enumerate()
                .filter_map(|(i, &y)| y.then_some(i))
                .collect::<Vec<_>>()
        };
        let label_bits = pack_bits(n_total, truthy(labels).into_iter());
        let perm_bits = PermutedLabels::generate(labels, n_perm, seed)
            .perms
            .iter()
            .map(|p| pack_bits(n_total, truthy(p).into_iter()))
            .collect();
        NullDeck {
            n_total,
            n_pos: labels.iter().filter(|&&y| y).count(),
            label_bits,
            perm_bits,
        }
    }

    /// Permutation test of one candidate from its hit list. Counts are exact
    /// integers, so this matches `seqstats::permutation_test` bit for bit.
    fn test(&self, hits: &[u32], convention: IgConvention) -> IgResult {
        let matched = pack_bits(self.n_total, hits.iter().map(|&i| i as usize));
        let count = |labels: &[u64]| SupportCount {
            n_match: hits.len(),
            n_match_pos: and_popcount(&matched, labels),
            n_total: self.n_total,
            n_pos: self.n_pos,
        };
        let support = count(&self.label_bits);
        let ig = ig_from_counts(&support, convention);
        let null: Vec<f64> = self
            .perm_bits
            .iter()
            .map(|p| ig_from_counts(&count(p), convention))
            .collect();
        seqstats::summarize_null(ig, &null, support)
    }
}

fn select_mined(
    mined: &[MinedCandidate],
    deck: &NullDeck,
    config: &BuildConfig,
) -> Vec<(Candidate, IgResult)> {
    mined
        .par_iter()
        .map(|m| (m.candidate.clone(), deck.test(&m.hits, config.convention)))
        .filter(|(_, r)| r.t_stat >= config.alpha)
        .collect()
}

/// Tests each candidate against the shared permutation null and keeps those
/// with `t_stat >= alpha`. The returned set together with the first-order
/// entities forms the supervised node set.
pub fn select_nodes(
    corpus: &Corpus,
    candidates: &[(Candidate, SupportCount)],
    config: &BuildConfig,
) -> Result<Vec<(Candidate, IgResult)>> {
    config.validate()?;
    let labels: Vec<bool> = corpus.trajectories.iter().map(|t| t.label).collect();
    let deck = NullDeck::new(&labels, config.n_perm, config.seed);
    let mined: Vec<MinedCandidate> = candidates
        .par_iter()
        .map(|(cand, _)| {
            let hits: Vec<u32> = corpus
                .trajectories
                .iter()
                .enumerate()
                .filter(|(_, t)| contains_subsequence(&t.tokens, cand).is_some())
                .map(|(i, _)| i as u32)
                .collect();
            let support = SupportCount {
                n_match: hits.len(),
                n_match_pos: hits.iter().filter(|&&i| labels[i as usize]).count(),
                n_total: corpus.len(),
                n_pos: deck.n_pos,
            };
            MinedCandidate {
                candidate: cand.clone(),
                support,
                hits,
            }
        })
        .collect();
    Ok(select_mined(&mined, &deck, config))
}

const LOCAL_NEG: u32 = u32::MAX - 1;
const LOCAL_POS: u32 = u32::MAX;

/// Leftmost spans of every node in one trajectory, as (node, start, end).
fn matched_spans(
    tokens: &[EntityId],
    nodes: &[Candidate],
    node_map: &HashMap<&[EntityId], u32>,
    k: usize,
) -> Vec<(u32, u32, u32)> {
    let mut spans = Vec::new();
    let enum_cost = subsequence_universe_size(tokens.len(), k);
    let scan_cost = (nodes.len() * tokens.len().max(1)) as u128;
    if enum_cost <= scan_cost {
        for_each_distinct_subsequence(tokens, k, &mut |cand, pos| {
            if let Some(&n) = node_map.get(cand) {
                spans.push((n, pos[0] as u32, pos[pos.len() - 1] as u32));
            }
        });
        spans.sort_unstable();
    } else {
        for (idx, cand) in nodes.iter().enumerate() {
            if let Some(pos) = contains_subsequence(tokens, cand) {
                spans.push((idx as u32, pos[0] as u32, pos[pos.len() - 1] as u32));
            }
        }
    }
    spans
}

/// Shared edge assembly for the two supervised builders. With `skip`, every
/// matched node links to every node whose leftmost match starts strictly
/// after its own match ends, and every matched node reaches the trajectory's
/// sink; without it, links require exact span adjacency and only matches
/// ending on the final token reach the sink.
fn assemble_supervised(
    corpus: &Corpus,
    nodes: &[Candidate],
    k: usize,
    skip: bool,
) -> HashMap<(u32, u32), u64> {
    let node_map: HashMap<&[EntityId], u32> = nodes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i as u32))
        .collect();
    corpus
        .trajectories
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<(u32, u32), u64>, t| {
            let spans = matched_spans(&t.tokens, nodes, &node_map, k);
            let sink = if t.label { LOCAL_POS } else { LOCAL_NEG };
            let last = (t.tokens.len() - 1) as u32;
            for &(u, _, u_end) in &spans {
                if skip || u_end == last {
                    *acc.entry((u, sink)).or_insert(0) += 1;
                }
                for &(v, v_start, _) in &spans {
                    let linked = if skip {
                        v_start > u_end
                    } else {
                        v_start == u_end + 1
                    };
                    if linked {
                        *acc.entry((u, v)).or_insert(0) += 1;
                    }
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (key, w) in b {
                *a.entry(key).or_insert(0) += w;
            }
            a
        })
}

/// Distinct entities in trajectory order of first appearance, sorted by id.
fn observed_entities(corpus: &Corpus) -> Vec<EntityId> {
    let mut seen = vec![false; corpus.vocab.len()];
    for t in &corpus.trajectories {
        for &tok in &t.tokens {
            seen[tok.index()] = true;
        }
    }
    (0..corpus.vocab.len() as u32)
        .map(EntityId)
        .filter(|e| seen[e.index()])
        .collect()
}

/// A candidate tuple is earliest-first; the node it becomes is its last
/// entity conditioned on the earlier ones, most recent first.
fn candidate_node(corpus: &Corpus, cand: &[EntityId]) -> HonNode {
    let base = corpus.vocab.token(cand[cand.len() - 1]).to_owned();
    let conditions = cand[..cand.len() - 1]
        .iter()
        .rev()
        .map(|&e| corpus.vocab.token(e).to_owned())
        .collect();
    HonNode::Entity { base, conditions }
}

fn to_graph(
    corpus: &Corpus,
    meta: GraphMeta,
    nodes: Vec<Candidate>,
    edges: HashMap<(u32, u32), u64>,
) -> Result<HonGraph> {
    let hon_nodes: Vec<HonNode> = nodes.iter().map(|c| candidate_node(corpus, c)).collect();
    let encodings: Vec<String> = hon_nodes.iter().map(HonNode::encoding).collect();
    let encode = |id: u32| match id {
        LOCAL_NEG => crate::corpus::NEG_SINK.to_owned(),
        LOCAL_POS => crate::corpus::POS_SINK.to_owned(),
        idx => encodings[idx as usize].clone(),
    };
    let edge_list: Vec<(String, String, u64)> = edges
        .into_iter()
        .map(|((u, v), w)| (encode(u), encode(v), w))
        .collect();
    HonGraph::from_parts(meta, hon_nodes, edge_list)
}

fn corpus_meta(
    corpus: &Corpus,
    method: Method,
    k: usize,
    alpha: f64,
    n_perm: usize,
    seed: u64,
) -> GraphMeta {
    GraphMeta {
        method,
        k,
        alpha,
        n_perm,
        seed,
        n_pos: corpus.positives(),
        n_total: corpus.len(),
    }
}

fn build_supervised(corpus: &Corpus, config: &BuildConfig, skip: bool) -> Result<HonGraph> {
    config.validate()?;
    let mut nodes: Vec<Candidate> = observed_entities(corpus)
        .into_iter()
        .map(|e| vec![e])
        .collect();
    if config.k >= 2 && !corpus.is_empty() {
        let mode = if skip {
            MatchMode::Subsequence
        } else {
            MatchMode::Substring
        };
        let mined = mine_candidates(corpus, config.k, config.min_support, mode);
        let labels: Vec<bool> = corpus.trajectories.iter().map(|t| t.label).collect();
        let deck = NullDeck::new(&labels, config.n_perm, config.seed);
        let mut selected = select_mined(&mined, &deck, config);
        selected.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        nodes.extend(selected.into_iter().map(|(c, _)| c));
    }
    let edges = assemble_supervised(corpus, &nodes, config.k, skip);
    let method = if skip {
        Method::Suphon
    } else {
        Method::SuphonNoskip
    };
    let meta = corpus_meta(
        corpus,
        method,
        config.k,
        config.alpha,
        config.n_perm,
        config.seed,
    );
    to_graph(corpus, meta, nodes, edges)
}

/// Supervised skip-step network: conditional nodes are outcome-significant
/// subsequences, and succession skips over intermediate tokens.
pub fn build_suphon(corpus: &Corpus, config: &BuildConfig) -> Result<HonGraph> {
    build_supervised(corpus, config, true)
}

/// Supervised contiguous variant: candidates are counted as contiguous runs
/// and edges require exact span adjacency.
pub fn build_suphon_noskip(corpus: &Corpus, config: &BuildConfig) -> Result<HonGraph> {
    build_supervised(corpus, config, false)
}

/// First-order network: one node per observed entity, edge weights count
/// adjacent occurrences, and each trajectory's final token feeds its sink.
pub fn build_fon(corpus: &Corpus) -> Result<HonGraph> {
    let mut edges: HashMap<(u32, u32), u64> = HashMap::new();
    for t in &corpus.trajectories {
        for pair in t.tokens.windows(2) {
            *edges.entry((pair[0].0, pair[1].0)).or_insert(0) += 1;
        }
        let last = t.tokens[t.tokens.len() - 1].0;
        let sink = if t.label { LOCAL_POS } else { LOCAL_NEG };
        *edges.entry((last, sink)).or_insert(0) += 1;
    }
    // Entity ids double as local node ids here, so pad the node list to
    // vocab size and let unobserved ids drop out in edge conversion.
    let nodes: Vec<Candidate> = (0..corpus.vocab.len() as u32)
        .map(|i| vec![EntityId(i)])
        .collect();
    let observed: Vec<Candidate> = observed_entities(corpus)
        .into_iter()
        .map(|e| vec![e])
        .collect();
    let meta = corpus_meta(corpus, Method::Fon, 1, 0.0, 0, 0);
    let hon_nodes: Vec<HonNode> = observed.iter().map(|c| candidate_node(corpus, c)).collect();
    let encode = |id: u32| match id {
        LOCAL_NEG => crate::corpus::NEG_SINK.to_owned(),
        LOCAL_POS => crate::corpus::POS_SINK.to_owned(),
        idx => nodes[idx as usize]
            .first()
            .map(|&e| corpus.vocab.token(e).to_owned())
            .expect("entity node"),
    };
    let edge_list: Vec<(String, String, u64)> = edges
        .into_iter()
        .map(|((u, v), w)| (encode(u), encode(v), w))
        .collect();
    HonGraph::from_parts(meta, hon_nodes, edge_list)
}

const END_TOKEN: u32 = u32::MAX;

/// Unsupervised divergence test: a contiguous context is kept when its
/// next-token distribution diverges from its parent's (the context without
/// its oldest entity) by more than `tau * order / log2(1 + support)`. Labels
/// are never consulted for growth; they only route the final sink edges.
pub fn build_hon_unsupervised(corpus: &Corpus, k: usize, tau: f64) -> Result<HonGraph> {
    if k < 2 {
        return Err(Error::invalid("unsupervised growth needs k >= 2"));
    }
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::invalid("tau must be positive"));
    }
    // Next-token counts (END_TOKEN marks trajectory end) per context.
    let mut ctx: HashMap<Vec<EntityId>, BTreeMap<u32, u32>> = HashMap::new();
    for t in &corpus.trajectories {
        let len = t.tokens.len();
        for m in 1..=k.min(len) {
            for end in m - 1..len {
                let context = &t.tokens[end + 1 - m..=end];
                let next = if end + 1 < len {
                    t.tokens[end + 1].0
                } else {
                    END_TOKEN
                };
                *ctx.entry(context.to_vec())
                    .or_default()
                    .entry(next)
                    .or_insert(0) += 1;
            }
        }
    }
    let dist = |counts: &BTreeMap<u32, u32>| -> (f64, BTreeMap<u32, f64>) {
        let total: u32 = counts.values().sum();
        let probs = counts
            .iter()
            .map(|(&tok, &c)| (tok, c as f64 / total as f64))
            .collect();
        (total as f64, probs)
    };
    let mut contexts: Vec<&Vec<EntityId>> = ctx.keys().filter(|c| c.len() >= 2).collect();
    contexts.sort_unstable();
    let mut kept: Vec<Candidate> = Vec::new();
    for context in contexts {
        let (support, ext) = dist(&ctx[context]);
        let parent = &ctx[&context[1..]];
        let (_, par) = dist(parent);
        let kl: f64 = ext.iter().map(|(tok, &p)| p * (p / par[tok]).log2()).sum();
        let threshold = tau * context.len() as f64 / (1.0 + support).log2();
        if kl > threshold {
            kept.push(context.clone());
        }
    }
    let mut nodes: Vec<Candidate> = observed_entities(corpus)
        .into_iter()
        .map(|e| vec![e])
        .collect();
    nodes.extend(kept);
    let node_map: HashMap<&[EntityId], u32> = nodes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i as u32))
        .collect();
    // Rewrite each position to its longest kept context, then link
    // consecutive positions and attach the final node to the label's sink.
    let mut edges: HashMap<(u32, u32), u64> = HashMap::new();
    for t in &corpus.trajectories {
        let len = t.tokens.len();
        let assign = |i: usize| -> u32 {
            for m in (2..=k.min(i + 1)).rev() {
                if let Some(&n) = node_map.get(&t.tokens[i + 1 - m..=i]) {
                    return n;
                }
            }
            node_map[&t.tokens[i..=i]]
        };
        let mut prev = assign(0);
        for i in 1..len {
            let cur = assign(i);
            *edges.entry((prev, cur)).or_insert(0) += 1;
            prev = cur;
        }
        let sink = if t.label { LOCAL_POS } else { LOCAL_NEG };
        *edges.entry((prev, sink)).or_insert(0) += 1;
    }
    let meta = corpus_meta(corpus, Method::Hon, k, tau, 0, 0);
    to_graph(corpus, meta, nodes, edges)
}
