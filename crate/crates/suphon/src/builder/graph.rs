//! Conditional-node graph representation and its edge-list text format.
//!
//! Nodes are either entities (`base|cond1|cond2`, conditions most recent
//! first: `425|511|427` is 425 conditioned on 511, which was itself preceded
//! by 427) or one of the two absorbing outcome sinks. Node order is
//! canonical: the negative sink at index 0, the positive sink at index 1,
//! then entity nodes sorted by encoding, which makes every serialization
//! byte-reproducible.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use crate::corpus::{validate_token, NEG_SINK, POS_SINK};
use crate::error::{Error, Result};

/// Index of the negative-outcome sink in every graph.
pub const NEG_SINK_IDX: usize = 0;
/// Index of the positive-outcome sink in every graph.
pub const POS_SINK_IDX: usize = 1;

/// A graph node: an entity with zero or more conditions, or an outcome sink.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HonNode {
    Sink {
        label: bool,
    },
    Entity {
        base: String,
        /// Most recent condition first.
        conditions: Vec<String>,
    },
}

impl HonNode {
    pub fn entity(base: impl Into<String>, conditions: Vec<String>) -> Self {
        HonNode::Entity {
            base: base.into(),
            conditions,
        }
    }

    pub fn first_order(base: impl Into<String>) -> Self {
        Self::entity(base, Vec::new())
    }

    /// 1 for an unconditional entity, 1 + condition count otherwise; sinks
    /// have order 0.
    pub fn order(&self) -> usize {
        match self {
            HonNode::Sink { .. } => 0,
            HonNode::Entity { conditions, .. } => 1 + conditions.len(),
        }
    }

    pub fn is_sink(&self) -> bool {
        matches!(self, HonNode::Sink { .. })
    }

    pub fn base(&self) -> Option<&str> {
        match self {
            HonNode::Sink { .. } => None,
            HonNode::Entity { base, .. } => Some(base),
        }
    }

    pub fn conditions(&self) -> &[String] {
        match self {
            HonNode::Sink { .. } => &[],
            HonNode::Entity { conditions, .. } => conditions,
        }
    }

    pub fn encoding(&self) -> String {
        match self {
            HonNode::Sink { label: true } => POS_SINK.to_owned(),
            HonNode::Sink { label: false } => NEG_SINK.to_owned(),
            HonNode::Entity { base, conditions } => {
                let mut s = base.clone();
                for c in conditions {
                    s.push('|');
                    s.push_str(c);
                }
                s
            }
        }
    }

    pub fn parse(enc: &str) -> Result<HonNode> {
        match enc {
            s if s == POS_SINK => return Ok(HonNode::Sink { label: true }),
            s if s == NEG_SINK => return Ok(HonNode::Sink { label: false }),
            _ => {}
        }
        let mut parts = enc.split('|');
        let base = parts.next().unwrap_or_default();
        validate_token(base)?;
        let conditions = parts
            .map(|c| validate_token(c).map(|()| c.to_owned()))
            .collect::<Result<Vec<_>>>()?;
        Ok(HonNode::Entity {
            base: base.to_owned(),
            conditions,
        })
    }
}

impl fmt::Display for HonNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

/// Which construction produced a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// First-order network: adjacent-occurrence edges only.
    Fon,
    /// Unsupervised higher-order network grown by divergence testing.
    Hon,
    /// Outcome-supervised skip-step network.
    Suphon,
    /// Outcome-supervised network with contiguous matching only.
    SuphonNoskip,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fon" => Ok(Method::Fon),
            "hon" => Ok(Method::Hon),
            "suphon" => Ok(Method::Suphon),
            "suphon-noskip" => Ok(Method::SuphonNoskip),
            other => Err(Error::invalid(format!(
                "unknown method {other:?} (expected fon|hon|suphon|suphon-noskip)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fon => "fon",
            Method::Hon => "hon",
            Method::Suphon => "suphon",
            Method::SuphonNoskip => "suphon-noskip",
        })
    }
}

/// Construction metadata carried in the graph header. For the unsupervised
/// method `alpha` stores the divergence threshold instead of the standard
/// score threshold; `n_pos`/`n_total` record the corpus label counts the
/// class entropy is computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphMeta {
    pub method: Method,
    pub k: usize,
    pub alpha: f64,
    pub n_perm: usize,
    pub seed: u64,
    pub n_pos: usize,
    pub n_total: usize,
}

/// Directed weighted graph over conditional nodes plus the two sinks.
#[derive(Debug, Clone, PartialEq)]
pub struct HonGraph {
    pub meta: GraphMeta,
    nodes: Vec<HonNode>,
    encodings: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<(usize, u64)>>,
    out_weight: Vec<u64>,
}

impl HonGraph {
    /// Assembles a graph in canonical node order. Duplicate edges are
    /// summed; edge endpoints must be sinks or members of `entities`.
    pub fn from_parts(
        meta: GraphMeta,
        entities: Vec<HonNode>,
        edges: Vec<(String, String, u64)>,
    ) -> Result<HonGraph> {
        let mut nodes = vec![
            HonNode::Sink { label: false },
            HonNode::Sink { label: true },
        ];
        let mut seen: BTreeMap<String, HonNode> = BTreeMap::new();
        for node in entities {
            if node.is_sink() {
                return Err(Error::invalid("sinks are implicit, pass entity nodes only"));
            }
            if node.order() > meta.k {
                return Err(Error::invalid(format!(
                    "node {} has order {} but k = {}",
                    node.encoding(),
                    node.order(),
                    meta.k
                )));
            }
            seen.insert(node.encoding(), node);
        }
        nodes.extend(seen.into_values());
        let encodings: Vec<String> = nodes.iter().map(HonNode::encoding).collect();
        let index: HashMap<String, usize> = encodings
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let mut weights: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (u, v, w) in edges {
            let lookup = |enc: &String| {
                index
                    .get(enc)
                    .copied()
                    .ok_or_else(|| Error::invalid(format!("edge endpoint {enc} is not a node")))
            };
            let (ui, vi) = (lookup(&u)?, lookup(&v)?);
            if w == 0 {
                return Err(Error::invalid(format!("edge {u} -> {v} has zero weight")));
            }
            if nodes[ui].is_sink() {
                return Err(Error::invalid(format!("sink {u} cannot have out-edges")));
            }
            *weights.entry((ui, vi)).or_insert(0) += w;
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        let mut out_weight = vec![0u64; nodes.len()];
        for ((u, v), w) in weights {
            adj[u].push((v, w));
            out_weight[u] += w;
        }
        Ok(HonGraph {
            meta,
            nodes,
            encodings,
            index,
            adj,
            out_weight,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, idx: usize) -> &HonNode {
        &self.nodes[idx]
    }

    pub fn nodes(&self) -> &[HonNode] {
        &self.nodes
    }

    pub fn encoding(&self, idx: usize) -> &str {
        &self.encodings[idx]
    }

    pub fn node_index(&self, encoding: &str) -> Option<usize> {
        self.index.get(encoding).copied()
    }

    /// Out-edges of `idx`, sorted by target index.
    pub fn adj(&self, idx: usize) -> &[(usize, u64)] {
        &self.adj[idx]
    }

    pub fn out_weight(&self, idx: usize) -> u64 {
        self.out_weight[idx]
    }

    pub fn is_sink(&self, idx: usize) -> bool {
        idx < 2
    }

    pub fn sink_index(label: bool) -> usize {
        if label {
            POS_SINK_IDX
        } else {
            NEG_SINK_IDX
        }
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<u64> {
        let row = &self.adj[u];
        row.binary_search_by_key(&v, |&(t, _)| t)
            .ok()
            .map(|i| row[i].1)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&(v, w)| (u, v, w)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// Indices of unconditional entity nodes.
    pub fn first_order(&self) -> Vec<usize> {
        (2..self.nodes.len())
            .filter(|&i| self.nodes[i].order() == 1)
            .collect()
    }

    /// Label prevalence recorded at build time.
    pub fn prevalence(&self) -> f64 {
        if self.meta.n_total == 0 {
            0.0
        } else {
            self.meta.n_pos as f64 / self.meta.n_total as f64
        }
    }
}

/// Writes the header lines, isolated-node declarations, and edge list.
pub fn serialize_graph<W: Write>(graph: &HonGraph, mut w: W) -> Result<()> {
    let m = &graph.meta;
    write!(
        w,
        "# method={}\n# k={}\n# alpha={}\n# n_perm={}\n# seed={}\n# n_pos={}\n# n_total={}\n",
        m.method, m.k, m.alpha, m.n_perm, m.seed, m.n_pos, m.n_total
    )?;
    let mut incident = vec![false; graph.node_count()];
    for (u, v, _) in graph.edges() {
        incident[u] = true;
        incident[v] = true;
    }
    for (idx, seen) in incident.iter().enumerate().skip(2) {
        if !seen {
            writeln!(w, "# node={}", graph.encoding(idx))?;
        }
    }
    for (u, v, weight) in graph.edges() {
        writeln!(
            w,
            "{}\t{}\t{}",
            graph.encoding(u),
            graph.encoding(v),
            weight
        )?;
    }
    Ok(())
}

pub fn graph_to_string(graph: &HonGraph) -> String {
    let mut out = Vec::new();
    serialize_graph(graph, &mut out).expect("in-memory write");
    String::from_utf8(out).expect("graph text is utf-8")
}

/// Parses the graph format. `# method=` is required; `k` defaults to the
/// largest node order, `alpha` to 1, `seed` to 0, and the label counts to
/// the sink in-weights. `#` lines without `=` are comments.
pub fn deserialize_graph<R: BufRead>(reader: R) -> Result<HonGraph> {
    let mut method: Option<Method> = None;
    let mut k: Option<usize> = None;
    let mut alpha: Option<f64> = None;
    let mut n_perm: Option<usize> = None;
    let mut seed: Option<u64> = None;
    let mut n_pos: Option<usize> = None;
    let mut n_total: Option<usize> = None;
    let mut entities: Vec<HonNode> = Vec::new();
    let mut edges: Vec<(String, String, u64)> = Vec::new();
    let mut sink_in = [0u64; 2];
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let fail = |msg: String| Error::parse(lineno, msg);
        if let Some(rest) = line.strip_prefix('#') {
            let Some((key, value)) = rest.split_once('=') else {
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::parse(lineno, format!("bad {what}: {value:?}"));
            match key {
                "method" => method = Some(value.parse().map_err(|_| bad("method"))?),
                "k" => k = Some(value.parse().map_err(|_| bad("k"))?),
                "alpha" => alpha = Some(value.parse().map_err(|_| bad("alpha"))?),
                "n_perm" => n_perm = Some(value.parse().map_err(|_| bad("n_perm"))?),
                "seed" => seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "n_pos" => n_pos = Some(value.parse().map_err(|_| bad("n_pos"))?),
                "n_total" => n_total = Some(value.parse().map_err(|_| bad("n_total"))?),
                "node" => {
                    let node = HonNode::parse(value).map_err(|e| fail(e.to_string()))?;
                    if !node.is_sink() {
                        entities.push(node);
                    }
                }
                other => return Err(fail(format!("unknown header key {other:?}"))),
            }
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(u), Some(v), Some(w), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(fail("expected u<TAB>v<TAB>weight".into()));
        };
        let weight: u64 = w
            .parse()
            .ok()
            .filter(|&w| w > 0)
            .ok_or_else(|| fail(format!("bad weight {w:?}")))?;
        for enc in [u, v] {
            let node = HonNode::parse(enc).map_err(|e| fail(e.to_string()))?;
            if !node.is_sink() {
                entities.push(node);
            }
        }
        if v == POS_SINK {
            sink_in[1] += weight;
        } else if v == NEG_SINK {
            sink_in[0] += weight;
        }
        edges.push((u.to_owned(), v.to_owned(), weight));
    }
    let method = method.ok_or_else(|| Error::invalid("graph file missing `# method=` header"))?;
    let k = k.unwrap_or_else(|| entities.iter().map(HonNode::order).max().unwrap_or(1));
    let n_total = n_total.unwrap_or((sink_in[0] + sink_in[1]) as usize);
    let n_pos = n_pos.unwrap_or(sink_in[1] as usize);
    let meta = GraphMeta {
        method,
        k,
        alpha: alpha.unwrap_or(1.0),
        n_perm: n_perm.unwrap_or(0),
        seed: seed.unwrap_or(0),
        n_pos,
        n_total,
    };
    HonGraph::from_parts(meta, entities, edges)
}

pub fn read_graph(path: &Path) -> Result<HonGraph> {
    let file = std::fs::File::open(path).map_err(|e| crate::error::io_at(path, e))?;
    deserialize_graph(std::io::BufReader::new(file))
}

pub fn write_graph(graph: &HonGraph, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| crate::error::io_at(path, e))?;
    let mut file = std::io::BufWriter::new(file);
    serialize_graph(graph, &mut file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(method: Method, k: usize) -> GraphMeta {
        GraphMeta {
            method,
            k,
            alpha: 1.0,
            n_perm: 0,
            seed: 0,
            n_pos: 1,
            n_total: 2,
        }
    }

    #[test]
    fn node_encoding_round_trip() {
        let n = HonNode::entity("425", vec!["511".into(), "427".into()]);
        assert_eq!(n.encoding(), "425|511|427");
        assert_eq!(HonNode::parse("425|511|427").unwrap(), n);
        assert_eq!(n.order(), 3);
        assert_eq!(
            HonNode::parse(POS_SINK).unwrap(),
            HonNode::Sink { label: true }
        );
        assert_eq!(
            HonNode::parse(NEG_SINK).unwrap(),
            HonNode::Sink { label: false }
        );
        assert_eq!(HonNode::Sink { label: true }.encoding(), POS_SINK);
    }

    #[test]
    fn node_parse_rejects_malformed_encodings() {
        assert!(HonNode::parse("a||b").is_err());
        assert!(HonNode::parse("").is_err());
        assert!(HonNode::parse("a b").is_err());
        assert!(HonNode::parse("__Y=1__|a").is_err());
    }

    fn small_graph() -> HonGraph {
        HonGraph::from_parts(
            meta(Method::Suphon, 2),
            vec![
                HonNode::first_order("A"),
                HonNode::first_order("C"),
                HonNode::entity("C", vec!["A".into()]),
            ],
            vec![
                ("A".into(), "C|A".into(), 3),
                ("C|A".into(), POS_SINK.into(), 3),
                ("C".into(), NEG_SINK.into(), 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn canonical_order_and_lookup() {
        let g = small_graph();
        assert_eq!(g.encoding(NEG_SINK_IDX), NEG_SINK);
        assert_eq!(g.encoding(POS_SINK_IDX), POS_SINK);
        let encs: Vec<&str> = (2..g.node_count()).map(|i| g.encoding(i)).collect();
        assert_eq!(encs, ["A", "C", "C|A"]);
        assert_eq!(
            g.first_order(),
            vec![g.node_index("A").unwrap(), g.node_index("C").unwrap()]
        );
        assert_eq!(
            g.edge_weight(g.node_index("A").unwrap(), g.node_index("C|A").unwrap()),
            Some(3)
        );
        assert_eq!(g.out_weight(g.node_index("C|A").unwrap()), 3);
    }

    #[test]
    fn from_parts_contract_violations() {
        let m = meta(Method::Fon, 1);
        let a = HonNode::first_order("A");
        assert!(
            HonGraph::from_parts(m, vec![a.clone()], vec![("A".into(), "B".into(), 1)]).is_err()
        );
        assert!(
            HonGraph::from_parts(m, vec![a.clone()], vec![("A".into(), POS_SINK.into(), 0)])
                .is_err()
        );
        assert!(
            HonGraph::from_parts(m, vec![a.clone()], vec![(POS_SINK.into(), "A".into(), 1)])
                .is_err()
        );
        // Order above k.
        assert!(
            HonGraph::from_parts(m, vec![HonNode::entity("A", vec!["B".into()])], vec![]).is_err()
        );
    }

    #[test]
    fn duplicate_edges_are_summed() {
        let g = HonGraph::from_parts(
            meta(Method::Fon, 1),
            vec![HonNode::first_order("A")],
            vec![
                ("A".into(), POS_SINK.into(), 2),
                ("A".into(), POS_SINK.into(), 5),
            ],
        )
        .unwrap();
        assert_eq!(
            g.edge_weight(g.node_index("A").unwrap(), POS_SINK_IDX),
            Some(7)
        );
    }

    #[test]
    fn serialize_round_trip_is_byte_identical() {
        let g = small_graph();
        let text = graph_to_string(&g);
        let back = deserialize_graph(text.as_bytes()).unwrap();
        assert_eq!(back, g);
        assert_eq!(graph_to_string(&back), text);
    }

    #[test]
    fn sinks_only_graph_serializes_with_zero_edges() {
        let g = HonGraph::from_parts(meta(Method::Fon, 1), vec![], vec![]).unwrap();
        let text = graph_to_string(&g);
        assert!(!text.contains('\t'));
        let back = deserialize_graph(text.as_bytes()).unwrap();
        assert_eq!(back.node_count(), 2);
        assert_eq!(back.edge_count(), 0);
    }

    #[test]
    fn isolated_nodes_survive_round_trip() {
        let g = HonGraph::from_parts(
            meta(Method::Fon, 1),
            vec![HonNode::first_order("A"), HonNode::first_order("B")],
            vec![("A".into(), POS_SINK.into(), 1)],
        )
        .unwrap();
        let text = graph_to_string(&g);
        assert!(text.contains("# node=B"));
        assert_eq!(deserialize_graph(text.as_bytes()).unwrap(), g);
    }

    #[test]
    fn hand_written_file_parses() {
        let text = "# method=suphon\n# a free comment\nA\tC|A\t2\nC|A\t__Y=1__\t2\nC\t__Y=0__\t1\n";
        let g = deserialize_graph(text.as_bytes()).unwrap();
        assert_eq!(g.meta.method, Method::Suphon);
        assert_eq!(g.meta.k, 2, "defaults to max node order");
        assert_eq!(g.meta.n_total, 3, "falls back to sink in-weight");
        assert_eq!(g.meta.n_pos, 2);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn deserialize_errors_name_lines() {
        let missing = deserialize_graph("A\t__Y=1__\t1\n".as_bytes()).unwrap_err();
        assert!(missing.to_string().contains("method"));
        let bad_weight =
            deserialize_graph("# method=fon\nA\t__Y=1__\tzero\n".as_bytes()).unwrap_err();
        assert!(
            matches!(bad_weight, Error::Parse { line: 2, .. }),
            "{bad_weight}"
        );
        let bad_header = deserialize_graph("# method=fon\n# bogus=1\n".as_bytes()).unwrap_err();
        assert!(
            matches!(bad_header, Error::Parse { line: 2, .. }),
            "{bad_header}"
        );
        let bad_fields = deserialize_graph("# method=fon\nA\t__Y=1__\n".as_bytes()).unwrap_err();
        assert!(
            matches!(bad_fields, Error::Parse { line: 2, .. }),
            "{bad_fields}"
        );
    }
}
