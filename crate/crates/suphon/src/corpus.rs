//! Labeled trajectory corpora: parsing, outcome preprocessing, splitting,
//! pattern labeling, label-noise injection, and synthetic generation.
//!
//! A corpus is an ordered list of trajectories, each an ordered sequence of
//! interned entity tokens with a binary outcome label. The file format is one
//! trajectory per line: `id<TAB>label<TAB>token token ...`, with `#` comment
//! lines. All randomized operations are pure functions of their seed.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Reserved name of the positive-outcome absorbing sink.
pub const POS_SINK: &str = "__Y=1__";
/// Reserved name of the negative-outcome absorbing sink.
pub const NEG_SINK: &str = "__Y=0__";

/// Dense id interned from an entity token string, unique within one corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId(pub u32);

impl EntityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Bijective token <-> id table.
#[derive(Debug, Clone, Default)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, EntityId>,
}

/// Rejects token strings that would collide with the graph and report
/// formats: whitespace, the `|` condition separator, the `>` pattern
/// separator, the `,` CSV separator, and the reserved sink names.
pub fn validate_token(tok: &str) -> Result<()> {
    if tok.is_empty() {
        return Err(Error::invalid("empty entity token"));
    }
    if tok == POS_SINK || tok == NEG_SINK {
        return Err(Error::invalid(format!(
            "token {tok:?} is a reserved sink name"
        )));
    }
    if let Some(c) = tok
        .chars()
        .find(|c| c.is_whitespace() || matches!(c, '|' | '>' | ','))
    {
        return Err(Error::invalid(format!(
            "token {tok:?} contains forbidden character {c:?}"
        )));
    }
    Ok(())
}

fn validate_id(id: &str) -> Result<()> {
    if id.is_empty() {
        return Err(Error::invalid("empty trajectory id"));
    }
    if id.contains(['\t', '\n', ',']) {
        return Err(Error::invalid(format!(
            "trajectory id {id:?} contains tab, newline, or comma"
        )));
    }
    Ok(())
}

impl Vocab {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns `tok`, returning the existing id if already present.
    pub fn intern(&mut self, tok: &str) -> Result<EntityId> {
        if let Some(&id) = self.index.get(tok) {
            return Ok(id);
        }
        validate_token(tok)?;
        let id = EntityId(
            u32::try_from(self.tokens.len()).map_err(|_| Error::invalid("vocabulary overflow"))?,
        );
        self.tokens.push(tok.to_owned());
        self.index.insert(tok.to_owned(), id);
        Ok(id)
    }

    pub fn id(&self, tok: &str) -> Option<EntityId> {
        self.index.get(tok).copied()
    }

    pub fn token(&self, id: EntityId) -> &str {
        &self.tokens[id.index()]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

/// One subject's ordered event sequence with its binary outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub id: String,
    pub label: bool,
    pub tokens: Vec<EntityId>,
}

/// Immutable labeled corpus; all operations return new corpora.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub vocab: Vocab,
    pub trajectories: Vec<Trajectory>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.trajectories.iter().filter(|t| t.label).count()
    }

    /// Fraction of label-1 trajectories; 0 for an empty corpus.
    pub fn prevalence(&self) -> f64 {
        if self.trajectories.is_empty() {
            0.0
        } else {
            self.positives() as f64 / self.trajectories.len() as f64
        }
    }

    pub fn parse_str(text: &str) -> Result<Corpus> {
        parse_corpus(text.as_bytes())
    }

    pub fn to_file_string(&self) -> String {
        let mut out = Vec::new();
        write_corpus(self, &mut out).expect("in-memory write");
        String::from_utf8(out).expect("corpus text is utf-8")
    }
}

/// Parses the tab-separated trajectory format, preserving trajectory order.
/// Blank lines and lines starting with `#` are skipped; errors name the
/// 1-based line number.
pub fn parse_corpus<R: BufRead>(reader: R) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.splitn(3, '\t');
        let id = fields.next().unwrap_or_default();
        let label = fields
            .next()
            .ok_or_else(|| Error::parse(lineno, "expected id<TAB>label<TAB>tokens"))?;
        let toks = fields
            .next()
            .ok_or_else(|| Error::parse(lineno, "expected id<TAB>label<TAB>tokens"))?;
        validate_id(id).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let label = match label {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::parse(
                    lineno,
                    format!("label {other:?} not in {{0,1}}"),
                ))
            }
        };
        let mut tokens = Vec::new();
        for tok in toks.split(' ').filter(|t| !t.is_empty()) {
            let id = corpus
                .vocab
                .intern(tok)
                .map_err(|e| Error::parse(lineno, e.to_string()))?;
            tokens.push(id);
        }
        if tokens.is_empty() {
            return Err(Error::parse(lineno, "empty token list"));
        }
        corpus.trajectories.push(Trajectory {
            id: id.to_owned(),
            label,
            tokens,
        });
    }
    Ok(corpus)
}

pub fn read_corpus(path: &Path) -> Result<Corpus> {
    let file = std::fs::File::open(path).map_err(|e| crate::error::io_at(path, e))?;
    parse_corpus(std::io::BufReader::new(file))
}

/// Writes the corpus in the same format `parse_corpus` reads.
pub fn write_corpus<W: Write>(corpus: &Corpus, mut w: W) -> Result<()> {
    for t in &corpus.trajectories {
        write!(w, "{}\t{}\t", t.id, t.label as u8)?;
        for (i, &tok) in t.tokens.iter().enumerate() {
            if i > 0 {
                w.write_all(b" ")?;
            }
            w.write_all(corpus.vocab.token(tok).as_bytes())?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// An unlabeled raw event sequence, the input to outcome preprocessing.
#[derive(Debug, Clone)]
pub struct RawSequence {
    pub id: String,
    pub tokens: Vec<String>,
}

/// Parses raw sequences: `id<TAB>token token ...` with `#` comment lines.
pub fn parse_raw_sequences<R: BufRead>(reader: R) -> Result<Vec<RawSequence>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, toks) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(lineno, "expected id<TAB>tokens"))?;
        validate_id(id).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let tokens: Vec<String> = toks
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(str::to_owned)
            .collect();
        if tokens.is_empty() {
            return Err(Error::parse(lineno, "empty token list"));
        }
        out.push(RawSequence {
            id: id.to_owned(),
            tokens,
        });
    }
    Ok(out)
}

/// How repeated tokens within one trajectory are removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DedupPolicy {
    /// Keep only the first occurrence of each token (the default).
    Global,
    /// Collapse only consecutive repeats.
    Consecutive,
}

impl FromStr for DedupPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(DedupPolicy::Global),
            "consecutive" => Ok(DedupPolicy::Consecutive),
            other => Err(Error::invalid(format!(
                "unknown dedup policy {other:?} (expected global|consecutive)"
            ))),
        }
    }
}

/// Result of [`preprocess_outcome`]; `outcome_seen` is false when the outcome
/// token never occurred, which leaves prevalence 0 and deserves a warning.
#[derive(Debug)]
pub struct Preprocessed {
    pub corpus: Corpus,
    pub discarded: usize,
    pub outcome_seen: bool,
}

/// Turns raw sequences into a labeled corpus: sequences containing `outcome`
/// are truncated to the prefix strictly before its first occurrence and
/// labeled 1, all others labeled 0; duplicates are then removed per `dedup`,
/// and sequences shorter than `min_len` are discarded.
pub fn preprocess_outcome(
    raw: &[RawSequence],
    outcome: &str,
    min_len: usize,
    dedup: DedupPolicy,
) -> Result<Preprocessed> {
    if min_len < 1 {
        return Err(Error::invalid("min_len must be at least 1"));
    }
    validate_token(outcome)?;
    let mut corpus = Corpus::default();
    let mut discarded = 0usize;
    let mut outcome_seen = false;
    for seq in raw {
        let (prefix, label) = match seq.tokens.iter().position(|t| t == outcome) {
            Some(pos) => {
                outcome_seen = true;
                (&seq.tokens[..pos], true)
            }
            None => (&seq.tokens[..], false),
        };
        let mut kept: Vec<&str> = Vec::with_capacity(prefix.len());
        match dedup {
            DedupPolicy::Global => {
                for tok in prefix {
                    if !kept.contains(&tok.as_str()) {
                        kept.push(tok);
                    }
                }
            }
            DedupPolicy::Consecutive => {
                for tok in prefix {
                    if kept.last() != Some(&tok.as_str()) {
                        kept.push(tok);
                    }
                }
            }
        }
        if kept.len() < min_len {
            discarded += 1;
            continue;
        }
        let tokens = kept
            .into_iter()
            .map(|t| corpus.vocab.intern(t))
            .collect::<Result<Vec<_>>>()?;
        corpus.trajectories.push(Trajectory {
            id: seq.id.clone(),
            label,
            tokens,
        });
    }
    Ok(Preprocessed {
        corpus,
        discarded,
        outcome_seen,
    })
}

fn take_counts(n: usize, ratios: [f64; 3]) -> Result<[usize; 3]> {
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "split ratios sum to {sum}, expected 1"
        )));
    }
    if ratios.iter().any(|&r| !(0.0..=1.0).contains(&r)) {
        return Err(Error::invalid("split ratios must lie in [0,1]"));
    }
    let n0 = ((n as f64 * ratios[0]).round() as usize).min(n);
    let n1 = ((n as f64 * ratios[1]).round() as usize).min(n - n0);
    Ok([n0, n1, n - n0 - n1])
}

/// Splits the corpus into three disjoint parts whose sizes follow `ratios`
/// within rounding. The shuffle is deterministic given `seed`; each part
/// keeps the original trajectory order. With `stratified`, positives and
/// negatives are apportioned separately.
pub fn split(
    corpus: &Corpus,
    ratios: [f64; 3],
    seed: u64,
    stratified: bool,
) -> Result<(Corpus, Corpus, Corpus)> {
    if corpus.len() < 3 {
        return Err(Error::invalid(format!(
            "cannot split {} trajectories into 3 parts",
            corpus.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts: [Vec<usize>; 3] = Default::default();
    if stratified {
        for class in [true, false] {
            let mut idx: Vec<usize> = (0..corpus.len())
                .filter(|&i| corpus.trajectories[i].label == class)
                .collect();
            idx.shuffle(&mut rng);
            let counts = take_counts(idx.len(), ratios)?;
            let mut it = idx.into_iter();
            for (part, &c) in parts.iter_mut().zip(&counts) {
                part.extend(it.by_ref().take(c));
            }
        }
    } else {
        let mut idx: Vec<usize> = (0..corpus.len()).collect();
        idx.shuffle(&mut rng);
        let counts = take_counts(idx.len(), ratios)?;
        let mut it = idx.into_iter();
        for (part, &c) in parts.iter_mut().zip(&counts) {
            part.extend(it.by_ref().take(c));
        }
    }
    let mut out = Vec::with_capacity(3);
    for part in &mut parts {
        part.sort_unstable();
        out.push(Corpus {
            vocab: corpus.vocab.clone(),
            trajectories: part
                .iter()
                .map(|&i| corpus.trajectories[i].clone())
                .collect(),
        });
    }
    let mut it = out.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap(), it.next().unwrap()))
}

/// An ordered pattern of entity-token alternatives; a trajectory matches when
/// the pattern occurs as a subsequence, one alternative per position.
///
/// Text syntax: positions separated by `>`, alternatives within a position by
/// `|`, e.g. `461|462>401>250`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSpec {
    pub name: String,
    pub positions: Vec<Vec<String>>,
}

impl PatternSpec {
    pub fn new(name: impl Into<String>, positions: Vec<Vec<String>>) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::invalid("pattern needs at least 2 positions"));
        }
        for set in &positions {
            if set.is_empty() {
                return Err(Error::invalid("pattern position with no alternatives"));
            }
            for tok in set {
                validate_token(tok)?;
            }
        }
        Ok(Self {
            name: name.into(),
            positions,
        })
    }

    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let positions = text
            .split('>')
            .map(|pos| pos.split('|').map(|t| t.trim().to_owned()).collect())
            .collect();
        Self::new(name, positions)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Distinct tokens across all positions.
    pub fn alphabet(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for set in &self.positions {
            for tok in set {
                if !seen.contains(&tok.as_str()) {
                    seen.push(tok);
                }
            }
        }
        seen
    }

    fn resolve(&self, vocab: &Vocab) -> Vec<Vec<EntityId>> {
        self.positions
            .iter()
            .map(|set| set.iter().filter_map(|t| vocab.id(t)).collect())
            .collect()
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, set) in self.positions.iter().enumerate() {
            if i > 0 {
                f.write_str(">")?;
            }
            f.write_str(&set.join("|"))?;
        }
        Ok(())
    }
}

/// Greedy left-to-right subsequence match of resolved alternative sets.
/// Greedy matching is exact here: taking the earliest token satisfying each
/// position never blocks a later position, so it decides existence.
fn matches_resolved(tokens: &[EntityId], sets: &[Vec<EntityId>]) -> bool {
    let mut pos = 0;
    for &tok in tokens {
        if pos == sets.len() {
            break;
        }
        if sets[pos].contains(&tok) {
            pos += 1;
        }
    }
    pos == sets.len()
}

/// Relabels the corpus: 1 iff the pattern occurs as a subsequence.
pub fn label_by_pattern(corpus: &Corpus, pattern: &PatternSpec) -> Corpus {
    let sets = pattern.resolve(&corpus.vocab);
    let feasible = sets.iter().all(|s| !s.is_empty());
    let mut out = corpus.clone();
    for t in &mut out.trajectories {
        t.label = feasible && matches_resolved(&t.tokens, &sets);
    }
    out
}

/// Flips each label-1 trajectory to 0 independently with probability `ratio`
/// (one uniform draw per positive, in corpus order). Negatives never change.
pub fn inject_label_noise(corpus: &Corpus, ratio: f64, seed: u64) -> Result<Corpus> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::invalid(format!("noise ratio {ratio} outside [0,1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = corpus.clone();
    for t in &mut out.trajectories {
        if t.label && rng.random::<f64>() < ratio {
            t.label = false;
        }
    }
    Ok(out)
}

/// One pattern planted into a fraction of synthetic trajectories.
#[derive(Debug, Clone)]
pub struct PlantedPattern {
    pub pattern: PatternSpec,
    pub prob: f64,
}

/// Configuration for [`synth_generate`]. Accepted as a key=value text file
/// with keys `vocab_size`, `n`, `len_min`, `len_max`, `seed`, and repeatable
/// `pattern` lines of the form `461|462>401>250 @ 0.1` (pattern text, `@`,
/// insertion probability). Tokens are named `t0..t{vocab_size-1}`.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub vocab_size: usize,
    pub n_trajectories: usize,
    pub len_min: usize,
    pub len_max: usize,
    pub patterns: Vec<PlantedPattern>,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            vocab_size: 50,
            n_trajectories: 1000,
            len_min: 10,
            len_max: 10,
            patterns: Vec::new(),
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(lineno, "expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::parse(lineno, format!("bad {what}: {value:?}"));
            match key {
                "vocab_size" => cfg.vocab_size = value.parse().map_err(|_| bad("vocab_size"))?,
                "n" => cfg.n_trajectories = value.parse().map_err(|_| bad("n"))?,
                "len_min" => cfg.len_min = value.parse().map_err(|_| bad("len_min"))?,
                "len_max" => cfg.len_max = value.parse().map_err(|_| bad("len_max"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "pattern" => {
                    let (spec, prob) = value
                        .rsplit_once('@')
                        .ok_or_else(|| Error::parse(lineno, "expected `pattern @ probability`"))?;
                    let prob: f64 = prob.trim().parse().map_err(|_| bad("probability"))?;
                    let name = format!("p{}", cfg.patterns.len());
                    let pattern = PatternSpec::parse(&name, spec.trim())
                        .map_err(|e| Error::parse(lineno, e.to_string()))?;
                    cfg.patterns.push(PlantedPattern { pattern, prob });
                }
                other => return Err(Error::parse(lineno, format!("unknown key {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vocab_size == 0 {
            return Err(Error::invalid("vocab_size must be positive"));
        }
        if self.len_min < 1 || self.len_max < self.len_min {
            return Err(Error::invalid("need 1 <= len_min <= len_max"));
        }
        for p in &self.patterns {
            if !(0.0..=1.0).contains(&p.prob) {
                return Err(Error::invalid(format!(
                    "pattern probability {} outside [0,1]",
                    p.prob
                )));
            }
            if p.pattern.len() > self.len_max {
                return Err(Error::invalid(format!(
                    "pattern {} has {} positions but len_max is {}",
                    p.pattern.name,
                    p.pattern.len(),
                    self.len_max
                )));
            }
            for tok in p.pattern.alphabet() {
                let ok = tok
                    .strip_prefix('t')
                    .and_then(|d| d.parse::<usize>().ok())
                    .is_some_and(|i| i < self.vocab_size);
                if !ok {
                    return Err(Error::invalid(format!(
                        "pattern token {tok:?} outside synthetic vocabulary t0..t{}",
                        self.vocab_size - 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Renders the resolved configuration, one key per line.
    pub fn render(&self) -> String {
        let mut out = format!(
            "vocab_size={}\nn={}\nlen_min={}\nlen_max={}\nseed={}\n",
            self.vocab_size, self.n_trajectories, self.len_min, self.len_max, self.seed
        );
        for p in &self.patterns {
            out.push_str(&format!("pattern={} @ {}\n", p.pattern, p.prob));
        }
        out
    }
}

/// Generates a synthetic corpus: background tokens drawn uniformly from
/// `t0..t{V-1}`, each planted pattern overwritten onto sorted random
/// positions with its insertion probability, labels assigned by subsequence
/// match against any planted pattern. Trajectory `i` uses substream `i` of
/// the seed, so the output is deterministic and insensitive to batching.
pub fn synth_generate(config: &SynthConfig) -> Result<Corpus> {
    config.validate()?;
    let mut corpus = Corpus::default();
    for i in 0..config.vocab_size {
        corpus.vocab.intern(&format!("t{i}"))?;
    }
    let resolved: Vec<(Vec<Vec<EntityId>>, f64)> = config
        .patterns
        .iter()
        .map(|p| (p.pattern.resolve(&corpus.vocab), p.prob))
        .collect();
    for i in 0..config.n_trajectories {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64);
        let len = rng.random_range(config.len_min..=config.len_max);
        let mut tokens: Vec<EntityId> = (0..len)
            .map(|_| EntityId(rng.random_range(0..config.vocab_size as u32)))
            .collect();
        for (sets, prob) in &resolved {
            if rng.random::<f64>() >= *prob || sets.len() > len {
                continue;
            }
            let picks: Vec<EntityId> = sets
                .iter()
                .map(|s| s[rng.random_range(0..s.len())])
                .collect();
            let mut slots = rand::seq::index::sample(&mut rng, len, sets.len()).into_vec();
            slots.sort_unstable();
            for (slot, tok) in slots.into_iter().zip(picks) {
                tokens[slot] = tok;
            }
        }
        let label = resolved
            .iter()
            .any(|(sets, _)| matches_resolved(&tokens, sets));
        corpus.trajectories.push(Trajectory {
            id: format!("s{i}"),
            label,
            tokens,
        });
    }
    Ok(corpus)
}

/// The two-path toy scenario: `A -> C` trajectories end in the positive
/// outcome and `B -> C` in the negative one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fig1Variant {
    /// Bare two-token paths `[A,C]` / `[B,C]`.
    Clean,
    /// Noise tokens interleaved: `[A,X,C]` / `[B,Z,C]`.
    Noisy,
}

impl FromStr for Fig1Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clean" => Ok(Fig1Variant::Clean),
            "noisy" => Ok(Fig1Variant::Noisy),
            other => Err(Error::invalid(format!(
                "unknown toy variant {other:?} (expected clean|noisy)"
            ))),
        }
    }
}

/// Builds the toy corpus with `n_per_path` copies of each path, outcome
/// encoded as the label. Trajectory order is shuffled deterministically.
pub fn fig1_toy(variant: Fig1Variant, n_per_path: usize, seed: u64) -> Result<Corpus> {
    if n_per_path < 1 {
        return Err(Error::invalid("n_per_path must be at least 1"));
    }
    let mut corpus = Corpus::default();
    let toks =
        ["A", "B", "C", "X", "Z"].map(|t| corpus.vocab.intern(t).expect("fixed tokens are valid"));
    let [a, b, c, x, z] = toks;
    let (pos_path, neg_path): (Vec<EntityId>, Vec<EntityId>) = match variant {
        Fig1Variant::Clean => (vec![a, c], vec![b, c]),
        Fig1Variant::Noisy => (vec![a, x, c], vec![b, z, c]),
    };
    for i in 0..n_per_path {
        corpus.trajectories.push(Trajectory {
            id: format!("a{i}"),
            label: true,
            tokens: pos_path.clone(),
        });
        corpus.trajectories.push(Trajectory {
            id: format!("b{i}"),
            label: false,
            tokens: neg_path.clone(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    corpus.trajectories.shuffle(&mut rng);
    Ok(corpus)
}
