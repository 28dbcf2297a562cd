//! Statistical kernels: entropy, subsequence/substring matching, candidate
//! information gain with a label-permutation significance test, and AUPRC.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, EntityId};
use crate::error::{Error, Result};

/// An ordered tuple of entities, earliest first, proposed as a conditional
/// node (the node encoding reverses this order: base last, conditions
/// most-recent-first).
pub type Candidate = Vec<EntityId>;

/// Shannon entropy in bits of a finite distribution; `0·log₂0 = 0`.
pub fn entropy(dist: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &p in dist {
        if p < 0.0 || !p.is_finite() {
            return Err(Error::invalid(format!("probability {p} is not in [0,1]")));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "distribution sums to {sum}, expected 1"
        )));
    }
    Ok(dist
        .iter()
        .map(|&p| if p > 0.0 { -p * p.log2() } else { 0.0 })
        .sum())
}

/// Entropy of a {p, 1-p} distribution, without input validation.
#[inline]
pub fn binary_entropy(p: f64) -> f64 {
    let q = 1.0 - p;
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if q > 0.0 {
        h -= q * q.log2();
    }
    h
}

/// Leftmost-greedy subsequence match: returns the strictly increasing
/// positions of the earliest occurrence of `candidate` in `tokens`, or None.
/// Greedy matching decides existence exactly, since taking the earliest
/// position for each element never blocks a later element.
pub fn contains_subsequence(tokens: &[EntityId], candidate: &[EntityId]) -> Option<Vec<usize>> {
    let mut positions = Vec::with_capacity(candidate.len());
    let mut from = 0;
    for &want in candidate {
        let rel = tokens[from..].iter().position(|&t| t == want)?;
        positions.push(from + rel);
        from += rel + 1;
    }
    Some(positions)
}

/// Leftmost contiguous occurrence of `candidate` in `tokens`, as the start
/// index of the run.
pub fn find_substring(tokens: &[EntityId], candidate: &[EntityId]) -> Option<usize> {
    if candidate.is_empty() || candidate.len() > tokens.len() {
        return None;
    }
    tokens.windows(candidate.len()).position(|w| w == candidate)
}

/// Corpus-level match counts for one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportCount {
    /// Trajectories containing the candidate (at most once each).
    pub n_match: usize,
    /// Matching trajectories with label 1.
    pub n_match_pos: usize,
    pub n_total: usize,
    pub n_pos: usize,
}

impl SupportCount {
    /// Tallies per-trajectory match flags against labels.
    pub fn from_matches(matched: &[bool], labels: &[bool]) -> Self {
        debug_assert_eq!(matched.len(), labels.len());
        let mut s = SupportCount {
            n_match: 0,
            n_match_pos: 0,
            n_total: matched.len(),
            n_pos: 0,
        };
        for (&m, &y) in matched.iter().zip(labels) {
            s.n_pos += y as usize;
            s.n_match += m as usize;
            s.n_match_pos += (m && y) as usize;
        }
        s
    }
}

/// Counts trajectories containing `candidate` as a subsequence.
pub fn support(corpus: &Corpus, candidate: &[EntityId]) -> SupportCount {
    let matched: Vec<bool> = corpus
        .trajectories
        .iter()
        .map(|t| contains_subsequence(&t.tokens, candidate).is_some())
        .collect();
    let labels: Vec<bool> = corpus.trajectories.iter().map(|t| t.label).collect();
    SupportCount::from_matches(&matched, &labels)
}

/// How candidate information gain is computed from match counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IgConvention {
    /// Standard two-branch gain over the binary "contains the candidate"
    /// feature: h(Y) − [P(m)·h(Y|m) + P(¬m)·h(Y|¬m)]. Always in [0, h(Y)].
    #[default]
    TwoBranch,
    /// h(Y) − Σ_y P(y,u)·log₂(P(y,u)/P(u)), kept verbatim for comparison;
    /// not sign-normalized, so values can leave [0, h(Y)].
    Literal,
}

impl std::str::FromStr for IgConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-branch" => Ok(IgConvention::TwoBranch),
            "literal" => Ok(IgConvention::Literal),
            other => Err(Error::invalid(format!(
                "unknown ig convention {other:?} (expected two-branch|literal)"
            ))),
        }
    }
}

impl std::fmt::Display for IgConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IgConvention::TwoBranch => "two-branch",
            IgConvention::Literal => "literal",
        })
    }
}

/// Information gain in bits from match counts alone.
pub fn ig_from_counts(s: &SupportCount, convention: IgConvention) -> f64 {
    if s.n_total == 0 {
        return 0.0;
    }
    let n = s.n_total as f64;
    let h_y = binary_entropy(s.n_pos as f64 / n);
    match convention {
        IgConvention::TwoBranch => {
            let p_m = s.n_match as f64 / n;
            let h_m = if s.n_match > 0 {
                binary_entropy(s.n_match_pos as f64 / s.n_match as f64)
            } else {
                0.0
            };
            let rest = s.n_total - s.n_match;
            let h_r = if rest > 0 {
                binary_entropy((s.n_pos - s.n_match_pos) as f64 / rest as f64)
            } else {
                0.0
            };
            // Non-negative in exact arithmetic; clamp float error only.
            (h_y - (p_m * h_m + (1.0 - p_m) * h_r)).max(0.0)
        }
        IgConvention::Literal => {
            let p_u = s.n_match as f64 / n;
            let mut sum = 0.0;
            if p_u > 0.0 {
                for joint in [s.n_match_pos, s.n_match - s.n_match_pos] {
                    let p_j = joint as f64 / n;
                    if p_j > 0.0 {
                        sum += p_j * (p_j / p_u).log2();
                    }
                }
            }
            h_y - sum
        }
    }
}

/// Information gain of the candidate-as-subsequence feature over the corpus.
pub fn ig_candidate(
    corpus: &Corpus,
    candidate: &[EntityId],
    convention: IgConvention,
) -> Result<f64> {
    if corpus.is_empty() {
        return Err(Error::invalid("information gain over an empty corpus"));
    }
    Ok(ig_from_counts(&support(corpus, candidate), convention))
}

/// Label vectors shuffled by Fisher–Yates, one per permutation replicate.
/// Replicate `p` uses substream `p` of the seed, so a batch of candidates
/// tested against one `PermutedLabels` matches standalone
/// [`permutation_test`] calls with the same seed bit for bit.
#[derive(Debug, Clone)]
pub struct PermutedLabels {
    pub perms: Vec<Vec<bool>>,
}

impl PermutedLabels {
    pub fn generate(labels: &[bool], n_perm: usize, seed: u64) -> Self {
        let perms = (0..n_perm)
            .map(|p| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(p as u64);
                let mut v = labels.to_vec();
                v.shuffle(&mut rng);
                v
            })
            .collect();
        Self { perms }
    }
}

/// Observed IG with its permutation-null statistics.
#[derive(Debug, Clone, Copy)]
pub struct IgResult {
    pub ig: f64,
    pub t_stat: f64,
    pub perm_mean: f64,
    pub perm_std: f64,
    pub support: SupportCount,
    /// Set when the null has zero spread and `t_stat` is defined by
    /// convention (+∞ if ig exceeds the null mean, else 0).
    pub degenerate: bool,
}

/// Folds an observed IG and its null replicate values into an IgResult.
/// Null values must be in replicate order so repeated runs sum identically.
pub(crate) fn summarize_null(ig: f64, null: &[f64], support: SupportCount) -> IgResult {
    let n = null.len() as f64;
    let perm_mean = null.iter().sum::<f64>() / n;
    let var = null.iter().map(|x| (x - perm_mean).powi(2)).sum::<f64>() / (n - 1.0);
    let perm_std = var.sqrt();
    let (t_stat, degenerate) = if perm_std > 0.0 {
        ((ig - perm_mean) / perm_std, false)
    } else if ig > perm_mean {
        (f64::INFINITY, true)
    } else {
        (0.0, true)
    };
    IgResult {
        ig,
        t_stat,
        perm_mean,
        perm_std,
        support,
        degenerate,
    }
}

/// Core of the permutation test over a precomputed match vector.
pub(crate) fn test_matches(
    matched: &[bool],
    labels: &[bool],
    perms: &PermutedLabels,
    convention: IgConvention,
) -> IgResult {
    let support = SupportCount::from_matches(matched, labels);
    let ig = ig_from_counts(&support, convention);
    let null: Vec<f64> = perms
        .perms
        .iter()
        .map(|labels| ig_from_counts(&SupportCount::from_matches(matched, labels), convention))
        .collect();
    summarize_null(ig, &null, support)
}

/// Tests one candidate's observed IG against `n_perm` label shuffles.
pub fn permutation_test(
    corpus: &Corpus,
    candidate: &[EntityId],
    n_perm: usize,
    seed: u64,
    convention: IgConvention,
) -> Result<IgResult> {
    if n_perm < 2 {
        return Err(Error::invalid("permutation test needs n_perm >= 2"));
    }
    if corpus.is_empty() {
        return Err(Error::invalid("permutation test over an empty corpus"));
    }
    let matched: Vec<bool> = corpus
        .trajectories
        .iter()
        .map(|t| contains_subsequence(&t.tokens, candidate).is_some())
        .collect();
    let labels: Vec<bool> = corpus.trajectories.iter().map(|t| t.label).collect();
    let perms = PermutedLabels::generate(&labels, n_perm, seed);
    Ok(test_matches(&matched, &labels, &perms, convention))
}

/// Area under the precision-recall curve by descending-score average
/// precision; equal scores are processed as one block.
pub fn auprc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("NaN score"));
    }
    let n_pos = labels.iter().filter(|&&y| y).count();
    if n_pos == 0 {
        return Err(Error::invalid("no positive labels"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("no NaN"));
    let mut ap = 0.0;
    let mut tp = 0usize;
    let mut seen = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let block_tp = order[i..j].iter().filter(|&&idx| labels[idx]).count();
        tp += block_tp;
        seen += j - i;
        let precision = tp as f64 / seen as f64;
        ap += precision * (block_tp as f64 / n_pos as f64);
        i = j;
    }
    Ok(ap)
}
