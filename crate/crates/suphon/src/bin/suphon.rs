//! Command-line front end: synthesize corpora, build graphs, run walk
//! reports, compare paths across graphs, and score outcomes.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use suphon::builder::{self, BuildConfig, HonGraph, Method};
use suphon::corpus::{self, Corpus, Fig1Variant, PatternSpec, SynthConfig};
use suphon::paths::{self, CompareConfig, PathConfig};
use suphon::predict::{self, Aggregator, ScorerConfig};
use suphon::seqstats::IgConvention;
use suphon::walker::{self, StartWeighting, WalkConfig};
use suphon::{Error, Result};

#[derive(Parser)]
#[command(
    name = "suphon",
    version,
    about = "Outcome-supervised higher-order networks from labeled event sequences",
    after_help = "Exit codes: 0 success, 1 contract violation, 2 I/O or parse error."
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, env = "SUPHON_THREADS")]
    threads: Option<usize>,

    /// key=value file supplying defaults for flags not given on the command
    /// line; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Stamp reports with the generation time. Off by default so re-runs
    /// are byte-identical.
    #[arg(long, global = true)]
    timestamps: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a corpus: generated, toy, or a transformed copy of an input.
    Synth(SynthArgs),
    /// Build a graph from a labeled corpus.
    Build(BuildArgs),
    /// Random-walk reports: whole-graph information gain or per-node
    /// absorption.
    Walk(WalkArgs),
    /// Mine top paths, optionally matching them against other graphs.
    Paths(PathsArgs),
    /// Outcome scoring: evaluation, noise sweeps, and feature export.
    #[command(subcommand)]
    Predict(PredictCommand),
}

#[derive(Args)]
struct SynthArgs {
    /// Generator settings file (keys vocab_size, n, len_min, len_max, seed,
    /// repeatable `pattern = toks @ prob` lines).
    #[arg(long, value_name = "FILE", conflicts_with_all = ["toy", "input"])]
    spec: Option<PathBuf>,

    /// Fixed two-path toy corpus: `clean` or `noisy`.
    #[arg(long, value_name = "VARIANT", conflicts_with = "input")]
    toy: Option<String>,

    /// Trajectories per toy path.
    #[arg(long, requires = "toy")]
    n: Option<usize>,

    /// Existing corpus to transform.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,

    /// Relabel trajectories by whether they contain this pattern
    /// (`a|b>c` syntax: `>`-separated positions, `|` alternatives).
    #[arg(long, value_name = "PATTERN")]
    pattern: Option<String>,

    /// Flip each positive label with this probability.
    #[arg(long, value_name = "RATIO")]
    noise: Option<f64>,

    /// Seed for generation, toy shuffling, and noise.
    #[arg(long)]
    seed: Option<u64>,

    /// Output corpus file (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct BuildFlags {
    /// Maximum node order (pattern length).
    #[arg(long)]
    k: Option<usize>,

    /// Selection threshold on the permutation t-statistic.
    #[arg(long)]
    alpha: Option<f64>,

    /// Label permutations per candidate.
    #[arg(long)]
    n_perm: Option<usize>,

    /// Minimum trajectories containing a candidate.
    #[arg(long)]
    min_support: Option<usize>,

    /// Information-gain convention: `two-branch` or `literal`.
    #[arg(long)]
    convention: Option<IgConvention>,

    /// Permutation seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl BuildFlags {
    fn resolve(&self, file: &FileConfig) -> Result<BuildConfig> {
        let defaults = BuildConfig::default();
        let config = BuildConfig {
            k: resolve(self.k, file, "k", defaults.k)?,
            alpha: resolve(self.alpha, file, "alpha", defaults.alpha)?,
            n_perm: resolve(self.n_perm, file, "n_perm", defaults.n_perm)?,
            min_support: resolve(self.min_support, file, "min_support", defaults.min_support)?,
            convention: resolve(self.convention, file, "convention", defaults.convention)?,
            seed: resolve(self.seed, file, "seed", defaults.seed)?,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct BuildArgs {
    /// Labeled corpus file.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,

    /// Graph family: `fon`, `hon`, `suphon`, or `suphon-noskip`.
    #[arg(long)]
    method: Method,

    /// Divergence threshold scale for `--method hon`.
    #[arg(long)]
    tau: Option<f64>,

    #[command(flatten)]
    build: BuildFlags,

    /// Output graph file (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct WalkFlags {
    /// Monte Carlo walks per start node.
    #[arg(long)]
    walks_per_start: Option<usize>,

    /// Steps before a walk counts as censored.
    #[arg(long)]
    max_steps: Option<usize>,

    /// Independent repetitions of the whole-graph estimate.
    #[arg(long)]
    reps: Option<usize>,

    /// Walk seed.
    #[arg(long)]
    walk_seed: Option<u64>,

    /// Start-node weighting: `out-degree` or `uniform`.
    #[arg(long)]
    start_weighting: Option<StartWeighting>,
}

impl WalkFlags {
    fn resolve(&self, file: &FileConfig) -> Result<WalkConfig> {
        let defaults = WalkConfig::default();
        let config = WalkConfig {
            walks_per_start: resolve(
                self.walks_per_start,
                file,
                "walks_per_start",
                defaults.walks_per_start,
            )?,
            max_steps: resolve(self.max_steps, file, "max_steps", defaults.max_steps)?,
            reps: resolve(self.reps, file, "reps", defaults.reps)?,
            seed: resolve(self.walk_seed, file, "walk_seed", defaults.seed)?,
            start_weighting: resolve(
                self.start_weighting,
                file,
                "start_weighting",
                defaults.start_weighting,
            )?,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct WalkArgs {
    /// Graph file.
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,

    /// `graph` for the repeated whole-graph gain, `nodes` for per-node
    /// absorption and gain.
    #[arg(long, default_value = "graph")]
    report: WalkReport,

    /// Solve absorption exactly instead of sampling.
    #[arg(long)]
    exact: bool,

    #[command(flatten)]
    walk: WalkFlags,

    /// Output CSV (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy)]
enum WalkReport {
    Graph,
    Nodes,
}

impl FromStr for WalkReport {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graph" => Ok(WalkReport::Graph),
            "nodes" => Ok(WalkReport::Nodes),
            other => Err(Error::invalid(format!(
                "unknown report `{other}` (expected `graph` or `nodes`)"
            ))),
        }
    }
}

#[derive(Args)]
struct PathsArgs {
    /// Graph whose top paths are mined.
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,

    /// Graphs to match the mined paths against (repeatable). Without any,
    /// the report lists the paths themselves.
    #[arg(long, value_name = "FILE")]
    target: Vec<PathBuf>,

    /// Sink the paths must reach: `pos` or `neg`.
    #[arg(long, default_value = "pos")]
    outcome: Outcome,

    /// Sampled walks per start node.
    #[arg(long)]
    samples_per_start: Option<usize>,

    /// Longest path length kept.
    #[arg(long)]
    max_len: Option<usize>,

    /// Path-sampling seed.
    #[arg(long)]
    path_seed: Option<u64>,

    /// Solve node absorption exactly instead of sampling.
    #[arg(long)]
    exact: bool,

    #[command(flatten)]
    walk: WalkFlags,

    /// Output CSV (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy)]
enum Outcome {
    Pos,
    Neg,
}

impl FromStr for Outcome {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" => Ok(Outcome::Pos),
            "neg" => Ok(Outcome::Neg),
            other => Err(Error::invalid(format!(
                "unknown outcome `{other}` (expected `pos` or `neg`)"
            ))),
        }
    }
}

#[derive(Subcommand)]
enum PredictCommand {
    /// Score a corpus against a graph and report ranking quality.
    Eval(EvalArgs),
    /// Rebuild under training-label noise and chart held-out ranking
    /// quality per noise ratio.
    Sweep(SweepArgs),
    /// Per-node features and the edge list for downstream models.
    Export(ExportArgs),
}

#[derive(Args, Clone)]
struct ScorerFlags {
    /// Combine per-position probabilities by `mean` or `log-odds-mean`.
    #[arg(long)]
    aggregator: Option<Aggregator>,

    /// Estimate absorption by sampling instead of solving exactly.
    #[arg(long)]
    sampled: bool,

    #[command(flatten)]
    walk: WalkFlags,
}

impl ScorerFlags {
    fn resolve(&self, file: &FileConfig) -> Result<ScorerConfig> {
        Ok(ScorerConfig {
            aggregator: resolve(self.aggregator, file, "aggregator", Aggregator::default())?,
            exact: !self.sampled,
            walk: self.walk.resolve(file)?,
        })
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Graph file.
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,

    /// Labeled corpus to score.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,

    #[command(flatten)]
    scorer: ScorerFlags,

    /// Output CSV (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Corpus to relabel, split, and noise.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,

    /// Pattern defining the positive class (`a|b>c` syntax).
    #[arg(long, value_name = "PATTERN")]
    pattern: String,

    /// Comma-separated noise ratios.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,0.6,0.7,0.8,0.9")]
    ratios: Vec<f64>,

    /// Comma-separated noise seeds (one rebuild per ratio-seed pair).
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
    seeds: Vec<u64>,

    /// Train/held-out split seed.
    #[arg(long)]
    split_seed: Option<u64>,

    /// Fraction of trajectories used for building.
    #[arg(long)]
    train_frac: Option<f64>,

    #[command(flatten)]
    build: BuildFlags,

    #[command(flatten)]
    scorer: ScorerFlags,

    /// Output CSV (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Graph file.
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,

    #[command(flatten)]
    scorer: ScorerFlags,

    /// Output CSV (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Defaults loaded from `--config`; any key may also appear that another
/// subcommand consumes.
struct FileConfig(HashMap<String, String>);

const KNOWN_KEYS: &[&str] = &[
    "k",
    "alpha",
    "n_perm",
    "min_support",
    "convention",
    "seed",
    "tau",
    "walks_per_start",
    "max_steps",
    "reps",
    "walk_seed",
    "start_weighting",
    "samples_per_start",
    "max_len",
    "path_seed",
    "aggregator",
    "split_seed",
    "train_frac",
];

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut map = HashMap::new();
        let Some(path) = path else {
            return Ok(FileConfig(map));
        };
        let text = read_text(path)?;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: "expected key=value".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("unknown config key {key:?}"),
                });
            }
            map.insert(key.to_owned(), value.to_owned());
        }
        Ok(FileConfig(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Error::invalid(format!("config key {key}: cannot parse {raw:?}"))),
        }
    }
}

fn resolve<T: FromStr>(flag: Option<T>, file: &FileConfig, key: &str, default: T) -> Result<T> {
    match flag {
        Some(v) => Ok(v),
        None => Ok(file.get(key)?.unwrap_or(default)),
    }
}

/// Header lines every report carries: the graph's provenance plus the
/// command's own resolved settings.
fn meta_headers(graph: &HonGraph) -> Vec<(&'static str, String)> {
    let m = &graph.meta;
    vec![
        ("method", m.method.to_string()),
        ("k", m.k.to_string()),
        ("alpha", m.alpha.to_string()),
        ("n_perm", m.n_perm.to_string()),
        ("seed", m.seed.to_string()),
        ("n_pos", m.n_pos.to_string()),
        ("n_total", m.n_total.to_string()),
    ]
}

fn walk_headers(config: &WalkConfig, exact: bool) -> Vec<(&'static str, String)> {
    let mut h = vec![(
        "absorption",
        if exact { "exact" } else { "sampled" }.to_owned(),
    )];
    if !exact {
        h.push(("walks_per_start", config.walks_per_start.to_string()));
        h.push(("max_steps", config.max_steps.to_string()));
        h.push(("walk_seed", config.seed.to_string()));
    }
    h
}

fn timestamp_headers(enabled: bool) -> Vec<(&'static str, String)> {
    if !enabled {
        return Vec::new();
    }
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    vec![("generated_unix", secs.to_string())]
}

fn write_output(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn read_corpus(path: &Path) -> Result<Corpus> {
    corpus::read_corpus(path).map_err(|e| annotate(e, &format!("corpus {}", path.display())))
}

fn read_graph(path: &Path) -> Result<HonGraph> {
    builder::read_graph(path).map_err(|e| annotate(e, &format!("graph {}", path.display())))
}

/// File-open errors already name the path; parse errors name only the
/// line, so prefix them with what was being read.
fn annotate(err: Error, what: &str) -> Error {
    match err {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{what}: {msg}"),
        },
        other => other,
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn cmd_synth(args: &SynthArgs, file: &FileConfig) -> Result<()> {
    let seed = resolve(args.seed, file, "seed", 0)?;
    let mut corpus = if let Some(spec) = &args.spec {
        let text = read_text(spec)?;
        let mut config = SynthConfig::parse(&text)?;
        if args.seed.is_some() {
            config.seed = seed;
        }
        corpus::synth_generate(&config)?
    } else if let Some(variant) = &args.toy {
        let variant: Fig1Variant = variant.parse()?;
        let n = args.n.ok_or_else(|| Error::invalid("--toy requires --n"))?;
        corpus::fig1_toy(variant, n, seed)?
    } else if let Some(input) = &args.input {
        read_corpus(input)?
    } else {
        return Err(Error::invalid(
            "nothing to synthesize: pass --spec, --toy, or --input",
        ));
    };
    if let Some(pattern) = &args.pattern {
        let spec = PatternSpec::parse("cli", pattern)?;
        corpus = corpus::label_by_pattern(&corpus, &spec);
    }
    if let Some(ratio) = args.noise {
        corpus = corpus::inject_label_noise(&corpus, ratio, seed)?;
    }
    let mut body = Vec::new();
    corpus::write_corpus(&corpus, &mut body)?;
    match &args.out {
        Some(path) => fs::write(path, body)?,
        None => std::io::stdout().write_all(&body)?,
    }
    Ok(())
}

fn cmd_build(args: &BuildArgs, file: &FileConfig) -> Result<()> {
    let corpus = read_corpus(&args.corpus)?;
    let config = args.build.resolve(file)?;
    let graph = match args.method {
        Method::Fon => builder::build_fon(&corpus)?,
        Method::Hon => {
            let tau = resolve(args.tau, file, "tau", 1.0)?;
            builder::build_hon_unsupervised(&corpus, config.k, tau)?
        }
        Method::Suphon => builder::build_suphon(&corpus, &config)?,
        Method::SuphonNoskip => builder::build_suphon_noskip(&corpus, &config)?,
    };
    let body = builder::graph_to_string(&graph);
    write_output(args.out.as_deref(), &body)
}

fn cmd_walk(args: &WalkArgs, file: &FileConfig, timestamps: bool) -> Result<()> {
    let graph = read_graph(&args.graph)?;
    let config = args.walk.resolve(file)?;
    let mut headers = meta_headers(&graph);
    headers.extend(walk_headers(&config, args.exact));
    headers.extend(timestamp_headers(timestamps));
    let body = match args.report {
        WalkReport::Graph => {
            headers.push(("start_weighting", config.start_weighting.to_string()));
            if args.exact {
                let ig = walker::graph_ig_exact(&graph, config.start_weighting)?;
                let h_y = walker::prior_entropy(&graph)?;
                let report = walker::GraphIgReport {
                    h_y,
                    per_rep: vec![ig],
                    mean_ig: ig,
                    std_ig: 0.0,
                };
                walker::render_graph_ig_csv(&report, &headers)
            } else {
                headers.push(("reps", config.reps.to_string()));
                let report = walker::graph_ig(&graph, &config)?;
                walker::render_graph_ig_csv(&report, &headers)
            }
        }
        WalkReport::Nodes => {
            let table = walker::absorption_table(&graph, &config, args.exact)?;
            let h_y = walker::prior_entropy(&graph)?;
            walker::render_node_csv(&graph, &table, h_y, &headers)
        }
    };
    write_output(args.out.as_deref(), &body)
}

fn cmd_paths(args: &PathsArgs, file: &FileConfig, timestamps: bool) -> Result<()> {
    let graph = read_graph(&args.graph)?;
    let walk = args.walk.resolve(file)?;
    let path_defaults = PathConfig::default();
    let path = PathConfig {
        samples_per_start: resolve(
            args.samples_per_start,
            file,
            "samples_per_start",
            path_defaults.samples_per_start,
        )?,
        max_len: resolve(args.max_len, file, "max_len", path_defaults.max_len)?,
        seed: resolve(args.path_seed, file, "path_seed", path_defaults.seed)?,
    };
    let outcome = matches!(args.outcome, Outcome::Pos);
    let mut headers = meta_headers(&graph);
    headers.extend(walk_headers(&walk, args.exact));
    headers.push(("samples_per_start", path.samples_per_start.to_string()));
    headers.push(("max_len", path.max_len.to_string()));
    headers.push(("path_seed", path.seed.to_string()));
    headers.push(("outcome", if outcome { "pos" } else { "neg" }.to_owned()));
    headers.extend(timestamp_headers(timestamps));
    let body = if args.target.is_empty() {
        let h_y = walker::prior_entropy(&graph)?;
        let table = walker::absorption_table(&graph, &walk, args.exact)?;
        let igs: Vec<Option<f64>> = table
            .into_iter()
            .map(|d| d.map(|d| walker::ig_from_distribution(&d, h_y)))
            .collect();
        let report = paths::top_paths(&graph, &igs, outcome, &path)?;
        paths::render_paths_csv(&report, &headers)
    } else {
        let targets: Vec<HonGraph> = args
            .target
            .iter()
            .map(|p| read_graph(p))
            .collect::<Result<_>>()?;
        let names: Vec<String> = args
            .target
            .iter()
            .map(|p| p.display().to_string())
            .collect();
        let config = CompareConfig {
            path,
            walk,
            exact: args.exact,
        };
        let report = paths::compare_graphs(&graph, &targets, outcome, &config)?;
        paths::render_compare_csv(&report, &names, &headers)
    };
    write_output(args.out.as_deref(), &body)
}

fn cmd_eval(args: &EvalArgs, file: &FileConfig, timestamps: bool) -> Result<()> {
    let graph = read_graph(&args.graph)?;
    let corpus = read_corpus(&args.corpus)?;
    let scorer = args.scorer.resolve(file)?;
    let scores = predict::score_corpus(&corpus, &graph, &scorer)?;
    let labels: Vec<bool> = corpus.trajectories.iter().map(|t| t.label).collect();
    let auprc = suphon::seqstats::auprc(&scores, &labels)?;
    let mut headers = meta_headers(&graph);
    headers.extend(walk_headers(&scorer.walk, scorer.exact));
    headers.push(("aggregator", scorer.aggregator.to_string()));
    headers.extend(timestamp_headers(timestamps));
    let mut body = String::new();
    for (key, value) in &headers {
        body.push_str(&format!("# {key}={value}\n"));
    }
    body.push_str("row,trajectory,label,value\n");
    for (t, score) in corpus.trajectories.iter().zip(&scores) {
        body.push_str(&format!("score,{},{},{}\n", t.id, t.label as u8, score));
    }
    body.push_str(&format!("auprc,,,{auprc}\n"));
    write_output(args.out.as_deref(), &body)
}

fn cmd_sweep(args: &SweepArgs, file: &FileConfig, timestamps: bool) -> Result<()> {
    let corpus = read_corpus(&args.corpus)?;
    let pattern = PatternSpec::parse("cli", &args.pattern)?;
    let build = args.build.resolve(file)?;
    let scorer = args.scorer.resolve(file)?;
    let split_seed = resolve(args.split_seed, file, "split_seed", 0)?;
    let train_frac = resolve(args.train_frac, file, "train_frac", 0.7)?;
    let report = predict::noise_sweep(
        &corpus,
        &pattern,
        &args.ratios,
        &args.seeds,
        split_seed,
        train_frac,
        &build,
        &scorer,
    )?;
    let mut headers = vec![
        ("method", "suphon".to_owned()),
        ("k", build.k.to_string()),
        ("alpha", build.alpha.to_string()),
        ("n_perm", build.n_perm.to_string()),
        ("seed", build.seed.to_string()),
        ("pattern", pattern.to_string()),
        ("split_seed", split_seed.to_string()),
        ("train_frac", train_frac.to_string()),
        ("aggregator", scorer.aggregator.to_string()),
    ];
    headers.extend(walk_headers(&scorer.walk, scorer.exact));
    headers.extend(timestamp_headers(timestamps));
    let body = predict::render_sweep_csv(&report, &headers);
    write_output(args.out.as_deref(), &body)
}

fn cmd_export(args: &ExportArgs, file: &FileConfig, timestamps: bool) -> Result<()> {
    let graph = read_graph(&args.graph)?;
    let scorer = args.scorer.resolve(file)?;
    let table = walker::absorption_table(&graph, &scorer.walk, scorer.exact)?;
    let h_y = walker::prior_entropy(&graph)?;
    let mut headers = meta_headers(&graph);
    headers.extend(walk_headers(&scorer.walk, scorer.exact));
    headers.extend(timestamp_headers(timestamps));
    let body = predict::export_features(&graph, &table, h_y, &headers);
    write_output(args.out.as_deref(), &body)
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    }
    let file = FileConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Synth(args) => cmd_synth(args, &file),
        Command::Build(args) => cmd_build(args, &file),
        Command::Walk(args) => cmd_walk(args, &file, cli.timestamps),
        Command::Paths(args) => cmd_paths(args, &file, cli.timestamps),
        Command::Predict(PredictCommand::Eval(args)) => cmd_eval(args, &file, cli.timestamps),
        Command::Predict(PredictCommand::Sweep(args)) => cmd_sweep(args, &file, cli.timestamps),
        Command::Predict(PredictCommand::Export(args)) => cmd_export(args, &file, cli.timestamps),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        // The consumer closed our stdout (`suphon ... | head`); finishing
        // quietly is the expected pipeline behavior.
        Err(err) if err.is_broken_pipe() => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
