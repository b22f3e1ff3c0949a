//! Subcommand implementations behind the `stancerec` binary.
//!
//! Every command reads a [`RunConfig`], writes its machine-readable output
//! into the configured output directory and reports progress on stderr.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use stancerec::corpus::{load_accounts, load_tweets, IngestStats};
use stancerec::evalmetrics::{run_evaluation, EvaluationRun, DEFAULT_MAX_PAIRS, DEFAULT_USERS_PER_STANCE};
use stancerec::filterpipe::{run_filter_pipeline, StageCounts};
use stancerec::recommender::{
    recommend, sample_candidates, DEFAULT_CANDIDATES_PER_STANCE, DEFAULT_HYBRID_RATIO, DEFAULT_K,
    DEFAULT_QUERY_TRIGRAMS,
};
use stancerec::stance::{
    build_all_profiles, build_user_vector, ClassificationReport, ProfileBuild, ProfileConfig, ProfileRecord,
    TOP_TRIGRAMS,
};
use stancerec::synthgen::{generate, load_ground_truth, SynthSpec};
use stancerec::textproc::TweetTrigrams;
use stancerec::{
    CandidateSet, Corpus, EvaluationConfig, FilterOutcome, HashtagConfig, IngestMode, Side, Stoplist, TextPipeline,
    UserProfile, Variant, VectorSpace,
};

pub const FILTER_REPORT: &str = "filter_report.json";
pub const CLASSIFICATION_REPORT: &str = "classification_report.json";
pub const PROFILES: &str = "profiles.jsonl";
pub const VOCAB: &str = "vocab.tsv";
pub const EVALUATION_CSV: &str = "evaluation.csv";
pub const EVALUATION_TABLE: &str = "evaluation.txt";
pub const EVALUATION_JSON: &str = "evaluation.json";
pub const RECOMMENDATIONS: &str = "recommendations.jsonl";

/// Failure classes mapped to distinct exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or configuration (exit code 2).
    Usage(anyhow::Error),
    /// Missing or malformed input, or a failing pipeline stage (exit code 1).
    Data(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Data(e) => e,
        }
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

trait DataErr<T> {
    fn data(self) -> CmdResult<T>;
}

impl<T> DataErr<T> for Result<T> {
    fn data(self) -> CmdResult<T> {
        self.map_err(Failure::Data)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    pub accounts: PathBuf,
    pub tweets: PathBuf,
    /// Stopword file; the bundled English list when absent.
    pub stopwords: Option<PathBuf>,
    pub out: PathBuf,
    /// Optional ground-truth file for accuracy reporting.
    pub truth: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            accounts: "accounts.jsonl".into(),
            tweets: "tweets.jsonl".into(),
            stopwords: None,
            out: "out".into(),
            truth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub paths: Paths,
    pub hashtags: HashtagConfig,
    pub language: String,
    pub min_df: u32,
    pub top_trigrams: usize,
    pub n_per_stance: usize,
    pub k: usize,
    pub ratio: f64,
    pub query_trigrams: usize,
    pub n_users: usize,
    pub max_pairs: Option<usize>,
    pub seed: u64,
    pub ingest: IngestMode,
    pub synth: Option<SynthSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            paths: Paths::default(),
            hashtags: HashtagConfig::default(),
            language: "en".into(),
            min_df: 1,
            top_trigrams: TOP_TRIGRAMS,
            n_per_stance: DEFAULT_CANDIDATES_PER_STANCE,
            k: DEFAULT_K,
            ratio: DEFAULT_HYBRID_RATIO,
            query_trigrams: DEFAULT_QUERY_TRIGRAMS,
            n_users: DEFAULT_USERS_PER_STANCE,
            max_pairs: Some(DEFAULT_MAX_PAIRS),
            seed: 0,
            ingest: IngestMode::Strict,
            synth: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CmdResult<RunConfig> {
        let body = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))
            .map_err(Failure::Usage)?;
        toml::from_str(&body)
            .with_context(|| format!("invalid config {}", path.display()))
            .map_err(Failure::Usage)
    }

    pub fn validate(&self) -> CmdResult<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Failure::Usage(anyhow::anyhow!("{msg}")))
            }
        };
        check(self.k >= 1, "k must be at least 1")?;
        check((0.0..=1.0).contains(&self.ratio), "ratio must be in [0, 1]")?;
        check(self.query_trigrams >= 1, "query_trigrams must be at least 1")?;
        check(
            self.top_trigrams >= self.query_trigrams,
            "top_trigrams must be at least query_trigrams",
        )?;
        check(self.n_per_stance >= 1, "n_per_stance must be at least 1")?;
        check(self.n_users >= 1, "n_users must be at least 1")?;
        check(self.min_df >= 1, "min_df must be at least 1")?;
        check(!self.language.is_empty(), "language must not be empty")
    }

    fn evaluation(&self) -> EvaluationConfig {
        EvaluationConfig {
            n_users_per_stance: self.n_users,
            k: self.k,
            ratio: self.ratio,
            query_trigrams: self.query_trigrams,
            seed: self.seed,
            max_pairs: self.max_pairs,
        }
    }

    fn stoplist(&self) -> CmdResult<Stoplist> {
        match &self.paths.stopwords {
            None => Ok(Stoplist::english()),
            Some(p) => Stoplist::load(p)
                .with_context(|| format!("cannot read stopword file {}", p.display()))
                .data(),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub k: Option<usize>,
    pub ratio: Option<f64>,
    pub query_trigrams: Option<usize>,
    pub n_users: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.paths.out = v.clone();
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(v) = self.ratio {
            cfg.ratio = v;
        }
        if let Some(v) = self.query_trigrams {
            cfg.query_trigrams = v;
        }
        if let Some(v) = self.n_users {
            cfg.n_users = v;
        }
    }
}

fn create_file(path: &Path) -> CmdResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot create {}", path.display()))
        .data()
}

fn write_json(path: &Path, value: &impl Serialize) -> CmdResult<()> {
    let mut w = create_file(path)?;
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(anyhow::Error::from)
        .and_then(|_| writeln!(w).map_err(Into::into))
        .and_then(|_| w.flush().map_err(Into::into))
        .with_context(|| format!("cannot write {}", path.display()))
        .data()
}

fn ensure_out(cfg: &RunConfig) -> CmdResult<()> {
    fs::create_dir_all(&cfg.paths.out)
        .with_context(|| format!("cannot create output directory {}", cfg.paths.out.display()))
        .data()
}

/// Reads the synth spec from `spec_path` (a `[synth]` table or bare spec
/// fields), falling back to the config's `[synth]` section.
pub fn resolve_spec(cfg: &RunConfig, spec_path: Option<&Path>) -> CmdResult<SynthSpec> {
    let Some(path) = spec_path else {
        return cfg
            .synth
            .clone()
            .ok_or_else(|| Failure::Usage(anyhow::anyhow!("no synth spec: pass --spec or add a [synth] section")));
    };
    let body = fs::read_to_string(path)
        .with_context(|| format!("cannot read spec {}", path.display()))
        .map_err(Failure::Usage)?;
    let value: toml::Table = toml::from_str(&body)
        .with_context(|| format!("invalid spec {}", path.display()))
        .map_err(Failure::Usage)?;
    let table = match value.get("synth") {
        Some(toml::Value::Table(t)) => t.clone(),
        _ => value,
    };
    table
        .try_into()
        .with_context(|| format!("invalid spec {}", path.display()))
        .map_err(Failure::Usage)
}

/// Generates a synthetic corpus into the output directory.
pub fn cmd_synth(cfg: &RunConfig, spec_path: Option<&Path>, seed: Option<u64>) -> CmdResult<PathBuf> {
    let mut spec = resolve_spec(cfg, spec_path)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec.validate().map_err(|e| Failure::Usage(e.into()))?;
    let corpus = generate(&spec).context("synth").data()?;
    corpus.write_to(&cfg.paths.out).context("synth").data()?;
    eprintln!(
        "synth: {} accounts, {} tweets -> {}",
        corpus.accounts.len(),
        corpus.tweets.len(),
        cfg.paths.out.display()
    );
    Ok(cfg.paths.out.clone())
}

pub fn load_corpus(cfg: &RunConfig) -> CmdResult<(Corpus, IngestStats)> {
    let accounts = load_accounts(&cfg.paths.accounts).context("ingest").data()?;
    load_tweets(&cfg.paths.tweets, accounts, cfg.ingest)
        .context("ingest")
        .data()
}

/// Everything the in-memory pipeline produces.
pub struct PipelineState {
    pub corpus: Corpus,
    pub ingest: IngestStats,
    pub filter: FilterOutcome,
    pub features: TweetTrigrams,
    pub build: ProfileBuild,
}

/// Filter, featurize and profile an already loaded corpus.
pub fn run_pipeline(
    corpus: Corpus,
    ingest: IngestStats,
    cfg: &RunConfig,
    stoplist: Stoplist,
) -> CmdResult<PipelineState> {
    let filter = run_filter_pipeline(&corpus, &cfg.hashtags, &cfg.language)
        .context("filter")
        .data()?;
    let pipeline = TextPipeline::new(stoplist);
    let features = pipeline.featurize(&corpus, filter.survivors());
    let build = build_all_profiles(
        &corpus,
        &features,
        &filter.seed_labels,
        ProfileConfig {
            min_df: cfg.min_df,
            top_k: cfg.top_trigrams,
        },
    )
    .context("stance profiling")
    .data()?;
    Ok(PipelineState {
        corpus,
        ingest,
        filter,
        features,
        build,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub tweets_loaded: usize,
    pub tweets_skipped_unknown_account: usize,
    pub stages: StageCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub correct: usize,
    pub total: usize,
}

impl Accuracy {
    pub fn rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

/// Share of profiled-or-unclassified survivors whose stance matches `truth`.
pub fn accuracy(state: &PipelineState, truth: &BTreeMap<String, Side>) -> Accuracy {
    let correct = state
        .build
        .profiles
        .iter()
        .filter(|p| truth.get(&p.account_id) == Some(&p.stance))
        .count();
    Accuracy {
        correct,
        total: state.build.profiles.len() + state.build.unclassified.len(),
    }
}

pub struct PipelineSummary {
    pub filter: FilterReport,
    pub classification: ClassificationReport,
    pub accuracy: Option<Accuracy>,
}

/// Runs ingestion through stance profiling and writes the stage report,
/// classification report, profile dump and vocabulary dump.
pub fn cmd_pipeline(cfg: &RunConfig) -> CmdResult<PipelineSummary> {
    cfg.validate()?;
    let stoplist = cfg.stoplist()?;
    let (corpus, ingest) = load_corpus(cfg)?;
    eprintln!("ingest: {} accounts, {} tweets", corpus.n_accounts(), corpus.n_tweets());
    let state = run_pipeline(corpus, ingest, cfg, stoplist)?;
    ensure_out(cfg)?;
    let out = &cfg.paths.out;

    let filter = FilterReport {
        tweets_loaded: state.ingest.loaded,
        tweets_skipped_unknown_account: state.ingest.skipped_unknown_account,
        stages: state.filter.report,
    };
    write_json(&out.join(FILTER_REPORT), &filter)?;
    println!("{}", serde_json::to_string(&filter).expect("serializable"));
    write_json(&out.join(CLASSIFICATION_REPORT), &state.build.report)?;

    let mut w = create_file(&out.join(PROFILES))?;
    for p in &state.build.profiles {
        serde_json::to_writer(&mut w, &ProfileRecord::from(p))
            .map_err(anyhow::Error::from)
            .and_then(|_| writeln!(w).map_err(Into::into))
            .context("cannot write profiles")
            .data()?;
    }
    w.flush().context("cannot write profiles").data()?;

    let mut w = create_file(&out.join(VOCAB))?;
    state
        .build
        .space
        .write_dump(&mut w)
        .context("cannot write vocabulary")
        .data()?;
    w.flush().context("cannot write vocabulary").data()?;

    let r = &state.build.report;
    eprintln!(
        "stance: {} side_a users ({} tweets), {} side_b users ({} tweets), {} unclassified",
        r.side_a_users, r.side_a_tweets, r.side_b_users, r.side_b_tweets, r.unclassified
    );
    let accuracy = match &cfg.paths.truth {
        None => None,
        Some(p) => {
            let truth = load_ground_truth(p).context("ground truth").data()?;
            let sides = truth.into_iter().map(|(k, t)| (k, t.side)).collect();
            let acc = accuracy(&state, &sides);
            println!("accuracy {:.4} ({}/{})", acc.rate(), acc.correct, acc.total);
            Some(acc)
        }
    };
    Ok(PipelineSummary {
        filter,
        classification: state.build.report,
        accuracy,
    })
}

/// Pipeline outputs reloaded from disk, with user vectors rebuilt.
pub struct Reloaded {
    pub corpus: Corpus,
    pub space: VectorSpace,
    pub profiles: Vec<UserProfile>,
    pub features: TweetTrigrams,
}

pub fn reload(cfg: &RunConfig) -> CmdResult<Reloaded> {
    let out = &cfg.paths.out;
    let vocab_path = out.join(VOCAB);
    let f = File::open(&vocab_path)
        .with_context(|| format!("cannot open {} (run `pipeline` first)", vocab_path.display()))
        .data()?;
    let space = VectorSpace::read_dump(BufReader::new(f))
        .with_context(|| format!("cannot read {}", vocab_path.display()))
        .data()?;

    let prof_path = out.join(PROFILES);
    let f = File::open(&prof_path)
        .with_context(|| format!("cannot open {} (run `pipeline` first)", prof_path.display()))
        .data()?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line
            .with_context(|| format!("cannot read {}", prof_path.display()))
            .data()?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ProfileRecord = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: malformed profile", prof_path.display(), i + 1))
            .data()?;
        records.push(rec);
    }

    let (corpus, _) = load_corpus(cfg)?;
    let pipeline = TextPipeline::new(cfg.stoplist()?);
    let features = pipeline.featurize(&corpus, records.iter().map(|r| r.id.as_str()));
    let mut profiles = Vec::with_capacity(records.len());
    for r in records {
        if corpus.account(&r.id).is_none() {
            return Err(Failure::Data(anyhow::anyhow!("profile {} is not in the corpus", r.id)));
        }
        let vector = build_user_vector(&space, features.of_account(&corpus, &r.id));
        profiles.push(UserProfile {
            account_id: r.id,
            stance: r.stance,
            sim_a: r.sim_a,
            sim_b: r.sim_b,
            top_trigrams: r.top_trigrams,
            seed_label: None,
            vector,
        });
    }
    Ok(Reloaded {
        corpus,
        space,
        profiles,
        features,
    })
}

pub fn candidates(cfg: &RunConfig, r: &Reloaded) -> CmdResult<CandidateSet> {
    sample_candidates(
        &r.profiles,
        &r.corpus,
        &r.features,
        &r.space,
        cfg.n_per_stance,
        cfg.seed,
    )
    .context("candidate sampling")
    .data()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrintedItem {
    pub rank: usize,
    pub score: f64,
    pub stance: Side,
    pub tweet_id: String,
    pub text: String,
}

/// Ranked recommendations for one account, formatted as tab-separated rows
/// under a header.
pub fn cmd_recommend(cfg: &RunConfig, account: &str, variant: Variant) -> CmdResult<Vec<PrintedItem>> {
    cfg.validate()?;
    let r = reload(cfg)?;
    if r.corpus.account(account).is_none() {
        return Err(Failure::Data(anyhow::anyhow!("unknown account {account:?}")));
    }
    let Some(user) = r.profiles.iter().find(|p| p.account_id == account) else {
        return Err(Failure::Data(anyhow::anyhow!(
            "account {account:?} has no stance profile (filtered out or unclassified)"
        )));
    };
    let set = candidates(cfg, &r)?;
    let list = recommend(user, &r.space, &set, variant, cfg.k, cfg.ratio, cfg.query_trigrams)
        .context("recommend")
        .data()?;
    Ok(list
        .items
        .iter()
        .enumerate()
        .map(|(i, it)| PrintedItem {
            rank: i + 1,
            score: it.score,
            stance: it.stance,
            tweet_id: it.tweet_id.clone(),
            text: r.corpus.tweet(&it.tweet_id).map(|t| t.text.clone()).unwrap_or_default(),
        })
        .collect())
}

pub fn format_recommendations(items: &[PrintedItem]) -> String {
    let mut s = String::from("rank\tscore\tstance\ttweet_id\ttext\n");
    for it in items {
        let text = it.text.replace(['\t', '\n'], " ");
        s.push_str(&format!(
            "{}\t{:.4}\t{}\t{}\t{}\n",
            it.rank, it.score, it.stance, it.tweet_id, text
        ));
    }
    s
}

/// Runs the evaluation harness and writes the CSV, table, JSON report and
/// per-user recommendation lists.
pub fn cmd_evaluate(cfg: &RunConfig) -> CmdResult<EvaluationRun> {
    cfg.validate()?;
    let r = reload(cfg)?;
    let set = candidates(cfg, &r)?;
    eprintln!(
        "evaluate: {} candidates ({} side_a, {} side_b)",
        set.len(),
        set.count(Side::A),
        set.count(Side::B)
    );
    let run = run_evaluation(&r.profiles, &r.space, &set, &cfg.evaluation())
        .context("evaluation")
        .data()?;
    for (side, s) in Side::BOTH.iter().zip(run.report.users) {
        if s.clamped {
            eprintln!(
                "evaluate: only {} {} users available, evaluating all",
                s.available, side
            );
        }
    }
    let out = &cfg.paths.out;
    ensure_out(cfg)?;
    let mut w = create_file(&out.join(EVALUATION_CSV))?;
    run.report
        .write_csv(&mut w)
        .context("cannot write evaluation csv")
        .data()?;
    w.flush().context("cannot write evaluation csv").data()?;
    let table = run.report.to_table();
    fs::write(out.join(EVALUATION_TABLE), &table)
        .context("cannot write evaluation table")
        .data()?;
    write_json(&out.join(EVALUATION_JSON), &run.report)?;
    let mut w = create_file(&out.join(RECOMMENDATIONS))?;
    for list in &run.lists {
        serde_json::to_writer(&mut w, list)
            .map_err(anyhow::Error::from)
            .and_then(|_| writeln!(w).map_err(Into::into))
            .context("cannot write recommendations")
            .data()?;
    }
    w.flush().context("cannot write recommendations").data()?;
    print!("{table}");
    Ok(run)
}

/// Runs `f` on a dedicated pool of `threads` workers, or the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            if n == 0 {
                bail!("--threads must be at least 1");
            }
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(f))
        }
    }
}
