#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stancerec::corpus::Corpus;
use stancerec::evalmetrics::{run_evaluation, EvaluationRun};
use stancerec::recommender::sample_candidates;
use stancerec::synthgen::{generate, SynthCorpus};
use stancerec::{EvaluationConfig, IngestMode, Stoplist};
use stancerec_cli::{run_pipeline, PipelineState, RunConfig};

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn preset(name: &str) -> RunConfig {
    RunConfig::load(&workspace_root().join("configs").join(format!("{name}.toml")))
        .unwrap_or_else(|f| panic!("preset {name}: {:#}", f.error()))
}

/// A copy of `cfg` with every path inside `dir`, saved as `dir/run.toml`.
pub fn relocate(cfg: &RunConfig, dir: &Path) -> (RunConfig, PathBuf) {
    let mut c = cfg.clone();
    c.paths.accounts = dir.join("accounts.jsonl");
    c.paths.tweets = dir.join("tweets.jsonl");
    c.paths.truth = Some(dir.join("ground_truth.csv"));
    c.paths.out = dir.to_path_buf();
    let path = dir.join("run.toml");
    std::fs::write(&path, toml::to_string(&c).unwrap()).unwrap();
    (c, path)
}

pub fn stancerec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stancerec"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Generates `cfg.synth` and runs filtering and profiling in memory.
pub fn synth_pipeline(cfg: &RunConfig) -> (SynthCorpus, PipelineState) {
    let spec = cfg.synth.as_ref().expect("preset has a synth section");
    let sc = generate(spec).unwrap();
    let (corpus, ingest) = Corpus::from_parts(sc.accounts.clone(), sc.tweets.clone(), IngestMode::Strict).unwrap();
    let state = run_pipeline(corpus, ingest, cfg, Stoplist::english()).unwrap_or_else(|f| panic!("{:#}", f.error()));
    (sc, state)
}

/// Candidate pools as large as the smaller stance allows, then the full
/// evaluation harness.
pub fn evaluate(state: &PipelineState, cfg: &RunConfig) -> (usize, EvaluationRun) {
    let r = &state.build.report;
    let n = r.side_a_tweets.min(r.side_b_tweets).min(cfg.n_per_stance.max(1));
    let set = sample_candidates(
        &state.build.profiles,
        &state.corpus,
        &state.features,
        &state.build.space,
        n,
        cfg.seed,
    )
    .unwrap();
    let ec = EvaluationConfig {
        n_users_per_stance: cfg.n_users,
        k: cfg.k,
        ratio: cfg.ratio,
        query_trigrams: cfg.query_trigrams,
        seed: cfg.seed,
        max_pairs: cfg.max_pairs,
    };
    (
        n,
        run_evaluation(&state.build.profiles, &state.build.space, &set, &ec).unwrap(),
    )
}
