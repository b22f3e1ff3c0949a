//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the verdict lines are always shown.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{evaluate, ok, preset, relocate, stancerec, synth_pipeline};
use stancerec::evalmetrics::{avg_topic_similarity, diversity, intra_list_similarity, serendipity};
use stancerec::filterpipe::{quartile_filter, single_group_filter, AccountStat};
use stancerec::recommender::{hybrid_mix, score_candidates, Candidate, CandidateSet, ScoredItem};
use stancerec::stance::{build_user_vector, classify_user};
use stancerec::textproc::TextPipeline;
use stancerec::vectorspace::cosine;
use stancerec::{Account, Side, SparseVector, Trigram, Variant, VectorSpace};
use stancerec_cli::{
    CLASSIFICATION_REPORT, EVALUATION_CSV, EVALUATION_JSON, EVALUATION_TABLE, FILTER_REPORT, PROFILES, RECOMMENDATIONS,
    VOCAB,
};

const ACCURACY_MIN: f64 = 0.95;
const RUNTIME_MAX_SECS: f64 = 60.0;
const SERENDIPITY_MARGIN: f64 = 0.01;
const TOPIC_GAP_MIN: f64 = 0.10;
const C3_SEEDS: u64 = 3;
const ORACLE_TOL: f64 = 1e-9;
const ORACLE_CASES: usize = 1_000;
const IDENTITY_CASES: usize = 10_000;
const SCORE_SETS: usize = 100;
const SCORE_SET_SIZE: usize = 100;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_vector(rng: &mut ChaCha8Rng, dim: u32, max_nnz: usize) -> SparseVector {
    let nnz = rng.random_range(0..=max_nnz);
    SparseVector::from_pairs((0..nnz).map(|_| (rng.random_range(0..dim), rng.random_range(0.01..5.0))))
}

fn dense(v: &SparseVector, dim: u32) -> Vec<f64> {
    (0..dim).map(|i| v.get(i)).collect()
}

fn dense_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(0.0, 1.0)
    }
}

fn c1_classification() -> Verdict {
    let cfg = preset("balanced");
    let spec = cfg.synth.clone().unwrap();
    ensure(spec.users_per_side.iter().all(|&n| n >= 1000), || {
        "preset below 1000 users/side".into()
    })?;
    ensure(spec.partisan_token_rate >= 0.6, || "partisan rate below 0.6".into())?;
    let start = Instant::now();
    let (sc, state) = synth_pipeline(&cfg);
    // every generated user, classified against the pipeline's stance vectors
    let pipeline = TextPipeline::default();
    let all = pipeline.featurize(&state.corpus, sc.accounts.iter().map(|a| a.account_id.as_str()));
    let mut correct = 0;
    for t in &sc.truth {
        let v = build_user_vector(&state.build.space, all.of_account(&state.corpus, &t.account_id));
        if classify_user(&v, &state.build.stance_a, &state.build.stance_b).is_ok_and(|c| c.stance == t.side) {
            correct += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let rate = correct as f64 / sc.truth.len() as f64;
    let truth: BTreeMap<String, Side> = sc.truth.iter().map(|t| (t.account_id.clone(), t.side)).collect();
    let survivors = stancerec_cli::accuracy(&state, &truth);
    let detail = format!(
        "all users {correct}/{} = {rate:.4}, filtered users {:.4}, {secs:.1}s",
        sc.truth.len(),
        survivors.rate()
    );
    ensure(rate >= ACCURACY_MIN && survivors.rate() >= ACCURACY_MIN, || {
        detail.clone()
    })?;
    ensure(secs < RUNTIME_MAX_SECS, || detail.clone())?;
    Ok(detail)
}

fn c2_serendipity() -> Verdict {
    let mut cfg = preset("balanced");
    cfg.n_per_stance = usize::MAX;
    let (_, state) = synth_pipeline(&cfg);
    let (n, run) = evaluate(&state, &cfg);
    let mut parts = Vec::new();
    for side in Side::BOTH {
        let get = |v: Variant| {
            run.report
                .row(side, v)
                .serendipity
                .ok_or(format!("{side} {v}: no serendipity"))
        };
        let same = get(Variant::only(side))?;
        let opp = get(Variant::only(side.opposite()))?;
        let hyb = get(Variant::Hybrid)?;
        let line = format!("{side}: opposing {opp:.3} hybrid {hyb:.3} same {same:.3}");
        ensure(opp - same >= SERENDIPITY_MARGIN && opp >= hyb && hyb >= same, || {
            line.clone()
        })?;
        parts.push(line);
    }
    Ok(format!("{}; {n}+{n} candidates", parts.join("; ")))
}

fn c3_once(cfg: &stancerec_cli::RunConfig) -> Verdict {
    let (_, state) = synth_pipeline(cfg);
    let (_, run) = evaluate(&state, cfg);
    let r = &run.report;
    let [ta, tb] = [r.topic_similarity[0].value, r.topic_similarity[1].value];
    let div = |s: Side, v: Variant| r.row(s, v).diversity.ok_or(format!("{s} {v}: no diversity"));
    let b_aonly = div(Side::B, Variant::SideAOnly)?;
    let b_hyb = div(Side::B, Variant::Hybrid)?;
    let a_hyb = div(Side::A, Variant::Hybrid)?;
    let a_aonly = div(Side::A, Variant::SideAOnly)?;
    let a_bonly = div(Side::A, Variant::SideBOnly)?;
    let detail = format!(
        "topic sim A {ta:.3} B {tb:.3}; B users: A-only {b_aonly:.3} > hybrid {b_hyb:.3}; \
         A users: hybrid {a_hyb:.3} >= A-only {a_aonly:.3}, B-only {a_bonly:.3}"
    );
    ensure(tb - ta >= TOPIC_GAP_MIN, || detail.clone())?;
    ensure(b_aonly > b_hyb, || detail.clone())?;
    ensure(a_hyb >= a_aonly && a_hyb >= a_bonly, || detail.clone())?;
    Ok(detail)
}

/// The preset corpus plus two more generator seeds, all of which must pass.
fn c3_diversity_asymmetry() -> Verdict {
    let mut cfg = preset("asymmetric");
    cfg.n_per_stance = usize::MAX;
    let base = cfg.synth.as_ref().unwrap().seed;
    let mut first = None;
    for offset in 0..C3_SEEDS {
        let mut c = cfg.clone();
        c.synth.as_mut().unwrap().seed = base + offset;
        let detail = c3_once(&c).map_err(|e| format!("synth seed {}: {e}", base + offset))?;
        first.get_or_insert(detail);
    }
    Ok(format!("{} (and {} more seeds)", first.unwrap(), C3_SEEDS - 1))
}

fn ils_oracle(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..ORACLE_CASES {
        let dim = rng.random_range(1..12);
        let len = rng.random_range(2..10);
        let vecs: Vec<SparseVector> = (0..len).map(|_| random_vector(rng, dim, 5)).collect();
        let d: Vec<Vec<f64>> = vecs.iter().map(|v| dense(v, dim)).collect();
        let mut sum = 0.0;
        let mut pairs = 0;
        for i in 0..len {
            for j in 0..len {
                if i < j {
                    sum += dense_cosine(&d[i], &d[j]);
                    pairs += 1;
                }
            }
        }
        let expect = sum / pairs as f64;
        let refs: Vec<&SparseVector> = vecs.iter().collect();
        let ils = intra_list_similarity(&refs).map_err(|e| e.to_string())?;
        let div = diversity(&refs).map_err(|e| e.to_string())?;
        ensure(
            (ils - expect).abs() <= ORACLE_TOL && (div - (1.0 - expect)).abs() <= ORACLE_TOL,
            || format!("ILS case {case}: {ils} vs oracle {expect}"),
        )?;
    }
    Ok(())
}

fn interpolate(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn quartile_oracle(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..ORACLE_CASES {
        let n = rng.random_range(4..40);
        let spread = if rng.random_bool(0.5) { 5 } else { 10_000 };
        let accounts: Vec<Account> = (0..n)
            .map(|i| Account {
                account_id: format!("a{i:03}"),
                followers: rng.random_range(0..spread),
                followees: rng.random_range(0..spread),
                likes: rng.random_range(0..spread),
                statuses: rng.random_range(0..spread),
                user_language: "en".into(),
            })
            .collect();
        let bounds: Vec<(f64, f64)> = AccountStat::ALL
            .iter()
            .map(|s| {
                let mut v: Vec<f64> = accounts.iter().map(|a| s.of(a) as f64).collect();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                (interpolate(&v, 0.25), interpolate(&v, 0.75))
            })
            .collect();
        let expect: Vec<&str> = accounts
            .iter()
            .filter(|a| {
                AccountStat::ALL.iter().zip(&bounds).all(|(s, &(q1, q3))| {
                    let x = s.of(a) as f64;
                    q1 <= x && x <= q3
                })
            })
            .map(|a| a.account_id.as_str())
            .collect();
        let got = quartile_filter(&accounts).map_err(|e| e.to_string())?;
        let got: Vec<&str> = got.iter().map(|a| a.account_id.as_str()).collect();
        ensure(got == expect, || format!("quartile case {case}: {got:?} vs {expect:?}"))?;
    }
    Ok(())
}

fn tfidf_hand_example() -> Result<(), String> {
    let a = Trigram::parse("a a a").unwrap();
    let b = Trigram::parse("b b b").unwrap();
    let doc1 = [a.clone(), a.clone(), b.clone()];
    let doc2 = [b.clone()];
    let space = VectorSpace::build([doc1.iter(), doc2.iter()], 1).map_err(|e| e.to_string())?;
    let v = space.tfidf_vector(doc1.iter());
    let ia = space.vocabulary().get(&a).unwrap();
    let ib = space.vocabulary().get(&b).unwrap();
    // 2 * (ln(3/2) + 1) and 1 * (ln(3/3) + 1), then unit length
    for (idx, expect) in [(ia, 0.9421556246632359), (ib, 0.33517574332792605)] {
        ensure((v.get(idx) - expect).abs() <= ORACLE_TOL, || {
            format!("tf-idf weight {} vs {expect}", v.get(idx))
        })?;
    }
    Ok(())
}

fn score_oracle(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..SCORE_SETS {
        let dim = rng.random_range(3..30);
        let items: Vec<Candidate> = (0..SCORE_SET_SIZE)
            .map(|i| Candidate {
                tweet_id: format!("t{:04}", rng.random_range(0..10_000) * 1000 + i),
                author: "x".into(),
                stance: if rng.random_bool(0.5) { Side::A } else { Side::B },
                vector: random_vector(rng, dim, 4).normalized(),
            })
            .collect();
        let set = CandidateSet::from_candidates(items, 0);
        let mut query = random_vector(rng, dim, 3);
        if query.is_zero() {
            query = SparseVector::from_pairs([(0, 1.0)]);
        }
        let filter = match rng.random_range(0..3) {
            0 => None,
            1 => Some(Side::A),
            _ => Some(Side::B),
        };
        let q = query.normalized();
        let mut expect: Vec<(String, f64)> = set
            .items()
            .iter()
            .filter(|c| filter.is_none_or(|s| c.stance == s))
            .map(|c| {
                let s: f64 = q.entries().iter().map(|&(t, w)| w * c.vector.get(t)).sum();
                (c.tweet_id.clone(), s.min(1.0))
            })
            .filter(|(_, s)| *s > 0.0)
            .collect();
        expect.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));
        let got: Vec<ScoredItem> = score_candidates(&query, &set, filter).map_err(|e| e.to_string())?;
        let got_ids: Vec<&str> = got.iter().map(|s| set.get(s.candidate).tweet_id.as_str()).collect();
        let exp_ids: Vec<&str> = expect.iter().map(|(t, _)| t.as_str()).collect();
        ensure(got_ids == exp_ids, || format!("ranking case {case} differs"))?;
        for (g, e) in got.iter().zip(&expect) {
            ensure((g.score - e.1).abs() <= ORACLE_TOL, || {
                format!("score case {case}: {} vs {}", g.score, e.1)
            })?;
        }
    }
    Ok(())
}

fn c4_oracles() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    ils_oracle(&mut rng)?;
    quartile_oracle(&mut rng)?;
    tfidf_hand_example()?;
    score_oracle(&mut rng)?;
    Ok(format!(
        "ILS/diversity {ORACLE_CASES} lists, quartile {ORACLE_CASES} sets, tf-idf example, {SCORE_SETS} ranked sets of {SCORE_SET_SIZE}"
    ))
}

fn c5_identities() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let in01 = |x: f64| (0.0..=1.0).contains(&x);
    for case in 0..IDENTITY_CASES {
        let dim = rng.random_range(1..20);
        let len = rng.random_range(2..12);
        let vecs: Vec<SparseVector> = (0..len).map(|_| random_vector(&mut rng, dim, 6)).collect();
        let refs: Vec<&SparseVector> = vecs.iter().collect();
        let ils = intra_list_similarity(&refs).unwrap();
        let div = diversity(&refs).unwrap();
        ensure(div + ils == 1.0, || {
            format!("case {case}: diversity + ILS = {}", div + ils)
        })?;
        let mut user = random_vector(&mut rng, dim, 6);
        if user.is_zero() {
            user = SparseVector::from_pairs([(0, 1.0)]);
        }
        let ser = serendipity(&refs, &user).unwrap();
        let cos = cosine(refs[0], refs[1]);
        let topic = avg_topic_similarity(&refs, Some(rng.random_range(1..60)), case as u64)
            .unwrap()
            .value;
        ensure([ils, div, ser, cos, topic].into_iter().all(in01), || {
            format!("case {case}: metric outside [0,1]: {ils} {div} {ser} {cos} {topic}")
        })?;

        let na = rng.random_range(5..30);
        let nb = rng.random_range(5..30);
        let a: Vec<(Side, usize)> = (0..na).map(|i| (Side::A, i)).collect();
        let b: Vec<(Side, usize)> = (0..nb).map(|i| (Side::B, i)).collect();
        let mixed = hybrid_mix(&a, &b, 10, 0.5);
        let n_a = mixed.iter().filter(|x| x.0 == Side::A).count();
        ensure(mixed.len() == 10 && n_a == 5, || {
            format!("case {case}: hybrid gave {n_a}+{}", mixed.len() - n_a)
        })?;
    }
    Ok(format!("{IDENTITY_CASES} randomized cases"))
}

fn machine_outputs(dir: &std::path::Path) -> BTreeMap<&'static str, Vec<u8>> {
    [
        FILTER_REPORT,
        CLASSIFICATION_REPORT,
        PROFILES,
        VOCAB,
        EVALUATION_CSV,
        EVALUATION_JSON,
        EVALUATION_TABLE,
        RECOMMENDATIONS,
    ]
    .into_iter()
    .map(|f| (f, fs::read(dir.join(f)).unwrap_or_default()))
    .collect()
}

fn c6_determinism() -> Verdict {
    let mut cfg = preset("balanced");
    let spec = cfg.synth.as_mut().unwrap();
    spec.users_per_side = [250, 250];
    cfg.n_per_stance = 1000;
    cfg.n_users = 100;
    let mut runs = Vec::new();
    for threads in ["1", "4", "4"] {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let (_, conf) = relocate(&cfg, dir.path());
        let conf = conf.to_str().unwrap().to_string();
        ok(&stancerec(&["synth", "--config", &conf]));
        ok(&stancerec(&["pipeline", "--config", &conf, "--threads", threads]));
        ok(&stancerec(&["evaluate", "--config", &conf, "--threads", threads]));
        runs.push(machine_outputs(dir.path()));
    }
    for (name, bytes) in &runs[0] {
        ensure(!bytes.is_empty(), || format!("{name} missing"))?;
        for other in &runs[1..] {
            ensure(other[name] == *bytes, || format!("{name} differs between runs"))?;
        }
    }
    Ok(format!(
        "{} files identical over 3 runs (1, 4, 4 threads)",
        runs[0].len()
    ))
}

fn c7_pipeline_shape() -> Verdict {
    let cfg = preset("outliers");
    let (sc, state) = synth_pipeline(&cfg);
    let s = state.filter.report;
    ensure(
        s.input >= s.single_group && s.single_group >= s.quartile && s.quartile >= s.language,
        || format!("stage counts not monotone: {s:?}"),
    )?;
    let single = single_group_filter(&state.corpus, &cfg.hashtags);
    let single_accounts: Vec<Account> = single
        .keys()
        .map(|id| state.corpus.account(id).unwrap().clone())
        .collect();
    let after_quartile = quartile_filter(&single_accounts).map_err(|e| e.to_string())?;
    let planted: Vec<&str> = sc
        .truth
        .iter()
        .filter(|t| t.is_outlier)
        .map(|t| t.account_id.as_str())
        .collect();
    let leaked = after_quartile
        .iter()
        .filter(|a| planted.contains(&a.account_id.as_str()))
        .count();
    ensure(!planted.is_empty() && leaked == 0, || {
        format!("{leaked} of {} planted outliers survived", planted.len())
    })?;

    let mut eval_cfg = cfg.clone();
    eval_cfg.n_per_stance = usize::MAX;
    let (_, run) = evaluate(&state, &eval_cfg);
    ensure(run.report.rows.len() == 8, || {
        format!("{} report rows", run.report.rows.len())
    })?;
    Ok(format!(
        "stages {} >= {} >= {} >= {}; {} planted outliers all removed; 8 report rows",
        s.input,
        s.single_group,
        s.quartile,
        s.language,
        planted.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 classification recovery", c1_classification),
        ("2 serendipity direction", c2_serendipity),
        ("3 diversity asymmetry", c3_diversity_asymmetry),
        ("4 oracle equivalence", c4_oracles),
        ("5 metric identities", c5_identities),
        ("6 determinism", c6_determinism),
        ("7 pipeline shape", c7_pipeline_shape),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        match verdict {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
