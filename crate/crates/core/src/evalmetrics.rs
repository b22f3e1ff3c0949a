//! Beyond-accuracy metrics and the evaluation harness.
//!
//! - intra-list similarity: mean pairwise cosine of a list's items
//! - diversity: `1 - intra-list similarity` (higher is more diverse)
//! - serendipity: mean `1 - cosine(item, user profile)`
//! - average topic similarity: mean pairwise cosine among a stance's users

use std::fmt::Write as _;
use std::io::Write;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::recommender::{check_params, to_list, CandidateSet, Ranking, RecommendError, RecommendationList, Variant};
use crate::seed::rng_for;
use crate::stance::{Side, UserProfile};
use crate::vectorspace::{cosine, SparseVector, VectorSpace};

pub const DEFAULT_USERS_PER_STANCE: usize = 1_500;
/// Above this many pairs, average topic similarity is estimated from a sample.
pub const DEFAULT_MAX_PAIRS: usize = 2_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("need at least {needed} items, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("user profile vector is zero")]
    ZeroUserVector,
    #[error("no classified users on {0}")]
    NoUsers(Side),
    #[error(transparent)]
    Recommend(#[from] RecommendError),
}

fn need(n: usize, needed: usize) -> Result<(), MetricError> {
    if n < needed {
        Err(MetricError::TooFew { needed, got: n })
    } else {
        Ok(())
    }
}

/// Mean cosine over all unordered pairs.
pub fn intra_list_similarity(items: &[&SparseVector]) -> Result<f64, MetricError> {
    need(items.len(), 2)?;
    let mut sum = 0.0;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            sum += cosine(items[i], items[j]);
        }
    }
    let pairs = items.len() * (items.len() - 1) / 2;
    Ok(sum / pairs as f64)
}

pub fn diversity(items: &[&SparseVector]) -> Result<f64, MetricError> {
    Ok(1.0 - intra_list_similarity(items)?)
}

/// Mean distance of the items from the user's own profile vector.
pub fn serendipity(items: &[&SparseVector], user_vec: &SparseVector) -> Result<f64, MetricError> {
    need(items.len(), 1)?;
    if user_vec.is_zero() {
        return Err(MetricError::ZeroUserVector);
    }
    let total: f64 = items.iter().map(|v| 1.0 - cosine(v, user_vec)).sum();
    Ok(total / items.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopicSimilarity {
    pub value: f64,
    pub pairs: usize,
    pub sampled: bool,
}

/// Maps a linear index in `0..n(n-1)/2` to the pair `(i, j)`, `i < j`,
/// enumerating rows `i = 0, 1, ...`.
fn pair_at(n: usize, mut k: usize) -> (usize, usize) {
    // row i holds n - 1 - i pairs; rows are short enough to walk from an
    // estimate instead of solving the quadratic exactly
    let nf = n as f64;
    let kf = k as f64;
    let disc = (2.0 * nf - 1.0).powi(2) - 8.0 * kf;
    let mut i = (((2.0 * nf - 1.0) - disc.max(0.0).sqrt()) / 2.0).floor().max(0.0) as usize;
    let row_start = |i: usize| i * (2 * n - i - 1) / 2;
    while i > 0 && row_start(i) > k {
        i -= 1;
    }
    while row_start(i + 1) <= k {
        i += 1;
    }
    k -= row_start(i);
    (i, i + 1 + k)
}

/// Mean pairwise cosine among user vectors: exact when the pair count is
/// at most `max_pairs`, otherwise over `max_pairs` distinct seeded pairs.
pub fn avg_topic_similarity(
    user_vectors: &[&SparseVector],
    max_pairs: Option<usize>,
    seed: u64,
) -> Result<TopicSimilarity, MetricError> {
    let n = user_vectors.len();
    need(n, 2)?;
    let total_pairs = n * (n - 1) / 2;
    let limit = max_pairs.unwrap_or(usize::MAX).max(1);
    if total_pairs <= limit {
        // per-row sums in parallel, reduced in row order
        let rows: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                user_vectors[i + 1..]
                    .iter()
                    .map(|v| cosine(user_vectors[i], v))
                    .sum::<f64>()
            })
            .collect();
        let sum: f64 = rows.iter().sum();
        return Ok(TopicSimilarity {
            value: sum / total_pairs as f64,
            pairs: total_pairs,
            sampled: false,
        });
    }
    let mut rng = rng_for(seed, "topic-pairs");
    let mut picks = index::sample(&mut rng, total_pairs, limit).into_vec();
    picks.sort_unstable();
    let sims: Vec<f64> = picks
        .par_iter()
        .map(|&k| {
            let (i, j) = pair_at(n, k);
            cosine(user_vectors[i], user_vectors[j])
        })
        .collect();
    Ok(TopicSimilarity {
        value: sims.iter().sum::<f64>() / limit as f64,
        pairs: limit,
        sampled: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationConfig {
    pub n_users_per_stance: usize,
    pub k: usize,
    pub ratio: f64,
    pub query_trigrams: usize,
    pub seed: u64,
    pub max_pairs: Option<usize>,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            n_users_per_stance: DEFAULT_USERS_PER_STANCE,
            k: crate::recommender::DEFAULT_K,
            ratio: crate::recommender::DEFAULT_HYBRID_RATIO,
            query_trigrams: crate::recommender::DEFAULT_QUERY_TRIGRAMS,
            seed: 0,
            max_pairs: Some(DEFAULT_MAX_PAIRS),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub stance: Side,
    pub variant: Variant,
    /// Mean over users with at least one recommended item.
    pub serendipity: Option<f64>,
    /// Mean over users with at least two recommended items.
    pub diversity: Option<f64>,
    pub n_users: usize,
    pub skipped_serendipity: usize,
    pub skipped_diversity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StanceSample {
    pub available: usize,
    pub evaluated: usize,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    /// Eight rows: stances A then B, variants in [`Variant::ALL`] order.
    pub rows: Vec<ReportRow>,
    pub users: [StanceSample; 2],
    pub topic_similarity: [TopicSimilarity; 2],
    pub seed: u64,
    pub candidates_per_stance: [usize; 2],
    pub k: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    serendipity: f64,
    diversity: f64,
    n_ser: usize,
    n_div: usize,
}

struct UserOutcome {
    lists: Vec<Option<RecommendationList>>,
    metrics: [(Option<f64>, Option<f64>); 4],
}

fn evaluate_user(
    user: &UserProfile,
    space: &VectorSpace,
    candidates: &CandidateSet,
    config: &EvaluationConfig,
) -> UserOutcome {
    let empty = UserOutcome {
        lists: vec![None; 4],
        metrics: [(None, None); 4],
    };
    let Ok(ranking) = Ranking::new(user, space, candidates, config.query_trigrams) else {
        return empty;
    };
    let mut out = empty;
    for (vi, variant) in Variant::ALL.into_iter().enumerate() {
        let picked = ranking.select(variant, config.k, config.ratio);
        let vecs: Vec<&SparseVector> = picked.iter().map(|it| &candidates.get(it.candidate).vector).collect();
        out.metrics[vi] = (serendipity(&vecs, &user.vector).ok(), diversity(&vecs).ok());
        out.lists[vi] = Some(to_list(&user.account_id, variant, config.k, &picked, candidates));
    }
    out
}

/// Everything `run_evaluation` produces: the report plus the per-user lists
/// it was computed from.
#[derive(Debug, Clone)]
pub struct EvaluationRun {
    pub report: EvaluationReport,
    pub lists: Vec<RecommendationList>,
}

/// Samples users per stance, recommends under all four variants and
/// averages serendipity and diversity per (stance, variant).
pub fn run_evaluation(
    profiles: &[UserProfile],
    space: &VectorSpace,
    candidates: &CandidateSet,
    config: &EvaluationConfig,
) -> Result<EvaluationRun, MetricError> {
    check_params(config.k, config.ratio)?;
    let mut rows = Vec::with_capacity(8);
    let mut lists = Vec::new();
    let mut users = [StanceSample {
        available: 0,
        evaluated: 0,
        clamped: false,
    }; 2];
    let mut topic = [TopicSimilarity {
        value: 0.0,
        pairs: 0,
        sampled: false,
    }; 2];

    for side in Side::BOTH {
        let mut pool: Vec<&UserProfile> = profiles.iter().filter(|p| p.stance == side).collect();
        pool.sort_by(|a, b| a.account_id.cmp(&b.account_id));
        if pool.is_empty() {
            return Err(MetricError::NoUsers(side));
        }
        let vectors: Vec<&SparseVector> = pool.iter().map(|p| &p.vector).collect();
        topic[side.index()] = if vectors.len() >= 2 {
            avg_topic_similarity(
                &vectors,
                config.max_pairs,
                crate::seed::derive_seed(config.seed, side.as_str()),
            )?
        } else {
            TopicSimilarity {
                value: 1.0,
                pairs: 0,
                sampled: false,
            }
        };

        let n = config.n_users_per_stance.min(pool.len());
        let mut rng = rng_for(config.seed, &format!("eval-users/{side}"));
        let mut picks = index::sample(&mut rng, pool.len(), n).into_vec();
        picks.sort_unstable();
        users[side.index()] = StanceSample {
            available: pool.len(),
            evaluated: n,
            clamped: n < config.n_users_per_stance,
        };
        let sampled: Vec<&UserProfile> = picks.into_iter().map(|i| pool[i]).collect();

        let outcomes: Vec<UserOutcome> = sampled
            .par_iter()
            .map(|u| evaluate_user(u, space, candidates, config))
            .collect();

        let mut tallies = [Tally::default(); 4];
        for o in outcomes {
            for (t, (s, d)) in tallies.iter_mut().zip(o.metrics) {
                if let Some(s) = s {
                    t.serendipity += s;
                    t.n_ser += 1;
                }
                if let Some(d) = d {
                    t.diversity += d;
                    t.n_div += 1;
                }
            }
            lists.extend(o.lists.into_iter().flatten());
        }
        for (variant, t) in Variant::ALL.into_iter().zip(tallies) {
            rows.push(ReportRow {
                stance: side,
                variant,
                serendipity: (t.n_ser > 0).then(|| t.serendipity / t.n_ser as f64),
                diversity: (t.n_div > 0).then(|| t.diversity / t.n_div as f64),
                n_users: n,
                skipped_serendipity: n - t.n_ser,
                skipped_diversity: n - t.n_div,
            });
        }
    }
    Ok(EvaluationRun {
        report: EvaluationReport {
            rows,
            users,
            topic_similarity: topic,
            seed: config.seed,
            candidates_per_stance: [candidates.count(Side::A), candidates.count(Side::B)],
            k: config.k,
            ratio: config.ratio,
        },
        lists,
    })
}

fn fmt_metric(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.3}"))
}

impl EvaluationReport {
    pub fn row(&self, stance: Side, variant: Variant) -> &ReportRow {
        self.rows
            .iter()
            .find(|r| r.stance == stance && r.variant == variant)
            .expect("report holds every (stance, variant) row")
    }

    /// Aligned, human-readable table.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<8} {:<12} {:>11} {:>9} {:>7} {:>8}",
            "stance", "variant", "serendipity", "diversity", "users", "skipped"
        );
        let _ = writeln!(s, "{}", "-".repeat(60));
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<8} {:<12} {:>11} {:>9} {:>7} {:>8}",
                r.stance.as_str(),
                r.variant.as_str(),
                fmt_metric(r.serendipity),
                fmt_metric(r.diversity),
                r.n_users,
                r.skipped_diversity
            );
        }
        let _ = writeln!(s);
        for side in Side::BOTH {
            let u = self.users[side.index()];
            let t = self.topic_similarity[side.index()];
            let _ = writeln!(
                s,
                "{}: {} of {} users evaluated{}; average topic similarity {:.3} ({} pairs{})",
                side,
                u.evaluated,
                u.available,
                if u.clamped { " (clamped)" } else { "" },
                t.value,
                t.pairs,
                if t.sampled { ", sampled" } else { "" }
            );
        }
        let _ = writeln!(
            s,
            "seed {}; candidates {} + {}; k {}; hybrid ratio {}",
            self.seed, self.candidates_per_stance[0], self.candidates_per_stance[1], self.k, self.ratio
        );
        s
    }

    /// Comma-separated rows: `stance,variant,serendipity,diversity,n_users,n_skipped`.
    /// `n_skipped` counts users without a diversity value, which includes
    /// every user without a serendipity value.
    pub fn write_csv(&self, w: impl Write) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["stance", "variant", "serendipity", "diversity", "n_users", "n_skipped"])?;
        for r in &self.rows {
            let ser = r.serendipity.map_or_else(|| "NA".to_string(), |x| x.to_string());
            let div = r.diversity.map_or_else(|| "NA".to_string(), |x| x.to_string());
            out.write_record([
                r.stance.as_str(),
                r.variant.as_str(),
                &ser,
                &div,
                &r.n_users.to_string(),
                &r.skipped_diversity.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}
