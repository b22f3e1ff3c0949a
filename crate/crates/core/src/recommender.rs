//! Candidate sampling and the four content-based recommendation variants.
//!
//! A user's query is built from their top trigram(s) and scored by cosine
//! against a seeded per-stance sample of tweets. Scoring goes through an
//! inverted index over the candidate vectors, so only candidates sharing a
//! query trigram are touched.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::seed::rng_for;
use crate::stance::{Side, UserProfile};
use crate::textproc::TweetTrigrams;
use crate::vectorspace::{SparseVector, VectorSpace};

pub const DEFAULT_CANDIDATES_PER_STANCE: usize = 50_000;
pub const DEFAULT_K: usize = 10;
pub const DEFAULT_HYBRID_RATIO: f64 = 0.5;
pub const DEFAULT_QUERY_TRIGRAMS: usize = 1;

#[derive(Debug, Error, PartialEq)]
pub enum RecommendError {
    #[error("{side} pool has {available} tweets, {requested} requested")]
    InsufficientPool {
        side: Side,
        available: usize,
        requested: usize,
    },
    #[error("query vector is zero (no in-vocabulary top trigram)")]
    ZeroQuery,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("hybrid ratio {0} is outside [0, 1]")]
    BadRatio(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Standard,
    SideAOnly,
    SideBOnly,
    Hybrid,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Standard,
        Variant::SideAOnly,
        Variant::SideBOnly,
        Variant::Hybrid,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::SideAOnly => "side_a_only",
            Variant::SideBOnly => "side_b_only",
            Variant::Hybrid => "hybrid",
        }
    }

    pub fn only(side: Side) -> Variant {
        match side {
            Side::A => Variant::SideAOnly,
            Side::B => Variant::SideBOnly,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown variant {s:?} (expected standard, side_a_only, side_b_only or hybrid)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub tweet_id: String,
    pub author: String,
    pub stance: Side,
    /// Unit length, or zero when the tweet has no in-vocabulary trigram.
    pub vector: SparseVector,
}

/// Seeded candidate sample, ordered by tweet id, with an inverted index.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    items: Vec<Candidate>,
    counts: [usize; 2],
    seed: u64,
    postings: HashMap<u32, Vec<(u32, f64)>>,
}

impl CandidateSet {
    /// Builds a set directly from candidates (sorted here by tweet id).
    pub fn from_candidates(mut items: Vec<Candidate>, seed: u64) -> Self {
        items.sort_by(|a, b| a.tweet_id.cmp(&b.tweet_id));
        let mut counts = [0; 2];
        let mut postings: HashMap<u32, Vec<(u32, f64)>> = HashMap::new();
        for (pos, c) in items.iter().enumerate() {
            counts[c.stance.index()] += 1;
            for &(term, w) in c.vector.entries() {
                postings.entry(term).or_default().push((pos as u32, w));
            }
        }
        CandidateSet {
            items,
            counts,
            seed,
            postings,
        }
    }

    pub fn items(&self) -> &[Candidate] {
        &self.items
    }

    pub fn get(&self, pos: usize) -> &Candidate {
        &self.items[pos]
    }

    pub fn count(&self, side: Side) -> usize {
        self.counts[side.index()]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Samples `n_per_stance` tweets uniformly without replacement from each
/// stance's pool (all tweets of users classified into it).
pub fn sample_candidates(
    profiles: &[UserProfile],
    corpus: &Corpus,
    features: &TweetTrigrams,
    space: &VectorSpace,
    n_per_stance: usize,
    seed: u64,
) -> Result<CandidateSet, RecommendError> {
    let mut chosen: Vec<(&String, &str, Side)> = Vec::new();
    for side in Side::BOTH {
        let mut pool: Vec<(&String, &str)> = profiles
            .iter()
            .filter(|p| p.stance == side)
            .flat_map(|p| {
                corpus
                    .tweet_ids_of(&p.account_id)
                    .iter()
                    .map(|t| (t, p.account_id.as_str()))
            })
            .collect();
        pool.sort_unstable();
        if pool.len() < n_per_stance {
            return Err(RecommendError::InsufficientPool {
                side,
                available: pool.len(),
                requested: n_per_stance,
            });
        }
        let mut rng = rng_for(seed, &format!("candidates/{side}"));
        let mut picks = index::sample(&mut rng, pool.len(), n_per_stance).into_vec();
        picks.sort_unstable();
        chosen.extend(picks.into_iter().map(|i| (pool[i].0, pool[i].1, side)));
    }
    let items: Vec<Candidate> = chosen
        .par_iter()
        .map(|&(tweet_id, author, stance)| Candidate {
            tweet_id: tweet_id.clone(),
            author: author.to_string(),
            stance,
            vector: space.tfidf_vector(features.get(tweet_id).unwrap_or(&[])),
        })
        .collect();
    Ok(CandidateSet::from_candidates(items, seed))
}

/// Query from the user's `q` most common trigrams, each weighted by its
/// idf, L2-normalized. Out-of-vocabulary trigrams are skipped.
pub fn query_vector(user: &UserProfile, space: &VectorSpace, q: usize) -> SparseVector {
    SparseVector::from_pairs(
        user.top_trigrams
            .iter()
            .take(q)
            .filter_map(|(t, _)| space.vocabulary().get(t))
            .map(|i| (i, space.idf(i))),
    )
    .normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredItem {
    /// Position in the candidate set.
    pub candidate: usize,
    pub score: f64,
    pub stance: Side,
}

fn by_score_then_id(a: &ScoredItem, b: &ScoredItem) -> std::cmp::Ordering {
    // candidate positions follow tweet-id order
    b.score.total_cmp(&a.score).then(a.candidate.cmp(&b.candidate))
}

/// Cosine of a unit query against every (filtered) candidate, descending,
/// ties by tweet id. Zero-score candidates are left out.
pub fn score_candidates(
    query: &SparseVector,
    candidates: &CandidateSet,
    stance_filter: Option<Side>,
) -> Result<Vec<ScoredItem>, RecommendError> {
    if query.is_zero() {
        return Err(RecommendError::ZeroQuery);
    }
    let query = query.normalized();
    let mut acc: HashMap<u32, f64> = HashMap::new();
    for &(term, qw) in query.entries() {
        if let Some(list) = candidates.postings.get(&term) {
            for &(pos, w) in list {
                *acc.entry(pos).or_default() += qw * w;
            }
        }
    }
    let mut scored: Vec<ScoredItem> = acc
        .into_iter()
        .filter(|&(_, s)| s > 0.0)
        .map(|(pos, score)| ScoredItem {
            candidate: pos as usize,
            score: score.min(1.0),
            stance: candidates.items[pos as usize].stance,
        })
        .filter(|it| stance_filter.is_none_or(|s| it.stance == s))
        .collect();
    scored.sort_unstable_by(by_score_then_id);
    Ok(scored)
}

/// Takes `round(ratio * k)` items from `ranked_a` and the rest from
/// `ranked_b`, side-A block first. A short side is backfilled from the
/// other side's remaining items.
pub fn hybrid_mix<T: Clone>(ranked_a: &[T], ranked_b: &[T], k: usize, ratio: f64) -> Vec<T> {
    let want_a = ((ratio.clamp(0.0, 1.0) * k as f64).round() as usize).min(k);
    let want_b = k - want_a;
    let mut take_a = want_a.min(ranked_a.len());
    let mut take_b = want_b.min(ranked_b.len());
    if take_a < want_a {
        take_b = (k - take_a).min(ranked_b.len());
    } else if take_b < want_b {
        take_a = (k - take_b).min(ranked_a.len());
    }
    ranked_a[..take_a].iter().chain(&ranked_b[..take_b]).cloned().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendedItem {
    pub tweet_id: String,
    pub score: f64,
    pub stance: Side,
    #[serde(skip)]
    pub candidate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationList {
    pub account_id: String,
    pub variant: Variant,
    pub k: usize,
    pub items: Vec<RecommendedItem>,
}

/// Full ranking of a user's query, own tweets removed; every variant is a
/// selection from it.
#[derive(Debug, Clone)]
pub struct Ranking {
    all: Vec<ScoredItem>,
}

impl Ranking {
    pub fn new(
        user: &UserProfile,
        space: &VectorSpace,
        candidates: &CandidateSet,
        q: usize,
    ) -> Result<Self, RecommendError> {
        let query = query_vector(user, space, q);
        let mut all = score_candidates(&query, candidates, None)?;
        all.retain(|it| candidates.get(it.candidate).author != user.account_id);
        Ok(Ranking { all })
    }

    fn side(&self, side: Side) -> Vec<ScoredItem> {
        self.all.iter().filter(|it| it.stance == side).copied().collect()
    }

    pub fn select(&self, variant: Variant, k: usize, ratio: f64) -> Vec<ScoredItem> {
        match variant {
            Variant::Standard => self.all.iter().take(k).copied().collect(),
            Variant::SideAOnly => self.side(Side::A).into_iter().take(k).collect(),
            Variant::SideBOnly => self.side(Side::B).into_iter().take(k).collect(),
            Variant::Hybrid => hybrid_mix(&self.side(Side::A), &self.side(Side::B), k, ratio),
        }
    }
}

pub fn to_list(
    user: &str,
    variant: Variant,
    k: usize,
    items: &[ScoredItem],
    candidates: &CandidateSet,
) -> RecommendationList {
    RecommendationList {
        account_id: user.to_string(),
        variant,
        k,
        items: items
            .iter()
            .map(|it| RecommendedItem {
                tweet_id: candidates.get(it.candidate).tweet_id.clone(),
                score: it.score,
                stance: it.stance,
                candidate: it.candidate,
            })
            .collect(),
    }
}

pub fn check_params(k: usize, ratio: f64) -> Result<(), RecommendError> {
    if k < 1 {
        return Err(RecommendError::ZeroK);
    }
    if !(0.0..=1.0).contains(&ratio) {
        return Err(RecommendError::BadRatio(ratio));
    }
    Ok(())
}

/// Recommends up to `k` candidates to `user` under `variant`.
pub fn recommend(
    user: &UserProfile,
    space: &VectorSpace,
    candidates: &CandidateSet,
    variant: Variant,
    k: usize,
    ratio: f64,
    q: usize,
) -> Result<RecommendationList, RecommendError> {
    check_params(k, ratio)?;
    let ranking = Ranking::new(user, space, candidates, q)?;
    Ok(to_list(
        &user.account_id,
        variant,
        k,
        &ranking.select(variant, k, ratio),
        candidates,
    ))
}
