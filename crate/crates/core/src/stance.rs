//! Issue-stance vectors, user profiles and cosine stance classification.
//!
//! Stance vectors come from seed-labeled users only; every filtered user is
//! then (re)classified by comparing their vector to both stance vectors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::textproc::{Trigram, TweetTrigrams};
use crate::vectorspace::{cosine, SparseVector, VectorSpace, VectorSpaceError};

/// Similarities closer than this are a tie. Scaled copies of one count
/// vector normalize to bitwise-different floats, so exact equality is too
/// strict to detect identical stances.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Preference list length.
pub const TOP_TRIGRAMS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "side_a")]
    A,
    #[serde(rename = "side_b")]
    B,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::A, Side::B];

    pub fn opposite(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::A => "side_a",
            Side::B => "side_b",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::A => 0,
            Side::B => 1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "side_a" | "A" | "a" => Ok(Side::A),
            "side_b" | "B" | "b" => Ok(Side::B),
            _ => Err(format!("unknown side {s:?}")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum StanceError {
    #[error("no in-vocabulary trigrams for the {0} stance vector")]
    EmptyStance(Side),
    #[error("no seed-labeled users on {0}")]
    NoSeedUsers(Side),
    #[error("user vector is zero")]
    ZeroUserVector,
    #[error("tie between stances (sim_a = sim_b = {0})")]
    Tie(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StanceProfile {
    pub stance: Side,
    pub vector: SparseVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserProfile {
    pub account_id: String,
    pub stance: Side,
    pub sim_a: f64,
    pub sim_b: f64,
    /// At most [`TOP_TRIGRAMS`] raw-count trigrams, most common first.
    pub top_trigrams: Vec<(Trigram, u32)>,
    pub seed_label: Option<Side>,
    pub vector: SparseVector,
}

impl UserProfile {
    pub fn sim(&self, side: Side) -> f64 {
        match side {
            Side::A => self.sim_a,
            Side::B => self.sim_b,
        }
    }
}

fn pooled_vector<'a>(space: &VectorSpace, tweets: impl IntoIterator<Item = &'a [Trigram]>) -> SparseVector {
    space.tfidf_vector(tweets.into_iter().flatten())
}

/// Pools trigram counts over every tweet of one side's seed users.
pub fn build_stance_vector<'a>(
    space: &VectorSpace,
    side: Side,
    stance_tweets: impl IntoIterator<Item = &'a [Trigram]>,
) -> Result<StanceProfile, StanceError> {
    let vector = pooled_vector(space, stance_tweets);
    if vector.is_zero() {
        return Err(StanceError::EmptyStance(side));
    }
    Ok(StanceProfile { stance: side, vector })
}

/// A user's normalized TF-IDF vector; zero when nothing is in vocabulary.
pub fn build_user_vector<'a>(
    space: &VectorSpace,
    user_tweets: impl IntoIterator<Item = &'a [Trigram]>,
) -> SparseVector {
    pooled_vector(space, user_tweets)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub stance: Side,
    pub sim_a: f64,
    pub sim_b: f64,
}

pub fn classify_user(
    user_vec: &SparseVector,
    profile_a: &StanceProfile,
    profile_b: &StanceProfile,
) -> Result<Classification, StanceError> {
    if user_vec.is_zero() {
        return Err(StanceError::ZeroUserVector);
    }
    let sim_a = cosine(user_vec, &profile_a.vector);
    let sim_b = cosine(user_vec, &profile_b.vector);
    if (sim_a - sim_b).abs() <= TIE_TOLERANCE {
        return Err(StanceError::Tie(sim_a));
    }
    let stance = if sim_a > sim_b { Side::A } else { Side::B };
    Ok(Classification { stance, sim_a, sim_b })
}

/// Most common trigrams by raw count; ties broken lexicographically.
pub fn top_trigrams<'a>(user_tweets: impl IntoIterator<Item = &'a [Trigram]>, k: usize) -> Vec<(Trigram, u32)> {
    let mut counts: HashMap<&Trigram, u32> = HashMap::new();
    for t in user_tweets.into_iter().flatten() {
        *counts.entry(t).or_default() += 1;
    }
    let mut ranked: Vec<(&Trigram, u32)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(k);
    ranked.into_iter().map(|(t, c)| (t.clone(), c)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub side_a_users: usize,
    pub side_a_tweets: usize,
    pub side_b_users: usize,
    pub side_b_tweets: usize,
    pub unclassified: usize,
    pub seed_users_a: usize,
    pub seed_users_b: usize,
    /// Seed users whose cosine stance differs from their seed side.
    pub flips: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileConfig {
    pub min_df: u32,
    pub top_k: usize,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            min_df: 1,
            top_k: TOP_TRIGRAMS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProfileBuild {
    pub space: VectorSpace,
    pub stance_a: StanceProfile,
    pub stance_b: StanceProfile,
    /// Classified users in account-id order.
    pub profiles: Vec<UserProfile>,
    pub unclassified: Vec<String>,
    pub report: ClassificationReport,
}

#[derive(Debug, Error)]
pub enum ProfileBuildError {
    #[error(transparent)]
    Stance(#[from] StanceError),
    #[error(transparent)]
    Space(#[from] VectorSpaceError),
}

/// Full profiling pass over the filtered users: vector space, stance
/// vectors from seed users, user vectors, classification and top trigrams.
///
/// `seed_labels` maps every filtered account to its seed side.
pub fn build_all_profiles(
    corpus: &Corpus,
    features: &TweetTrigrams,
    seed_labels: &BTreeMap<String, Side>,
    config: ProfileConfig,
) -> Result<ProfileBuild, ProfileBuildError> {
    for side in Side::BOTH {
        if !seed_labels.values().any(|&s| s == side) {
            return Err(StanceError::NoSeedUsers(side).into());
        }
    }
    let users: Vec<&String> = seed_labels.keys().collect();
    let docs: Vec<Vec<&Trigram>> = users
        .iter()
        .map(|u| features.of_account(corpus, u).flatten().collect())
        .collect();
    let space = VectorSpace::build(docs.iter().map(|d| d.iter().copied()), config.min_df)?;

    let side_tweets = |side: Side| {
        seed_labels
            .iter()
            .filter(move |&(_, &s)| s == side)
            .flat_map(|(u, _)| features.of_account(corpus, u))
    };
    let stance_a = build_stance_vector(&space, Side::A, side_tweets(Side::A))?;
    let stance_b = build_stance_vector(&space, Side::B, side_tweets(Side::B))?;

    let results: Vec<(String, Result<UserProfile, StanceError>)> = users
        .par_iter()
        .map(|&u| {
            let vector = build_user_vector(&space, features.of_account(corpus, u));
            let res = classify_user(&vector, &stance_a, &stance_b).map(|c| UserProfile {
                account_id: u.clone(),
                stance: c.stance,
                sim_a: c.sim_a,
                sim_b: c.sim_b,
                top_trigrams: top_trigrams(features.of_account(corpus, u), config.top_k),
                seed_label: seed_labels.get(u).copied(),
                vector,
            });
            (u.clone(), res)
        })
        .collect();

    let mut report = ClassificationReport {
        seed_users_a: seed_labels.values().filter(|&&s| s == Side::A).count(),
        seed_users_b: seed_labels.values().filter(|&&s| s == Side::B).count(),
        ..Default::default()
    };
    let mut profiles = Vec::new();
    let mut unclassified = Vec::new();
    for (id, res) in results {
        match res {
            Ok(p) => {
                let n_tweets = corpus.tweet_ids_of(&p.account_id).len();
                match p.stance {
                    Side::A => {
                        report.side_a_users += 1;
                        report.side_a_tweets += n_tweets;
                    }
                    Side::B => {
                        report.side_b_users += 1;
                        report.side_b_tweets += n_tweets;
                    }
                }
                if p.seed_label.is_some_and(|s| s != p.stance) {
                    report.flips += 1;
                }
                profiles.push(p);
            }
            Err(_) => {
                report.unclassified += 1;
                unclassified.push(id);
            }
        }
    }
    Ok(ProfileBuild {
        space,
        stance_a,
        stance_b,
        profiles,
        unclassified,
        report,
    })
}

/// One line of the profile dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub id: String,
    pub stance: Side,
    pub sim_a: f64,
    pub sim_b: f64,
    pub top_trigrams: Vec<(Trigram, u32)>,
}

impl From<&UserProfile> for ProfileRecord {
    fn from(p: &UserProfile) -> Self {
        ProfileRecord {
            id: p.account_id.clone(),
            stance: p.stance,
            sim_a: p.sim_a,
            sim_b: p.sim_b,
            top_trigrams: p.top_trigrams.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Account, IngestMode, Tweet};
    use crate::textproc::TextPipeline;

    fn t(s: &str) -> Trigram {
        Trigram::parse(s).unwrap()
    }

    fn space_of(docs: &[Vec<Trigram>]) -> VectorSpace {
        VectorSpace::build(docs.iter(), 1).unwrap()
    }

    #[test]
    fn single_user_side_equals_user_vector() {
        let tweets = [vec![t("a b c"), t("b c d")], vec![t("a b c")]];
        let other = [vec![t("x y z")]];
        let space = space_of(&[tweets.concat(), other.concat()]);
        let sp = build_stance_vector(&space, Side::A, tweets.iter().map(Vec::as_slice)).unwrap();
        let uv = build_user_vector(&space, tweets.iter().map(Vec::as_slice));
        assert_eq!(sp.vector, uv);
    }

    #[test]
    fn disjoint_sides_are_orthogonal() {
        let a = [vec![t("a b c")]];
        let b = [vec![t("x y z")]];
        let space = space_of(&[a.concat(), b.concat()]);
        let pa = build_stance_vector(&space, Side::A, a.iter().map(Vec::as_slice)).unwrap();
        let pb = build_stance_vector(&space, Side::B, b.iter().map(Vec::as_slice)).unwrap();
        assert_eq!(cosine(&pa.vector, &pb.vector), 0.0);
    }

    #[test]
    fn empty_side_is_error() {
        let space = space_of(&[vec![t("a b c")]]);
        let none: Vec<&[Trigram]> = vec![];
        assert_eq!(
            build_stance_vector(&space, Side::B, none).unwrap_err(),
            StanceError::EmptyStance(Side::B)
        );
    }

    #[test]
    fn stance_counts_equal_flat_recount() {
        // five users, trigram lists per tweet
        let users: Vec<Vec<Vec<Trigram>>> = (0..5)
            .map(|u| {
                (0..3)
                    .map(|k| {
                        (0..(u + k) % 4 + 1)
                            .map(|j| t(&format!("p{} q r", (u * j + k) % 5)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let docs: Vec<Vec<Trigram>> = users.iter().map(|u| u.concat()).collect();
        let space = space_of(&docs);
        let sp = build_stance_vector(&space, Side::A, users.iter().flatten().map(Vec::as_slice)).unwrap();
        let mut flat: BTreeMap<&Trigram, u32> = BTreeMap::new();
        for tri in users.iter().flatten().flatten() {
            *flat.entry(tri).or_default() += 1;
        }
        let raw: Vec<(u32, f64)> = flat
            .iter()
            .map(|(tri, &c)| {
                let i = space.vocabulary().get(tri).unwrap();
                (i, f64::from(c) * space.idf(i))
            })
            .collect();
        let expected = SparseVector::from_pairs(raw).normalized();
        for (&(i, w), &(j, x)) in sp.vector.entries().iter().zip(expected.entries()) {
            assert_eq!(i, j);
            assert!((w - x).abs() < 1e-12);
        }
        assert_eq!(sp.vector.nnz(), expected.nnz());
    }

    #[test]
    fn user_vector_edge_cases() {
        let (a, b) = (t("a b c"), t("d e f"));
        let docs = vec![vec![a.clone(), b.clone()], vec![a.clone(), b.clone()]];
        let space = space_of(&docs);
        let none: Vec<&[Trigram]> = vec![];
        assert!(build_user_vector(&space, none).is_zero());

        // df = n_docs everywhere: idf is exactly 1, so weights are raw counts
        assert_eq!(space.idf(0), 1.0);
        let tweets = [vec![a.clone(), a.clone(), b.clone()]];
        let v = build_user_vector(&space, tweets.iter().map(Vec::as_slice));
        let n = 5f64.sqrt();
        assert!((v.get(0) - 2.0 / n).abs() < 1e-12);
        assert!((v.get(1) - 1.0 / n).abs() < 1e-12);

        // duplicated tweets double tf but normalize to the same vector
        let doubled = [tweets[0].clone(), tweets[0].clone()];
        let v2 = build_user_vector(&space, doubled.iter().map(Vec::as_slice));
        for (x, y) in v.entries().iter().zip(v2.entries()) {
            assert!((x.1 - y.1).abs() < 1e-15);
        }
    }

    #[test]
    fn classify_examples() {
        let pa = StanceProfile {
            stance: Side::A,
            vector: SparseVector::from_pairs([(0, 1.0), (1, 1.0)]).normalized(),
        };
        let pb = StanceProfile {
            stance: Side::B,
            vector: SparseVector::from_pairs([(1, 1.0), (2, 1.0)]).normalized(),
        };
        let c = classify_user(&pa.vector, &pa, &pb).unwrap();
        assert_eq!(c.stance, Side::A);
        assert!((c.sim_a - 1.0).abs() < 1e-12);
        assert!(c.sim_b < 1.0);

        let u = SparseVector::from_pairs([(2, 1.0)]);
        assert_eq!(classify_user(&u, &pa, &pb).unwrap().stance, Side::B);

        let tie = SparseVector::from_pairs([(1, 1.0)]);
        assert!(matches!(classify_user(&tie, &pa, &pb), Err(StanceError::Tie(_))));
        assert_eq!(
            classify_user(&SparseVector::zero(), &pa, &pb).unwrap_err(),
            StanceError::ZeroUserVector
        );
    }

    #[test]
    fn classification_is_scale_invariant() {
        let pa = StanceProfile {
            stance: Side::A,
            vector: SparseVector::from_pairs([(0, 3.0), (1, 1.0)]).normalized(),
        };
        let pb = StanceProfile {
            stance: Side::B,
            vector: SparseVector::from_pairs([(1, 1.0), (2, 2.0)]).normalized(),
        };
        let u = SparseVector::from_pairs([(0, 0.2), (1, 0.7), (2, 0.3)]);
        let base = classify_user(&u, &pa, &pb).unwrap().stance;
        for f in [1e-3, 0.5, 7.0, 1e4] {
            assert_eq!(classify_user(&u.scale(f), &pa, &pb).unwrap().stance, base);
        }
    }

    #[test]
    fn top_trigram_ordering() {
        let (a, b, c) = (t("a x y"), t("b x y"), t("c x y"));
        let tweets = [
            vec![b.clone(), a.clone(), c.clone()],
            vec![b.clone(), a.clone()],
            vec![a.clone(), b.clone()],
        ];
        let top = top_trigrams(tweets.iter().map(Vec::as_slice), 15);
        assert_eq!(top, vec![(a.clone(), 3), (b.clone(), 3), (c.clone(), 1)]);
        let two = [vec![a.clone(), b.clone()]];
        assert_eq!(top_trigrams(two.iter().map(Vec::as_slice), 15).len(), 2);
    }

    #[test]
    fn top_trigrams_match_count_sort_oracle_and_prefix() {
        let tweets: Vec<Vec<Trigram>> = (0..30)
            .map(|i| {
                (0..(i % 5))
                    .map(|j| t(&format!("w{} x y", (i * 7 + j * 3) % 23)))
                    .collect()
            })
            .collect();
        let mut counts: BTreeMap<Trigram, u32> = BTreeMap::new();
        for tri in tweets.iter().flatten() {
            *counts.entry(tri.clone()).or_default() += 1;
        }
        let mut oracle: Vec<(Trigram, u32)> = counts.into_iter().collect();
        // stable sort over lexicographic input keeps lexicographic tie order
        oracle.sort_by_key(|e| std::cmp::Reverse(e.1));
        for k in 0..20 {
            let top = top_trigrams(tweets.iter().map(Vec::as_slice), k);
            assert_eq!(top, oracle[..k.min(oracle.len())]);
            let next = top_trigrams(tweets.iter().map(Vec::as_slice), k + 1);
            assert_eq!(&next[..top.len()], &top[..]);
        }
    }

    fn account(id: &str) -> Account {
        Account {
            account_id: id.into(),
            followers: 1,
            followees: 1,
            likes: 1,
            statuses: 1,
            user_language: "en".into(),
        }
    }

    #[test]
    fn identical_users_are_all_unclassified() {
        let ids = ["u1", "u2", "u3", "u4"];
        let tweets: Vec<Tweet> = ids
            .iter()
            .flat_map(|id| (0..3).map(move |k| Tweet::new(format!("{id}-{k}"), *id, "alpha beta gamma delta epsilon")))
            .collect();
        let (corpus, _) = Corpus::from_parts(ids.map(account), tweets, IngestMode::Strict).unwrap();
        let features = TextPipeline::default().featurize(&corpus, ids);
        let labels: BTreeMap<String, Side> = [("u1", Side::A), ("u2", Side::A), ("u3", Side::A), ("u4", Side::B)]
            .into_iter()
            .map(|(k, s)| (k.to_string(), s))
            .collect();
        let built = build_all_profiles(&corpus, &features, &labels, ProfileConfig::default()).unwrap();
        assert!(built.profiles.is_empty());
        assert_eq!(built.report.unclassified, 4);
        let r = built.report;
        assert_eq!(r.side_a_users + r.side_b_users + r.unclassified, ids.len());
    }

    #[test]
    fn missing_seed_side_is_error() {
        let (corpus, _) =
            Corpus::from_parts([account("u1")], [Tweet::new("t", "u1", "a b c")], IngestMode::Strict).unwrap();
        let features = TextPipeline::default().featurize(&corpus, ["u1"]);
        let labels = BTreeMap::from([("u1".to_string(), Side::A)]);
        let err = build_all_profiles(&corpus, &features, &labels, ProfileConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            ProfileBuildError::Stance(StanceError::NoSeedUsers(Side::B))
        ));
    }
}
