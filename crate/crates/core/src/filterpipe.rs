//! Account selection: hashtag seed labels, single-group extraction, quartile
//! filtering of managed accounts, and language filtering.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Account, Corpus, Tweet};
use crate::stance::Side;

#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("quartile filter needs at least 4 accounts, got {0}")]
    TooFewAccounts(usize),
    #[error("hashtag set for {0} is empty")]
    EmptyTagSet(Side),
    #[error("hashtag {0:?} is configured for both sides")]
    OverlappingTag(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeedLabel {
    SideA,
    SideB,
    Both,
    Neither,
}

impl SeedLabel {
    pub fn side(self) -> Option<Side> {
        match self {
            SeedLabel::SideA => Some(Side::A),
            SeedLabel::SideB => Some(Side::B),
            SeedLabel::Both | SeedLabel::Neither => None,
        }
    }
}

/// The two disjoint seed tag sets, lowercase and without `#`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHashtagConfig")]
pub struct HashtagConfig {
    side_a: BTreeSet<String>,
    side_b: BTreeSet<String>,
}

#[derive(Deserialize)]
struct RawHashtagConfig {
    side_a: Vec<String>,
    side_b: Vec<String>,
}

impl TryFrom<RawHashtagConfig> for HashtagConfig {
    type Error = FilterError;

    fn try_from(raw: RawHashtagConfig) -> Result<Self, FilterError> {
        HashtagConfig::new(raw.side_a, raw.side_b)
    }
}

fn clean_tags<S: AsRef<str>>(tags: impl IntoIterator<Item = S>) -> BTreeSet<String> {
    tags.into_iter()
        .map(|t| t.as_ref().trim().trim_start_matches('#').to_lowercase())
        .filter(|t| !t.is_empty())
        .collect()
}

impl HashtagConfig {
    pub fn new<S: AsRef<str>>(
        side_a: impl IntoIterator<Item = S>,
        side_b: impl IntoIterator<Item = S>,
    ) -> Result<Self, FilterError> {
        let side_a = clean_tags(side_a);
        let side_b = clean_tags(side_b);
        if side_a.is_empty() {
            return Err(FilterError::EmptyTagSet(Side::A));
        }
        if side_b.is_empty() {
            return Err(FilterError::EmptyTagSet(Side::B));
        }
        if let Some(t) = side_a.intersection(&side_b).next() {
            return Err(FilterError::OverlappingTag(t.clone()));
        }
        Ok(HashtagConfig { side_a, side_b })
    }

    pub fn tags(&self, side: Side) -> &BTreeSet<String> {
        match side {
            Side::A => &self.side_a,
            Side::B => &self.side_b,
        }
    }
}

impl Default for HashtagConfig {
    /// Pro-Trump tags for side A, contra-Trump tags for side B.
    fn default() -> Self {
        HashtagConfig::new(
            [
                "maga",
                "tcot",
                "americafirst",
                "trumptrain",
                "presidenttrump",
                "draintheswamp",
                "fakenews",
                "potus",
                "buildthewall",
                "presidentelecttrump",
            ],
            [
                "impeachtrump",
                "theresistance",
                "nobannowall",
                "resist",
                "trumprussia",
                "impeach45",
                "nottheenemy",
                "resistance",
                "notmypresident",
                "iamamuslimtoo",
                "nobannowallnoraids",
                "fakepresident",
                "dumptrump",
                "trumplies",
            ],
        )
        .expect("default tag sets are valid")
    }
}

pub fn seed_classify<'a>(account_tweets: impl IntoIterator<Item = &'a Tweet>, config: &HashtagConfig) -> SeedLabel {
    let (mut a, mut b) = (false, false);
    for tweet in account_tweets {
        for tag in &tweet.hashtags {
            a |= config.side_a.contains(tag);
            b |= config.side_b.contains(tag);
        }
        if a && b {
            break;
        }
    }
    match (a, b) {
        (true, false) => SeedLabel::SideA,
        (false, true) => SeedLabel::SideB,
        (true, true) => SeedLabel::Both,
        (false, false) => SeedLabel::Neither,
    }
}

/// Accounts whose hashtags come from exactly one side, with that side.
pub fn single_group_filter(corpus: &Corpus, config: &HashtagConfig) -> BTreeMap<String, Side> {
    corpus
        .accounts()
        .filter_map(|acc| {
            seed_classify(corpus.tweets_of(&acc.account_id), config)
                .side()
                .map(|s| (acc.account_id.clone(), s))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccountStat {
    Followers,
    Followees,
    Likes,
    Statuses,
}

impl AccountStat {
    pub const ALL: [AccountStat; 4] = [
        AccountStat::Followers,
        AccountStat::Followees,
        AccountStat::Likes,
        AccountStat::Statuses,
    ];

    pub fn of(self, account: &Account) -> u64 {
        match self {
            AccountStat::Followers => account.followers,
            AccountStat::Followees => account.followees,
            AccountStat::Likes => account.likes,
            AccountStat::Statuses => account.statuses,
        }
    }
}

/// Linear-interpolation quantile between order statistics (Hyndman-Fan
/// type 7). `sorted` must be ascending and non-empty; `p` in `[0, 1]`.
pub fn quantile_linear(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuartileBounds {
    pub q1: f64,
    pub q3: f64,
}

impl QuartileBounds {
    pub fn contains(&self, v: f64) -> bool {
        self.q1 <= v && v <= self.q3
    }
}

/// Q1/Q3 of each statistic, in [`AccountStat::ALL`] order.
pub fn quartile_bounds(accounts: &[Account]) -> Result<[QuartileBounds; 4], FilterError> {
    if accounts.len() < 4 {
        return Err(FilterError::TooFewAccounts(accounts.len()));
    }
    Ok(AccountStat::ALL.map(|stat| {
        let mut v: Vec<f64> = accounts.iter().map(|a| stat.of(a) as f64).collect();
        v.sort_by(f64::total_cmp);
        QuartileBounds {
            q1: quantile_linear(&v, 0.25),
            q3: quantile_linear(&v, 0.75),
        }
    }))
}

/// Keeps accounts whose four statistics all lie within `[Q1, Q3]` of their
/// own distribution. Input order is preserved.
pub fn quartile_filter(accounts: &[Account]) -> Result<Vec<Account>, FilterError> {
    let bounds = quartile_bounds(accounts)?;
    Ok(accounts
        .iter()
        .filter(|a| {
            AccountStat::ALL
                .iter()
                .zip(&bounds)
                .all(|(s, b)| b.contains(s.of(a) as f64))
        })
        .cloned()
        .collect())
}

pub fn language_filter(accounts: &[Account], lang: &str) -> Vec<Account> {
    accounts.iter().filter(|a| a.user_language == lang).cloned().collect()
}

/// Survivor counts after each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub input: usize,
    pub single_group: usize,
    pub quartile: usize,
    pub language: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    /// Seed side of every surviving account.
    pub seed_labels: BTreeMap<String, Side>,
    pub report: StageCounts,
}

impl FilterOutcome {
    pub fn survivors(&self) -> impl Iterator<Item = &str> {
        self.seed_labels.keys().map(String::as_str)
    }
}

/// Single-group, then quartile, then language filtering.
pub fn run_filter_pipeline(corpus: &Corpus, config: &HashtagConfig, lang: &str) -> Result<FilterOutcome, FilterError> {
    let labels = single_group_filter(corpus, config);
    let single: Vec<Account> = labels
        .keys()
        .map(|id| corpus.account(id).expect("label of loaded account").clone())
        .collect();
    let quart = quartile_filter(&single)?;
    let lang_kept = language_filter(&quart, lang);
    let seed_labels: BTreeMap<String, Side> = lang_kept
        .iter()
        .map(|a| (a.account_id.clone(), labels[&a.account_id]))
        .collect();
    Ok(FilterOutcome {
        report: StageCounts {
            input: corpus.n_accounts(),
            single_group: single.len(),
            quartile: quart.len(),
            language: seed_labels.len(),
        },
        seed_labels,
    })
}
