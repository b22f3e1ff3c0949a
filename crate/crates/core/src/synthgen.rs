//! Seeded generator of two-community tweet corpora.
//!
//! Vocabulary comes in three token pools: tokens exclusive to side A,
//! tokens exclusive to side B, and shared tokens. Tokens are grouped into
//! three-token phrases:
//!
//! - *issue phrases* are built from shared tokens; both sides discuss them
//! - *framing phrases* are built from a side's exclusive tokens, a fixed set
//!   per (side, issue)
//!
//! A tweet picks an issue from its author's side-specific Zipf ranking and
//! fills `phrases_per_tweet` slots. Slots are drawn so that on average a
//! `partisan_token_rate` fraction of tokens is side-exclusive, with the
//! shared share spent on the issue phrase first. Framings within an issue
//! are picked with a second per-side Zipf exponent. Larger exponents
//! concentrate a side on fewer issues and fewer framings.
//!
//! Issue rankings either follow one shuffled common agenda, optionally with
//! a per-side block of focus issues moved to the front, or are shuffled
//! independently per side.
//!
//! Stopword fillers, URLs, mentions and seed hashtags are mixed into the
//! text; account statistics are drawn from a shared latent activity level
//! so the four statistics are correlated, with optional planted outliers.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{write_accounts, write_tweets, Account, CorpusError, Tweet};
use crate::filterpipe::HashtagConfig;
use crate::seed::rng_for;
use crate::stance::Side;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synth spec: {0}")]
    Invalid(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("ground truth {path}: {message}")]
    Truth { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenPools {
    pub exclusive_a: usize,
    pub exclusive_b: usize,
    pub shared: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HashtagPlan {
    pub side_a: Vec<String>,
    pub side_b: Vec<String>,
    /// Per-tweet probability of an own-side seed tag.
    pub tag_rate: f64,
    /// Fraction of users who also use opposing tags; per tweet they do so
    /// with probability `tag_rate * (1 - partisan_token_rate)`.
    pub cross_tag_users: f64,
    /// Fraction of users who never use seed tags.
    pub silent_users: f64,
}

impl Default for HashtagPlan {
    fn default() -> Self {
        let cfg = HashtagConfig::default();
        HashtagPlan {
            side_a: cfg.tags(Side::A).iter().cloned().collect(),
            side_b: cfg.tags(Side::B).iter().cloned().collect(),
            tag_rate: 0.3,
            cross_tag_users: 0.1,
            silent_users: 0.1,
        }
    }
}

/// Inclusive `[min, max]` range of one account statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatPlan {
    pub followers: [u64; 2],
    pub followees: [u64; 2],
    pub likes: [u64; 2],
    pub statuses: [u64; 2],
    /// Per-statistic deviation from the account's latent activity level.
    pub jitter: f64,
}

impl Default for StatPlan {
    fn default() -> Self {
        StatPlan {
            followers: [50, 5_000],
            followees: [50, 2_000],
            likes: [100, 20_000],
            statuses: [500, 50_000],
            jitter: 0.1,
        }
    }
}

impl StatPlan {
    fn ranges(&self) -> [[u64; 2]; 4] {
        [self.followers, self.followees, self.likes, self.statuses]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSpec {
    pub seed: u64,
    pub users_per_side: [usize; 2],
    pub tweets_per_user: [usize; 2],
    pub phrases_per_tweet: [usize; 2],
    pub pools: TokenPools,
    pub issues: usize,
    pub framings_per_issue: usize,
    /// Zipf exponent of issue choice, per side.
    pub zipf_exponent: [f64; 2],
    /// Zipf exponent of framing choice within an issue, per side.
    pub framing_exponent: [f64; 2],
    /// Both sides rank issues in the same order (one news agenda); when
    /// false each side gets its own random issue ranking.
    pub common_agenda: bool,
    /// Per side, how many issues from the bottom of the common agenda the
    /// side promotes to the top of its own ranking (side A takes the very
    /// last ones, side B the block above them). Ignored without a common
    /// agenda.
    pub focus_issues: [usize; 2],
    pub partisan_token_rate: f64,
    pub stopword_rate: f64,
    pub url_rate: f64,
    pub mention_rate: f64,
    pub hashtags: HashtagPlan,
    pub stats: StatPlan,
    pub non_english_fraction: f64,
    pub outlier_fraction: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 1,
            users_per_side: [200, 200],
            tweets_per_user: [20, 40],
            phrases_per_tweet: [2, 4],
            pools: TokenPools {
                exclusive_a: 3_000,
                exclusive_b: 3_000,
                shared: 600,
            },
            issues: 40,
            framings_per_issue: 30,
            zipf_exponent: [1.0, 1.0],
            framing_exponent: [1.0, 1.0],
            common_agenda: true,
            focus_issues: [0, 0],
            partisan_token_rate: 0.6,
            stopword_rate: 0.3,
            url_rate: 0.1,
            mention_rate: 0.1,
            hashtags: HashtagPlan::default(),
            stats: StatPlan::default(),
            non_english_fraction: 0.1,
            outlier_fraction: 0.0,
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), SynthError> {
    if cond {
        Ok(())
    } else {
        Err(SynthError::Invalid(msg()))
    }
}

fn check_rate(name: &str, v: f64) -> Result<(), SynthError> {
    check((0.0..=1.0).contains(&v), || format!("{name} = {v} is outside [0, 1]"))
}

fn check_range(name: &str, r: [usize; 2]) -> Result<(), SynthError> {
    check(r[0] >= 1 && r[0] <= r[1], || {
        format!("{name} = {r:?} needs 1 <= min <= max")
    })
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        for (i, n) in self.users_per_side.iter().enumerate() {
            check(*n >= 1, || format!("users_per_side[{i}] must be at least 1"))?;
        }
        check_range("tweets_per_user", self.tweets_per_user)?;
        check_range("phrases_per_tweet", self.phrases_per_tweet)?;
        let p = &self.pools;
        for (name, n) in [
            ("exclusive_a", p.exclusive_a),
            ("exclusive_b", p.exclusive_b),
            ("shared", p.shared),
        ] {
            check(n >= 3, || format!("pools.{name} = {n}; phrases need at least 3 tokens"))?;
        }
        check(self.issues >= 1, || "issues must be at least 1".into())?;
        check(self.focus_issues[0] + self.focus_issues[1] <= self.issues, || {
            format!("focus_issues {:?} exceed the {} issues", self.focus_issues, self.issues)
        })?;
        check(self.framings_per_issue >= 1, || {
            "framings_per_issue must be at least 1".into()
        })?;
        for (name, exps) in [
            ("zipf_exponent", self.zipf_exponent),
            ("framing_exponent", self.framing_exponent),
        ] {
            for (i, s) in exps.iter().enumerate() {
                check(s.is_finite() && *s >= 0.0, || {
                    format!("{name}[{i}] = {s} must be finite and >= 0")
                })?;
            }
        }
        check_rate("partisan_token_rate", self.partisan_token_rate)?;
        check_rate("stopword_rate", self.stopword_rate)?;
        check_rate("url_rate", self.url_rate)?;
        check_rate("mention_rate", self.mention_rate)?;
        check_rate("hashtags.tag_rate", self.hashtags.tag_rate)?;
        check_rate("hashtags.cross_tag_users", self.hashtags.cross_tag_users)?;
        check_rate("hashtags.silent_users", self.hashtags.silent_users)?;
        check(
            self.hashtags.cross_tag_users + self.hashtags.silent_users <= 1.0,
            || "hashtags.cross_tag_users + hashtags.silent_users exceeds 1".into(),
        )?;
        HashtagConfig::new(&self.hashtags.side_a, &self.hashtags.side_b)
            .map_err(|e| SynthError::Invalid(format!("hashtags: {e}")))?;
        for (name, [lo, hi]) in ["followers", "followees", "likes", "statuses"]
            .iter()
            .zip(self.stats.ranges())
        {
            check(lo >= 1 && lo <= hi, || {
                format!("stats.{name} = [{lo}, {hi}] needs 1 <= min <= max")
            })?;
        }
        check_rate("stats.jitter", self.stats.jitter)?;
        check_rate("non_english_fraction", self.non_english_fraction)?;
        check((0.0..0.5).contains(&self.outlier_fraction), || {
            format!("outlier_fraction = {} is outside [0, 0.5)", self.outlier_fraction)
        })?;
        Ok(())
    }

    pub fn total_users(&self) -> usize {
        self.users_per_side[0] + self.users_per_side[1]
    }
}

/// Returns `spec` with `fraction` of all accounts marked as statistical
/// outliers. Fraction 0 leaves the spec untouched.
pub fn plant_outliers(spec: &SynthSpec, fraction: f64) -> Result<SynthSpec, SynthError> {
    check((0.0..0.5).contains(&fraction), || {
        format!("outlier fraction {fraction} is outside [0, 0.5)")
    })?;
    let mut out = spec.clone();
    if fraction > 0.0 {
        out.outlier_fraction = fraction;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenPool {
    ExclusiveA,
    ExclusiveB,
    Shared,
}

impl TokenPool {
    fn prefix(self) -> &'static str {
        match self {
            TokenPool::ExclusiveA => "pa",
            TokenPool::ExclusiveB => "co",
            TokenPool::Shared => "mi",
        }
    }

    pub fn exclusive(side: Side) -> TokenPool {
        match side {
            Side::A => TokenPool::ExclusiveA,
            Side::B => TokenPool::ExclusiveB,
        }
    }
}

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";
const SYLLABLES: usize = 3;

/// The `i`-th synthetic word of a pool: a two-letter pool prefix followed
/// by three consonant-vowel syllables.
pub fn synth_word(pool: TokenPool, i: usize) -> String {
    let mut w = String::from(pool.prefix());
    let base = CONSONANTS.len() * VOWELS.len();
    // 7919 is prime and coprime to 70^3, so this permutes the word space
    let space = base.pow(SYLLABLES as u32);
    let mut i = (i % space * 7919 + 1) % space;
    for _ in 0..SYLLABLES {
        let s = i % base;
        i /= base;
        w.push(CONSONANTS[s / VOWELS.len()] as char);
        w.push(VOWELS[s % VOWELS.len()] as char);
    }
    w
}

/// The pool a generated word belongs to, if it is a generated word.
pub fn pool_of_token(token: &str) -> Option<TokenPool> {
    if token.len() != 2 + 2 * SYLLABLES {
        return None;
    }
    let body = &token.as_bytes()[2..];
    let well_formed = body
        .chunks(2)
        .all(|c| CONSONANTS.contains(&c[0]) && VOWELS.contains(&c[1]));
    if !well_formed {
        return None;
    }
    [TokenPool::ExclusiveA, TokenPool::ExclusiveB, TokenPool::Shared]
        .into_iter()
        .find(|p| token.starts_with(p.prefix()))
}

// All in the bundled English stoplist.
const FILLERS: &[&str] = &[
    "the", "will", "and", "of", "to", "is", "this", "we", "they", "not", "just", "so",
];
const OTHER_LANGS: &[&str] = &["de", "es", "fr", "pt"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub account_id: String,
    pub side: Side,
    pub is_outlier: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub accounts: Vec<Account>,
    pub tweets: Vec<Tweet>,
    pub truth: Vec<TruthRecord>,
}

pub const ACCOUNTS_FILE: &str = "accounts.jsonl";
pub const TWEETS_FILE: &str = "tweets.jsonl";
pub const TRUTH_FILE: &str = "ground_truth.csv";

impl SynthCorpus {
    /// Writes `accounts.jsonl`, `tweets.jsonl` and `ground_truth.csv`.
    pub fn write_to(&self, dir: &Path) -> Result<(), SynthError> {
        fs::create_dir_all(dir).map_err(|source| SynthError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        write_accounts(&dir.join(ACCOUNTS_FILE), &self.accounts)?;
        write_tweets(&dir.join(TWEETS_FILE), &self.tweets)?;
        let truth_path = dir.join(TRUTH_FILE);
        let io_err = |e: csv::Error| SynthError::Truth {
            path: truth_path.display().to_string(),
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_path(&truth_path).map_err(io_err)?;
        w.write_record(["account_id", "side", "is_outlier"]).map_err(io_err)?;
        for t in &self.truth {
            w.write_record([
                t.account_id.as_str(),
                t.side.as_str(),
                if t.is_outlier { "true" } else { "false" },
            ])
            .map_err(io_err)?;
        }
        w.flush().map_err(|source| SynthError::Io {
            path: truth_path.display().to_string(),
            source,
        })
    }

    pub fn truth_map(&self) -> BTreeMap<String, TruthRecord> {
        self.truth.iter().map(|t| (t.account_id.clone(), t.clone())).collect()
    }
}

pub fn load_ground_truth(path: &Path) -> Result<BTreeMap<String, TruthRecord>, SynthError> {
    let err = |message: String| SynthError::Truth {
        path: path.display().to_string(),
        message,
    };
    let mut r = csv::Reader::from_path(path).map_err(|e| err(e.to_string()))?;
    let mut out = BTreeMap::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| err(e.to_string()))?;
        if rec.len() != 3 {
            return Err(err(format!("expected 3 fields, got {}", rec.len())));
        }
        let side: Side = rec[1].parse().map_err(err)?;
        let is_outlier = match &rec[2] {
            "true" => true,
            "false" => false,
            other => return Err(err(format!("bad is_outlier value {other:?}"))),
        };
        out.insert(
            rec[0].to_string(),
            TruthRecord {
                account_id: rec[0].to_string(),
                side,
                is_outlier,
            },
        );
    }
    Ok(out)
}

type Phrase = [String; 3];

fn make_phrases(rng: &mut ChaCha8Rng, pool: TokenPool, pool_size: usize, count: usize) -> Vec<Phrase> {
    (0..count)
        .map(|_| {
            let idx = index::sample(rng, pool_size, 3).into_vec();
            [
                synth_word(pool, idx[0]),
                synth_word(pool, idx[1]),
                synth_word(pool, idx[2]),
            ]
        })
        .collect()
}

/// Zipf rank sampler over a permuted list of `n` items.
struct RankedChoice {
    order: Vec<usize>,
    zipf: Zipf<f64>,
}

fn shuffled(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

impl RankedChoice {
    fn new(rng: &mut ChaCha8Rng, n: usize, exponent: f64) -> Self {
        let order = shuffled(rng, n);
        Self::with_order(order, exponent)
    }

    fn with_order(order: Vec<usize>, exponent: f64) -> Self {
        let n = order.len();
        RankedChoice {
            order,
            zipf: Zipf::new(n as f64, exponent).expect("validated zipf parameters"),
        }
    }

    fn pick(&self, rng: &mut ChaCha8Rng) -> usize {
        let rank = self.zipf.sample(rng) as usize;
        self.order[rank.clamp(1, self.order.len()) - 1]
    }
}

/// The common agenda with the side's focus block moved to the front.
fn side_ranking(agenda: &[usize], focus: [usize; 2], side: Side) -> Vec<usize> {
    let n = agenda.len();
    let (start, end) = match side {
        Side::A => (n - focus[0], n),
        Side::B => (n - focus[0] - focus[1], n - focus[0]),
    };
    agenda[start..end]
        .iter()
        .chain(&agenda[..start])
        .chain(&agenda[end..])
        .copied()
        .collect()
}

struct SideModel {
    issues: RankedChoice,
    /// Framing phrases per issue, with their rank sampler.
    framings: Vec<(Vec<Phrase>, RankedChoice)>,
}

#[derive(Clone, Copy)]
enum TagHabit {
    OwnOnly,
    Cross,
    Silent,
}

/// Generates a corpus; identical specs give identical output.
pub fn generate(spec: &SynthSpec) -> Result<SynthCorpus, SynthError> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed, "synthgen");

    let issue_phrases = make_phrases(&mut rng, TokenPool::Shared, spec.pools.shared, spec.issues);
    let agenda = shuffled(&mut rng, spec.issues);
    let models: Vec<SideModel> = Side::BOTH
        .iter()
        .map(|&side| {
            let size = match side {
                Side::A => spec.pools.exclusive_a,
                Side::B => spec.pools.exclusive_b,
            };
            let exponent = spec.zipf_exponent[side.index()];
            let issues = if spec.common_agenda {
                RankedChoice::with_order(side_ranking(&agenda, spec.focus_issues, side), exponent)
            } else {
                RankedChoice::new(&mut rng, spec.issues, exponent)
            };
            let framings = (0..spec.issues)
                .map(|_| {
                    let phrases = make_phrases(&mut rng, TokenPool::exclusive(side), size, spec.framings_per_issue);
                    let choice =
                        RankedChoice::new(&mut rng, spec.framings_per_issue, spec.framing_exponent[side.index()]);
                    (phrases, choice)
                })
                .collect();
            SideModel { issues, framings }
        })
        .collect();

    let n_users = spec.total_users();
    let mut sides: Vec<Side> = std::iter::repeat_n(Side::A, spec.users_per_side[0])
        .chain(std::iter::repeat_n(Side::B, spec.users_per_side[1]))
        .collect();
    sides.shuffle(&mut rng);
    let ids: Vec<String> = (0..n_users).map(|i| format!("u{i:05}")).collect();

    let n_outliers = (spec.outlier_fraction * n_users as f64).round() as usize;
    let mut outlier_idx = index::sample(&mut rng, n_users, n_outliers).into_vec();
    outlier_idx.sort_unstable();
    // first half (rounded up) gets extreme high statistics, the rest extreme low
    let high_cut = n_outliers.div_ceil(2);
    let outlier_kind: BTreeMap<usize, bool> = outlier_idx
        .iter()
        .enumerate()
        .map(|(rank, &i)| (i, rank < high_cut))
        .collect();

    let mut accounts = Vec::with_capacity(n_users);
    let mut truth = Vec::with_capacity(n_users);
    let mut tweets = Vec::new();
    let mut tweet_counter = 0usize;

    for (u, (id, &side)) in ids.iter().zip(&sides).enumerate() {
        let model = &models[side.index()];
        let level: f64 = rng.random();
        let mut stats = [0u64; 4];
        for (slot, [lo, hi]) in stats.iter_mut().zip(spec.stats.ranges()) {
            let x = (level + spec.stats.jitter * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0);
            *slot = lo + ((hi - lo) as f64 * x).round() as u64;
            match outlier_kind.get(&u) {
                Some(true) => *slot = hi * 20 + *slot % 7,
                Some(false) => *slot = lo / 20,
                None => {}
            }
        }
        let lang = if rng.random::<f64>() < spec.non_english_fraction {
            *OTHER_LANGS.choose(&mut rng).expect("non-empty")
        } else {
            "en"
        };
        accounts.push(Account {
            account_id: id.clone(),
            followers: stats[0],
            followees: stats[1],
            likes: stats[2],
            statuses: stats[3],
            user_language: lang.to_string(),
        });
        truth.push(TruthRecord {
            account_id: id.clone(),
            side,
            is_outlier: outlier_kind.contains_key(&u),
        });

        let habit = {
            let r: f64 = rng.random();
            if r < spec.hashtags.silent_users {
                TagHabit::Silent
            } else if r < spec.hashtags.silent_users + spec.hashtags.cross_tag_users {
                TagHabit::Cross
            } else {
                TagHabit::OwnOnly
            }
        };
        let own_tags = match side {
            Side::A => &spec.hashtags.side_a,
            Side::B => &spec.hashtags.side_b,
        };
        let other_tags = match side {
            Side::A => &spec.hashtags.side_b,
            Side::B => &spec.hashtags.side_a,
        };

        let n_tweets = rng.random_range(spec.tweets_per_user[0]..=spec.tweets_per_user[1]);
        for _ in 0..n_tweets {
            let text = compose_tweet(&mut rng, spec, model, &issue_phrases, habit, own_tags, other_tags, &ids);
            tweets.push(Tweet::new(format!("t{tweet_counter:08}"), id.clone(), text));
            tweet_counter += 1;
        }
    }

    Ok(SynthCorpus {
        accounts,
        tweets,
        truth,
    })
}

#[allow(clippy::too_many_arguments)]
fn compose_tweet(
    rng: &mut ChaCha8Rng,
    spec: &SynthSpec,
    model: &SideModel,
    issue_phrases: &[Phrase],
    habit: TagHabit,
    own_tags: &[String],
    other_tags: &[String],
    ids: &[String],
) -> String {
    let slots = rng.random_range(spec.phrases_per_tweet[0]..=spec.phrases_per_tweet[1]);
    let issue = model.issues.pick(rng);
    // expected number of shared slots, spent on the issue slot first
    let shared_budget = (1.0 - spec.partisan_token_rate) * slots as f64;
    let p_first = shared_budget.min(1.0);
    let p_rest = if slots > 1 {
        ((shared_budget - p_first) / (slots - 1) as f64).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (framings, framing_choice) = &model.framings[issue];
    let mut phrases: Vec<&Phrase> = Vec::with_capacity(slots);
    for slot in 0..slots {
        let p_shared = if slot == 0 { p_first } else { p_rest };
        if rng.random::<f64>() < p_shared {
            let which = if slot == 0 { issue } else { model.issues.pick(rng) };
            phrases.push(&issue_phrases[which]);
        } else {
            phrases.push(&framings[framing_choice.pick(rng)]);
        }
    }
    phrases.shuffle(rng);

    let mut words: Vec<String> = Vec::new();
    if rng.random::<f64>() < spec.mention_rate {
        words.push(format!("@{}", ids.choose(rng).expect("non-empty")));
    }
    for p in phrases {
        if rng.random::<f64>() < spec.stopword_rate {
            words.push(FILLERS.choose(rng).expect("non-empty").to_string());
        }
        words.extend(p.iter().cloned());
    }
    if let Some(first) = words.iter_mut().find(|w| !w.starts_with('@')) {
        if rng.random::<f64>() < 0.2 {
            let mut c = first.chars();
            if let Some(h) = c.next() {
                *first = h.to_uppercase().chain(c).collect();
            }
        }
    }
    let tag = |tags: &[String], rng: &mut ChaCha8Rng| format!("#{}", tags.choose(rng).expect("validated non-empty"));
    match habit {
        TagHabit::Silent => {}
        TagHabit::OwnOnly | TagHabit::Cross => {
            if rng.random::<f64>() < spec.hashtags.tag_rate {
                words.push(tag(own_tags, rng));
            }
        }
    }
    if let TagHabit::Cross = habit {
        if rng.random::<f64>() < spec.hashtags.tag_rate * (1.0 - spec.partisan_token_rate) {
            words.push(tag(other_tags, rng));
        }
    }
    if rng.random::<f64>() < spec.url_rate {
        words.push(format!("https://t.co/{:08x}", rng.random::<u32>()));
    }
    words.join(" ")
}
