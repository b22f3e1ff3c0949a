//! Account and tweet records, line-delimited ingestion and hashtag extraction.
//!
//! Both record files hold one JSON object per line. Accounts carry
//! `id, followers, followees, likes, statuses, lang`; tweets carry
//! `id, account, text` and an optional `hashtags` array. When `hashtags` is
//! absent it is derived from the text with [`extract_hashtags`].

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("duplicate account id {0:?}")]
    DuplicateAccount(String),
    #[error("duplicate tweet id {0:?}")]
    DuplicateTweet(String),
    #[error("tweet {tweet:?} references unknown account {account:?}")]
    UnknownAccount { tweet: String, account: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Account {
    #[serde(rename = "id")]
    pub account_id: String,
    pub followers: u64,
    pub followees: u64,
    pub likes: u64,
    pub statuses: u64,
    /// Lowercase ISO-639-1 code; lowercased at ingestion.
    #[serde(rename = "lang")]
    pub user_language: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tweet {
    pub tweet_id: String,
    pub account_id: String,
    pub text: String,
    /// Lowercase tags without the leading `#`.
    pub hashtags: BTreeSet<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TweetRecord {
    id: String,
    account: String,
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hashtags: Option<Vec<String>>,
}

impl Tweet {
    /// Builds a tweet whose hashtags are extracted from `text`.
    pub fn new(tweet_id: impl Into<String>, account_id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let hashtags = extract_hashtags(&text);
        Tweet {
            tweet_id: tweet_id.into(),
            account_id: account_id.into(),
            text,
            hashtags,
        }
    }

    fn from_record(rec: TweetRecord) -> Self {
        let hashtags = match rec.hashtags {
            Some(tags) => tags
                .iter()
                .map(|t| t.trim_start_matches('#').to_lowercase())
                .filter(|t| !t.is_empty())
                .collect(),
            None => extract_hashtags(&rec.text),
        };
        Tweet {
            tweet_id: rec.id,
            account_id: rec.account,
            text: rec.text,
            hashtags,
        }
    }

    fn to_record(&self) -> TweetRecord {
        TweetRecord {
            id: self.tweet_id.clone(),
            account: self.account_id.clone(),
            text: self.text.clone(),
            hashtags: Some(self.hashtags.iter().cloned().collect()),
        }
    }
}

/// Whether tweets of unknown accounts abort ingestion or are counted and dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IngestMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestStats {
    pub loaded: usize,
    pub skipped_unknown_account: usize,
}

/// An immutable, id-indexed corpus.
///
/// `tweets_by_account` has an entry for every account (possibly empty), with
/// tweet ids in ingestion order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    accounts: BTreeMap<String, Account>,
    tweets: BTreeMap<String, Tweet>,
    tweets_by_account: BTreeMap<String, Vec<String>>,
}

impl Corpus {
    /// Assembles a corpus from in-memory records with the same checks as
    /// file ingestion.
    pub fn from_parts(
        accounts: impl IntoIterator<Item = Account>,
        tweets: impl IntoIterator<Item = Tweet>,
        mode: IngestMode,
    ) -> Result<(Self, IngestStats), CorpusError> {
        let mut corpus = Corpus::default();
        for mut account in accounts {
            account.user_language = account.user_language.to_lowercase();
            corpus.insert_account(account)?;
        }
        let mut stats = IngestStats::default();
        for tweet in tweets {
            corpus.insert_tweet(tweet, mode, &mut stats)?;
        }
        Ok((corpus, stats))
    }

    fn insert_account(&mut self, account: Account) -> Result<(), CorpusError> {
        if self.accounts.contains_key(&account.account_id) {
            return Err(CorpusError::DuplicateAccount(account.account_id));
        }
        self.tweets_by_account.insert(account.account_id.clone(), Vec::new());
        self.accounts.insert(account.account_id.clone(), account);
        Ok(())
    }

    fn insert_tweet(&mut self, tweet: Tweet, mode: IngestMode, stats: &mut IngestStats) -> Result<(), CorpusError> {
        let Some(list) = self.tweets_by_account.get_mut(&tweet.account_id) else {
            return match mode {
                IngestMode::Strict => Err(CorpusError::UnknownAccount {
                    tweet: tweet.tweet_id,
                    account: tweet.account_id,
                }),
                IngestMode::Lenient => {
                    stats.skipped_unknown_account += 1;
                    Ok(())
                }
            };
        };
        if self.tweets.contains_key(&tweet.tweet_id) {
            return Err(CorpusError::DuplicateTweet(tweet.tweet_id));
        }
        list.push(tweet.tweet_id.clone());
        self.tweets.insert(tweet.tweet_id.clone(), tweet);
        stats.loaded += 1;
        Ok(())
    }

    pub fn accounts(&self) -> impl Iterator<Item = &Account> {
        self.accounts.values()
    }

    pub fn account(&self, id: &str) -> Option<&Account> {
        self.accounts.get(id)
    }

    pub fn tweet(&self, id: &str) -> Option<&Tweet> {
        self.tweets.get(id)
    }

    pub fn tweets(&self) -> impl Iterator<Item = &Tweet> {
        self.tweets.values()
    }

    /// Tweet ids of `account_id` in ingestion order; empty for unknown ids.
    pub fn tweet_ids_of(&self, account_id: &str) -> &[String] {
        self.tweets_by_account.get(account_id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn tweets_of<'a>(&'a self, account_id: &str) -> impl Iterator<Item = &'a Tweet> + 'a {
        self.tweet_ids_of(account_id).iter().map(move |id| &self.tweets[id])
    }

    pub fn n_accounts(&self) -> usize {
        self.accounts.len()
    }

    pub fn n_tweets(&self) -> usize {
        self.tweets.len()
    }

    /// Writes accounts then tweets back to record files.
    pub fn write(&self, accounts_path: &Path, tweets_path: &Path) -> Result<(), CorpusError> {
        write_accounts(accounts_path, self.accounts.values())?;
        let ordered = self
            .tweets_by_account
            .values()
            .flat_map(|ids| ids.iter().map(|id| &self.tweets[id]));
        write_tweets(tweets_path, ordered)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Parses each non-blank line of `path` as a JSON record.
fn read_records<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

fn write_records<'a, T: Serialize + 'a>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<(), CorpusError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for rec in records {
        serde_json::to_writer(&mut w, &rec).map_err(|e| io_err(path)(e.into()))?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Loads the account file. Language codes are lowercased.
pub fn load_accounts(path: &Path) -> Result<Vec<Account>, CorpusError> {
    let mut accounts: Vec<Account> = read_records(path)?;
    let mut seen = BTreeSet::new();
    for a in &mut accounts {
        a.user_language = a.user_language.to_lowercase();
        if !seen.insert(a.account_id.clone()) {
            return Err(CorpusError::DuplicateAccount(a.account_id.clone()));
        }
    }
    Ok(accounts)
}

/// Loads the tweet file against already-loaded accounts.
pub fn load_tweets(
    path: &Path,
    accounts: Vec<Account>,
    mode: IngestMode,
) -> Result<(Corpus, IngestStats), CorpusError> {
    let records: Vec<TweetRecord> = read_records(path)?;
    Corpus::from_parts(accounts, records.into_iter().map(Tweet::from_record), mode)
}

pub fn write_accounts<'a>(path: &Path, accounts: impl IntoIterator<Item = &'a Account>) -> Result<(), CorpusError> {
    write_records(path, accounts)
}

pub fn write_tweets<'a>(path: &Path, tweets: impl IntoIterator<Item = &'a Tweet>) -> Result<(), CorpusError> {
    write_records(path, tweets.into_iter().map(Tweet::to_record))
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Returns every maximal run of word characters that follows a `#`,
/// lowercased. Empty tags (a bare `#`) are skipped.
pub fn extract_hashtags(text: &str) -> BTreeSet<String> {
    let mut tags = BTreeSet::new();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c != '#' {
            continue;
        }
        let start = i + c.len_utf8();
        let mut end = start;
        while let Some(&(j, d)) = chars.peek() {
            if !is_word_char(d) {
                break;
            }
            end = j + d.len_utf8();
            chars.next();
        }
        if end > start {
            tags.insert(text[start..end].to_lowercase());
        }
    }
    tags
}
