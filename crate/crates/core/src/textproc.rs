//! Text preprocessing: normalization, tokenization, stopword removal and
//! word trigrams.
//!
//! Stopwords are removed before windowing, so a trigram can bridge a removed
//! stopword: "trump will pay mexico" yields "trump pay mexico".

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;

/// Three space-separated tokens.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trigram(String);

impl Trigram {
    pub fn from_tokens(a: &str, b: &str, c: &str) -> Self {
        Trigram(format!("{a} {b} {c}"))
    }

    /// Accepts a string of exactly three non-empty space-separated tokens.
    pub fn parse(s: &str) -> Option<Self> {
        let parts: Vec<&str> = s.split(' ').collect();
        if parts.len() == 3 && parts.iter().all(|p| !p.is_empty()) {
            Some(Trigram(s.to_string()))
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.0.split(' ')
    }
}

impl fmt::Display for Trigram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

// A run of URLs and/or mentions separated only by whitespace is removed as
// one block; the whitespace around the block is kept.
static URL_MENTION_RUN: LazyLock<Regex> = LazyLock::new(|| {
    let item = r"(?:https?://\S+|www\.\S+|@\w+)";
    Regex::new(&format!(r"{item}(?:\s+{item})*")).expect("static regex")
});

/// Lowercases, drops URLs and `@` mentions, and strips `#` from hashtags.
pub fn normalize(text: &str) -> String {
    let stripped = URL_MENTION_RUN.replace_all(text, "");
    stripped.to_lowercase().replace('#', "")
}

/// Splits on non-alphanumeric characters, dropping empty and pure-digit tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty() && !t.chars().all(char::is_numeric))
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist {
    words: HashSet<String>,
}

const ENGLISH_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

impl Stoplist {
    pub fn empty() -> Self {
        Stoplist::default()
    }

    /// The bundled English list (`data/stopwords_en.txt`).
    pub fn english() -> Self {
        Stoplist::parse(ENGLISH_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comment lines are ignored.
    pub fn parse(body: &str) -> Self {
        let words = body
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Stoplist { words }
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        Ok(Stoplist::parse(&fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stoplist {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stoplist {
            words: iter.into_iter().map(Into::into).collect(),
        }
    }
}

pub fn remove_stopwords(tokens: Vec<String>, stoplist: &Stoplist) -> Vec<String> {
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

/// Sliding window of three consecutive tokens, step one.
pub fn extract_trigrams(tokens: &[String]) -> Vec<Trigram> {
    tokens
        .windows(3)
        .map(|w| Trigram::from_tokens(&w[0], &w[1], &w[2]))
        .collect()
}

/// The full per-tweet text path: normalize, tokenize, drop stopwords, window.
#[derive(Debug, Clone)]
pub struct TextPipeline {
    stoplist: Stoplist,
}

impl TextPipeline {
    pub fn new(stoplist: Stoplist) -> Self {
        TextPipeline { stoplist }
    }

    pub fn stoplist(&self) -> &Stoplist {
        &self.stoplist
    }

    pub fn tokens(&self, text: &str) -> Vec<String> {
        remove_stopwords(tokenize(&normalize(text)), &self.stoplist)
    }

    pub fn trigrams(&self, text: &str) -> Vec<Trigram> {
        extract_trigrams(&self.tokens(text))
    }

    /// Trigram lists for every tweet of the given accounts.
    pub fn featurize<'a>(&self, corpus: &Corpus, accounts: impl IntoIterator<Item = &'a str>) -> TweetTrigrams {
        let ids: Vec<&String> = accounts.into_iter().flat_map(|a| corpus.tweet_ids_of(a)).collect();
        let per_tweet = ids
            .par_iter()
            .map(|id| {
                let tweet = corpus.tweet(id).expect("id from corpus index");
                ((*id).clone(), self.trigrams(&tweet.text))
            })
            .collect();
        TweetTrigrams { per_tweet }
    }
}

impl Default for TextPipeline {
    fn default() -> Self {
        TextPipeline::new(Stoplist::english())
    }
}

/// Per-tweet trigram lists; trigrams never cross tweet boundaries.
#[derive(Debug, Clone, Default)]
pub struct TweetTrigrams {
    per_tweet: HashMap<String, Vec<Trigram>>,
}

impl TweetTrigrams {
    pub fn get(&self, tweet_id: &str) -> Option<&[Trigram]> {
        self.per_tweet.get(tweet_id).map(Vec::as_slice)
    }

    /// Trigram lists of an account's tweets, in ingestion order. Tweets that
    /// were not featurized are skipped.
    pub fn of_account<'a>(&'a self, corpus: &'a Corpus, account_id: &str) -> impl Iterator<Item = &'a [Trigram]> + 'a {
        corpus
            .tweet_ids_of(account_id)
            .iter()
            .filter_map(move |id| self.get(id))
    }

    pub fn len(&self) -> usize {
        self.per_tweet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_tweet.is_empty()
    }
}
