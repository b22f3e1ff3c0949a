//! Two-stance content-based recommendation over tweet corpora.
//!
//! The crate covers the whole path from raw account/tweet records to an
//! evaluation report:
//!
//! - [`corpus`]: record types and line-delimited ingestion
//! - [`textproc`]: normalization, tokenization, stopwords, word trigrams
//! - [`filterpipe`]: hashtag seeding, quartile and language filters
//! - [`vectorspace`]: the shared trigram TF-IDF space and sparse vectors
//! - [`stance`]: stance vectors, user profiles and cosine classification
//! - [`recommender`]: candidate sampling and the four recommendation variants
//! - [`evalmetrics`]: diversity, serendipity, topic similarity, report harness
//! - [`synthgen`]: seeded two-community corpus generator

pub mod corpus;
pub mod evalmetrics;
pub mod filterpipe;
pub mod recommender;
pub mod seed;
pub mod stance;
pub mod synthgen;
pub mod textproc;
pub mod vectorspace;

pub use corpus::{Account, Corpus, CorpusError, IngestMode, Tweet};
pub use evalmetrics::{EvaluationConfig, EvaluationReport, MetricError};
pub use filterpipe::{FilterError, FilterOutcome, HashtagConfig, SeedLabel};
pub use recommender::{CandidateSet, RecommendError, RecommendationList, Variant};
pub use stance::{Side, StanceError, UserProfile};
pub use synthgen::{SynthCorpus, SynthSpec};
pub use textproc::{Stoplist, TextPipeline, Trigram};
pub use vectorspace::{SparseVector, VectorSpace};
