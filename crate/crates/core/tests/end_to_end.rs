use stancerec::evalmetrics::avg_topic_similarity;
use stancerec::filterpipe::run_filter_pipeline;
use stancerec::stance::{build_all_profiles, ProfileConfig};
use stancerec::synthgen::{generate, SynthSpec};
use stancerec::{Corpus, HashtagConfig, IngestMode, Side, SparseVector, TextPipeline};

fn topic_similarity(spec: &SynthSpec) -> [f64; 2] {
    let sc = generate(spec).unwrap();
    let (corpus, _) = Corpus::from_parts(sc.accounts, sc.tweets, IngestMode::Strict).unwrap();
    let filter = run_filter_pipeline(&corpus, &HashtagConfig::default(), "en").unwrap();
    let features = TextPipeline::default().featurize(&corpus, filter.survivors());
    let build = build_all_profiles(&corpus, &features, &filter.seed_labels, ProfileConfig::default()).unwrap();
    Side::BOTH.map(|side| {
        let vecs: Vec<&SparseVector> = build
            .profiles
            .iter()
            .filter(|p| p.stance == side)
            .map(|p| &p.vector)
            .collect();
        avg_topic_similarity(&vecs, None, 0).unwrap().value
    })
}

#[test]
fn sharper_zipf_raises_topic_similarity() {
    let spec = SynthSpec {
        users_per_side: [150, 150],
        zipf_exponent: [0.6, 2.0],
        framing_exponent: [0.8, 1.4],
        ..SynthSpec::default()
    };
    let [a, b] = topic_similarity(&spec);
    assert!(b > a + 0.1, "side_a {a:.3} side_b {b:.3}");
}

#[test]
fn equal_exponents_give_similar_topic_similarity() {
    let spec = SynthSpec {
        users_per_side: [150, 150],
        ..SynthSpec::default()
    };
    let [a, b] = topic_similarity(&spec);
    assert!((a - b).abs() < 0.1, "side_a {a:.3} side_b {b:.3}");
}

#[test]
fn files_round_trip_through_loaders() {
    let spec = SynthSpec {
        users_per_side: [15, 15],
        tweets_per_user: [3, 5],
        ..SynthSpec::default()
    };
    let sc = generate(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    sc.write_to(dir.path()).unwrap();
    let accounts = stancerec::corpus::load_accounts(&dir.path().join("accounts.jsonl")).unwrap();
    let (corpus, stats) =
        stancerec::corpus::load_tweets(&dir.path().join("tweets.jsonl"), accounts, IngestMode::Strict).unwrap();
    assert_eq!(corpus.n_accounts(), 30);
    assert_eq!(stats.loaded, sc.tweets.len());
    for t in &sc.tweets {
        assert_eq!(corpus.tweet(&t.tweet_id), Some(t));
    }
}
