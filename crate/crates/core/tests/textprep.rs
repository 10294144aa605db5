use std::sync::{Arc, OnceLock};

use ontoprep_core::textprep::*;
use proptest::prelude::*;

fn seq(words: &[&str]) -> TokenSeq {
    TokenSeq::new(words.iter().copied())
}

fn lexicon() -> Arc<MorphyLexicon> {
    static LEXICON: OnceLock<Arc<MorphyLexicon>> = OnceLock::new();
    LEXICON.get_or_init(|| Arc::new(MorphyLexicon::load_bundled().unwrap())).clone()
}

fn pipeline(spec: &str) -> Pipeline {
    Pipeline::new(PipelineConfig::parse(spec).unwrap(), Some(lexicon())).unwrap()
}

#[test]
fn tokenize_examples() {
    assert_eq!(tokenize("isReviewing"), seq(&["is", "Reviewing"]));
    assert_eq!(tokenize("art_gallery"), seq(&["art", "gallery"]));
    assert_eq!(tokenize("ArtGallery"), seq(&["Art", "Gallery"]));
    assert_eq!(tokenize("Chromosome_Y"), seq(&["Chromosome", "Y"]));
    assert_eq!(tokenize("NCIThesaurus"), seq(&["NCI", "Thesaurus"]));
    assert!(tokenize("").is_empty());
}

#[test]
fn normalize_examples() {
    assert_eq!(normalize(&seq(&["is", "Reviewing"])), seq(&["is", "reviewing"]));
    assert_eq!(normalize(&seq(&["<b>Heart</b>"])), seq(&["heart"]));
    assert_eq!(normalize(&seq(&["heart"])), seq(&["heart"]));
}

#[test]
fn stop_word_examples() {
    let config = PipelineConfig::parse("T,N,R").unwrap();
    assert_eq!(remove_stop_words(&seq(&["is", "reviewing"]), &config), seq(&["reviewing"]));
    assert_eq!(remove_stop_words(&seq(&["black", "and", "white"]), &config), seq(&["black", "white"]));
    assert_eq!(remove_stop_words(&seq(&["of"]), &config), seq(&["of"]));
}

#[test]
fn stem_examples() {
    assert_eq!(stem(&seq(&["reviews"]), StemAlgorithm::Porter), seq(&["review"]));
    assert_eq!(stem(&seq(&["reviewing"]), StemAlgorithm::Porter), seq(&["review"]));
    assert_eq!(
        stem(&seq(&["steering", "committee"]), StemAlgorithm::Porter),
        seq(&["steer", "committe"])
    );
    assert_eq!(stem(&seq(&["maximum"]), StemAlgorithm::Lancaster), seq(&["maxim"]));
}

#[test]
fn pos_examples() {
    assert_eq!(pos_tag(&seq(&["reviewing"])), vec![("reviewing".to_owned(), Pos::Verb)]);
    assert_eq!(pos_tag(&seq(&["heart"])), vec![("heart".to_owned(), Pos::Noun)]);
    assert!(pos_tag(&seq(&[])).is_empty());
}

#[test]
fn lemmatize_examples() {
    let lexicon = MorphyLexicon::load_bundled().unwrap();
    assert_eq!(lemmatize(&seq(&["members"]), false, &lexicon), seq(&["member"]));
    assert_eq!(lemmatize(&seq(&["reviewing"]), true, &lexicon), seq(&["review"]));
    assert_eq!(lemmatize(&seq(&["reviewing"]), false, &lexicon), seq(&["reviewing"]));
    assert_eq!(lemmatize(&seq(&["heart"]), false, &lexicon), seq(&["heart"]));
}

#[test]
fn apply_pipeline_examples() {
    let p = pipeline("T,N,R,S:porter");
    assert_eq!(apply_pipeline("isReviewing", &p, None).as_str(), "review");
    let reserved: ReservedWordSet = ["was", "a", "of", "has", "members"].into_iter().collect();
    assert_eq!(apply_pipeline("was_a_member_of", &p, Some(&reserved)).as_str(), "was a member of");
    assert_eq!(
        apply_pipeline("has_a_steering_committee", &p, Some(&reserved)).as_str(),
        "has a steer committe"
    );
}

#[test]
fn lexicon_shared_between_pipelines() {
    let lexicon = Arc::new(MorphyLexicon::load_bundled().unwrap());
    let l = Pipeline::new(PipelineConfig::parse("T,N,L").unwrap(), Some(lexicon.clone())).unwrap();
    let lt = Pipeline::new(PipelineConfig::parse("T,N,LT").unwrap(), Some(lexicon)).unwrap();
    assert_eq!(l.apply("isReviewing", None).as_str(), "is reviewing");
    assert_eq!(lt.apply("isReviewing", None).as_str(), "be review");
}

#[test]
fn lexicon_from_missing_directory() {
    assert!(matches!(MorphyLexicon::load("/no/such/dir"), Err(ontoprep_core::Error::LexiconUnavailable { .. })));
}

const SPECS: [&str; 8] = [
    "T",
    "T,N",
    "T,N,R",
    "T,N,R,S:porter",
    "T,N,R,S:snowball",
    "T,N,R,S:lancaster",
    "T,N,R,L",
    "T,N,R,LT",
];

fn identifier() -> impl Strategy<Value = String> {
    let word = prop::sample::select(vec![
        "is", "was", "a", "of", "has", "the", "and", "not", "review", "Reviewing", "reviews",
        "Paper", "papers", "member", "Members", "author", "Author", "committee", "steering",
        "NCI", "C12345", "R&D", "x", "Y", "running", "run",
    ]);
    let sep = prop::sample::select(vec!["", "_", " ", "-"]);
    prop::collection::vec((word, sep), 1..5).prop_map(|parts| {
        parts.into_iter().map(|(w, s)| format!("{w}{s}")).collect::<String>()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn keys_are_well_formed(text in "\\PC{0,30}", spec in prop::sample::select(SPECS.to_vec())) {
        let p = pipeline(spec);
        let key = p.apply(&text, None);
        let k = key.as_str();
        prop_assert!(!k.contains("  "));
        prop_assert_eq!(k.trim(), k);
        prop_assert_eq!(p.apply(&text, None), key);
        prop_assert!(p.tokens(&text, None).iter().all(|t| !t.is_empty()));
    }

    #[test]
    fn single_lowercase_word_tokenises_to_itself(word in "[a-z]{1,15}") {
        prop_assert_eq!(tokenize(&word), TokenSeq::new([word.clone()]));
    }

    #[test]
    fn equal_keys_stay_equal_when_steps_are_appended(a in identifier(), b in identifier()) {
        let chain: Vec<Pipeline> = ["T", "T,N", "T,N,R", "T,N,R,S:porter"].iter().map(|s| pipeline(s)).collect();
        for w in chain.windows(2) {
            if w[0].apply(&a, None) == w[0].apply(&b, None) {
                prop_assert_eq!(w[1].apply(&a, None), w[1].apply(&b, None));
            }
        }
    }

    #[test]
    fn reserved_tokens_survive_verbatim(text in identifier(), pick in 0usize..8) {
        let p = pipeline("T,N,R,S:lancaster");
        let phase1 = p.phase1(&text);
        prop_assume!(!phase1.is_empty());
        let word = phase1.as_slice()[pick % phase1.len()].clone();
        let reserved: ReservedWordSet = [word.as_str()].into_iter().collect();
        let tokens = p.tokens(&text, Some(&reserved));
        prop_assert!(tokens.iter().any(|t| *t == word), "{:?} lacks {}", tokens, word);
    }
}
