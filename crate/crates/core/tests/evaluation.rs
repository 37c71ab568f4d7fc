mod common;

use std::collections::HashSet;

use common::*;
use phonocat::eval::PhoneBlame;
use phonocat::hmm::encode_observations;
use phonocat::{
    categorize, cross_validate, evaluate, load_corpus, train, CategoryMap, GaConfig, MapSource,
};

/// Model that has only ever seen `{b-sEnt`; every word below shares its
/// category string, so every prediction is `{b-sEnt`.
fn fixture() -> (phonocat::HmmModel, Vec<phonocat::AnnotatedWord>) {
    let model = train(&[word("{b-sEnt")], &absent_map(), 0.1).unwrap();
    let words = ["{b-sEnt", "{bs-Ent", "{b-sE-nt", "{bsEnt"]
        .iter()
        .map(|w| word(w))
        .collect();
    (model, words)
}

#[test]
fn four_word_fixture_matches_hand_computation() {
    let (model, words) = fixture();
    for w in &words {
        let obs = encode_observations(&categorize(w.phones(), model.map()).unwrap()).unwrap();
        assert_eq!(
            brute_force_decode(&model, &obs),
            vec![false, true, false, false, false]
        );
    }
    let r = evaluate(&model, &words).unwrap();
    assert_eq!((r.word_count, r.error_count), (4, 3));
    assert_eq!(r.word_accuracy, 0.25);
    let c = r.confusion;
    assert_eq!(
        (
            c.true_positive,
            c.false_positive,
            c.false_negative,
            c.true_negative
        ),
        (2, 2, 2, 14)
    );
    assert_eq!(
        (r.boundary_precision, r.boundary_recall, r.boundary_f1),
        (0.5, 0.5, 0.5)
    );
    let blame: Vec<(char, u64)> = r
        .per_phone_blame
        .iter()
        .map(|PhoneBlame { phone, count }| (*phone, *count))
        .collect();
    assert_eq!(blame, vec![('b', 2), ('s', 3), ('E', 2), ('n', 1)]);
    let gold: Vec<&str> = r.mis_syllabified.iter().map(|m| m.gold.as_str()).collect();
    assert_eq!(gold, vec!["{bs-Ent", "{b-sE-nt", "{bsEnt"]);
    assert!(r
        .mis_syllabified
        .iter()
        .all(|m| m.predicted == "{b-sEnt" && m.orthography == "{bsEnt"));
}

#[test]
fn one_of_two_wrong_is_half() {
    let (model, words) = fixture();
    let r = evaluate(&model, &words[..2]).unwrap();
    assert_eq!(r.word_accuracy, 0.5);
}

#[test]
fn report_invariants_on_the_mini_corpus() {
    let corpus = mini_corpus();
    let (head, tail) = corpus.words().split_at(3000);
    let model = train(head, &conventional_map(), 0.1).unwrap();
    let r = evaluate(&model, tail).unwrap();
    let recomputed = (r.word_count - r.mis_syllabified.len()) as f64 / r.word_count as f64;
    assert_eq!(r.word_accuracy, recomputed);
    let gaps: usize = tail.iter().map(|w| w.len() - 1).sum();
    assert_eq!(r.confusion.total(), gaps as u64);
    let (p, rc) = (r.boundary_precision, r.boundary_recall);
    assert!((r.boundary_f1 - 2.0 * p * rc / (p + rc)).abs() < 1e-12);
    assert!(r.to_text().contains(&format!("{}", r.word_count)));
}

#[test]
fn folds_never_leak_test_words() {
    let corpus = mini_corpus();
    let split = phonocat::kfold_split(&corpus, 10, 3).unwrap();
    for fold in 0..10 {
        let train: HashSet<_> = split
            .train_indices(fold)
            .into_iter()
            .map(|i| {
                (
                    corpus.words()[i].phones().to_vec(),
                    corpus.words()[i].boundaries().to_vec(),
                )
            })
            .collect();
        for i in split.test_indices(fold) {
            let w = &corpus.words()[i];
            assert!(!train.contains(&(w.phones().to_vec(), w.boundaries().to_vec())));
        }
    }
}

#[test]
fn cross_validation_state_counts() {
    let text = std::fs::read_to_string(data_path("mini_corpus.tsv")).unwrap();
    let small: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .take(400)
        .map(|l| format!("{l}\n"))
        .collect();
    let corpus = load_corpus(small.as_bytes()).unwrap();
    let identity = cross_validate(&corpus, &MapSource::Identity, 4, 1, 0.1).unwrap();
    let conventional = restrict(&conventional_map(), &corpus);
    let fixed = cross_validate(&corpus, &MapSource::Fixed(conventional), 4, 1, 0.1).unwrap();
    assert_eq!(identity.folds.len(), 4);
    assert!(identity
        .folds
        .iter()
        .all(|f| f.state_count == 2 * corpus.alphabet().len()));
    assert!(fixed.folds.iter().all(|f| f.state_count == 20));
    let mean = fixed
        .folds
        .iter()
        .map(|f| f.report.word_accuracy)
        .sum::<f64>()
        / 4.0;
    assert!((fixed.mean_accuracy - mean).abs() < 1e-12);

    let again = cross_validate(&corpus, &MapSource::Identity, 4, 1, 0.1).unwrap();
    assert_eq!(again.to_text(), identity.to_text());
}

#[test]
fn two_fold_mean_is_the_average() {
    let corpus =
        phonocat::corpus::load_corpus_str("a\t{b-sEnt\nb\ts{-tEn\nc\tn{t\nd\tt{-bEs\n").unwrap();
    let cv = cross_validate(&corpus, &MapSource::Fixed(absent_map()), 2, 0, 0.1).unwrap();
    assert_eq!(cv.folds.len(), 2);
    assert!(cv
        .folds
        .iter()
        .all(|f| f.test_size == 2 && f.train_size == 2));
    let avg = (cv.folds[0].report.word_accuracy + cv.folds[1].report.word_accuracy) / 2.0;
    assert_eq!(cv.mean_accuracy, avg);
}

#[test]
fn evolved_cross_validation_runs_per_fold() {
    let text = std::fs::read_to_string(data_path("mini_corpus.tsv")).unwrap();
    let small: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .take(200)
        .map(|l| format!("{l}\n"))
        .collect();
    let corpus = load_corpus(small.as_bytes()).unwrap();
    let config = GaConfig {
        k: 4,
        population_size: 6,
        max_generations: 2,
        refine_period: 0,
        ..GaConfig::default()
    };
    let cv = cross_validate(&corpus, &MapSource::Evolve(config), 2, 7, 0.1).unwrap();
    assert!(cv
        .folds
        .iter()
        .all(|f| f.evolved_fitness.is_some() && f.state_count == 8));
}

/// The conventional map restricted to a corpus' own alphabet order.
fn restrict(map: &CategoryMap, corpus: &phonocat::Corpus) -> CategoryMap {
    let genes = corpus
        .alphabet()
        .iter()
        .map(|p| map.category_of(p).unwrap())
        .collect();
    CategoryMap::new(map.k(), corpus.alphabet().clone(), genes).unwrap()
}
