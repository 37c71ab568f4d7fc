//! Accuracy reports and k-fold cross-validation.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{kfold_split, Corpus, CorpusError};
use crate::evolve::{evolve_over, EvolveError, GaConfig};
use crate::hmm::{train, HmmError, HmmModel};
use crate::phonology::{AnnotatedWord, CategoryMap};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no words to evaluate")]
    EmptyWordSet,
    #[error(transparent)]
    Hmm(#[from] HmmError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Gap-level confusion counts, pooled over all evaluated words. A positive
/// is a syllable boundary.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BoundaryConfusion {
    pub true_positive: u64,
    pub false_positive: u64,
    pub false_negative: u64,
    pub true_negative: u64,
}

impl BoundaryConfusion {
    pub fn total(&self) -> u64 {
        self.true_positive + self.false_positive + self.false_negative + self.true_negative
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhoneBlame {
    pub phone: char,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mistake {
    pub orthography: String,
    pub gold: String,
    pub predicted: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub word_accuracy: f64,
    pub boundary_precision: f64,
    pub boundary_recall: f64,
    pub boundary_f1: f64,
    pub word_count: usize,
    pub error_count: usize,
    pub confusion: BoundaryConfusion,
    /// Phones flanking at least one wrong gap, in alphabet order.
    pub per_phone_blame: Vec<PhoneBlame>,
    pub mis_syllabified: Vec<Mistake>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Syllabifies every word and scores it against its gold boundaries.
pub fn evaluate(model: &HmmModel, words: &[AnnotatedWord]) -> Result<EvalReport, EvalError> {
    if words.is_empty() {
        return Err(EvalError::EmptyWordSet);
    }
    let alphabet = model.map().alphabet();
    let mut blame = vec![0u64; alphabet.len()];
    let mut confusion = BoundaryConfusion::default();
    let mut mistakes = Vec::new();
    for word in words {
        let predicted = model.syllabify(word.phones())?;
        let mut wrong = false;
        for (gap, (&p, &g)) in predicted
            .boundaries()
            .iter()
            .zip(word.boundaries())
            .enumerate()
        {
            match (p, g) {
                (true, true) => confusion.true_positive += 1,
                (true, false) => confusion.false_positive += 1,
                (false, true) => confusion.false_negative += 1,
                (false, false) => confusion.true_negative += 1,
            }
            if p != g {
                wrong = true;
                for phone in &word.phones()[gap..gap + 2] {
                    // syllabify already rejected phones outside the map
                    blame[alphabet.index_of(*phone).expect("phone in map")] += 1;
                }
            }
        }
        if wrong {
            mistakes.push(Mistake {
                orthography: word.orthography.clone(),
                gold: word.render(),
                predicted: predicted.to_string(),
            });
        }
    }
    let precision = ratio(
        confusion.true_positive,
        confusion.true_positive + confusion.false_positive,
    );
    let recall = ratio(
        confusion.true_positive,
        confusion.true_positive + confusion.false_negative,
    );
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(EvalReport {
        word_accuracy: (words.len() - mistakes.len()) as f64 / words.len() as f64,
        boundary_precision: precision,
        boundary_recall: recall,
        boundary_f1: f1,
        word_count: words.len(),
        error_count: mistakes.len(),
        confusion,
        per_phone_blame: blame
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &count)| PhoneBlame {
                phone: alphabet.phone(i).symbol(),
                count,
            })
            .collect(),
        mis_syllabified: mistakes,
    })
}

impl EvalReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "word accuracy: {:.4} ({} of {} correct)",
            self.word_accuracy,
            self.word_count - self.error_count,
            self.word_count
        );
        let _ = writeln!(
            out,
            "boundaries: precision {:.4}  recall {:.4}  f1 {:.4}",
            self.boundary_precision, self.boundary_recall, self.boundary_f1
        );
        let c = &self.confusion;
        let _ = writeln!(
            out,
            "gaps: tp {}  fp {}  fn {}  tn {}",
            c.true_positive, c.false_positive, c.false_negative, c.true_negative
        );
        if !self.per_phone_blame.is_empty() {
            let mut blame = self.per_phone_blame.clone();
            blame.sort_by_key(|b| std::cmp::Reverse(b.count));
            let top: Vec<String> = blame
                .iter()
                .take(10)
                .map(|b| format!("{}:{}", b.phone, b.count))
                .collect();
            let _ = writeln!(out, "most blamed phones: {}", top.join(" "));
        }
        for m in &self.mis_syllabified {
            let _ = writeln!(
                out,
                "  {}\tgold {}\tgot {}",
                m.orthography, m.gold, m.predicted
            );
        }
        out
    }
}

/// Where each fold's category map comes from.
#[derive(Debug, Clone)]
pub enum MapSource {
    Fixed(CategoryMap),
    /// Each phone of the corpus in its own category.
    Identity,
    /// Run the genetic algorithm on each fold's training portion.
    Evolve(GaConfig),
}

#[derive(Debug, Clone, Serialize)]
pub struct FoldOutcome {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub state_count: usize,
    /// Held-out fitness of the evolved map, when the map was evolved.
    pub evolved_fitness: Option<f64>,
    #[serde(skip)]
    pub map: CategoryMap,
    pub report: EvalReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossValidation {
    pub folds: Vec<FoldOutcome>,
    pub mean_accuracy: f64,
    /// Population standard deviation of per-fold word accuracy.
    pub stddev_accuracy: f64,
}

impl CrossValidation {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.folds {
            let _ = write!(
                out,
                "fold {}: accuracy {:.4} ({} test words, {} states)",
                f.fold, f.report.word_accuracy, f.test_size, f.state_count
            );
            if let Some(fit) = f.evolved_fitness {
                let _ = write!(out, ", evolved fitness {fit:.4}");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "mean accuracy {:.4} (sd {:.4}) over {} folds",
            self.mean_accuracy,
            self.stddev_accuracy,
            self.folds.len()
        );
        out
    }
}

/// Trains on `k - 1` folds and tests on the remaining one, for every fold.
/// Evolved maps only ever see their fold's training words.
pub fn cross_validate(
    corpus: &Corpus,
    source: &MapSource,
    k: usize,
    seed: u64,
    alpha: f64,
) -> Result<CrossValidation, EvalError> {
    let split = kfold_split(corpus, k, seed)?;
    let words = corpus.words();
    let mut folds = Vec::with_capacity(k);
    for fold in 0..k {
        let train_words: Vec<AnnotatedWord> = split
            .train_indices(fold)
            .into_iter()
            .map(|i| words[i].clone())
            .collect();
        let test_words: Vec<AnnotatedWord> = split
            .test_indices(fold)
            .into_iter()
            .map(|i| words[i].clone())
            .collect();
        let (map, evolved_fitness) = match source {
            MapSource::Fixed(map) => (map.clone(), None),
            MapSource::Identity => (CategoryMap::identity(Arc::clone(corpus.alphabet())), None),
            MapSource::Evolve(config) => {
                let config = GaConfig {
                    alpha,
                    seed: config.seed.wrapping_add(fold as u64),
                    ..config.clone()
                };
                let run = evolve_over(&train_words, Arc::clone(corpus.alphabet()), &config)?;
                (run.best, Some(run.best_fitness))
            }
        };
        let model = train(&train_words, &map, alpha)?;
        let report = evaluate(&model, &test_words)?;
        folds.push(FoldOutcome {
            fold,
            train_size: train_words.len(),
            test_size: test_words.len(),
            state_count: model.state_count(),
            evolved_fitness,
            map,
            report,
        });
    }
    let accuracies: Vec<f64> = folds.iter().map(|f| f.report.word_accuracy).collect();
    let mean = accuracies.iter().sum::<f64>() / k as f64;
    let var = accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / k as f64;
    Ok(CrossValidation {
        folds,
        mean_accuracy: mean,
        stddev_accuracy: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load_corpus_str;
    use crate::evolve::blame_counts;
    use crate::phonology::{parse_annotated, CategoryId, Phone};

    fn word(text: &str) -> AnnotatedWord {
        let (p, b) = parse_annotated(text).unwrap();
        AnnotatedWord::new(text.replace('-', ""), p, b).unwrap()
    }

    fn absent_map() -> CategoryMap {
        let pairs = [('{', 0), ('b', 1), ('s', 2), ('E', 0), ('n', 2), ('t', 2)];
        CategoryMap::from_pairs(
            3,
            pairs
                .iter()
                .map(|&(c, id)| (Phone::new(c).unwrap(), CategoryId(id))),
        )
        .unwrap()
    }

    #[test]
    fn perfect_predictions() {
        let words = [word("{b-sEnt")];
        let model = train(&words, &absent_map(), 0.1).unwrap();
        let report = evaluate(&model, &words).unwrap();
        assert_eq!(report.word_accuracy, 1.0);
        assert_eq!(report.boundary_precision, 1.0);
        assert_eq!(report.boundary_recall, 1.0);
        assert_eq!(report.boundary_f1, 1.0);
        assert!(report.mis_syllabified.is_empty());
        assert!(report.per_phone_blame.is_empty());
    }

    #[test]
    fn no_gold_boundaries_gives_zero_precision_and_recall() {
        let words = [word("sEnt")];
        let model = train(&words, &absent_map(), 0.1).unwrap();
        let report = evaluate(&model, &words).unwrap();
        assert_eq!(report.word_accuracy, 1.0);
        assert_eq!(
            (
                report.boundary_precision,
                report.boundary_recall,
                report.boundary_f1
            ),
            (0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn half_wrong() {
        let train_words = [word("{b-sEnt")];
        let model = train(&train_words, &absent_map(), 0.1).unwrap();
        let report = evaluate(&model, &[word("{b-sEnt"), word("{bsEnt")]).unwrap();
        assert_eq!(report.word_accuracy, 0.5);
        assert_eq!(report.error_count, 1);
        assert_eq!(report.mis_syllabified[0].gold, "{bsEnt");
        assert_eq!(report.mis_syllabified[0].predicted, "{b-sEnt");
        assert_eq!(report.confusion.total(), 10);
        assert_eq!(report.confusion.false_positive, 1);
    }

    #[test]
    fn blame_matches_evolver_attribution() {
        let model = train(&[word("{b-sEnt")], &absent_map(), 0.1).unwrap();
        let words = [word("{bsE-nt"), word("{-bsEnt"), word("t")];
        let report = evaluate(&model, &words).unwrap();
        let counts = blame_counts(&model, &words).unwrap();
        let from_report: Vec<u64> = model
            .map()
            .alphabet()
            .iter()
            .map(|p| {
                report
                    .per_phone_blame
                    .iter()
                    .find(|b| b.phone == p.symbol())
                    .map_or(0, |b| b.count)
            })
            .collect();
        assert_eq!(from_report, counts);
    }

    #[test]
    fn empty_evaluation_set() {
        let model = train(&[word("{b-sEnt")], &absent_map(), 0.1).unwrap();
        assert!(matches!(
            evaluate(&model, &[]),
            Err(EvalError::EmptyWordSet)
        ));
    }

    #[test]
    fn two_fold_mean() {
        let corpus = load_corpus_str("a\tba-ta\nb\tta-ba\nc\tbat\nd\ttab\n").unwrap();
        let cv = cross_validate(&corpus, &MapSource::Identity, 2, 5, 0.1).unwrap();
        assert_eq!(cv.folds.len(), 2);
        let mean = (cv.folds[0].report.word_accuracy + cv.folds[1].report.word_accuracy) / 2.0;
        assert_eq!(cv.mean_accuracy, mean);
        assert!(cv
            .folds
            .iter()
            .all(|f| f.test_size == 2 && f.state_count == 6));
    }
}
