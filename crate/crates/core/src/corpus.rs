//! Syllabified lexicons: loading, CELEX import and k-fold splitting.
//!
//! The portable corpus format is UTF-8 text with one entry per line,
//! `orthography<TAB>syllabified-transcription`. Blank lines and lines starting
//! with `#` are ignored; fields past the second are ignored too.

use std::collections::HashSet;
use std::io::BufRead;
use std::sync::Arc;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::phonology::{
    parse_annotated, AnnotatedWord, PhoneAlphabet, PhonologyError, COMMENT_MARKER,
};
use crate::rng::{self, Purpose};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {cause}")]
    Parse { line: usize, cause: PhonologyError },
    #[error("line {0}: expected `orthography<TAB>transcription`")]
    MissingTab(usize),
    #[error("corpus contains no words")]
    EmptyCorpus,
    #[error("line {0}: too few fields")]
    MissingField(usize),
    #[error("every line was skipped ({0} skipped)")]
    AllLinesSkipped(usize),
    #[error("need at least {needed} words, have {have}")]
    TooFewWords { needed: usize, have: usize },
    #[error("fold count must be at least 2, got {0}")]
    BadFoldCount(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A validated, deduplicated syllabified lexicon.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    words: Vec<AnnotatedWord>,
    alphabet: Arc<PhoneAlphabet>,
}

impl Corpus {
    /// Builds a corpus, dropping exact `(phones, boundaries)` duplicates and
    /// keeping the first occurrence.
    pub fn from_words(words: impl IntoIterator<Item = AnnotatedWord>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut alphabet = PhoneAlphabet::new();
        for word in words {
            if !seen.insert((word.phones().to_vec(), word.boundaries().to_vec())) {
                continue;
            }
            for &p in word.phones() {
                alphabet.insert(p);
            }
            kept.push(word);
        }
        if kept.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        Ok(Corpus {
            words: kept,
            alphabet: Arc::new(alphabet),
        })
    }

    pub fn words(&self) -> &[AnnotatedWord] {
        &self.words
    }

    pub fn alphabet(&self) -> &Arc<PhoneAlphabet> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Renders the corpus back to the portable text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for w in &self.words {
            out.push_str(&w.orthography);
            out.push('\t');
            out.push_str(&w.render());
            out.push('\n');
        }
        out
    }
}

pub fn load_corpus<R: BufRead>(source: R) -> Result<Corpus, CorpusError> {
    let mut words = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with(COMMENT_MARKER) {
            continue;
        }
        let mut fields = line.split('\t');
        let orthography = fields.next().unwrap_or_default();
        let transcription = fields.next().ok_or(CorpusError::MissingTab(line_no))?;
        let (phones, boundaries) =
            parse_annotated(transcription).map_err(|cause| CorpusError::Parse {
                line: line_no,
                cause,
            })?;
        let word = AnnotatedWord::new(orthography, phones, boundaries).map_err(|cause| {
            CorpusError::Parse {
                line: line_no,
                cause,
            }
        })?;
        words.push(word);
    }
    Corpus::from_words(words)
}

pub fn load_corpus_str(text: &str) -> Result<Corpus, CorpusError> {
    load_corpus(text.as_bytes())
}

/// Field layout of a backslash-delimited CELEX lexicon file.
#[derive(Debug, Clone)]
pub struct CelexImport {
    /// Field holding the syllabified DISC transcription.
    pub field_index: usize,
    /// Field used as the orthography column.
    pub key_index: usize,
    /// Characters deleted from the transcription before validation.
    pub strip_chars: Vec<char>,
}

impl CelexImport {
    pub fn new(field_index: usize) -> Self {
        CelexImport {
            field_index,
            key_index: 0,
            strip_chars: vec!['\'', '"', '[', ']'],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportOutcome {
    /// Portable corpus text.
    pub text: String,
    pub emitted: usize,
    pub skipped: usize,
}

/// Converts a CELEX-style `\`-delimited lexicon into portable corpus text.
/// Entries whose stripped transcription is not a valid syllabified word are
/// skipped and counted.
pub fn import_celex<R: BufRead>(
    source: R,
    layout: &CelexImport,
) -> Result<ImportOutcome, CorpusError> {
    let needed = layout.field_index.max(layout.key_index) + 1;
    let mut out = ImportOutcome {
        text: String::new(),
        emitted: 0,
        skipped: 0,
    };
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\\').collect();
        if fields.len() < needed {
            return Err(CorpusError::MissingField(i + 1));
        }
        let orthography = fields[layout.key_index];
        let transcription: String = fields[layout.field_index]
            .chars()
            .filter(|c| !layout.strip_chars.contains(c))
            .collect();
        if orthography.contains('\t') || orthography.starts_with(COMMENT_MARKER) {
            out.skipped += 1;
            continue;
        }
        if parse_annotated(&transcription).is_err() {
            out.skipped += 1;
            continue;
        }
        out.text.push_str(orthography);
        out.text.push('\t');
        out.text.push_str(&transcription);
        out.text.push('\n');
        out.emitted += 1;
    }
    if out.emitted == 0 {
        return Err(CorpusError::AllLinesSkipped(out.skipped));
    }
    Ok(out)
}

/// Assignment of corpus indices to cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    k: usize,
    assignments: Vec<usize>,
}

impl FoldSplit {
    /// Seeded shuffle of `0..len`, dealt round-robin into `k` folds.
    pub fn shuffled(len: usize, k: usize, seed: u64) -> Result<FoldSplit, CorpusError> {
        if k < 2 {
            return Err(CorpusError::BadFoldCount(k));
        }
        if len < k {
            return Err(CorpusError::TooFewWords {
                needed: k,
                have: len,
            });
        }
        let mut order: Vec<usize> = (0..len).collect();
        order.shuffle(&mut rng::stream(seed, Purpose::FoldShuffle, 0, 0));
        let mut assignments = vec![0; len];
        for (pos, &idx) in order.iter().enumerate() {
            assignments[idx] = pos % k;
        }
        Ok(FoldSplit { k, assignments })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Fold id for each corpus index.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Seeded shuffle of the corpus indices, dealt round-robin into `k` folds.
pub fn kfold_split(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldSplit, CorpusError> {
    FoldSplit::shuffled(corpus.len(), k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus_of(n: usize) -> Corpus {
        let text: String = (0..n)
            .map(|i| format!("w{i}\ta-{}\n", char::from(b'b' + i as u8)))
            .collect();
        load_corpus_str(&text).unwrap()
    }

    #[test]
    fn loads_absent() {
        let corpus = load_corpus_str("absent\t{b-sEnt\n").unwrap();
        assert_eq!(corpus.len(), 1);
        let alphabet: String = corpus.alphabet().iter().map(|p| p.symbol()).collect();
        assert_eq!(alphabet, "{bsEnt");
        assert_eq!(corpus.words()[0].orthography, "absent");
    }

    #[test]
    fn removes_exact_duplicates_only() {
        let corpus = load_corpus_str("a\tab\na\tab\nb\tab\nc\ta-b\n").unwrap();
        assert_eq!(corpus.len(), 2);
    }

    #[test]
    fn skips_comments_and_blanks() {
        let corpus = load_corpus_str("# header\n\nabsent\t{b-sEnt\textra\n").unwrap();
        assert_eq!(corpus.len(), 1);
    }

    #[test]
    fn reports_line_numbers() {
        let err = load_corpus_str("ok\tab\nbad\tb--d\n").unwrap_err();
        assert!(matches!(
            err,
            CorpusError::Parse {
                line: 2,
                cause: PhonologyError::MalformedBoundary(_)
            }
        ));
        let err = load_corpus_str("bad\tb--d\n").unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 1, .. }));
        assert!(matches!(
            load_corpus_str("notab\n"),
            Err(CorpusError::MissingTab(1))
        ));
        assert!(matches!(
            load_corpus_str("x\ta#b\n"),
            Err(CorpusError::Parse {
                cause: PhonologyError::ReservedCharacter('#'),
                ..
            })
        ));
    }

    #[test]
    fn empty_corpus() {
        assert!(matches!(
            load_corpus_str("# nothing\n"),
            Err(CorpusError::EmptyCorpus)
        ));
    }

    #[test]
    fn text_round_trip() {
        let corpus = load_corpus_str("absent\t{b-sEnt\na\ta\nhappy\th{-pi\n").unwrap();
        assert_eq!(load_corpus_str(&corpus.to_text()).unwrap(), corpus);
    }

    #[test]
    fn celex_import_strips_and_keeps_monosyllables() {
        let src = "absent\\1\\'{b-s@nt\\x\na\\2\\a\\y\nodd\\3\\-bad\\z\n";
        let layout = CelexImport {
            field_index: 2,
            key_index: 0,
            strip_chars: vec!['\''],
        };
        let out = import_celex(src.as_bytes(), &layout).unwrap();
        assert_eq!(out.text, "absent\t{b-s@nt\na\ta\n");
        assert_eq!((out.emitted, out.skipped), (2, 1));
    }

    #[test]
    fn celex_import_errors() {
        let layout = CelexImport::new(3);
        assert!(matches!(
            import_celex("a\\b\n".as_bytes(), &layout),
            Err(CorpusError::MissingField(1))
        ));
        assert!(matches!(
            import_celex("a\\b\\c\\x y\n".as_bytes(), &layout),
            Err(CorpusError::AllLinesSkipped(1))
        ));
    }

    #[test]
    fn fold_sizes() {
        let split = kfold_split(&corpus_of(10), 2, 3).unwrap();
        assert_eq!(split.fold_sizes(), vec![5, 5]);
        let mut sizes = kfold_split(&corpus_of(7), 3, 11).unwrap().fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 3]);
    }

    #[test]
    fn fold_split_is_deterministic() {
        assert_eq!(
            FoldSplit::shuffled(50, 5, 9).unwrap(),
            FoldSplit::shuffled(50, 5, 9).unwrap()
        );
        assert_ne!(
            FoldSplit::shuffled(50, 5, 9).unwrap(),
            FoldSplit::shuffled(50, 5, 10).unwrap()
        );
    }

    #[test]
    fn fold_split_errors() {
        assert!(matches!(
            FoldSplit::shuffled(3, 1, 0),
            Err(CorpusError::BadFoldCount(1))
        ));
        assert!(matches!(
            kfold_split(&corpus_of(3), 4, 0),
            Err(CorpusError::TooFewWords { needed: 4, have: 3 })
        ));
    }

    #[test]
    fn train_and_test_partition() {
        let corpus = corpus_of(9);
        let split = kfold_split(&corpus, 3, 1).unwrap();
        for fold in 0..3 {
            let test = split.test_indices(fold);
            let train = split.train_indices(fold);
            assert!(!test.is_empty());
            assert_eq!(test.len() + train.len(), 9);
            assert!(test.iter().all(|i| !train.contains(i)));
        }
    }
}
