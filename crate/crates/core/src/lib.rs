//! Syllabification of phonetic transcriptions.
//!
//! Phones are first collapsed into a small number of categories by a
//! [`CategoryMap`]. A first-order HMM over category bigrams then decides, for
//! each gap between adjacent phones, whether a syllable boundary falls there.
//! The category map itself can be learned with the genetic algorithm in
//! [`evolve`], using held-out syllabification accuracy as fitness.

pub mod corpus;
pub mod eval;
pub mod evolve;
pub mod hmm;
pub mod phonology;
pub mod rng;

pub use corpus::{
    import_celex, kfold_split, load_corpus, CelexImport, Corpus, CorpusError, FoldSplit,
};
pub use eval::{cross_validate, evaluate, CrossValidation, EvalError, EvalReport, MapSource};
pub use evolve::{evolve, Evolution, EvolutionHistory, EvolveError, GaConfig};
pub use hmm::{train, HiddenState, HmmError, HmmModel, Observation};
pub use phonology::{
    categorize, parse_annotated, render, AnnotatedWord, CategoryId, CategoryMap, Phone,
    PhoneAlphabet, PhonologyError, Syllabification,
};
