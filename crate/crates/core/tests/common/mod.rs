#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use phonocat::corpus::load_corpus_str;
use phonocat::hmm::HmmModel;
use phonocat::phonology::parse_phones;
use phonocat::{
    parse_annotated, AnnotatedWord, CategoryId, CategoryMap, Corpus, Observation, Phone,
    PhoneAlphabet,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn mini_corpus() -> Corpus {
    let text = std::fs::read_to_string(data_path("mini_corpus.tsv")).expect("mini corpus present");
    load_corpus_str(&text).expect("mini corpus loads")
}

pub fn conventional_map() -> CategoryMap {
    let text = std::fs::read_to_string(data_path("conventional_disc.map")).expect("map present");
    CategoryMap::from_text(&text).expect("map parses")
}

/// `"{b-sEnt"` -> annotated word with orthography `"{bsEnt"`.
pub fn word(text: &str) -> AnnotatedWord {
    let (phones, bits) = parse_annotated(text).unwrap();
    AnnotatedWord::new(text.replace('-', ""), phones, bits).unwrap()
}

pub fn phones(text: &str) -> Vec<Phone> {
    parse_phones(text).unwrap()
}

/// Three classes: vowels a, `b` alone, other consonants c.
pub fn absent_map() -> CategoryMap {
    let pairs = [('{', 0), ('b', 1), ('s', 2), ('E', 0), ('n', 2), ('t', 2)];
    CategoryMap::from_pairs(
        3,
        pairs
            .iter()
            .map(|&(p, c)| (Phone::new(p).unwrap(), CategoryId(c))),
    )
    .unwrap()
}

/// Map over `k` placeholder phones `a`, `b`, ... with identity genes.
pub fn placeholder_map(k: usize) -> CategoryMap {
    let alphabet: PhoneAlphabet = (0..k)
        .map(|i| Phone::new((b'a' + i as u8) as char).unwrap())
        .collect();
    CategoryMap::identity(Arc::new(alphabet))
}

pub fn random_model<R: Rng>(rng: &mut R, k: usize, max_count: u64, alpha: f64) -> HmmModel {
    let states = 2 * k;
    let mut draw = |n: usize| {
        (0..n)
            .map(|_| rng.gen_range(0..=max_count))
            .collect::<Vec<u64>>()
    };
    let initial = draw(states);
    let transition = draw(states * states);
    let emission = draw(states * k);
    HmmModel::from_counts(placeholder_map(k), alpha, initial, transition, emission).unwrap()
}

/// Observations of a random category string with `word_len` phones.
pub fn random_observations<R: Rng>(rng: &mut R, k: usize, word_len: usize) -> Vec<Observation> {
    let cats: Vec<CategoryId> = (0..word_len)
        .map(|_| CategoryId(rng.gen_range(0..k) as u16))
        .collect();
    cats.windows(2)
        .map(|w| Observation {
            left: w[0],
            right: w[1],
        })
        .collect()
}

/// Joint score of a bit path in decoder units.
pub fn score_path(model: &HmmModel, obs: &[Observation], bits: &[bool]) -> i64 {
    let state = |t: usize| phonocat::HiddenState::new(obs[t].left, bits[t]);
    let mut score = model.score_initial(state(0)) + model.score_emission(state(0), obs[0]).unwrap();
    for (t, &o) in obs.iter().enumerate().skip(1) {
        score += model.score_transition(state(t - 1), state(t));
        score += model.score_emission(state(t), o).unwrap();
    }
    score
}

/// Exhaustive decode; among equal scores the lexicographically smallest path
/// (false < true) wins because paths are visited in that order.
pub fn brute_force_decode(model: &HmmModel, obs: &[Observation]) -> Vec<bool> {
    let m = obs.len();
    let mut best: Option<(i64, Vec<bool>)> = None;
    for code in 0u64..(1 << m) {
        let bits: Vec<bool> = (0..m).map(|t| (code >> (m - 1 - t)) & 1 == 1).collect();
        let score = score_path(model, obs, &bits);
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, bits));
        }
    }
    best.unwrap().1
}

pub fn sample_words<R: Rng>(rng: &mut R, corpus: &Corpus, n: usize) -> Vec<AnnotatedWord> {
    rand::seq::index::sample(rng, corpus.len(), n.min(corpus.len()))
        .into_iter()
        .map(|i| corpus.words()[i].clone())
        .collect()
}

pub fn random_map<R: Rng>(rng: &mut R, alphabet: &Arc<PhoneAlphabet>, k: usize) -> CategoryMap {
    let genes = (0..alphabet.len())
        .map(|_| CategoryId(rng.gen_range(0..k) as u16))
        .collect();
    CategoryMap::new(k, alphabet.clone(), genes).unwrap()
}

pub fn random_permutation<R: Rng>(rng: &mut R, k: usize) -> Vec<u16> {
    let mut perm: Vec<u16> = (0..k as u16).collect();
    perm.shuffle(rng);
    perm
}
