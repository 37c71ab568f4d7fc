//! First-order HMM over category bigrams.
//!
//! Each inter-phone gap `t` of a word is one time step. Its observation is
//! the category bigram `(c_t, c_{t+1})` and its hidden state is the pair
//! `(c_t, boundary bit)`, so a model over `k` categories has `2k` states.
//! A state can only emit bigrams whose left category equals its own.
//!
//! Training is supervised counting. Probabilities are additively smoothed
//! from the stored integer counts and only ever used in log space.

use std::fmt::Write as _;

use thiserror::Error;

use crate::phonology::{
    categorize, AnnotatedWord, CategoryId, CategoryMap, Phone, PhonologyError, Syllabification,
};

pub const DEFAULT_ALPHA: f64 = 0.1;
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Fixed-point units per nat used by the decoder.
///
/// Each smoothed log probability is rounded once to an integer number of
/// units; path scores are integer sums and therefore exact and independent
/// of summation order. Summing rounded floats instead lets a strictly worse
/// prefix catch up through rounding, which breaks the tie rule.
pub const SCORE_UNITS_PER_NAT: f64 = 4_294_967_296.0;

fn to_units(log_p: f64) -> i64 {
    (log_p * SCORE_UNITS_PER_NAT).round() as i64
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HmmError {
    #[error("word needs at least two phones to form a bigram")]
    WordTooShort,
    #[error("{categories} categories do not fit {bits} boundary bits")]
    ShapeMismatch { categories: usize, bits: usize },
    #[error("no training word has two or more phones")]
    NoTrainableWords,
    #[error("smoothing constant must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error("count table {table} has {found} entries, expected {expected}")]
    TableSize {
        table: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("model file line {line}: {cause}")]
    ModelFormat { line: usize, cause: String },
    #[error(transparent)]
    Phonology(#[from] PhonologyError),
}

/// The category bigram spanning one gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Observation {
    pub left: CategoryId,
    pub right: CategoryId,
}

/// Left category of a gap together with its boundary bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HiddenState {
    pub cat: CategoryId,
    pub boundary: bool,
}

impl HiddenState {
    pub fn new(cat: CategoryId, boundary: bool) -> Self {
        HiddenState { cat, boundary }
    }

    /// Dense index `2 * cat + bit`.
    pub fn index(self) -> usize {
        2 * self.cat.index() + usize::from(self.boundary)
    }

    pub fn from_index(index: usize) -> Self {
        HiddenState {
            cat: CategoryId((index / 2) as u16),
            boundary: index % 2 == 1,
        }
    }
}

pub fn encode_observations(categories: &[CategoryId]) -> Result<Vec<Observation>, HmmError> {
    if categories.len() < 2 {
        return Err(HmmError::WordTooShort);
    }
    Ok(categories
        .windows(2)
        .map(|w| Observation {
            left: w[0],
            right: w[1],
        })
        .collect())
}

pub fn encode_states(
    categories: &[CategoryId],
    boundaries: &[bool],
) -> Result<Vec<HiddenState>, HmmError> {
    if boundaries.is_empty() || boundaries.len() + 1 != categories.len() {
        return Err(HmmError::ShapeMismatch {
            categories: categories.len(),
            bits: boundaries.len(),
        });
    }
    Ok(categories
        .iter()
        .zip(boundaries)
        .map(|(&cat, &boundary)| HiddenState { cat, boundary })
        .collect())
}

/// Count tables plus the smoothed log-probability tables derived from them.
///
/// Only the counts, `alpha` and the category map are persisted; the log
/// tables are recomputed on construction.
#[derive(Debug, Clone)]
pub struct HmmModel {
    k: usize,
    alpha: f64,
    map: CategoryMap,
    initial: Vec<u64>,
    // [from * 2k + to]
    transition: Vec<u64>,
    // [state * k + right]; the left category is implied by the state
    emission: Vec<u64>,
    log_initial: Vec<f64>,
    log_transition: Vec<f64>,
    log_emission: Vec<f64>,
    units_initial: Vec<i64>,
    units_transition: Vec<i64>,
    units_emission: Vec<i64>,
}

impl PartialEq for HmmModel {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.alpha.to_bits() == other.alpha.to_bits()
            && self.map == other.map
            && self.initial == other.initial
            && self.transition == other.transition
            && self.emission == other.emission
    }
}

impl HmmModel {
    /// A model with all counts zero: every probability is pure smoothing.
    pub fn untrained(map: CategoryMap, alpha: f64) -> Result<Self, HmmError> {
        let k = map.k();
        let states = 2 * k;
        Self::from_counts(
            map,
            alpha,
            vec![0; states],
            vec![0; states * states],
            vec![0; states * k],
        )
    }

    /// Builds a model from raw count tables laid out as documented on the
    /// struct fields.
    pub fn from_counts(
        map: CategoryMap,
        alpha: f64,
        initial: Vec<u64>,
        transition: Vec<u64>,
        emission: Vec<u64>,
    ) -> Result<Self, HmmError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(HmmError::BadAlpha(alpha));
        }
        let k = map.k();
        let states = 2 * k;
        for (table, expected, found) in [
            ("initial", states, initial.len()),
            ("transition", states * states, transition.len()),
            ("emission", states * k, emission.len()),
        ] {
            if expected != found {
                return Err(HmmError::TableSize {
                    table,
                    expected,
                    found,
                });
            }
        }
        let mut model = HmmModel {
            k,
            alpha,
            map,
            initial,
            transition,
            emission,
            log_initial: Vec::new(),
            log_transition: Vec::new(),
            log_emission: Vec::new(),
            units_initial: Vec::new(),
            units_transition: Vec::new(),
            units_emission: Vec::new(),
        };
        model.rebuild_log_tables();
        Ok(model)
    }

    fn rebuild_log_tables(&mut self) {
        let states = 2 * self.k;
        let alpha = self.alpha;
        let smooth = |counts: &[u64], support: usize| -> Vec<f64> {
            let total: u64 = counts.iter().sum();
            let denom = total as f64 + support as f64 * alpha;
            counts
                .iter()
                .map(|&c| ((c as f64 + alpha) / denom).ln())
                .collect()
        };
        self.log_initial = smooth(&self.initial, states);
        self.log_transition = self
            .transition
            .chunks(states)
            .flat_map(|row| smooth(row, states))
            .collect();
        self.log_emission = self
            .emission
            .chunks(self.k)
            .flat_map(|row| smooth(row, self.k))
            .collect();
        let units = |table: &[f64]| table.iter().map(|&x| to_units(x)).collect::<Vec<_>>();
        self.units_initial = units(&self.log_initial);
        self.units_transition = units(&self.log_transition);
        self.units_emission = units(&self.log_emission);
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn map(&self) -> &CategoryMap {
        &self.map
    }

    /// Size of the hidden state inventory, `2k`.
    pub fn state_count(&self) -> usize {
        2 * self.k
    }

    pub fn initial_count(&self, s: HiddenState) -> u64 {
        self.initial[s.index()]
    }

    pub fn transition_count(&self, from: HiddenState, to: HiddenState) -> u64 {
        self.transition[from.index() * self.state_count() + to.index()]
    }

    /// Always zero when `o.left != s.cat`.
    pub fn emission_count(&self, s: HiddenState, o: Observation) -> u64 {
        if o.left != s.cat {
            return 0;
        }
        self.emission[s.index() * self.k + o.right.index()]
    }

    /// Smoothed over all `2k` states.
    pub fn log_initial(&self, s: HiddenState) -> f64 {
        self.log_initial[s.index()]
    }

    /// Smoothed over all `2k` successor states.
    pub fn log_transition(&self, from: HiddenState, to: HiddenState) -> f64 {
        self.log_transition[from.index() * self.state_count() + to.index()]
    }

    /// Smoothed over the `k` bigrams sharing the state's category; any other
    /// bigram has probability zero.
    pub fn log_emission(&self, s: HiddenState, o: Observation) -> f64 {
        if o.left != s.cat {
            return f64::NEG_INFINITY;
        }
        self.log_emission[s.index() * self.k + o.right.index()]
    }

    /// [`Self::log_initial`] in decoder units.
    pub fn score_initial(&self, s: HiddenState) -> i64 {
        self.units_initial[s.index()]
    }

    pub fn score_transition(&self, from: HiddenState, to: HiddenState) -> i64 {
        self.units_transition[from.index() * self.state_count() + to.index()]
    }

    /// `None` for a bigram the state cannot emit.
    pub fn score_emission(&self, s: HiddenState, o: Observation) -> Option<i64> {
        (o.left == s.cat).then(|| self.units_emission[s.index() * self.k + o.right.index()])
    }

    /// Most probable boundary bits for an observation sequence.
    ///
    /// At step `t` only the states `(o_t.left, 0)` and `(o_t.left, 1)` are
    /// admissible. Among equal-scoring paths the one that is smallest in
    /// lexicographic bit order wins, i.e. bit 0 at the earliest difference.
    pub fn viterbi(&self, observations: &[Observation]) -> Vec<bool> {
        assert!(
            !observations.is_empty(),
            "viterbi needs at least one observation"
        );
        let state = |t: usize, bit: usize| HiddenState::new(observations[t].left, bit == 1);

        // Admissible states always emit their own observation.
        let emit = |s: HiddenState, t: usize| {
            self.units_emission[s.index() * self.k + observations[t].right.index()]
        };
        let mut score = [0i64; 2];
        for (bit, slot) in score.iter_mut().enumerate() {
            let s = state(0, bit);
            *slot = self.score_initial(s) + emit(s, 0);
        }
        // `zero_first`: the best path ending in bit 0 sorts before the one
        // ending in bit 1. They differ at least in the final bit.
        let mut zero_first = true;
        let mut back: Vec<[u8; 2]> = Vec::with_capacity(observations.len());
        back.push([0, 1]);

        for t in 1..observations.len() {
            let mut next = [0i64; 2];
            let mut pred = [0u8; 2];
            for bit in 0..2 {
                let s = state(t, bit);
                let via0 = score[0] + self.score_transition(state(t - 1, 0), s);
                let via1 = score[1] + self.score_transition(state(t - 1, 1), s);
                let from = if via0 > via1 {
                    0
                } else if via1 > via0 {
                    1
                } else if zero_first {
                    0
                } else {
                    1
                };
                pred[bit] = from;
                next[bit] = if from == 0 { via0 } else { via1 } + emit(s, t);
            }
            zero_first = if pred[0] == pred[1] {
                true
            } else {
                (pred[0] == 0) == zero_first
            };
            score = next;
            back.push(pred);
        }

        let mut bit = if score[0] > score[1] {
            0
        } else if score[1] > score[0] {
            1
        } else if zero_first {
            0
        } else {
            1
        };
        let mut bits = vec![false; observations.len()];
        for t in (0..observations.len()).rev() {
            bits[t] = bit == 1;
            bit = back[t][bit] as usize;
        }
        bits
    }

    pub fn syllabify(&self, phones: &[Phone]) -> Result<Syllabification, HmmError> {
        if phones.is_empty() {
            return Err(PhonologyError::EmptyWord.into());
        }
        let categories = categorize(phones, &self.map)?;
        let bits = if categories.len() == 1 {
            Vec::new()
        } else {
            self.viterbi(&encode_observations(&categories)?)
        };
        Ok(Syllabification::new(phones.to_vec(), bits)?)
    }

    /// Serializes counts, `alpha` and the category map.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "version={MODEL_FORMAT_VERSION}");
        let _ = writeln!(out, "k={}", self.k);
        let _ = writeln!(out, "alpha={}", self.alpha);
        out.push_str("[map]\n");
        out.push_str(&self.map.to_text());
        out.push_str("[initial]\n");
        for (i, &c) in self.initial.iter().enumerate() {
            if c > 0 {
                let _ = writeln!(out, "{}\t{c}", state_label(HiddenState::from_index(i)));
            }
        }
        out.push_str("[transition]\n");
        let states = self.state_count();
        for (i, &c) in self.transition.iter().enumerate() {
            if c > 0 {
                let from = HiddenState::from_index(i / states);
                let to = HiddenState::from_index(i % states);
                let _ = writeln!(out, "{}\t{}\t{c}", state_label(from), state_label(to));
            }
        }
        out.push_str("[emission]\n");
        for (i, &c) in self.emission.iter().enumerate() {
            if c > 0 {
                let s = HiddenState::from_index(i / self.k);
                let right = i % self.k;
                let _ = writeln!(out, "{}\t{},{right}\t{c}", state_label(s), s.cat);
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, HmmError> {
        ModelReader::default().read(text)
    }
}

fn state_label(s: HiddenState) -> String {
    format!("{}:{}", s.cat, u8::from(s.boundary))
}

/// Counts every training word of two or more phones under `map`.
pub fn train(words: &[AnnotatedWord], map: &CategoryMap, alpha: f64) -> Result<HmmModel, HmmError> {
    let mut model = HmmModel::untrained(map.clone(), alpha)?;
    let states = model.state_count();
    let k = model.k;
    let mut trained = 0usize;
    for word in words {
        if word.len() < 2 {
            continue;
        }
        let cats = categorize(word.phones(), map)?;
        let path = encode_states(&cats, word.boundaries())?;
        let obs = encode_observations(&cats)?;
        model.initial[path[0].index()] += 1;
        for pair in path.windows(2) {
            model.transition[pair[0].index() * states + pair[1].index()] += 1;
        }
        for (s, o) in path.iter().zip(&obs) {
            model.emission[s.index() * k + o.right.index()] += 1;
        }
        trained += 1;
    }
    if trained == 0 {
        return Err(HmmError::NoTrainableWords);
    }
    model.rebuild_log_tables();
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Header,
    Map,
    Initial,
    Transition,
    Emission,
}

#[derive(Default)]
struct ModelReader {
    version: Option<u32>,
    k: Option<usize>,
    alpha: Option<f64>,
    map_text: String,
    initial: Vec<(HiddenState, u64)>,
    transition: Vec<(HiddenState, HiddenState, u64)>,
    emission: Vec<(HiddenState, Observation, u64)>,
}

impl ModelReader {
    fn read(mut self, text: &str) -> Result<HmmModel, HmmError> {
        let mut section = Section::Header;
        let mut map_first_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |cause: String| HmmError::ModelFormat {
                line: line_no,
                cause,
            };
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = match name {
                    "map" => {
                        map_first_line = line_no;
                        Section::Map
                    }
                    "initial" => Section::Initial,
                    "transition" => Section::Transition,
                    "emission" => Section::Emission,
                    other => return Err(err(format!("unknown section [{other}]"))),
                };
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match section {
                Section::Header => self.header(line).map_err(err)?,
                Section::Map => {
                    self.map_text.push_str(line);
                    self.map_text.push('\n');
                }
                Section::Initial => match fields.as_slice() {
                    [s, c] => self
                        .initial
                        .push((parse_state(s).map_err(err)?, parse_count(c).map_err(err)?)),
                    _ => return Err(err("expected `state<TAB>count`".into())),
                },
                Section::Transition => match fields.as_slice() {
                    [a, b, c] => self.transition.push((
                        parse_state(a).map_err(err)?,
                        parse_state(b).map_err(err)?,
                        parse_count(c).map_err(err)?,
                    )),
                    _ => return Err(err("expected `state<TAB>state<TAB>count`".into())),
                },
                Section::Emission => match fields.as_slice() {
                    [s, o, c] => self.emission.push((
                        parse_state(s).map_err(err)?,
                        parse_observation(o).map_err(err)?,
                        parse_count(c).map_err(err)?,
                    )),
                    _ => return Err(err("expected `state<TAB>observation<TAB>count`".into())),
                },
            }
        }
        let missing = |what: &str| HmmError::ModelFormat {
            line: 0,
            cause: format!("missing {what}"),
        };
        let version = self.version.ok_or_else(|| missing("version"))?;
        if version != MODEL_FORMAT_VERSION {
            return Err(HmmError::ModelFormat {
                line: 1,
                cause: format!("unsupported version {version}"),
            });
        }
        let k = self.k.ok_or_else(|| missing("k"))?;
        let alpha = self.alpha.ok_or_else(|| missing("alpha"))?;
        if self.map_text.is_empty() {
            return Err(missing("[map] section"));
        }
        let map = CategoryMap::from_text(&self.map_text).map_err(|e| HmmError::ModelFormat {
            line: map_first_line,
            cause: format!("category map: {e}"),
        })?;
        if map.k() != k {
            return Err(HmmError::ModelFormat {
                line: map_first_line,
                cause: format!("map has k={} but header says k={k}", map.k()),
            });
        }
        let states = 2 * k;
        let in_range = |s: HiddenState| s.cat.index() < k;
        let bad = |what: &str| HmmError::ModelFormat {
            line: 0,
            cause: format!("{what} out of range for k={k}"),
        };
        let mut initial = vec![0; states];
        for (s, c) in self.initial {
            if !in_range(s) {
                return Err(bad("initial state"));
            }
            initial[s.index()] += c;
        }
        let mut transition = vec![0; states * states];
        for (a, b, c) in self.transition {
            if !in_range(a) || !in_range(b) {
                return Err(bad("transition state"));
            }
            transition[a.index() * states + b.index()] += c;
        }
        let mut emission = vec![0; states * k];
        for (s, o, c) in self.emission {
            if !in_range(s) || o.right.index() >= k {
                return Err(bad("emission entry"));
            }
            if o.left != s.cat {
                return Err(HmmError::ModelFormat {
                    line: 0,
                    cause: format!(
                        "emission of {},{} from state {}",
                        o.left,
                        o.right,
                        state_label(s)
                    ),
                });
            }
            emission[s.index() * k + o.right.index()] += c;
        }
        HmmModel::from_counts(map, alpha, initial, transition, emission)
    }

    fn header(&mut self, line: &str) -> Result<(), String> {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("expected `key=value`, found {line:?}"))?;
        let value = value.trim();
        match key.trim() {
            "version" => {
                self.version = Some(value.parse().map_err(|e| format!("bad version: {e}"))?)
            }
            "k" => self.k = Some(value.parse().map_err(|e| format!("bad k: {e}"))?),
            "alpha" => self.alpha = Some(value.parse().map_err(|e| format!("bad alpha: {e}"))?),
            other => return Err(format!("unknown header key {other:?}")),
        }
        Ok(())
    }
}

fn parse_state(text: &str) -> Result<HiddenState, String> {
    let (cat, bit) = text
        .split_once(':')
        .ok_or_else(|| format!("bad state {text:?}"))?;
    let cat = cat
        .parse::<u16>()
        .map_err(|_| format!("bad state {text:?}"))?;
    let boundary = match bit {
        "0" => false,
        "1" => true,
        _ => return Err(format!("bad boundary bit in state {text:?}")),
    };
    Ok(HiddenState::new(CategoryId(cat), boundary))
}

fn parse_observation(text: &str) -> Result<Observation, String> {
    let (l, r) = text
        .split_once(',')
        .ok_or_else(|| format!("bad observation {text:?}"))?;
    let left = l
        .parse::<u16>()
        .map_err(|_| format!("bad observation {text:?}"))?;
    let right = r
        .parse::<u16>()
        .map_err(|_| format!("bad observation {text:?}"))?;
    Ok(Observation {
        left: CategoryId(left),
        right: CategoryId(right),
    })
}

fn parse_count(text: &str) -> Result<u64, String> {
    text.trim()
        .parse::<u64>()
        .map_err(|e| format!("bad count {text:?}: {e}"))
}
