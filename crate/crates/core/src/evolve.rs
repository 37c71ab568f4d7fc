//! Genetic search over phone-to-category maps.
//!
//! A chromosome is a [`CategoryMap`]: one gene per phone holding its category.
//! Fitness is word accuracy on a fixed held-out slice of the training words
//! after training an HMM with that map on the rest. Each generation keeps
//! `elite_count` best maps unchanged and fills the remainder by stochastic
//! universal sampling, scattered crossover and mutation at a rate that rises
//! as the population's fitness spread shrinks. Every `refine_period`
//! generations the phone most often next to a misplaced boundary in the best
//! map's decodings is tried in every category, and the best variant replaces
//! the best map.
//!
//! All randomness comes from [`crate::rng::stream`]. Fitness evaluation runs
//! on a rayon pool but only at points where the results are gathered in a
//! fixed order, so the history does not depend on the worker count.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::hmm::{encode_observations, train, HmmError, HmmModel, DEFAULT_ALPHA};
use crate::phonology::{
    categorize, AnnotatedWord, CategoryId, CategoryMap, Phone, PhoneAlphabet, PhonologyError,
};
use crate::rng::{self, Purpose};

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("parents do not share an alphabet and category count")]
    AlphabetMismatch,
    #[error("every held-out word was syllabified correctly")]
    NoErrors,
    #[error("{0} word set is empty")]
    EmptyWordSet(&'static str),
    #[error("need at least two words of two or more phones, found {0}")]
    TooFewTrainableWords(usize),
    #[error("phone {0} is not in the chromosome's alphabet")]
    UnknownPhone(Phone),
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
    #[error(transparent)]
    Hmm(#[from] HmmError),
}

impl From<PhonologyError> for EvolveError {
    fn from(e: PhonologyError) -> Self {
        EvolveError::Hmm(e.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    /// Number of categories.
    pub k: usize,
    pub population_size: usize,
    pub max_generations: usize,
    pub elite_count: usize,
    /// Per-gene mutation probability when the population is dispersed.
    pub rate_min: f64,
    /// Per-gene mutation probability when all fitnesses coincide.
    pub rate_max: f64,
    /// Fitness standard deviation at and above which `rate_min` applies.
    pub sigma_ref: f64,
    /// Generations between refinement passes; 0 disables refinement.
    pub refine_period: usize,
    pub alpha: f64,
    pub holdout_fraction: f64,
    pub seed: u64,
    /// Stop after this many generations without a new best fitness.
    pub patience: Option<usize>,
    /// Fitness worker threads; 0 lets rayon decide. Never affects results.
    pub workers: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            k: 12,
            population_size: 100,
            max_generations: 500,
            elite_count: 2,
            rate_min: 0.01,
            rate_max: 0.15,
            sigma_ref: 0.02,
            refine_period: 10,
            alpha: DEFAULT_ALPHA,
            holdout_fraction: 0.2,
            seed: 0,
            patience: None,
            workers: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), EvolveError> {
        let fail = |msg: String| Err(EvolveError::ConfigInvalid(msg));
        if self.k == 0 || self.k > u16::MAX as usize {
            return fail(format!("k must be in 1..={}, got {}", u16::MAX, self.k));
        }
        if self.population_size < 4 {
            return fail(format!(
                "population size must be at least 4, got {}",
                self.population_size
            ));
        }
        if self.max_generations == 0 {
            return fail("generation budget must be at least 1".into());
        }
        if self.elite_count == 0 || self.elite_count >= self.population_size {
            return fail(format!(
                "elite count must be in 1..{}, got {}",
                self.population_size, self.elite_count
            ));
        }
        let unit = 0.0..=1.0;
        if !unit.contains(&self.rate_min)
            || !unit.contains(&self.rate_max)
            || self.rate_min > self.rate_max
        {
            return fail(format!(
                "mutation rates need 0 <= min <= max <= 1, got {} and {}",
                self.rate_min, self.rate_max
            ));
        }
        if !(self.sigma_ref > 0.0 && self.sigma_ref.is_finite()) {
            return fail(format!(
                "sigma_ref must be positive, got {}",
                self.sigma_ref
            ));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return fail(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return fail(format!(
                "holdout fraction must be in (0, 1), got {}",
                self.holdout_fraction
            ));
        }
        Ok(())
    }
}

/// Statistics for one generation, after any refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub stddev: f64,
    /// Rate used to breed the next generation from this one.
    pub mutation_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementEvent {
    pub generation: usize,
    pub phone: Phone,
    pub old_category: CategoryId,
    pub new_category: CategoryId,
    pub fitness_delta: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvolutionHistory {
    pub generations: Vec<GenerationRecord>,
    pub refinements: Vec<RefinementEvent>,
}

impl EvolutionHistory {
    /// `generation,best,mean,stddev,mutation_rate` rows followed by one
    /// comment line per refinement event.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("generation,best,mean,stddev,mutation_rate\n");
        for r in &self.generations {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.generation, r.best, r.mean, r.stddev, r.mutation_rate
            );
        }
        for e in &self.refinements {
            let _ = writeln!(
                out,
                "# refine generation={} phone={} from={} to={} delta={}",
                e.generation, e.phone, e.old_category, e.new_category, e.fitness_delta
            );
        }
        out
    }

    /// Number of generations whose best strictly exceeded every earlier one.
    pub fn improvements(&self) -> usize {
        self.generations
            .windows(2)
            .filter(|w| w[1].best > w[0].best)
            .count()
    }
}

/// Result of [`evolve`].
#[derive(Debug, Clone)]
pub struct Evolution {
    pub best: CategoryMap,
    pub best_fitness: f64,
    pub history: EvolutionHistory,
    pub train_words: usize,
    pub holdout_words: usize,
}

/// Draws `population_size` maps with every gene uniform over `[0, k)`.
pub fn random_population<R: Rng>(
    alphabet: &Arc<PhoneAlphabet>,
    config: &GaConfig,
    rng: &mut R,
) -> Vec<CategoryMap> {
    (0..config.population_size)
        .map(|_| {
            let genes = (0..alphabet.len())
                .map(|_| CategoryId(rng.gen_range(0..config.k) as u16))
                .collect();
            CategoryMap::new(config.k, Arc::clone(alphabet), genes).expect("genes drawn below k")
        })
        .collect()
}

/// Word accuracy on `holdout` of an HMM trained on `train` under `map`.
pub fn fitness(
    map: &CategoryMap,
    train_words: &[AnnotatedWord],
    holdout_words: &[AnnotatedWord],
    alpha: f64,
) -> Result<f64, EvolveError> {
    if train_words.is_empty() {
        return Err(EvolveError::EmptyWordSet("training"));
    }
    if holdout_words.is_empty() {
        return Err(EvolveError::EmptyWordSet("holdout"));
    }
    let model = train(train_words, map, alpha)?;
    let mut correct = 0usize;
    for word in holdout_words {
        if word.len() < 2 {
            correct += 1;
            continue;
        }
        let cats = categorize(word.phones(), map)?;
        if model.viterbi(&encode_observations(&cats)?) == word.boundaries() {
            correct += 1;
        }
    }
    Ok(correct as f64 / holdout_words.len() as f64)
}

/// Stochastic universal sampling with a random pointer offset.
///
/// Falls back to uniform weights when the fitnesses sum to zero.
pub fn sus_select<R: Rng>(fitnesses: &[f64], count: usize, rng: &mut R) -> Vec<usize> {
    let start: f64 = rng.gen();
    sus_select_at(fitnesses, count, start)
}

/// Stochastic universal sampling with an explicit offset `start` in `[0, 1)`,
/// measured in units of the pointer spacing.
///
/// Pointer `j` sits at `start + j` on the cumulative fitness line scaled so
/// that it spans `[0, count)`. Individual `i` therefore receives either
/// `floor(e)` or `ceil(e)` pointers, where `e = count * f_i / total`.
pub fn sus_select_at(fitnesses: &[f64], count: usize, start: f64) -> Vec<usize> {
    assert!(
        !fitnesses.is_empty(),
        "cannot select from an empty population"
    );
    assert!(
        fitnesses.iter().all(|f| f.is_finite() && *f >= 0.0),
        "fitnesses must be finite and non-negative"
    );
    assert!(
        (0.0..1.0).contains(&start),
        "start offset must be in [0, 1)"
    );
    let total: f64 = fitnesses.iter().sum();
    let uniform;
    let weights = if total > 0.0 {
        fitnesses
    } else {
        uniform = vec![1.0; fitnesses.len()];
        &uniform[..]
    };
    let total: f64 = weights.iter().sum();
    let scale = count as f64 / total;
    let mut edges = Vec::with_capacity(weights.len());
    let mut cum = 0.0;
    for w in weights {
        cum += w;
        edges.push(cum * scale);
    }
    let last_positive = weights
        .iter()
        .rposition(|&w| w > 0.0)
        .expect("positive total");
    edges[last_positive] = count as f64;

    let mut selected = Vec::with_capacity(count);
    let mut i = 0;
    for j in 0..count {
        let pointer = start + j as f64;
        while i < weights.len() && (weights[i] == 0.0 || pointer >= edges[i]) {
            i += 1;
        }
        selected.push(i.min(last_positive));
    }
    selected
}

/// Uniform crossover with a random mask; see [`crossover_with_mask`].
pub fn scattered_crossover<R: Rng>(
    parent0: &CategoryMap,
    parent1: &CategoryMap,
    rng: &mut R,
) -> Result<(CategoryMap, CategoryMap), EvolveError> {
    let mask: Vec<bool> = (0..parent0.genes().len()).map(|_| rng.gen()).collect();
    crossover_with_mask(parent0, parent1, &mask)
}

/// Child 0 takes parent 0's gene where the mask is clear and parent 1's where
/// it is set; child 1 takes the other parent's gene at every locus.
pub fn crossover_with_mask(
    parent0: &CategoryMap,
    parent1: &CategoryMap,
    mask: &[bool],
) -> Result<(CategoryMap, CategoryMap), EvolveError> {
    if parent0.k() != parent1.k() || parent0.alphabet() != parent1.alphabet() {
        return Err(EvolveError::AlphabetMismatch);
    }
    assert_eq!(
        mask.len(),
        parent0.genes().len(),
        "mask length must match gene count"
    );
    let (mut g0, mut g1) = (
        Vec::with_capacity(mask.len()),
        Vec::with_capacity(mask.len()),
    );
    for ((&a, &b), &swap) in parent0.genes().iter().zip(parent1.genes()).zip(mask) {
        let (x, y) = if swap { (b, a) } else { (a, b) };
        g0.push(x);
        g1.push(y);
    }
    let alphabet = parent0.alphabet();
    Ok((
        CategoryMap::new(parent0.k(), Arc::clone(alphabet), g0)?,
        CategoryMap::new(parent0.k(), Arc::clone(alphabet), g1)?,
    ))
}

/// Population standard deviation (divides by `n`).
pub fn fitness_stddev(fitnesses: &[f64]) -> f64 {
    // the rounded mean of equal values need not equal them
    if fitnesses.windows(2).all(|w| w[0] == w[1]) {
        return 0.0;
    }
    let n = fitnesses.len() as f64;
    let mean = fitnesses.iter().sum::<f64>() / n;
    (fitnesses.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// `rate_min + (rate_max - rate_min) * (1 - min(1, sigma / sigma_ref))`.
pub fn adaptive_mutation_rate(fitnesses: &[f64], config: &GaConfig) -> f64 {
    assert!(fitnesses.len() >= 2, "need at least two fitness values");
    let sigma = fitness_stddev(fitnesses);
    rate_for_spread(sigma, config)
}

pub fn rate_for_spread(sigma: f64, config: &GaConfig) -> f64 {
    let closeness = 1.0 - (sigma / config.sigma_ref).min(1.0);
    let rate = config.rate_min + (config.rate_max - config.rate_min) * closeness;
    rate.clamp(config.rate_min, config.rate_max)
}

/// Moves each gene, with probability `rate`, to a uniformly chosen different
/// category.
pub fn mutate<R: Rng>(chromosome: &CategoryMap, rate: f64, rng: &mut R) -> CategoryMap {
    assert!(
        (0.0..=1.0).contains(&rate),
        "mutation rate must be in [0, 1]"
    );
    let k = chromosome.k();
    if k == 1 {
        return chromosome.clone();
    }
    let genes = chromosome
        .genes()
        .iter()
        .map(|&g| {
            if !rng.gen_bool(rate) {
                return g;
            }
            let r = rng.gen_range(0..k as u16 - 1);
            CategoryId(if r >= g.0 { r + 1 } else { r })
        })
        .collect();
    CategoryMap::new(k, Arc::clone(chromosome.alphabet()), genes).expect("mutation stays below k")
}

/// For each phone of the model's alphabet, how many wrongly decoded gaps it
/// flanks. A gap between phones `t` and `t+1` charges both.
pub fn blame_counts(model: &HmmModel, words: &[AnnotatedWord]) -> Result<Vec<u64>, EvolveError> {
    let alphabet = model.map().alphabet();
    let mut counts = vec![0u64; alphabet.len()];
    for word in words {
        if word.len() < 2 {
            continue;
        }
        let predicted = model.syllabify(word.phones())?;
        for (gap, (p, g)) in predicted
            .boundaries()
            .iter()
            .zip(word.boundaries())
            .enumerate()
        {
            if p != g {
                for phone in &word.phones()[gap..gap + 2] {
                    let idx = alphabet
                        .index_of(*phone)
                        .ok_or(EvolveError::UnknownPhone(*phone))?;
                    counts[idx] += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// The phone involved in the most mis-syllabified gaps; ties go to the phone
/// earliest in the alphabet.
pub fn blame_phone(
    model: &HmmModel,
    holdout_words: &[AnnotatedWord],
) -> Result<Phone, EvolveError> {
    let counts = blame_counts(model, holdout_words)?;
    let mut best: Option<(usize, u64)> = None;
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 && best.is_none_or(|(_, b)| c > b) {
            best = Some((i, c));
        }
    }
    best.map(|(i, _)| model.map().alphabet().phone(i))
        .ok_or(EvolveError::NoErrors)
}

/// Result of trying one phone in every category.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub map: CategoryMap,
    pub fitness: f64,
    pub original_fitness: f64,
}

/// Evaluates `best` with `phone` moved to each of the `k` categories and
/// returns the fittest variant, preferring the lowest category id on ties.
pub fn refine_best(
    best: &CategoryMap,
    phone: Phone,
    train_words: &[AnnotatedWord],
    holdout_words: &[AnnotatedWord],
    config: &GaConfig,
) -> Result<Refinement, EvolveError> {
    let mut evaluator = Evaluator::new(train_words, holdout_words, config.alpha);
    evaluator.refine(best, phone)
}

/// Fitness evaluation with memoisation on the relabel-invariant canonical
/// form of each map.
struct Evaluator<'a> {
    train: &'a [AnnotatedWord],
    holdout: &'a [AnnotatedWord],
    alpha: f64,
    cache: HashMap<Vec<u16>, f64>,
}

impl<'a> Evaluator<'a> {
    fn new(train: &'a [AnnotatedWord], holdout: &'a [AnnotatedWord], alpha: f64) -> Self {
        Evaluator {
            train,
            holdout,
            alpha,
            cache: HashMap::new(),
        }
    }

    fn evaluate_all(&mut self, maps: &[CategoryMap]) -> Result<Vec<f64>, EvolveError> {
        let keys: Vec<Vec<u16>> = maps.iter().map(CategoryMap::canonical_genes).collect();
        let mut pending: Vec<(usize, &Vec<u16>)> = Vec::new();
        for (i, key) in keys.iter().enumerate() {
            if !self.cache.contains_key(key) && !pending.iter().any(|(_, k)| *k == key) {
                pending.push((i, key));
            }
        }
        let (train, holdout, alpha) = (self.train, self.holdout, self.alpha);
        let computed: Vec<Result<f64, EvolveError>> = pending
            .par_iter()
            .map(|&(i, _)| fitness(&maps[i], train, holdout, alpha))
            .collect();
        for ((_, key), value) in pending.iter().zip(computed) {
            self.cache.insert((*key).clone(), value?);
        }
        Ok(keys.iter().map(|k| self.cache[k]).collect())
    }

    fn refine(&mut self, best: &CategoryMap, phone: Phone) -> Result<Refinement, EvolveError> {
        let locus = best
            .alphabet()
            .index_of(phone)
            .ok_or(EvolveError::UnknownPhone(phone))?;
        let original = best.genes()[locus];
        let variants: Vec<CategoryMap> = (0..best.k())
            .map(|c| best.with_gene(locus, CategoryId(c as u16)))
            .collect();
        let scores = self.evaluate_all(&variants)?;
        let mut winner = 0;
        for (c, &s) in scores.iter().enumerate() {
            if s > scores[winner] {
                winner = c;
            }
        }
        Ok(Refinement {
            map: variants[winner].clone(),
            fitness: scores[winner],
            original_fitness: scores[original.index()],
        })
    }
}

/// Runs the genetic algorithm on `words`, evolving maps over the words' own
/// phone alphabet.
pub fn evolve(words: &[AnnotatedWord], config: &GaConfig) -> Result<Evolution, EvolveError> {
    let alphabet: PhoneAlphabet = words
        .iter()
        .flat_map(|w| w.phones().iter().copied())
        .collect();
    evolve_over(words, Arc::new(alphabet), config)
}

/// Like [`evolve`], with genes for every phone of `alphabet`, which must
/// cover `words`. Phones absent from `words` keep whatever category the
/// search leaves them in.
pub fn evolve_over(
    words: &[AnnotatedWord],
    alphabet: Arc<PhoneAlphabet>,
    config: &GaConfig,
) -> Result<Evolution, EvolveError> {
    config.validate()?;
    let trainable = words.iter().filter(|w| w.len() >= 2).count();
    if trainable < 2 {
        return Err(EvolveError::TooFewTrainableWords(trainable));
    }
    if let Some(p) = words
        .iter()
        .flat_map(|w| w.phones())
        .find(|p| !alphabet.contains(**p))
    {
        return Err(EvolveError::UnknownPhone(*p));
    }
    let (train_words, holdout_words) = holdout_split(words, config);

    let mut builder = rayon::ThreadPoolBuilder::new();
    if config.workers > 0 {
        builder = builder.num_threads(config.workers);
    }
    let pool = builder
        .build()
        .map_err(|e| EvolveError::WorkerPool(e.to_string()))?;
    let result =
        pool.install(|| run_generations(&train_words, &holdout_words, &alphabet, config))?;
    Ok(Evolution {
        best: result.0,
        best_fitness: result.1,
        history: result.2,
        train_words: train_words.len(),
        holdout_words: holdout_words.len(),
    })
}

/// Splits off the seeded holdout slice. The training side always keeps at
/// least one word of two or more phones.
pub fn holdout_split(
    words: &[AnnotatedWord],
    config: &GaConfig,
) -> (Vec<AnnotatedWord>, Vec<AnnotatedWord>) {
    let n = words.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(config.seed, Purpose::HoldoutSplit, 0, 0));
    let holdout_len = ((n as f64 * config.holdout_fraction).round() as usize).clamp(1, n - 1);
    let (holdout_idx, train_idx) = order.split_at_mut(holdout_len);
    if !train_idx.iter().any(|&i| words[i].len() >= 2) {
        if let Some(pos) = holdout_idx.iter().position(|&i| words[i].len() >= 2) {
            std::mem::swap(&mut holdout_idx[pos], &mut train_idx[0]);
        }
    }
    let pick = |idx: &[usize]| idx.iter().map(|&i| words[i].clone()).collect::<Vec<_>>();
    (pick(train_idx), pick(holdout_idx))
}

fn run_generations(
    train_words: &[AnnotatedWord],
    holdout_words: &[AnnotatedWord],
    alphabet: &Arc<PhoneAlphabet>,
    config: &GaConfig,
) -> Result<(CategoryMap, f64, EvolutionHistory), EvolveError> {
    let mut evaluator = Evaluator::new(train_words, holdout_words, config.alpha);
    let mut history = EvolutionHistory::default();
    let mut population = random_population(
        alphabet,
        config,
        &mut rng::stream(config.seed, Purpose::InitialPopulation, 0, 0),
    );
    let mut best_seen = f64::NEG_INFINITY;
    let mut stale = 0usize;

    for generation in 0..config.max_generations {
        let mut fitnesses = evaluator.evaluate_all(&population)?;

        if config.refine_period > 0 && (generation + 1) % config.refine_period == 0 {
            let leader = best_index(&fitnesses);
            let model = train(train_words, &population[leader], config.alpha)?;
            match blame_phone(&model, holdout_words) {
                Ok(phone) => {
                    let refined = evaluator.refine(&population[leader], phone)?;
                    let locus = alphabet
                        .index_of(phone)
                        .expect("blamed phone is in the alphabet");
                    history.refinements.push(RefinementEvent {
                        generation,
                        phone,
                        old_category: population[leader].genes()[locus],
                        new_category: refined.map.genes()[locus],
                        fitness_delta: refined.fitness - fitnesses[leader],
                    });
                    population[leader] = refined.map;
                    fitnesses[leader] = refined.fitness;
                }
                Err(EvolveError::NoErrors) => {}
                Err(e) => return Err(e),
            }
        }

        let rate = adaptive_mutation_rate(&fitnesses, config);
        let best = fitnesses[best_index(&fitnesses)];
        history.generations.push(GenerationRecord {
            generation,
            best,
            mean: fitnesses.iter().sum::<f64>() / fitnesses.len() as f64,
            stddev: fitness_stddev(&fitnesses),
            mutation_rate: rate,
        });

        if best > best_seen {
            best_seen = best;
            stale = 0;
        } else {
            stale += 1;
        }
        let out_of_patience = config.patience.is_some_and(|p| stale >= p);
        if generation + 1 == config.max_generations || out_of_patience {
            let leader = best_index(&fitnesses);
            return Ok((population.swap_remove(leader), fitnesses[leader], history));
        }
        population = breed(&population, &fitnesses, rate, generation, config)?;
    }
    unreachable!("the final generation returns from inside the loop")
}

/// Index of the highest fitness; the earliest wins ties.
fn best_index(fitnesses: &[f64]) -> usize {
    let mut best = 0;
    for (i, &f) in fitnesses.iter().enumerate() {
        if f > fitnesses[best] {
            best = i;
        }
    }
    best
}

fn breed(
    population: &[CategoryMap],
    fitnesses: &[f64],
    rate: f64,
    generation: usize,
    config: &GaConfig,
) -> Result<Vec<CategoryMap>, EvolveError> {
    let mut ranked: Vec<usize> = (0..population.len()).collect();
    ranked.sort_by(|&a, &b| fitnesses[b].total_cmp(&fitnesses[a]).then(a.cmp(&b)));
    let mut next: Vec<CategoryMap> = ranked[..config.elite_count]
        .iter()
        .map(|&i| population[i].clone())
        .collect();

    let needed = config.population_size - config.elite_count;
    let parent_count = needed + needed % 2;
    let mut selection_rng = rng::stream(config.seed, Purpose::Selection, generation as u64, 0);
    let mut parents = sus_select(fitnesses, parent_count, &mut selection_rng);
    parents.shuffle(&mut selection_rng);

    for (pair, couple) in parents.chunks(2).enumerate() {
        let mut rng = rng::stream(
            config.seed,
            Purpose::Breeding,
            generation as u64,
            pair as u64,
        );
        let (c0, c1) =
            scattered_crossover(&population[couple[0]], &population[couple[1]], &mut rng)?;
        for child in [c0, c1] {
            if next.len() < config.population_size {
                next.push(mutate(&child, rate, &mut rng));
            }
        }
    }
    Ok(next)
}
