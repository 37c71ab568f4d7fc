//! Evolves a 12-category map on the bundled mini corpus and prints the
//! per-generation fitness trace next to the identity-map baseline.
//!
//! cargo run --release --example learning_curve -- [generations] [population] [seed]

use std::sync::Arc;

use phonocat::evolve::{fitness, holdout_split};
use phonocat::{evolve, load_corpus, CategoryMap, GaConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/mini_corpus.tsv");
    let corpus = load_corpus(std::io::BufReader::new(std::fs::File::open(path)?))?;
    let config = GaConfig {
        max_generations: args.first().copied().unwrap_or(40) as usize,
        population_size: args.get(1).copied().unwrap_or(30) as usize,
        seed: args.get(2).copied().unwrap_or(1),
        ..GaConfig::default()
    };
    let (train, holdout) = holdout_split(corpus.words(), &config);
    let identity = CategoryMap::identity(Arc::clone(corpus.alphabet()));
    let baseline = fitness(&identity, &train, &holdout, config.alpha)?;
    println!(
        "identity baseline {baseline:.4} ({} train / {} holdout)",
        train.len(),
        holdout.len()
    );
    let run = evolve(corpus.words(), &config)?;
    print!("{}", run.history.to_csv());
    println!("best {:.4}", run.best_fitness);
    print!("{}", run.best.to_text());
    Ok(())
}
