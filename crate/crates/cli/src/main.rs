//! `phonocat` command-line tool.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 on a data error.

mod config_file;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::parser::ValueSource;
use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use phonocat::corpus::ImportOutcome;
use phonocat::phonology::parse_phones;
use phonocat::{
    cross_validate, evaluate, evolve, import_celex, load_corpus, train, CategoryMap, CelexImport,
    Corpus, EvolveError, GaConfig, HmmModel, MapSource,
};

/// Map bundled with the tool: conventional natural classes over DISC.
const CONVENTIONAL_MAP: &str = include_str!("../../../data/conventional_disc.map");

#[derive(Parser, Debug)]
#[command(
    name = "phonocat",
    version,
    about = "Syllabify phonetic transcriptions with a category-bigram HMM"
)]
struct Cli {
    /// File of `key = value` lines supplying defaults for the subcommand's
    /// flags; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert a backslash-delimited CELEX lexicon into a corpus file.
    ImportCelex(ImportArgs),
    /// Train a model on a syllabified corpus.
    Train(TrainArgs),
    /// Syllabify transcriptions with a trained model.
    Syllabify(SyllabifyArgs),
    /// Evolve a category map with the genetic algorithm.
    Evolve(EvolveArgs),
    /// Score a trained model against a syllabified corpus.
    Evaluate(EvaluateArgs),
    /// k-fold cross-validation with a fixed or evolved map.
    CrossValidate(CrossValidateArgs),
}

#[derive(Args, Debug)]
struct ImportArgs {
    /// CELEX lexicon file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// 1-based field holding the syllabified DISC transcription.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    field: u32,
    /// 1-based field used as the orthography column.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    key: u32,
    /// Characters deleted from transcriptions (stress and bracket marks).
    #[arg(long, default_value = "'\"[]")]
    strip: String,
    /// Corpus file to write.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Syllabified corpus file.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    /// Category map: a map file, `identity` (one category per phone) or
    /// `conventional` (bundled natural classes).
    #[arg(long)]
    map: String,
    /// Additive smoothing constant.
    #[arg(long, default_value_t = phonocat::hmm::DEFAULT_ALPHA)]
    alpha: f64,
    /// Model file to write.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["word", "stdin"]))]
struct SyllabifyArgs {
    /// Model file written by `train`.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// One transcription, one character per phone. Hyphens are ignored.
    #[arg(long)]
    word: Option<String>,
    /// Read one transcription per line from standard input.
    #[arg(long, action = ArgAction::SetTrue)]
    stdin: bool,
}

fn ga_defaults() -> GaConfig {
    GaConfig::default()
}

/// Genetic algorithm settings shared by `evolve` and `cross-validate`.
#[derive(Args, Debug, Clone)]
struct GaArgs {
    /// Number of categories, or an inclusive range such as `8..14` for one
    /// run per value (evolve only).
    #[arg(long, default_value_t = ga_defaults().k.to_string())]
    k: String,
    /// Population size (at least 4).
    #[arg(long, default_value_t = ga_defaults().population_size)]
    pop: usize,
    /// Generation budget.
    #[arg(long, default_value_t = ga_defaults().max_generations)]
    gens: usize,
    /// Maps copied unchanged into the next generation.
    #[arg(long, default_value_t = ga_defaults().elite_count)]
    elite: usize,
    /// Per-gene mutation probability when fitnesses are spread out.
    #[arg(long, default_value_t = ga_defaults().rate_min)]
    rate_min: f64,
    /// Per-gene mutation probability when fitnesses have converged.
    #[arg(long, default_value_t = ga_defaults().rate_max)]
    rate_max: f64,
    /// Fitness standard deviation at and above which `rate-min` applies.
    #[arg(long, default_value_t = ga_defaults().sigma_ref)]
    sigma_ref: f64,
    /// Generations between refinement passes on the best map (0 disables).
    #[arg(long, default_value_t = ga_defaults().refine_period)]
    refine_period: usize,
    /// Share of the training words held out for fitness.
    #[arg(long, default_value_t = ga_defaults().holdout_fraction)]
    holdout: f64,
    /// Stop after this many generations without improvement.
    #[arg(long)]
    patience: Option<usize>,
    /// Worker threads for fitness evaluation (0 = one per core). Results do
    /// not depend on it.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    /// Syllabified corpus file.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    #[command(flatten)]
    ga: GaArgs,
    /// Master random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Additive smoothing constant.
    #[arg(long, default_value_t = phonocat::hmm::DEFAULT_ALPHA)]
    alpha: f64,
    /// Per-generation CSV trace to write.
    #[arg(long, value_name = "FILE")]
    history: Option<PathBuf>,
    /// Map file to write. With a `--k` range, `.k<K>` is inserted before
    /// the extension of this and the history file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    /// JSON document.
    Structured,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Model file written by `train`.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Syllabified corpus file.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["map", "evolve"]))]
struct CrossValidateArgs {
    /// Syllabified corpus file.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    /// Fixed category map: a map file, `identity` or `conventional`.
    #[arg(long)]
    map: Option<String>,
    /// Evolve a map on each fold's training words.
    #[arg(long, action = ArgAction::SetTrue)]
    evolve: bool,
    #[arg(long, default_value_t = 10)]
    k_folds: usize,
    /// Seed for the fold assignment and, offset by the fold number, evolution.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Additive smoothing constant.
    #[arg(long, default_value_t = phonocat::hmm::DEFAULT_ALPHA)]
    alpha: f64,
    #[command(flatten)]
    ga: GaArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// A failure and the exit status it maps to.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
    /// Argument error already printed by clap.
    Reported,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Reported => 1,
            Failure::Data(_) => 2,
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn data(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Data(e.into())
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn evolve_failure(e: EvolveError) -> Failure {
    match e {
        EvolveError::ConfigInvalid(_) => usage(e),
        other => data(other),
    }
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        // reader went away, e.g. `| head`
        Err(Failure::Data(e))
            if e.downcast_ref::<io::Error>().map(io::Error::kind)
                == Some(io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Failure::Usage(e) | Failure::Data(e) = &failure {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(failure.code())
        }
    }
}

fn run(argv: Vec<OsString>) -> Outcome {
    let cli = match parse_with_config(argv) {
        Ok(cli) => cli,
        Err(Parsed::Clap(err)) => {
            // --help and --version also arrive here, on stdout
            let _ = err.print();
            return if err.use_stderr() {
                Err(Failure::Reported)
            } else {
                Ok(())
            };
        }
        Err(Parsed::Other(f)) => return Err(f),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::ImportCelex(a) => import(&a, &mut out),
        Command::Train(a) => train_cmd(&a, &mut out),
        Command::Syllabify(a) => syllabify(&a, &mut out),
        Command::Evolve(a) => evolve_cmd(&a, &mut out),
        Command::Evaluate(a) => evaluate_cmd(&a, &mut out),
        Command::CrossValidate(a) => cross_validate_cmd(&a, &mut out),
    }
}

enum Parsed {
    Clap(clap::Error),
    Other(Failure),
}

/// Parses `argv`, then re-parses with config-file entries appended for every
/// flag the command line left unset, so clap validates both sources alike.
fn parse_with_config(mut argv: Vec<OsString>) -> Result<Cli, Parsed> {
    let command = Cli::command();
    let matches = command
        .clone()
        .try_get_matches_from(&argv)
        .map_err(Parsed::Clap)?;
    let Some((name, sub)) = matches.subcommand() else {
        return Cli::from_arg_matches(&matches).map_err(Parsed::Clap);
    };
    if let Some(path) = sub.get_one::<PathBuf>("config") {
        let entries = config_file::read(path).map_err(|e| Parsed::Other(usage(e)))?;
        let sub_command = command
            .find_subcommand(name)
            .expect("matched subcommand exists");
        let on_command_line = |id: &str| sub.value_source(id) == Some(ValueSource::CommandLine);
        for entry in entries {
            let arg = sub_command
                .get_arguments()
                .find(|a| {
                    a.get_long() == Some(entry.key.as_str()) && a.get_long() != Some("config")
                })
                .ok_or_else(|| {
                    Parsed::Other(usage(anyhow!(
                        "config file line {}: `{name}` has no flag --{}",
                        entry.line,
                        entry.key
                    )))
                })?;
            let id = arg.get_id().as_str();
            let overridden = on_command_line(id)
                || sub_command
                    .get_groups()
                    // exclusive groups only; flattened structs get a multi group
                    .filter(|g| !(*g).clone().is_multiple() && g.get_args().any(|a| a == id))
                    .flat_map(|g| g.get_args())
                    .any(|a| on_command_line(a.as_str()));
            if overridden {
                continue;
            }
            if matches!(arg.get_action(), ArgAction::SetTrue) {
                match entry.value.as_str() {
                    "true" => argv.push(format!("--{}", entry.key).into()),
                    "false" => {}
                    v => {
                        return Err(Parsed::Other(usage(anyhow!(
                            "config file line {}: --{} takes true or false, not {v:?}",
                            entry.line,
                            entry.key
                        ))))
                    }
                }
            } else {
                argv.push(format!("--{}={}", entry.key, entry.value).into());
            }
        }
    }
    let matches = command.try_get_matches_from(&argv).map_err(Parsed::Clap)?;
    Cli::from_arg_matches(&matches).map_err(Parsed::Clap)
}

fn read_corpus(path: &Path) -> Outcome<Corpus> {
    let file = File::open(path)
        .with_context(|| format!("opening corpus {}", path.display()))
        .map_err(data)?;
    load_corpus(BufReader::new(file))
        .with_context(|| format!("reading corpus {}", path.display()))
        .map_err(data)
}

fn read_model(path: &Path) -> Outcome<HmmModel> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading model {}", path.display()))
        .map_err(data)?;
    HmmModel::from_text(&text)
        .with_context(|| format!("parsing model {}", path.display()))
        .map_err(data)
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    std::fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(data)
}

/// Resolves `identity`, `conventional` or a map file path.
fn resolve_map(arg: &str, corpus: &Corpus) -> Outcome<CategoryMap> {
    match arg {
        "identity" => Ok(CategoryMap::identity(Arc::clone(corpus.alphabet()))),
        "conventional" => Ok(CategoryMap::from_text(CONVENTIONAL_MAP).expect("bundled map parses")),
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading map {path}"))
                .map_err(data)?;
            CategoryMap::from_text(&text)
                .with_context(|| format!("parsing map {path}"))
                .map_err(data)
        }
    }
}

fn import(a: &ImportArgs, out: &mut impl Write) -> Outcome {
    let layout = CelexImport {
        field_index: a.field as usize - 1,
        key_index: a.key as usize - 1,
        strip_chars: a.strip.chars().collect(),
    };
    let file = File::open(&a.input)
        .with_context(|| format!("opening {}", a.input.display()))
        .map_err(data)?;
    let ImportOutcome {
        text,
        emitted,
        skipped,
    } = import_celex(BufReader::new(file), &layout)
        .with_context(|| format!("importing {}", a.input.display()))
        .map_err(data)?;
    write_file(&a.out, &text)?;
    writeln!(out, "imported {emitted} entries, skipped {skipped}").map_err(data)
}

fn train_cmd(a: &TrainArgs, out: &mut impl Write) -> Outcome {
    if !(a.alpha > 0.0 && a.alpha.is_finite()) {
        return Err(usage(anyhow!("--alpha must be positive, got {}", a.alpha)));
    }
    let corpus = read_corpus(&a.corpus)?;
    let map = resolve_map(&a.map, &corpus)?;
    let model = train(corpus.words(), &map, a.alpha)
        .context("training")
        .map_err(data)?;
    write_file(&a.out, &model.to_text())?;
    writeln!(
        out,
        "trained on {} words: {} categories, {} states",
        corpus.len(),
        model.k(),
        model.state_count()
    )
    .map_err(data)
}

fn syllabify(a: &SyllabifyArgs, out: &mut impl Write) -> Outcome {
    let model = read_model(&a.model)?;
    let decode = |line: &str| -> Outcome<String> {
        let phones = parse_phones(&line.replace('-', ""))
            .with_context(|| format!("in {line:?}"))
            .map_err(data)?;
        let result = model
            .syllabify(&phones)
            .with_context(|| format!("syllabifying {line:?}"))
            .map_err(data)?;
        Ok(result.to_string())
    };
    if let Some(word) = &a.word {
        return writeln!(out, "{}", decode(word.trim())?).map_err(data);
    }
    for line in io::stdin().lock().lines() {
        let line = line.context("reading standard input").map_err(data)?;
        let line = line.trim();
        if !line.is_empty() {
            writeln!(out, "{}", decode(line)?).map_err(data)?;
        }
    }
    Ok(())
}

/// Parses `--k` as a single value or an inclusive `lo..hi` range.
fn k_values(arg: &str) -> Outcome<Vec<usize>> {
    let parse = |s: &str| {
        s.trim().parse::<usize>().map_err(|_| {
            usage(anyhow!(
                "--k expects a number or a range like 8..14, got {arg:?}"
            ))
        })
    };
    match arg.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (parse(lo)?, parse(hi.trim_start_matches('='))?);
            if lo > hi {
                return Err(usage(anyhow!("--k range {arg} is empty")));
            }
            Ok((lo..=hi).collect())
        }
        None => Ok(vec![parse(arg)?]),
    }
}

fn ga_config(ga: &GaArgs, k: usize, seed: u64, alpha: f64) -> Outcome<GaConfig> {
    let config = GaConfig {
        k,
        population_size: ga.pop,
        max_generations: ga.gens,
        elite_count: ga.elite,
        rate_min: ga.rate_min,
        rate_max: ga.rate_max,
        sigma_ref: ga.sigma_ref,
        refine_period: ga.refine_period,
        alpha,
        holdout_fraction: ga.holdout,
        seed,
        patience: ga.patience,
        workers: ga.jobs,
    };
    config.validate().map_err(evolve_failure)?;
    Ok(config)
}

/// `best.map` -> `best.k8.map`.
fn with_k_suffix(path: &Path, k: usize) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.k{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}.k{k}"),
    };
    path.with_file_name(name)
}

fn evolve_cmd(a: &EvolveArgs, out: &mut impl Write) -> Outcome {
    let ks = k_values(&a.ga.k)?;
    let configs = ks
        .iter()
        .map(|&k| ga_config(&a.ga, k, a.seed, a.alpha))
        .collect::<Outcome<Vec<_>>>()?;
    let corpus = read_corpus(&a.corpus)?;
    let ranged = ks.len() > 1;
    for config in configs {
        let run = evolve(corpus.words(), &config).map_err(evolve_failure)?;
        let (map_path, history_path) = if ranged {
            (
                with_k_suffix(&a.out, config.k),
                a.history.as_deref().map(|h| with_k_suffix(h, config.k)),
            )
        } else {
            (a.out.clone(), a.history.clone())
        };
        write_file(&map_path, &run.best.to_text())?;
        if let Some(h) = history_path {
            write_file(&h, &run.history.to_csv())?;
        }
        writeln!(
            out,
            "k={} best fitness {:.4} after {} generations ({} train / {} holdout words, {} refinements)",
            config.k,
            run.best_fitness,
            run.history.generations.len(),
            run.train_words,
            run.holdout_words,
            run.history.refinements.len()
        )
        .map_err(data)?;
    }
    Ok(())
}

fn evaluate_cmd(a: &EvaluateArgs, out: &mut impl Write) -> Outcome {
    let model = read_model(&a.model)?;
    let corpus = read_corpus(&a.corpus)?;
    let report = evaluate(&model, corpus.words())
        .context("evaluating")
        .map_err(data)?;
    match a.format {
        Format::Text => write!(out, "{}", report.to_text()).map_err(data),
        Format::Structured => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report).map_err(data)?
        )
        .map_err(data),
    }
}

fn cross_validate_cmd(a: &CrossValidateArgs, out: &mut impl Write) -> Outcome {
    if a.k_folds < 2 {
        return Err(usage(anyhow!(
            "--k-folds must be at least 2, got {}",
            a.k_folds
        )));
    }
    if !(a.alpha > 0.0 && a.alpha.is_finite()) {
        return Err(usage(anyhow!("--alpha must be positive, got {}", a.alpha)));
    }
    let evolve_config = if a.evolve {
        let ks = k_values(&a.ga.k)?;
        if ks.len() != 1 {
            return Err(usage(anyhow!(
                "cross-validate takes a single --k, got {}",
                a.ga.k
            )));
        }
        Some(ga_config(&a.ga, ks[0], a.seed, a.alpha)?)
    } else {
        None
    };
    let corpus = read_corpus(&a.corpus)?;
    let source = match (evolve_config, &a.map) {
        (Some(config), _) => MapSource::Evolve(config),
        (None, Some(arg)) if arg == "identity" => MapSource::Identity,
        (None, Some(arg)) => MapSource::Fixed(resolve_map(arg, &corpus)?),
        (None, None) => unreachable!("clap requires --map or --evolve"),
    };
    let cv = cross_validate(&corpus, &source, a.k_folds, a.seed, a.alpha)
        .context("cross-validating")
        .map_err(data)?;
    match a.format {
        Format::Text => write!(out, "{}", cv.to_text()).map_err(data),
        Format::Structured => {
            writeln!(out, "{}", serde_json::to_string_pretty(&cv).map_err(data)?).map_err(data)
        }
    }
}
