mod args;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use lexidrift::align::{write_pharaoh, AlignerConfig, AlignerOptions, AlignerRegistry, NULL_WORD};
use lexidrift::classify::{train_seed_model, TrainConfig};
use lexidrift::corpus::{build_vocab, load_parallel_corpus, TokenizationPolicy};
use lexidrift::embed::{
    compute_drift_table, drift_report, DriftParams, DriftTable, EmbeddingSpace,
};
use lexidrift::eval::{
    evaluate_emoticons, evaluate_word_sentiment, reports_to_tsv, split_datasets, write_reports,
    EvalConfig,
};
use lexidrift::pipeline::{run_pipeline, validate_config, RunConfig, RunOptions};
use lexidrift::project::{extract_lexicon, substitute_and_count};
use lexidrift::{Error, LangDomainTag, Result, SeedLexicon};

use args::{Cli, Command, CorpusCommand, TrainingArgs};

const EXIT_VALIDATION: u8 = 1;
const EXIT_STAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let default_level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default_level))
        .init();

    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    }

    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) | Error::UnknownStrategy { .. } => {
            EXIT_VALIDATION
        }
        _ => EXIT_STAGE,
    }
}

fn tag(text: &str) -> Result<LangDomainTag> {
    text.parse()
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Corpus {
            command: CorpusCommand::Stats(a),
        } => {
            let corpus = load_parallel_corpus(
                &a.input,
                tag(&a.source_tag)?,
                tag(&a.target_tag)?,
                &TokenizationPolicy::default(),
            )?;
            let vocab = build_vocab(&corpus, a.side);
            println!("pairs\t{}", corpus.len());
            println!("dropped\t{}", corpus.dropped());
            println!("tokens\t{}", vocab.total());
            println!("types\t{}", vocab.len());
            let mut by_count: Vec<(&String, &u64)> = vocab.entries.iter().collect();
            by_count.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
            for (word, count) in by_count.into_iter().take(a.top) {
                println!("{word}\t{count}");
            }
        }
        Command::Align(a) => {
            let corpus = load_parallel_corpus(
                &a.corpus,
                tag(&a.source_tag)?,
                tag(&a.target_tag)?,
                &TokenizationPolicy::default(),
            )?;
            let name = if a.load_pharaoh.is_some() {
                "pharaoh"
            } else {
                a.aligner.as_str()
            };
            let options = AlignerOptions {
                config: AlignerConfig {
                    em_iterations: a.iters,
                    diagonal_tension: a.tension,
                    use_null: !a.no_null,
                    ..AlignerConfig::default()
                },
                pharaoh_path: a.load_pharaoh.clone(),
            };
            let output = AlignerRegistry::default()
                .create(name, &options)?
                .align(&corpus)?;
            write_pharaoh(&a.out, &output.links, corpus.len())?;
            if let (Some(path), Some(table)) = (&a.table, &output.table) {
                table.write(path)?;
            }
            let null_links = output
                .links
                .iter()
                .filter(|l| l.source_pos.is_none())
                .count();
            println!(
                "{} pairs, {} links ({} to {NULL_WORD})",
                corpus.len(),
                output.links.len(),
                null_links
            );
        }
        Command::Project(a) => {
            let source_tag = tag(&a.source_tag)?;
            let target_tag = tag(&a.target_tag)?;
            let corpus = load_parallel_corpus(
                &a.corpus,
                source_tag.clone(),
                target_tag.clone(),
                &TokenizationPolicy::default(),
            )?;
            let links = lexidrift::align::load_pharaoh_alignments(&a.alignments, &corpus)?;
            let seeds = SeedLexicon::load(&a.seeds, source_tag)?;
            let table = substitute_and_count(&links, &corpus, &seeds)?;
            if table.is_empty() {
                return Err(Error::NoSeedCoverage);
            }
            let lexicon = extract_lexicon(&table, a.q, target_tag)?;
            lexicon.write(&a.out)?;
            let positive = lexicon
                .iter()
                .filter(|(_, e)| e.polarity == lexidrift::Polarity::Positive)
                .count();
            println!(
                "{} words ({} POS, {} NEG)",
                lexicon.len(),
                positive,
                lexicon.len() - positive
            );
        }
        Command::Drift(a) => {
            let lexicon = SeedLexicon::load(&a.lexicon, tag(&a.src_tag)?)?;
            let source = EmbeddingSpace::load(&a.src_emb, tag(&a.src_tag)?)?;
            let target = EmbeddingSpace::load(&a.tgt_emb, tag(&a.tgt_tag)?)?;
            let params = DriftParams {
                gamma: a.gamma,
                cap: a.cap,
                epsilon: a.epsilon,
                lambda_floor: a.lambda_floor,
            };
            let table = compute_drift_table(&lexicon, &source, &target, &params, None)?;
            table.write(&a.out)?;
            println!(
                "{} words scored, {} skipped",
                table.len(),
                table.skipped.len()
            );
            for (word, lambda) in table.ranked().into_iter().take(a.top) {
                println!("{word}\t{lambda:.6}");
            }
        }
        Command::DriftReport(a) => {
            let source = EmbeddingSpace::load(&a.src_emb, tag(&a.src_tag)?)?;
            let target = EmbeddingSpace::load(&a.tgt_emb, tag(&a.tgt_tag)?)?;
            let report = drift_report(&a.word, &source, &target, a.k)?;
            println!("rank\tsource\tcos\ttarget\tcos");
            let rows = report
                .source_neighbors
                .len()
                .max(report.target_neighbors.len());
            for i in 0..rows {
                let cell = |list: &[(String, f64)]| {
                    list.get(i)
                        .map(|(w, c)| format!("{w}\t{c:.4}"))
                        .unwrap_or_else(|| "\t".into())
                };
                println!(
                    "{}\t{}\t{}",
                    i + 1,
                    cell(&report.source_neighbors),
                    cell(&report.target_neighbors)
                );
            }
            println!("shared\t{}", report.overlap.join(" "));
        }
        Command::Train(a) => {
            let lexicon = SeedLexicon::load(&a.seeds, tag(&a.tag)?)?;
            let embedding = EmbeddingSpace::load(&a.emb, tag(&a.tag)?)?;
            let drift = a.weights.as_ref().map(DriftTable::load).transpose()?;
            let config = train_config(&a.training, cli.seed);
            let (doc, missing) = train_seed_model(&lexicon, drift.as_ref(), &embedding, &config)?;
            doc.write(&a.out)?;
            println!(
                "trained on {} seeds ({} missing from the embedding), gamma {}, l2 {}",
                doc.n_samples,
                missing.len(),
                doc.gamma,
                doc.config.l2
            );
        }
        Command::Eval(a) => {
            let emb_tag = tag(&a.tag)?;
            let unisent = SeedLexicon::load(&a.unisent, emb_tag.clone())?;
            let gold = SeedLexicon::load(&a.gold, emb_tag.clone())?;
            let embedding = EmbeddingSpace::load(&a.emb, emb_tag)?;
            let drift = a.drift.as_ref().map(DriftTable::load).transpose()?;
            let seed = cli.seed.unwrap_or(args::DEFAULT_SEED);
            let split = split_datasets(&unisent, &gold, &embedding, a.test_frac, seed)?;
            let config = eval_config(&a.training, cli.seed);
            let reports = evaluate_word_sentiment(&split, &embedding, drift.as_ref(), &config)?;
            fs::create_dir_all(&a.out).map_err(|e| io_error(&a.out, e))?;
            write_reports(&a.out, "eval", &reports)?;
            print!("{}", reports_to_tsv(&reports));
        }
        Command::EvalEmoticons(a) => {
            let emb_tag = tag(&a.tag)?;
            let unisent = SeedLexicon::load(&a.unisent, emb_tag.clone())?;
            let gold = SeedLexicon::load(&a.emoticons, emb_tag.clone())?;
            let embedding = EmbeddingSpace::load(&a.emb, emb_tag)?;
            let drift = a.drift.as_ref().map(DriftTable::load).transpose()?;
            let config = eval_config(&a.training, cli.seed);
            let reports = evaluate_emoticons(&unisent, drift.as_ref(), &embedding, &gold, &config)?;
            fs::create_dir_all(&a.out).map_err(|e| io_error(&a.out, e))?;
            write_reports(&a.out, "emoticons", &reports)?;
            print!("{}", reports_to_tsv(&reports));
        }
        Command::Pipeline(a) => {
            let config = load_config(&a.config, cli.seed)?;
            let manifest = run_pipeline(&config, &RunOptions { resume: cli.resume })?;
            for stage in &manifest.stages {
                let status = if stage.resumed { "skipped" } else { "done" };
                println!("{}\t{status}\t{:.3}s", stage.name, stage.wall_time_secs);
            }
            for w in manifest.warnings() {
                eprintln!("warning: {w}");
            }
            println!("outputs in {}", config.output_dir.display());
        }
        Command::Validate(a) => {
            let config = load_config(&a.config, cli.seed)?;
            let problems = validate_config(&config);
            if !problems.is_empty() {
                for p in &problems {
                    println!("{p}");
                }
                return Ok(ExitCode::from(EXIT_VALIDATION));
            }
            println!("ok");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<RunConfig> {
    let mut config = RunConfig::load(path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn train_config(a: &TrainingArgs, seed: Option<u64>) -> TrainConfig {
    let eval = eval_config(a, seed);
    TrainConfig {
        logreg: eval.logreg,
        gamma: eval.gamma,
        tune: eval.tune,
        lambda_floor: eval.lambda_floor,
    }
}

fn eval_config(a: &TrainingArgs, seed: Option<u64>) -> EvalConfig {
    let mut config = EvalConfig::default();
    config.logreg.l2 = a.l2;
    config.gamma = a.gamma;
    config.lambda_floor = a.lambda_floor;
    config.tune.gamma_grid = a.gamma_grid.clone();
    config.tune.l2_grid = a.l2_grid.clone().unwrap_or_else(|| vec![a.l2]);
    config.tune.folds = a.folds;
    config.tune.lambda_floor = a.lambda_floor;
    config.tune.seed = seed.unwrap_or(args::DEFAULT_SEED);
    config
}
