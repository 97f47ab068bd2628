mod config;
mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::json;

use config::{ModelFormat, RunConfig, STOPWORDS_ENV};
use kwsense::eval::eval_wsd_with;
use kwsense::relatedness::{sif_embeddings, WordFrequencies};
use kwsense::{
    eval_wordpairs, rel_sense_word, rel_senses, rel_words, Disambiguator, EmbeddingModel, Error,
    Lexicon, SenseVectors, Stopwords, Stores, Strategy, WordPairDataset, WsdCorpus,
};

/// Keyword sense disambiguation with word embeddings.
#[derive(Debug, Parser)]
#[command(name = "kwsense", version)]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Relatedness between two words or senses; prefix sense ids with `sense:`.
    Rel { a: String, b: String },
    /// Disambiguate each keyword using the other keywords as context.
    Disambiguate {
        #[arg(required = true)]
        keywords: Vec<String>,
    },
    /// Spearman correlation against a word-pair similarity dataset (TSV).
    EvalPairs { dataset: PathBuf },
    /// Precision, recall and F1 over a sense-annotated corpus (JSONL).
    EvalWsd { corpus: PathBuf },
}

impl Command {
    fn needs_lexicon(&self) -> bool {
        match self {
            Command::Rel { a, b } => sense_id(a).is_some() || sense_id(b).is_some(),
            Command::Disambiguate { .. } | Command::EvalWsd { .. } => true,
            Command::EvalPairs { .. } => false,
        }
    }
}

fn sense_id(arg: &str) -> Option<&str> {
    arg.strip_prefix("sense:")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 1 for I/O and runtime failures, 2 for bad configuration or unresolved ids,
/// 3 when an input cannot be represented in the model.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::UnknownKeyword(_)) => 2,
        Some(Error::Unrepresentable | Error::NoSynonyms(_)) => 3,
        _ => 1,
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let cfg = &cli.cfg;
    cfg.validate(cli.cmd.needs_lexicon())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .context("building thread pool")?;
    pool.install(|| match &cli.cmd {
        Command::Rel { a, b } => cmd_rel(cfg, a, b),
        Command::Disambiguate { keywords } => cmd_disambiguate(cfg, keywords),
        Command::EvalPairs { dataset } => cmd_eval_pairs(cfg, dataset),
        Command::EvalWsd { corpus } => cmd_eval_wsd(cfg, corpus),
    })
}

fn load_model(cfg: &RunConfig) -> anyhow::Result<EmbeddingModel> {
    let path = cfg.model.as_deref().expect("validated");
    let model = match cfg.model_format() {
        ModelFormat::Text => EmbeddingModel::load_text(path)?,
        ModelFormat::Binary => EmbeddingModel::load_binary(path)?,
    };
    log::info!(
        "loaded {} vectors of dimension {}",
        model.len(),
        model.dim()
    );
    Ok(model)
}

fn load_lexicon(cfg: &RunConfig) -> anyhow::Result<Lexicon> {
    let path = cfg.lexicon.as_deref().expect("validated");
    let lexicon = Lexicon::load(path)?;
    for w in lexicon.warnings() {
        log::warn!("{w}");
    }
    let report = lexicon.validate();
    for note in &report.notes {
        log::warn!("{note}");
    }
    Ok(lexicon)
}

fn load_stopwords() -> anyhow::Result<Stopwords> {
    match std::env::var_os(STOPWORDS_ENV) {
        Some(path) => Ok(Stopwords::from_file(Path::new(&path))?),
        None => Ok(Stopwords::english()),
    }
}

/// Loads or builds the vector store the configured strategy needs.
fn load_store(
    cfg: &RunConfig,
    model: &EmbeddingModel,
    lexicon: &Lexicon,
) -> anyhow::Result<Option<SenseVectors>> {
    match cfg.strategy() {
        Strategy::DocVec => {
            let path = cfg.docvec.as_deref().expect("validated");
            Ok(Some(SenseVectors::load_jsonl(path)?))
        }
        Strategy::Sif => {
            let sif = cfg.sif();
            let freqs = match &sif.word_freq_source {
                Some(p) => WordFrequencies::load(p)?,
                None => WordFrequencies::uniform(),
            };
            let out = sif_embeddings(
                model,
                lexicon
                    .senses()
                    .iter()
                    .map(|s| (s.id.as_str(), s.description_terms.as_slice())),
                &sif,
                &freqs,
            )?;
            Ok(Some(out.vectors))
        }
        _ => Ok(None),
    }
}

fn stores_for<'a>(cfg: &RunConfig, store: Option<&'a SenseVectors>) -> Stores<'a> {
    match cfg.strategy() {
        Strategy::Sif => Stores {
            sif: store,
            docvec: None,
        },
        Strategy::DocVec => Stores {
            sif: None,
            docvec: store,
        },
        _ => Stores::default(),
    }
}

fn cmd_rel(cfg: &RunConfig, a: &str, b: &str) -> anyhow::Result<()> {
    let model = load_model(cfg)?;
    let weights = cfg.weights()?;
    let lexicon = match sense_id(a).or(sense_id(b)) {
        Some(_) => Some(load_lexicon(cfg)?),
        None => None,
    };
    let resolve = |arg: &str| -> anyhow::Result<Option<&kwsense::Sense>> {
        match (sense_id(arg), &lexicon) {
            (Some(id), Some(lex)) => lex
                .get(id)
                .map(Some)
                .ok_or_else(|| Error::Config(format!("unknown sense id {id:?}")).into()),
            _ => Ok(None),
        }
    };
    let (sa, sb) = (resolve(a)?, resolve(b)?);
    let (kind, value) = match (sa, sb, &lexicon) {
        (Some(x), Some(y), Some(lex)) => ("sense-sense", rel_senses(&model, lex, x, y, weights)?),
        (Some(s), None, Some(lex)) => ("sense-word", rel_sense_word(&model, lex, s, b, weights)?),
        (None, Some(s), Some(lex)) => ("sense-word", rel_sense_word(&model, lex, s, a, weights)?),
        _ => (
            "word-word",
            rel_words(&model, a, b).ok_or(Error::Unrepresentable)?,
        ),
    };
    let out = json!({
        "a": a,
        "b": b,
        "kind": kind,
        "relatedness": value,
        "config": cfg,
    });
    render::emit(cfg, &out, || format!("{a}\t{b}\t{value:.6}"))
}

fn cmd_disambiguate(cfg: &RunConfig, keywords: &[String]) -> anyhow::Result<()> {
    let model = load_model(cfg)?;
    let lexicon = load_lexicon(cfg)?;
    let store = load_store(cfg, &model, &lexicon)?;
    let ctx = cfg.context(load_stopwords()?)?;
    let d = Disambiguator::new(
        &model,
        &lexicon,
        &ctx,
        cfg.params()?,
        stores_for(cfg, store.as_ref()),
    )?;

    let mut results = Vec::with_capacity(keywords.len());
    for (i, kd) in keywords.iter().enumerate() {
        let context: Vec<&str> = keywords
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, w)| w.as_str())
            .collect();
        match d.disambiguate(kd, &context) {
            Ok(r) => results.push(json!({ "keyword": kd, "result": r })),
            Err(Error::UnknownKeyword(_)) => {
                results.push(json!({ "keyword": kd, "result": null, "note": "no senses" }))
            }
            Err(e) => return Err(e.into()),
        }
    }
    let out = json!({ "config": cfg, "keywords": results });
    render::emit(cfg, &out, || render::disambiguation_table(cfg, &out))
}

fn cmd_eval_pairs(cfg: &RunConfig, dataset: &Path) -> anyhow::Result<()> {
    let model = load_model(cfg)?;
    let data = WordPairDataset::load(dataset)?;
    let eval = eval_wordpairs(&model, &data)?;
    if eval.skipped > 0 {
        log::warn!("{} pair(s) skipped: out of vocabulary", eval.skipped);
    }
    let out = json!({ "config": cfg, "evaluation": eval });
    render::emit(cfg, &out, || {
        format!(
            "{}\nspearman={:.4} covered={} skipped={}",
            cfg.summary(),
            eval.rho,
            eval.covered,
            eval.skipped
        )
    })
}

fn cmd_eval_wsd(cfg: &RunConfig, corpus: &Path) -> anyhow::Result<()> {
    let model = load_model(cfg)?;
    let lexicon = load_lexicon(cfg)?;
    let store = load_store(cfg, &model, &lexicon)?;
    let ctx = cfg.context(load_stopwords()?)?;
    let corpus = WsdCorpus::load(corpus)?;
    let d = Disambiguator::new(
        &model,
        &lexicon,
        &ctx,
        cfg.params()?,
        stores_for(cfg, store.as_ref()),
    )?;
    let report = eval_wsd_with(&d, &lexicon, &corpus);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let out = json!({ "config": cfg, "report": report });
    render::emit(cfg, &out, || render::wsd_table(cfg, &report))
}
