use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use kwsense::disambig::{
    DEFAULT_K, DEFAULT_MAX_CONTEXT, DEFAULT_PROXIMITY_FACTOR, DEFAULT_THRESHOLD,
};
use kwsense::relatedness::sif::DEFAULT_SMOOTHING;
use kwsense::{AlgoParams, ContextConfig, RelWeights, SifConfig, Stopwords, Strategy};

/// Environment variable naming a replacement stopword file.
pub const STOPWORDS_ENV: &str = "KWSENSE_STOPWORDS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFormat {
    Text,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Overlap,
    Average,
    Sif,
    Topk,
    Docvec,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Overlap => Strategy::Overlap,
            StrategyArg::Average => Strategy::Average,
            StrategyArg::Sif => Strategy::Sif,
            StrategyArg::Topk => Strategy::TopK,
            StrategyArg::Docvec => Strategy::DocVec,
        }
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Embedding model file.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,

    /// Model layout; inferred from the extension (`.bin` is binary) when omitted.
    #[arg(long, value_enum, global = true)]
    pub model_format: Option<ModelFormat>,

    /// Sense inventory (JSONL).
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,

    /// Step-2 strategy.
    #[arg(long, value_enum, default_value = "topk", global = true)]
    #[serde(serialize_with = "ser_strategy")]
    pub strategy: StrategyArg,

    /// Description terms kept by the topk strategy.
    #[arg(long, default_value_t = DEFAULT_K, global = true)]
    pub k: usize,

    /// Minimum relatedness for a context word to enter the active context.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, global = true)]
    pub threshold: f64,

    /// Maximum size of the active context.
    #[arg(long, default_value_t = DEFAULT_MAX_CONTEXT, global = true)]
    pub max_context: usize,

    /// Weight of the synonym level; the context level gets 1 - w0.
    #[arg(long, default_value_t = 0.5, global = true)]
    pub w0: f64,

    /// Fraction of the best score a sense must exceed to get the frequency bonus.
    #[arg(long, default_value_t = DEFAULT_PROXIMITY_FACTOR, global = true)]
    pub proximity_factor: f64,

    /// Frequency coefficient a (b = 1 - a).
    #[arg(long, default_value_t = 0.5, global = true)]
    pub freq_a: f64,

    /// Document vectors for the docvec strategy (JSONL).
    #[arg(long, global = true)]
    pub docvec: Option<PathBuf>,

    /// Token frequency table for SIF weighting.
    #[arg(long, global = true)]
    pub sif_freqs: Option<PathBuf>,

    /// SIF smoothing constant.
    #[arg(long, default_value_t = DEFAULT_SMOOTHING, global = true)]
    pub sif_smoothing: f64,

    /// Keep the principal component in SIF vectors.
    #[arg(long, global = true)]
    pub sif_keep_component: bool,

    /// Worker threads for evaluation (0 = one per core).
    #[arg(long, default_value_t = 0, global = true)]
    pub jobs: usize,

    #[arg(long, value_enum, default_value = "table", global = true)]
    pub output: OutputFormat,
}

fn ser_strategy<S: serde::Serializer>(s: &StrategyArg, ser: S) -> Result<S::Ok, S::Error> {
    Strategy::from(*s).serialize(ser)
}

impl RunConfig {
    pub fn strategy(&self) -> Strategy {
        self.strategy.into()
    }

    pub fn weights(&self) -> kwsense::Result<RelWeights> {
        RelWeights::from_w0(self.w0)
    }

    pub fn params(&self) -> kwsense::Result<AlgoParams> {
        let params = AlgoParams {
            weights: self.weights()?,
            proximity_factor: self.proximity_factor,
            freq_a: self.freq_a,
            freq_b: 1.0 - self.freq_a,
            strategy: self.strategy(),
            k: self.k,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn context(&self, stopwords: Stopwords) -> kwsense::Result<ContextConfig> {
        let cfg = ContextConfig {
            max_context: self.max_context,
            threshold: self.threshold,
            stopwords,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn sif(&self) -> SifConfig {
        SifConfig {
            smoothing: self.sif_smoothing,
            word_freq_source: self.sif_freqs.clone(),
            remove_component: !self.sif_keep_component,
        }
    }

    pub fn model_format(&self) -> ModelFormat {
        self.model_format.unwrap_or_else(|| match &self.model {
            Some(p) if p.extension().is_some_and(|e| e == "bin") => ModelFormat::Binary,
            _ => ModelFormat::Text,
        })
    }

    /// Checks every numeric constraint and the strategy's inputs without
    /// touching the filesystem.
    pub fn validate(&self, needs_lexicon: bool) -> kwsense::Result<()> {
        self.params()?;
        self.context(Stopwords::empty())?;
        self.sif().validate()?;
        if self.model.is_none() {
            return Err(kwsense::Error::Config("--model is required".into()));
        }
        if needs_lexicon && self.lexicon.is_none() {
            return Err(kwsense::Error::Config("--lexicon is required".into()));
        }
        if self.strategy() == Strategy::DocVec && needs_lexicon && self.docvec.is_none() {
            return Err(kwsense::Error::Config(
                "--docvec is required for the docvec strategy".into(),
            ));
        }
        Ok(())
    }

    /// One-line summary used in table headers.
    pub fn summary(&self) -> String {
        format!(
            "strategy={} k={} threshold={} max_context={} w0={} proximity_factor={} freq_a={}",
            self.strategy(),
            self.k,
            self.threshold,
            self.max_context,
            self.w0,
            self.proximity_factor,
            self.freq_a
        )
    }
}
