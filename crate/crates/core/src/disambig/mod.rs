//! Keyword disambiguation.
//!
//! Given a keyword, its candidate senses and the surrounding keywords, the
//! algorithm runs three steps:
//!
//! 1. each sense scores the mean sense↔word relatedness against the active
//!    context;
//! 2. every sense gains `(1 - maxScore) * strength`, where the strength comes
//!    from the configured [`Strategy`];
//! 3. senses within `proximity_factor * maxScore` of the best gain
//!    `(1 - maxScore) * normFreq`, when usage frequencies are known.
//!
//! Scores stay in `[0, 1]` and never decrease from one step to the next.

mod context;
mod steps;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::relatedness::RelWeights;
use crate::vecstore::{EmbeddingModel, SenseVectors};

pub use context::{
    select_active_context, ActiveContext, ContextConfig, ContextMember, DEFAULT_MAX_CONTEXT,
    DEFAULT_THRESHOLD,
};
pub use steps::{
    context_centroid, norm_freq, overlap, step1_base_scores, step2_rescore, step3_frequency,
    strength,
};

/// Precomputed document vectors keyed by sense id.
pub type DocVecStore = SenseVectors;

/// Step-2 scoring strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Set overlap between the active context and the description.
    Overlap,
    /// Mean word relatedness over context × description.
    Average,
    /// Context centroid against a SIF embedding of the description.
    Sif,
    /// Context centroid against the centroid of the `k` description terms
    /// nearest to the context plus keyword.
    TopK,
    /// Context centroid against a precomputed document vector.
    DocVec,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Overlap,
        Strategy::Average,
        Strategy::Sif,
        Strategy::TopK,
        Strategy::DocVec,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Overlap => "overlap",
            Strategy::Average => "average",
            Strategy::Sif => "sif",
            Strategy::TopK => "topk",
            Strategy::DocVec => "docvec",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown strategy {s:?}")))
    }
}

pub const DEFAULT_PROXIMITY_FACTOR: f64 = 0.75;
pub const DEFAULT_FREQ_A: f64 = 0.5;
pub const DEFAULT_K: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgoParams {
    pub weights: RelWeights,
    pub proximity_factor: f64,
    pub freq_a: f64,
    pub freq_b: f64,
    pub strategy: Strategy,
    /// Number of nearest description terms kept by [`Strategy::TopK`].
    pub k: usize,
}

impl Default for AlgoParams {
    fn default() -> Self {
        AlgoParams {
            weights: RelWeights::default(),
            proximity_factor: DEFAULT_PROXIMITY_FACTOR,
            freq_a: DEFAULT_FREQ_A,
            freq_b: 1.0 - DEFAULT_FREQ_A,
            strategy: Strategy::TopK,
            k: DEFAULT_K,
        }
    }
}

impl AlgoParams {
    pub fn with_strategy(strategy: Strategy) -> Self {
        AlgoParams {
            strategy,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.freq_a)
            || !unit(self.freq_b)
            || (self.freq_a + self.freq_b - 1.0).abs() > 1e-12
        {
            return Err(Error::Config(format!(
                "frequency coefficients must lie in [0, 1] and sum to 1 (got {}, {})",
                self.freq_a, self.freq_b
            )));
        }
        if !unit(self.proximity_factor) {
            return Err(Error::Config(format!(
                "proximity factor must lie in [0, 1] (got {})",
                self.proximity_factor
            )));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be positive".into()));
        }
        RelWeights::new(self.weights.w0(), self.weights.w1())?;
        Ok(())
    }
}

/// Optional precomputed vectors needed by [`Strategy::Sif`] and [`Strategy::DocVec`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Stores<'a> {
    pub sif: Option<&'a SenseVectors>,
    pub docvec: Option<&'a DocVecStore>,
}

impl<'a> Stores<'a> {
    /// The store the strategy reads from, checked against the model dimension.
    pub fn for_strategy(
        &self,
        strategy: Strategy,
        model: &EmbeddingModel,
    ) -> Result<Option<&'a SenseVectors>> {
        let (store, what) = match strategy {
            Strategy::Sif => (self.sif, "SIF"),
            Strategy::DocVec => (self.docvec, "document-vector"),
            _ => return Ok(None),
        };
        let store = store
            .ok_or_else(|| Error::Config(format!("strategy {strategy} requires a {what} store")))?;
        if store.dim() != model.dim() {
            return Err(Error::Config(format!(
                "{what} store has dimension {} but the word model has {}",
                store.dim(),
                model.dim()
            )));
        }
        Ok(Some(store))
    }
}

/// Per-step contributions to a sense score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StepTrace {
    pub step1: f64,
    pub step2: f64,
    pub step3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SenseScore {
    pub sense_id: String,
    pub score: f64,
    pub trace: StepTrace,
}

/// Result of disambiguating one keyword.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disambiguation {
    pub keyword: String,
    pub active_context: ActiveContext,
    /// Senses, best first; ties keep lexicon file order.
    pub senses: Vec<SenseScore>,
}

impl Disambiguation {
    pub fn best(&self) -> Option<&SenseScore> {
        self.senses.first()
    }
}

/// Bundles the model, inventory and configuration for repeated calls.
#[derive(Debug, Clone, Copy)]
pub struct Disambiguator<'a> {
    model: &'a EmbeddingModel,
    lexicon: &'a Lexicon,
    context: &'a ContextConfig,
    params: AlgoParams,
    store: Option<&'a SenseVectors>,
}

impl<'a> Disambiguator<'a> {
    /// Validates the configuration and resolves the strategy's store.
    pub fn new(
        model: &'a EmbeddingModel,
        lexicon: &'a Lexicon,
        context: &'a ContextConfig,
        params: AlgoParams,
        stores: Stores<'a>,
    ) -> Result<Self> {
        context.validate()?;
        params.validate()?;
        let store = stores.for_strategy(params.strategy, model)?;
        Ok(Disambiguator {
            model,
            lexicon,
            context,
            params,
            store,
        })
    }

    pub fn params(&self) -> &AlgoParams {
        &self.params
    }

    pub fn disambiguate<S: AsRef<str>>(
        &self,
        kd: &str,
        context_words: &[S],
    ) -> Result<Disambiguation> {
        let senses = self.lexicon.senses_of(kd);
        if senses.is_empty() {
            return Err(Error::UnknownKeyword(kd.to_owned()));
        }
        let ca = select_active_context(self.model, context_words, kd, self.context);
        let scores = step1_base_scores(self.model, self.lexicon, &senses, &ca, self.params.weights);
        let scores = step2_rescore(
            self.model,
            kd,
            &senses,
            scores,
            &ca,
            &self.params,
            &self.context.stopwords,
            self.store,
        );
        let mut scores = step3_frequency(scores, &senses, &self.params);
        // Stable sort keeps lexicon order among equal scores.
        scores.sort_by(|a, b| b.score.total_cmp(&a.score));
        Ok(Disambiguation {
            keyword: kd.to_owned(),
            active_context: ca,
            senses: scores,
        })
    }
}

/// One-shot form of [`Disambiguator::disambiguate`].
pub fn disambiguate<S: AsRef<str>>(
    model: &EmbeddingModel,
    lexicon: &Lexicon,
    kd: &str,
    context_words: &[S],
    cfg: &ContextConfig,
    params: AlgoParams,
    stores: Stores<'_>,
) -> Result<Disambiguation> {
    Disambiguator::new(model, lexicon, cfg, params, stores)?.disambiguate(kd, context_words)
}
