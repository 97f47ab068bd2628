//! Keyword sense disambiguation over arbitrary sense inventories.
//!
//! The crate maps keywords to senses using relatedness computed in a
//! pre-trained word embedding space:
//!
//! * [`vecstore`] loads text and word2vec-binary models and aggregates vectors;
//! * [`relatedness`] scores words, senses, and senses against words;
//! * [`lexicon`] loads the JSONL sense inventory;
//! * [`disambig`] selects the active context and ranks candidate senses;
//! * [`eval`] runs word-pair correlation and WSD precision/recall scoring.

pub mod disambig;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod relatedness;
pub mod text;
pub mod vecstore;

pub use disambig::{
    disambiguate, select_active_context, ActiveContext, AlgoParams, ContextConfig, Disambiguation,
    Disambiguator, DocVecStore, SenseScore, Stores, Strategy,
};
pub use error::{Error, Result};
pub use eval::{eval_wordpairs, eval_wsd, spearman, WordPairDataset, WsdCorpus, WsdReport};
pub use lexicon::{ContextRef, Lexicon, Sense};
pub use relatedness::{
    angular_relatedness, cosine, rel_sense_word, rel_senses, rel_words, RelWeights, SifConfig,
};
pub use text::Stopwords;
pub use vecstore::{centroid, EmbeddingModel, SenseVectors, Vector};
