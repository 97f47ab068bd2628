//! Embedding-based relatedness between words, senses, and senses and words.
//!
//! Word relatedness is the angular similarity `1 - arccos(cos θ) / π`, which
//! lies in `[0, 1]`. Sense relatedness combines two levels:
//!
//! * level 0 averages word relatedness over the synonym cross product;
//! * level 1 averages level-0 relatedness over the core-context cross product.
//!
//! Pairs that cannot be scored (out-of-vocabulary labels) are skipped and the
//! denominator shrinks with them. A level with nothing left is missing, and the
//! weighted combination then falls back to the remaining level.

pub mod sif;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, Sense};
use crate::vecstore::{EmbeddingModel, Vector};

pub use sif::{first_principal_direction, sif_embeddings, SifConfig, SifOutput, WordFrequencies};

fn norms(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::DimMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let na = a.iter().map(|x| x * x).sum::<f64>();
    let nb = b.iter().map(|x| x * x).sum::<f64>();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((na, nb))
}

/// Cosine similarity, clamped to `[-1, 1]`.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    let (na, nb) = norms(a, b)?;
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb).sqrt()).clamp(-1.0, 1.0))
}

/// `1 - arccos(cosine) / π`.
///
/// The angle is computed as `2 atan2(|â - b̂|, |â + b̂|)` on the unit
/// vectors, which equals `arccos(cosine)` but stays accurate for nearly
/// parallel and nearly antipodal pairs.
pub fn angular_relatedness(a: &[f64], b: &[f64]) -> Result<f64> {
    let (na, nb) = norms(a, b)?;
    let (na, nb) = (na.sqrt(), nb.sqrt());
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (ux, uy) = (x / na, y / nb);
        diff += (ux - uy) * (ux - uy);
        sum += (ux + uy) * (ux + uy);
    }
    let angle = 2.0 * diff.sqrt().atan2(sum.sqrt());
    Ok((1.0 - angle / std::f64::consts::PI).clamp(0.0, 1.0))
}

/// Angular relatedness, with undefined cases mapped to `None`.
pub(crate) fn angular_opt(a: &[f64], b: &[f64]) -> Option<f64> {
    angular_relatedness(a, b).ok()
}

/// Relatedness between two words or phrases; `None` if either side is fully
/// out of vocabulary.
pub fn rel_words(model: &EmbeddingModel, x: &str, y: &str) -> Option<f64> {
    let vx = model.phrase_vector(x)?;
    let vy = model.phrase_vector(y)?;
    angular_opt(&vx, &vy)
}

/// Level weights, `w0 + w1 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelWeights {
    w0: f64,
    w1: f64,
}

impl RelWeights {
    pub fn new(w0: f64, w1: f64) -> Result<Self> {
        let ok = w0.is_finite()
            && w1.is_finite()
            && w0 >= 0.0
            && w1 >= 0.0
            && (w0 + w1 - 1.0).abs() <= 1e-12;
        if !ok {
            return Err(Error::Config(format!(
                "relatedness weights must be nonnegative and sum to 1 (got {w0}, {w1})"
            )));
        }
        Ok(RelWeights { w0, w1 })
    }

    pub fn from_w0(w0: f64) -> Result<Self> {
        Self::new(w0, 1.0 - w0)
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn w1(&self) -> f64 {
        self.w1
    }

    /// Weighted sum of the available levels; a missing level hands its weight
    /// to the other one.
    pub fn combine(&self, level0: Option<f64>, level1: Option<f64>) -> Result<f64> {
        match (level0, level1) {
            (Some(r0), Some(r1)) => Ok(self.w0 * r0 + self.w1 * r1),
            (Some(r0), None) => Ok(r0),
            (None, Some(r1)) => Ok(r1),
            (None, None) => Err(Error::Unrepresentable),
        }
    }
}

impl Default for RelWeights {
    fn default() -> Self {
        RelWeights { w0: 0.5, w1: 0.5 }
    }
}

/// Mean over the defined entries; `None` when nothing is defined.
fn mean_defined(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values
        .into_iter()
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn phrase_vectors(model: &EmbeddingModel, labels: &[String]) -> Vec<Option<Vector>> {
    labels.iter().map(|l| model.phrase_vector(l)).collect()
}

fn mean_cross(xs: &[Option<Vector>], ys: &[Option<Vector>]) -> Option<f64> {
    mean_defined(xs.iter().flat_map(|x| {
        ys.iter().map(move |y| match (x, y) {
            (Some(x), Some(y)) => angular_opt(x, y),
            _ => None,
        })
    }))
}

/// Level 0 between two synonym lists.
pub fn rel0_labels(model: &EmbeddingModel, syn_a: &[String], syn_b: &[String]) -> Option<f64> {
    mean_cross(&phrase_vectors(model, syn_a), &phrase_vectors(model, syn_b))
}

fn require_synonyms(s: &Sense) -> Result<()> {
    if s.synonyms.is_empty() {
        Err(Error::NoSynonyms(s.id.clone()))
    } else {
        Ok(())
    }
}

/// Level-0 sense relatedness over `Syn(a) × Syn(b)`.
pub fn rel0_senses(model: &EmbeddingModel, a: &Sense, b: &Sense) -> Result<Option<f64>> {
    require_synonyms(a)?;
    require_synonyms(b)?;
    Ok(rel0_labels(model, &a.synonyms, &b.synonyms))
}

/// Level-1 sense relatedness over `OC(a) × OC(b)`.
pub fn rel1_senses(model: &EmbeddingModel, lexicon: &Lexicon, a: &Sense, b: &Sense) -> Option<f64> {
    let oc_a: Vec<Vec<Option<Vector>>> = lexicon
        .core_context_synonyms(a)
        .into_iter()
        .map(|syn| phrase_vectors(model, syn))
        .collect();
    let oc_b: Vec<Vec<Option<Vector>>> = lexicon
        .core_context_synonyms(b)
        .into_iter()
        .map(|syn| phrase_vectors(model, syn))
        .collect();
    mean_defined(
        oc_a.iter()
            .flat_map(|x| oc_b.iter().map(move |y| mean_cross(x, y))),
    )
}

/// Two-level sense relatedness.
pub fn rel_senses(
    model: &EmbeddingModel,
    lexicon: &Lexicon,
    a: &Sense,
    b: &Sense,
    weights: RelWeights,
) -> Result<f64> {
    let r0 = rel0_senses(model, a, b)?;
    let r1 = rel1_senses(model, lexicon, a, b);
    weights.combine(r0, r1)
}

fn mean_against(xs: &[Option<Vector>], w: &[f64]) -> Option<f64> {
    mean_defined(
        xs.iter()
            .map(|x| x.as_ref().and_then(|x| angular_opt(x, w))),
    )
}

/// Level-0 relatedness between a sense and a word.
pub fn rel0_sense_word(model: &EmbeddingModel, t: &Sense, word: &str) -> Option<f64> {
    let w = model.phrase_vector(word)?;
    mean_against(&phrase_vectors(model, &t.synonyms), &w)
}

/// Level-1 relatedness between a sense and a word.
pub fn rel1_sense_word(
    model: &EmbeddingModel,
    lexicon: &Lexicon,
    t: &Sense,
    word: &str,
) -> Option<f64> {
    let w = model.phrase_vector(word)?;
    rel1_against(model, lexicon, t, &w)
}

fn rel1_against(model: &EmbeddingModel, lexicon: &Lexicon, t: &Sense, w: &[f64]) -> Option<f64> {
    mean_defined(
        lexicon
            .core_context_synonyms(t)
            .into_iter()
            .map(|syn| mean_against(&phrase_vectors(model, syn), w)),
    )
}

/// Two-level relatedness between a sense and a word.
pub fn rel_sense_word(
    model: &EmbeddingModel,
    lexicon: &Lexicon,
    t: &Sense,
    word: &str,
    weights: RelWeights,
) -> Result<f64> {
    require_synonyms(t)?;
    let w = model.phrase_vector(word).ok_or(Error::Unrepresentable)?;
    let r0 = mean_against(&phrase_vectors(model, &t.synonyms), &w);
    let r1 = rel1_against(model, lexicon, t, &w);
    weights.combine(r0, r1)
}
