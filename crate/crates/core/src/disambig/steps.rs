use std::collections::HashSet;

use crate::lexicon::{Lexicon, Sense};
use crate::relatedness::{angular_opt, rel_sense_word, RelWeights};
use crate::text::{normalize, Stopwords};
use crate::vecstore::{centroid, EmbeddingModel, SenseVectors, Vector};

use super::{ActiveContext, AlgoParams, SenseScore, StepTrace, Strategy};

fn max_score(scores: &[SenseScore]) -> f64 {
    scores.iter().map(|s| s.score).fold(0.0, f64::max)
}

/// Step 1: mean sense↔word relatedness of each sense against the active
/// context. Unscorable context words are skipped; an empty context scores 0.
pub fn step1_base_scores(
    model: &EmbeddingModel,
    lexicon: &Lexicon,
    senses: &[&Sense],
    ca: &ActiveContext,
    weights: RelWeights,
) -> Vec<SenseScore> {
    senses
        .iter()
        .map(|sense| {
            let (sum, n) = ca
                .words()
                .filter_map(|w| rel_sense_word(model, lexicon, sense, w, weights).ok())
                .fold((0.0, 0usize), |(s, n), r| (s + r, n + 1));
            let score = if n == 0 { 0.0 } else { sum / n as f64 };
            SenseScore {
                sense_id: sense.id.clone(),
                score,
                trace: StepTrace {
                    step1: score,
                    ..StepTrace::default()
                },
            }
        })
        .collect()
}

/// `|D ∩ C| / min(|D|, |C|)` over normalized words, stopwords removed from the
/// description side.
pub fn overlap(ca: &ActiveContext, description: &[String], stopwords: &Stopwords) -> f64 {
    let context: HashSet<String> = ca.words().map(normalize).collect();
    let desc: HashSet<String> = description
        .iter()
        .map(|t| normalize(t))
        .filter(|t| !t.is_empty() && !stopwords.contains(t))
        .collect();
    let denom = context.len().min(desc.len());
    if denom == 0 {
        return 0.0;
    }
    desc.intersection(&context).count() as f64 / denom as f64
}

/// Centroid of the active-context vectors, or the keyword vector when the
/// active context is empty.
pub fn context_centroid(model: &EmbeddingModel, ca: &ActiveContext, kd: &str) -> Option<Vector> {
    let vectors: Vec<Vector> = ca.words().filter_map(|w| model.phrase_vector(w)).collect();
    if vectors.is_empty() {
        model.phrase_vector(kd)
    } else {
        centroid(&vectors).ok()
    }
}

fn description_vectors(model: &EmbeddingModel, sense: &Sense) -> Vec<Vector> {
    sense
        .description_terms
        .iter()
        .filter_map(|t| model.phrase_vector(t))
        .collect()
}

/// The Step-2 strength of one sense, or `None` when the strategy has nothing
/// to work with (the sense then keeps its score).
#[allow(clippy::too_many_arguments)]
pub fn strength(
    model: &EmbeddingModel,
    kd: &str,
    sense: &Sense,
    ca: &ActiveContext,
    params: &AlgoParams,
    stopwords: &Stopwords,
    store: Option<&SenseVectors>,
    ctx_centroid: Option<&Vector>,
) -> Option<f64> {
    match params.strategy {
        Strategy::Overlap => Some(overlap(ca, &sense.description_terms, stopwords)),
        Strategy::Average => {
            let ctx: Vec<Vector> = ca.words().filter_map(|w| model.phrase_vector(w)).collect();
            let desc = description_vectors(model, sense);
            let (sum, n) = ctx
                .iter()
                .flat_map(|c| desc.iter().filter_map(move |d| angular_opt(c, d)))
                .fold((0.0, 0usize), |(s, n), r| (s + r, n + 1));
            (n > 0).then(|| sum / n as f64)
        }
        Strategy::Sif | Strategy::DocVec => {
            let target = store?.get(&sense.id)?;
            angular_opt(ctx_centroid?, target)
        }
        Strategy::TopK => {
            let ctx_centroid = ctx_centroid?;
            let desc = description_vectors(model, sense);
            if desc.is_empty() {
                return None;
            }
            let mut query_set: Vec<Vector> =
                ca.words().filter_map(|w| model.phrase_vector(w)).collect();
            query_set.extend(model.phrase_vector(kd));
            let query = centroid(&query_set).ok()?;
            let mut ranked: Vec<(f64, &Vector)> = desc
                .iter()
                .map(|d| (angular_opt(&query, d).unwrap_or(f64::NEG_INFINITY), d))
                .collect();
            ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
            let top = centroid(ranked.iter().take(params.k).map(|(_, v)| v.as_slice())).ok()?;
            angular_opt(ctx_centroid, &top)
        }
    }
}

/// Step 2: `score + (1 - maxScore) * strength` for every sense.
#[allow(clippy::too_many_arguments)]
pub fn step2_rescore(
    model: &EmbeddingModel,
    kd: &str,
    senses: &[&Sense],
    mut scores: Vec<SenseScore>,
    ca: &ActiveContext,
    params: &AlgoParams,
    stopwords: &Stopwords,
    store: Option<&SenseVectors>,
) -> Vec<SenseScore> {
    let max = max_score(&scores);
    let ctx_centroid = match params.strategy {
        Strategy::Sif | Strategy::DocVec | Strategy::TopK => context_centroid(model, ca, kd),
        _ => None,
    };
    for (score, sense) in scores.iter_mut().zip(senses) {
        let Some(x) = strength(
            model,
            kd,
            sense,
            ca,
            params,
            stopwords,
            store,
            ctx_centroid.as_ref(),
        ) else {
            continue;
        };
        let updated = (score.score + (1.0 - max) * x).min(1.0);
        score.trace.step2 = updated - score.score;
        score.score = updated;
    }
    scores
}

/// `sqrt(a * frequency / total + b)`.
pub fn norm_freq(sense: &Sense, total_freq: f64, a: f64, b: f64) -> f64 {
    (a * sense.frequency / total_freq + b).sqrt()
}

/// Step 3: senses scoring above `proximity_factor * maxScore` gain
/// `(1 - maxScore) * normFreq`. Skipped when no sense has a known frequency.
/// `scores` and `senses` must be parallel.
pub fn step3_frequency(
    mut scores: Vec<SenseScore>,
    senses: &[&Sense],
    params: &AlgoParams,
) -> Vec<SenseScore> {
    let total: f64 = senses.iter().map(|s| s.frequency).sum();
    if total <= 0.0 {
        return scores;
    }
    let max = max_score(&scores);
    let gate = params.proximity_factor * max;
    for (score, sense) in scores.iter_mut().zip(senses) {
        if score.score > gate {
            let bonus = (1.0 - max) * norm_freq(sense, total, params.freq_a, params.freq_b);
            let updated = (score.score + bonus).min(1.0);
            score.trace.step3 = updated - score.score;
            score.score = updated;
        }
    }
    scores
}
