//! Synthetic workloads for the benchmarks.

use kwsense::{ContextRef, EmbeddingModel, Lexicon, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Keyword every synthetic sense is attached to.
pub const KEYWORD: &str = "kd";

pub struct Workload {
    pub model: EmbeddingModel,
    pub lexicon: Lexicon,
    pub context: Vec<String>,
}

/// `senses` candidate senses for [`KEYWORD`], each with `terms` description
/// terms drawn from a random vocabulary of `dim`-dimensional vectors.
pub fn workload(senses: usize, terms: usize, dim: usize, seed: u64) -> Workload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab_size = (senses * 2 + terms * 4).max(64);
    let vocab: Vec<String> = (0..vocab_size).map(|i| format!("t{i}")).collect();
    let mut entries: Vec<(String, Vec<f64>)> = vocab
        .iter()
        .map(|w| (w.clone(), random_vector(&mut rng, dim)))
        .collect();
    entries.push((KEYWORD.into(), random_vector(&mut rng, dim)));
    let model = EmbeddingModel::from_entries("synthetic", entries).expect("non-empty vectors");

    let senses: Vec<Sense> = (0..senses)
        .map(|i| Sense {
            id: format!("{KEYWORD}#{i}"),
            lemmas: vec![KEYWORD.into()],
            synonyms: vec![KEYWORD.into(), vocab[rng.gen_range(0..vocab_size)].clone()],
            core_context: vec![ContextRef::Label(
                vocab[rng.gen_range(0..vocab_size)].clone(),
            )],
            description_terms: (0..terms)
                .map(|_| vocab[rng.gen_range(0..vocab_size)].clone())
                .collect(),
            frequency: rng.gen_range(0.0..10.0),
        })
        .collect();
    let lexicon = Lexicon::from_senses(senses).expect("valid synthetic lexicon");
    let context = (0..8)
        .map(|_| vocab[rng.gen_range(0..vocab_size)].clone())
        .collect();
    Workload {
        model,
        lexicon,
        context,
    }
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().any(|x| *x != 0.0) {
            return v;
        }
    }
}
