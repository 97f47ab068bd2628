//! Evaluation protocols: correlation with human word-pair judgments and
//! precision/recall/F1 disambiguation scoring.

mod spearman;

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disambig::{AlgoParams, ContextConfig, Disambiguator, Stores};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::relatedness::rel_words;
use crate::vecstore::EmbeddingModel;

pub use spearman::{average_ranks, pearson, spearman};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordPair {
    pub word1: String,
    pub word2: String,
    pub human: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordPairDataset {
    pub pairs: Vec<WordPair>,
}

impl WordPairDataset {
    pub fn new(pairs: Vec<WordPair>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::Dataset(
                "word-pair dataset needs at least 2 pairs".into(),
            ));
        }
        if pairs.iter().any(|p| !p.human.is_finite()) {
            return Err(Error::Dataset("non-finite human score".into()));
        }
        Ok(WordPairDataset { pairs })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_tsv(BufReader::new(file))
    }

    /// Reads `word1<TAB>word2<TAB>score` lines. A first line whose score does
    /// not parse is taken as a header; blank and `#` lines are skipped.
    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut first = true;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
            let is_first = std::mem::replace(&mut first, false);
            if fields.len() != 3 {
                return Err(Error::parse(i + 1, "expected word1<TAB>word2<TAB>score"));
            }
            let human = match fields[2].parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ if is_first => continue,
                _ => return Err(Error::parse(i + 1, format!("bad score {:?}", fields[2]))),
            };
            pairs.push(WordPair {
                word1: fields[0].to_owned(),
                word2: fields[1].to_owned(),
                human,
            });
        }
        Self::new(pairs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairEvaluation {
    pub rho: f64,
    pub covered: usize,
    pub skipped: usize,
}

/// Spearman correlation between model relatedness and human scores over the
/// pairs the model covers.
pub fn eval_wordpairs(model: &EmbeddingModel, dataset: &WordPairDataset) -> Result<PairEvaluation> {
    let mut ours = Vec::with_capacity(dataset.pairs.len());
    let mut human = Vec::with_capacity(dataset.pairs.len());
    for p in &dataset.pairs {
        if let Some(r) = rel_words(model, &p.word1, &p.word2) {
            ours.push(r);
            human.push(p.human);
        }
    }
    let covered = ours.len();
    let skipped = dataset.pairs.len() - covered;
    if covered < 2 {
        return Err(Error::Dataset(format!(
            "only {covered} pair(s) covered by the model; need at least 2"
        )));
    }
    Ok(PairEvaluation {
        rho: spearman(&ours, &human)?,
        covered,
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WsdTarget {
    pub position: usize,
    pub keyword: String,
    pub gold: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WsdItem {
    pub item_id: String,
    pub tokens: Vec<String>,
    pub targets: Vec<WsdTarget>,
}

impl WsdItem {
    /// Every token except the one at `position`.
    pub fn context_for(&self, position: usize) -> Vec<&str> {
        self.tokens
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != position)
            .map(|(_, t)| t.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WsdCorpus {
    pub items: Vec<WsdItem>,
}

impl WsdCorpus {
    pub fn new(items: Vec<WsdItem>) -> Result<Self> {
        for item in &items {
            for t in &item.targets {
                if t.position >= item.tokens.len() {
                    return Err(Error::Dataset(format!(
                        "item {}: target position {} out of range",
                        item.item_id, t.position
                    )));
                }
                if t.gold.is_empty() {
                    return Err(Error::Dataset(format!(
                        "item {}: target {} has no gold sense",
                        item.item_id, t.position
                    )));
                }
            }
        }
        Ok(WsdCorpus { items })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_jsonl(BufReader::new(file))
    }

    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut items = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let item: WsdItem = serde_json::from_str(&line)
                .map_err(|e| Error::parse(i + 1, format!("invalid corpus item: {e}")))?;
            items.push(item);
        }
        Self::new(items)
    }

    pub fn target_count(&self) -> usize {
        self.items.iter().map(|i| i.targets.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetStatus {
    Answered,
    NoSenses,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetRecord {
    pub item_id: String,
    pub position: usize,
    pub keyword: String,
    pub gold: Vec<String>,
    pub predicted: Option<String>,
    pub score: Option<f64>,
    pub correct: bool,
    pub status: TargetStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Metrics {
    pub fn from_counts(attempted: usize, correct: usize, total: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(correct, attempted);
        let recall = ratio(correct, total);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Metrics {
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsdReport {
    pub attempted: usize,
    pub correct: usize,
    pub total: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold ids that do not exist in the lexicon.
    pub unresolved_gold: Vec<String>,
    pub warnings: Vec<String>,
    pub records: Vec<TargetRecord>,
}

impl WsdReport {
    pub fn from_records(records: Vec<TargetRecord>, lexicon: &Lexicon) -> Self {
        let total = records.len();
        let attempted = records
            .iter()
            .filter(|r| r.status == TargetStatus::Answered)
            .count();
        let correct = records.iter().filter(|r| r.correct).count();
        let Metrics {
            precision,
            recall,
            f1,
        } = Metrics::from_counts(attempted, correct, total);
        let unresolved_gold: Vec<String> = records
            .iter()
            .flat_map(|r| r.gold.iter())
            .filter(|g| lexicon.get(g).is_none())
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut warnings = Vec::new();
        if total == 0 {
            warnings.push("corpus has no targets".to_owned());
        }
        if !unresolved_gold.is_empty() {
            warnings.push(format!(
                "{} gold sense id(s) not found in the lexicon",
                unresolved_gold.len()
            ));
        }
        WsdReport {
            attempted,
            correct,
            total,
            precision,
            recall,
            f1,
            unresolved_gold,
            warnings,
            records,
        }
    }
}

fn score_target(d: &Disambiguator<'_>, item: &WsdItem, target: &WsdTarget) -> TargetRecord {
    let mut record = TargetRecord {
        item_id: item.item_id.clone(),
        position: target.position,
        keyword: target.keyword.clone(),
        gold: target.gold.clone(),
        predicted: None,
        score: None,
        correct: false,
        status: TargetStatus::NoSenses,
        error: None,
    };
    match d.disambiguate(&target.keyword, &item.context_for(target.position)) {
        Ok(result) => {
            if let Some(best) = result.best() {
                record.correct = target.gold.contains(&best.sense_id);
                record.predicted = Some(best.sense_id.clone());
                record.score = Some(best.score);
                record.status = TargetStatus::Answered;
            }
        }
        Err(Error::UnknownKeyword(_)) => {}
        Err(e) => {
            record.status = TargetStatus::Failed;
            record.error = Some(e.to_string());
        }
    }
    record
}

/// Scores every target of the corpus. Runs on the current rayon pool; the
/// records keep corpus order whatever the pool size.
pub fn eval_wsd_with(d: &Disambiguator<'_>, lexicon: &Lexicon, corpus: &WsdCorpus) -> WsdReport {
    let targets: Vec<(&WsdItem, &WsdTarget)> = corpus
        .items
        .iter()
        .flat_map(|item| item.targets.iter().map(move |t| (item, t)))
        .collect();
    let records: Vec<TargetRecord> = targets
        .par_iter()
        .map(|(item, t)| score_target(d, item, t))
        .collect();
    WsdReport::from_records(records, lexicon)
}

pub fn eval_wsd(
    model: &EmbeddingModel,
    lexicon: &Lexicon,
    corpus: &WsdCorpus,
    cfg: &ContextConfig,
    params: AlgoParams,
    stores: Stores<'_>,
) -> Result<WsdReport> {
    let d = Disambiguator::new(model, lexicon, cfg, params, stores)?;
    Ok(eval_wsd_with(&d, lexicon, corpus))
}
