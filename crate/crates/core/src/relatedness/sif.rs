//! Smooth inverse frequency embeddings of sense descriptions.
//!
//! Each description is embedded as the weighted average of its token vectors,
//! with weight `a / (a + p(token))`. Optionally the first principal direction
//! `u` of the (centered) description set is removed: `v <- v - (u·v) u`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{normalize, tokenize};
use crate::vecstore::{EmbeddingModel, SenseVectors, Vector};

pub const DEFAULT_SMOOTHING: f64 = 1e-3;

const POWER_ITERATIONS: usize = 5000;
const POWER_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SifConfig {
    pub smoothing: f64,
    pub word_freq_source: Option<PathBuf>,
    pub remove_component: bool,
}

impl Default for SifConfig {
    fn default() -> Self {
        SifConfig {
            smoothing: DEFAULT_SMOOTHING,
            word_freq_source: None,
            remove_component: true,
        }
    }
}

impl SifConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.smoothing.is_finite() && self.smoothing > 0.0) {
            return Err(Error::Config(format!(
                "SIF smoothing must be positive (got {})",
                self.smoothing
            )));
        }
        Ok(())
    }

    /// Loads the configured frequency table, or a uniform one when unset.
    pub fn frequencies(&self) -> Result<WordFrequencies> {
        match &self.word_freq_source {
            Some(path) => WordFrequencies::load(path),
            None => Ok(WordFrequencies::uniform()),
        }
    }
}

/// Relative token frequencies read from `token count` lines.
#[derive(Debug, Clone, Default)]
pub struct WordFrequencies {
    counts: HashMap<String, u64>,
    total: u64,
}

impl WordFrequencies {
    /// Every token gets probability 0, so every SIF weight is 1.
    pub fn uniform() -> Self {
        Self::default()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file))
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut freqs = Self::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let mut fields = line.split_ascii_whitespace();
            let (Some(token), Some(count), None) = (fields.next(), fields.next(), fields.next())
            else {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(Error::parse(i + 1, "expected \"token count\""));
            };
            let count: u64 = count
                .parse()
                .ok()
                .filter(|&c| c > 0)
                .ok_or_else(|| Error::parse(i + 1, "count must be a positive integer"))?;
            *freqs.counts.entry(token.to_owned()).or_default() += count;
            freqs.total += count;
        }
        Ok(freqs)
    }

    /// Relative frequency; lowercased form first, then the raw token.
    pub fn probability(&self, token: &str) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let count = self
            .counts
            .get(&normalize(token))
            .or_else(|| self.counts.get(token))
            .copied()
            .unwrap_or(0);
        count as f64 / self.total as f64
    }

    pub fn is_uniform(&self) -> bool {
        self.total == 0
    }
}

#[derive(Debug, Clone)]
pub struct SifOutput {
    pub vectors: SenseVectors,
    /// The removed direction, when removal happened.
    pub principal_direction: Option<Vector>,
    /// Descriptions with no in-vocabulary token.
    pub skipped: Vec<String>,
}

/// Embeds `(sense id, description terms)` pairs.
pub fn sif_embeddings<'a, I>(
    model: &EmbeddingModel,
    descriptions: I,
    cfg: &SifConfig,
    freqs: &WordFrequencies,
) -> Result<SifOutput>
where
    I: IntoIterator<Item = (&'a str, &'a [String])>,
{
    cfg.validate()?;
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (id, terms) in descriptions {
        match weighted_average(model, terms, cfg.smoothing, freqs) {
            Some(v) => {
                ids.push(id.to_owned());
                rows.push(v);
            }
            None => {
                log::warn!("SIF: description of {id} has no in-vocabulary token");
                skipped.push(id.to_owned());
            }
        }
    }

    let mut principal_direction = None;
    if cfg.remove_component && rows.len() >= 2 {
        if let Some(u) = first_principal_direction(&rows) {
            for row in &mut rows {
                let proj: f64 = row.iter().zip(u.iter()).map(|(x, y)| x * y).sum();
                let adjusted: Vec<f64> = row
                    .iter()
                    .zip(u.iter())
                    .map(|(x, y)| x - proj * y)
                    .collect();
                *row = Vector::new(adjusted)?;
            }
            principal_direction = Some(u);
        }
    }

    let mut vectors = SenseVectors::new(model.dim());
    for (id, v) in ids.into_iter().zip(rows) {
        vectors.insert(id, v)?;
    }
    Ok(SifOutput {
        vectors,
        principal_direction,
        skipped,
    })
}

fn weighted_average(
    model: &EmbeddingModel,
    terms: &[String],
    smoothing: f64,
    freqs: &WordFrequencies,
) -> Option<Vector> {
    let mut sum = vec![0.0; model.dim()];
    let mut weight_total = 0.0;
    for token in terms.iter().flat_map(|t| tokenize(t)) {
        let Some(v) = model.lookup(token) else {
            continue;
        };
        let w = smoothing / (smoothing + freqs.probability(token));
        for (s, x) in sum.iter_mut().zip(v) {
            *s += w * x;
        }
        weight_total += w;
    }
    if weight_total == 0.0 {
        return None;
    }
    sum.iter_mut().for_each(|s| *s /= weight_total);
    Vector::new(sum).ok()
}

/// Unit-norm first principal direction of the centered rows, by power
/// iteration on `XᵀX` from the normalized all-ones vector. Returns `None` when
/// the centered rows are all zero.
pub fn first_principal_direction(rows: &[Vector]) -> Option<Vector> {
    let n = rows.len();
    let dim = rows.first()?.dim();
    let mean: Vec<f64> = (0..dim)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();

    let apply = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for row in &centered {
            let p: f64 = row.iter().zip(v).map(|(x, y)| x * y).sum();
            for (o, x) in out.iter_mut().zip(row) {
                *o += p * x;
            }
        }
        out
    };

    // All-ones first; basis vectors when it happens to be in the null space.
    let starts = std::iter::once(vec![1.0; dim]).chain((0..dim).map(|j| {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        e
    }));
    for start in starts {
        let mut v = unit(start)?;
        let mut produced = false;
        for _ in 0..POWER_ITERATIONS {
            let Some(next) = unit(apply(&v)) else {
                break;
            };
            let change: f64 = next
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            v = next;
            produced = true;
            if change < POWER_TOLERANCE {
                break;
            }
        }
        if produced {
            return Vector::new(v).ok();
        }
    }
    None
}

fn unit(v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    Some(v.into_iter().map(|x| x / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecstore::centroid;

    fn model() -> EmbeddingModel {
        EmbeddingModel::from_entries(
            "m",
            vec![
                ("a", vec![1.0, 0.0, 0.0]),
                ("b", vec![0.0, 2.0, 0.0]),
                ("c", vec![1.0, 1.0, 3.0]),
                ("d", vec![-1.0, 0.5, 0.25]),
            ],
        )
        .unwrap()
    }

    fn terms(ts: &[&str]) -> Vec<String> {
        ts.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn uniform_without_removal_is_centroid() {
        let m = model();
        let d1 = terms(&["a", "b c"]);
        let d2 = terms(&["d", "zz"]);
        let cfg = SifConfig {
            remove_component: false,
            ..SifConfig::default()
        };
        let out = sif_embeddings(
            &m,
            [("s1", d1.as_slice()), ("s2", d2.as_slice())],
            &cfg,
            &WordFrequencies::uniform(),
        )
        .unwrap();
        let expect = centroid([
            m.lookup("a").unwrap(),
            m.lookup("b").unwrap(),
            m.lookup("c").unwrap(),
        ])
        .unwrap();
        assert_eq!(out.vectors.get("s1").unwrap(), &expect);
        assert_eq!(
            out.vectors.get("s2").unwrap().as_slice(),
            m.lookup("d").unwrap()
        );
        assert!(out.principal_direction.is_none());
    }

    #[test]
    fn single_description_skips_removal() {
        let m = model();
        let d = terms(&["a", "b"]);
        let out = sif_embeddings(
            &m,
            [("s", d.as_slice())],
            &SifConfig::default(),
            &WordFrequencies::uniform(),
        )
        .unwrap();
        assert!(out.principal_direction.is_none());
        assert_eq!(out.vectors.get("s").unwrap().as_slice(), &[0.5, 1.0, 0.0]);
    }

    #[test]
    fn oov_description_skipped() {
        let m = model();
        let d = terms(&["qq"]);
        let e = terms(&["a"]);
        let out = sif_embeddings(
            &m,
            [("s", d.as_slice()), ("t", e.as_slice())],
            &SifConfig::default(),
            &WordFrequencies::uniform(),
        )
        .unwrap();
        assert_eq!(out.skipped, vec!["s".to_string()]);
        assert!(out.vectors.get("s").is_none());
    }

    #[test]
    fn two_descriptions_orthogonal_to_difference_direction() {
        let m = model();
        let d1 = terms(&["a", "c"]);
        let d2 = terms(&["b", "d"]);
        let out = sif_embeddings(
            &m,
            [("s1", d1.as_slice()), ("s2", d2.as_slice())],
            &SifConfig::default(),
            &WordFrequencies::uniform(),
        )
        .unwrap();
        let u = out.principal_direction.unwrap();
        // With two rows the centered matrix has rank one along v1 - v2.
        let v1 = [1.0, 0.5, 1.5];
        let v2 = [-0.5, 1.25, 0.125];
        let diff: Vec<f64> = v1.iter().zip(&v2).map(|(a, b)| a - b).collect();
        let norm = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dot: f64 = diff.iter().zip(u.iter()).map(|(a, b)| a * b / norm).sum();
        assert!((dot.abs() - 1.0).abs() < 1e-9, "{dot}");
        for id in ["s1", "s2"] {
            let v = out.vectors.get(id).unwrap();
            let p: f64 = v.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
            assert!(p.abs() < 1e-9);
        }
    }

    #[test]
    fn frequency_weights() {
        let freqs = WordFrequencies::read("a 3\nb 1\n".as_bytes()).unwrap();
        assert_eq!(freqs.probability("A"), 0.75);
        assert_eq!(freqs.probability("zz"), 0.0);
        let m = model();
        let d = terms(&["a", "b"]);
        let cfg = SifConfig {
            smoothing: 0.25,
            remove_component: false,
            word_freq_source: None,
        };
        let out = sif_embeddings(&m, [("s", d.as_slice())], &cfg, &freqs).unwrap();
        // weights 0.25/1.0 and 0.25/0.5
        let (wa, wb) = (0.25, 0.5);
        let expect = [wa / (wa + wb), 2.0 * wb / (wa + wb), 0.0];
        for (x, y) in out.vectors.get("s").unwrap().iter().zip(expect) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn frequency_table_errors() {
        assert!(WordFrequencies::read("a 0\n".as_bytes()).is_err());
        assert!(WordFrequencies::read("a\n".as_bytes()).is_err());
        assert!(WordFrequencies::read("a 1 2\n".as_bytes()).is_err());
        assert!(SifConfig {
            smoothing: 0.0,
            ..SifConfig::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn null_space_start_falls_back_to_basis() {
        // Centered rows are ±(1,-1,0): orthogonal to the all-ones start.
        let rows = vec![
            Vector::new(vec![1.0, 0.0, 0.0]).unwrap(),
            Vector::new(vec![0.0, 1.0, 0.0]).unwrap(),
        ];
        let u = first_principal_direction(&rows).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u[0].abs() - s).abs() < 1e-12 && (u[1].abs() - s).abs() < 1e-12);
        let same = vec![rows[0].clone(), rows[0].clone()];
        assert!(first_principal_direction(&same).is_none());
    }
}
