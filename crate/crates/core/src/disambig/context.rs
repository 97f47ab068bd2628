use serde::Serialize;

use crate::error::{Error, Result};
use crate::relatedness::angular_opt;
use crate::text::{normalize, Stopwords};
use crate::vecstore::EmbeddingModel;

pub const DEFAULT_MAX_CONTEXT: usize = 4;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct ContextConfig {
    pub max_context: usize,
    /// Minimum word relatedness to the keyword for a context word to be kept.
    pub threshold: f64,
    pub stopwords: Stopwords,
}

impl Default for ContextConfig {
    fn default() -> Self {
        ContextConfig {
            max_context: DEFAULT_MAX_CONTEXT,
            threshold: DEFAULT_THRESHOLD,
            stopwords: Stopwords::english(),
        }
    }
}

impl ContextConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_context < 1 {
            return Err(Error::Config("max_context must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!(
                "threshold must lie in [0, 1] (got {})",
                self.threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextMember {
    pub word: String,
    pub score: f64,
}

/// The context words most related to the keyword, best first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActiveContext {
    pub target: String,
    pub members: Vec<ContextMember>,
}

impl ActiveContext {
    pub fn empty(target: impl Into<String>) -> Self {
        ActiveContext {
            target: target.into(),
            members: Vec::new(),
        }
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.members.iter().map(|m| m.word.as_str())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Deduplicates and filters `context_words`, scores each survivor against
/// `kd`, and keeps the best `max_context` at or above the threshold. Ties keep
/// the earlier word.
pub fn select_active_context<S: AsRef<str>>(
    model: &EmbeddingModel,
    context_words: &[S],
    kd: &str,
    cfg: &ContextConfig,
) -> ActiveContext {
    let target = normalize(kd);
    let Some(kd_vec) = model.phrase_vector(kd) else {
        return ActiveContext::empty(target);
    };
    let mut seen = std::collections::HashSet::new();
    let mut members: Vec<ContextMember> = Vec::new();
    for raw in context_words {
        let word = normalize(raw.as_ref());
        if word.is_empty() || word == target || cfg.stopwords.contains(&word) {
            continue;
        }
        if !seen.insert(word.clone()) {
            continue;
        }
        let Some(v) = model.phrase_vector(&word) else {
            continue;
        };
        let Some(score) = angular_opt(&v, &kd_vec) else {
            continue;
        };
        if score >= cfg.threshold {
            members.push(ContextMember { word, score });
        }
    }
    // Stable: equal scores keep their original order.
    members.sort_by(|a, b| b.score.total_cmp(&a.score));
    members.truncate(cfg.max_context);
    ActiveContext { target, members }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_at(deg: f64) -> Vec<f64> {
        let r = deg.to_radians();
        vec![r.cos(), r.sin()]
    }

    fn model() -> EmbeddingModel {
        // angular relatedness to java = 1 - angle/180°
        EmbeddingModel::from_entries(
            "ctx",
            vec![
                ("java", unit_at(0.0)),
                ("island", unit_at(36.0)),
                ("bali", unit_at(-54.0)),
                ("the", unit_at(1.0)),
                ("far", unit_at(120.0)),
                ("w1", unit_at(10.0)),
                ("w2", unit_at(20.0)),
                ("w3", unit_at(30.0)),
                ("w4", unit_at(40.0)),
                ("w5", unit_at(50.0)),
                ("w6", unit_at(-10.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn selects_and_orders() {
        let ca = select_active_context(
            &model(),
            &["the", "island", "island", "bali"],
            "java",
            &ContextConfig::default(),
        );
        assert_eq!(ca.words().collect::<Vec<_>>(), ["island", "bali"]);
        assert!((ca.members[0].score - 0.8).abs() < 1e-12);
        assert!((ca.members[1].score - 0.7).abs() < 1e-12);
    }

    #[test]
    fn truncates_to_max_context_with_position_ties() {
        let ca = select_active_context(
            &model(),
            &["w5", "w4", "w3", "w2", "w1", "w6", "far", "java", "Java"],
            "java",
            &ContextConfig::default(),
        );
        // w1 and w6 tie at 10°; w1 comes first.
        assert_eq!(ca.words().collect::<Vec<_>>(), ["w1", "w6", "w2", "w3"]);
        assert!(ca.members.iter().all(|m| m.score >= 0.5));
    }

    #[test]
    fn stopwords_only_gives_empty() {
        let ca = select_active_context(
            &model(),
            &["the", "The", "of"],
            "java",
            &ContextConfig::default(),
        );
        assert!(ca.is_empty());
        let ca = select_active_context(&model(), &["island"], "qzx", &ContextConfig::default());
        assert!(ca.is_empty());
    }

    #[test]
    fn config_validation() {
        let mut cfg = ContextConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.max_context = 0;
        assert!(cfg.validate().is_err());
        cfg.max_context = 1;
        cfg.threshold = 1.5;
        assert!(cfg.validate().is_err());
    }
}
