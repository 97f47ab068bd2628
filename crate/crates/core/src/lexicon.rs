//! Portable sense inventory stored as JSON Lines.
//!
//! Each line holds one sense:
//!
//! ```json
//! {"id":"java#island","lemmas":["java"],"synonyms":["java"],
//!  "core_context":[{"label":"island"}],"description_terms":["indonesian","island"],
//!  "frequency":1}
//! ```
//!
//! `core_context` entries are either `{"ref": "<sense id>"}` or
//! `{"label": "<text>"}`. `frequency` is optional and defaults to 0 (unknown).
//! Unknown fields are ignored with a warning.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::normalize;

const KNOWN_FIELDS: &[&str] = &[
    "id",
    "lemmas",
    "synonyms",
    "core_context",
    "description_terms",
    "frequency",
];

/// One member of a sense's core ontological context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextRef {
    /// Another sense of the same inventory.
    Ref(String),
    /// A plain label, treated as a single-synonym pseudo-sense.
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sense {
    pub id: String,
    /// Surface keywords this sense answers to.
    pub lemmas: Vec<String>,
    /// Equivalent labels, including the term label itself.
    pub synonyms: Vec<String>,
    /// Synonym/hypernym context used by the level-1 relatedness.
    pub core_context: Vec<ContextRef>,
    /// Broader description (gloss words, related-term labels) used when re-scoring.
    pub description_terms: Vec<String>,
    #[serde(default)]
    pub frequency: f64,
}

impl Sense {
    fn check(&self) -> std::result::Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if self.synonyms.is_empty() {
            return Err(format!("sense {} has no synonyms", self.id));
        }
        if self.lemmas.iter().all(|l| normalize(l).is_empty()) {
            return Err(format!("sense {} has no lemmas", self.id));
        }
        if !self.frequency.is_finite() || self.frequency < 0.0 {
            return Err(format!("sense {} has invalid frequency", self.id));
        }
        Ok(())
    }
}

/// Keyword to candidate-senses index over a set of senses.
#[derive(Debug, Clone)]
pub struct Lexicon {
    senses: Vec<Sense>,
    by_id: HashMap<String, usize>,
    index: HashMap<String, Vec<usize>>,
    warnings: Vec<String>,
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.senses == other.senses
    }
}

impl Lexicon {
    /// Builds a lexicon, rejecting duplicate ids and senses without synonyms.
    /// Dangling references are allowed here; see [`Lexicon::validate`].
    pub fn from_senses(senses: Vec<Sense>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(senses.len());
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, sense) in senses.iter().enumerate() {
            sense.check().map_err(Error::Lexicon)?;
            if by_id.insert(sense.id.clone(), i).is_some() {
                return Err(Error::Lexicon(format!("duplicate sense id {}", sense.id)));
            }
            for lemma in &sense.lemmas {
                let key = normalize(lemma);
                if key.is_empty() {
                    continue;
                }
                let ids = index.entry(key).or_default();
                if ids.last() != Some(&i) {
                    ids.push(i);
                }
            }
        }
        Ok(Lexicon {
            senses,
            by_id,
            index,
            warnings: Vec::new(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file))
    }

    /// Parses JSONL and fails on any dangling sense reference.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut senses = Vec::new();
        let mut warnings = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let value: serde_json::Value = serde_json::from_str(&line)
                .map_err(|e| Error::parse(lineno, format!("malformed JSON: {e}")))?;
            if let Some(obj) = value.as_object() {
                for key in obj.keys() {
                    if !KNOWN_FIELDS.contains(&key.as_str()) {
                        let w = format!("line {lineno}: unknown field {key:?} ignored");
                        log::warn!("{w}");
                        warnings.push(w);
                    }
                }
            }
            let sense: Sense = serde_json::from_value(value)
                .map_err(|e| Error::parse(lineno, format!("invalid sense: {e}")))?;
            sense.check().map_err(|m| Error::parse(lineno, m))?;
            senses.push(sense);
        }
        let mut lexicon = Self::from_senses(senses)?;
        lexicon.warnings = warnings;

        let report = lexicon.validate();
        if !report.dangling.is_empty() {
            let offenders: Vec<String> = report
                .dangling
                .iter()
                .map(|d| format!("{} -> {}", d.sense, d.reference))
                .collect();
            return Err(Error::Lexicon(format!(
                "dangling sense references: {}",
                offenders.join(", ")
            )));
        }
        Ok(lexicon)
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for sense in &self.senses {
            serde_json::to_writer(&mut w, sense).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Candidate senses for a keyword, in file order.
    pub fn senses_of(&self, keyword: &str) -> Vec<&Sense> {
        self.index
            .get(&normalize(keyword))
            .map(|ids| ids.iter().map(|&i| &self.senses[i]).collect())
            .unwrap_or_default()
    }

    pub fn get(&self, id: &str) -> Option<&Sense> {
        self.by_id.get(id).map(|&i| &self.senses[i])
    }

    /// File-order position of a sense.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn senses(&self) -> &[Sense] {
        &self.senses
    }

    pub fn len(&self) -> usize {
        self.senses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.senses.is_empty()
    }

    /// Normalized lemmas in the index.
    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.index.keys().map(String::as_str)
    }

    /// Warnings collected while reading (unknown fields).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Synonym lists of the core-context members of `sense`. Sense references
    /// resolve to the referenced synonyms; labels become a one-element list.
    /// Dangling references are skipped.
    pub fn core_context_synonyms<'a>(&'a self, sense: &'a Sense) -> Vec<&'a [String]> {
        sense
            .core_context
            .iter()
            .filter_map(|c| match c {
                ContextRef::Ref(id) => self.get(id).map(|s| s.synonyms.as_slice()),
                ContextRef::Label(label) => Some(std::slice::from_ref(label)),
            })
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport {
            total_senses: self.senses.len(),
            ..ValidationReport::default()
        };
        for sense in &self.senses {
            for c in &sense.core_context {
                if let ContextRef::Ref(id) = c {
                    if !self.by_id.contains_key(id) {
                        report.dangling.push(DanglingRef {
                            sense: sense.id.clone(),
                            reference: id.clone(),
                        });
                    }
                }
            }
            if sense.description_terms.is_empty() {
                report.empty_descriptions.push(sense.id.clone());
            }
            if sense.frequency == 0.0 {
                report.zero_frequency += 1;
            }
        }
        if report.total_senses > 0 && report.zero_frequency == report.total_senses {
            report
                .notes
                .push("all frequencies are zero: frequency re-ranking will be skipped".into());
        }
        report
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DanglingRef {
    pub sense: String,
    pub reference: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub total_senses: usize,
    pub dangling: Vec<DanglingRef>,
    pub empty_descriptions: Vec<String>,
    pub zero_frequency: usize,
    pub notes: Vec<String>,
}

impl ValidationReport {
    /// True when nothing was flagged.
    pub fn is_empty(&self) -> bool {
        self.dangling.is_empty()
            && self.empty_descriptions.is_empty()
            && self.zero_frequency == 0
            && self.notes.is_empty()
    }

    pub fn zero_frequency_fraction(&self) -> f64 {
        if self.total_senses == 0 {
            0.0
        } else {
            self.zero_frequency as f64 / self.total_senses as f64
        }
    }
}
