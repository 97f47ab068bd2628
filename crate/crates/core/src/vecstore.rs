//! Pre-trained embedding models: loading, lookup and aggregate vectors.
//!
//! Two on-disk layouts are supported:
//!
//! * the text layout used by GloVe and word2vec text exports, with an optional
//!   `"<count> <dim>"` header followed by `token v1 ... vdim` lines;
//! * the word2vec binary layout: an ASCII `"<count> <dim>\n"` header, then for
//!   each entry the token bytes terminated by a space and `dim` little-endian
//!   `f32` values, optionally followed by a newline.
//!
//! Values are widened to `f64` on load and never normalized.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::ops::Deref;
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::text::{normalize, tokenize};

/// A dense vector with finite components.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Empty("vector has no components"));
        }
        if let Some(pos) = components.iter().position(|c| !c.is_finite()) {
            return Err(Error::Config(format!(
                "non-finite vector component at index {pos}"
            )));
        }
        Ok(Vector(components))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Vector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Vec<f64> {
        v.0
    }
}

/// Componentwise arithmetic mean of a nonempty set of equal-length vectors.
pub fn centroid<I, V>(vectors: I) -> Result<Vector>
where
    I: IntoIterator<Item = V>,
    V: AsRef<[f64]>,
{
    let mut iter = vectors.into_iter();
    let first = iter.next().ok_or(Error::NoVectors)?;
    let mut sum = first.as_ref().to_vec();
    if sum.is_empty() {
        return Err(Error::Empty("vector has no components"));
    }
    let mut count = 1usize;
    for v in iter {
        let v = v.as_ref();
        if v.len() != sum.len() {
            return Err(Error::DimMismatch {
                expected: sum.len(),
                found: v.len(),
            });
        }
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x;
        }
        count += 1;
    }
    let n = count as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    Vector::new(sum)
}

/// An immutable token to vector map.
#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    name: String,
    dim: usize,
    index: HashMap<String, usize>,
    tokens: Vec<String>,
    data: Vec<f64>,
    duplicates: usize,
}

impl EmbeddingModel {
    /// Builds a model from `(token, components)` pairs. Duplicate tokens keep
    /// their first occurrence; empty tokens are rejected.
    pub fn from_entries<I, S>(name: impl Into<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut builder: Option<Builder> = None;
        for (i, (token, values)) in entries.into_iter().enumerate() {
            let b = builder.get_or_insert_with(|| Builder::new(values.len()));
            b.push(token.into(), &values)
                .map_err(|m| Error::parse(i + 1, m))?;
        }
        builder
            .ok_or(Error::Empty("model has no entries"))?
            .finish(name.into())
    }

    /// Loads the text layout from a file.
    pub fn load_text(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_text(BufReader::new(file), model_name(path))
    }

    /// Loads the word2vec binary layout from a file.
    pub fn load_binary(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_binary(BufReader::new(file), model_name(path))
    }

    pub fn read_text<R: BufRead>(reader: R, name: impl Into<String>) -> Result<Self> {
        let mut builder: Option<Builder> = None;
        let mut header_allowed = true;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line?;
            let line = line.trim_end_matches(['\r', '\n']);
            let mut fields = line.split_ascii_whitespace();
            let Some(token) = fields.next() else {
                continue;
            };
            let rest: Vec<&str> = fields.collect();

            if header_allowed {
                header_allowed = false;
                if rest.len() == 1
                    && token.parse::<usize>().is_ok()
                    && rest[0].parse::<usize>().is_ok()
                {
                    let dim: usize = rest[0].parse().unwrap();
                    if dim == 0 {
                        return Err(Error::parse(lineno, "header declares dimension 0"));
                    }
                    builder = Some(Builder::new(dim));
                    continue;
                }
            }

            if rest.is_empty() {
                return Err(Error::parse(lineno, "line has a token but no values"));
            }
            let b = builder.get_or_insert_with(|| Builder::new(rest.len()));
            if rest.len() != b.dim {
                return Err(Error::parse(
                    lineno,
                    format!("expected {} values, found {}", b.dim, rest.len()),
                ));
            }
            let values = rest
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::parse(lineno, format!("bad number {s:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            b.push(token.to_owned(), &values)
                .map_err(|m| Error::parse(lineno, m))?;
        }
        match builder {
            Some(b) if !b.tokens.is_empty() => b.finish(name.into()),
            _ => Err(Error::Empty("model file has no vectors")),
        }
    }

    pub fn read_binary<R: BufRead>(mut reader: R, name: impl Into<String>) -> Result<Self> {
        let mut header = Vec::new();
        reader.read_until(b'\n', &mut header)?;
        let header = String::from_utf8_lossy(&header);
        let parts: Vec<&str> = header.split_ascii_whitespace().collect();
        let (count, dim) = match parts.as_slice() {
            [c, d] => match (c.parse::<usize>(), d.parse::<usize>()) {
                (Ok(c), Ok(d)) if d > 0 => (c, d),
                _ => return Err(Error::parse(1, "header is not two positive integers")),
            },
            _ => return Err(Error::parse(1, "header is not two integers")),
        };

        let mut builder = Builder::new(dim);
        let mut values = vec![0f32; dim];
        let mut token = Vec::new();
        for read in 0..count {
            let truncated = Error::Truncated {
                read,
                expected: count,
            };
            // Skip the optional newline left by the previous entry.
            loop {
                let buf = reader.fill_buf()?;
                match buf.first() {
                    None => return Err(truncated),
                    Some(b'\n') | Some(b'\r') => reader.consume(1),
                    Some(_) => break,
                }
            }
            token.clear();
            reader.read_until(b' ', &mut token)?;
            if token.pop() != Some(b' ') {
                return Err(truncated);
            }
            match reader.read_f32_into::<LittleEndian>(&mut values) {
                Ok(()) => {}
                Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Err(truncated),
                Err(e) => return Err(e.into()),
            }
            let widened: Vec<f64> = values.iter().map(|&v| f64::from(v)).collect();
            builder
                .push(String::from_utf8_lossy(&token).into_owned(), &widened)
                .map_err(|m| Error::parse(read + 2, m))?;
        }
        if builder.tokens.is_empty() {
            return Err(Error::Empty("model file has no vectors"));
        }
        builder.finish(name.into())
    }

    /// Writes the model in the text layout with a header line.
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{} {}", self.len(), self.dim)?;
        for (token, v) in self.iter() {
            write!(w, "{token}")?;
            for x in v {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Writes the model in the word2vec binary layout (values narrowed to `f32`).
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{} {}", self.len(), self.dim)?;
        for (token, v) in self.iter() {
            w.write_all(token.as_bytes())?;
            w.write_all(b" ")?;
            for &x in v {
                w.write_f32::<LittleEndian>(x as f32)?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Number of duplicate tokens dropped while loading.
    pub fn duplicate_count(&self) -> usize {
        self.duplicates
    }

    /// Exact-match lookup without normalization.
    pub fn get_exact(&self, token: &str) -> Option<&[f64]> {
        self.index
            .get(token)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    /// Looks up the lowercased token, falling back to the raw form.
    pub fn lookup(&self, token: &str) -> Option<&[f64]> {
        if token.is_empty() {
            return None;
        }
        self.get_exact(&normalize(token))
            .or_else(|| self.get_exact(token))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.lookup(token).is_some()
    }

    /// Centroid of the in-vocabulary tokens of a whitespace-separated phrase.
    pub fn phrase_vector(&self, phrase: &str) -> Option<Vector> {
        let found: Vec<&[f64]> = tokenize(phrase).filter_map(|t| self.lookup(t)).collect();
        if found.is_empty() {
            return None;
        }
        centroid(found).ok()
    }

    /// Entries in load order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.tokens
            .iter()
            .zip(self.data.chunks_exact(self.dim))
            .map(|(t, v)| (t.as_str(), v))
    }

    /// Returns a copy with every vector multiplied by `factor(token)`.
    pub fn scaled_by(&self, mut factor: impl FnMut(&str) -> f64) -> Result<Self> {
        let entries: Vec<(String, Vec<f64>)> = self
            .iter()
            .map(|(t, v)| {
                let f = factor(t);
                (t.to_owned(), v.iter().map(|x| x * f).collect())
            })
            .collect();
        Self::from_entries(self.name.clone(), entries)
    }
}

fn model_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

struct Builder {
    dim: usize,
    index: HashMap<String, usize>,
    tokens: Vec<String>,
    data: Vec<f64>,
    duplicates: usize,
}

impl Builder {
    fn new(dim: usize) -> Self {
        Builder {
            dim,
            index: HashMap::new(),
            tokens: Vec::new(),
            data: Vec::new(),
            duplicates: 0,
        }
    }

    fn push(&mut self, token: String, values: &[f64]) -> std::result::Result<(), String> {
        if token.is_empty() {
            return Err("empty token".into());
        }
        if values.len() != self.dim {
            return Err(format!(
                "expected {} values, found {}",
                self.dim,
                values.len()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(format!("non-finite value for token {token:?}"));
        }
        if self.index.contains_key(&token) {
            self.duplicates += 1;
            return Ok(());
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.data.extend_from_slice(values);
        Ok(())
    }

    fn finish(self, name: String) -> Result<EmbeddingModel> {
        if self.dim == 0 {
            return Err(Error::Empty("model has dimension 0"));
        }
        if self.duplicates > 0 {
            log::warn!("{name}: dropped {} duplicate tokens", self.duplicates);
        }
        Ok(EmbeddingModel {
            name,
            dim: self.dim,
            index: self.index,
            tokens: self.tokens,
            data: self.data,
            duplicates: self.duplicates,
        })
    }
}

/// Precomputed per-sense vectors (SIF or document embeddings).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SenseVectors {
    dim: usize,
    vectors: HashMap<String, Vector>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct SenseVectorLine {
    id: String,
    vector: Vector,
}

impl SenseVectors {
    pub fn new(dim: usize) -> Self {
        SenseVectors {
            dim,
            vectors: HashMap::new(),
        }
    }

    /// Inserts or replaces the vector of `id`.
    pub fn insert(&mut self, id: impl Into<String>, v: Vector) -> Result<()> {
        if v.dim() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        self.vectors.insert(id.into(), v);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Vector> {
        self.vectors.get(id)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_jsonl(BufReader::new(file))
    }

    /// Reads `{"id": ..., "vector": [...]}` lines; dimension comes from the first line.
    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut store: Option<SenseVectors> = None;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: SenseVectorLine = serde_json::from_str(&line)
                .map_err(|e| Error::parse(i + 1, format!("invalid vector line: {e}")))?;
            let store = store.get_or_insert_with(|| SenseVectors::new(entry.vector.dim()));
            if store.vectors.contains_key(&entry.id) {
                return Err(Error::parse(i + 1, format!("duplicate id {}", entry.id)));
            }
            store
                .insert(entry.id, entry.vector)
                .map_err(|e| Error::parse(i + 1, e.to_string()))?;
        }
        store.ok_or(Error::Empty("vector store has no entries"))
    }

    /// Writes entries sorted by id.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        let mut ids: Vec<&String> = self.vectors.keys().collect();
        ids.sort();
        for id in ids {
            let line = SenseVectorLine {
                id: id.clone(),
                vector: self.vectors[id].clone(),
            };
            serde_json::to_writer(&mut w, &line).map_err(io::Error::from)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}
