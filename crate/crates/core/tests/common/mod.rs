//! Brute-force reference implementation used by the integration tests.
//!
//! Everything here is written from the formulas directly: fixtures are parsed
//! by hand, relatedness uses the literal `arccos`, and the three scoring steps
//! are spelled out loop by loop. Nothing calls into the library's scoring code.
#![allow(dead_code, clippy::needless_range_loop, clippy::manual_clamp)]

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use std::path::PathBuf;

use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

/// Stopwords used by every oracle comparison (passed to the library too).
pub const STOPWORDS: &[&str] = &["a", "an", "and", "in", "is", "of", "on", "the", "we"];

pub fn norm(s: &str) -> String {
    s.trim().to_lowercase()
}

// ---------------------------------------------------------------- vectors

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// `1 - arccos(cos)/π`, `None` for a zero vector.
pub fn angular(a: &[f64], b: &[f64]) -> Option<f64> {
    let na = dot(a, a);
    let nb = dot(b, b);
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let mut c = dot(a, b) / (na * nb).sqrt();
    if c > 1.0 {
        c = 1.0;
    }
    if c < -1.0 {
        c = -1.0;
    }
    Some(1.0 - c.acos() / PI)
}

pub fn mean_vec(vs: &[Vec<f64>]) -> Option<Vec<f64>> {
    if vs.is_empty() {
        return None;
    }
    let mut out = vec![0.0; vs[0].len()];
    for v in vs {
        for i in 0..out.len() {
            out[i] += v[i];
        }
    }
    for x in &mut out {
        *x /= vs.len() as f64;
    }
    Some(out)
}

fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

// ---------------------------------------------------------------- model

pub struct OracleModel {
    pub vectors: HashMap<String, Vec<f64>>,
}

impl OracleModel {
    pub fn parse(text: &str) -> Self {
        let mut vectors = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if i == 0 && fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok()) {
                continue;
            }
            let v: Vec<f64> = fields[1..].iter().map(|x| x.parse().unwrap()).collect();
            vectors.entry(fields[0].to_string()).or_insert(v);
        }
        OracleModel { vectors }
    }

    pub fn word(&self, w: &str) -> Option<Vec<f64>> {
        self.vectors
            .get(&w.to_lowercase())
            .or_else(|| self.vectors.get(w))
            .cloned()
    }

    /// Mean of the known tokens of a phrase.
    pub fn phrase(&self, p: &str) -> Option<Vec<f64>> {
        let vs: Vec<Vec<f64>> = p.split_whitespace().filter_map(|t| self.word(t)).collect();
        mean_vec(&vs)
    }

    pub fn rel_words(&self, a: &str, b: &str) -> Option<f64> {
        angular(&self.phrase(a)?, &self.phrase(b)?)
    }
}

// ---------------------------------------------------------------- lexicon

#[derive(Clone, Debug)]
pub enum Oc {
    Ref(String),
    Label(String),
}

#[derive(Clone, Debug)]
pub struct OracleSense {
    pub id: String,
    pub lemmas: Vec<String>,
    pub synonyms: Vec<String>,
    pub oc: Vec<Oc>,
    pub description: Vec<String>,
    pub frequency: f64,
}

pub struct OracleLexicon {
    pub senses: Vec<OracleSense>,
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_string())
        .collect()
}

impl OracleLexicon {
    pub fn parse(text: &str) -> Self {
        let mut senses = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let v: Value = serde_json::from_str(line).unwrap();
            let oc = v["core_context"]
                .as_array()
                .unwrap()
                .iter()
                .map(|e| match (e.get("ref"), e.get("label")) {
                    (Some(r), _) => Oc::Ref(r.as_str().unwrap().to_string()),
                    (_, Some(l)) => Oc::Label(l.as_str().unwrap().to_string()),
                    _ => panic!("bad context entry"),
                })
                .collect();
            senses.push(OracleSense {
                id: v["id"].as_str().unwrap().to_string(),
                lemmas: strings(&v["lemmas"]),
                synonyms: strings(&v["synonyms"]),
                oc,
                description: strings(&v["description_terms"]),
                frequency: v.get("frequency").and_then(Value::as_f64).unwrap_or(0.0),
            });
        }
        OracleLexicon { senses }
    }

    pub fn get(&self, id: &str) -> &OracleSense {
        self.senses.iter().find(|s| s.id == id).unwrap()
    }

    pub fn senses_of(&self, keyword: &str) -> Vec<&OracleSense> {
        let k = norm(keyword);
        self.senses
            .iter()
            .filter(|s| s.lemmas.iter().any(|l| norm(l) == k))
            .collect()
    }

    /// Each ontological-context member as a list of synonym labels.
    pub fn oc_members(&self, s: &OracleSense) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for e in &s.oc {
            match e {
                Oc::Ref(r) => {
                    if let Some(t) = self.senses.iter().find(|t| &t.id == r) {
                        out.push(t.synonyms.clone());
                    }
                }
                Oc::Label(l) => out.push(vec![l.clone()]),
            }
        }
        out
    }
}

// ---------------------------------------------------------------- relatedness

/// Mean word relatedness over the cross product of two synonym lists,
/// skipping pairs the model cannot represent.
pub fn rel0(m: &OracleModel, xs: &[String], ys: &[String]) -> Option<f64> {
    let mut vals = Vec::new();
    for x in xs {
        for y in ys {
            if let Some(r) = m.rel_words(x, y) {
                vals.push(r);
            }
        }
    }
    mean(&vals)
}

pub fn combine(w0: f64, r0: Option<f64>, r1: Option<f64>) -> Option<f64> {
    match (r0, r1) {
        (Some(a), Some(b)) => Some(w0 * a + (1.0 - w0) * b),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    }
}

pub fn rel_senses(
    m: &OracleModel,
    lex: &OracleLexicon,
    a: &OracleSense,
    b: &OracleSense,
    w0: f64,
) -> Option<f64> {
    let r0 = rel0(m, &a.synonyms, &b.synonyms);
    let mut lvl1 = Vec::new();
    for x in lex.oc_members(a) {
        for y in lex.oc_members(b) {
            if let Some(r) = rel0(m, &x, &y) {
                lvl1.push(r);
            }
        }
    }
    combine(w0, r0, mean(&lvl1))
}

pub fn rel_sense_word(
    m: &OracleModel,
    lex: &OracleLexicon,
    t: &OracleSense,
    w: &str,
    w0: f64,
) -> Option<f64> {
    m.phrase(w)?;
    let word = vec![w.to_string()];
    let r0 = rel0(m, &t.synonyms, &word);
    let mut lvl1 = Vec::new();
    for x in lex.oc_members(t) {
        if let Some(r) = rel0(m, &x, &word) {
            lvl1.push(r);
        }
    }
    combine(w0, r0, mean(&lvl1))
}

// ---------------------------------------------------------------- SIF

/// Top eigenvector of a symmetric matrix by cyclic Jacobi rotations.
fn top_eigenvector(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[i][j] * a[i][j];
                }
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let best = (0..n).max_by(|&i, &j| a[i][i].total_cmp(&a[j][j])).unwrap();
    (0..n).map(|k| v[k][best]).collect()
}

/// SIF vectors with uniform word frequencies: plain token means, then the
/// first principal component of the centered rows removed.
pub fn sif_vectors(m: &OracleModel, lex: &OracleLexicon) -> HashMap<String, Vec<f64>> {
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for s in &lex.senses {
        let toks: Vec<Vec<f64>> = s
            .description
            .iter()
            .flat_map(|d| d.split_whitespace())
            .filter_map(|t| m.word(t))
            .collect();
        if let Some(v) = mean_vec(&toks) {
            ids.push(s.id.clone());
            rows.push(v);
        }
    }
    let d = rows[0].len();
    let mu = mean_vec(&rows).unwrap();
    let mut cov = vec![vec![0.0; d]; d];
    for r in &rows {
        for i in 0..d {
            for j in 0..d {
                cov[i][j] += (r[i] - mu[i]) * (r[j] - mu[j]);
            }
        }
    }
    let u = top_eigenvector(cov);
    let un = dot(&u, &u).sqrt();
    let u: Vec<f64> = u.iter().map(|x| x / un).collect();
    ids.into_iter()
        .zip(rows)
        .map(|(id, r)| {
            let p = dot(&r, &u);
            (id, r.iter().zip(&u).map(|(x, y)| x - p * y).collect())
        })
        .collect()
}

pub fn parse_docvecs(text: &str) -> HashMap<String, Vec<f64>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            let vec = v["vector"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect();
            (v["id"].as_str().unwrap().to_string(), vec)
        })
        .collect()
}

// ---------------------------------------------------------------- algorithm

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strat {
    Overlap,
    Average,
    Sif,
    TopK,
    DocVec,
}

pub struct OracleParams {
    pub w0: f64,
    pub threshold: f64,
    pub max_context: usize,
    pub pf: f64,
    pub a: f64,
    pub b: f64,
    pub k: usize,
    pub strat: Strat,
}

impl OracleParams {
    pub fn defaults(strat: Strat) -> Self {
        OracleParams {
            w0: 0.5,
            threshold: 0.5,
            max_context: 4,
            pf: 0.75,
            a: 0.5,
            b: 0.5,
            k: 15,
            strat,
        }
    }
}

pub fn active_context(m: &OracleModel, words: &[&str], kd: &str, p: &OracleParams) -> Vec<String> {
    let target = norm(kd);
    let kv = match m.phrase(kd) {
        Some(v) => v,
        None => return vec![],
    };
    let mut seen: Vec<String> = Vec::new();
    let mut scored: Vec<(String, f64)> = Vec::new();
    for w in words {
        let w = norm(w);
        if w.is_empty() || w == target || STOPWORDS.contains(&w.as_str()) || seen.contains(&w) {
            continue;
        }
        seen.push(w.clone());
        if let Some(v) = m.phrase(&w) {
            if let Some(r) = angular(&v, &kv) {
                if r >= p.threshold {
                    scored.push((w, r));
                }
            }
        }
    }
    // insertion sort: stable, descending
    for i in 1..scored.len() {
        let mut j = i;
        while j > 0 && scored[j - 1].1 < scored[j].1 {
            scored.swap(j - 1, j);
            j -= 1;
        }
    }
    scored.truncate(p.max_context);
    scored.into_iter().map(|(w, _)| w).collect()
}

fn overlap(ca: &[String], description: &[String]) -> f64 {
    let c: HashSet<String> = ca.iter().map(|w| norm(w)).collect();
    let d: HashSet<String> = description
        .iter()
        .map(|w| norm(w))
        .filter(|w| !w.is_empty() && !STOPWORDS.contains(&w.as_str()))
        .collect();
    let denom = c.len().min(d.len());
    if denom == 0 {
        return 0.0;
    }
    c.iter().filter(|w| d.contains(*w)).count() as f64 / denom as f64
}

pub struct OracleRun {
    pub context: Vec<String>,
    /// (sense id, step-1 score, after step 2, after step 3), in lexicon order.
    pub steps: Vec<(String, f64, f64, f64)>,
    /// (sense id, final score), best first.
    pub ranking: Vec<(String, f64)>,
}

pub fn disambiguate(
    m: &OracleModel,
    lex: &OracleLexicon,
    kd: &str,
    words: &[&str],
    p: &OracleParams,
    store: Option<&HashMap<String, Vec<f64>>>,
) -> OracleRun {
    let senses = lex.senses_of(kd);
    let ca = active_context(m, words, kd, p);

    // Step 1
    let mut score = Vec::new();
    for s in &senses {
        let mut vals = Vec::new();
        for w in &ca {
            if let Some(r) = rel_sense_word(m, lex, s, w, p.w0) {
                vals.push(r);
            }
        }
        score.push(mean(&vals).unwrap_or(0.0));
    }
    let step1 = score.clone();

    // Step 2
    let mut max = 0.0f64;
    for &x in &score {
        max = max.max(x);
    }
    let ca_vecs: Vec<Vec<f64>> = ca.iter().filter_map(|w| m.phrase(w)).collect();
    let ctx_centroid = if ca_vecs.is_empty() {
        m.phrase(kd)
    } else {
        mean_vec(&ca_vecs)
    };
    for (i, s) in senses.iter().enumerate() {
        let desc: Vec<Vec<f64>> = s.description.iter().filter_map(|d| m.phrase(d)).collect();
        let strength = match p.strat {
            Strat::Overlap => Some(overlap(&ca, &s.description)),
            Strat::Average => {
                let mut vals = Vec::new();
                for c in &ca_vecs {
                    for d in &desc {
                        if let Some(r) = angular(c, d) {
                            vals.push(r);
                        }
                    }
                }
                mean(&vals)
            }
            Strat::Sif | Strat::DocVec => match (store.and_then(|st| st.get(&s.id)), &ctx_centroid)
            {
                (Some(t), Some(c)) => angular(c, t),
                _ => None,
            },
            Strat::TopK => {
                let mut q = ca_vecs.clone();
                if let Some(k) = m.phrase(kd) {
                    q.push(k);
                }
                match (mean_vec(&q), &ctx_centroid) {
                    (Some(query), Some(c)) if !desc.is_empty() => {
                        let mut ranked: Vec<(f64, Vec<f64>)> = desc
                            .iter()
                            .map(|d| (angular(&query, d).unwrap_or(f64::NEG_INFINITY), d.clone()))
                            .collect();
                        for a in 1..ranked.len() {
                            let mut j = a;
                            while j > 0 && ranked[j - 1].0 < ranked[j].0 {
                                ranked.swap(j - 1, j);
                                j -= 1;
                            }
                        }
                        let top: Vec<Vec<f64>> =
                            ranked.into_iter().take(p.k).map(|(_, v)| v).collect();
                        angular(c, &mean_vec(&top).unwrap())
                    }
                    _ => None,
                }
            }
        };
        if let Some(x) = strength {
            // newScore = score + (1 - maxScore) * strength
            score[i] = (score[i] + (1.0 - max) * x).min(1.0);
        }
    }
    let step2 = score.clone();

    // Step 3
    let total: f64 = senses.iter().map(|s| s.frequency).sum();
    if total > 0.0 {
        let mut max = 0.0f64;
        for &x in &score {
            max = max.max(x);
        }
        for (i, s) in senses.iter().enumerate() {
            if score[i] > p.pf * max {
                let norm_freq = (p.a * s.frequency / total + p.b).sqrt();
                score[i] = (score[i] + (1.0 - max) * norm_freq).min(1.0);
            }
        }
    }

    let steps = senses
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.clone(), step1[i], step2[i], score[i]))
        .collect();
    let mut ranking: Vec<(String, f64)> = senses
        .iter()
        .zip(&score)
        .map(|(s, &x)| (s.id.clone(), x))
        .collect();
    for a in 1..ranking.len() {
        let mut j = a;
        while j > 0 && ranking[j - 1].1 < ranking[j].1 {
            ranking.swap(j - 1, j);
            j -= 1;
        }
    }
    OracleRun {
        context: ca,
        steps,
        ranking,
    }
}
