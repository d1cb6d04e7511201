//! Weighted back-off n-gram model over completion tokens.
//!
//! Weights are accumulated in fixed point (`2^-48` units), which makes
//! training exactly additive and independent of example order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::prompt::{PromptRecord, WeightedExample};
use super::tokens::{detokenize, tokenize, FORMATTING_TOKENS};
use crate::kernel::RuleLibrary;

pub const DEFAULT_ORDER: usize = 4;
pub const DEFAULT_SMOOTHING: f64 = 0.1;
pub const DEFAULT_TEMPERATURE: f64 = 1.0;
pub const DEFAULT_MAX_TOKENS: usize = 256;

const SCALE: f64 = (1u64 << 48) as f64;
const UNKNOWN: u32 = u32::MAX;

fn to_units(weight: f64) -> u128 {
    (weight * SCALE).round() as u128
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Row {
    total: u128,
    counts: BTreeMap<u32, u128>,
}

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Serialize, Deserialize)]
struct Header {
    order: usize,
    smoothing: f64,
    vocab: Vec<String>,
}

/// Parameters of a single sampling call.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleParams {
    pub temperature: f64,
    pub max_tokens: usize,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams { temperature: DEFAULT_TEMPERATURE, max_tokens: DEFAULT_MAX_TOKENS }
    }
}

/// A prompt lexed once against a model's vocabulary.
pub struct EncodedPrompt {
    ids: Vec<u32>,
    end: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyModel {
    order: usize,
    smoothing_bits: u64,
    /// Sorted, so ids never depend on training order.
    vocab: Vec<String>,
    index: HashMap<String, u32>,
    tables: HashMap<Vec<u32>, Row>,
}

impl PolicyModel {
    pub fn new(order: usize, smoothing: f64) -> Self {
        assert!(order >= 1, "n-gram order must be at least 1");
        assert!(smoothing > 0.0, "smoothing must be positive");
        let mut model = PolicyModel {
            order,
            smoothing_bits: smoothing.to_bits(),
            vocab: Vec::new(),
            index: HashMap::new(),
            tables: HashMap::new(),
        };
        model.extend_vocab(FORMATTING_TOKENS.iter().map(|s| s.to_string()).collect());
        model
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothing(&self) -> f64 {
        f64::from_bits(self.smoothing_bits)
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Accumulated weight of `token` after `context` (exact context, no back-off).
    pub fn count(&self, context: &[&str], token: &str) -> f64 {
        let Some(key) = context.iter().map(|t| self.index.get(*t).copied()).collect::<Option<Vec<u32>>>() else {
            return 0.0;
        };
        let (Some(row), Some(&tok)) = (self.tables.get(&key), self.index.get(token)) else {
            return 0.0;
        };
        row.counts.get(&tok).map_or(0.0, |&u| u as f64 / SCALE)
    }

    fn extend_vocab(&mut self, new: BTreeSet<String>) {
        let mut words: BTreeSet<String> = self.vocab.iter().cloned().collect();
        let before = words.len();
        words.extend(new);
        if words.len() == before {
            return;
        }
        let vocab: Vec<String> = words.into_iter().collect();
        let index: HashMap<String, u32> = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        let remap: Vec<u32> = self.vocab.iter().map(|w| index[w]).collect();
        self.tables = std::mem::take(&mut self.tables)
            .into_iter()
            .map(|(ctx, row)| {
                let ctx = ctx.iter().map(|&t| remap[t as usize]).collect();
                let counts = row.counts.into_iter().map(|(t, c)| (remap[t as usize], c)).collect();
                (ctx, Row { total: row.total, counts })
            })
            .collect();
        self.vocab = vocab;
        self.index = index;
    }

    /// Adds each example's weight to `count(context -> token)` for every
    /// completion token and the end token. Prompt tokens only condition.
    pub fn train(&mut self, library: &RuleLibrary, examples: &[WeightedExample]) {
        let lexed: Vec<(Vec<String>, Vec<String>, u128)> = examples
            .iter()
            .map(|ex| {
                assert!(ex.weight > 0.0 && ex.weight.is_finite(), "training weights must be positive");
                let mut completion = tokenize(&ex.completion);
                completion.push(ex.prompt.role.end_token().to_string());
                (tokenize(&ex.prompt.render(library)), completion, to_units(ex.weight))
            })
            .collect();
        let new: BTreeSet<String> = lexed
            .iter()
            .flat_map(|(p, c, _)| p.iter().chain(c.iter()))
            .filter(|t| !self.index.contains_key(*t))
            .cloned()
            .collect();
        self.extend_vocab(new);

        for (prompt, completion, units) in lexed {
            if units == 0 {
                continue;
            }
            let mut seq: Vec<u32> = prompt.iter().map(|t| self.index[t]).collect();
            for tok in completion {
                let id = self.index[&tok];
                for len in 0..self.order.min(seq.len() + 1) {
                    let row = self.tables.entry(seq[seq.len() - len..].to_vec()).or_default();
                    row.total += units;
                    *row.counts.entry(id).or_default() += units;
                }
                seq.push(id);
            }
        }
    }

    pub fn trained(order: usize, smoothing: f64, library: &RuleLibrary, examples: &[WeightedExample]) -> Self {
        let mut model = PolicyModel::new(order, smoothing);
        model.train(library, examples);
        model
    }

    pub fn encode(&self, library: &RuleLibrary, prompt: &PromptRecord) -> EncodedPrompt {
        let ids = tokenize(&prompt.render(library))
            .iter()
            .map(|t| self.index.get(t).copied().unwrap_or(UNKNOWN))
            .collect();
        EncodedPrompt { ids, end: self.index[prompt.role.end_token()] }
    }

    /// Smoothed next-token distribution (indexed like [`Self::vocab`]) after
    /// the prompt and the already generated `prefix` tokens.
    pub fn next_distribution(&self, library: &RuleLibrary, prompt: &PromptRecord, prefix: &[&str]) -> Vec<f64> {
        let mut seq = self.encode(library, prompt).ids;
        seq.extend(prefix.iter().map(|t| self.index.get(*t).copied().unwrap_or(UNKNOWN)));
        self.distribution(&seq)
    }

    /// Uses the longest context suffix with observed weight.
    fn distribution(&self, seq: &[u32]) -> Vec<f64> {
        let v = self.vocab.len();
        let alpha = self.smoothing();
        let max_len = (self.order - 1).min(seq.len());
        let row = (0..=max_len).rev().find_map(|len| {
            self.tables.get(&seq[seq.len() - len..]).filter(|r| r.total > 0)
        });
        let mut probs = vec![alpha; v];
        let mut total = alpha * v as f64;
        if let Some(row) = row {
            for (&t, &c) in &row.counts {
                probs[t as usize] += c as f64 / SCALE;
            }
            total += row.total as f64 / SCALE;
        }
        for p in &mut probs {
            *p /= total;
        }
        probs
    }

    fn draw(&self, probs: &[f64], temperature: f64, rng: &mut ChaCha8Rng) -> u32 {
        let scaled: Vec<f64>;
        let weights = if temperature == 1.0 {
            probs
        } else {
            let log_max = probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ln();
            scaled = probs.iter().map(|p| ((p.ln() - log_max) / temperature).exp()).collect();
            &scaled
        };
        let sum: f64 = weights.iter().sum();
        let mut x = rng.random::<f64>() * sum;
        for (i, w) in weights.iter().enumerate() {
            if x < *w {
                return i as u32;
            }
            x -= w;
        }
        (weights.len() - 1) as u32
    }

    pub fn sample_encoded(&self, prompt: &EncodedPrompt, params: SampleParams, seed: u64) -> String {
        assert!(params.temperature > 0.0, "temperature must be positive");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seq = prompt.ids.clone();
        let start = seq.len();
        for _ in 0..params.max_tokens {
            let tok = self.draw(&self.distribution(&seq), params.temperature, &mut rng);
            if tok == prompt.end {
                break;
            }
            seq.push(tok);
        }
        let words: Vec<&str> = seq[start..].iter().map(|&t| self.vocab[t as usize].as_str()).collect();
        detokenize(&words)
    }

    pub fn sample(&self, library: &RuleLibrary, prompt: &PromptRecord, params: SampleParams, seed: u64) -> String {
        self.sample_encoded(&self.encode(library, prompt), params, seed)
    }

    /// Greedy decoding: the argmax token at every step.
    pub fn greedy(&self, library: &RuleLibrary, prompt: &PromptRecord, max_tokens: usize) -> String {
        let prompt = self.encode(library, prompt);
        let mut seq = prompt.ids.clone();
        let start = seq.len();
        for _ in 0..max_tokens {
            let probs = self.distribution(&seq);
            let mut best = 0;
            for (i, p) in probs.iter().enumerate() {
                if *p > probs[best] {
                    best = i;
                }
            }
            if best as u32 == prompt.end {
                break;
            }
            seq.push(best as u32);
        }
        let words: Vec<&str> = seq[start..].iter().map(|&t| self.vocab[t as usize].as_str()).collect();
        detokenize(&words)
    }

    pub fn write_snapshot<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header = Header { order: self.order, smoothing: self.smoothing(), vocab: self.vocab.clone() };
        writeln!(out, "{}", serde_json::to_string(&header)?)?;
        let mut rows: Vec<(&Vec<u32>, &Row)> = self.tables.iter().collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        for (ctx, row) in rows {
            let ctx: Vec<&str> = ctx.iter().map(|&t| self.vocab[t as usize].as_str()).collect();
            for (&tok, &units) in &row.counts {
                let line = serde_json::to_string(&(&ctx, &self.vocab[tok as usize], units))?;
                writeln!(out, "{line}")?;
            }
        }
        Ok(())
    }

    pub fn read_snapshot<R: BufRead>(input: R) -> Result<Self, SnapshotError> {
        let mut lines = input.lines();
        let bad = |line: usize, message: String| SnapshotError::Format { line, message };
        let header = lines.next().ok_or_else(|| bad(1, "empty snapshot".into()))??;
        let header: Header = serde_json::from_str(&header).map_err(|e| bad(1, e.to_string()))?;
        if header.order == 0 || header.smoothing.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(bad(1, "order and smoothing must be positive".into()));
        }
        let mut model = PolicyModel::new(header.order, header.smoothing);
        model.extend_vocab(header.vocab.into_iter().collect());
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            let (ctx, tok, units): (Vec<String>, String, u128) =
                serde_json::from_str(&line).map_err(|e| bad(line_no, e.to_string()))?;
            let lookup = |w: &str| model.index.get(w).copied().ok_or_else(|| bad(line_no, format!("token {w:?} not in vocabulary")));
            let ctx: Vec<u32> = ctx.iter().map(|w| lookup(w)).collect::<Result<_, _>>()?;
            let tok = lookup(&tok)?;
            if ctx.len() >= model.order {
                return Err(bad(line_no, "context longer than order - 1".into()));
            }
            let row = model.tables.entry(ctx).or_default();
            row.total += units;
            *row.counts.entry(tok).or_default() += units;
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        let mut buf = Vec::new();
        self.write_snapshot(&mut buf)?;
        fs::write(path, buf)
    }

    pub fn load(path: &Path) -> Result<Self, SnapshotError> {
        Self::read_snapshot(io::BufReader::new(fs::File::open(path)?))
    }

    pub fn snapshot_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_snapshot(&mut buf).expect("writing to memory");
        buf
    }
}

impl Default for PolicyModel {
    fn default() -> Self {
        PolicyModel::new(DEFAULT_ORDER, DEFAULT_SMOOTHING)
    }
}
