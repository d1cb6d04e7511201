use super::tokens::tokenize;
use crate::kernel::Statement;
use crate::seed::label;

pub const EMBEDDING_DIM: usize = 256;

/// L2-normalized token-count vector, folded by a stable hash of each token.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding(pub [f64; EMBEDDING_DIM]);

impl Embedding {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn cosine(&self, other: &Embedding) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }
}

pub fn token_slot(token: &str) -> usize {
    (label(token) % EMBEDDING_DIM as u64) as usize
}

pub fn embed_text(text: &str) -> Embedding {
    let mut v = [0.0; EMBEDDING_DIM];
    for tok in tokenize(text) {
        v[token_slot(&tok)] += 1.0;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut v {
            *x /= norm;
        }
    }
    Embedding(v)
}

pub fn embed(statement: &Statement) -> Embedding {
    embed_text(&statement.canonical_text())
}

/// Transport cost between a conjecture and a dataset statement.
pub fn cost(x: &Embedding, y: &Embedding) -> f64 {
    -x.cosine(y)
}
