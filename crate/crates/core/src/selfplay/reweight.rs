//! Capped greedy Wasserstein re-weighting of conjectures toward the
//! unproved statements.
//!
//! Each statement `y` (ascending canonical text) sends `k_y` units of mass
//! `1/m` to its `k_y` nearest unmasked conjectures under `d = -cos`. A
//! conjecture whose `P(x) · n` exceeds the cap is excluded from later
//! selections. With an infinite cap this is the closed-form optimum: every
//! statement's mass sits on its argmin.

use crate::policy::{cost, Embedding};

#[derive(Clone, Debug)]
pub struct ReweightProblem<'a> {
    pub conjectures: Vec<&'a Embedding>,
    /// `(embedding, matching weight k_y)`, already in processing order.
    pub statements: Vec<(&'a Embedding, u32)>,
    pub cap: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("statement {statement} needs {needed} matches but only {available} conjectures are unmasked")]
pub struct InfeasibleError {
    pub statement: usize,
    pub needed: usize,
    pub available: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reweighting {
    /// `w_i = P(x_i) · n`.
    pub weights: Vec<f64>,
    /// Selections per conjecture; `P(x_i) = selections_i / m`.
    pub selections: Vec<u64>,
    /// `(statement index, conjecture index)` in selection order.
    pub trace: Vec<(usize, usize)>,
    /// Index into `trace` at which each conjecture was masked, if it was.
    pub masked_at: Vec<Option<usize>>,
}

pub fn wasserstein_reweight(problem: &ReweightProblem) -> Result<Reweighting, InfeasibleError> {
    let n = problem.conjectures.len();
    let m = problem.statements.len();
    let mut selections = vec![0u64; n];
    let mut masked_at = vec![None; n];
    let mut trace = Vec::new();
    if n == 0 || m == 0 {
        return Ok(Reweighting { weights: vec![0.0; n], selections, trace, masked_at });
    }
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
    for (j, (y, k)) in problem.statements.iter().enumerate() {
        order.clear();
        order.extend((0..n).filter(|&i| masked_at[i].is_none()).map(|i| (cost(problem.conjectures[i], y), i)));
        let k = *k as usize;
        if order.len() < k {
            return Err(InfeasibleError { statement: j, needed: k, available: order.len() });
        }
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, i) in &order[..k] {
            selections[i] += 1;
            trace.push((j, i));
            if (selections[i] as f64) * (n as f64) > problem.cap * m as f64 {
                masked_at[i].get_or_insert(trace.len());
            }
        }
    }
    let weights = selections.iter().map(|&s| s as f64 * n as f64 / m as f64).collect();
    Ok(Reweighting { weights, selections, trace, masked_at })
}
