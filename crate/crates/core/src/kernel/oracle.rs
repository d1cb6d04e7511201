//! Exhaustive breadth-first proof search, used as a test oracle.
//!
//! Rewrites on the two sides of a goal commute, so a proof with `n` rewrite
//! steps can always be split into `i` steps on `L` followed by `n - i` steps
//! on `R`. The search therefore runs one breadth-first expansion per side,
//! to depths `ceil(d/2)` and `floor(d/2)`, and looks for the cheapest meeting
//! point. This visits exactly the proofs a search over goal pairs would, at
//! square-root cost.
//!
//! Tie-breaking is deterministic: moves are generated in (rule name, path,
//! direction) order per side, fewer total steps win, then more `L` steps,
//! then `refl` before `eval`, then discovery order.

use std::collections::HashMap;

use super::proof::{Direction, Proof, ProofStep, Side};
use super::rewrite::apply_rule;
use super::rules::TRIVIAL_RULE;
use super::term::{Statement, Term};
use super::Kernel;

pub const MAX_ORACLE_DEPTH: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("oracle depth {0} exceeds the maximum of {MAX_ORACLE_DEPTH}")]
pub struct OracleDepthError(pub usize);

struct Node {
    term: Term,
    parent: Option<(usize, String, Vec<u8>, Direction)>,
}

struct Expansion {
    nodes: Vec<Node>,
    /// Node indices grouped by distance from the root, in discovery order.
    levels: Vec<Vec<usize>>,
    dist: HashMap<Term, (usize, usize)>,
}

impl Expansion {
    fn steps_to(&self, mut idx: usize, side: Side) -> Vec<ProofStep> {
        let mut steps = Vec::new();
        while let Some((parent, rule, path, direction)) = &self.nodes[idx].parent {
            steps.push(ProofStep::Rw { direction: *direction, rule: rule.clone(), side, path: path.clone() });
            idx = *parent;
        }
        steps.reverse();
        steps
    }

    /// First-discovered ground term for each value, at its minimal distance.
    fn values(&self) -> HashMap<u64, (usize, usize)> {
        let mut out = HashMap::new();
        for (d, level) in self.levels.iter().enumerate() {
            for &i in level {
                if let Some(v) = self.nodes[i].term.eval() {
                    out.entry(v).or_insert((d, i));
                }
            }
        }
        out
    }
}

impl Kernel {
    /// Every term reachable by one rewrite, in (rule name, path, direction) order.
    pub fn neighbors(&self, term: &Term) -> Vec<(String, Vec<u8>, Direction, Term)> {
        let mut out = Vec::new();
        let paths = term.paths();
        for rule in self.library.iter().filter(|r| r.name != TRIVIAL_RULE) {
            for path in &paths {
                for direction in [Direction::Forward, Direction::Backward] {
                    if let Ok(next) = apply_rule(term, rule, path, direction) {
                        if next.depth() <= self.limits.max_term_depth && next.max_literal() <= self.limits.max_literal {
                            out.push((rule.name.clone(), path.clone(), direction, next));
                        }
                    }
                }
            }
        }
        out
    }

    fn expand(&self, root: &Term, depth: usize) -> Expansion {
        let mut exp = Expansion {
            nodes: vec![Node { term: root.clone(), parent: None }],
            levels: vec![vec![0]],
            dist: HashMap::from([(root.clone(), (0, 0))]),
        };
        for d in 0..depth {
            let mut next_level = Vec::new();
            for &idx in &exp.levels[d] {
                let term = exp.nodes[idx].term.clone();
                for (rule, path, direction, next) in self.neighbors(&term) {
                    if exp.dist.contains_key(&next) {
                        continue;
                    }
                    let id = exp.nodes.len();
                    exp.dist.insert(next.clone(), (d + 1, id));
                    exp.nodes.push(Node { term: next, parent: Some((idx, rule, path, direction)) });
                    next_level.push(id);
                }
            }
            exp.levels.push(next_level);
        }
        exp
    }

    /// Shortest proof with at most `max_depth` rewrite steps, if one exists.
    pub fn brute_force_prove(&self, statement: &Statement, max_depth: usize) -> Result<Option<Proof>, OracleDepthError> {
        if max_depth > MAX_ORACLE_DEPTH {
            return Err(OracleDepthError(max_depth));
        }
        let left_depth = max_depth.div_ceil(2);
        let right_depth = max_depth / 2;
        let left = self.expand(&statement.lhs, left_depth);
        let right = self.expand(&statement.rhs, right_depth);
        let right_values = right.values();

        let finish = |li: usize, ri: usize, close: ProofStep| {
            let mut steps = left.steps_to(li, Side::L);
            steps.extend(right.steps_to(ri, Side::R));
            steps.push(close);
            Proof::new(steps).expect("oracle proofs end in a terminal step")
        };

        for total in 0..=max_depth {
            for on_left in (0..=total.min(left_depth)).rev() {
                let on_right = total - on_left;
                if on_right > right_depth {
                    continue;
                }
                for &li in &left.levels[on_left] {
                    if let Some(&(d, ri)) = right.dist.get(&left.nodes[li].term) {
                        if d <= on_right {
                            return Ok(Some(finish(li, ri, ProofStep::Refl)));
                        }
                    }
                }
            }
            for on_left in (0..=total.min(left_depth)).rev() {
                let on_right = total - on_left;
                if on_right > right_depth {
                    continue;
                }
                for &li in &left.levels[on_left] {
                    if let Some(v) = left.nodes[li].term.eval() {
                        if let Some(&(d, ri)) = right_values.get(&v) {
                            if d <= on_right {
                                return Ok(Some(finish(li, ri, ProofStep::Eval)));
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    }
}
