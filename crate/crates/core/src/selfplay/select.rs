use std::collections::{BTreeMap, HashSet};

use rand::seq::index;
use rand::Rng;

use crate::kernel::{Kernel, Proof, Statement, TRIVIAL_RULE};
use crate::policy::PromptRecord;

/// Conjecturer prompts from proved `(statement, proof)` pairs.
///
/// Every used lemma of every pair (plus `trivial` with probability
/// `trivial_lemma_prob`) yields a candidate; each lemma keeps at most
/// `max(1, ⌊lemma_cap_frac · n⌋)` candidates, then `(statement, lemma)`
/// duplicates collapse to their first occurrence.
pub fn select_conjecturer_inputs<R: Rng>(
    proved_pairs: &[(Statement, Proof)],
    trivial_lemma_prob: f64,
    lemma_cap_frac: f64,
    rng: &mut R,
) -> Vec<PromptRecord> {
    let mut candidates: Vec<(usize, String)> = Vec::new();
    for (i, (_, proof)) in proved_pairs.iter().enumerate() {
        let mut lemmas: Vec<String> = proof.rule_names().into_iter().collect();
        if rng.random_bool(trivial_lemma_prob) && !lemmas.iter().any(|l| l == TRIVIAL_RULE) {
            lemmas.push(TRIVIAL_RULE.to_string());
        }
        candidates.extend(lemmas.into_iter().map(|l| (i, l)));
    }
    let n = candidates.len();
    let cap = ((lemma_cap_frac * n as f64).floor() as usize).max(1);

    let mut by_lemma: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (c, (_, lemma)) in candidates.iter().enumerate() {
        by_lemma.entry(lemma.as_str()).or_default().push(c);
    }
    let mut keep = vec![false; n];
    for members in by_lemma.values() {
        if members.len() > cap {
            for k in index::sample(rng, members.len(), cap) {
                keep[members[k]] = true;
            }
        } else {
            for &c in members {
                keep[c] = true;
            }
        }
    }

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (c, (i, lemma)) in candidates.into_iter().enumerate() {
        let (statement, proof) = &proved_pairs[i];
        if keep[c] && seen.insert((statement.canonical_text(), lemma.clone())) {
            out.push(PromptRecord::conjecturer(lemma, statement.clone(), proof.clone()));
        }
    }
    out
}

/// Uniform subset of size `min(len, unproved_count)`, in input order.
pub fn cap_conjectures<T, R: Rng>(conjectures: Vec<T>, unproved_count: usize, rng: &mut R) -> Vec<T> {
    if conjectures.len() <= unproved_count {
        return conjectures;
    }
    let mut picked = index::sample(rng, conjectures.len(), unproved_count).into_vec();
    picked.sort_unstable();
    let mut picked = picked.into_iter().peekable();
    conjectures
        .into_iter()
        .enumerate()
        .filter_map(|(i, c)| {
            if picked.peek() == Some(&i) {
                picked.next();
                Some(c)
            } else {
                None
            }
        })
        .collect()
}

/// Accepts a conjecture unless it restates the seed or closes with a lone
/// `refl`/`eval`.
pub fn triviality_filter(kernel: &Kernel, conjecture: &Statement, seed_statement: &Statement) -> bool {
    conjecture != seed_statement && !kernel.closes_directly(conjecture)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn pair(s: &str, p: &str) -> (Statement, Proof) {
        let k = Kernel::standard();
        (k.parse_statement(s).unwrap(), k.parse_proof(p).unwrap())
    }

    #[test]
    fn lemma_cap_example() {
        let pairs = vec![
            pair("(a + b) = (b + a)", "rw add_comm at L []; refl"),
            pair("(c + d) = (d + c)", "rw add_comm at L []; refl"),
            pair("((a + b) * 1) = (b + a)", "rw mul_one at L []; rw add_comm at L []; refl"),
        ];
        let out = select_conjecturer_inputs(&pairs, 0.0, 0.1, &mut seed::rng(0, &[]));
        let lemmas: Vec<&str> = out.iter().map(|p| p.lemma.as_deref().unwrap()).collect();
        assert_eq!(lemmas.iter().filter(|l| **l == "add_comm").count(), 1);
        assert_eq!(lemmas.iter().filter(|l| **l == "mul_one").count(), 1);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn trivial_lemma_and_dedup() {
        let single = vec![pair("(a + 0) = a", "rw add_zero at L []; refl")];
        let out = select_conjecturer_inputs(&single, 1.0, 1.0, &mut seed::rng(0, &[]));
        assert!(out.iter().any(|p| p.lemma.as_deref() == Some(TRIVIAL_RULE)));

        let twice = vec![
            pair("(a + 0) = a", "rw add_zero at L []; refl"),
            pair("(a + 0) = a", "rw add_comm at L []; rw zero_add at L []; refl"),
        ];
        let out = select_conjecturer_inputs(&twice, 0.0, 1.0, &mut seed::rng(0, &[]));
        let add_zero = out.iter().filter(|p| p.lemma.as_deref() == Some("add_zero")).count();
        assert_eq!(add_zero, 1);
        assert!(select_conjecturer_inputs(&[], 0.5, 0.1, &mut seed::rng(0, &[])).is_empty());
    }

    #[test]
    fn cap_examples() {
        let items: Vec<u32> = (0..10).collect();
        let kept = cap_conjectures(items.clone(), 4, &mut seed::rng(3, &[]));
        assert_eq!(kept.len(), 4);
        assert!(kept.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(kept, cap_conjectures(items, 4, &mut seed::rng(3, &[])));
        assert_eq!(cap_conjectures(vec![1, 2, 3], 100, &mut seed::rng(3, &[])), vec![1, 2, 3]);
        assert!(cap_conjectures(vec![1, 2, 3], 0, &mut seed::rng(3, &[])).is_empty());
    }

    #[test]
    fn triviality() {
        let k = Kernel::standard();
        let s = |t: &str| k.parse_statement(t).unwrap();
        assert!(!triviality_filter(k, &s("(a + 0) = a"), &s("(a + 0) = a")));
        assert!(!triviality_filter(k, &s("a = a"), &s("(b + 0) = b")));
        assert!(!triviality_filter(k, &s("(2 * 3) = 6"), &s("(b + 0) = b")));
        assert!(triviality_filter(k, &s("(a + 0) = a"), &s("(b + 0) = b")));
    }
}
