use std::collections::HashSet;

use proptest::prelude::*;
use stp_core::corpus::generate_theorems;
use stp_core::kernel::{Op, RuleLibrary};
use stp_core::policy::{detokenize, embed, tokenize, Embedding, PolicyModel, PromptRecord, Role, WeightedExample, EMBEDDING_DIM};
use stp_core::selfplay::{compute_pass_rates, wasserstein_reweight, ReplayBuffer, ReweightProblem};
use stp_core::{Kernel, Statement, Term};

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![prop::char::range('a', 'e').prop_map(Term::Var), (0u64..20).prop_map(Term::Lit)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        (prop_oneof![Just(Op::Add), Just(Op::Mul)], inner.clone(), inner).prop_map(|(op, l, r)| Term::node(op, l, r))
    })
}

fn statement() -> impl Strategy<Value = Statement> {
    (term(), term()).prop_map(|(l, r)| Statement::new(l, r))
}

const WORDS: [&str; 10] = ["rw", "<-", "add_comm", "mul_comm", "at", "L", "R", "[0]", ";", "refl"];

fn example() -> impl Strategy<Value = WeightedExample> {
    (0usize..3, prop::collection::vec(prop::sample::select(&WORDS[..]), 1..8), prop::sample::select(&[0.25, 0.5, 1.0, 2.0, 3.0][..]))
        .prop_map(|(p, words, weight)| {
            let target = Kernel::standard().parse_statement(&format!("(a + {p}) = ({p} + a)")).unwrap();
            WeightedExample { prompt: PromptRecord::prover(target), completion: words.join(" "), weight }
        })
}

fn unit_vector() -> impl Strategy<Value = Embedding> {
    prop::collection::vec(-1.0f64..1.0, 4).prop_filter_map("non-zero", |v| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (n > 1e-6).then(|| {
            let mut e = [0.0; EMBEDDING_DIM];
            for (i, x) in v.iter().enumerate() {
                e[i] = x / n;
            }
            Embedding(e)
        })
    })
}

fn lib() -> &'static RuleLibrary {
    RuleLibrary::standard()
}

#[test]
fn tokenize_round_trips_generated_statements() {
    let kernel = Kernel::standard();
    let theorems = generate_theorems(kernel, 11, 1000, (1, 5), &HashSet::new()).unwrap();
    for (s, p) in theorems {
        for text in [s.canonical_text(), p.canonical_text()] {
            assert_eq!(detokenize(&tokenize(&text)), text);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn tokenize_round_trips_random_statements(s in statement()) {
        let text = s.canonical_text();
        prop_assert_eq!(detokenize(&tokenize(&text)), text);
    }

    #[test]
    fn embedding_norm_is_zero_or_one(s in statement()) {
        let n = embed(&s).norm();
        prop_assert!((n - 1.0).abs() < 1e-9 || n == 0.0);
    }

    #[test]
    fn training_is_additive_and_order_free(a in prop::collection::vec(example(), 0..6), b in prop::collection::vec(example(), 0..6)) {
        let mut stepwise = PolicyModel::new(4, 0.1);
        stepwise.train(lib(), &a);
        stepwise.train(lib(), &b);
        let joined: Vec<WeightedExample> = a.iter().chain(&b).cloned().collect();
        let reversed: Vec<WeightedExample> = joined.iter().rev().cloned().collect();
        let at_once = PolicyModel::trained(4, 0.1, lib(), &joined);
        prop_assert_eq!(stepwise.snapshot_bytes(), at_once.snapshot_bytes());
        prop_assert_eq!(PolicyModel::trained(4, 0.1, lib(), &reversed).snapshot_bytes(), at_once.snapshot_bytes());
    }

    #[test]
    fn distributions_are_normalized(a in prop::collection::vec(example(), 1..6), prefix in prop::collection::vec(prop::sample::select(&WORDS[..]), 0..5)) {
        let model = PolicyModel::trained(4, 0.1, lib(), &a);
        let dist = model.next_distribution(lib(), &a[0].prompt, &prefix);
        prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(dist.iter().all(|p| *p > 0.0));
    }

    #[test]
    fn greedy_takes_the_argmax(a in prop::collection::vec(example(), 1..6)) {
        let model = PolicyModel::trained(4, 0.1, lib(), &a);
        let prompt = &a[0].prompt;
        let out = tokenize(&model.greedy(lib(), prompt, 12));
        let argmax = |prefix: &[String]| {
            let refs: Vec<&str> = prefix.iter().map(String::as_str).collect();
            let d = model.next_distribution(lib(), prompt, &refs);
            let best = d.iter().enumerate().fold(0, |b, (i, p)| if *p > d[b] { i } else { b });
            model.vocab()[best].clone()
        };
        for i in 0..out.len() {
            prop_assert_eq!(&argmax(&out[..i]), &out[i]);
        }
        if out.len() < 12 {
            prop_assert_eq!(argmax(&out), Role::Prover.end_token());
        }
    }

    #[test]
    fn snapshot_save_load_save_is_stable(a in prop::collection::vec(example(), 0..6)) {
        let model = PolicyModel::trained(3, 0.05, lib(), &a);
        let bytes = model.snapshot_bytes();
        let back = PolicyModel::read_snapshot(&bytes[..]).unwrap();
        prop_assert_eq!(back.snapshot_bytes(), bytes);
    }

    #[test]
    fn reweight_mass_and_cap(
        xs in prop::collection::vec(unit_vector(), 1..6),
        ys in prop::collection::vec((unit_vector(), 1u32..3), 1..7),
        cap in prop_oneof![Just(f64::INFINITY), 0.5f64..4.0],
    ) {
        let problem = ReweightProblem {
            conjectures: xs.iter().collect(),
            statements: ys.iter().map(|(e, k)| (e, *k)).collect(),
            cap,
        };
        let n = xs.len() as f64;
        let m = ys.len() as f64;
        let total_k: f64 = ys.iter().map(|(_, k)| *k as f64).sum();
        match wasserstein_reweight(&problem) {
            Ok(r) => {
                prop_assert!((r.weights.iter().sum::<f64>() - n * total_k / m).abs() < 1e-9);
                prop_assert!(r.weights.iter().all(|w| *w >= 0.0));
                for (i, masked) in r.masked_at.iter().enumerate() {
                    if let Some(at) = masked {
                        prop_assert!(r.trace[*at..].iter().all(|(_, c)| *c != i));
                    }
                    if r.weights[i] > cap {
                        prop_assert!(masked.is_some());
                    }
                }
            }
            Err(e) => prop_assert!(e.available < e.needed && (cap.is_finite() || ys.iter().any(|(_, k)| *k as usize > xs.len()))),
        }
    }

    #[test]
    fn replay_holds_min_pushes_capacity(cap in 1usize..5, pushes in 0usize..12) {
        let mut r = ReplayBuffer::new(cap);
        for _ in 0..pushes {
            r.push(Vec::new());
        }
        prop_assert_eq!(r.len(), pushes.min(cap));
    }
}

#[test]
fn pass_rates_count_every_attempt() {
    let kernel = Kernel::standard();
    let model = PolicyModel::trained(
        4,
        0.1,
        lib(),
        &[WeightedExample {
            prompt: PromptRecord::prover(kernel.parse_statement("(a + 0) = a").unwrap()),
            completion: "rw add_zero at L []; refl".into(),
            weight: 1.0,
        }],
    );
    let targets: Vec<_> = ["(a + 0) = a", "(b + 0) = b", "(a * 1) = a"]
        .iter()
        .map(|s| stp_core::selfplay::Target::dataset(kernel.parse_statement(s).unwrap()))
        .collect();
    let params = stp_core::policy::SampleParams { temperature: 0.1, max_tokens: 32 };
    let attempts = stp_core::selfplay::sample_and_verify(kernel, &model, &targets, 8, params, 10_000, 5);
    let rates = compute_pass_rates(&attempts);
    assert_eq!(rates.len(), 3);
    for c in rates.entries.values() {
        assert_eq!(c.attempts, 8);
        assert!(c.successes <= c.attempts);
    }
    assert!(rates.get("(a + 0) = a").unwrap().successes > 0);
}
