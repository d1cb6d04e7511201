use std::collections::BTreeSet;
use std::fmt;

use super::proof::{Proof, ProofStep, Side};
use super::rewrite::{apply_rule_metered, terms_equal, BudgetExceeded, Meter, RewriteError};
use super::term::{Statement, Term};
use super::Kernel;

/// Default primitive-operation budget per proof.
pub const DEFAULT_STEP_BUDGET: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailReason {
    /// Completion text did not parse as a proof.
    Parse,
    SidesDiffer,
    NotGround,
    EvalMismatch,
    Overflow,
    UnknownRule(String),
    NoMatch,
    Path,
    UnboundMetavariable,
    DepthLimit,
    BudgetExceeded,
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailReason::Parse => f.write_str("parse"),
            FailReason::SidesDiffer => f.write_str("sides differ"),
            FailReason::NotGround => f.write_str("not ground"),
            FailReason::EvalMismatch => f.write_str("values differ"),
            FailReason::Overflow => f.write_str("overflow"),
            FailReason::UnknownRule(r) => write!(f, "unknown rule {r}"),
            FailReason::NoMatch => f.write_str("no match"),
            FailReason::Path => f.write_str("bad path"),
            FailReason::UnboundMetavariable => f.write_str("unbound metavariable"),
            FailReason::DepthLimit => f.write_str("depth limit"),
            FailReason::BudgetExceeded => f.write_str("budget_exceeded"),
        }
    }
}

impl From<RewriteError> for FailReason {
    fn from(e: RewriteError) -> Self {
        match e {
            RewriteError::Path => FailReason::Path,
            RewriteError::NoMatch => FailReason::NoMatch,
            RewriteError::UnboundMetavariable => FailReason::UnboundMetavariable,
            RewriteError::Budget(_) => FailReason::BudgetExceeded,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Failed { step: Option<usize>, reason: FailReason },
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Verified => f.write_str("verified"),
            Verdict::Failed { step: Some(i), reason } => write!(f, "failed(step {i}: {reason})"),
            Verdict::Failed { step: None, reason } => write!(f, "failed({reason})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationOutcome {
    pub verdict: Verdict,
    /// Rules of the rewrite steps that executed successfully.
    pub used_lemmas: BTreeSet<String>,
    /// Primitive match attempts, capped at the step budget.
    pub cost: u64,
    pub steps_executed: usize,
}

impl VerificationOutcome {
    pub fn is_verified(&self) -> bool {
        self.verdict.is_verified()
    }

    /// Outcome recorded for completions that never parsed.
    pub fn unparseable() -> Self {
        VerificationOutcome {
            verdict: Verdict::Failed { step: None, reason: FailReason::Parse },
            used_lemmas: BTreeSet::new(),
            cost: 0,
            steps_executed: 0,
        }
    }
}

fn eval_metered(t: &Term, meter: &mut Meter) -> Result<Option<u64>, BudgetExceeded> {
    meter.tick()?;
    Ok(match t {
        Term::Var(_) => None,
        Term::Lit(n) => Some(*n),
        Term::Node(op, l, r) => match (eval_metered(l, meter)?, eval_metered(r, meter)?) {
            (Some(a), Some(b)) => op.eval(a, b),
            _ => None,
        },
    })
}

impl Kernel {
    /// Replays `proof` against `statement`. Never panics or errors; all
    /// failures are reported in the verdict.
    pub fn verify(&self, statement: &Statement, proof: &Proof, step_budget: u64) -> VerificationOutcome {
        let mut meter = Meter::new(step_budget);
        let mut lhs = statement.lhs.clone();
        let mut rhs = statement.rhs.clone();
        let mut used = BTreeSet::new();
        let mut executed = 0;

        let fail = |step: usize, reason: FailReason, used: BTreeSet<String>, meter: &Meter, executed| {
            VerificationOutcome {
                verdict: Verdict::Failed { step: Some(step), reason },
                used_lemmas: used,
                cost: meter.used(),
                steps_executed: executed,
            }
        };

        for (i, step) in proof.steps().iter().enumerate() {
            executed += 1;
            match step {
                ProofStep::Rw { direction, rule, side, path } => {
                    let Some(rule_def) = self.library.get(rule) else {
                        return fail(i, FailReason::UnknownRule(rule.clone()), used, &meter, executed);
                    };
                    let target = match side {
                        Side::L => &mut lhs,
                        Side::R => &mut rhs,
                    };
                    match apply_rule_metered(target, rule_def, path, *direction, &mut meter) {
                        Ok(next) => {
                            if next.depth() > self.limits.max_term_depth
                                || next.max_literal() > self.limits.max_literal
                            {
                                return fail(i, FailReason::DepthLimit, used, &meter, executed);
                            }
                            *target = next;
                            used.insert(rule.clone());
                        }
                        Err(e) => return fail(i, e.into(), used, &meter, executed),
                    }
                }
                ProofStep::Refl => {
                    return match terms_equal(&lhs, &rhs, &mut meter) {
                        Ok(true) => VerificationOutcome {
                            verdict: Verdict::Verified,
                            used_lemmas: used,
                            cost: meter.used(),
                            steps_executed: executed,
                        },
                        Ok(false) => fail(i, FailReason::SidesDiffer, used, &meter, executed),
                        Err(_) => fail(i, FailReason::BudgetExceeded, used, &meter, executed),
                    };
                }
                ProofStep::Eval => {
                    if !lhs.is_ground() || !rhs.is_ground() {
                        return fail(i, FailReason::NotGround, used, &meter, executed);
                    }
                    let values = eval_metered(&lhs, &mut meter).and_then(|a| Ok((a, eval_metered(&rhs, &mut meter)?)));
                    return match values {
                        Err(_) => fail(i, FailReason::BudgetExceeded, used, &meter, executed),
                        Ok((Some(a), Some(b))) if a == b => VerificationOutcome {
                            verdict: Verdict::Verified,
                            used_lemmas: used,
                            cost: meter.used(),
                            steps_executed: executed,
                        },
                        Ok((Some(_), Some(_))) => fail(i, FailReason::EvalMismatch, used, &meter, executed),
                        Ok(_) => fail(i, FailReason::Overflow, used, &meter, executed),
                    };
                }
            }
        }
        unreachable!("proof invariant: the last step is terminal")
    }

    /// Whether the statement closes with a lone `refl` or `eval`.
    pub fn closes_directly(&self, statement: &Statement) -> bool {
        if statement.lhs == statement.rhs {
            return true;
        }
        matches!((statement.lhs.eval(), statement.rhs.eval()), (Some(a), Some(b)) if a == b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_proof, parse_statement, Limits, RuleLibrary};

    fn check(stmt: &str, proof: &str) -> VerificationOutcome {
        Kernel::standard().verify(&parse_statement(stmt).unwrap(), &parse_proof(proof).unwrap(), DEFAULT_STEP_BUDGET)
    }

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn examples() {
        let out = check("(a + 0) = a", "rw add_zero at L []; refl");
        assert!(out.is_verified());
        assert_eq!(out.used_lemmas, set(&["add_zero"]));

        let out = check("(2 * 3) = 6", "eval");
        assert!(out.is_verified());
        assert!(out.used_lemmas.is_empty());

        let out = check("(a + b) = (b + a)", "refl");
        assert_eq!(out.verdict, Verdict::Failed { step: Some(0), reason: FailReason::SidesDiffer });
        assert_eq!(out.verdict.to_string(), "failed(step 0: sides differ)");

        let out = check("(1 * (a + 0)) = a", "rw one_mul at L []; rw add_zero at L []; refl");
        assert!(out.is_verified());
        assert_eq!(out.used_lemmas, set(&["one_mul", "add_zero"]));
        assert_eq!(out.steps_executed, 3);
    }

    #[test]
    fn failure_modes() {
        let out = check("(a + 0) = a", "rw no_such_rule at L []; refl");
        assert_eq!(out.verdict, Verdict::Failed { step: Some(0), reason: FailReason::UnknownRule("no_such_rule".into()) });
        let out = check("(a + 0) = a", "rw add_zero at L [1]; refl");
        assert!(matches!(out.verdict, Verdict::Failed { step: Some(0), reason: FailReason::NoMatch }));
        let out = check("(a + 0) = a", "eval");
        assert!(matches!(out.verdict, Verdict::Failed { step: Some(0), reason: FailReason::NotGround }));
        let out = check("(2 + 3) = 6", "eval");
        assert!(matches!(out.verdict, Verdict::Failed { step: Some(0), reason: FailReason::EvalMismatch }));
        let out = check("(a + 0) = a", "rw add_comm at L []; refl");
        assert!(matches!(out.verdict, Verdict::Failed { step: Some(1), .. }));
        assert_eq!(out.used_lemmas, set(&["add_comm"]));
    }

    #[test]
    fn budget_exhaustion() {
        let k = Kernel::standard();
        let s = parse_statement("(1 * (a + 0)) = a").unwrap();
        let p = parse_proof("rw one_mul at L []; rw add_zero at L []; refl").unwrap();
        let full = k.verify(&s, &p, DEFAULT_STEP_BUDGET);
        assert!(full.is_verified());
        let tight = k.verify(&s, &p, full.cost - 1);
        assert!(matches!(tight.verdict, Verdict::Failed { reason: FailReason::BudgetExceeded, .. }));
        assert!(tight.cost < full.cost);
        assert!(k.verify(&s, &p, full.cost).is_verified());
    }

    #[test]
    fn depth_limit_applies_to_rewrites() {
        let k = Kernel::new(RuleLibrary::standard().clone(), Limits { max_term_depth: 1, max_literal: 100 });
        let s = parse_statement("a = a").unwrap();
        let p = parse_proof("rw <- add_zero at L []; rw <- add_zero at L []; rw add_zero at L []; rw add_zero at L []; refl").unwrap();
        assert!(matches!(k.verify(&s, &p, 1000).verdict, Verdict::Failed { step: Some(1), reason: FailReason::DepthLimit }));
    }

    #[test]
    fn closes_directly() {
        let k = Kernel::standard();
        assert!(k.closes_directly(&parse_statement("a = a").unwrap()));
        assert!(k.closes_directly(&parse_statement("(2 * 3) = (3 + 3)").unwrap()));
        assert!(!k.closes_directly(&parse_statement("(a + 0) = a").unwrap()));
    }
}
