//! Pattern matching and single-step rewriting with a primitive-operation meter.

use super::proof::Direction;
use super::rules::{instantiate, RewriteRule};
use super::term::{Pattern, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("step budget exhausted")]
pub struct BudgetExceeded;

/// Counts primitive node-level match attempts against a fixed budget.
#[derive(Debug, Clone)]
pub struct Meter {
    used: u64,
    budget: u64,
}

impl Meter {
    pub fn new(budget: u64) -> Self {
        Meter { used: 0, budget }
    }

    pub fn unlimited() -> Self {
        Meter::new(u64::MAX)
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    #[inline]
    pub fn tick(&mut self) -> Result<(), BudgetExceeded> {
        if self.used >= self.budget {
            return Err(BudgetExceeded);
        }
        self.used += 1;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("path addresses no subterm")]
    Path,
    #[error("pattern does not match")]
    NoMatch,
    #[error("orientation leaves a metavariable unbound")]
    UnboundMetavariable,
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Metered structural equality: one tick per node pair compared.
pub fn terms_equal(a: &Term, b: &Term, meter: &mut Meter) -> Result<bool, BudgetExceeded> {
    meter.tick()?;
    Ok(match (a, b) {
        (Term::Var(x), Term::Var(y)) => x == y,
        (Term::Lit(x), Term::Lit(y)) => x == y,
        (Term::Node(o1, l1, r1), Term::Node(o2, l2, r2)) => {
            o1 == o2 && terms_equal(l1, l2, meter)? && terms_equal(r1, r2, meter)?
        }
        _ => false,
    })
}

/// Matches `pattern` against `term`, extending `subst`. One tick per pattern node.
pub fn match_pattern<'t>(
    pattern: &Pattern,
    term: &'t Term,
    subst: &mut [Option<&'t Term>; 3],
    meter: &mut Meter,
) -> Result<bool, BudgetExceeded> {
    meter.tick()?;
    match pattern {
        Pattern::Meta(m) => match subst[m.index()] {
            Some(bound) => terms_equal(bound, term, meter),
            None => {
                subst[m.index()] = Some(term);
                Ok(true)
            }
        },
        Pattern::Lit(n) => Ok(matches!(term, Term::Lit(v) if v == n)),
        Pattern::Node(op, pl, pr) => match term {
            Term::Node(top, tl, tr) if top == op => {
                Ok(match_pattern(pl, tl, subst, meter)? && match_pattern(pr, tr, subst, meter)?)
            }
            _ => Ok(false),
        },
    }
}

/// Rewrites the subterm of `term` at `path` with the oriented rule.
pub fn apply_rule(term: &Term, rule: &RewriteRule, path: &[u8], direction: Direction) -> Result<Term, RewriteError> {
    apply_rule_metered(term, rule, path, direction, &mut Meter::unlimited())
}

pub fn apply_rule_metered(
    term: &Term,
    rule: &RewriteRule,
    path: &[u8],
    direction: Direction,
    meter: &mut Meter,
) -> Result<Term, RewriteError> {
    let (from, to) = rule.oriented(direction);
    if to.metas() & !from.metas() != 0 {
        return Err(RewriteError::UnboundMetavariable);
    }
    let target = term.subterm(path).ok_or(RewriteError::Path)?;
    let mut subst = [None; 3];
    if !match_pattern(from, target, &mut subst, meter)? {
        return Err(RewriteError::NoMatch);
    }
    let replaced = instantiate(to, &subst);
    Ok(term.replace_at(path, replaced).expect("path was validated"))
}
