use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::parse::{parse_rule_line, ParseError};
use super::proof::Direction;
use super::term::{Meta, Pattern, Term};
use super::Limits;

/// Name of the distinguished no-op rule `X -> X`.
pub const TRIVIAL_RULE: &str = "trivial";

const DEFAULT_RULES: &str = include_str!("../../data/rules.txt");

/// A named oriented equation between patterns ("lemma").
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub name: String,
    pub pattern: Pattern,
    pub replacement: Pattern,
}

impl RewriteRule {
    /// `(from, to)` for the given orientation.
    pub fn oriented(&self, direction: Direction) -> (&Pattern, &Pattern) {
        match direction {
            Direction::Forward => (&self.pattern, &self.replacement),
            Direction::Backward => (&self.replacement, &self.pattern),
        }
    }

    /// Rendered as it appears in rule files and prompts.
    pub fn statement_text(&self) -> String {
        format!("{} -> {}", self.pattern, self.replacement)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RuleError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("duplicate rule name {0}")]
    Duplicate(String),
    #[error("rule {0}: replacement uses metavariables absent from the pattern")]
    UnboundReplacement(String),
    #[error("rule {TRIVIAL_RULE} must be X -> X")]
    MalformedTrivial,
}

/// Rules keyed by unique name; iteration is in name order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleLibrary {
    rules: BTreeMap<String, RewriteRule>,
}

impl RuleLibrary {
    pub fn new(rules: impl IntoIterator<Item = RewriteRule>) -> Result<Self, RuleError> {
        let mut map = BTreeMap::new();
        for rule in rules {
            if rule.replacement.metas() & !rule.pattern.metas() != 0 {
                return Err(RuleError::UnboundReplacement(rule.name));
            }
            if rule.name == TRIVIAL_RULE
                && (rule.pattern != Pattern::Meta(Meta::X) || rule.replacement != Pattern::Meta(Meta::X))
            {
                return Err(RuleError::MalformedTrivial);
            }
            if map.contains_key(&rule.name) {
                return Err(RuleError::Duplicate(rule.name));
            }
            map.insert(rule.name.clone(), rule);
        }
        Ok(RuleLibrary { rules: map })
    }

    /// Parses the line format; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let limits = Limits::default();
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, pattern, replacement) =
                parse_rule_line(line, &limits).map_err(|source| RuleError::Parse { line: i + 1, source })?;
            rules.push(RewriteRule { name, pattern, replacement });
        }
        Self::new(rules)
    }

    /// The bundled twelve-rule library plus `trivial`.
    pub fn standard() -> &'static RuleLibrary {
        static LIB: OnceLock<RuleLibrary> = OnceLock::new();
        LIB.get_or_init(|| RuleLibrary::parse(DEFAULT_RULES).expect("bundled rule library is valid"))
    }

    pub fn standard_text() -> &'static str {
        DEFAULT_RULES
    }

    pub fn get(&self, name: &str) -> Option<&RewriteRule> {
        self.rules.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.rules.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &RewriteRule> {
        self.rules.values()
    }

    /// Rules other than `trivial`, in name order.
    pub fn nontrivial(&self) -> impl Iterator<Item = &RewriteRule> {
        self.rules.values().filter(|r| r.name != TRIVIAL_RULE)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.rules.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn to_text(&self) -> String {
        self.rules
            .values()
            .map(|r| format!("{}: {}\n", r.name, r.statement_text()))
            .collect()
    }
}

/// Instantiates `pattern` under a complete substitution.
pub(crate) fn instantiate(pattern: &Pattern, subst: &[Option<&Term>; 3]) -> Term {
    match pattern {
        Pattern::Meta(m) => subst[m.index()].expect("metavariable bound by the matcher").clone(),
        Pattern::Lit(n) => Term::Lit(*n),
        Pattern::Node(op, l, r) => Term::node(*op, instantiate(l, subst), instantiate(r, subst)),
    }
}
