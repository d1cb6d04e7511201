//! Terms, statements, and rule patterns of the equational language.

use std::fmt;

/// Binary operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Add,
    Mul,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Mul => "*",
        }
    }

    pub fn eval(self, lhs: u64, rhs: u64) -> Option<u64> {
        match self {
            Op::Add => lhs.checked_add(rhs),
            Op::Mul => lhs.checked_mul(rhs),
        }
    }
}

/// An object-level term: a variable `a`..`z`, a natural literal, or a binary node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(char),
    Lit(u64),
    Node(Op, Box<Term>, Box<Term>),
}

impl Term {
    pub fn node(op: Op, lhs: Term, rhs: Term) -> Term {
        Term::Node(op, Box::new(lhs), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(lhs: Term, rhs: Term) -> Term {
        Term::node(Op::Add, lhs, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(lhs: Term, rhs: Term) -> Term {
        Term::node(Op::Mul, lhs, rhs)
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Lit(_) => 0,
            Term::Node(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Lit(_) => 1,
            Term::Node(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn max_literal(&self) -> u64 {
        match self {
            Term::Var(_) => 0,
            Term::Lit(n) => *n,
            Term::Node(_, l, r) => l.max_literal().max(r.max_literal()),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Lit(_) => true,
            Term::Node(_, l, r) => l.is_ground() && r.is_ground(),
        }
    }

    /// Value of a ground term; `None` on variables or overflow.
    pub fn eval(&self) -> Option<u64> {
        match self {
            Term::Var(_) => None,
            Term::Lit(n) => Some(*n),
            Term::Node(op, l, r) => op.eval(l.eval()?, r.eval()?),
        }
    }

    pub fn subterm(&self, path: &[u8]) -> Option<&Term> {
        let mut cur = self;
        for &idx in path {
            cur = match (cur, idx) {
                (Term::Node(_, l, _), 0) => l,
                (Term::Node(_, _, r), 1) => r,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Copy of `self` with the subterm at `path` replaced.
    pub fn replace_at(&self, path: &[u8], with: Term) -> Option<Term> {
        match path.split_first() {
            None => Some(with),
            Some((&idx, rest)) => match self {
                Term::Node(op, l, r) => match idx {
                    0 => Some(Term::node(*op, l.replace_at(rest, with)?, (**r).clone())),
                    1 => Some(Term::node(*op, (**l).clone(), r.replace_at(rest, with)?)),
                    _ => None,
                },
                _ => None,
            },
        }
    }

    /// All addressable paths in preorder, which is also lexicographic order.
    pub fn paths(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::with_capacity(self.size());
        let mut prefix = Vec::new();
        self.collect_paths(&mut prefix, &mut out);
        out
    }

    fn collect_paths(&self, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        out.push(prefix.clone());
        if let Term::Node(_, l, r) = self {
            prefix.push(0);
            l.collect_paths(prefix, out);
            prefix.pop();
            prefix.push(1);
            r.collect_paths(prefix, out);
            prefix.pop();
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(c) => write!(f, "{c}"),
            Term::Lit(n) => write!(f, "{n}"),
            Term::Node(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
        }
    }
}

/// An equation `lhs = rhs`. Two statements are equal iff their canonical texts are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Statement {
    pub lhs: Term,
    pub rhs: Term,
}

impl Statement {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Statement { lhs, rhs }
    }

    /// Fully parenthesized, single-spaced serialization.
    pub fn canonical_text(&self) -> String {
        self.to_string()
    }

    pub fn depth(&self) -> usize {
        self.lhs.depth().max(self.rhs.depth())
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Metavariable of a rule pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Meta {
    X,
    Y,
    Z,
}

impl Meta {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_char(c: char) -> Option<Meta> {
        match c {
            'X' => Some(Meta::X),
            'Y' => Some(Meta::Y),
            'Z' => Some(Meta::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Meta::X => 'X',
            Meta::Y => 'Y',
            Meta::Z => 'Z',
        }
    }
}

/// A rule-side term over metavariables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    Meta(Meta),
    Lit(u64),
    Node(Op, Box<Pattern>, Box<Pattern>),
}

impl Pattern {
    pub fn node(op: Op, lhs: Pattern, rhs: Pattern) -> Pattern {
        Pattern::Node(op, Box::new(lhs), Box::new(rhs))
    }

    /// Bitmask of metavariables occurring in the pattern.
    pub fn metas(&self) -> u8 {
        match self {
            Pattern::Meta(m) => 1 << m.index(),
            Pattern::Lit(_) => 0,
            Pattern::Node(_, l, r) => l.metas() | r.metas(),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Meta(m) => write!(f, "{}", m.as_char()),
            Pattern::Lit(n) => write!(f, "{n}"),
            Pattern::Node(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
        }
    }
}
