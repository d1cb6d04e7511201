//! Recursive-descent parsers for statements, proofs, and rule lines.
//!
//! Offsets in errors are byte offsets into the input. Whitespace between
//! tokens is insignificant, and `×` is accepted as a spelling of `*`.

use super::proof::{Direction, Proof, ProofStep, Side};
use super::term::{Meta, Op, Pattern, Statement, Term};
use super::Limits;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("parse error at offset {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("limit exceeded: {0}")]
    Limit(String),
    #[error("malformed proof: {0}")]
    Structure(String),
}

impl ParseError {
    fn syntax(position: usize, expected: impl Into<String>) -> Self {
        ParseError::Syntax { position, expected: expected.into() }
    }
}

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, lit: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), ParseError> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(ParseError::syntax(self.pos, format!("'{lit}'")))
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(ParseError::syntax(self.pos, "end of input"))
        }
    }

    fn op(&mut self) -> Result<Op, ParseError> {
        match self.peek() {
            Some('+') => {
                self.bump();
                Ok(Op::Add)
            }
            Some('*') | Some('×') => {
                self.bump();
                Ok(Op::Mul)
            }
            _ => Err(ParseError::syntax(self.pos, "operator '+' or '*'")),
        }
    }

    fn literal(&mut self, limits: &Limits) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits: &str = {
            let rest = self.rest();
            let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            &rest[..end]
        };
        if digits.is_empty() {
            return Err(ParseError::syntax(start, "literal"));
        }
        self.pos += digits.len();
        let value: u64 = digits
            .parse()
            .map_err(|_| ParseError::Limit(format!("literal {digits} exceeds {}", limits.max_literal)))?;
        if value > limits.max_literal {
            return Err(ParseError::Limit(format!("literal {value} exceeds {}", limits.max_literal)));
        }
        Ok(value)
    }

    /// `[a-z_][a-z0-9_]*`
    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_lowercase() || c == '_' => {}
            _ => return None,
        }
        let end = chars
            .find(|(_, c)| !(c.is_ascii_lowercase() || c.is_ascii_digit() || *c == '_'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        self.pos += end;
        Some(&rest[..end])
    }

    fn term(&mut self, limits: &Limits, depth: usize) -> Result<Term, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some('(') => {
                if depth >= limits.max_term_depth {
                    return Err(ParseError::Limit(format!(
                        "term depth exceeds {}",
                        limits.max_term_depth
                    )));
                }
                self.bump();
                let lhs = self.term(limits, depth + 1)?;
                let op = self.op()?;
                let rhs = self.term(limits, depth + 1)?;
                self.expect(")")?;
                Ok(Term::node(op, lhs, rhs))
            }
            Some(c) if c.is_ascii_digit() => Ok(Term::Lit(self.literal(limits)?)),
            Some(c) if c.is_ascii_lowercase() => {
                let id = self.ident().unwrap_or_default();
                if id.len() != 1 {
                    return Err(ParseError::syntax(start, "single-letter variable"));
                }
                Ok(Term::Var(c))
            }
            _ => Err(ParseError::syntax(start, "term")),
        }
    }

    fn pattern(&mut self, limits: &Limits, depth: usize) -> Result<Pattern, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some('(') => {
                if depth >= limits.max_term_depth {
                    return Err(ParseError::Limit("pattern too deep".into()));
                }
                self.bump();
                let lhs = self.pattern(limits, depth + 1)?;
                let op = self.op()?;
                let rhs = self.pattern(limits, depth + 1)?;
                self.expect(")")?;
                Ok(Pattern::node(op, lhs, rhs))
            }
            Some(c) if c.is_ascii_digit() => Ok(Pattern::Lit(self.literal(limits)?)),
            Some(c) => match Meta::from_char(c) {
                Some(m) => {
                    self.bump();
                    Ok(Pattern::Meta(m))
                }
                None => Err(ParseError::syntax(start, "metavariable X, Y or Z")),
            },
            None => Err(ParseError::syntax(start, "pattern")),
        }
    }

    fn step(&mut self, limits: &Limits) -> Result<ProofStep, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.ident() {
            Some("refl") => Ok(ProofStep::Refl),
            Some("eval") => Ok(ProofStep::Eval),
            Some("rw") => {
                let direction = if self.eat("<-") { Direction::Backward } else { Direction::Forward };
                let name_pos = self.pos;
                let rule = self.ident().ok_or_else(|| ParseError::syntax(name_pos, "rule name"))?;
                let at_pos = self.pos;
                if self.ident() != Some("at") {
                    return Err(ParseError::syntax(at_pos, "'at'"));
                }
                let side = match self.peek() {
                    Some('L') => Side::L,
                    Some('R') => Side::R,
                    _ => return Err(ParseError::syntax(self.pos, "side L or R")),
                };
                self.bump();
                self.expect("[")?;
                let mut path = Vec::new();
                loop {
                    match self.peek() {
                        Some(']') => {
                            self.bump();
                            break;
                        }
                        Some(c @ ('0' | '1')) => {
                            self.bump();
                            if self.rest().starts_with(|d: char| d.is_ascii_digit()) {
                                return Err(ParseError::syntax(self.pos, "path index 0 or 1"));
                            }
                            path.push(if c == '0' { 0 } else { 1 });
                            if path.len() > limits.max_term_depth {
                                return Err(ParseError::Limit(format!(
                                    "path longer than {}",
                                    limits.max_term_depth
                                )));
                            }
                            if self.eat(",") && !matches!(self.peek(), Some('0' | '1')) {
                                return Err(ParseError::syntax(self.pos, "path index 0 or 1"));
                            }
                        }
                        _ => return Err(ParseError::syntax(self.pos, "path index 0 or 1, or ']'")),
                    }
                }
                Ok(ProofStep::Rw { direction, rule: rule.to_string(), side, path })
            }
            _ => Err(ParseError::syntax(start, "'rw', 'refl' or 'eval'")),
        }
    }
}

pub fn parse_statement(text: &str) -> Result<Statement, ParseError> {
    parse_statement_with(text, &Limits::default())
}

pub fn parse_statement_with(text: &str, limits: &Limits) -> Result<Statement, ParseError> {
    let mut cur = Cursor::new(text);
    let lhs = cur.term(limits, 0)?;
    cur.expect("=")?;
    let rhs = cur.term(limits, 0)?;
    cur.expect_end()?;
    Ok(Statement::new(lhs, rhs))
}

pub fn parse_term(text: &str, limits: &Limits) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(text);
    let t = cur.term(limits, 0)?;
    cur.expect_end()?;
    Ok(t)
}

pub fn parse_proof(text: &str) -> Result<Proof, ParseError> {
    parse_proof_with(text, &Limits::default())
}

pub fn parse_proof_with(text: &str, limits: &Limits) -> Result<Proof, ParseError> {
    let mut cur = Cursor::new(text);
    let mut steps = vec![cur.step(limits)?];
    while cur.eat(";") {
        steps.push(cur.step(limits)?);
    }
    cur.expect_end()?;
    Proof::new(steps).map_err(ParseError::Structure)
}

/// Parses `name: pattern -> replacement`.
pub(crate) fn parse_rule_line(line: &str, limits: &Limits) -> Result<(String, Pattern, Pattern), ParseError> {
    let mut cur = Cursor::new(line);
    let name = cur.ident().ok_or_else(|| ParseError::syntax(0, "rule name"))?.to_string();
    cur.expect(":")?;
    let pattern = cur.pattern(limits, 0)?;
    cur.expect("->")?;
    let replacement = cur.pattern(limits, 0)?;
    cur.expect_end()?;
    Ok((name, pattern, replacement))
}
