use std::fmt;

/// Rewrite orientation: forward uses `pattern -> replacement`, backward the reverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// Which side of the goal equation a step rewrites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::L => "L",
            Side::R => "R",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProofStep {
    Rw {
        direction: Direction,
        rule: String,
        side: Side,
        path: Vec<u8>,
    },
    Refl,
    Eval,
}

impl ProofStep {
    pub fn rw(direction: Direction, rule: impl Into<String>, side: Side, path: Vec<u8>) -> Self {
        ProofStep::Rw { direction, rule: rule.into(), side, path }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, ProofStep::Refl | ProofStep::Eval)
    }
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofStep::Refl => f.write_str("refl"),
            ProofStep::Eval => f.write_str("eval"),
            ProofStep::Rw { direction, rule, side, path } => {
                f.write_str("rw ")?;
                if *direction == Direction::Backward {
                    f.write_str("<- ")?;
                }
                write!(f, "{rule} at {side} [")?;
                for (i, idx) in path.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{idx}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// A non-empty step list whose only terminal step (`refl`/`eval`) is the last one.
///
/// Construct through [`Proof::new`] or the parser so the structure invariant holds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Proof {
    steps: Vec<ProofStep>,
}

impl Proof {
    pub fn new(steps: Vec<ProofStep>) -> Result<Proof, String> {
        match steps.split_last() {
            None => Err("proof has no steps".into()),
            Some((last, init)) => {
                if !last.is_terminal() {
                    return Err("last step must be refl or eval".into());
                }
                if let Some(i) = init.iter().position(ProofStep::is_terminal) {
                    return Err(format!("terminal step at position {i} before the end"));
                }
                Ok(Proof { steps })
            }
        }
    }

    pub fn steps(&self) -> &[ProofStep] {
        &self.steps
    }

    pub fn rewrite_count(&self) -> usize {
        self.steps.len() - 1
    }

    /// Steps joined by `"; "`.
    pub fn canonical_text(&self) -> String {
        self.to_string()
    }

    /// Proof length `L`: character count of the canonical text.
    pub fn length(&self) -> usize {
        self.canonical_text().chars().count()
    }

    /// Rule names referenced by rewrite steps.
    pub fn rule_names(&self) -> std::collections::BTreeSet<String> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                ProofStep::Rw { rule, .. } => Some(rule.clone()),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}
