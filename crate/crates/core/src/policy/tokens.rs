//! Lexer shared by prompts, completions and embeddings.

pub const LEMMA: &str = "<lemma>";
pub const EASY_THEOREM: &str = "<easy theorem>";
pub const HARD_THEOREM: &str = "<hard theorem>";
pub const HARD_THEOREM_END: &str = "</hard theorem>";
pub const THEOREM: &str = "<theorem>";
pub const PROOF: &str = "<proof>";
pub const PROOF_END: &str = "</proof>";
pub const UNK: &str = "<unk>";

pub const FORMATTING_TOKENS: [&str; 8] = [LEMMA, EASY_THEOREM, HARD_THEOREM, HARD_THEOREM_END, THEOREM, PROOF, PROOF_END, UNK];

const SYMBOLS: [&str; 14] = [":=", "->", "<-", "(", ")", "[", "]", "+", "*", "=", ";", ",", ":", "×"];

/// Splits text into identifiers, literals, operators, brackets and
/// formatting tokens. Unrecognized characters become [`UNK`].
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = text;
    'outer: while let Some(c) = rest.chars().next() {
        if c.is_whitespace() {
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if c == '<' {
            for tok in FORMATTING_TOKENS {
                if let Some(r) = rest.strip_prefix(tok) {
                    out.push(tok.to_string());
                    rest = r;
                    continue 'outer;
                }
            }
        }
        for sym in SYMBOLS {
            if let Some(r) = rest.strip_prefix(sym) {
                out.push(if sym == "×" { "*" } else { sym }.to_string());
                rest = r;
                continue 'outer;
            }
        }
        let end = if c.is_ascii_digit() {
            rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len())
        } else if c.is_ascii_alphabetic() || c == '_' {
            rest.find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_')).unwrap_or(rest.len())
        } else {
            out.push(UNK.to_string());
            rest = &rest[c.len_utf8()..];
            continue;
        };
        out.push(rest[..end].to_string());
        rest = &rest[end..];
    }
    out
}

/// Joins tokens with canonical spacing: a single space between tokens,
/// none after an opening bracket or before a closing bracket or separator.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    let mut prev: Option<&str> = None;
    for tok in tokens {
        let tok = tok.as_ref();
        if let Some(p) = prev {
            let tight = matches!(p, "(" | "[") || matches!(tok, ")" | "]" | ";" | ",");
            if !tight {
                out.push(' ');
            }
        }
        out.push_str(tok);
        prev = Some(tok);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(tokenize("(a + 0) = a"), ["(", "a", "+", "0", ")", "=", "a"]);
        assert_eq!(tokenize("<lemma>"), ["<lemma>"]);
        assert_eq!(tokenize("<hard theorem>x</hard theorem>"), ["<hard theorem>", "x", "</hard theorem>"]);
        assert_eq!(tokenize("rw <- add_zero at R [0 1]; refl"), ["rw", "<-", "add_zero", "at", "R", "[", "0", "1", "]", ";", "refl"]);
        assert_eq!(tokenize("a ? 12"), ["a", UNK, "12"]);
    }

    #[test]
    fn canonical_round_trip() {
        for text in ["(a + 0) = a", "((x + y) * 2) = ((x * 2) + (y * 2))", "rw <- add_assoc at R [0 1]; rw mul_one at L []; refl", "eval"] {
            assert_eq!(detokenize(&tokenize(text)), text);
        }
    }
}
