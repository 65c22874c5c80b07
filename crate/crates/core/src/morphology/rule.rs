//! Suffix-anchored stem rewrite rules.
//!
//! A pattern is a sequence of literal characters and bracketed classes
//! (`[bdg]`), matched against the end of the stem. The replacement is literal
//! text where `$1`..`$9` insert the characters matched by the classes, in
//! order. `-` as a replacement means the empty string.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleSyntaxError {
    #[error("empty pattern")]
    EmptyPattern,
    #[error("unterminated character class in `{0}`")]
    UnterminatedClass(String),
    #[error("empty character class in `{0}`")]
    EmptyClass(String),
    #[error("replacement `{replacement}` references ${index} but the pattern has {classes} class(es)")]
    BadReference {
        replacement: String,
        index: usize,
        classes: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Atom {
    Literal(char),
    Class(Vec<char>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Literal(char),
    Capture(usize),
}

/// One `pattern -> replacement` step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pattern: Vec<Atom>,
    replacement: Vec<Piece>,
    pattern_text: String,
    replacement_text: String,
}

impl RewriteStep {
    pub fn new(pattern: &str, replacement: &str) -> Result<Self, RuleSyntaxError> {
        let atoms = parse_pattern(pattern)?;
        let classes = atoms.iter().filter(|a| matches!(a, Atom::Class(_))).count();
        let replacement_text = if replacement == "-" { "" } else { replacement };
        let mut pieces = Vec::new();
        let mut chars = replacement_text.chars().peekable();
        while let Some(c) = chars.next() {
            match (c, chars.peek().and_then(|d| d.to_digit(10))) {
                ('$', Some(d)) if d >= 1 => {
                    chars.next();
                    let index = d as usize;
                    if index > classes {
                        return Err(RuleSyntaxError::BadReference {
                            replacement: replacement.to_string(),
                            index,
                            classes,
                        });
                    }
                    pieces.push(Piece::Capture(index - 1));
                }
                _ => pieces.push(Piece::Literal(c)),
            }
        }
        Ok(RewriteStep {
            pattern: atoms,
            replacement: pieces,
            pattern_text: pattern.to_string(),
            replacement_text: replacement_text.to_string(),
        })
    }

    pub fn pattern(&self) -> &str {
        &self.pattern_text
    }

    pub fn replacement(&self) -> &str {
        &self.replacement_text
    }

    /// Rewrites the end of `stem` if the pattern matches; `None` otherwise.
    fn apply(&self, stem: &str) -> Option<String> {
        let n = self.pattern.len();
        let mut tail_start = stem.len();
        let mut tail = Vec::with_capacity(n);
        for (i, c) in stem.char_indices().rev().take(n) {
            tail_start = i;
            tail.push(c);
        }
        if tail.len() < n {
            return None;
        }
        tail.reverse();
        let mut captures = Vec::new();
        for (atom, c) in self.pattern.iter().zip(&tail) {
            match atom {
                Atom::Literal(l) if l == c => {}
                Atom::Class(set) if set.contains(c) => captures.push(*c),
                _ => return None,
            }
        }
        let mut out = String::with_capacity(stem.len() + 4);
        out.push_str(&stem[..tail_start]);
        for piece in &self.replacement {
            match piece {
                Piece::Literal(c) => out.push(*c),
                Piece::Capture(i) => out.push(captures[*i]),
            }
        }
        Some(out)
    }
}

fn parse_pattern(pattern: &str) -> Result<Vec<Atom>, RuleSyntaxError> {
    let mut atoms = Vec::new();
    let mut chars = pattern.chars();
    while let Some(c) = chars.next() {
        if c == '[' {
            let mut set = Vec::new();
            loop {
                match chars.next() {
                    Some(']') => break,
                    Some(m) => set.push(m),
                    None => return Err(RuleSyntaxError::UnterminatedClass(pattern.to_string())),
                }
            }
            if set.is_empty() {
                return Err(RuleSyntaxError::EmptyClass(pattern.to_string()));
            }
            atoms.push(Atom::Class(set));
        } else {
            atoms.push(Atom::Literal(c));
        }
    }
    if atoms.is_empty() {
        return Err(RuleSyntaxError::EmptyPattern);
    }
    Ok(atoms)
}

/// An ordered list of rewrite steps; the first matching step fires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StemRule {
    pub id: String,
    pub steps: Vec<RewriteStep>,
}

impl StemRule {
    pub fn new(id: impl Into<String>, steps: Vec<RewriteStep>) -> Self {
        StemRule { id: id.into(), steps }
    }

    /// Applies the first matching step. A step that would empty a non-empty
    /// stem is treated as not matching, so the result is never empty unless
    /// the input was.
    pub fn apply(&self, stem: &str) -> String {
        self.steps
            .iter()
            .filter_map(|step| step.apply(stem))
            .find(|out| !out.is_empty() || stem.is_empty())
            .unwrap_or_else(|| stem.to_string())
    }
}

impl fmt::Display for StemRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rule {}", self.id)?;
        for step in &self.steps {
            let replacement = if step.replacement_text.is_empty() {
                "-"
            } else {
                &step.replacement_text
            };
            writeln!(f, "step {} -> {}", step.pattern_text, replacement)?;
        }
        Ok(())
    }
}

/// Applies `rule` to `stem`.
pub fn apply_stem_rule(stem: &str, rule: &StemRule) -> String {
    rule.apply(stem)
}
