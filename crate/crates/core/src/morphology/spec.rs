//! Paradigm spec documents and their text format.
//!
//! ```text
//! # comment
//! paradigm LT noun d1
//! case=NOM,number=SG<TAB>as
//! case=GEN,number=SG<TAB>o
//! case=DAT,number=PL<TAB>ams<TAB>lt-palatal<TAB>secondary
//!
//! rule lt-palatal
//! step d -> dž
//! step t -> č
//! ```
//!
//! A slot line is `features TAB ending [TAB rule-id [TAB stem-selector]]`.
//! `-` stands for an empty feature bundle, an empty ending, or an absent
//! rule/selector. Blank lines and `#` comments are ignored; a new `paradigm`
//! or `rule` header starts the next document.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::rule::{RewriteStep, StemRule};
use super::LoadError;
use crate::features::{FeatureBundle, Language, Pos};

/// Which principal-part stem a slot attaches its ending to.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StemSelector {
    #[default]
    Primary,
    Secondary,
    Tertiary,
}

impl StemSelector {
    pub fn index(self) -> usize {
        match self {
            StemSelector::Primary => 0,
            StemSelector::Secondary => 1,
            StemSelector::Tertiary => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StemSelector::Primary => "primary",
            StemSelector::Secondary => "secondary",
            StemSelector::Tertiary => "tertiary",
        }
    }
}

impl FromStr for StemSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "primary" => Ok(StemSelector::Primary),
            "secondary" => Ok(StemSelector::Secondary),
            "tertiary" => Ok(StemSelector::Tertiary),
            other => Err(format!("unknown stem selector `{other}`")),
        }
    }
}

/// (language, part of speech, inflection class): the registry key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassKey {
    pub language: Language,
    pub pos: Pos,
    pub class: String,
}

impl ClassKey {
    pub fn new(language: Language, pos: Pos, class: impl Into<String>) -> Self {
        ClassKey { language, pos, class: class.into() }
    }
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.language, self.pos, self.class)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub features: FeatureBundle,
    pub ending: String,
    pub stem_rule: Option<String>,
    pub stem_selector: StemSelector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadigmSpec {
    pub key: ClassKey,
    pub slots: Vec<Slot>,
}

impl ParadigmSpec {
    pub fn slot(&self, features: &FeatureBundle) -> Option<&Slot> {
        self.slots.iter().find(|s| &s.features == features)
    }

    /// Number of principal-part stems the spec reads (1..=3).
    pub fn stems_required(&self) -> usize {
        self.slots
            .iter()
            .map(|s| s.stem_selector.index() + 1)
            .max()
            .unwrap_or(1)
    }
}

impl fmt::Display for ParadigmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "paradigm {}", self.key)?;
        for slot in &self.slots {
            let features = if slot.features.is_empty() {
                "-".to_string()
            } else {
                slot.features.to_string()
            };
            let ending = if slot.ending.is_empty() { "-" } else { &slot.ending };
            write!(f, "{features}\t{ending}")?;
            match (&slot.stem_rule, slot.stem_selector) {
                (None, StemSelector::Primary) => {}
                (Some(rule), StemSelector::Primary) => write!(f, "\t{rule}")?,
                (rule, selector) => write!(
                    f,
                    "\t{}\t{}",
                    rule.as_deref().unwrap_or(""),
                    selector.as_str()
                )?,
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Documents found in one source text.
#[derive(Debug, Default)]
pub(crate) struct ParsedSource {
    /// Each spec with the 1-based line number of every slot.
    pub specs: Vec<(ParadigmSpec, Vec<usize>)>,
    pub rules: Vec<(StemRule, usize)>,
}

enum Current {
    None,
    Spec(ParadigmSpec, Vec<usize>),
    Rule(StemRule, usize),
}

pub(crate) fn parse_source(name: &str, text: &str) -> Result<ParsedSource, LoadError> {
    let err = |line: usize, message: String| LoadError::Parse {
        file: name.to_string(),
        line,
        message,
    };
    let mut out = ParsedSource::default();
    let mut current = Current::None;
    let flush = |current: Current, out: &mut ParsedSource| match current {
        Current::Spec(spec, lines) => out.specs.push((spec, lines)),
        Current::Rule(rule, line) => out.rules.push((rule, line)),
        Current::None => {}
    };

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("paradigm ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let [lang, pos, class] = parts[..] else {
                return Err(err(lineno, "expected `paradigm <lang> <pos> <class>`".into()));
            };
            let language = lang.parse::<Language>().map_err(|e| err(lineno, e.to_string()))?;
            let pos = pos.parse::<Pos>().map_err(|e| err(lineno, e.to_string()))?;
            flush(std::mem::replace(&mut current, Current::None), &mut out);
            current = Current::Spec(
                ParadigmSpec { key: ClassKey::new(language, pos, class), slots: Vec::new() },
                Vec::new(),
            );
            continue;
        }
        if let Some(rest) = line.strip_prefix("rule ") {
            let id = rest.trim();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(err(lineno, "expected `rule <id>`".into()));
            }
            flush(std::mem::replace(&mut current, Current::None), &mut out);
            current = Current::Rule(StemRule::new(id, Vec::new()), lineno);
            continue;
        }
        match &mut current {
            Current::None => {
                return Err(err(lineno, "content before any `paradigm` or `rule` header".into()))
            }
            Current::Rule(rule, _) => {
                let body = line
                    .trim()
                    .strip_prefix("step ")
                    .ok_or_else(|| err(lineno, "expected `step <pattern> -> <replacement>`".into()))?;
                let (pattern, replacement) = body
                    .split_once("->")
                    .ok_or_else(|| err(lineno, "missing `->` in step".into()))?;
                let pattern: String = pattern.trim().nfc().collect();
                let replacement: String = replacement.trim().nfc().collect();
                let step = RewriteStep::new(&pattern, &replacement)
                    .map_err(|e| err(lineno, e.to_string()))?;
                rule.steps.push(step);
            }
            Current::Spec(spec, lines) => {
                let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
                if cols.len() < 2 || cols.len() > 4 {
                    return Err(err(
                        lineno,
                        format!("expected 2 to 4 tab-separated columns, found {}", cols.len()),
                    ));
                }
                let features = cols[0]
                    .parse::<FeatureBundle>()
                    .map_err(|e| err(lineno, e.to_string()))?;
                features
                    .check_licensed(spec.key.pos)
                    .map_err(|e| err(lineno, e.to_string()))?;
                let ending = match cols[1] {
                    "-" => String::new(),
                    e => e.nfc().collect(),
                };
                let stem_rule = match cols.get(2).copied() {
                    None | Some("") | Some("-") => None,
                    Some(id) => Some(id.to_string()),
                };
                let stem_selector = match cols.get(3).copied() {
                    None | Some("") | Some("-") => StemSelector::Primary,
                    Some(s) => s.parse().map_err(|e| err(lineno, e))?,
                };
                spec.slots.push(Slot { features, ending, stem_rule, stem_selector });
                lines.push(lineno);
            }
        }
    }
    flush(current, &mut out);
    Ok(out)
}
