//! Lexical entries, domain tags and translation links.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::{is_nfc, UnicodeNormalization};

use crate::features::{Case, FeatureBundle, Gender, Language, Pos};
use crate::morphology::{ClassKey, ParadigmRegistry};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u64);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl FromStr for $name {
            type Err = std::num::ParseIntError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                s.parse().map($name)
            }
        }
    };
}

id_type!(
    /// Entry identifier. `EntryId::NEW` (0) asks the store to assign one.
    EntryId
);
id_type!(LinkId);
id_type!(DomainId);

impl EntryId {
    pub const NEW: EntryId = EntryId(0);

    pub fn is_new(self) -> bool {
        self == EntryId::NEW
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regularity {
    Regular,
    Irregular,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Defectiveness {
    #[default]
    None,
    SingularOnly,
    PluralOnly,
}

macro_rules! text_enum {
    ($name:ident { $($variant:ident => $text:literal),+ }) => {
        impl $name {
            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!("unknown {} `{other}`", stringify!($name).to_lowercase())),
                }
            }
        }
    };
}

text_enum!(Regularity { Regular => "regular", Irregular => "irregular" });
text_enum!(Defectiveness { None => "none", SingularOnly => "singular-only", PluralOnly => "plural-only" });

/// One lemma of one language and part of speech.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LexicalEntry {
    #[serde(default)]
    pub id: EntryId,
    #[serde(rename = "lang")]
    pub language: Language,
    pub pos: Pos,
    pub lemma: String,
    pub stems: Vec<String>,
    #[serde(rename = "class", default)]
    pub inflection_class: Option<String>,
    #[serde(default)]
    pub gender: Option<Gender>,
    #[serde(default)]
    pub regularity: Option<Regularity>,
    #[serde(rename = "defective", default)]
    pub defectiveness: Defectiveness,
    #[serde(default)]
    pub domains: BTreeSet<DomainId>,
    #[serde(default)]
    pub overrides: BTreeMap<FeatureBundle, String>,
    #[serde(default)]
    pub required_cases: Vec<Case>,
}

impl LexicalEntry {
    /// A bare entry with one stem and no attributes.
    pub fn new(
        language: Language,
        pos: Pos,
        lemma: impl Into<String>,
        stems: &[&str],
        class: Option<&str>,
    ) -> Self {
        LexicalEntry {
            id: EntryId::NEW,
            language,
            pos,
            lemma: lemma.into(),
            stems: stems.iter().map(|s| s.to_string()).collect(),
            inflection_class: class.map(str::to_string),
            gender: None,
            regularity: None,
            defectiveness: Defectiveness::None,
            domains: BTreeSet::new(),
            overrides: BTreeMap::new(),
            required_cases: Vec::new(),
        }
    }

    pub fn class_key(&self) -> Option<ClassKey> {
        self.inflection_class
            .as_ref()
            .map(|c| ClassKey::new(self.language, self.pos, c.clone()))
    }

    /// NFC-normalizes every stored string.
    pub fn normalize(&mut self) {
        let nfc = |s: &mut String| {
            if !is_nfc(s) {
                *s = s.nfc().collect();
            }
        };
        nfc(&mut self.lemma);
        self.stems.iter_mut().for_each(nfc);
        for surface in self.overrides.values_mut() {
            nfc(surface);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DomainTag {
    pub id: DomainId,
    pub name: String,
}

/// Translation direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "en-lt")]
    EnLt,
    #[serde(rename = "lt-en")]
    LtEn,
}

text_enum!(Direction { EnLt => "en-lt", LtEn => "lt-en" });

impl Direction {
    pub fn source(self) -> Language {
        match self {
            Direction::EnLt => Language::En,
            Direction::LtEn => Language::Lt,
        }
    }

    pub fn target(self) -> Language {
        self.source().other()
    }

    pub fn from_source(language: Language) -> Direction {
        match language {
            Language::En => Direction::EnLt,
            Language::Lt => Direction::LtEn,
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::EnLt => Direction::LtEn,
            Direction::LtEn => Direction::EnLt,
        }
    }
}

/// A prioritized translation pair. Rank 1 is the highest priority.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TranslationLink {
    pub id: LinkId,
    pub en_entry: EntryId,
    pub lt_entry: EntryId,
    pub rank_en_lt: u32,
    pub rank_lt_en: u32,
    #[serde(default)]
    pub domain: Option<DomainId>,
    #[serde(default)]
    pub note: Option<String>,
}

impl TranslationLink {
    /// The entry on the source side of `direction`.
    pub fn source(&self, direction: Direction) -> EntryId {
        match direction {
            Direction::EnLt => self.en_entry,
            Direction::LtEn => self.lt_entry,
        }
    }

    pub fn target(&self, direction: Direction) -> EntryId {
        self.source(direction.opposite())
    }

    pub fn rank(&self, direction: Direction) -> u32 {
        match direction {
            Direction::EnLt => self.rank_en_lt,
            Direction::LtEn => self.rank_lt_en,
        }
    }

    pub fn set_rank(&mut self, direction: Direction, rank: u32) {
        match direction {
            Direction::EnLt => self.rank_en_lt = rank,
            Direction::LtEn => self.rank_lt_en = rank,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    EmptyLemma,
    EmptyStem,
    NotNfc,
    StemCount,
    MissingStem,
    MissingClass,
    UnknownClass,
    ClassOnNonInflecting,
    DomainsOnNonNoun,
    CasesOnNonPreposition,
    GenderOnWrongPos,
    RegularityOnNonVerb,
    UnlicensedFeature,
    OverrideWithoutSlot,
    OverrideSuppressed,
    EmptyOverride,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        use ViolationCode::*;
        match self {
            EmptyLemma => "EMPTY_LEMMA",
            EmptyStem => "EMPTY_STEM",
            NotNfc => "NOT_NFC",
            StemCount => "STEM_COUNT",
            MissingStem => "MISSING_STEM",
            MissingClass => "MISSING_CLASS",
            UnknownClass => "UNKNOWN_CLASS",
            ClassOnNonInflecting => "CLASS_ON_NON_INFLECTING",
            DomainsOnNonNoun => "DOMAINS_ON_NON_NOUN",
            CasesOnNonPreposition => "CASES_ON_NON_PREPOSITION",
            GenderOnWrongPos => "GENDER_ON_WRONG_POS",
            RegularityOnNonVerb => "REGULARITY_ON_NON_VERB",
            UnlicensedFeature => "UNLICENSED_FEATURE",
            OverrideWithoutSlot => "OVERRIDE_WITHOUT_SLOT",
            OverrideSuppressed => "OVERRIDE_SUPPRESSED",
            EmptyOverride => "EMPTY_OVERRIDE",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    /// Path of the offending field, e.g. `stems[1]` or `overrides.tense=FUT`.
    pub field: String,
    pub message: String,
}

/// Outcome of [`validate_entry`]; accepted iff there are no violations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }

    fn push(&mut self, code: ViolationCode, field: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { code, field: field.into(), message: message.into() });
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} at {}: {}", v.code, v.field, v.message)?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of `entry` against `registry`. The id is
/// not inspected, so unsaved drafts validate the same way as stored entries.
pub fn validate_entry(entry: &LexicalEntry, registry: &ParadigmRegistry) -> Verdict {
    use ViolationCode::*;
    let mut v = Verdict::default();

    if entry.lemma.is_empty() {
        v.push(EmptyLemma, "lemma", "lemma must not be empty");
    } else if !is_nfc(&entry.lemma) {
        v.push(NotNfc, "lemma", "lemma is not NFC-normalized");
    }
    if entry.stems.is_empty() || entry.stems.len() > 3 {
        v.push(StemCount, "stems", format!("expected 1 to 3 stems, got {}", entry.stems.len()));
    }
    for (i, stem) in entry.stems.iter().enumerate() {
        if stem.is_empty() {
            v.push(EmptyStem, format!("stems[{i}]"), "stem must not be empty");
        } else if !is_nfc(stem) {
            v.push(NotNfc, format!("stems[{i}]"), "stem is not NFC-normalized");
        }
    }
    if !entry.domains.is_empty() && entry.pos != Pos::Noun {
        v.push(DomainsOnNonNoun, "domains", "domain tags are allowed on nouns only");
    }
    if !entry.required_cases.is_empty() && entry.pos != Pos::Preposition {
        v.push(CasesOnNonPreposition, "required_cases", "required cases are allowed on prepositions only");
    }
    if entry.gender.is_some() && !matches!(entry.pos, Pos::Noun | Pos::Adjective | Pos::Pronoun | Pos::Numeral) {
        v.push(GenderOnWrongPos, "gender", format!("{} entries carry no gender", entry.pos));
    }
    if entry.regularity.is_some() && entry.pos != Pos::Verb {
        v.push(RegularityOnNonVerb, "regularity", "regularity applies to verbs only");
    }

    if !entry.pos.is_inflecting() {
        if entry.inflection_class.is_some() {
            v.push(ClassOnNonInflecting, "class", format!("{} entries do not inflect", entry.pos));
        }
        if !entry.overrides.is_empty() {
            v.push(OverrideWithoutSlot, "overrides", "non-inflecting entries have no slots to override");
        }
        return v;
    }

    let Some(key) = entry.class_key() else {
        v.push(MissingClass, "class", format!("{} entries need an inflection class", entry.pos));
        return v;
    };
    let Some(spec) = registry.get(&key) else {
        v.push(UnknownClass, "class", format!("unknown inflection class `{key}`"));
        return v;
    };
    let needed = spec.stems_required();
    if entry.stems.len() < needed {
        v.push(
            MissingStem,
            "stems",
            format!("class `{key}` needs {needed} stems, got {}", entry.stems.len()),
        );
    }
    for (features, surface) in &entry.overrides {
        let field = format!("overrides.{features}");
        if let Err(e) = features.check_licensed(entry.pos) {
            v.push(UnlicensedFeature, field, e.to_string());
        } else if spec.slot(features).is_none() {
            v.push(OverrideWithoutSlot, field, format!("no slot `{features}` in `{key}`"));
        } else if entry.defectiveness.suppresses(features) {
            v.push(OverrideSuppressed, field, format!("slot `{features}` is suppressed by {}", entry.defectiveness));
        } else if surface.is_empty() {
            v.push(EmptyOverride, field, "override surface must not be empty");
        }
    }
    v
}
