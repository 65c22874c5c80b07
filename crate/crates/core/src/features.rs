//! Morphosyntactic features and feature bundles.
//!
//! A [`FeatureBundle`] assigns at most one value to each [`Feature`]. Bundles
//! compare order-free; their textual form is canonical (`key=value` pairs in
//! [`Feature::ALL`] order), and the parser also accepts bare values such as
//! `GEN,SG` since every value name is unique across features.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("unknown value `{value}` for feature `{feature}`")]
    UnknownValue { feature: String, value: String },
    #[error("unknown feature value `{0}`")]
    UnknownBareValue(String),
    #[error("feature `{0}` assigned twice")]
    Duplicate(Feature),
    #[error("feature `{feature}` is not licensed for {pos}")]
    Unlicensed { feature: Feature, pos: Pos },
}

macro_rules! value_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            fn from_text(s: &str) -> Option<Self> {
                match s {
                    $($text => Some($name::$variant),)+
                    _ => None,
                }
            }

            pub fn index(self) -> u8 {
                self as u8
            }

            pub fn from_index(i: u8) -> Option<Self> {
                Self::ALL.get(i as usize).copied()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = FeatureError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::from_text(s).ok_or_else(|| FeatureError::UnknownValue {
                    feature: stringify!($name).to_lowercase(),
                    value: s.to_string(),
                })
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

value_enum!(
    /// Grammatical case. Seven cases: the six of school grammar plus vocative.
    Case {
        Nom => "NOM", Gen => "GEN", Dat => "DAT", Acc => "ACC",
        Ins => "INS", Loc => "LOC", Voc => "VOC",
    }
);
value_enum!(Number { Sg => "SG", Pl => "PL" });
value_enum!(Gender { M => "M", F => "F", N => "N" });
value_enum!(Degree { Pos => "POS", Cmp => "CMP", Sup => "SUP" });
value_enum!(Definiteness { Simple => "simple", Pronominal => "pronominal" });
value_enum!(Tense { Pres => "PRES", Past => "PAST", PastFreq => "PAST_FREQ", Fut => "FUT" });
value_enum!(Mood { Ind => "IND", Sbjv => "SBJV", Imp => "IMP" });
value_enum!(Person { First => "1", Second => "2", Third => "3" });
value_enum!(VerbForm { Finite => "FINITE", Inf => "INF", Participle => "PARTICIPLE" });
value_enum!(Voice { Act => "ACT", Pass => "PASS" });

value_enum!(
    /// Lexicon language.
    Language { En => "EN", Lt => "LT" }
);

impl Language {
    pub fn other(self) -> Language {
        match self {
            Language::En => Language::Lt,
            Language::Lt => Language::En,
        }
    }
}

value_enum!(
    /// Part of speech.
    Pos {
        Noun => "noun", Verb => "verb", Adjective => "adjective", Pronoun => "pronoun",
        Numeral => "numeral", Adverb => "adverb", Preposition => "preposition",
        Conjunction => "conjunction", Particle => "particle", Interjection => "interjection",
    }
);

impl Pos {
    /// Parts of speech that never inflect and therefore carry no inflection class.
    pub fn is_inflecting(self) -> bool {
        !matches!(
            self,
            Pos::Preposition | Pos::Conjunction | Pos::Particle | Pos::Interjection
        )
    }

    pub fn licenses(self, feature: Feature) -> bool {
        use Feature::*;
        match self {
            Pos::Noun => matches!(feature, Case | Number),
            Pos::Adjective => matches!(feature, Case | Number | Gender | Degree | Definiteness),
            Pos::Verb => matches!(
                feature,
                VerbForm | Voice | Mood | Tense | Person | Gender | Case | Number
            ),
            Pos::Pronoun => matches!(feature, Case | Number | Gender | Person),
            Pos::Numeral => matches!(feature, Case | Number | Gender | Definiteness),
            Pos::Adverb => matches!(feature, Degree),
            Pos::Preposition | Pos::Conjunction | Pos::Particle | Pos::Interjection => false,
        }
    }
}

/// Feature names, in canonical serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    VerbForm,
    Voice,
    Mood,
    Tense,
    Person,
    Gender,
    Degree,
    Definiteness,
    Case,
    Number,
}

impl Feature {
    pub const ALL: [Feature; 10] = [
        Feature::VerbForm,
        Feature::Voice,
        Feature::Mood,
        Feature::Tense,
        Feature::Person,
        Feature::Gender,
        Feature::Degree,
        Feature::Definiteness,
        Feature::Case,
        Feature::Number,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Feature::VerbForm => "vform",
            Feature::Voice => "voice",
            Feature::Mood => "mood",
            Feature::Tense => "tense",
            Feature::Person => "person",
            Feature::Gender => "gender",
            Feature::Degree => "degree",
            Feature::Definiteness => "definiteness",
            Feature::Case => "case",
            Feature::Number => "number",
        }
    }

    fn from_key(s: &str) -> Option<Feature> {
        Feature::ALL.into_iter().find(|f| f.key() == s)
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// A set of feature assignments, at most one value per feature.
///
/// Field order matches [`Feature::ALL`], so the derived `Ord` is the canonical
/// ordering used when sorting analyses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureBundle {
    pub vform: Option<VerbForm>,
    pub voice: Option<Voice>,
    pub mood: Option<Mood>,
    pub tense: Option<Tense>,
    pub person: Option<Person>,
    pub gender: Option<Gender>,
    pub degree: Option<Degree>,
    pub definiteness: Option<Definiteness>,
    pub case: Option<Case>,
    pub number: Option<Number>,
}

impl FeatureBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.features().next().is_none()
    }

    /// Features assigned in this bundle, in canonical order.
    pub fn features(&self) -> impl Iterator<Item = Feature> + '_ {
        Feature::ALL.into_iter().filter(|f| self.value_str(*f).is_some())
    }

    pub fn value_str(&self, feature: Feature) -> Option<&'static str> {
        match feature {
            Feature::VerbForm => self.vform.map(VerbForm::as_str),
            Feature::Voice => self.voice.map(Voice::as_str),
            Feature::Mood => self.mood.map(Mood::as_str),
            Feature::Tense => self.tense.map(Tense::as_str),
            Feature::Person => self.person.map(Person::as_str),
            Feature::Gender => self.gender.map(Gender::as_str),
            Feature::Degree => self.degree.map(Degree::as_str),
            Feature::Definiteness => self.definiteness.map(Definiteness::as_str),
            Feature::Case => self.case.map(Case::as_str),
            Feature::Number => self.number.map(Number::as_str),
        }
    }

    /// Assigns `value` to `feature`, rejecting a second assignment.
    pub fn set(&mut self, feature: Feature, value: &str) -> Result<(), FeatureError> {
        if self.value_str(feature).is_some() {
            return Err(FeatureError::Duplicate(feature));
        }
        let bad = || FeatureError::UnknownValue {
            feature: feature.key().to_string(),
            value: value.to_string(),
        };
        match feature {
            Feature::VerbForm => self.vform = Some(VerbForm::from_text(value).ok_or_else(bad)?),
            Feature::Voice => self.voice = Some(Voice::from_text(value).ok_or_else(bad)?),
            Feature::Mood => self.mood = Some(Mood::from_text(value).ok_or_else(bad)?),
            Feature::Tense => self.tense = Some(Tense::from_text(value).ok_or_else(bad)?),
            Feature::Person => self.person = Some(Person::from_text(value).ok_or_else(bad)?),
            Feature::Gender => self.gender = Some(Gender::from_text(value).ok_or_else(bad)?),
            Feature::Degree => self.degree = Some(Degree::from_text(value).ok_or_else(bad)?),
            Feature::Definiteness => {
                self.definiteness = Some(Definiteness::from_text(value).ok_or_else(bad)?)
            }
            Feature::Case => self.case = Some(Case::from_text(value).ok_or_else(bad)?),
            Feature::Number => self.number = Some(Number::from_text(value).ok_or_else(bad)?),
        }
        Ok(())
    }

    fn set_bare(&mut self, value: &str) -> Result<(), FeatureError> {
        let feature = if Case::from_text(value).is_some() {
            Feature::Case
        } else if Number::from_text(value).is_some() {
            Feature::Number
        } else if Gender::from_text(value).is_some() {
            Feature::Gender
        } else if Degree::from_text(value).is_some() {
            Feature::Degree
        } else if Definiteness::from_text(value).is_some() {
            Feature::Definiteness
        } else if Tense::from_text(value).is_some() {
            Feature::Tense
        } else if Mood::from_text(value).is_some() {
            Feature::Mood
        } else if Person::from_text(value).is_some() {
            Feature::Person
        } else if VerbForm::from_text(value).is_some() {
            Feature::VerbForm
        } else if Voice::from_text(value).is_some() {
            Feature::Voice
        } else {
            return Err(FeatureError::UnknownBareValue(value.to_string()));
        };
        self.set(feature, value)
    }

    /// Checks that every assigned feature is licensed for `pos`.
    pub fn check_licensed(&self, pos: Pos) -> Result<(), FeatureError> {
        match self.features().find(|f| !pos.licenses(*f)) {
            Some(feature) => Err(FeatureError::Unlicensed { feature, pos }),
            None => Ok(()),
        }
    }

    /// Packs the bundle into 32 bits (3 bits per feature, 0 = unset).
    pub fn pack(&self) -> u32 {
        let slot = |v: Option<u8>| v.map_or(0, |i| i as u32 + 1);
        [
            slot(self.vform.map(VerbForm::index)),
            slot(self.voice.map(Voice::index)),
            slot(self.mood.map(Mood::index)),
            slot(self.tense.map(Tense::index)),
            slot(self.person.map(Person::index)),
            slot(self.gender.map(Gender::index)),
            slot(self.degree.map(Degree::index)),
            slot(self.definiteness.map(Definiteness::index)),
            slot(self.case.map(Case::index)),
            slot(self.number.map(Number::index)),
        ]
        .into_iter()
        .enumerate()
        .fold(0, |acc, (i, v)| acc | (v << (3 * i)))
    }

    pub fn unpack(bits: u32) -> Option<Self> {
        let field = |i: usize| -> Option<u8> {
            let v = (bits >> (3 * i)) & 0b111;
            (v != 0).then(|| v as u8 - 1)
        };
        macro_rules! decode {
            ($ty:ident, $i:expr) => {
                match field($i) {
                    None => None,
                    Some(v) => Some($ty::from_index(v)?),
                }
            };
        }
        Some(FeatureBundle {
            vform: decode!(VerbForm, 0),
            voice: decode!(Voice, 1),
            mood: decode!(Mood, 2),
            tense: decode!(Tense, 3),
            person: decode!(Person, 4),
            gender: decode!(Gender, 5),
            degree: decode!(Degree, 6),
            definiteness: decode!(Definiteness, 7),
            case: decode!(Case, 8),
            number: decode!(Number, 9),
        })
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for feature in self.features() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{}={}", feature.key(), self.value_str(feature).unwrap())?;
        }
        Ok(())
    }
}

impl FromStr for FeatureBundle {
    type Err = FeatureError;

    /// Parses `key=value,...` or bare values (`GEN,SG`); `-` and the empty
    /// string denote the empty bundle. Braces around the list are tolerated.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let s = s
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .unwrap_or(s)
            .trim();
        let mut bundle = FeatureBundle::new();
        if s.is_empty() || s == "-" {
            return Ok(bundle);
        }
        for part in s.split(',').map(str::trim) {
            match part.split_once('=') {
                Some((key, value)) => {
                    let feature = Feature::from_key(key.trim())
                        .ok_or_else(|| FeatureError::UnknownFeature(key.trim().to_string()))?;
                    bundle.set(feature, value.trim())?;
                }
                None => bundle.set_bare(part)?,
            }
        }
        Ok(bundle)
    }
}

impl Serialize for FeatureBundle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FeatureBundle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
