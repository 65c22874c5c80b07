//! Paradigm generation from declarative paradigm specs.

mod registry;
mod rule;
mod spec;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureBundle;
use crate::lexicon::{Defectiveness, LexicalEntry};

pub use registry::{load_paradigm_dir, load_paradigm_specs, ParadigmRegistry, SpecSource};
pub use rule::{apply_stem_rule, RewriteStep, RuleSyntaxError, StemRule};
pub use spec::{ClassKey, ParadigmSpec, Slot, StemSelector};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("duplicate paradigm `{key}` in {file} (first defined in {first})")]
    DuplicateSpec {
        key: ClassKey,
        file: String,
        first: String,
    },
    #[error("{file}:{line}: duplicate slot `{features}` in paradigm `{key}`")]
    DuplicateSlot {
        key: ClassKey,
        features: FeatureBundle,
        file: String,
        line: usize,
    },
    #[error("duplicate stem rule `{id}` in {file}")]
    DuplicateRule { id: String, file: String },
    #[error("{file}:{line}: paradigm `{key}` references unknown stem rule `{rule}`")]
    UnknownRule {
        key: ClassKey,
        rule: String,
        file: String,
        line: usize,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("unknown inflection class `{0}`")]
    UnknownClass(ClassKey),
    #[error("{0} entry has no inflection class")]
    MissingClass(crate::features::Pos),
    #[error("override `{0}` matches no slot of the paradigm")]
    OverrideWithoutSlot(FeatureBundle),
    #[error("paradigm needs the {selector} stem but the entry has {available} stem(s)")]
    MissingStem { selector: &'static str, available: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Origin {
    Generated,
    Override,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Generated => "GENERATED",
            Origin::Override => "OVERRIDE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratedForm {
    pub features: FeatureBundle,
    pub surface: String,
    pub origin: Origin,
}

impl Defectiveness {
    /// Whether a slot with these features is dropped from the paradigm.
    pub fn suppresses(self, features: &FeatureBundle) -> bool {
        use crate::features::Number;
        match self {
            Defectiveness::None => false,
            Defectiveness::SingularOnly => features.number == Some(Number::Pl),
            Defectiveness::PluralOnly => features.number == Some(Number::Sg),
        }
    }
}

fn resolve<'r>(
    entry: &LexicalEntry,
    registry: &'r ParadigmRegistry,
) -> Result<Option<&'r ParadigmSpec>, GenerateError> {
    if !entry.pos.is_inflecting() {
        return Ok(None);
    }
    let class = entry
        .inflection_class
        .as_deref()
        .ok_or(GenerateError::MissingClass(entry.pos))?;
    let key = ClassKey::new(entry.language, entry.pos, class);
    registry
        .get(&key)
        .map(Some)
        .ok_or(GenerateError::UnknownClass(key))
}

fn realize(
    entry: &LexicalEntry,
    slot: &Slot,
    registry: &ParadigmRegistry,
) -> Result<GeneratedForm, GenerateError> {
    if let Some(surface) = entry.overrides.get(&slot.features) {
        return Ok(GeneratedForm {
            features: slot.features,
            surface: surface.clone(),
            origin: Origin::Override,
        });
    }
    let stem = entry
        .stems
        .get(slot.stem_selector.index())
        .ok_or(GenerateError::MissingStem {
            selector: slot.stem_selector.as_str(),
            available: entry.stems.len(),
        })?;
    let mut surface = match slot.stem_rule.as_deref().and_then(|id| registry.rule(id)) {
        Some(rule) => rule.apply(stem),
        None => stem.clone(),
    };
    surface.push_str(&slot.ending);
    Ok(GeneratedForm {
        features: slot.features,
        surface,
        origin: Origin::Generated,
    })
}

/// The single form of a non-inflecting entry: its primary stem, no features.
fn invariant_form(entry: &LexicalEntry) -> GeneratedForm {
    GeneratedForm {
        features: FeatureBundle::new(),
        surface: entry.stems.first().unwrap_or(&entry.lemma).clone(),
        origin: Origin::Generated,
    }
}

/// Generates every non-suppressed form of `entry`, in slot order.
pub fn generate_paradigm(
    entry: &LexicalEntry,
    registry: &ParadigmRegistry,
) -> Result<Vec<GeneratedForm>, GenerateError> {
    let Some(spec) = resolve(entry, registry)? else {
        return Ok(vec![invariant_form(entry)]);
    };
    if let Some(orphan) = entry.overrides.keys().find(|f| spec.slot(f).is_none()) {
        return Err(GenerateError::OverrideWithoutSlot(*orphan));
    }
    spec.slots
        .iter()
        .filter(|slot| !entry.defectiveness.suppresses(&slot.features))
        .map(|slot| realize(entry, slot, registry))
        .collect()
}

/// The form of `entry` carrying exactly `features`, if that slot exists and
/// is not suppressed.
pub fn inflect(
    entry: &LexicalEntry,
    features: &FeatureBundle,
    registry: &ParadigmRegistry,
) -> Result<Option<GeneratedForm>, GenerateError> {
    let Some(spec) = resolve(entry, registry)? else {
        return Ok(features.is_empty().then(|| invariant_form(entry)));
    };
    if let Some(orphan) = entry.overrides.keys().find(|f| spec.slot(f).is_none()) {
        return Err(GenerateError::OverrideWithoutSlot(*orphan));
    }
    match spec.slot(features) {
        Some(slot) if !entry.defectiveness.suppresses(&slot.features) => {
            realize(entry, slot, registry).map(Some)
        }
        _ => Ok(None),
    }
}
