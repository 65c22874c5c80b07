use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::rule::StemRule;
use super::spec::{parse_source, ClassKey, ParadigmSpec};
use super::LoadError;
use crate::features::{Language, Pos};

/// One named text in a spec-file collection.
#[derive(Debug, Clone)]
pub struct SpecSource {
    pub name: String,
    pub text: String,
}

impl SpecSource {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        SpecSource { name: name.into(), text: text.into() }
    }
}

/// Immutable set of paradigm specs and stem rules.
#[derive(Debug, Default, Clone)]
pub struct ParadigmRegistry {
    specs: BTreeMap<ClassKey, Arc<ParadigmSpec>>,
    rules: HashMap<String, StemRule>,
}

macro_rules! shipped {
    ($($file:literal),+ $(,)?) => {
        &[$(($file, include_str!(concat!("../../data/paradigms/", $file)))),+]
    };
}

const SHIPPED: &[(&str, &str)] = shipped!(
    "stem.rules",
    "lt-noun-d1.para",
    "lt-noun-d1is.para",
    "lt-noun-d2.para",
    "lt-noun-d2e.para",
    "lt-noun-d3.para",
    "lt-noun-d4.para",
    "lt-noun-d5.para",
    "lt-adjective-a1.para",
    "lt-adverb-adv1.para",
    "lt-adverb-inv.para",
    "lt-numeral-inv.para",
    "lt-pronoun-inv.para",
    "lt-verb-v1o.para",
    "lt-verb-v1e.para",
    "lt-verb-v2o.para",
    "lt-verb-v3o.para",
    "lt-verb-v3e.para",
    "en-noun-n-reg.para",
    "en-noun-n-es.para",
    "en-noun-n-y.para",
    "en-verb-v-reg.para",
    "en-verb-v-es.para",
    "en-verb-v-double.para",
    "en-verb-v-y.para",
    "en-verb-v-e.para",
    "en-adjective-a-reg.para",
    "en-adjective-a-double.para",
    "en-adjective-a-y.para",
    "en-adjective-a-e.para",
    "en-adverb-inv.para",
    "en-numeral-inv.para",
    "en-pronoun-inv.para",
);

impl ParadigmRegistry {
    /// The paradigm specs bundled with the crate.
    pub fn shipped() -> Self {
        let sources: Vec<SpecSource> = SHIPPED
            .iter()
            .map(|(name, text)| SpecSource::new(*name, *text))
            .collect();
        load_paradigm_specs(&sources).expect("shipped paradigm specs are valid")
    }

    pub fn get(&self, key: &ClassKey) -> Option<&ParadigmSpec> {
        self.specs.get(key).map(Arc::as_ref)
    }

    pub fn rule(&self, id: &str) -> Option<&StemRule> {
        self.rules.get(id)
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn specs(&self) -> impl Iterator<Item = &ParadigmSpec> {
        self.specs.values().map(Arc::as_ref)
    }

    /// Classes available for a language and part of speech.
    pub fn classes(&self, language: Language, pos: Pos) -> impl Iterator<Item = &str> {
        self.specs
            .keys()
            .filter(move |k| k.language == language && k.pos == pos)
            .map(|k| k.class.as_str())
    }

    /// Serializes every rule and spec as one source text, in a fixed order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut ids: Vec<&String> = self.rules.keys().collect();
        ids.sort();
        for id in ids {
            let _ = writeln!(out, "{}", self.rules[id]);
        }
        for spec in self.specs.values() {
            let _ = writeln!(out, "{spec}");
        }
        out
    }
}

/// Builds a registry from a collection of spec and rule sources. Any
/// duplicate spec key, duplicate slot, duplicate rule, or dangling rule
/// reference fails the whole load.
pub fn load_paradigm_specs(sources: &[SpecSource]) -> Result<ParadigmRegistry, LoadError> {
    let mut registry = ParadigmRegistry::default();
    let mut origin: HashMap<ClassKey, String> = HashMap::new();
    let mut pending = Vec::new();

    for source in sources {
        let parsed = parse_source(&source.name, &source.text)?;
        for (rule, _) in parsed.rules {
            if registry.rules.contains_key(&rule.id) {
                return Err(LoadError::DuplicateRule { id: rule.id, file: source.name.clone() });
            }
            registry.rules.insert(rule.id.clone(), rule);
        }
        for (spec, lines) in parsed.specs {
            if let Some(first) = origin.get(&spec.key) {
                return Err(LoadError::DuplicateSpec {
                    key: spec.key,
                    file: source.name.clone(),
                    first: first.clone(),
                });
            }
            let mut seen = HashSet::new();
            for (slot, line) in spec.slots.iter().zip(&lines) {
                if !seen.insert(slot.features) {
                    return Err(LoadError::DuplicateSlot {
                        key: spec.key.clone(),
                        features: slot.features,
                        file: source.name.clone(),
                        line: *line,
                    });
                }
            }
            origin.insert(spec.key.clone(), source.name.clone());
            pending.push((source.name.clone(), spec, lines));
        }
    }

    for (file, spec, lines) in pending {
        for (slot, line) in spec.slots.iter().zip(&lines) {
            if let Some(rule) = &slot.stem_rule {
                if !registry.rules.contains_key(rule) {
                    return Err(LoadError::UnknownRule {
                        key: spec.key.clone(),
                        rule: rule.clone(),
                        file,
                        line: *line,
                    });
                }
            }
        }
        registry.specs.insert(spec.key.clone(), Arc::new(spec));
    }
    Ok(registry)
}

/// Loads every `*.para` and `*.rules` file in `dir` (sorted by name).
pub fn load_paradigm_dir(dir: &Path) -> Result<ParadigmRegistry, LoadError> {
    let io = |source| LoadError::Io { path: dir.display().to_string(), source };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("para" | "rules")))
        .collect();
    paths.sort();
    let sources = paths
        .iter()
        .map(|p| {
            std::fs::read_to_string(p)
                .map(|text| SpecSource::new(p.display().to_string(), text))
                .map_err(|source| LoadError::Io { path: p.display().to_string(), source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    load_paradigm_specs(&sources)
}
