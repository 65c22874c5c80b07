//! Deterministic synthetic lexicons for load and latency tests.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::features::{Language, Pos};
use crate::lexicon::{EntryId, LexicalEntry, LinkId, TranslationLink};
use crate::morphology::{ClassKey, ParadigmRegistry};
use crate::par;
use crate::storage::{Snapshot, StoreError};

const CONSONANTS: &[&str] = &["b", "d", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "š", "ž"];
const LT_VOWELS: &[&str] = &["a", "e", "i", "o", "u", "y", "ė", "ū"];
const EN_CONSONANTS: &[&str] = &["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w"];
const EN_VOWELS: &[&str] = &["a", "e", "i", "o", "u", "oo", "ea"];

fn stem(rng: &mut ChaCha8Rng, language: Language) -> String {
    let (cons, vowels) = match language {
        Language::Lt => (CONSONANTS, LT_VOWELS),
        Language::En => (EN_CONSONANTS, EN_VOWELS),
    };
    let syllables = rng.random_range(1..=3);
    let mut s = String::new();
    for _ in 0..syllables {
        s.push_str(cons.choose(rng).expect("non-empty"));
        s.push_str(vowels.choose(rng).expect("non-empty"));
    }
    s.push_str(cons.choose(rng).expect("non-empty"));
    s
}

struct Template {
    key: ClassKey,
    size: usize,
    stems: usize,
}

fn templates(registry: &ParadigmRegistry) -> Vec<Template> {
    registry
        .specs()
        .filter(|s| s.slots.len() > 1)
        .map(|s| Template { key: s.key.clone(), size: s.slots.len(), stems: s.stems_required() })
        .collect()
}

fn draw(rng: &mut ChaCha8Rng, t: &Template) -> LexicalEntry {
    let stems: Vec<String> = (0..t.stems.max(1)).map(|_| stem(rng, t.key.language)).collect();
    let stem_refs: Vec<&str> = stems.iter().map(String::as_str).collect();
    LexicalEntry::new(t.key.language, t.key.pos, stems[0].clone(), &stem_refs, Some(&t.key.class))
}

fn particle(rng: &mut ChaCha8Rng) -> LexicalEntry {
    let language = if rng.random_bool(0.5) { Language::En } else { Language::Lt };
    let s = stem(rng, language);
    LexicalEntry::new(language, Pos::Particle, s.clone(), &[&s], None)
}

/// Draws entries from the registry's inflecting classes until the paradigms
/// add up to exactly `forms` postings (topped up with single-form particles),
/// then links every English entry to one to three Lithuanian entries.
/// The same `seed` always yields the same lexicon.
pub fn synthesize(forms: usize, seed: u64, registry: Arc<ParadigmRegistry>) -> Result<Snapshot, StoreError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let templates = templates(&registry);
    let mut entries = Vec::new();
    let mut remaining = forms;
    while remaining > 0 {
        let fitting: Vec<&Template> = templates.iter().filter(|t| t.size <= remaining).collect();
        match fitting.choose(&mut rng) {
            Some(t) => {
                remaining -= t.size;
                entries.push(draw(&mut rng, t));
            }
            None => {
                remaining -= 1;
                entries.push(particle(&mut rng));
            }
        }
    }
    assemble(entries, &mut rng, registry)
}

/// Like [`synthesize`] but with exactly `count` inflecting entries.
pub fn synthesize_entries(count: usize, seed: u64, registry: Arc<ParadigmRegistry>) -> Result<Snapshot, StoreError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let templates = templates(&registry);
    let entries = (0..count)
        .map(|_| {
            let t = templates.choose(&mut rng).expect("registry has inflecting classes");
            draw(&mut rng, t)
        })
        .collect();
    assemble(entries, &mut rng, registry)
}

fn assemble(
    mut entries: Vec<LexicalEntry>,
    rng: &mut ChaCha8Rng,
    registry: Arc<ParadigmRegistry>,
) -> Result<Snapshot, StoreError> {
    for (i, e) in entries.iter_mut().enumerate() {
        e.id = EntryId(i as u64 + 1);
    }
    // Lemma is the first generated form (citation form of every shipped spec).
    let lemmas = par::map(&entries, |e| {
        crate::morphology::generate_paradigm(e, &registry).map(|f| f[0].surface.clone())
    });
    for (e, lemma) in entries.iter_mut().zip(lemmas) {
        e.lemma = lemma?;
    }

    let (en, lt): (Vec<&LexicalEntry>, Vec<&LexicalEntry>) =
        entries.iter().partition(|e| e.language == Language::En);
    let mut links = Vec::new();
    if !lt.is_empty() {
        let mut lt_rank = HashMap::<EntryId, u32>::new();
        for e in &en {
            let mut seen = HashSet::new();
            for _ in 0..rng.random_range(1..=3) {
                let target = lt.choose(rng).expect("non-empty").id;
                if !seen.insert(target) {
                    continue;
                }
                let r = lt_rank.entry(target).or_insert(0);
                *r += 1;
                links.push(TranslationLink {
                    id: LinkId(links.len() as u64 + 1),
                    en_entry: e.id,
                    lt_entry: target,
                    rank_en_lt: seen.len() as u32,
                    rank_lt_en: *r,
                    domain: None,
                    note: None,
                });
            }
        }
    }
    Snapshot::load(registry, Vec::new(), entries, links)
}
