#![allow(dead_code)]

pub mod checks;

use std::collections::BTreeMap;
use std::path::Path;

use lexibase::lexicon::{Defectiveness, Regularity};
use lexibase::{FeatureBundle, Gender, Language, LexicalEntry, Pos};

pub struct GoldCase {
    pub file: String,
    pub line: usize,
    pub entry: LexicalEntry,
    pub full: bool,
    pub rows: Vec<(FeatureBundle, String)>,
}

fn parse_file(name: &str, text: &str) -> Vec<GoldCase> {
    let mut cases: Vec<GoldCase> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("entry ") {
            let words: Vec<&str> = rest.split(' ').collect();
            let language: Language = words[0].parse().unwrap();
            let pos: Pos = words[1].parse().unwrap();
            let stems: Vec<&str> = words[4].split(',').collect();
            let mut entry = LexicalEntry::new(language, pos, words[3], &stems, Some(words[2]));
            let mut full = None;
            for w in &words[5..] {
                match *w {
                    "full" => full = Some(true),
                    "partial" => full = Some(false),
                    _ => {
                        let (k, v) = w.split_once('=').unwrap_or_else(|| panic!("{name}:{}: {w}", i + 1));
                        match k {
                            "gender" => entry.gender = Some(v.parse::<Gender>().unwrap()),
                            "defective" => entry.defectiveness = v.parse::<Defectiveness>().unwrap(),
                            "regularity" => entry.regularity = Some(v.parse::<Regularity>().unwrap()),
                            "override" => {
                                let (f, s) = v.rsplit_once(':').unwrap();
                                entry.overrides.insert(f.parse().unwrap(), s.to_string());
                            }
                            other => panic!("{name}:{}: unknown attribute {other}", i + 1),
                        }
                    }
                }
            }
            cases.push(GoldCase {
                file: name.to_string(),
                line: i + 1,
                entry,
                full: full.unwrap_or_else(|| panic!("{name}:{}: full or partial missing", i + 1)),
                rows: Vec::new(),
            });
        } else {
            let (f, s) = line.split_once('\t').unwrap_or_else(|| panic!("{name}:{}: bad row", i + 1));
            let features: FeatureBundle = f.parse().unwrap_or_else(|e| panic!("{name}:{}: {e}", i + 1));
            cases.last_mut().expect("row before entry").rows.push((features, s.to_string()));
        }
    }
    cases
}

pub fn gold_cases() -> Vec<GoldCase> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/gold");
    let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
        .iter()
        .filter(|p| p.extension().is_some_and(|e| e == "gold"))
        .flat_map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            parse_file(&name, &std::fs::read_to_string(p).unwrap())
        })
        .collect()
}

/// Mismatches between a generated paradigm and a gold case, one per line.
pub fn check_case(case: &GoldCase, registry: &lexibase::ParadigmRegistry) -> Vec<String> {
    let label = format!("{}:{} {}", case.file, case.line, case.entry.lemma);
    let forms = match lexibase::generate_paradigm(&case.entry, registry) {
        Ok(f) => f,
        Err(e) => return vec![format!("{label}: {e}")],
    };
    let generated: BTreeMap<FeatureBundle, &str> =
        forms.iter().map(|f| (f.features, f.surface.as_str())).collect();
    let mut problems = Vec::new();
    for (features, want) in &case.rows {
        match generated.get(features) {
            Some(got) if got == want => {}
            Some(got) => problems.push(format!("{label} {features}: expected {want}, got {got}")),
            None => problems.push(format!("{label} {features}: slot missing (expected {want})")),
        }
    }
    if case.full && forms.len() != case.rows.len() {
        problems.push(format!("{label}: {} forms generated, gold lists {}", forms.len(), case.rows.len()));
    }
    problems
}

pub fn noun(language: Language, lemma: &str, stem: &str, class: &str) -> LexicalEntry {
    LexicalEntry::new(language, Pos::Noun, lemma, &[stem], Some(class))
}

pub struct Fixture {
    pub store: lexibase::LexiconStore,
    pub spring: lexibase::EntryId,
    pub pavasaris: lexibase::EntryId,
    pub saltinis: lexibase::EntryId,
    pub spyruokle: lexibase::EntryId,
    pub man: lexibase::EntryId,
    pub vyras: lexibase::EntryId,
    pub mechanics: lexibase::DomainId,
}

/// spring -> pavasaris (1), šaltinis (2, geography), spyruoklė (3, mechanics);
/// man -> vyras.
pub fn fixture(path: Option<&Path>) -> Fixture {
    use std::sync::Arc;
    let registry = Arc::new(lexibase::ParadigmRegistry::shipped());
    let store = match path {
        Some(p) => lexibase::LexiconStore::open(
            p,
            lexibase::OpenOptions { create: true, registry: Some(registry) },
        )
        .unwrap(),
        None => lexibase::LexiconStore::in_memory(registry),
    };
    let ids = store
        .write(|tx| {
            let geography = tx.add_domain("geography")?.id;
            let mechanics = tx.add_domain("mechanics")?.id;
            let spring = tx.upsert_entry(noun(Language::En, "spring", "spring", "n-reg"))?;
            let mut p = noun(Language::Lt, "pavasaris", "pavasar", "d1is");
            p.gender = Some(Gender::M);
            let pavasaris = tx.upsert_entry(p)?;
            let mut s = noun(Language::Lt, "šaltinis", "šaltin", "d1is");
            s.gender = Some(Gender::M);
            s.domains.insert(geography);
            let saltinis = tx.upsert_entry(s)?;
            let mut s = noun(Language::Lt, "spyruoklė", "spyruokl", "d2e");
            s.gender = Some(Gender::F);
            s.domains.insert(mechanics);
            let spyruokle = tx.upsert_entry(s)?;
            let mut m = noun(Language::En, "man", "man", "n-reg");
            m.overrides.insert("NOM,PL".parse().unwrap(), "men".into());
            m.overrides.insert("GEN,PL".parse().unwrap(), "men's".into());
            let man = tx.upsert_entry(m)?;
            let mut v = noun(Language::Lt, "vyras", "vyr", "d1");
            v.gender = Some(Gender::M);
            let vyras = tx.upsert_entry(v)?;
            tx.add_link(spring, pavasaris, None, None)?;
            tx.add_link(spring, saltinis, Some(geography), None)?;
            tx.add_link(spring, spyruokle, Some(mechanics), Some("coil".into()))?;
            tx.add_link(man, vyras, None, None)?;
            Ok((spring, pavasaris, saltinis, spyruokle, man, vyras, mechanics))
        })
        .unwrap();
    let (spring, pavasaris, saltinis, spyruokle, man, vyras, mechanics) = ids;
    Fixture { store, spring, pavasaris, saltinis, spyruokle, man, vyras, mechanics }
}

/// A random but valid store built through the public write API: entries of
/// every shipped class (some defective, some with overrides and domains),
/// links with domains and notes, then random reorders and deletions.
pub fn random_store(seed: u64, entries: usize, links: usize) -> lexibase::LexiconStore {
    use rand::seq::IndexedRandom;
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    let registry = Arc::new(lexibase::ParadigmRegistry::shipped());
    let specs: Vec<_> = registry.specs().cloned().collect();
    let store = lexibase::LexiconStore::in_memory(Arc::clone(&registry));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    const STEMS: &[&str] = &["vyr", "rank", "ak", "kel", "med", "šird", "žod", "spring", "box", "walk", "stop", "sūn"];
    const NOTES: &[&str] = &["", "coil", "tab\there", "line\nbreak", "back\\slash", "pipe|semi;"];
    store
        .write(|tx| {
            let domains: Vec<_> = ["law", "medicine", "mechanics"]
                .iter()
                .take(rng.random_range(0..=3))
                .map(|d| tx.add_domain(d).unwrap().id)
                .collect();
            let mut ids = Vec::new();
            for _ in 0..entries {
                let spec = specs.choose(&mut rng).unwrap();
                let stems: Vec<&str> = (0..3).map(|_| *STEMS.choose(&mut rng).unwrap()).collect();
                let mut e = LexicalEntry::new(spec.key.language, spec.key.pos, "", &stems, Some(&spec.key.class));
                if spec.key.pos == Pos::Noun {
                    e.defectiveness = *[Defectiveness::None, Defectiveness::None, Defectiveness::SingularOnly, Defectiveness::PluralOnly]
                        .choose(&mut rng)
                        .unwrap();
                    if let Some(d) = domains.choose(&mut rng) {
                        e.domains.insert(*d);
                    }
                }
                let forms = lexibase::generate_paradigm(&e, &registry).unwrap();
                e.lemma = forms[0].surface.clone();
                if rng.random_bool(0.3) {
                    let slot = forms.choose(&mut rng).unwrap();
                    if !slot.features.is_empty() {
                        e.overrides.insert(slot.features, format!("{}x", slot.surface));
                    }
                }
                ids.push((tx.upsert_entry(e)?, spec.key.language));
            }
            let en: Vec<_> = ids.iter().filter(|(_, l)| *l == Language::En).map(|(i, _)| *i).collect();
            let lt: Vec<_> = ids.iter().filter(|(_, l)| *l == Language::Lt).map(|(i, _)| *i).collect();
            if !en.is_empty() && !lt.is_empty() {
                for _ in 0..links {
                    let a = *en.choose(&mut rng).unwrap();
                    let b = *lt.choose(&mut rng).unwrap();
                    let d = if rng.random_bool(0.3) { domains.choose(&mut rng).copied() } else { None };
                    let note = NOTES.choose(&mut rng).filter(|n| !n.is_empty()).map(|n| n.to_string());
                    match tx.add_link(a, b, d, note) {
                        Ok(_) | Err(lexibase::StoreError::DuplicateLink { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
                for &source in en.iter().chain(&lt).take(entries / 4) {
                    let direction = if en.contains(&source) { lexibase::Direction::EnLt } else { lexibase::Direction::LtEn };
                    let mut order: Vec<_> = tx.snapshot().links_of(source).iter().map(|l| l.id).collect();
                    order.reverse();
                    tx.reorder(source, direction, &order)?;
                }
                let doomed: Vec<_> = tx.snapshot().links().map(|l| l.id).filter(|_| rng.random_bool(0.1)).collect();
                for id in doomed {
                    tx.delete_link(id)?;
                }
            }
            if let Some((victim, _)) = ids.choose(&mut rng) {
                if rng.random_bool(0.5) {
                    tx.delete_entry(*victim, true)?;
                }
            }
            Ok(())
        })
        .unwrap();
    store
}
