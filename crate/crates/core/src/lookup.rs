//! Translation, analysis and prefix queries over a store snapshot.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::features::{FeatureBundle, Language};
use crate::lexicon::{Direction, DomainId, EntryId, LinkId};
use crate::storage::{fold, Snapshot};

/// How the query string matched its source entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MatchedAs {
    Lemma,
    Inflected { features: FeatureBundle },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationCandidate {
    pub target_entry: EntryId,
    pub target_lemma: String,
    pub rank: u32,
    pub domain: Option<DomainId>,
    pub via_link: LinkId,
    pub source_entry: EntryId,
    pub matched_as: MatchedAs,
}

/// Source entries matching `query`: lemma hits first; inflected forms only
/// when no lemma matches.
fn resolve_source(snapshot: &Snapshot, query: &str, language: Language) -> Vec<(EntryId, MatchedAs)> {
    let lemma_hits = snapshot.entries_with_lemma(language, query);
    if !lemma_hits.is_empty() {
        return lemma_hits.into_iter().map(|id| (id, MatchedAs::Lemma)).collect();
    }
    // Smallest bundle per entry in canonical order.
    let mut by_entry: BTreeMap<EntryId, FeatureBundle> = BTreeMap::new();
    for p in snapshot.postings(language, query) {
        by_entry
            .entry(p.entry)
            .and_modify(|f| *f = (*f).min(p.features))
            .or_insert(p.features);
    }
    by_entry
        .into_iter()
        .map(|(id, features)| (id, MatchedAs::Inflected { features }))
        .collect()
}

/// Linked translations of `query`, ordered by: domain match first (when a
/// domain is given), then rank, then target lemma, then link id.
pub fn translate(
    snapshot: &Snapshot,
    query: &str,
    direction: Direction,
    domain: Option<DomainId>,
    limit: Option<usize>,
) -> Vec<TranslationCandidate> {
    let mut out: Vec<TranslationCandidate> = Vec::new();
    for (source, matched_as) in resolve_source(snapshot, query, direction.source()) {
        for link in snapshot.links_of(source) {
            let target = link.target(direction);
            let Some(target_entry) = snapshot.entry(target) else {
                continue;
            };
            out.push(TranslationCandidate {
                target_entry: target,
                target_lemma: target_entry.lemma.clone(),
                rank: link.rank(direction),
                domain: link.domain,
                via_link: link.id,
                source_entry: source,
                matched_as,
            });
        }
    }
    out.sort_by(|a, b| {
        let off_domain = |c: &TranslationCandidate| domain.is_some() && c.domain != domain;
        (off_domain(a), a.rank, &a.target_lemma, a.via_link).cmp(&(
            off_domain(b),
            b.rank,
            &b.target_lemma,
            b.via_link,
        ))
    });
    if let Some(limit) = limit {
        out.truncate(limit);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub entry: EntryId,
    pub lemma: String,
    pub features: FeatureBundle,
}

/// Every (entry, features) the surface realizes, ordered by lemma, then
/// feature bundle, then entry id.
pub fn analyze(snapshot: &Snapshot, surface: &str, language: Language) -> Vec<Analysis> {
    let mut out: Vec<Analysis> = snapshot
        .postings(language, surface)
        .iter()
        .filter_map(|p| {
            snapshot.entry(p.entry).map(|e| Analysis {
                entry: p.entry,
                lemma: e.lemma.clone(),
                features: p.features,
            })
        })
        .collect();
    out.sort_by(|a, b| (&a.lemma, a.features, a.entry).cmp(&(&b.lemma, b.features, b.entry)));
    out
}

/// Distinct lemmas starting with `prefix` (case-folded), in folded
/// lexicographic order.
pub fn prefix_search(snapshot: &Snapshot, prefix: &str, language: Language, limit: usize) -> Vec<String> {
    let key = fold(prefix);
    snapshot
        .lemma_range(language, &key)
        .take_while(|(k, _)| k.starts_with(&key))
        .filter_map(|(_, ids)| ids.iter().next().and_then(|id| snapshot.entry(*id)))
        .map(|e| e.lemma.clone())
        .take(limit)
        .collect()
}

fn entry_signature(snapshot: &Snapshot, e: &crate::lexicon::LexicalEntry) -> String {
    let domains: Vec<&str> = e
        .domains
        .iter()
        .filter_map(|d| snapshot.domain(*d).map(|t| t.name.as_str()))
        .collect();
    let overrides: Vec<String> = e.overrides.iter().map(|(f, s)| format!("{f}:{s}")).collect();
    let cases: Vec<&str> = e.required_cases.iter().map(|c| c.as_str()).collect();
    format!(
        "{} {} {} [{}] {} {:?} {:?} {} [{}] [{}] [{}]",
        e.language,
        e.pos,
        e.lemma,
        e.inflection_class.as_deref().unwrap_or("-"),
        e.stems.join("|"),
        e.gender,
        e.regularity,
        e.defectiveness,
        domains.join(","),
        overrides.join(";"),
        cases.join(",")
    )
}

/// An id-independent, sorted rendering of everything the query operations
/// can observe: entries, domains, every analysis of every indexed surface and
/// the ordered translations of every lemma in its direction. Two snapshots
/// with equal surfaces answer every query the same way up to id renaming.
pub fn query_surface(snapshot: &Snapshot) -> Vec<String> {
    let mut lines = Vec::new();
    for d in snapshot.domains() {
        lines.push(format!("domain {}", d.name));
    }
    let mut lemmas = std::collections::BTreeSet::new();
    for e in snapshot.entries() {
        lines.push(format!("entry {}", entry_signature(snapshot, e)));
        lemmas.insert((e.language, e.lemma.clone()));
    }
    for language in [Language::En, Language::Lt] {
        for surface in snapshot.surfaces(language) {
            for a in analyze(snapshot, surface, language) {
                let e = snapshot.entry(a.entry).expect("indexed entry exists");
                lines.push(format!("form {language} {surface} {} {}", a.features, entry_signature(snapshot, e)));
            }
        }
    }
    for (language, lemma) in lemmas {
        let direction = Direction::from_source(language);
        let targets: Vec<String> = translate(snapshot, &lemma, direction, None, None)
            .iter()
            .map(|c| {
                let target = snapshot.entry(c.target_entry).expect("linked entry exists");
                let domain = c.domain.and_then(|d| snapshot.domain(d)).map(|d| d.name.as_str());
                let note = snapshot.link(c.via_link).and_then(|l| l.note.as_deref());
                format!(
                    "{} #{} @{} ({}) <{}>",
                    entry_signature(snapshot, target),
                    c.rank,
                    domain.unwrap_or("-"),
                    note.unwrap_or(""),
                    entry_signature(snapshot, snapshot.entry(c.source_entry).expect("source exists"))
                )
            })
            .collect();
        lines.push(format!("translate {direction} {lemma} => {}", targets.join(" | ")));
    }
    lines.sort();
    lines
}
