use std::collections::BTreeSet;
use std::sync::Arc;

use imbl::{HashMap, OrdMap, OrdSet};
use unicode_normalization::UnicodeNormalization;

use super::StoreError;
use crate::features::{FeatureBundle, Language};
use crate::lexicon::{
    validate_entry, Direction, DomainId, DomainTag, EntryId, LexicalEntry, LinkId, TranslationLink,
};
use crate::morphology::{generate_paradigm, GeneratedForm, ParadigmRegistry};
use crate::par;

/// Case-folded NFC key used by every index.
pub fn fold(s: &str) -> String {
    s.nfc().flat_map(char::to_lowercase).collect()
}

/// One form-index record: the entry and the slot a surface realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Posting {
    pub entry: EntryId,
    pub features: FeatureBundle,
}

fn lang_index(language: Language) -> usize {
    match language {
        Language::En => 0,
        Language::Lt => 1,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Counters {
    pub next_entry: u64,
    pub next_link: u64,
    pub next_domain: u64,
    pub commits: u64,
}

/// An immutable, internally consistent view of the lexicon.
///
/// All collections are persistent maps, so cloning a snapshot is cheap and a
/// writer can mutate its copy while readers keep using the old one.
#[derive(Debug, Clone)]
pub struct Snapshot {
    registry: Arc<ParadigmRegistry>,
    entries: OrdMap<EntryId, Arc<LexicalEntry>>,
    links: OrdMap<LinkId, TranslationLink>,
    domains: OrdMap<DomainId, DomainTag>,
    domain_names: HashMap<String, DomainId>,
    links_by_entry: HashMap<EntryId, OrdSet<LinkId>>,
    forms: [HashMap<String, Vec<Posting>>; 2],
    lemmas: [OrdMap<String, OrdSet<EntryId>>; 2],
    form_count: usize,
    pub(crate) counters: Counters,
}

/// Summary of a [`Snapshot`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StoreStats {
    pub entries: usize,
    pub links: usize,
    pub domains: usize,
    pub forms: usize,
}

/// Outcome of deleting an entry.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DeletionReport {
    pub entry: EntryId,
    pub removed_links: Vec<LinkId>,
    pub removed_forms: usize,
}

impl Snapshot {
    pub fn empty(registry: Arc<ParadigmRegistry>) -> Self {
        Snapshot {
            registry,
            entries: OrdMap::new(),
            links: OrdMap::new(),
            domains: OrdMap::new(),
            domain_names: HashMap::new(),
            links_by_entry: HashMap::new(),
            forms: [HashMap::new(), HashMap::new()],
            lemmas: [OrdMap::new(), OrdMap::new()],
            form_count: 0,
            counters: Counters { next_entry: 1, next_link: 1, next_domain: 1, commits: 0 },
        }
    }

    pub fn registry(&self) -> &Arc<ParadigmRegistry> {
        &self.registry
    }

    pub fn stats(&self) -> StoreStats {
        StoreStats {
            entries: self.entries.len(),
            links: self.links.len(),
            domains: self.domains.len(),
            forms: self.form_count,
        }
    }

    /// Number of committed write transactions that produced this snapshot.
    pub fn commits(&self) -> u64 {
        self.counters.commits
    }

    pub fn entry(&self, id: EntryId) -> Option<&LexicalEntry> {
        self.entries.get(&id).map(Arc::as_ref)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexicalEntry> {
        self.entries.values().map(Arc::as_ref)
    }

    pub fn link(&self, id: LinkId) -> Option<&TranslationLink> {
        self.links.get(&id)
    }

    pub fn links(&self) -> impl Iterator<Item = &TranslationLink> {
        self.links.values()
    }

    pub fn domain(&self, id: DomainId) -> Option<&DomainTag> {
        self.domains.get(&id)
    }

    pub fn domain_by_name(&self, name: &str) -> Option<&DomainTag> {
        self.domain_names.get(name).and_then(|id| self.domains.get(id))
    }

    pub fn domains(&self) -> impl Iterator<Item = &DomainTag> {
        self.domains.values()
    }

    /// Links whose source side (for the entry's own language) is `entry`,
    /// ordered by rank.
    pub fn links_of(&self, entry: EntryId) -> Vec<&TranslationLink> {
        let Some(e) = self.entry(entry) else {
            return Vec::new();
        };
        let direction = Direction::from_source(e.language);
        let mut links: Vec<&TranslationLink> = self
            .links_by_entry
            .get(&entry)
            .into_iter()
            .flat_map(|ids| ids.iter())
            .filter_map(|id| self.links.get(id))
            .collect();
        links.sort_by_key(|l| (l.rank(direction), l.id));
        links
    }

    pub(crate) fn link_ids_of(&self, entry: EntryId) -> impl Iterator<Item = LinkId> + '_ {
        self.links_by_entry.get(&entry).into_iter().flat_map(|s| s.iter().copied())
    }

    /// Form-index postings for a surface (case-folded match).
    pub fn postings(&self, language: Language, surface: &str) -> &[Posting] {
        self.forms[lang_index(language)]
            .get(&fold(surface))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Entries whose lemma matches `lemma` (case-folded).
    pub fn entries_with_lemma(&self, language: Language, lemma: &str) -> Vec<EntryId> {
        self.lemmas[lang_index(language)]
            .get(&fold(lemma))
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    /// Folded lemma keys at or after `from`, in order, with their entries.
    pub(crate) fn lemma_range<'a>(
        &'a self,
        language: Language,
        from: &'a str,
    ) -> impl Iterator<Item = (&'a String, &'a OrdSet<EntryId>)> + 'a {
        self.lemmas[lang_index(language)].range(from.to_string()..)
    }

    /// Every distinct indexed surface key of a language.
    pub fn surfaces(&self, language: Language) -> impl Iterator<Item = &str> {
        self.forms[lang_index(language)].keys().map(String::as_str)
    }

    pub fn paradigm(&self, entry: &LexicalEntry) -> Result<Vec<GeneratedForm>, StoreError> {
        generate_paradigm(entry, &self.registry).map_err(StoreError::Generate)
    }

    // ---- mutation (only reachable through a transaction) ----

    fn index_forms(&mut self, entry: &LexicalEntry, forms: &[GeneratedForm]) {
        let li = lang_index(entry.language);
        for form in forms {
            let posting = Posting { entry: entry.id, features: form.features };
            let bucket = self.forms[li].entry(fold(&form.surface)).or_default();
            if let Err(at) = bucket.binary_search(&posting) {
                bucket.insert(at, posting);
                self.form_count += 1;
            }
        }
        self.lemmas[li].entry(fold(&entry.lemma)).or_default().insert(entry.id);
    }

    fn unindex(&mut self, entry: &LexicalEntry) -> usize {
        let li = lang_index(entry.language);
        let forms = generate_paradigm(entry, &self.registry).unwrap_or_default();
        let mut removed = 0;
        for form in &forms {
            let key = fold(&form.surface);
            let posting = Posting { entry: entry.id, features: form.features };
            let now_empty = match self.forms[li].get_mut(&key) {
                Some(bucket) => {
                    if let Ok(at) = bucket.binary_search(&posting) {
                        bucket.remove(at);
                        removed += 1;
                    }
                    bucket.is_empty()
                }
                None => false,
            };
            if now_empty {
                self.forms[li].remove(&key);
            }
        }
        self.form_count -= removed;
        let key = fold(&entry.lemma);
        let now_empty = match self.lemmas[li].get_mut(&key) {
            Some(ids) => {
                ids.remove(&entry.id);
                ids.is_empty()
            }
            None => false,
        };
        if now_empty {
            self.lemmas[li].remove(&key);
        }
        removed
    }

    pub(crate) fn upsert_entry(&mut self, mut entry: LexicalEntry) -> Result<EntryId, StoreError> {
        entry.normalize();
        let verdict = validate_entry(&entry, &self.registry);
        if !verdict.is_accepted() {
            return Err(StoreError::Validation(verdict));
        }
        if let Some(missing) = entry.domains.iter().find(|d| !self.domains.contains_key(d)) {
            return Err(StoreError::UnknownDomain(*missing));
        }
        let forms = self.paradigm(&entry)?;
        if entry.id.is_new() {
            entry.id = EntryId(self.counters.next_entry);
        } else if let Some(old) = self.entries.get(&entry.id).cloned() {
            if old.language != entry.language && self.link_ids_of(entry.id).next().is_some() {
                return Err(StoreError::LanguageChangeWithLinks(entry.id));
            }
            self.unindex(&old);
        } else if entry.id.0 < self.counters.next_entry {
            return Err(StoreError::NotFound(format!("entry {}", entry.id)));
        }
        self.counters.next_entry = self.counters.next_entry.max(entry.id.0 + 1);
        self.index_forms(&entry, &forms);
        let id = entry.id;
        self.entries.insert(id, Arc::new(entry));
        Ok(id)
    }

    pub(crate) fn delete_entry(&mut self, id: EntryId, cascade: bool) -> Result<DeletionReport, StoreError> {
        let entry = self
            .entries
            .get(&id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(format!("entry {id}")))?;
        let links: Vec<LinkId> = self.link_ids_of(id).collect();
        if !links.is_empty() && !cascade {
            return Err(StoreError::LinksExist { entry: id, links });
        }
        for link in &links {
            self.delete_link(*link)?;
        }
        let removed_forms = self.unindex(&entry);
        self.entries.remove(&id);
        self.links_by_entry.remove(&id);
        Ok(DeletionReport { entry: id, removed_links: links, removed_forms })
    }

    pub(crate) fn add_domain(&mut self, name: &str) -> Result<DomainTag, StoreError> {
        let name: String = name.trim().nfc().collect();
        if name.is_empty() {
            return Err(StoreError::InvalidDomainName(name));
        }
        if self.domain_names.contains_key(&name) {
            return Err(StoreError::DuplicateDomain(name));
        }
        let tag = DomainTag { id: DomainId(self.counters.next_domain), name };
        self.counters.next_domain += 1;
        self.insert_domain(tag.clone());
        Ok(tag)
    }

    pub(crate) fn insert_domain(&mut self, tag: DomainTag) {
        self.counters.next_domain = self.counters.next_domain.max(tag.id.0 + 1);
        self.domain_names.insert(tag.name.clone(), tag.id);
        self.domains.insert(tag.id, tag);
    }

    pub(crate) fn add_link(
        &mut self,
        en: EntryId,
        lt: EntryId,
        domain: Option<DomainId>,
        note: Option<String>,
    ) -> Result<TranslationLink, StoreError> {
        for (id, want) in [(en, Language::En), (lt, Language::Lt)] {
            let e = self.entry(id).ok_or_else(|| StoreError::NotFound(format!("entry {id}")))?;
            if e.language != want {
                return Err(StoreError::LanguageMismatch { entry: id, expected: want });
            }
        }
        if let Some(d) = domain {
            if !self.domains.contains_key(&d) {
                return Err(StoreError::UnknownDomain(d));
            }
        }
        let duplicate = self
            .link_ids_of(en)
            .filter_map(|l| self.links.get(&l))
            .any(|l| l.lt_entry == lt && l.domain == domain);
        if duplicate {
            return Err(StoreError::DuplicateLink { en, lt, domain });
        }
        let link = TranslationLink {
            id: LinkId(self.counters.next_link),
            en_entry: en,
            lt_entry: lt,
            rank_en_lt: self.link_ids_of(en).count() as u32 + 1,
            rank_lt_en: self.link_ids_of(lt).count() as u32 + 1,
            domain,
            note,
        };
        self.insert_link(link.clone());
        Ok(link)
    }

    /// Inserts a link verbatim (ranks included).
    pub(crate) fn insert_link(&mut self, link: TranslationLink) {
        self.counters.next_link = self.counters.next_link.max(link.id.0 + 1);
        self.links_by_entry.entry(link.en_entry).or_default().insert(link.id);
        self.links_by_entry.entry(link.lt_entry).or_default().insert(link.id);
        self.links.insert(link.id, link);
    }

    pub(crate) fn delete_link(&mut self, id: LinkId) -> Result<TranslationLink, StoreError> {
        let link = self
            .links
            .remove(&id)
            .ok_or_else(|| StoreError::NotFound(format!("link {id}")))?;
        for direction in [Direction::EnLt, Direction::LtEn] {
            let source = link.source(direction);
            if let Some(ids) = self.links_by_entry.get_mut(&source) {
                ids.remove(&id);
            }
            let removed_rank = link.rank(direction);
            let ids: Vec<LinkId> = self.link_ids_of(source).collect();
            for other in ids {
                if let Some(l) = self.links.get_mut(&other) {
                    if l.rank(direction) > removed_rank {
                        l.set_rank(direction, l.rank(direction) - 1);
                    }
                }
            }
        }
        Ok(link)
    }

    pub(crate) fn reorder(
        &mut self,
        source: EntryId,
        direction: Direction,
        order: &[LinkId],
    ) -> Result<Vec<TranslationLink>, StoreError> {
        let entry = self.entry(source).ok_or_else(|| StoreError::NotFound(format!("entry {source}")))?;
        if entry.language != direction.source() {
            return Err(StoreError::LanguageMismatch { entry: source, expected: direction.source() });
        }
        let current: BTreeSet<LinkId> = self.link_ids_of(source).collect();
        let proposed: BTreeSet<LinkId> = order.iter().copied().collect();
        if proposed.len() != order.len() {
            return Err(StoreError::BadPermutation("duplicate link ids".into()));
        }
        if proposed != current {
            let missing: Vec<String> = current.difference(&proposed).map(|l| l.to_string()).collect();
            let extra: Vec<String> = proposed.difference(&current).map(|l| l.to_string()).collect();
            return Err(StoreError::BadPermutation(format!(
                "order must list exactly the entry's links (missing [{}], extra [{}])",
                missing.join(","),
                extra.join(",")
            )));
        }
        let mut out = Vec::with_capacity(order.len());
        for (i, id) in order.iter().enumerate() {
            let link = self.links.get_mut(id).expect("checked above");
            link.set_rank(direction, i as u32 + 1);
            out.push(link.clone());
        }
        Ok(out)
    }

    /// Bulk-loads a validated record set into an empty snapshot, building
    /// the indexes from scratch (paradigm generation runs in parallel).
    pub(crate) fn load(
        registry: Arc<ParadigmRegistry>,
        domains: Vec<DomainTag>,
        entries: Vec<LexicalEntry>,
        links: Vec<TranslationLink>,
    ) -> Result<Snapshot, StoreError> {
        let mut snap = Snapshot::empty(registry);
        for tag in domains {
            if snap.domain_names.contains_key(&tag.name) {
                return Err(StoreError::DuplicateDomain(tag.name));
            }
            snap.insert_domain(tag);
        }
        let generated = par::map(&entries, |e| generate_paradigm(e, &snap.registry));
        for (entry, forms) in entries.into_iter().zip(generated) {
            let forms = forms.map_err(StoreError::Generate)?;
            snap.counters.next_entry = snap.counters.next_entry.max(entry.id.0 + 1);
            snap.index_forms(&entry, &forms);
            snap.entries.insert(entry.id, Arc::new(entry));
        }
        for link in links {
            snap.insert_link(link);
        }
        Ok(snap)
    }

    /// Checks that every (entry, direction) rank set is exactly {1..k}.
    pub fn check_rank_contiguity(&self) -> Result<(), String> {
        for (entry, ids) in self.links_by_entry.iter() {
            let Some(e) = self.entry(*entry) else {
                if !ids.is_empty() {
                    return Err(format!("links reference missing entry {entry}"));
                }
                continue;
            };
            let direction = Direction::from_source(e.language);
            let mut ranks: Vec<u32> = ids
                .iter()
                .filter_map(|id| self.links.get(id))
                .map(|l| l.rank(direction))
                .collect();
            ranks.sort_unstable();
            if ranks.iter().enumerate().any(|(i, r)| *r != i as u32 + 1) {
                return Err(format!("entry {entry} has {direction} ranks {ranks:?}"));
            }
        }
        Ok(())
    }

    /// Checks that the form index holds exactly the generated paradigm of
    /// every entry and nothing else.
    pub fn check_index_freshness(&self) -> Result<(), String> {
        let mut expected = 0usize;
        for entry in self.entries() {
            let forms = self.paradigm(entry).map_err(|e| e.to_string())?;
            for form in &forms {
                let p = Posting { entry: entry.id, features: form.features };
                if !self.postings(entry.language, &form.surface).contains(&p) {
                    return Err(format!("form `{}` of entry {} not indexed", form.surface, entry.id));
                }
            }
            expected += forms.len();
        }
        if expected != self.form_count {
            return Err(format!("index holds {} postings, paradigms yield {expected}", self.form_count));
        }
        let actual: usize = self.forms.iter().flat_map(|m| m.values()).map(Vec::len).sum();
        if actual != expected {
            return Err(format!("index buckets hold {actual} postings, paradigms yield {expected}"));
        }
        Ok(())
    }
}
