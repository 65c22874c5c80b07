//! Merging two lexicons into a fresh one under an explicit conflict policy.
//!
//! Entries are matched on (language, pos, lemma, inflection class); when a
//! store holds several entries with the same key, the n-th left one matches
//! the n-th right one in id order. Left entries keep their ids, right-only
//! entries are numbered after the left store's id range. Links are always
//! carried over from both sides (deduplicated on en entry, lt entry and
//! domain) and every (entry, direction) rank list is renumbered by a stable
//! interleave on (original rank, left before right).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::features::{FeatureBundle, Language, Pos};
use crate::lexicon::{
    validate_entry, Direction, DomainId, DomainTag, EntryId, LexicalEntry, LinkId, TranslationLink,
};
use crate::storage::interchange::escape;
use crate::storage::{Snapshot, StoreError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeMode {
    PreferLeft,
    PreferRight,
    Union,
}

impl MergeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MergeMode::PreferLeft => "prefer-left",
            MergeMode::PreferRight => "prefer-right",
            MergeMode::Union => "union",
        }
    }
}

impl fmt::Display for MergeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MergeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prefer-left" => Ok(MergeMode::PreferLeft),
            "prefer-right" => Ok(MergeMode::PreferRight),
            "union" => Ok(MergeMode::Union),
            other => Err(format!("unknown merge policy `{other}` (prefer-left, prefer-right, union)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergePolicy {
    pub mode: MergeMode,
}

impl MergePolicy {
    pub fn new(mode: MergeMode) -> Self {
        MergePolicy { mode }
    }
}

/// The fields that identify "the same entry" across two stores.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdentityKey {
    pub language: Language,
    pub pos: Pos,
    pub lemma: String,
    pub class: Option<String>,
}

impl IdentityKey {
    pub fn of(e: &LexicalEntry) -> Self {
        IdentityKey {
            language: e.language,
            pos: e.pos,
            lemma: e.lemma.clone(),
            class: e.inflection_class.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Stems,
    Gender,
    Regularity,
    Defectiveness,
    Domains,
    Overrides,
    RequiredCases,
    Links,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Stems => "stems",
            Field::Gender => "gender",
            Field::Regularity => "regularity",
            Field::Defectiveness => "defectiveness",
            Field::Domains => "domains",
            Field::Overrides => "overrides",
            Field::RequiredCases => "required_cases",
            Field::Links => "links",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDiff {
    pub field: Field,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Resolution {
    /// Left entry's fields taken wholesale; links of both sides kept.
    TookLeft,
    /// Right entry's fields taken wholesale; links of both sides kept.
    TookRight,
    /// Left scalars, domains and compatible overrides unioned. `rejected`
    /// lists right-side overrides that were dropped in favour of the left.
    Union { rejected: Vec<FeatureBundle> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub key: IdentityKey,
    pub merged_entry: EntryId,
    pub differences: Vec<FieldDiff>,
    pub resolution: Resolution,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictReport {
    pub policy: Option<MergeMode>,
    pub conflicts: Vec<Conflict>,
}

impl ConflictReport {
    pub fn is_empty(&self) -> bool {
        self.conflicts.is_empty()
    }

    /// Line-delimited text rendering in the interchange style.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "lexibase-merge-report v1\t{}\n",
            self.policy.map(MergeMode::as_str).unwrap_or("")
        );
        for c in &self.conflicts {
            let resolution = match &c.resolution {
                Resolution::TookLeft => "took-left".to_string(),
                Resolution::TookRight => "took-right".to_string(),
                Resolution::Union { rejected } if rejected.is_empty() => "union".to_string(),
                Resolution::Union { rejected } => format!(
                    "union rejected={}",
                    rejected.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(";")
                ),
            };
            let diffs = c
                .differences
                .iter()
                .map(|d| format!("{}:{}|{}", d.field.as_str(), escape(&d.left), escape(&d.right)))
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!(
                "conflict\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                c.key.language,
                c.key.pos,
                escape(&c.key.lemma),
                c.key.class.as_deref().map(escape).unwrap_or_default(),
                c.merged_entry,
                resolution,
                diffs
            ));
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Side {
    Left,
    Right,
}

fn render_list<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(sep)
}

fn render_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

struct Merger<'a> {
    left: &'a Snapshot,
    right: &'a Snapshot,
    mode: MergeMode,
    domains: Vec<DomainTag>,
    right_domain: HashMap<DomainId, DomainId>,
    entry_map: HashMap<(Side, EntryId), EntryId>,
}

impl Merger<'_> {
    fn domain_name(&self, id: DomainId) -> String {
        self.domains
            .iter()
            .find(|d| d.id == id)
            .map(|d| d.name.clone())
            .unwrap_or_else(|| id.to_string())
    }

    fn domains_of(&self, e: &LexicalEntry, side: Side) -> BTreeSet<DomainId> {
        match side {
            Side::Left => e.domains.clone(),
            Side::Right => e.domains.iter().map(|d| self.right_domain[d]).collect(),
        }
    }

    fn remap_link(&self, l: &TranslationLink, side: Side) -> TranslationLink {
        TranslationLink {
            en_entry: self.entry_map[&(side, l.en_entry)],
            lt_entry: self.entry_map[&(side, l.lt_entry)],
            domain: match side {
                Side::Left => l.domain,
                Side::Right => l.domain.map(|d| self.right_domain[&d]),
            },
            ..l.clone()
        }
    }

    fn link_set(&self, snap: &Snapshot, side: Side, entry: EntryId) -> BTreeSet<(EntryId, EntryId, Option<DomainId>)> {
        snap.links_of(entry)
            .into_iter()
            .map(|l| {
                let m = self.remap_link(l, side);
                (m.en_entry, m.lt_entry, m.domain)
            })
            .collect()
    }

    fn render_links(&self, set: &BTreeSet<(EntryId, EntryId, Option<DomainId>)>) -> String {
        render_list(
            set.iter().map(|(en, lt, d)| match d {
                Some(d) => format!("{en}-{lt}@{}", self.domain_name(*d)),
                None => format!("{en}-{lt}"),
            }),
            ",",
        )
    }

    fn differences(&self, l: &LexicalEntry, r: &LexicalEntry) -> Vec<FieldDiff> {
        let mut diffs = Vec::new();
        let mut push = |field, left: String, right: String| {
            if left != right {
                diffs.push(FieldDiff { field, left, right });
            }
        };
        push(Field::Stems, l.stems.join("|"), r.stems.join("|"));
        push(Field::Gender, render_opt(&l.gender), render_opt(&r.gender));
        push(Field::Regularity, render_opt(&l.regularity), render_opt(&r.regularity));
        push(Field::Defectiveness, l.defectiveness.to_string(), r.defectiveness.to_string());
        let names = |ids: BTreeSet<DomainId>| {
            let set: BTreeSet<String> = ids.into_iter().map(|d| self.domain_name(d)).collect();
            render_list(set, ",")
        };
        push(
            Field::Domains,
            names(self.domains_of(l, Side::Left)),
            names(self.domains_of(r, Side::Right)),
        );
        let overrides = |e: &LexicalEntry| render_list(e.overrides.iter().map(|(f, s)| format!("{f}:{s}")), ";");
        push(Field::Overrides, overrides(l), overrides(r));
        push(
            Field::RequiredCases,
            render_list(&l.required_cases, ","),
            render_list(&r.required_cases, ","),
        );
        push(
            Field::Links,
            self.render_links(&self.link_set(self.left, Side::Left, l.id)),
            self.render_links(&self.link_set(self.right, Side::Right, r.id)),
        );
        diffs
    }

    fn resolve(&self, id: EntryId, l: &LexicalEntry, r: &LexicalEntry) -> (LexicalEntry, Resolution) {
        match self.mode {
            MergeMode::PreferLeft => (LexicalEntry { id, ..l.clone() }, Resolution::TookLeft),
            MergeMode::PreferRight => {
                let domains = self.domains_of(r, Side::Right);
                (LexicalEntry { id, domains, ..r.clone() }, Resolution::TookRight)
            }
            MergeMode::Union => {
                let mut merged = LexicalEntry { id, ..l.clone() };
                merged.domains.extend(self.domains_of(r, Side::Right));
                let spec = l.class_key().and_then(|k| self.left.registry().get(&k));
                let mut rejected = Vec::new();
                for (features, surface) in &r.overrides {
                    match merged.overrides.get(features) {
                        Some(existing) if existing == surface => {}
                        Some(_) => rejected.push(*features),
                        None => {
                            let fits = spec.is_some_and(|s| s.slot(features).is_some())
                                && !merged.defectiveness.suppresses(features);
                            if fits {
                                merged.overrides.insert(*features, surface.clone());
                            } else {
                                rejected.push(*features);
                            }
                        }
                    }
                }
                (merged, Resolution::Union { rejected })
            }
        }
    }
}

/// Merges `left` and `right` into a new snapshot; neither input changes.
pub fn merge_stores(
    left: &Snapshot,
    right: &Snapshot,
    policy: MergePolicy,
) -> Result<(Snapshot, ConflictReport), StoreError> {
    let registry = Arc::clone(left.registry());

    // Domains by name: left ids kept, right-only names appended.
    let mut domains: Vec<DomainTag> = left.domains().cloned().collect();
    let mut next_domain = domains.iter().map(|d| d.id.0).max().unwrap_or(0) + 1;
    let mut right_domain = HashMap::new();
    for d in right.domains() {
        let id = match left.domain_by_name(&d.name) {
            Some(existing) => existing.id,
            None => {
                let id = DomainId(next_domain);
                next_domain += 1;
                domains.push(DomainTag { id, name: d.name.clone() });
                id
            }
        };
        right_domain.insert(d.id, id);
    }

    // Entry matching.
    let mut left_by_key: HashMap<IdentityKey, Vec<EntryId>> = HashMap::new();
    for e in left.entries() {
        left_by_key.entry(IdentityKey::of(e)).or_default().push(e.id);
    }
    let mut entry_map = HashMap::new();
    for e in left.entries() {
        entry_map.insert((Side::Left, e.id), e.id);
    }
    let mut next_entry = left.entries().map(|e| e.id.0).max().unwrap_or(0) + 1;
    let mut seen: HashMap<IdentityKey, usize> = HashMap::new();
    let mut pairs: Vec<(EntryId, EntryId)> = Vec::new();
    let mut right_only: Vec<EntryId> = Vec::new();
    for e in right.entries() {
        let key = IdentityKey::of(e);
        let n = seen.entry(key.clone()).or_insert(0);
        match left_by_key.get(&key).and_then(|ids| ids.get(*n)) {
            Some(left_id) => {
                entry_map.insert((Side::Right, e.id), *left_id);
                pairs.push((*left_id, e.id));
            }
            None => {
                entry_map.insert((Side::Right, e.id), EntryId(next_entry));
                next_entry += 1;
                right_only.push(e.id);
            }
        }
        *n += 1;
    }

    let merger = Merger { left, right, mode: policy.mode, domains, right_domain, entry_map };

    let mut merged: BTreeMap<EntryId, LexicalEntry> =
        left.entries().map(|e| (e.id, e.clone())).collect();
    let mut conflicts = Vec::new();
    for (left_id, right_id) in pairs {
        let l = left.entry(left_id).expect("matched left entry");
        let r = right.entry(right_id).expect("matched right entry");
        let differences = merger.differences(l, r);
        if differences.is_empty() {
            continue;
        }
        let (entry, resolution) = merger.resolve(left_id, l, r);
        merged.insert(left_id, entry);
        conflicts.push(Conflict { key: IdentityKey::of(l), merged_entry: left_id, differences, resolution });
    }
    for right_id in right_only {
        let r = right.entry(right_id).expect("right entry");
        let id = merger.entry_map[&(Side::Right, right_id)];
        let domains = merger.domains_of(r, Side::Right);
        merged.insert(id, LexicalEntry { id, domains, ..r.clone() });
    }
    for e in merged.values() {
        let verdict = validate_entry(e, &registry);
        if !verdict.is_accepted() {
            return Err(StoreError::Validation(verdict));
        }
    }

    // Links: union, deduplicated; rank keys remember the side they came from.
    struct Pending {
        link: TranslationLink,
        side: Side,
        original: LinkId,
    }
    let mut pending: Vec<Pending> = Vec::new();
    let mut index: HashMap<(EntryId, EntryId, Option<DomainId>), usize> = HashMap::new();
    for (side, snap) in [(Side::Left, left), (Side::Right, right)] {
        for l in snap.links() {
            let m = merger.remap_link(l, side);
            let key = (m.en_entry, m.lt_entry, m.domain);
            match index.get(&key) {
                Some(&i) => {
                    if side == Side::Right && policy.mode == MergeMode::PreferRight {
                        pending[i].link.note = m.note.clone();
                    }
                }
                None => {
                    index.insert(key, pending.len());
                    pending.push(Pending { link: m, side, original: l.id });
                }
            }
        }
    }
    for direction in [Direction::EnLt, Direction::LtEn] {
        let mut groups: HashMap<EntryId, Vec<usize>> = HashMap::new();
        for (i, p) in pending.iter().enumerate() {
            groups.entry(p.link.source(direction)).or_default().push(i);
        }
        for (_, mut members) in groups {
            members.sort_by_key(|&i| (pending[i].link.rank(direction), pending[i].side, pending[i].original));
            for (rank, i) in members.into_iter().enumerate() {
                pending[i].link.set_rank(direction, rank as u32 + 1);
            }
        }
    }
    let mut next_link = left.links().map(|l| l.id.0).max().unwrap_or(0) + 1;
    let mut links = Vec::with_capacity(pending.len());
    for p in pending {
        let mut link = p.link;
        if p.side == Side::Right {
            link.id = LinkId(next_link);
            next_link += 1;
        }
        links.push(link);
    }

    let snapshot = Snapshot::load(
        registry,
        merger.domains,
        merged.into_values().collect(),
        links,
    )?;
    Ok((snapshot, ConflictReport { policy: Some(policy.mode), conflicts }))
}
