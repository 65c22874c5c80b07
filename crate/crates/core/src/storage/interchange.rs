//! Line-delimited interchange format (`lexibase-interchange v1`).
//!
//! ```text
//! lexibase-interchange v1
//! domain  <id> <name>
//! entry   <id> <lang> <pos> <lemma> <stems> <class> <gender> <regularity> <defective> <domains> <overrides> <required-cases>
//! link    <id> <en-id> <lt-id> <rank-en-lt> <rank-lt-en> <domain> <note>
//! ```
//!
//! Fields are separated by a single TAB; absent values are empty fields.
//! `stems` are joined with `|`, `domains` and `required-cases` with `,`, and
//! `overrides` are `features:surface` pairs joined with `;`. Inside text
//! fields `\` `TAB` `LF` `CR` `|` `;` are escaped as `\\` `\t` `\n` `\r` `\|`
//! `\;`. Records appear in the order header, domains, entries, links, each
//! kind sorted by id.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{BufRead, Write};
use std::sync::Arc;

use unicode_normalization::is_nfc;

use super::{Snapshot, StoreError};
use crate::features::{Case, FeatureBundle, Gender, Language, Pos};
use crate::lexicon::{
    validate_entry, Defectiveness, Direction, DomainId, DomainTag, EntryId, LexicalEntry,
    Regularity, TranslationLink,
};
use crate::morphology::ParadigmRegistry;

pub const HEADER: &str = "lexibase-interchange v1";

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '|' => out.push_str("\\|"),
            ';' => out.push_str("\\;"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('|') => out.push('|'),
            Some(';') => out.push(';'),
            Some(other) => return Err(format!("unknown escape `\\{other}`")),
            None => return Err("dangling `\\` at end of field".into()),
        }
    }
    Ok(out)
}

/// Splits raw (still escaped) text on `sep`, skipping escaped separators.
fn split_raw(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut start = 0;
    let mut escaped = false;
    for (i, c) in s.char_indices() {
        if escaped {
            escaped = false;
        } else if c == '\\' {
            escaped = true;
        } else if c == sep {
            parts.push(&s[start..i]);
            start = i + c.len_utf8();
        }
    }
    parts.push(&s[start..]);
    parts
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(sep)
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

pub fn entry_record(e: &LexicalEntry) -> String {
    let stems = join(e.stems.iter().map(|s| escape(s)), "|");
    let overrides = join(
        e.overrides.iter().map(|(f, s)| format!("{f}:{}", escape(s))),
        ";",
    );
    [
        "entry".to_string(),
        e.id.to_string(),
        e.language.to_string(),
        e.pos.to_string(),
        escape(&e.lemma),
        stems,
        e.inflection_class.as_deref().map(escape).unwrap_or_default(),
        opt(&e.gender),
        opt(&e.regularity),
        e.defectiveness.to_string(),
        join(&e.domains, ","),
        overrides,
        join(&e.required_cases, ","),
    ]
    .join("\t")
}

pub fn link_record(l: &TranslationLink) -> String {
    [
        "link".to_string(),
        l.id.to_string(),
        l.en_entry.to_string(),
        l.lt_entry.to_string(),
        l.rank_en_lt.to_string(),
        l.rank_lt_en.to_string(),
        opt(&l.domain),
        l.note.as_deref().map(escape).unwrap_or_default(),
    ]
    .join("\t")
}

pub fn domain_record(d: &DomainTag) -> String {
    format!("domain\t{}\t{}", d.id, escape(&d.name))
}

/// Writes `snapshot` as interchange records; returns the record count
/// (header included).
pub fn export(snapshot: &Snapshot, mut sink: impl Write) -> std::io::Result<usize> {
    let mut count = 1;
    writeln!(sink, "{HEADER}")?;
    for d in snapshot.domains() {
        writeln!(sink, "{}", domain_record(d))?;
        count += 1;
    }
    for e in snapshot.entries() {
        writeln!(sink, "{}", entry_record(e))?;
        count += 1;
    }
    for l in snapshot.links() {
        writeln!(sink, "{}", link_record(l))?;
        count += 1;
    }
    sink.flush()?;
    Ok(count)
}

pub fn export_string(snapshot: &Snapshot) -> String {
    let mut buf = Vec::new();
    export(snapshot, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("export emits UTF-8")
}

/// Records of an interchange stream, parsed but not yet cross-checked.
#[derive(Debug, Default)]
pub struct Records {
    pub domains: Vec<(usize, DomainTag)>,
    pub entries: Vec<(usize, LexicalEntry)>,
    pub links: Vec<(usize, TranslationLink)>,
}

fn field<T: std::str::FromStr>(raw: &str, what: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e| format!("bad {what} `{raw}`: {e}"))
}

fn optional<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Option<T>, String>
where
    T::Err: std::fmt::Display,
{
    if raw.is_empty() {
        Ok(None)
    } else {
        field(raw, what).map(Some)
    }
}

fn list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',').map(|p| field(p, what)).collect()
}

fn parse_entry(cols: &[&str]) -> Result<LexicalEntry, String> {
    let [id, lang, pos, lemma, stems, class, gender, regularity, defective, domains, overrides, cases] =
        cols
    else {
        return Err(format!("entry record needs 13 fields, found {}", cols.len() + 1));
    };
    let mut parsed_overrides = BTreeMap::new();
    if !overrides.is_empty() {
        for pair in split_raw(overrides, ';') {
            let (features, surface) = pair
                .split_once(':')
                .ok_or_else(|| format!("override `{pair}` lacks `:`"))?;
            let features: FeatureBundle = field(features, "override features")?;
            if parsed_overrides.insert(features, unescape(surface)?).is_some() {
                return Err(format!("override `{features}` listed twice"));
            }
        }
    }
    let domains: Vec<DomainId> = list(domains, "domain id")?;
    Ok(LexicalEntry {
        id: field(id, "entry id")?,
        language: field::<Language>(lang, "language")?,
        pos: field::<Pos>(pos, "part of speech")?,
        lemma: unescape(lemma)?,
        stems: if stems.is_empty() {
            Vec::new()
        } else {
            split_raw(stems, '|').into_iter().map(unescape).collect::<Result<_, _>>()?
        },
        inflection_class: if class.is_empty() { None } else { Some(unescape(class)?) },
        gender: optional::<Gender>(gender, "gender")?,
        regularity: optional::<Regularity>(regularity, "regularity")?,
        defectiveness: field::<Defectiveness>(defective, "defectiveness")?,
        domains: domains.into_iter().collect::<BTreeSet<_>>(),
        overrides: parsed_overrides,
        required_cases: list::<Case>(cases, "case")?,
    })
}

fn parse_link(cols: &[&str]) -> Result<TranslationLink, String> {
    let [id, en, lt, rank_en_lt, rank_lt_en, domain, note] = cols else {
        return Err(format!("link record needs 8 fields, found {}", cols.len() + 1));
    };
    let rank = |raw: &str| -> Result<u32, String> {
        match field::<u32>(raw, "rank")? {
            0 => Err("ranks start at 1".into()),
            r => Ok(r),
        }
    };
    Ok(TranslationLink {
        id: field(id, "link id")?,
        en_entry: field(en, "entry id")?,
        lt_entry: field(lt, "entry id")?,
        rank_en_lt: rank(rank_en_lt)?,
        rank_lt_en: rank(rank_lt_en)?,
        domain: optional(domain, "domain id")?,
        note: if note.is_empty() { None } else { Some(unescape(note)?) },
    })
}

/// Parses an interchange stream. Record numbers in errors are 1-based line
/// numbers (the header is record 1).
pub fn parse(source: impl BufRead) -> Result<Records, StoreError> {
    let mut records = Records::default();
    let mut lines = source.lines();
    let fmt = |record: usize, message: String| StoreError::Format { record, message };
    match lines.next() {
        Some(Ok(h)) if h == HEADER => {}
        Some(Ok(h)) if h.starts_with("lexibase-interchange ") => {
            return Err(fmt(1, format!("unsupported interchange version `{h}`")))
        }
        Some(Ok(_)) | None => return Err(fmt(1, format!("missing `{HEADER}` header"))),
        Some(Err(e)) => return Err(fmt(1, e.to_string())),
    }
    let mut stage = 0;
    for (i, line) in lines.enumerate() {
        let record = i + 2;
        let line = line.map_err(|e| fmt(record, e.to_string()))?;
        if !is_nfc(&line) {
            return Err(fmt(record, "record is not NFC-normalized".into()));
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let (kind, rest) = cols.split_first().expect("split yields one item");
        let order = match *kind {
            "domain" => 0,
            "entry" => 1,
            "link" => 2,
            other => return Err(fmt(record, format!("unknown record kind `{other}`"))),
        };
        if order < stage {
            return Err(fmt(record, format!("`{kind}` record after a later kind")));
        }
        stage = order;
        match order {
            0 => {
                let [id, name] = rest else {
                    return Err(fmt(record, format!("domain record needs 3 fields, found {}", cols.len())));
                };
                let tag = DomainTag {
                    id: field(id, "domain id").map_err(|m| fmt(record, m))?,
                    name: unescape(name).map_err(|m| fmt(record, m))?,
                };
                records.domains.push((record, tag));
            }
            1 => records
                .entries
                .push((record, parse_entry(rest).map_err(|m| fmt(record, m))?)),
            _ => records
                .links
                .push((record, parse_link(rest).map_err(|m| fmt(record, m))?)),
        }
    }
    Ok(records)
}

/// Cross-checks parsed records and builds a snapshot with fresh indexes.
pub fn build(records: Records, registry: Arc<ParadigmRegistry>) -> Result<Snapshot, StoreError> {
    let integrity = |record: usize, message: String| StoreError::Integrity { record, message };

    let mut domain_ids = HashSet::new();
    let mut domain_names = HashSet::new();
    for (record, d) in &records.domains {
        if !domain_ids.insert(d.id) {
            return Err(integrity(*record, format!("duplicate domain id {}", d.id)));
        }
        if d.name.is_empty() || !domain_names.insert(d.name.as_str()) {
            return Err(integrity(*record, format!("empty or duplicate domain name `{}`", d.name)));
        }
    }

    let mut languages: HashMap<EntryId, Language> = HashMap::new();
    for (record, e) in &records.entries {
        if e.id.is_new() {
            return Err(integrity(*record, "entry id 0 is reserved".into()));
        }
        if languages.insert(e.id, e.language).is_some() {
            return Err(integrity(*record, format!("duplicate entry id {}", e.id)));
        }
        let verdict = validate_entry(e, &registry);
        if !verdict.is_accepted() {
            return Err(integrity(*record, format!("invalid entry {}: {verdict}", e.id)));
        }
        if let Some(d) = e.domains.iter().find(|d| !domain_ids.contains(d)) {
            return Err(integrity(*record, format!("entry {} references missing domain {d}", e.id)));
        }
    }

    let mut link_ids = HashSet::new();
    let mut pairs = HashSet::new();
    let mut ranks: HashMap<(EntryId, Direction), (usize, Vec<u32>)> = HashMap::new();
    for (record, l) in &records.links {
        if !link_ids.insert(l.id) {
            return Err(integrity(*record, format!("duplicate link id {}", l.id)));
        }
        for (id, want) in [(l.en_entry, Language::En), (l.lt_entry, Language::Lt)] {
            match languages.get(&id) {
                None => return Err(integrity(*record, format!("link {} references missing entry {id}", l.id))),
                Some(lang) if *lang != want => {
                    return Err(integrity(*record, format!("link {}: entry {id} is not {want}", l.id)))
                }
                _ => {}
            }
        }
        if let Some(d) = l.domain.filter(|d| !domain_ids.contains(d)) {
            return Err(integrity(*record, format!("link {} references missing domain {d}", l.id)));
        }
        if !pairs.insert((l.en_entry, l.lt_entry, l.domain)) {
            return Err(integrity(*record, format!("link {} duplicates an earlier link", l.id)));
        }
        for direction in [Direction::EnLt, Direction::LtEn] {
            let slot = ranks.entry((l.source(direction), direction)).or_insert((*record, Vec::new()));
            slot.0 = *record;
            slot.1.push(l.rank(direction));
        }
    }
    for ((entry, direction), (record, mut r)) in ranks {
        r.sort_unstable();
        if r.iter().enumerate().any(|(i, rank)| *rank != i as u32 + 1) {
            return Err(integrity(
                record,
                format!("{direction} ranks of entry {entry} are {r:?}, expected 1..{}", r.len()),
            ));
        }
    }

    Snapshot::load(
        registry,
        records.domains.into_iter().map(|(_, d)| d).collect(),
        records.entries.into_iter().map(|(_, e)| e).collect(),
        records.links.into_iter().map(|(_, l)| l).collect(),
    )
}

pub fn import(source: impl BufRead, registry: Arc<ParadigmRegistry>) -> Result<Snapshot, StoreError> {
    build(parse(source)?, registry)
}
