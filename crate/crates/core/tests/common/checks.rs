//! Property checks shared by the per-module tests and the acceptance run.
//! Each returns a short summary on success and the first failure otherwise.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use lexibase::storage::interchange;
use lexibase::{
    analyze, query_surface, translate, Direction, DomainId, EntryId, Language, LexicalEntry, LexiconStore,
    LinkId, ParadigmRegistry, Pos, StoreError,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::seq::SliceRandom;
use rand::SeedableRng;

pub type Check = Result<String, String>;

fn registry() -> Arc<ParadigmRegistry> {
    Arc::new(ParadigmRegistry::shipped())
}

/// Base-20 letter spelling of `n`, so generated lemmas are distinct.
pub fn spell(n: usize) -> String {
    const L: &[u8] = b"bdgklmnprstvzaeiouyh";
    let mut n = n;
    let mut s = Vec::new();
    loop {
        s.push(L[n % L.len()]);
        n /= L.len();
        if n == 0 {
            break;
        }
    }
    String::from_utf8(s).unwrap()
}

// ---- priority ordering ----

#[derive(Debug, Clone)]
pub enum Op {
    Add { en: usize, lt: usize, domain: usize },
    Delete(usize),
    Reorder { entry: usize, seed: u64 },
    DeleteEntry(usize),
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        6 => (0..4usize, 0..5usize, 0..3usize).prop_map(|(en, lt, domain)| Op::Add { en, lt, domain }),
        2 => any::<usize>().prop_map(Op::Delete),
        3 => (0..9usize, any::<u64>()).prop_map(|(entry, seed)| Op::Reorder { entry, seed }),
        1 => (0..9usize).prop_map(Op::DeleteEntry),
    ]
}

struct Model {
    entries: Vec<(EntryId, Language, String)>,
    alive: Vec<bool>,
    links: Vec<(LinkId, EntryId, EntryId, Option<DomainId>)>,
    order: HashMap<EntryId, Vec<LinkId>>,
}

impl Model {
    fn target(&self, link: LinkId, source: EntryId) -> EntryId {
        let &(_, en, lt, _) = self.links.iter().find(|l| l.0 == link).unwrap();
        if en == source { lt } else { en }
    }

    fn remove_link(&mut self, id: LinkId) {
        self.links.retain(|l| l.0 != id);
        for list in self.order.values_mut() {
            list.retain(|l| *l != id);
        }
    }
}

fn run_ops(ops: &[Op]) -> Result<(), TestCaseError> {
    let store = LexiconStore::in_memory(registry());
    let mut model = Model { entries: Vec::new(), alive: Vec::new(), links: Vec::new(), order: HashMap::new() };
    let domains: Vec<DomainId> = ["law", "medicine"].iter().map(|d| store.add_domain(d).unwrap().id).collect();
    for i in 0..9 {
        let (language, class, stem) = if i < 4 { (Language::En, "n-reg", format!("e{}", spell(i))) } else { (Language::Lt, "d1", format!("l{}", spell(i))) };
        let lemma = store.snapshot().paradigm(&LexicalEntry::new(language, Pos::Noun, "x", &[&stem], Some(class))).unwrap()[0].surface.clone();
        let id = store.upsert_entry(LexicalEntry::new(language, Pos::Noun, &lemma, &[&stem], Some(class))).unwrap();
        model.entries.push((id, language, lemma));
        model.alive.push(true);
        model.order.insert(id, Vec::new());
    }
    for op in ops {
        match *op {
            Op::Add { en, lt, domain } => {
                let (a, b) = (en, lt + 4);
                if !model.alive[a] || !model.alive[b] {
                    continue;
                }
                let (ea, eb) = (model.entries[a].0, model.entries[b].0);
                let d = domain.checked_sub(1).map(|i| domains[i]);
                let duplicate = model.links.iter().any(|l| l.1 == ea && l.2 == eb && l.3 == d);
                match store.write(|tx| tx.add_link(ea, eb, d, None)) {
                    Ok(link) => {
                        prop_assert!(!duplicate, "duplicate link accepted");
                        model.links.push((link.id, ea, eb, d));
                        model.order.get_mut(&ea).unwrap().push(link.id);
                        model.order.get_mut(&eb).unwrap().push(link.id);
                    }
                    Err(StoreError::DuplicateLink { .. }) => prop_assert!(duplicate, "spurious duplicate"),
                    Err(e) => return Err(TestCaseError::fail(e.to_string())),
                }
            }
            Op::Delete(k) => {
                if model.links.is_empty() {
                    continue;
                }
                let id = model.links[k % model.links.len()].0;
                store.write(|tx| tx.delete_link(id)).unwrap();
                model.remove_link(id);
            }
            Op::Reorder { entry, seed } => {
                if !model.alive[entry] {
                    continue;
                }
                let (id, language, _) = model.entries[entry];
                let mut order = model.order[&id].clone();
                order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
                store.write(|tx| tx.reorder(id, Direction::from_source(language), &order)).unwrap();
                *model.order.get_mut(&id).unwrap() = order;
            }
            Op::DeleteEntry(i) => {
                if !model.alive[i] {
                    continue;
                }
                let id = model.entries[i].0;
                let report = store.delete_entry(id, true).unwrap();
                for l in report.removed_links {
                    model.remove_link(l);
                }
                model.alive[i] = false;
                model.order.remove(&id);
            }
        }
    }

    let snap = store.snapshot();
    snap.check_rank_contiguity().map_err(TestCaseError::fail)?;
    for (i, &(id, language, ref lemma)) in model.entries.iter().enumerate() {
        if !model.alive[i] {
            continue;
        }
        let direction = Direction::from_source(language);
        let expected = &model.order[&id];
        for (pos, link) in expected.iter().enumerate() {
            prop_assert_eq!(snap.link(*link).unwrap().rank(direction), pos as u32 + 1);
        }
        for domain in std::iter::once(None).chain(domains.iter().copied().map(Some)) {
            let got: Vec<LinkId> = translate(&snap, lemma, direction, domain, None).iter().map(|c| c.via_link).collect();
            let in_domain = |l: &LinkId| domain.is_some() && model.links.iter().any(|m| m.0 == *l && m.3 == domain);
            let mut want: Vec<LinkId> = expected.iter().copied().filter(in_domain).collect();
            want.extend(expected.iter().copied().filter(|l| !in_domain(l)));
            prop_assert_eq!(&got, &want, "order for {} {:?}", lemma, domain);
            let targets: Vec<EntryId> = translate(&snap, lemma, direction, domain, None).iter().map(|c| c.target_entry).collect();
            let want_targets: Vec<EntryId> = want.iter().map(|l| model.target(*l, id)).collect();
            prop_assert_eq!(targets, want_targets);
        }
    }
    Ok(())
}

pub fn priority_ordering(cases: u32) -> Check {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner
        .run(&proptest::collection::vec(op(), 0..60), |ops| run_ops(&ops))
        .map(|_| format!("{cases} random add/reorder/delete sequences"))
        .map_err(|e| e.to_string())
}

// ---- bidirectionality ----

pub fn bidirectionality(link_count: usize) -> Check {
    let store = LexiconStore::in_memory(registry());
    let entries = link_count / 5;
    let (en, lt) = store
        .write(|tx| {
            let mut en = Vec::new();
            let mut lt = Vec::new();
            for i in 0..entries {
                let s = spell(i);
                en.push(tx.upsert_entry(LexicalEntry::new(Language::En, Pos::Noun, &s, &[&s], Some("n-reg")))?);
                let l = format!("{s}as");
                lt.push(tx.upsert_entry(LexicalEntry::new(Language::Lt, Pos::Noun, &l, &[&s], Some("d1")))?);
            }
            Ok((en, lt))
        })
        .unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10_000);
    store
        .write(|tx| {
            let mut added = 0;
            while added < link_count {
                let a = *rand::seq::IndexedRandom::choose(en.as_slice(), &mut rng).unwrap();
                let b = *rand::seq::IndexedRandom::choose(lt.as_slice(), &mut rng).unwrap();
                match tx.add_link(a, b, None, None) {
                    Ok(_) => added += 1,
                    Err(StoreError::DuplicateLink { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(())
        })
        .unwrap();
    let snap = store.snapshot();
    let mut failures = Vec::new();
    for link in snap.links() {
        let en = snap.entry(link.en_entry).unwrap();
        let lt = snap.entry(link.lt_entry).unwrap();
        let fwd = translate(&snap, &en.lemma, Direction::EnLt, None, None);
        if !fwd.iter().any(|c| c.via_link == link.id && c.target_entry == lt.id) {
            failures.push(format!("{} -> {} (link {})", en.lemma, lt.lemma, link.id));
        }
        let back = translate(&snap, &lt.lemma, Direction::LtEn, None, None);
        if !back.iter().any(|c| c.via_link == link.id && c.target_entry == en.id) {
            failures.push(format!("{} <- {} (link {})", en.lemma, lt.lemma, link.id));
        }
    }
    if failures.is_empty() {
        Ok(format!("{} links reachable in both directions", snap.stats().links))
    } else {
        Err(format!("{} failures, first: {}", failures.len(), failures[0]))
    }
}

// ---- analysis/generation duality ----

pub fn duality() -> Check {
    let store = LexiconStore::in_memory(registry());
    let cases = super::gold_cases();
    let ids = store
        .write(|tx| cases.iter().map(|c| tx.upsert_entry(c.entry.clone())).collect::<Result<Vec<_>, _>>())
        .map_err(|e| e.to_string())?;
    let snap = store.snapshot();
    let mut checked = 0;
    for id in ids {
        let entry = snap.entry(id).unwrap();
        for form in snap.paradigm(entry).map_err(|e| e.to_string())? {
            let readings = analyze(&snap, &form.surface, entry.language);
            if !readings.iter().any(|a| a.entry == id && a.features == form.features) {
                return Err(format!("{} {} does not analyze back", form.surface, form.features));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} forms of {} gold entries", cases.len()))
}

// ---- round trip ----

pub fn round_trip(stores: u64) -> Check {
    let mut records = 0;
    for seed in 0..stores {
        let store = super::random_store(seed, 20 + (seed as usize % 30), 40);
        let text = interchange::export_string(&store.snapshot());
        let imported = interchange::import(text.as_bytes(), registry()).map_err(|e| format!("seed {seed}: {e}"))?;
        if interchange::export_string(&imported) != text {
            return Err(format!("seed {seed}: re-export differs"));
        }
        if query_surface(&imported) != query_surface(&store.snapshot()) {
            return Err(format!("seed {seed}: query surface differs"));
        }
        imported.check_index_freshness().map_err(|e| format!("seed {seed}: {e}"))?;
        records += text.lines().count();
    }
    Ok(format!("{stores} random stores ({records} records), byte-identical re-export"))
}

// ---- concurrency ----

/// One writer commits multi-step transactions that keep |EN| = |LT| and one
/// link per pair; readers check each snapshot they see for torn state.
pub fn concurrency(readers: usize, duration: Duration) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = Arc::new(
        LexiconStore::open(dir.path().join("stress.store"), lexibase::OpenOptions::create()).map_err(|e| e.to_string())?,
    );
    let stop = Arc::new(AtomicBool::new(false));
    let writer = {
        let (store, stop) = (Arc::clone(&store), Arc::clone(&stop));
        std::thread::spawn(move || -> Result<usize, String> {
            let mut commits = 0usize;
            let mut pairs: Vec<(EntryId, EntryId)> = Vec::new();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
            while !stop.load(Ordering::Relaxed) {
                let n = commits;
                let result = store.write(|tx| {
                    let s = spell(n);
                    let en = tx.upsert_entry(LexicalEntry::new(Language::En, Pos::Noun, &s, &[&s], Some("n-reg")))?;
                    let lt = tx.upsert_entry(LexicalEntry::new(Language::Lt, Pos::Noun, format!("{s}as"), &[&s], Some("d1")))?;
                    tx.add_link(en, lt, None, None)?;
                    // Cross links keep the rank lists of older entries busy.
                    if let Some(&(old_en, old_lt)) = rand::seq::IndexedRandom::choose(pairs.as_slice(), &mut rng) {
                        tx.add_link(old_en, lt, None, None)?;
                        tx.add_link(en, old_lt, None, None)?;
                        let mut order: Vec<LinkId> = tx.snapshot().links_of(old_en).iter().map(|l| l.id).collect();
                        order.reverse();
                        tx.reorder(old_en, Direction::EnLt, &order)?;
                    }
                    if n % 5 == 4 {
                        let (old_en, old_lt) = pairs.remove(0);
                        tx.delete_entry(old_en, true)?;
                        tx.delete_entry(old_lt, true)?;
                    }
                    Ok((en, lt))
                });
                let pair = result.map_err(|e| e.to_string())?;
                pairs.push(pair);
                commits += 1;
            }
            Ok(commits)
        })
    };
    let reader_handles: Vec<_> = (0..readers)
        .map(|r| {
            let (store, stop) = (Arc::clone(&store), Arc::clone(&stop));
            std::thread::spawn(move || -> Result<(usize, BTreeMap<u64, usize>), String> {
                let mut seen = BTreeMap::new();
                let mut last = 0;
                let mut reads = 0;
                while !stop.load(Ordering::Relaxed) {
                    let snap = store.snapshot();
                    if snap.commits() < last {
                        return Err(format!("reader {r}: commit count went back"));
                    }
                    last = snap.commits();
                    let entries: Vec<_> = snap.entries().collect();
                    let en = entries.iter().filter(|e| e.language == Language::En).count();
                    if en * 2 != entries.len() {
                        return Err(format!("reader {r}: torn snapshot, {en} EN of {}", entries.len()));
                    }
                    for e in &entries {
                        if snap.links_of(e.id).is_empty() {
                            return Err(format!("reader {r}: entry {} without its link", e.lemma));
                        }
                        let dir = Direction::from_source(e.language);
                        if translate(&snap, &e.lemma, dir, None, None).is_empty() {
                            return Err(format!("reader {r}: {} untranslatable", e.lemma));
                        }
                    }
                    snap.check_rank_contiguity().map_err(|e| format!("reader {r}: {e}"))?;
                    if reads % 16 == 0 {
                        snap.check_index_freshness().map_err(|e| format!("reader {r}: {e}"))?;
                    }
                    seen.insert(snap.commits(), entries.len());
                    reads += 1;
                }
                Ok((reads, seen))
            })
        })
        .collect();
    let started = Instant::now();
    while started.elapsed() < duration {
        std::thread::sleep(Duration::from_millis(20));
    }
    stop.store(true, Ordering::Relaxed);
    let commits = writer.join().map_err(|_| "writer panicked".to_string())??;
    let mut reads = 0;
    let mut by_commit: BTreeMap<u64, usize> = BTreeMap::new();
    for h in reader_handles {
        let (n, seen) = h.join().map_err(|_| "reader panicked".to_string())??;
        reads += n;
        for (commit, count) in seen {
            if let Some(prev) = by_commit.insert(commit, count) {
                if prev != count {
                    return Err(format!("commit {commit} seen with {prev} and {count} entries"));
                }
            }
        }
    }
    // The durable state equals the last published one.
    let reopened = LexiconStore::open(dir.path().join("stress.store"), lexibase::OpenOptions::default())
        .map_err(|e| e.to_string())?;
    if interchange::export_string(&reopened.snapshot()) != interchange::export_string(&store.snapshot()) {
        return Err("reopened store differs from last committed snapshot".into());
    }
    if commits == 0 || reads == 0 {
        return Err(format!("no overlap: {commits} commits, {reads} reads"));
    }
    Ok(format!("{readers} readers, {reads} snapshot reads, {commits} commits, {} distinct snapshots observed", by_commit.len()))
}

// ---- merge algebra ----

fn spring_store(domain: &str) -> LexiconStore {
    let s = LexiconStore::in_memory(registry());
    s.write(|tx| {
        let d = tx.add_domain(domain)?.id;
        let mut spring = super::noun(Language::En, "spring", "spring", "n-reg");
        spring.domains.insert(d);
        let en = tx.upsert_entry(spring)?;
        let lt = tx.upsert_entry(super::noun(Language::Lt, "pavasaris", "pavasar", "d1is"))?;
        tx.add_link(en, lt, None, None)?;
        Ok(())
    })
    .unwrap();
    s
}

pub fn merge_algebra(stores: u64) -> Check {
    use lexibase::{merge_stores, MergeMode, MergePolicy};
    let modes = [MergeMode::PreferLeft, MergeMode::PreferRight, MergeMode::Union];
    let empty = LexiconStore::in_memory(registry()).snapshot();
    for seed in 0..stores {
        let a = super::random_store(seed, 30, 40).snapshot();
        let surface = query_surface(&a);
        for mode in modes {
            for (l, r, side) in [(&a, &empty, "merge(A,0)"), (&empty, &a, "merge(0,A)")] {
                let (m, report) = merge_stores(l, r, MergePolicy::new(mode)).map_err(|e| e.to_string())?;
                if query_surface(&m) != surface || !report.is_empty() {
                    return Err(format!("seed {seed}: {side} under {mode} differs from A"));
                }
            }
        }
        let (m, _) = merge_stores(&a, &a, MergePolicy::new(MergeMode::PreferLeft)).map_err(|e| e.to_string())?;
        if query_surface(&m) != surface {
            return Err(format!("seed {seed}: merge(A,A,prefer-left) differs from A"));
        }
    }

    let disjoint = |names: &[&str]| {
        let s = LexiconStore::in_memory(registry());
        for n in names {
            s.upsert_entry(super::noun(Language::Lt, &format!("{n}as"), n, "d1")).unwrap();
        }
        s.snapshot()
    };
    let (m, _) = merge_stores(&disjoint(&["vyr", "kel", "med"]), &disjoint(&["dar", "sod"]), MergePolicy::new(MergeMode::Union))
        .map_err(|e| e.to_string())?;
    if m.stats().entries != 5 {
        return Err(format!("disjoint union has {} entries, expected 5", m.stats().entries));
    }
    m.check_rank_contiguity()?;

    let (_, report) = merge_stores(
        &spring_store("mechanics").snapshot(),
        &spring_store("geography").snapshot(),
        MergePolicy::new(MergeMode::Union),
    )
    .map_err(|e| e.to_string())?;
    let expected = "lexibase-merge-report v1\tunion\nconflict\tEN\tnoun\tspring\tn-reg\t1\tunion\tdomains:mechanics|geography\n";
    if report.to_text() != expected {
        return Err(format!("conflict fixture report:\n{}", report.to_text()));
    }
    Ok(format!("identity and idempotence over {stores} random stores, disjoint union 3+2=5, conflict fixture"))
}
