mod common;

use std::sync::Arc;

use lexibase::merge::{Field, FieldDiff, IdentityKey, Resolution};
use lexibase::{
    merge_stores, query_surface, translate, Direction, Language, LexiconStore, MergeMode, MergePolicy,
    ParadigmRegistry, Pos,
};

fn empty() -> LexiconStore {
    LexiconStore::in_memory(Arc::new(ParadigmRegistry::shipped()))
}

fn merge(a: &LexiconStore, b: &LexiconStore, mode: MergeMode) -> (lexibase::Snapshot, lexibase::ConflictReport) {
    merge_stores(&a.snapshot(), &b.snapshot(), MergePolicy::new(mode)).unwrap()
}

#[test]
fn empty_store_is_identity_on_both_sides() {
    for seed in 0..10 {
        let a = common::random_store(seed, 30, 40);
        let surface = query_surface(&a.snapshot());
        for mode in [MergeMode::PreferLeft, MergeMode::PreferRight, MergeMode::Union] {
            let (m, report) = merge(&a, &empty(), mode);
            assert_eq!(query_surface(&m), surface, "seed {seed} {mode} right-empty");
            assert!(report.is_empty());
            let (m, report) = merge(&empty(), &a, mode);
            assert_eq!(query_surface(&m), surface, "seed {seed} {mode} left-empty");
            assert!(report.is_empty());
        }
    }
}

#[test]
fn self_merge_is_idempotent() {
    for seed in 0..10 {
        let a = common::random_store(seed, 30, 40);
        let (m, report) = merge(&a, &a, MergeMode::PreferLeft);
        assert_eq!(query_surface(&m), query_surface(&a.snapshot()), "seed {seed}");
        assert!(report.is_empty());
        m.check_rank_contiguity().unwrap();
        m.check_index_freshness().unwrap();
    }
}

#[test]
fn disjoint_union_adds_up() {
    let a = empty();
    a.write(|tx| {
        let x = tx.upsert_entry(common::noun(Language::En, "boy", "boy", "n-reg"))?;
        let y = tx.upsert_entry(common::noun(Language::Lt, "vyras", "vyr", "d1"))?;
        tx.upsert_entry(common::noun(Language::Lt, "ranka", "rank", "d2"))?;
        tx.add_link(x, y, None, None)?;
        Ok(())
    })
    .unwrap();
    let b = empty();
    b.write(|tx| {
        let x = tx.upsert_entry(common::noun(Language::En, "box", "box", "n-es"))?;
        let y = tx.upsert_entry(common::noun(Language::Lt, "akis", "ak", "d3"))?;
        tx.add_link(x, y, None, None)?;
        Ok(())
    })
    .unwrap();
    let (m, report) = merge(&a, &b, MergeMode::Union);
    assert!(report.is_empty());
    assert_eq!(m.stats().entries, 5);
    assert_eq!(m.stats().links, 2);
    assert_eq!(m.stats().forms, a.snapshot().stats().forms + b.snapshot().stats().forms);
    m.check_rank_contiguity().unwrap();
}

fn spring_store(domain: &str, stem: &str) -> LexiconStore {
    let s = empty();
    s.write(|tx| {
        let d = tx.add_domain(domain)?.id;
        let mut spring = common::noun(Language::En, "spring", stem, "n-reg");
        spring.domains.insert(d);
        let en = tx.upsert_entry(spring)?;
        let lt = tx.upsert_entry(common::noun(Language::Lt, "pavasaris", "pavasar", "d1is"))?;
        tx.add_link(en, lt, None, None)?;
        Ok(())
    })
    .unwrap();
    s
}

#[test]
fn domain_conflict_fixture() {
    let a = spring_store("mechanics", "spring");
    let b = spring_store("geography", "spring");
    let (m, report) = merge(&a, &b, MergeMode::Union);

    let key = IdentityKey { language: Language::En, pos: Pos::Noun, lemma: "spring".into(), class: Some("n-reg".into()) };
    assert_eq!(report.conflicts.len(), 1);
    let c = &report.conflicts[0];
    assert_eq!(c.key, key);
    assert_eq!(c.merged_entry.0, 1);
    assert_eq!(
        c.differences,
        [FieldDiff { field: Field::Domains, left: "mechanics".into(), right: "geography".into() }]
    );
    assert_eq!(c.resolution, Resolution::Union { rejected: vec![] });
    assert_eq!(
        report.to_text(),
        "lexibase-merge-report v1\tunion\n\
         conflict\tEN\tnoun\tspring\tn-reg\t1\tunion\tdomains:mechanics|geography\n"
    );

    let spring = m.entry(c.merged_entry).unwrap();
    let names: Vec<&str> = spring.domains.iter().map(|d| m.domain(*d).unwrap().name.as_str()).collect();
    assert_eq!(names, ["mechanics", "geography"]);
    assert_eq!(m.stats().entries, 2);
    assert_eq!(m.stats().links, 1);

    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["conflicts"][0]["resolution"]["kind"], "union");
    assert_eq!(json["conflicts"][0]["differences"][0]["field"], "domains");
}

#[test]
fn prefer_modes_take_the_winner_wholesale() {
    let a = spring_store("mechanics", "spring");
    let b = spring_store("geography", "spring");
    let (m, report) = merge(&a, &b, MergeMode::PreferLeft);
    assert_eq!(report.conflicts[0].resolution, Resolution::TookLeft);
    let names: Vec<_> = m.entry(lexibase::EntryId(1)).unwrap().domains.iter().map(|d| m.domain(*d).unwrap().name.clone()).collect();
    assert_eq!(names, ["mechanics"]);
    let (m, report) = merge(&a, &b, MergeMode::PreferRight);
    assert_eq!(report.conflicts[0].resolution, Resolution::TookRight);
    let names: Vec<_> = m.entry(lexibase::EntryId(1)).unwrap().domains.iter().map(|d| m.domain(*d).unwrap().name.clone()).collect();
    assert_eq!(names, ["geography"]);
    // Both domain tags exist in the merged store either way.
    assert_eq!(m.domains().count(), 2);
}

#[test]
fn union_rejects_incompatible_overrides() {
    let build = |plural: &str, extra: Option<(&str, &str)>| {
        let s = empty();
        let mut man = common::noun(Language::En, "man", "man", "n-reg");
        man.overrides.insert("NOM,PL".parse().unwrap(), plural.into());
        if let Some((f, v)) = extra {
            man.overrides.insert(f.parse().unwrap(), v.into());
        }
        s.upsert_entry(man).unwrap();
        s
    };
    let a = build("men", None);
    let b = build("mans", Some(("GEN,PL", "men's")));
    let (m, report) = merge(&a, &b, MergeMode::Union);
    let c = &report.conflicts[0];
    assert_eq!(c.resolution, Resolution::Union { rejected: vec!["NOM,PL".parse().unwrap()] });
    assert_eq!(c.differences[0].field, Field::Overrides);
    let man = m.entry(lexibase::EntryId(1)).unwrap();
    assert_eq!(man.overrides.len(), 2);
    assert_eq!(man.overrides[&"NOM,PL".parse().unwrap()], "men");
    assert_eq!(man.overrides[&"GEN,PL".parse().unwrap()], "men's");
}

#[test]
fn stems_differences_are_conflicts_not_duplicates() {
    let a = spring_store("mechanics", "spring");
    let b = spring_store("mechanics", "sprin");
    let (m, report) = merge(&a, &b, MergeMode::PreferLeft);
    assert_eq!(m.stats().entries, 2);
    assert_eq!(report.conflicts[0].differences[0].field, Field::Stems);
}

#[test]
fn ranks_interleave_left_before_right() {
    let build = |targets: &[(&str, &str, &str)]| {
        let s = empty();
        s.write(|tx| {
            let en = tx.upsert_entry(common::noun(Language::En, "spring", "spring", "n-reg"))?;
            for (lemma, stem, class) in targets {
                let lt = tx.upsert_entry(common::noun(Language::Lt, lemma, stem, class))?;
                tx.add_link(en, lt, None, None)?;
            }
            Ok(())
        })
        .unwrap();
        s
    };
    let a = build(&[("pavasaris", "pavasar", "d1is"), ("šaltinis", "šaltin", "d1is")]);
    let b = build(&[("spyruoklė", "spyruokl", "d2e"), ("pavasaris", "pavasar", "d1is")]);
    let (m, report) = merge(&a, &b, MergeMode::Union);
    assert_eq!(report.conflicts.len(), 1);
    assert_eq!(report.conflicts[0].differences[0].field, Field::Links);
    let out: Vec<_> = translate(&m, "spring", Direction::EnLt, None, None)
        .into_iter()
        .map(|c| (c.target_lemma, c.rank))
        .collect();
    assert_eq!(out, [("pavasaris".to_string(), 1), ("spyruoklė".to_string(), 2), ("šaltinis".to_string(), 3)]);
    m.check_rank_contiguity().unwrap();
}

#[test]
fn merge_conserves_entries_and_keeps_invariants() {
    for seed in 0..20 {
        let a = common::random_store(seed, 25, 30);
        let b = common::random_store(seed + 100, 25, 30);
        for mode in [MergeMode::PreferLeft, MergeMode::PreferRight, MergeMode::Union] {
            let (m, _) = merge(&a, &b, mode);
            let (na, nb) = (a.snapshot().stats().entries, b.snapshot().stats().entries);
            assert!(m.stats().entries <= na + nb);
            assert!(m.stats().entries >= na.max(nb));
            m.check_rank_contiguity().unwrap();
            m.check_index_freshness().unwrap();
            // Inputs are untouched.
            assert_eq!(a.snapshot().stats().entries, na);
        }
    }
}
