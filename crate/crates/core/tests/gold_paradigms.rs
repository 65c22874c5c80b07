mod common;

use lexibase::ParadigmRegistry;

#[test]
fn gold_paradigms_match() {
    let registry = ParadigmRegistry::shipped();
    let cases = common::gold_cases();
    assert!(cases.len() >= 30, "only {} gold entries", cases.len());
    let problems: Vec<String> = cases.iter().flat_map(|c| common::check_case(c, &registry)).collect();
    assert!(problems.is_empty(), "{} mismatches:\n{}", problems.len(), problems.join("\n"));
}

#[test]
fn gold_entries_validate() {
    let registry = ParadigmRegistry::shipped();
    for case in common::gold_cases() {
        let verdict = lexibase::validate_entry(&case.entry, &registry);
        assert!(verdict.is_accepted(), "{}:{}: {verdict}", case.file, case.line);
    }
}
