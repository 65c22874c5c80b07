use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lexibase::morphology::generate_paradigm;
use lexibase::synth::synthesize;
use lexibase::{par, ParadigmRegistry};

fn paradigm_generation(c: &mut Criterion) {
    let registry = Arc::new(ParadigmRegistry::shipped());
    let mut group = c.benchmark_group("paradigm_generation");
    group.sample_size(10);
    for forms in [10_000usize, 100_000] {
        let snapshot = synthesize(forms, 7, Arc::clone(&registry)).expect("synthetic lexicon");
        let entries: Vec<_> = snapshot.entries().cloned().collect();
        group.bench_with_input(BenchmarkId::new("sequential", forms), &entries, |b, entries| {
            b.iter(|| par::map_sequential(entries, |e| generate_paradigm(e, &registry).map(|f| f.len())))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", forms), &entries, |b, entries| {
            b.iter(|| par::map_parallel(entries, |e| generate_paradigm(e, &registry).map(|f| f.len())))
        });
    }
    group.finish();
}

fn index_rebuild(c: &mut Criterion) {
    let registry = Arc::new(ParadigmRegistry::shipped());
    let snapshot = synthesize(100_000, 7, Arc::clone(&registry)).expect("synthetic lexicon");
    let text = lexibase::storage::interchange::export_string(&snapshot);
    let mut group = c.benchmark_group("index_rebuild");
    group.sample_size(10);
    group.bench_function(if par::is_parallel() { "parallel" } else { "sequential" }, |b| {
        b.iter(|| lexibase::storage::interchange::import(text.as_bytes(), Arc::clone(&registry)).expect("import"))
    });
    group.finish();
}

criterion_group!(benches, paradigm_generation, index_rebuild);
criterion_main!(benches);
