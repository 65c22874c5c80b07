//! Lookup latency measurement over a synthetic on-disk store.

use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lexicon::Direction;
use crate::lookup::translate;
use crate::morphology::ParadigmRegistry;
use crate::par;
use crate::storage::{LexiconStore, OpenOptions, StoreError};
use crate::synth::synthesize;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub entries: usize,
    pub forms: usize,
    pub links: usize,
    pub queries: usize,
    pub parallel: bool,
    pub build_ms: f64,
    pub open_ms: f64,
    /// First query after the store was opened.
    pub cold_ms: f64,
    /// Median over the queries after the first.
    pub warm_ms: f64,
    pub warm_p95_ms: f64,
    pub hardware: String,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

pub fn hardware_note() -> String {
    format!(
        "{} {} threads={}",
        std::env::consts::OS,
        std::env::consts::ARCH,
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    )
}

/// Builds a synthetic store of `forms` postings at `path` (replacing any
/// file there) and benchmarks it with [`run_bench_store`].
pub fn run_bench(forms: usize, seed: u64, queries: usize, path: &Path) -> Result<BenchReport, StoreError> {
    let started = Instant::now();
    let snapshot = synthesize(forms, seed, Arc::new(ParadigmRegistry::shipped()))?;
    let _ = std::fs::remove_file(path);
    drop(LexiconStore::from_snapshot(snapshot, Some(path))?);
    let build_ms = ms(started.elapsed());
    let mut report = run_bench_store(path, seed, queries)?;
    report.build_ms = build_ms;
    Ok(report)
}

/// Opens the store at `path` cold, then times one lookup (cold) and
/// `queries` further lookups (warm) of uniformly sampled indexed forms.
pub fn run_bench_store(path: &Path, seed: u64, queries: usize) -> Result<BenchReport, StoreError> {
    let opened = Instant::now();
    let store = LexiconStore::open(path, OpenOptions::default())?;
    let open_ms = ms(opened.elapsed());
    let snap = store.snapshot();
    let stats = snap.stats();

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let entries: Vec<_> = snap.entries().collect();
    let mut sample = Vec::with_capacity(queries + 1);
    if !entries.is_empty() {
        // Entry-weighted draws would favour small paradigms; draw forms instead.
        let weights: Vec<usize> = par::map(&entries, |e| snap.paradigm(e).map(|f| f.len()).unwrap_or(0));
        let total: usize = weights.iter().sum();
        let mut picks: Vec<usize> = (0..=queries).map(|_| rng.random_range(0..total.max(1))).collect();
        picks.sort_unstable();
        let (mut acc, mut i) = (0usize, 0usize);
        let mut drawn = Vec::with_capacity(picks.len());
        for (entry, w) in entries.iter().zip(&weights) {
            while i < picks.len() && picks[i] < acc + w {
                drawn.push((*entry, picks[i] - acc));
                i += 1;
            }
            acc += w;
        }
        for (entry, k) in drawn {
            let form = &snap.paradigm(entry)?[k];
            sample.push((form.surface.clone(), Direction::from_source(entry.language)));
        }
        sample.shuffle(&mut rng);
    }

    let mut timings = Vec::with_capacity(sample.len());
    for (q, dir) in &sample {
        let t = Instant::now();
        std::hint::black_box(translate(&snap, q, *dir, None, None));
        timings.push(ms(t.elapsed()));
    }
    let cold_ms = timings.first().copied().unwrap_or(0.0);
    let mut warm: Vec<f64> = timings.iter().skip(1).copied().collect();
    warm.sort_by(f64::total_cmp);
    let pick = |q: f64| warm.get(((warm.len() as f64 - 1.0) * q).round() as usize).copied().unwrap_or(cold_ms);

    Ok(BenchReport {
        entries: stats.entries,
        forms: stats.forms,
        links: stats.links,
        queries: warm.len(),
        parallel: par::is_parallel(),
        build_ms: 0.0,
        open_ms,
        cold_ms,
        warm_ms: pick(0.5),
        warm_p95_ms: pick(0.95),
        hardware: hardware_note(),
    })
}
