//! `lexibase` command-line interface.

mod error;

use std::collections::BTreeMap;
use std::io::{BufReader, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use lexibase::storage::interchange;
use lexibase::{
    analyze, generate_paradigm, merge_stores, prefix_search, translate, Defectiveness, Direction, DomainId, EntryId,
    FeatureBundle, Gender, Language, LexicalEntry, LexiconStore, MergeMode, MergePolicy, OpenOptions,
    ParadigmRegistry, Pos, Regularity, Snapshot, StoreError,
};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "lexibase", version, about = "English/Lithuanian lexicon engine")]
struct Cli {
    /// Store file to operate on.
    #[arg(long, global = true, env = "LEXIBASE_STORE")]
    store: Option<PathBuf>,
    /// Print results as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Create an empty store.
    Init { path: PathBuf },
    /// Add an entry and print its id.
    Add(AddArgs),
    /// Add a domain tag.
    Domain { name: String },
    /// Link an English entry to a Lithuanian entry.
    Link {
        #[arg(long)]
        en: u64,
        #[arg(long)]
        lt: u64,
        #[arg(long)]
        domain: Option<String>,
        #[arg(long)]
        note: Option<String>,
    },
    /// Print the generated paradigm of an entry.
    Gen {
        #[arg(long, conflicts_with = "lemma", required_unless_present = "lemma")]
        id: Option<u64>,
        #[arg(long)]
        lemma: Option<String>,
        #[arg(long, requires = "lemma")]
        lang: Option<Language>,
    },
    /// Translate a lemma or inflected form.
    Translate {
        #[arg(long)]
        q: String,
        #[arg(long)]
        dir: Direction,
        /// Domain id or name to prefer.
        #[arg(long)]
        domain: Option<String>,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// List every entry and feature bundle a surface form realizes.
    Analyze {
        #[arg(long)]
        q: String,
        #[arg(long)]
        lang: Language,
    },
    /// List lemmas starting with a prefix.
    Search {
        #[arg(long)]
        prefix: String,
        #[arg(long)]
        lang: Language,
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
    /// Print store statistics.
    Stats,
    /// Write the store as interchange text (`-` for stdout).
    Export {
        #[arg(long)]
        out: PathBuf,
    },
    /// Load interchange text (`-` for stdin) into the store.
    Import {
        #[arg(long = "in")]
        input: PathBuf,
        /// Overwrite a non-empty store.
        #[arg(long)]
        replace: bool,
    },
    /// Merge two stores (or interchange files) into a new store.
    Merge {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        policy: MergeMode,
        #[arg(long)]
        out: PathBuf,
        /// Also write the conflict report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Measure lookup latency on a synthetic or existing store.
    Bench {
        #[arg(long, default_value_t = 1_000_000)]
        forms: usize,
        #[arg(long, default_value_t = 1_000)]
        queries: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run the HTTP service until interrupted.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
    },
}

#[derive(Debug, Args)]
struct AddArgs {
    #[arg(long)]
    lang: Language,
    #[arg(long)]
    pos: Pos,
    #[arg(long)]
    lemma: String,
    /// Comma-separated stems.
    #[arg(long, value_delimiter = ',', required = true)]
    stems: Vec<String>,
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    gender: Option<Gender>,
    #[arg(long)]
    regularity: Option<Regularity>,
    #[arg(long, default_value = "none")]
    defective: Defectiveness,
    /// Comma-separated domain ids or names.
    #[arg(long, value_delimiter = ',')]
    domains: Vec<String>,
    /// Irregular form as `features=surface`, e.g. `tense=PAST=went`.
    #[arg(long = "override")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn store_path(cli: &Cli) -> Result<&Path, CliError> {
    cli.store
        .as_deref()
        .ok_or_else(|| CliError::Usage("--store (or LEXIBASE_STORE) is required".into()))
}

fn open(cli: &Cli) -> Result<LexiconStore, CliError> {
    Ok(LexiconStore::open(store_path(cli)?, OpenOptions::default())?)
}

fn resolve_domain(snapshot: &Snapshot, key: &str) -> Result<DomainId, StoreError> {
    let found = match key.parse::<u64>() {
        Ok(n) => snapshot.domain(DomainId(n)).map(|d| d.id),
        Err(_) => snapshot.domain_by_name(key).map(|d| d.id),
    };
    found.ok_or_else(|| StoreError::NotFound(format!("domain `{key}`")))
}

fn parse_override(raw: &str) -> Result<(FeatureBundle, String), CliError> {
    let (features, surface) = raw
        .rsplit_once('=')
        .ok_or_else(|| CliError::Usage(format!("--override `{raw}` is not features=surface")))?;
    let bundle = features
        .parse()
        .map_err(|e| CliError::Usage(format!("--override `{raw}`: {e}")))?;
    Ok((bundle, surface.to_string()))
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Init { path } => {
            if path.exists() {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::AlreadyExists,
                    format!("{} already exists", path.display()),
                )
                .into());
            }
            LexiconStore::open(path, OpenOptions::create())?;
            println!("created {}", path.display());
        }
        Command::Add(a) => {
            let store = open(&cli)?;
            let overrides = a
                .overrides
                .iter()
                .map(|o| parse_override(o))
                .collect::<Result<BTreeMap<_, _>, _>>()?;
            let id = store.write(|tx| {
                let domains = a
                    .domains
                    .iter()
                    .map(|d| resolve_domain(tx.snapshot(), d))
                    .collect::<Result<_, _>>()?;
                let stems: Vec<&str> = a.stems.iter().map(String::as_str).collect();
                let mut entry = LexicalEntry::new(a.lang, a.pos, a.lemma.clone(), &stems, a.class.as_deref());
                entry.gender = a.gender;
                entry.regularity = a.regularity;
                entry.defectiveness = a.defective;
                entry.domains = domains;
                entry.overrides = overrides;
                tx.upsert_entry(entry)
            })?;
            if cli.json {
                print_json(&store.get_entry(id));
            } else {
                println!("{id}");
            }
        }
        Command::Domain { name } => {
            let tag = open(&cli)?.add_domain(name)?;
            if cli.json {
                print_json(&tag);
            } else {
                println!("{}\t{}", tag.id, tag.name);
            }
        }
        Command::Link { en, lt, domain, note } => {
            let store = open(&cli)?;
            let link = store.write(|tx| {
                let domain = domain.as_deref().map(|d| resolve_domain(tx.snapshot(), d)).transpose()?;
                tx.add_link(EntryId(*en), EntryId(*lt), domain, note.clone())
            })?;
            if cli.json {
                print_json(&link);
            } else {
                println!("{}\t{}\t{}", link.id, link.rank_en_lt, link.rank_lt_en);
            }
        }
        Command::Gen { id, lemma, lang } => {
            let snap = open(&cli)?.snapshot();
            let ids: Vec<EntryId> = match (id, lemma) {
                (Some(id), _) => vec![EntryId(*id)],
                (None, Some(lemma)) => {
                    let langs = match lang {
                        Some(l) => vec![*l],
                        None => vec![Language::En, Language::Lt],
                    };
                    langs.into_iter().flat_map(|l| snap.entries_with_lemma(l, lemma)).collect()
                }
                (None, None) => unreachable!("clap requires --id or --lemma"),
            };
            if ids.is_empty() {
                return Err(StoreError::NotFound(format!("lemma `{}`", lemma.as_deref().unwrap_or(""))).into());
            }
            let mut tables = Vec::new();
            for id in ids {
                let entry = snap.entry(id).ok_or_else(|| StoreError::NotFound(format!("entry {id}")))?;
                let forms = generate_paradigm(entry, snap.registry()).map_err(StoreError::Generate)?;
                tables.push((entry, forms));
            }
            if cli.json {
                let out: Vec<_> = tables
                    .iter()
                    .map(|(e, f)| serde_json::json!({"entry": e.id, "lemma": e.lemma, "forms": f}))
                    .collect();
                print_json(&out);
            } else {
                for (i, (entry, forms)) in tables.iter().enumerate() {
                    if i > 0 {
                        println!();
                    }
                    println!("# {} {} {} ({})", entry.id, entry.language, entry.lemma, entry.pos);
                    for f in forms {
                        println!("{}\t{}\t{}", f.features, f.surface, f.origin);
                    }
                }
            }
        }
        Command::Translate { q, dir, domain, limit } => {
            let snap = open(&cli)?.snapshot();
            let domain = domain.as_deref().map(|d| resolve_domain(&snap, d)).transpose()?;
            let out = translate(&snap, q, *dir, domain, *limit);
            if cli.json {
                print_json(&out);
            } else {
                for c in out {
                    let domain = c.domain.and_then(|d| snap.domain(d)).map(|d| d.name.as_str()).unwrap_or("-");
                    println!("{}\t{}\t{}\t{}", c.rank, c.target_lemma, domain, c.target_entry);
                }
            }
        }
        Command::Analyze { q, lang } => {
            let snap = open(&cli)?.snapshot();
            let out = analyze(&snap, q, *lang);
            if cli.json {
                print_json(&out);
            } else {
                for a in out {
                    println!("{}\t{}\t{}", a.lemma, a.features, a.entry);
                }
            }
        }
        Command::Search { prefix, lang, limit } => {
            let snap = open(&cli)?.snapshot();
            let out = prefix_search(&snap, prefix, *lang, *limit);
            if cli.json {
                print_json(&out);
            } else {
                out.iter().for_each(|l| println!("{l}"));
            }
        }
        Command::Stats => {
            let stats = open(&cli)?.snapshot().stats();
            if cli.json {
                print_json(&stats);
            } else {
                println!(
                    "entries {}\nlinks {}\ndomains {}\nforms {}",
                    stats.entries, stats.links, stats.domains, stats.forms
                );
            }
        }
        Command::Export { out } => {
            let store = open(&cli)?;
            if out == Path::new("-") {
                let stdout = std::io::stdout();
                store.export(stdout.lock())?;
            } else {
                let mut file = std::io::BufWriter::new(std::fs::File::create(out)?);
                store.export(&mut file)?;
                file.flush()?;
                file.into_inner().map_err(|e| e.into_error())?.sync_all()?;
            }
        }
        Command::Import { input, replace } => {
            let path = store_path(&cli)?;
            let mut text = String::new();
            if input == Path::new("-") {
                std::io::stdin().read_to_string(&mut text)?;
            } else {
                std::fs::File::open(input)?.read_to_string(&mut text)?;
            }
            let stats = if path.exists() {
                let store = open(&cli)?;
                let incoming = interchange::import(text.as_bytes(), Arc::clone(store.snapshot().registry()))?;
                store.write(|tx| {
                    let s = tx.snapshot().stats();
                    if !replace && s.entries + s.domains > 0 {
                        return Err(StoreError::NotEmpty);
                    }
                    tx.replace_with(incoming);
                    Ok(())
                })?;
                store.snapshot().stats()
            } else {
                let registry = Arc::new(ParadigmRegistry::shipped());
                LexiconStore::import(text.as_bytes(), Some(path), registry)?.snapshot().stats()
            };
            if cli.json {
                print_json(&stats);
            } else {
                println!("imported {} entries, {} links, {} domains", stats.entries, stats.links, stats.domains);
            }
        }
        Command::Merge { left, right, policy, out, report } => {
            if out.exists() {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::AlreadyExists,
                    format!("{} already exists", out.display()),
                )
                .into());
            }
            let left = load_side(left, None)?;
            let right = load_side(right, Some(Arc::clone(left.registry())))?;
            let (merged, conflicts) = merge_stores(&left, &right, MergePolicy::new(*policy))?;
            LexiconStore::from_snapshot(merged, Some(out))?;
            if let Some(path) = report {
                std::fs::write(path, conflicts.to_text())?;
            }
            if cli.json {
                print_json(&conflicts);
            } else {
                print!("{}", conflicts.to_text());
            }
        }
        Command::Bench { forms, queries, seed } => {
            if *forms == 0 {
                return Err(CliError::Usage("--forms must be at least 1".into()));
            }
            let report = match &cli.store {
                Some(path) => lexibase::bench::run_bench_store(path, *seed, *queries)?,
                None => {
                    let dir = tempfile::tempdir()?;
                    lexibase::bench::run_bench(*forms, *seed, *queries, &dir.path().join("bench.store"))?
                }
            };
            print_json(&report);
        }
        Command::Serve { bind } => {
            let store = LexiconStore::open(store_path(&cli)?, OpenOptions::create())?;
            let runtime = tokio::runtime::Runtime::new()?;
            eprintln!("listening on {bind}");
            runtime.block_on(lexibase_api::serve(Arc::new(store), *bind, async {
                let _ = tokio::signal::ctrl_c().await;
            }))?;
        }
    }
    Ok(())
}

const INTERCHANGE_HEADER: &[u8] = b"lexibase-interchange";

/// A merge input: a store file, or an interchange file detected by its header.
fn load_side(path: &Path, registry: Option<Arc<ParadigmRegistry>>) -> Result<Snapshot, CliError> {
    let mut head = [0u8; INTERCHANGE_HEADER.len()];
    let n = std::fs::File::open(path)?.read(&mut head)?;
    if head[..n] == *INTERCHANGE_HEADER {
        let registry = registry.unwrap_or_else(|| Arc::new(ParadigmRegistry::shipped()));
        let reader = BufReader::new(std::fs::File::open(path)?);
        return Ok(interchange::import(reader, registry)?);
    }
    Ok((*LexiconStore::open(path, OpenOptions::default())?.snapshot()).clone())
}
