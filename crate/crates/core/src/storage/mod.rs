//! Single-file lexicon store with snapshot reads and serialized writes.
//!
//! Readers take an `Arc<Snapshot>` and keep a consistent view for as long as
//! they hold it. Writers run one at a time on a private copy of the current
//! snapshot; the copy is written to disk (temp file + rename) and only then
//! published, so a failed or interrupted write leaves the previous committed
//! state both on disk and in memory.

mod file;
pub mod interchange;
mod snapshot;

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use thiserror::Error;

use crate::features::Language;
use crate::lexicon::{
    Direction, DomainId, DomainTag, EntryId, LexicalEntry, LinkId, TranslationLink, Verdict,
};
use crate::morphology::{GenerateError, ParadigmRegistry};

pub use file::FORMAT_VERSION;
pub use snapshot::{fold, DeletionReport, Posting, Snapshot, StoreStats};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("validation failed: {0}")]
    Validation(Verdict),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("{0} not found")]
    NotFound(String),
    #[error("unknown domain {0}")]
    UnknownDomain(DomainId),
    #[error("domain `{0}` already exists")]
    DuplicateDomain(String),
    #[error("invalid domain name `{0}`")]
    InvalidDomainName(String),
    #[error("entry {entry} is referenced by links {links:?}; delete with cascade to remove them")]
    LinksExist { entry: EntryId, links: Vec<LinkId> },
    #[error("entry {entry} is not a {expected} entry")]
    LanguageMismatch { entry: EntryId, expected: Language },
    #[error("entry {0} has links; its language cannot change")]
    LanguageChangeWithLinks(EntryId),
    #[error("link {en} -> {lt} with domain {domain:?} already exists")]
    DuplicateLink {
        en: EntryId,
        lt: EntryId,
        domain: Option<DomainId>,
    },
    #[error("bad permutation: {0}")]
    BadPermutation(String),
    #[error("store is not empty")]
    NotEmpty,
    #[error("interchange record {record}: {message}")]
    Format { record: usize, message: String },
    #[error("interchange record {record}: integrity error: {message}")]
    Integrity { record: usize, message: String },
    #[error("store file is corrupt: {0}")]
    Corruption(String),
    #[error("store format version {found} is newer than supported version {supported}")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Default)]
pub struct OpenOptions {
    pub create: bool,
    /// Registry for a newly created store; the shipped one when `None`.
    pub registry: Option<Arc<ParadigmRegistry>>,
}

impl OpenOptions {
    pub fn create() -> Self {
        OpenOptions { create: true, registry: None }
    }
}

/// A mutable view of a snapshot inside [`LexiconStore::write`].
pub struct Transaction<'a> {
    snap: &'a mut Snapshot,
}

impl Transaction<'_> {
    /// The transaction's own (uncommitted) view.
    pub fn snapshot(&self) -> &Snapshot {
        self.snap
    }

    pub fn upsert_entry(&mut self, entry: LexicalEntry) -> Result<EntryId> {
        self.snap.upsert_entry(entry)
    }

    pub fn delete_entry(&mut self, id: EntryId, cascade: bool) -> Result<DeletionReport> {
        self.snap.delete_entry(id, cascade)
    }

    pub fn add_domain(&mut self, name: &str) -> Result<DomainTag> {
        self.snap.add_domain(name)
    }

    pub fn add_link(
        &mut self,
        en: EntryId,
        lt: EntryId,
        domain: Option<DomainId>,
        note: Option<String>,
    ) -> Result<TranslationLink> {
        self.snap.add_link(en, lt, domain, note)
    }

    pub fn delete_link(&mut self, id: LinkId) -> Result<TranslationLink> {
        self.snap.delete_link(id)
    }

    pub fn reorder(
        &mut self,
        source: EntryId,
        direction: Direction,
        order: &[LinkId],
    ) -> Result<Vec<TranslationLink>> {
        self.snap.reorder(source, direction, order)
    }

    /// Replaces the whole content with `other` (used by import).
    pub fn replace_with(&mut self, other: Snapshot) {
        let commits = self.snap.counters.commits;
        *self.snap = other;
        self.snap.counters.commits = commits;
    }
}

#[derive(Debug)]
pub struct LexiconStore {
    path: Option<PathBuf>,
    current: RwLock<Arc<Snapshot>>,
    writer: Mutex<()>,
}

impl LexiconStore {
    /// Opens the store at `path`, creating an empty one if allowed.
    pub fn open(path: impl AsRef<Path>, options: OpenOptions) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let snapshot = match std::fs::read(&path) {
            Ok(bytes) => file::decode(&bytes)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound && options.create => {
                let registry = options
                    .registry
                    .unwrap_or_else(|| Arc::new(ParadigmRegistry::shipped()));
                let snap = Snapshot::empty(registry);
                file::write_atomic(&path, &snap)?;
                snap
            }
            Err(e) => return Err(e.into()),
        };
        Ok(Self::from_parts(Some(path), snapshot))
    }

    /// A store that lives only in memory.
    pub fn in_memory(registry: Arc<ParadigmRegistry>) -> Self {
        Self::from_parts(None, Snapshot::empty(registry))
    }

    /// Wraps an existing snapshot, persisting it to `path` when given.
    pub fn from_snapshot(snapshot: Snapshot, path: Option<&Path>) -> Result<Self> {
        if let Some(p) = path {
            file::write_atomic(p, &snapshot)?;
        }
        Ok(Self::from_parts(path.map(Path::to_path_buf), snapshot))
    }

    fn from_parts(path: Option<PathBuf>, snapshot: Snapshot) -> Self {
        LexiconStore {
            path,
            current: RwLock::new(Arc::new(snapshot)),
            writer: Mutex::new(()),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// The latest committed snapshot.
    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Runs `f` as one serialized write transaction. Nothing becomes visible
    /// (in memory or on disk) unless `f` succeeds and the commit is durable.
    pub fn write<T>(&self, f: impl FnOnce(&mut Transaction<'_>) -> Result<T>) -> Result<T> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut working = (*self.snapshot()).clone();
        let out = f(&mut Transaction { snap: &mut working })?;
        working.counters.commits += 1;
        if let Some(path) = &self.path {
            file::write_atomic(path, &working)?;
        }
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(working);
        Ok(out)
    }

    pub fn get_entry(&self, id: EntryId) -> Option<LexicalEntry> {
        self.snapshot().entry(id).cloned()
    }

    pub fn upsert_entry(&self, entry: LexicalEntry) -> Result<EntryId> {
        self.write(|tx| tx.upsert_entry(entry))
    }

    pub fn delete_entry(&self, id: EntryId, cascade: bool) -> Result<DeletionReport> {
        self.write(|tx| tx.delete_entry(id, cascade))
    }

    pub fn add_domain(&self, name: &str) -> Result<DomainTag> {
        self.write(|tx| tx.add_domain(name))
    }

    /// Exports the current snapshot; returns the number of records written.
    pub fn export(&self, sink: impl Write) -> Result<usize> {
        Ok(interchange::export(&self.snapshot(), sink)?)
    }

    /// Creates a fresh store at `path` from an interchange stream. Indexes
    /// are rebuilt from the entries, never read from the file.
    pub fn import(source: impl BufRead, path: Option<&Path>, registry: Arc<ParadigmRegistry>) -> Result<Self> {
        if let Some(p) = path {
            if p.exists() {
                return Err(StoreError::Io(std::io::Error::new(
                    std::io::ErrorKind::AlreadyExists,
                    format!("{} already exists", p.display()),
                )));
            }
        }
        let snapshot = interchange::import(source, registry)?;
        Self::from_snapshot(snapshot, path)
    }
}
