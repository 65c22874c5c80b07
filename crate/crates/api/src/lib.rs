//! HTTP+JSON service over a lexicon store.
//!
//! Every handler is a thin wrapper around one core operation. Writes run on
//! the blocking pool because a commit ends with an fsync.

mod error;

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{FromRequest, FromRequestParts, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use lexibase::lexicon::validate_entry;
use lexibase::storage::{interchange, DeletionReport, StoreStats};
use lexibase::{
    analyze, merge_stores, prefix_search, translate, Analysis, ConflictReport, Direction, DomainId, DomainTag,
    EntryId, GeneratedForm, Language, LexicalEntry, LexiconStore, LinkId, MergeMode, MergePolicy, OpenOptions,
    Snapshot, StoreError, TranslationCandidate, TranslationLink,
};
use serde::{Deserialize, Serialize};

pub use error::{codes, ApiError};

type ApiResult<T> = Result<T, ApiError>;

#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(ApiError))]
struct ApiJson<T>(T);

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Query), rejection(ApiError))]
struct ApiQuery<T>(T);

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Path), rejection(ApiError))]
struct ApiPath<T>(T);

/// Default and maximum page sizes of list endpoints.
pub const DEFAULT_LIMIT: usize = 50;
pub const MAX_LIMIT: usize = 1000;
/// Default number of prefix search results.
pub const DEFAULT_SEARCH_LIMIT: usize = 20;

#[derive(Clone)]
pub struct AppState {
    store: Arc<LexiconStore>,
}

pub fn router(store: Arc<LexiconStore>) -> Router {
    Router::new()
        .route("/entries", post(create_entry).get(list_entries))
        .route("/entries/{id}", get(get_entry).put(update_entry).delete(delete_entry))
        .route("/entries/{id}/paradigm", get(entry_paradigm))
        .route("/entries/{id}/links", get(entry_links))
        .route("/entries/{id}/links/order", put(reorder_links))
        .route("/paradigm/preview", post(preview))
        .route("/links", post(create_link))
        .route("/links/{id}", axum::routing::delete(delete_link))
        .route("/translate", get(translate_handler))
        .route("/analyze", get(analyze_handler))
        .route("/search", get(search))
        .route("/domains", get(list_domains).post(create_domain))
        .route("/merge", post(merge))
        .route("/export", get(export))
        .route("/import", post(import))
        .route("/stats", get(stats))
        .with_state(AppState { store })
}

/// Serves `store` on `bind` until `shutdown` resolves; in-flight requests
/// (and so any running commit) finish before this returns.
pub async fn serve(
    store: Arc<LexiconStore>,
    bind: SocketAddr,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    serve_on(tokio::net::TcpListener::bind(bind).await?, store, shutdown).await
}

/// Like [`serve`] on an already bound listener.
pub async fn serve_on(
    listener: tokio::net::TcpListener,
    store: Arc<LexiconStore>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(store)).with_graceful_shutdown(shutdown).await
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, codes::INTERNAL, e.to_string()))?
}

fn parse_language(s: &str) -> ApiResult<Language> {
    s.to_ascii_uppercase()
        .parse()
        .map_err(|_| ApiError::bad_request(format!("unknown language `{s}` (EN, LT)")).with_field("lang"))
}

fn parse_direction(s: &str) -> ApiResult<Direction> {
    s.to_ascii_lowercase()
        .parse()
        .map_err(|_| ApiError::bad_request(format!("unknown direction `{s}` (en-lt, lt-en)")).with_field("dir"))
}

/// A domain given either by numeric id or by name.
fn resolve_domain(snap: &Snapshot, s: &str) -> ApiResult<DomainId> {
    let found = match s.parse::<u64>() {
        Ok(n) => snap.domain(DomainId(n)),
        Err(_) => snap.domain_by_name(s),
    };
    found
        .map(|d| d.id)
        .ok_or_else(|| ApiError::from(StoreError::NotFound(format!("domain `{s}`"))).with_field("domain"))
}

fn not_found(what: String) -> ApiError {
    StoreError::NotFound(what).into()
}

// ---- entries ----

#[derive(Debug, Deserialize)]
pub struct ListParams {
    pub lang: Option<String>,
    pub offset: Option<usize>,
    pub limit: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Page<T> {
    pub total: usize,
    pub offset: usize,
    pub limit: usize,
    pub items: Vec<T>,
}

async fn list_entries(
    State(s): State<AppState>,
    ApiQuery(p): ApiQuery<ListParams>,
) -> ApiResult<Json<Page<LexicalEntry>>> {
    let lang = p.lang.as_deref().map(parse_language).transpose()?;
    let offset = p.offset.unwrap_or(0);
    let limit = p.limit.unwrap_or(DEFAULT_LIMIT).min(MAX_LIMIT);
    let snap = s.store.snapshot();
    let matching = snap.entries().filter(|e| lang.is_none_or(|l| e.language == l));
    let (mut total, mut items) = (0, Vec::new());
    for e in matching {
        if total >= offset && items.len() < limit {
            items.push(e.clone());
        }
        total += 1;
    }
    Ok(Json(Page { total, offset, limit, items }))
}

async fn create_entry(
    State(s): State<AppState>,
    ApiJson(mut entry): ApiJson<LexicalEntry>,
) -> ApiResult<impl IntoResponse> {
    entry.id = EntryId::NEW;
    let store = Arc::clone(&s.store);
    let saved = blocking(move || Ok(store.write(|tx| save(tx, entry))?)).await?;
    Ok((StatusCode::CREATED, Json(saved)))
}

async fn get_entry(State(s): State<AppState>, ApiPath(id): ApiPath<u64>) -> ApiResult<Json<LexicalEntry>> {
    s.store
        .get_entry(EntryId(id))
        .map(Json)
        .ok_or_else(|| not_found(format!("entry {id}")))
}

async fn update_entry(
    State(s): State<AppState>,
    ApiPath(id): ApiPath<u64>,
    ApiJson(mut entry): ApiJson<LexicalEntry>,
) -> ApiResult<Json<LexicalEntry>> {
    entry.id = EntryId(id);
    let store = Arc::clone(&s.store);
    blocking(move || {
        let saved = store.write(|tx| {
            if tx.snapshot().entry(entry.id).is_none() {
                return Err(StoreError::NotFound(format!("entry {id}")));
            }
            save(tx, entry)
        })?;
        Ok(Json(saved))
    })
    .await
}

/// Upserts and returns the entry as stored (normalized, id assigned).
fn save(tx: &mut lexibase::storage::Transaction<'_>, entry: LexicalEntry) -> Result<LexicalEntry, StoreError> {
    let id = tx.upsert_entry(entry)?;
    Ok(tx.snapshot().entry(id).cloned().expect("entry was just written"))
}

#[derive(Debug, Deserialize)]
pub struct DeleteParams {
    #[serde(default)]
    pub cascade: bool,
}

async fn delete_entry(
    State(s): State<AppState>,
    ApiPath(id): ApiPath<u64>,
    ApiQuery(p): ApiQuery<DeleteParams>,
) -> ApiResult<Json<DeletionReport>> {
    let store = Arc::clone(&s.store);
    blocking(move || Ok(Json(store.delete_entry(EntryId(id), p.cascade)?))).await
}

async fn entry_paradigm(State(s): State<AppState>, ApiPath(id): ApiPath<u64>) -> ApiResult<Json<Vec<GeneratedForm>>> {
    let snap = s.store.snapshot();
    let entry = snap.entry(EntryId(id)).ok_or_else(|| not_found(format!("entry {id}")))?;
    Ok(Json(snap.paradigm(entry)?))
}

async fn entry_links(State(s): State<AppState>, ApiPath(id): ApiPath<u64>) -> ApiResult<Json<Vec<TranslationLink>>> {
    let snap = s.store.snapshot();
    if snap.entry(EntryId(id)).is_none() {
        return Err(not_found(format!("entry {id}")));
    }
    Ok(Json(snap.links_of(EntryId(id)).into_iter().cloned().collect()))
}

// ---- paradigm preview ----

async fn preview(
    State(s): State<AppState>,
    ApiJson(mut draft): ApiJson<LexicalEntry>,
) -> ApiResult<Json<Vec<GeneratedForm>>> {
    draft.normalize();
    let snap = s.store.snapshot();
    let verdict = validate_entry(&draft, snap.registry());
    if !verdict.is_accepted() {
        return Err(StoreError::Validation(verdict).into());
    }
    Ok(Json(snap.paradigm(&draft)?))
}

// ---- links ----

#[derive(Debug, Serialize, Deserialize)]
pub struct NewLink {
    pub en_entry: EntryId,
    pub lt_entry: EntryId,
    #[serde(default)]
    pub domain: Option<DomainId>,
    #[serde(default)]
    pub note: Option<String>,
}

async fn create_link(
    State(s): State<AppState>,
    ApiJson(l): ApiJson<NewLink>,
) -> ApiResult<impl IntoResponse> {
    let store = Arc::clone(&s.store);
    let link = blocking(move || Ok(store.write(|tx| tx.add_link(l.en_entry, l.lt_entry, l.domain, l.note))?)).await?;
    Ok((StatusCode::CREATED, Json(link)))
}

async fn delete_link(State(s): State<AppState>, ApiPath(id): ApiPath<u64>) -> ApiResult<Json<TranslationLink>> {
    let store = Arc::clone(&s.store);
    blocking(move || Ok(Json(store.write(|tx| tx.delete_link(LinkId(id)))?))).await
}

#[derive(Debug, Deserialize)]
pub struct DirParam {
    pub dir: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LinkOrder {
    pub order: Vec<LinkId>,
}

async fn reorder_links(
    State(s): State<AppState>,
    ApiPath(id): ApiPath<u64>,
    ApiQuery(p): ApiQuery<DirParam>,
    ApiJson(order): ApiJson<LinkOrder>,
) -> ApiResult<Json<Vec<TranslationLink>>> {
    let direction = parse_direction(&p.dir)?;
    let store = Arc::clone(&s.store);
    blocking(move || Ok(Json(store.write(|tx| tx.reorder(EntryId(id), direction, &order.order))?))).await
}

// ---- queries ----

#[derive(Debug, Deserialize)]
pub struct TranslateParams {
    pub q: String,
    pub dir: String,
    pub domain: Option<String>,
    pub limit: Option<usize>,
}

async fn translate_handler(
    State(s): State<AppState>,
    ApiQuery(p): ApiQuery<TranslateParams>,
) -> ApiResult<Json<Vec<TranslationCandidate>>> {
    let direction = parse_direction(&p.dir)?;
    let snap = s.store.snapshot();
    let domain = p
        .domain
        .as_deref()
        .filter(|d| !d.is_empty())
        .map(|d| resolve_domain(&snap, d))
        .transpose()?;
    Ok(Json(translate(&snap, &p.q, direction, domain, p.limit)))
}

#[derive(Debug, Deserialize)]
pub struct AnalyzeParams {
    pub q: String,
    pub lang: String,
}

async fn analyze_handler(
    State(s): State<AppState>,
    ApiQuery(p): ApiQuery<AnalyzeParams>,
) -> ApiResult<Json<Vec<Analysis>>> {
    let language = parse_language(&p.lang)?;
    Ok(Json(analyze(&s.store.snapshot(), &p.q, language)))
}

#[derive(Debug, Deserialize)]
pub struct SearchParams {
    #[serde(default)]
    pub prefix: String,
    pub lang: String,
    pub limit: Option<usize>,
}

async fn search(
    State(s): State<AppState>,
    ApiQuery(p): ApiQuery<SearchParams>,
) -> ApiResult<Json<Vec<String>>> {
    let language = parse_language(&p.lang)?;
    let limit = p.limit.unwrap_or(DEFAULT_SEARCH_LIMIT).min(MAX_LIMIT);
    Ok(Json(prefix_search(&s.store.snapshot(), &p.prefix, language, limit)))
}

// ---- domains ----

async fn list_domains(State(s): State<AppState>) -> Json<Vec<DomainTag>> {
    Json(s.store.snapshot().domains().cloned().collect())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NewDomain {
    pub name: String,
}

async fn create_domain(
    State(s): State<AppState>,
    ApiJson(d): ApiJson<NewDomain>,
) -> ApiResult<impl IntoResponse> {
    let store = Arc::clone(&s.store);
    let tag = blocking(move || Ok(store.add_domain(&d.name)?)).await?;
    Ok((StatusCode::CREATED, Json(tag)))
}

// ---- merge, import, export ----

/// One side of a merge: an existing store file or an interchange text.
#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeSource {
    Path(PathBuf),
    Interchange(String),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MergeRequest {
    pub left: MergeSource,
    pub right: MergeSource,
    pub policy: MergeMode,
    /// Where to write the merged store; the merged interchange text is
    /// returned instead when absent.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MergeResponse {
    pub report: ConflictReport,
    pub stats: StoreStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interchange: Option<String>,
}

fn load_source(source: MergeSource, registry: &Arc<lexibase::ParadigmRegistry>) -> Result<Snapshot, StoreError> {
    match source {
        MergeSource::Path(p) => {
            let store = LexiconStore::open(p, OpenOptions::default())?;
            Ok((*store.snapshot()).clone())
        }
        MergeSource::Interchange(text) => interchange::import(text.as_bytes(), Arc::clone(registry)),
    }
}

async fn merge(
    State(s): State<AppState>,
    ApiJson(req): ApiJson<MergeRequest>,
) -> ApiResult<Json<MergeResponse>> {
    let registry = Arc::clone(s.store.snapshot().registry());
    blocking(move || {
        let left = load_source(req.left, &registry)?;
        let right = load_source(req.right, &registry)?;
        let (merged, report) = merge_stores(&left, &right, MergePolicy::new(req.policy))?;
        let stats = merged.stats();
        let interchange = match req.out {
            Some(path) => {
                if path.exists() {
                    return Err(ApiError::new(
                        StatusCode::CONFLICT,
                        codes::IO_ERROR,
                        format!("{} already exists", path.display()),
                    )
                    .with_field("out"));
                }
                LexiconStore::from_snapshot(merged, Some(&path))?;
                None
            }
            None => Some(interchange::export_string(&merged)),
        };
        Ok(Json(MergeResponse { report, stats, interchange }))
    })
    .await
}

async fn export(State(s): State<AppState>) -> impl IntoResponse {
    let text = interchange::export_string(&s.store.snapshot());
    ([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text)
}

#[derive(Debug, Deserialize)]
pub struct ImportParams {
    #[serde(default)]
    pub replace: bool,
}

async fn import(
    State(s): State<AppState>,
    ApiQuery(p): ApiQuery<ImportParams>,
    body: String,
) -> ApiResult<Json<StoreStats>> {
    let store = Arc::clone(&s.store);
    blocking(move || {
        let registry = Arc::clone(store.snapshot().registry());
        let incoming = interchange::import(body.as_bytes(), registry)?;
        store.write(|tx| {
            if !p.replace && tx.snapshot().stats().entries + tx.snapshot().stats().domains > 0 {
                return Err(StoreError::NotEmpty);
            }
            tx.replace_with(incoming);
            Ok(())
        })?;
        Ok(Json(store.snapshot().stats()))
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Stats {
    #[serde(flatten)]
    pub counts: StoreStats,
    pub commits: u64,
}

async fn stats(State(s): State<AppState>) -> Json<Stats> {
    let snap = s.store.snapshot();
    Json(Stats { counts: snap.stats(), commits: snap.commits() })
}
