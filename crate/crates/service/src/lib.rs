//! HTTP/JSON front end for [`bicrec::EngineState`].
//!
//! Readers grab an `Arc` snapshot of the whole state at request start and
//! never hold a lock while computing. Visits go through a single writer: the
//! next state is built from the current snapshot, persisted to the data
//! directory, and only then published and acknowledged.
//!
//! | route | body |
//! |-------|------|
//! | `GET /api/faculties` | `[{id, attributes}]` |
//! | `POST /api/sessions` | `{user_id}` |
//! | `POST /api/users/{id}/visits` | `{faculty_id}` → 204 |
//! | `GET /api/users/{id}/recommendations?seed=&n=&l_min=&mode=` | `{mode, seed_faculty, items}` |
//! | `GET /api/health` | `{status, faculties, users}` |

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use bicrec::api::{catalog_body, ErrorBody, FacultyBody, HealthBody, RecommendationBody, SessionBody, VisitBody};
use bicrec::{EngineState, Error, Mode};
use parking_lot::{Mutex, RwLock};
use serde::Deserialize;
use tokio::net::TcpListener;

/// Shared engine: the published snapshot plus the writer lock.
pub struct Engine {
    current: RwLock<Arc<EngineState>>,
    writer: Mutex<()>,
    persist: bool,
}

impl Engine {
    /// `persist = false` keeps everything in memory (tests, demos).
    pub fn new(state: EngineState, persist: bool) -> Arc<Engine> {
        Arc::new(Engine {
            current: RwLock::new(Arc::new(state)),
            writer: Mutex::new(()),
            persist,
        })
    }

    pub fn snapshot(&self) -> Arc<EngineState> {
        self.current.read().clone()
    }

    fn mutate<F>(&self, f: F) -> Result<(), Error>
    where
        F: FnOnce(&EngineState) -> Result<Option<EngineState>, Error>,
    {
        let _guard = self.writer.lock();
        let base = self.snapshot();
        if let Some(next) = f(&base)? {
            if self.persist {
                next.save()?;
            }
            *self.current.write() = Arc::new(next);
        }
        Ok(())
    }

    pub fn record_visit(&self, user: &str, faculty: &str) -> Result<(), Error> {
        self.mutate(|st| st.with_visit(user, faculty).map(Some))
    }

    pub fn open_session(&self) -> Result<String, Error> {
        let id = uuid::Uuid::new_v4().to_string();
        self.mutate(|st| {
            let mut next = st.clone();
            next.register_user(&id)?;
            // zero-history users have nothing to persist
            Ok(Some(next))
        })?;
        Ok(id)
    }
}

pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn bad_request(error: &str, detail: impl Into<String>) -> ApiError {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody {
                error: error.to_string(),
                detail: detail.into(),
            },
        }
    }
}

pub fn status_for(err: &Error) -> StatusCode {
    match err.root() {
        Error::UnknownFaculty(_) | Error::UnknownUser(_) | Error::UnknownAttribute(_) => StatusCode::NOT_FOUND,
        Error::ZeroVisits(_) => StatusCode::CONFLICT,
        Error::InvalidId { .. } | Error::ZeroLength | Error::Parse { .. } | Error::Invalid { .. } => {
            StatusCode::BAD_REQUEST
        }
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> ApiError {
        ApiError {
            status: status_for(&err),
            body: ErrorBody::from(&err),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> ApiError {
        ApiError::bad_request("ParseError", r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> ApiError {
        ApiError::bad_request("ParseError", r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type Shared = State<Arc<Engine>>;

async fn faculties(State(engine): Shared) -> Json<Vec<FacultyBody>> {
    Json(catalog_body(engine.snapshot().catalog()))
}

async fn health(State(engine): Shared) -> Json<HealthBody> {
    let st = engine.snapshot();
    Json(HealthBody {
        status: "ok".to_string(),
        faculties: st.catalog().faculties().len(),
        users: st.user_count(),
    })
}

async fn create_session(State(engine): Shared) -> Result<(StatusCode, Json<SessionBody>), ApiError> {
    let user_id = tokio::task::spawn_blocking(move || engine.open_session())
        .await
        .expect("session task")?;
    log::info!("new session {user_id}");
    Ok((StatusCode::CREATED, Json(SessionBody { user_id })))
}

async fn post_visit(
    State(engine): Shared,
    Path(user): Path<String>,
    body: Result<Json<VisitBody>, JsonRejection>,
) -> Result<StatusCode, ApiError> {
    let Json(visit) = body?;
    tokio::task::spawn_blocking(move || engine.record_visit(&user, &visit.faculty_id))
        .await
        .expect("visit task")?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Deserialize)]
pub struct RecommendQuery {
    pub seed: Option<String>,
    pub n: Option<usize>,
    pub l_min: Option<u64>,
    pub mode: Option<String>,
}

async fn recommendations(
    State(engine): Shared,
    Path(user): Path<String>,
    query: Result<Query<RecommendQuery>, QueryRejection>,
) -> Result<Json<RecommendationBody>, ApiError> {
    let Query(q) = query?;
    let seed = q
        .seed
        .ok_or_else(|| ApiError::bad_request("ParseError", "missing query parameter `seed`"))?;
    let mode = q
        .mode
        .map(|m| m.parse::<Mode>())
        .transpose()
        .map_err(|e| ApiError::bad_request("ParseError", e))?;
    let st = engine.snapshot();
    let rec = tokio::task::spawn_blocking(move || st.dispatch_recommend(&user, &seed, mode, q.n, q.l_min))
        .await
        .expect("recommend task")?;
    Ok(Json(RecommendationBody::from(&rec)))
}

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/api/faculties", get(faculties))
        .route("/api/sessions", post(create_session))
        .route("/api/users/{id}/visits", post(post_visit))
        .route("/api/users/{id}/recommendations", get(recommendations))
        .route("/api/health", get(health))
        .with_state(engine)
}

/// Serves until the listener fails.
pub async fn serve_on(listener: TcpListener, engine: Arc<Engine>) -> std::io::Result<()> {
    axum::serve(listener, router(engine)).await
}

pub async fn serve(addr: SocketAddr, state: EngineState) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    serve_on(listener, Engine::new(state, true)).await
}
