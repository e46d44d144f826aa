//! HTTP API over the mosaic engine.
//!
//! | route | answer |
//! |---|---|
//! | `POST /api/identify` | body `{"n": 4, "cells": [[0,2,1,0], ...]}`; full analysis of the mosaic |
//! | `GET /api/catalog` | every knot in the configured store with its minima |
//! | `GET /api/catalog?knot=3_1[&realize=mosaic\|tile\|crossing]` | best stored mosaics for one knot |
//! | `GET /api/tiles` | connection points and strand pairings of the 11 tiles |
//!
//! Handlers only read shared snapshots taken at startup.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mosaic_core::analysis::analyze;
use mosaic_core::exec::Execution;
use mosaic_core::identify::{Catalog, FingerprintIndex};
use mosaic_core::pipeline::{best_per_knot, read_hits, KnotHit, SummaryRecord};
use mosaic_core::tile::{GridJson, MosaicGrid, Side, Tile};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

pub const DEFAULT_MAX_N: usize = 12;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    /// Hit store backing `/api/catalog`.
    pub store: Option<PathBuf>,
    /// Knot catalog; the built-in one when `None`.
    pub catalog: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub max_n: usize,
    /// Directory served for every path outside `/api`.
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            store: None,
            catalog: None,
            cache_dir: None,
            max_n: DEFAULT_MAX_N,
            static_dir: None,
        }
    }
}

struct Inner {
    index: FingerprintIndex,
    summaries: Option<BTreeMap<String, SummaryRecord>>,
    max_n: usize,
    tiles: String,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(index: FingerprintIndex, hits: Option<&[KnotHit]>, max_n: usize) -> AppState {
        let summaries = hits.map(|h| best_per_knot(h).into_iter().map(|s| (s.knot.clone(), s)).collect());
        AppState(Arc::new(Inner { index, summaries, max_n, tiles: tiles_json() }))
    }

    pub fn load(config: &ServiceConfig) -> anyhow::Result<AppState> {
        let catalog = match &config.catalog {
            Some(path) => Catalog::load(path).with_context(|| format!("loading catalog {}", path.display()))?,
            None => Catalog::builtin().clone(),
        };
        let index = match &config.cache_dir {
            Some(dir) => FingerprintIndex::load_or_build(&catalog, dir, Execution::default())?,
            None => FingerprintIndex::build(&catalog, Execution::default())?,
        };
        let hits = match &config.store {
            Some(path) => Some(read_hits(path).with_context(|| format!("reading store {}", path.display()))?),
            None => None,
        };
        Ok(AppState::new(index, hits.as_deref(), config.max_n))
    }
}

pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/identify", post(identify))
        .route("/api/catalog", get(catalog))
        .route("/api/tiles", get(tiles))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(config: ServiceConfig) -> anyhow::Result<()> {
    let state = AppState::load(&config)?;
    let app = router(state, config.static_dir.clone());
    let listener = tokio::net::TcpListener::bind(config.bind)
        .await
        .with_context(|| format!("binding {}", config.bind))?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

/// Runs [`serve`] on a fresh multi-threaded runtime.
pub fn serve_blocking(config: ServiceConfig) -> anyhow::Result<()> {
    tokio::runtime::Runtime::new()?.block_on(serve(config))
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

async fn identify(State(state): State<AppState>, body: Bytes) -> Response {
    let request: GridJson = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("malformed body: {e}")),
    };
    let max_n = state.0.max_n;
    if request.n > max_n || request.cells.len() > max_n {
        let n = request.n.max(request.cells.len());
        return error(StatusCode::PAYLOAD_TOO_LARGE, format!("grid size {n} exceeds the limit of {max_n}"));
    }
    let grid = match MosaicGrid::try_from(&request) {
        Ok(g) => g,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let analysis = tokio::task::spawn_blocking(move || analyze(&grid, &state.0.index)).await;
    match analysis {
        Ok(a) => Json(a).into_response(),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

#[derive(Debug, Deserialize)]
struct CatalogQuery {
    knot: Option<String>,
    realize: Option<String>,
}

#[derive(Debug, Serialize)]
struct StoredMosaic {
    realizes: Vec<&'static str>,
    n: usize,
    nonblank: usize,
    crossings: usize,
    layout: String,
    cells: Vec<Vec<i64>>,
}

async fn catalog(State(state): State<AppState>, Query(q): Query<CatalogQuery>) -> Response {
    let Some(summaries) = &state.0.summaries else {
        return error(StatusCode::SERVICE_UNAVAILABLE, "no store configured");
    };
    let Some(name) = q.knot else {
        let mut list: Vec<Value> = summaries
            .values()
            .map(|s| {
                json!({
                    "knot": s.knot,
                    "crossing_number": s.crossing_number,
                    "mosaic_size": s.mosaic_size,
                    "tile_count": s.tile_count,
                    "min_crossings": s.min_crossings,
                })
            })
            .collect();
        list.sort_by_key(|v| mosaic_core::identify::name_sort_key(v["knot"].as_str().unwrap_or_default()));
        return Json(list).into_response();
    };
    let filter = match q.realize.as_deref() {
        None => None,
        Some(r @ ("mosaic" | "tile" | "crossing")) => Some(r),
        Some(other) => return error(StatusCode::BAD_REQUEST, format!("unknown realize filter {other:?}")),
    };
    let Some(s) = summaries.get(&name) else {
        return error(StatusCode::NOT_FOUND, format!("no stored mosaic for {name}"));
    };
    let mut mosaics: Vec<StoredMosaic> = Vec::new();
    for (label, hit) in [("mosaic", &s.best_mosaic), ("tile", &s.best_tiles), ("crossing", &s.best_crossings)] {
        if filter.is_some_and(|f| f != label) {
            continue;
        }
        let cells = match hit.mosaic() {
            Ok(g) => GridJson::from(&g).cells,
            Err(e) => return error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        };
        match mosaics.iter_mut().find(|m| m.cells == cells) {
            Some(m) => m.realizes.push(label),
            None => mosaics.push(StoredMosaic {
                realizes: vec![label],
                n: hit.n,
                nonblank: hit.nonblank,
                crossings: hit.crossings,
                layout: hit.layout.clone(),
                cells,
            }),
        }
    }
    Json(json!({
        "knot": s.knot,
        "crossing_number": s.crossing_number,
        "mosaic_size": s.mosaic_size,
        "tile_count": s.tile_count,
        "tile_minimal_size": s.tile_minimal_size,
        "min_crossings": s.min_crossings,
        "crossing_number_realized": s.crossing_number_realized,
        "mosaics": mosaics,
    }))
    .into_response()
}

async fn tiles(State(state): State<AppState>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], state.0.tiles.clone()).into_response()
}

/// Tile metadata as served by `/api/tiles`.
pub fn tiles_json() -> String {
    let tiles: Vec<Value> = Tile::all()
        .map(|t| {
            let points: Vec<Side> = t.connection_points().iter().collect();
            let mut pairs: Vec<[Side; 2]> = Vec::new();
            for &s in &points {
                let e = t.exit_side(s).expect("connection point has a strand");
                if !pairs.iter().any(|p| p.contains(&s)) {
                    pairs.push([s, e]);
                }
            }
            let over = t.is_crossing().then(|| if t.passes_under(Side::Left) { "vertical" } else { "horizontal" });
            json!({
                "kind": t.kind(),
                "points": points,
                "pairs": pairs,
                "crossing": t.is_crossing(),
                "over": over,
            })
        })
        .collect();
    serde_json::to_string(&tiles).expect("tile metadata serializes")
}
