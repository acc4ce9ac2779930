//! HTTP facade over the hierarchy: serves node layouts and measures and
//! creates child nodes on zoom requests.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use gridweave_core::hierarchy::{build_root, zoom, HierarchyNode};
use gridweave_core::{GridSpec, PipelineConfig, PipelineId, SampleSet};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bench::LambdaArg;
use crate::io::ReportJson;
use crate::render::cluster_color;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    detail: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, detail: impl Into<String>) -> Self {
        Self {
            status,
            code,
            detail: detail.into(),
        }
    }

    fn unknown_node(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_node", format!("no node `{id}`"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error": self.code, "detail": self.detail}))).into_response()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    pub spec: GridSpec,
    pub pipeline: PipelineId,
    pub lambda: LambdaArg,
    pub seed: u64,
}

struct Registry {
    nodes: BTreeMap<String, Arc<HierarchyNode>>,
    next: usize,
}

pub struct Session {
    samples: SampleSet,
    config: SessionConfig,
    registry: Mutex<Registry>,
}

impl Session {
    /// Builds the root node; the same samples and config always give the same
    /// root.
    pub fn new(samples: SampleSet, config: SessionConfig) -> gridweave_core::Result<Self> {
        let root = build_root(
            &samples,
            config.spec,
            config.seed,
            config.pipeline,
            &pipeline_cfg(&config, config.seed),
        )?;
        let mut nodes = BTreeMap::new();
        nodes.insert(root.id.clone(), Arc::new(root));
        Ok(Self {
            samples,
            config,
            registry: Mutex::new(Registry { nodes, next: 1 }),
        })
    }

    pub fn node(&self, id: &str) -> Option<Arc<HierarchyNode>> {
        self.registry.lock().expect("registry lock").nodes.get(id).cloned()
    }

    fn reserve_id(&self) -> String {
        let mut reg = self.registry.lock().expect("registry lock");
        let id = format!("n{}", reg.next);
        reg.next += 1;
        id
    }

    fn insert(&self, node: HierarchyNode) -> Arc<HierarchyNode> {
        let node = Arc::new(node);
        self.registry
            .lock()
            .expect("registry lock")
            .nodes
            .insert(node.id.clone(), node.clone());
        node
    }

    /// Ancestor ids from the root down to `node`.
    fn breadcrumb(&self, node: &HierarchyNode) -> Vec<String> {
        let reg = self.registry.lock().expect("registry lock");
        let mut trail = vec![node.id.clone()];
        let mut parent = node.parent.clone();
        while let Some(id) = parent {
            parent = reg.nodes.get(&id).and_then(|n| n.parent.clone());
            trail.push(id);
        }
        trail.reverse();
        trail
    }
}

fn pipeline_cfg(config: &SessionConfig, seed: u64) -> PipelineConfig {
    PipelineConfig::new(config.lambda.0, seed)
}

/// Seed for a child node, derived from the session seed, the parent id and
/// the sorted selection.
pub fn child_seed(session_seed: u64, node: &str, cells: &[(usize, usize)]) -> u64 {
    let mut sorted = cells.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut h = Sha256::new();
    h.update(session_seed.to_le_bytes());
    h.update((node.len() as u64).to_le_bytes());
    h.update(node.as_bytes());
    for (c, r) in sorted {
        h.update((c as u64).to_le_bytes());
        h.update((r as u64).to_le_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Serialize)]
struct CellView<'a> {
    col: usize,
    row: usize,
    sample: &'a str,
    cluster: &'a str,
    meta: &'a BTreeMap<String, String>,
}

fn layout_payload(session: &Session, node: &HierarchyNode) -> Value {
    let spec = node.spec;
    let samples = &session.samples;
    let cells: Vec<CellView> = (0..spec.capacity())
        .filter_map(|cell| {
            let s = samples.sample(node.sample_at(cell)?);
            let (col, row) = spec.coords(cell);
            Some(CellView {
                col,
                row,
                sample: &s.id,
                cluster: samples.cluster_name(s.cluster),
                meta: &s.meta,
            })
        })
        .collect();
    json!({
        "node": node.id,
        "parent": node.parent,
        "breadcrumb": session.breadcrumb(node),
        "grid": {"w": spec.width(), "h": spec.height()},
        "pipeline": node.output.pipeline.label(),
        "pool": node.pool().len(),
        "cells": cells,
        "report": ReportJson::from(&node.output.report),
    })
}

#[derive(Deserialize)]
pub struct NodeQuery {
    node: Option<String>,
}

fn lookup(session: &Session, q: &NodeQuery) -> Result<Arc<HierarchyNode>, ApiError> {
    let id = q.node.as_deref().unwrap_or("root");
    session.node(id).ok_or_else(|| ApiError::unknown_node(id))
}

async fn get_layout(State(session): State<Arc<Session>>, Query(q): Query<NodeQuery>) -> Result<Json<Value>, ApiError> {
    let node = lookup(&session, &q)?;
    Ok(Json(layout_payload(&session, &node)))
}

async fn get_measures(
    State(session): State<Arc<Session>>,
    Query(q): Query<NodeQuery>,
) -> Result<Json<Value>, ApiError> {
    let node = lookup(&session, &q)?;
    Ok(Json(
        json!({"node": node.id, "report": ReportJson::from(&node.output.report)}),
    ))
}

async fn get_config(State(session): State<Arc<Session>>) -> Json<Value> {
    let c = &session.config;
    let clusters: Vec<Value> = session
        .samples
        .cluster_names()
        .iter()
        .enumerate()
        .map(|(i, name)| json!({"name": name, "color": cluster_color(gridweave_core::ClusterId(i as u32))}))
        .collect();
    Json(json!({
        "grid": {"w": c.spec.width(), "h": c.spec.height()},
        "pipeline": c.pipeline.label(),
        "lambda": c.lambda.to_string(),
        "seed": c.seed,
        "samples": session.samples.len(),
        "clusters": clusters,
    }))
}

#[derive(Deserialize)]
pub struct ZoomRequest {
    node: String,
    cells: Vec<(usize, usize)>,
}

async fn post_zoom(State(session): State<Arc<Session>>, Json(req): Json<ZoomRequest>) -> Result<Json<Value>, ApiError> {
    let parent = session
        .node(&req.node)
        .ok_or_else(|| ApiError::unknown_node(&req.node))?;
    let invalid = |detail: String| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_selection", detail);
    if req.cells.is_empty() {
        return Err(invalid("empty selection".into()));
    }
    let spec = parent.spec;
    let mut cells = Vec::with_capacity(req.cells.len());
    for &(c, r) in &req.cells {
        if c >= spec.width() || r >= spec.height() {
            return Err(invalid(format!("cell ({c}, {r}) is outside the {spec} grid")));
        }
        cells.push(spec.index(c, r));
    }
    let seed = child_seed(session.config.seed, &parent.id, &req.cells);
    let child_id = session.reserve_id();
    let worker = session.clone();
    let result = tokio::task::spawn_blocking(move || {
        let cfg = pipeline_cfg(&worker.config, seed);
        zoom(
            &worker.samples,
            &parent,
            &cells,
            worker.config.spec,
            child_id,
            seed,
            worker.config.pipeline,
            &cfg,
        )
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    let child = result.map_err(|e| invalid(e.to_string()))?;
    let child = session.insert(child);
    Ok(Json(layout_payload(&session, &child)))
}

pub fn router(session: Arc<Session>) -> Router {
    Router::new()
        .route("/api/layout", get(get_layout))
        .route("/api/measures", get(get_measures))
        .route("/api/config", get(get_config))
        .route("/api/zoom", post(post_zoom))
        .with_state(session)
}

/// Serves on `127.0.0.1:port` until interrupted.
pub async fn serve(session: Arc<Session>, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(session))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
