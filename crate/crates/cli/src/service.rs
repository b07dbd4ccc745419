//! Stateless HTTP facade. `handle` is the whole service; the router only moves bytes.

use std::net::SocketAddr;

use axum::body::Bytes;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::Router;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use dialog_core::episodes::DEFAULT_CAP;
use dialog_core::miner::{mine_with, MinerConfig};
use dialog_core::syntax::{parse_episode, print_episode, print_utterance};
use dialog_core::{
    canonicalize, enumerate_capped, equivalent_capped, parse_expr, parse_spec_file, parse_utterance, union_all,
    Dialog, EnumeratedSpec, Equivalence,
};

use crate::session::{SessionSnapshot, SnapshotError, StepError};
use crate::wire;

pub const ENDPOINTS: [&str; 8] =
    ["/parse", "/canon", "/enum", "/equiv", "/mine", "/session/init", "/session/step", "/session/candidates"];

#[derive(Clone, Debug, PartialEq)]
pub struct Reply {
    pub status: u16,
    pub body: Value,
}

impl Reply {
    fn ok(body: Value) -> Self {
        Reply { status: 200, body }
    }

    fn bad(message: impl Into<String>) -> Self {
        Reply { status: 400, body: json!({ "error": "malformed", "message": message.into() }) }
    }
}

#[derive(Deserialize)]
struct ExprReq {
    expr: String,
}

#[derive(Deserialize)]
struct EnumReq {
    expr: String,
    cap: Option<usize>,
}

#[derive(Deserialize)]
struct EquivReq {
    left: String,
    right: String,
    cap: Option<usize>,
}

#[derive(Deserialize)]
struct MineReq {
    episodes: Option<Vec<String>>,
    /// `.eps` file contents, as an alternative to `episodes`.
    eps: Option<String>,
    cap: Option<usize>,
    depth: Option<usize>,
}

#[derive(Deserialize)]
struct InitReq {
    spec: String,
    #[serde(default)]
    strict: bool,
}

#[derive(Deserialize)]
struct StepReq {
    snapshot: SessionSnapshot,
    utterance: String,
}

#[derive(Deserialize)]
struct SnapReq {
    snapshot: SessionSnapshot,
}

fn body<T: DeserializeOwned>(raw: &[u8]) -> Result<T, Reply> {
    serde_json::from_slice(raw).map_err(|e| Reply::bad(e.to_string()))
}

fn expr(src: &str) -> Result<Dialog, Reply> {
    parse_expr(src).map_err(|e| match wire::parse_error(&e) {
        (true, body) => Reply { status: 422, body },
        (false, body) => Reply { status: 400, body },
    })
}

fn snapshot_error(e: SnapshotError) -> Reply {
    match e {
        SnapshotError::Spec(p) => match wire::parse_error(&p) {
            (true, body) => Reply { status: 422, body },
            (false, body) => Reply { status: 400, body },
        },
        SnapshotError::Field { field, error } => {
            let mut body = wire::syntax_error(&error);
            body["field"] = json!(field);
            Reply { status: 400, body }
        }
    }
}

fn enum_error(e: dialog_core::EnumError) -> Reply {
    Reply { status: 422, body: wire::enum_error(&e) }
}

/// Serves one request. Pure: the same endpoint and body always give the same reply.
pub fn handle(endpoint: &str, raw: &[u8]) -> Reply {
    let r = match endpoint {
        "/parse" => parse(raw),
        "/canon" => canon(raw),
        "/enum" => enumerate(raw),
        "/equiv" => equiv(raw),
        "/mine" => mine(raw),
        "/session/init" => init(raw),
        "/session/step" => step(raw),
        "/session/candidates" => session_candidates(raw),
        _ => Err(Reply { status: 404, body: json!({ "error": "not-found", "endpoint": endpoint }) }),
    };
    r.unwrap_or_else(|e| e)
}

fn parse(raw: &[u8]) -> Result<Reply, Reply> {
    let req: ExprReq = body(raw)?;
    let d = expr(&req.expr)?;
    let report = dialog_core::validate(&d);
    let canonical = dialog_core::canonical(&d);
    Ok(Reply::ok(json!({
        "expr": d.to_string(),
        "canonical": canonical.to_string(),
        "tree": wire::tree(&canonical),
        "warnings": wire::warnings(&report),
    })))
}

fn canon(raw: &[u8]) -> Result<Reply, Reply> {
    let req: ExprReq = body(raw)?;
    let t = canonicalize(&expr(&req.expr)?);
    Ok(Reply::ok(json!({
        "canonical": t.result.to_string(),
        "tree": wire::tree(&t.result),
        "steps": t.steps.iter().map(wire::rewrite_step).collect::<Vec<_>>(),
    })))
}

fn enumerate(raw: &[u8]) -> Result<Reply, Reply> {
    let req: EnumReq = body(raw)?;
    let spec = enumerate_capped(&expr(&req.expr)?, req.cap.unwrap_or(DEFAULT_CAP)).map_err(enum_error)?;
    Ok(Reply::ok(json!({
        "count": spec.size(),
        "episodes": spec.episodes().iter().map(print_episode).collect::<Vec<_>>(),
    })))
}

fn equiv(raw: &[u8]) -> Result<Reply, Reply> {
    let req: EquivReq = body(raw)?;
    let (a, b) = (expr(&req.left)?, expr(&req.right)?);
    let e = equivalent_capped(&a, &b, req.cap.unwrap_or(DEFAULT_CAP)).map_err(enum_error)?;
    Ok(Reply::ok(match e {
        Equivalence::Equivalent => json!({ "equivalent": true }),
        Equivalence::Differ { witness, in_left } => json!({
            "equivalent": false,
            "witness": print_episode(&witness),
            "in": if in_left { "left" } else { "right" },
        }),
    }))
}

fn mine(raw: &[u8]) -> Result<Reply, Reply> {
    let req: MineReq = body(raw)?;
    let spec: EnumeratedSpec = match (req.episodes, req.eps) {
        (Some(list), None) => list
            .iter()
            .map(|e| parse_episode(e))
            .collect::<Result<_, _>>()
            .map_err(|e| Reply { status: 400, body: wire::syntax_error(&e) })?,
        (None, Some(text)) => parse_spec_file(&text).map_err(|e| Reply { status: 400, body: wire::syntax_error(&e) })?,
        _ => return Err(Reply::bad("give exactly one of `episodes` or `eps`")),
    };
    let defaults = MinerConfig::default();
    let cfg = MinerConfig {
        cap: req.cap.unwrap_or(defaults.cap),
        depth: req.depth.unwrap_or(defaults.depth),
        ..defaults
    };
    let mined = mine_with(&spec, cfg).map_err(enum_error)?;
    Ok(Reply::ok(json!({
        "union": union_all(mined.iter().cloned()).map(|u| u.to_string()),
        "expressions": mined.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "episodes": spec.size(),
    })))
}

fn snapshot_reply(s: &SessionSnapshot) -> Reply {
    Reply::ok(serde_json::to_value(s).expect("snapshot serializes"))
}

fn init(raw: &[u8]) -> Result<Reply, Reply> {
    let req: InitReq = body(raw)?;
    Ok(snapshot_reply(&SessionSnapshot::init(&expr(&req.spec)?, req.strict)))
}

fn step(raw: &[u8]) -> Result<Reply, Reply> {
    let req: StepReq = body(raw)?;
    let u = parse_utterance(&req.utterance).map_err(|e| Reply { status: 400, body: wire::syntax_error(&e) })?;
    match req.snapshot.step(&u) {
        Ok(next) => Ok(snapshot_reply(&next)),
        Err(StepError::Snapshot(e)) => Err(snapshot_error(e)),
        Err(StepError::Rejected(r)) => {
            let mut body = serde_json::to_value(&r).expect("rejection serializes");
            body["error"] = json!("rejected");
            Err(Reply { status: 409, body })
        }
    }
}

fn session_candidates(raw: &[u8]) -> Result<Reply, Reply> {
    let req: SnapReq = body(raw)?;
    let cs = req.snapshot.candidates().map_err(snapshot_error)?;
    Ok(Reply::ok(json!({ "candidates": cs.iter().map(print_utterance).collect::<Vec<_>>() })))
}

impl IntoResponse for Reply {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, [(header::CONTENT_TYPE, "application/json")], self.body.to_string()).into_response()
    }
}

async fn dispatch(endpoint: &'static str, raw: Bytes) -> Reply {
    // enumeration and mining are CPU-bound
    tokio::task::spawn_blocking(move || handle(endpoint, &raw))
        .await
        .unwrap_or_else(|e| Reply { status: 500, body: json!({ "error": "internal", "message": e.to_string() }) })
}

pub fn router() -> Router {
    ENDPOINTS.iter().fold(Router::new(), |r, &ep| r.route(ep, post(move |raw: Bytes| dispatch(ep, raw))))
}

pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router()).await
}
