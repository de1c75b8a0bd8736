use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{FromRequest, FromRequestParts, Path, State};
use axum::http::header;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use vso_core::codegen::TraversalRow;
use vso_core::configurator::configuration_slots;
use vso_core::{
    compare_configurations, count_configurations, enumerate_configurations, generate_script, store,
    CandidateConnection, Configuration, Connection, Criterion, ElementParams, Endpoint, Environment, Level,
    ModelPath,
};

use crate::error::ApiError;
use crate::state::AppState;

type Shared = State<Arc<AppState>>;
type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(ApiError))]
struct ApiJson<T>(T);

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Query), rejection(ApiError))]
struct ApiQuery<T>(T);

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/catalog", get(catalog))
        .route("/v1/images", get(list_images))
        .route("/v1/images/{image}", get(get_image))
        .route("/v1/vocabularies", get(list_vocabularies))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{sid}", get(get_session).delete(delete_session))
        .route("/v1/sessions/{sid}/environment", get(environment_document))
        .route("/v1/sessions/{sid}/instances", post(instantiate))
        .route("/v1/sessions/{sid}/instances/{iid}/visible", get(visible_params))
        .route("/v1/sessions/{sid}/instances/{iid}/models", post(toggle_model))
        .route("/v1/sessions/{sid}/instances/{iid}/method", post(choose_method))
        .route("/v1/sessions/{sid}/suggestions", get(suggestions))
        .route("/v1/sessions/{sid}/suggestions/apply", post(apply_suggestions))
        .route("/v1/sessions/{sid}/connections", post(connect))
        .route("/v1/sessions/{sid}/connections/remove", post(disconnect))
        .route("/v1/sessions/{sid}/connect-objects", post(connect_objects))
        .route("/v1/sessions/{sid}/views/{level}", get(lifted_view))
        .route("/v1/sessions/{sid}/configurations", get(configurations))
        .route("/v1/sessions/{sid}/compare", post(compare))
        .route("/v1/sessions/{sid}/generate", post(generate))
        .with_state(state)
}

async fn catalog(State(s): Shared) -> impl IntoResponse {
    let bytes = store::save_catalog(s.knowledge().catalog()).expect("knowledge base is validated");
    ([(header::CONTENT_TYPE, "application/json")], bytes)
}

async fn list_images(State(s): Shared) -> Json<Value> {
    let kb = s.knowledge();
    Json(json!({ "catalog_version": kb.version(), "images": kb.catalog().images }))
}

async fn get_image(State(s): Shared, Path(image): Path<String>) -> ApiResult<Value> {
    let img = s
        .knowledge()
        .catalog()
        .image(&image)
        .ok_or(vso_core::Error::UnknownImage(image))?;
    Ok(Json(json!(img)))
}

async fn list_vocabularies(State(s): Shared) -> Json<Value> {
    Json(json!({ "vocabularies": s.vocabulary_names() }))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    env_id: Option<String>,
    /// An environment document to start from.
    environment: Option<Value>,
}

#[derive(Serialize)]
struct SessionCreated {
    session_id: String,
    revision: u64,
}

/// The body is optional; an empty body opens an empty environment.
async fn create_session(State(s): Shared, body: Bytes) -> Result<Json<SessionCreated>, ApiError> {
    let req: CreateSession = if body.iter().all(u8::is_ascii_whitespace) {
        CreateSession::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::new("BadRequest", e.to_string()))?
    };
    let kb = s.knowledge();
    let env = match req.environment {
        Some(doc) => {
            let bytes = serde_json::to_vec(&doc).map_err(|e| ApiError::new("BadRequest", e.to_string()))?;
            let env = store::load_environment(&bytes)?;
            let report = env.validate(kb);
            if !report.is_clean() {
                return Err(vso_core::Error::ValidationFailed(report).into());
            }
            env
        }
        None => Environment::for_knowledge(req.env_id.unwrap_or_else(|| "env".into()), kb),
    };
    let session = s.open_session(env);
    Ok(Json(SessionCreated {
        session_id: session.id,
        revision: session.revision,
    }))
}

async fn get_session(State(s): Shared, Path(sid): Path<String>) -> ApiResult<Value> {
    s.read(&sid, |session, _| {
        Ok(Json(json!({
            "session_id": session.id,
            "revision": session.revision,
            "environment": session.environment,
        })))
    })
}

async fn delete_session(State(s): Shared, Path(sid): Path<String>) -> ApiResult<Value> {
    s.close_session(&sid)?;
    Ok(Json(json!({ "session_id": sid })))
}

/// The canonical environment document, byte-identical to a saved file.
async fn environment_document(
    State(s): Shared,
    Path(sid): Path<String>,
) -> Result<impl IntoResponse, ApiError> {
    let bytes = s.read(&sid, |session, _| {
        Ok(store::save_environment(&session.environment))
    })?;
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes))
}

#[derive(Serialize)]
struct Revised<T: Serialize> {
    revision: u64,
    #[serde(flatten)]
    body: T,
}

fn revised<T: Serialize>(revision: u64, body: T) -> Json<Revised<T>> {
    Json(Revised { revision, body })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Instantiate {
    revision: u64,
    image: String,
}

async fn instantiate(
    State(s): Shared,
    Path(sid): Path<String>,
    ApiJson(req): ApiJson<Instantiate>,
) -> ApiResult<Revised<Value>> {
    let (rev, id) = s.mutate(&sid, req.revision, |env, kb| Ok(env.instantiate(kb, &req.image)?))?;
    Ok(revised(rev, json!({ "instance_id": id })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelQuery {
    level: Option<Level>,
}

#[derive(Serialize)]
struct Visible {
    level: Level,
    elements: Vec<ElementParams>,
}

async fn visible_params(
    State(s): Shared,
    Path((sid, iid)): Path<(String, String)>,
    ApiQuery(q): ApiQuery<LevelQuery>,
) -> ApiResult<Revised<Visible>> {
    let level = q.level.unwrap_or(Level::Object);
    s.read(&sid, |session, kb| {
        let elements = session.environment.visible_params(kb, &iid, level)?;
        Ok(revised(session.revision, Visible { level, elements }))
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ToggleModel {
    revision: u64,
    model: ModelPath,
    enabled: bool,
}

async fn toggle_model(
    State(s): Shared,
    Path((sid, iid)): Path<(String, String)>,
    ApiJson(req): ApiJson<ToggleModel>,
) -> ApiResult<Revised<Value>> {
    let (rev, ()) = s.mutate(&sid, req.revision, |env, kb| {
        Ok(env.set_model_enabled(kb, &iid, &req.model, req.enabled)?)
    })?;
    Ok(revised(rev, json!({})))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChooseMethod {
    revision: u64,
    model: ModelPath,
    method: String,
}

async fn choose_method(
    State(s): Shared,
    Path((sid, iid)): Path<(String, String)>,
    ApiJson(req): ApiJson<ChooseMethod>,
) -> ApiResult<Revised<Value>> {
    let (rev, ()) = s.mutate(&sid, req.revision, |env, kb| {
        Ok(env.choose_method(kb, &iid, &req.model, &req.method)?)
    })?;
    Ok(revised(rev, json!({})))
}

#[derive(Serialize)]
struct Suggestions {
    suggestions: Vec<CandidateConnection>,
}

async fn suggestions(State(s): Shared, Path(sid): Path<String>) -> ApiResult<Revised<Suggestions>> {
    s.read(&sid, |session, kb| {
        let suggestions = session.environment.suggest_connections(kb)?;
        Ok(revised(session.revision, Suggestions { suggestions }))
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RevisionOnly {
    revision: u64,
}

#[derive(Serialize)]
struct Applied {
    applied: Vec<Connection>,
}

async fn apply_suggestions(
    State(s): Shared,
    Path(sid): Path<String>,
    ApiJson(req): ApiJson<RevisionOnly>,
) -> ApiResult<Revised<Applied>> {
    let (rev, applied) = s.mutate(&sid, req.revision, |env, kb| Ok(env.apply_all_suggestions(kb)?))?;
    Ok(revised(rev, Applied { applied }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectionRequest {
    revision: u64,
    source: Endpoint,
    target: Endpoint,
}

async fn connect(
    State(s): Shared,
    Path(sid): Path<String>,
    ApiJson(req): ApiJson<ConnectionRequest>,
) -> ApiResult<Revised<Value>> {
    let (rev, ()) = s.mutate(&sid, req.revision, |env, kb| {
        Ok(env.connect(kb, &req.source, &req.target)?)
    })?;
    Ok(revised(rev, json!({})))
}

async fn disconnect(
    State(s): Shared,
    Path(sid): Path<String>,
    ApiJson(req): ApiJson<ConnectionRequest>,
) -> ApiResult<Revised<Value>> {
    let (rev, ()) = s.mutate(&sid, req.revision, |env, _| {
        Ok(env.disconnect(&req.source, &req.target)?)
    })?;
    Ok(revised(rev, json!({})))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectObjects {
    revision: u64,
    source_instance: String,
    target_instance: String,
}

async fn connect_objects(
    State(s): Shared,
    Path(sid): Path<String>,
    ApiJson(req): ApiJson<ConnectObjects>,
) -> ApiResult<Revised<Value>> {
    let (rev, conn) = s.mutate(&sid, req.revision, |env, kb| {
        Ok(env.connect_objects(kb, &req.source_instance, &req.target_instance)?)
    })?;
    Ok(revised(rev, json!({ "connection": conn })))
}

#[derive(Serialize)]
struct View {
    level: Level,
    connections: Vec<(String, String)>,
}

async fn lifted_view(
    State(s): Shared,
    Path((sid, level)): Path<(String, String)>,
) -> ApiResult<Revised<View>> {
    let level: Level = level
        .parse()
        .map_err(|_| ApiError::new("BadRequest", format!("unknown level `{level}`")))?;
    s.read(&sid, |session, kb| {
        let connections = session.environment.lifted_view(kb, level)?.into_iter().collect();
        Ok(revised(session.revision, View { level, connections }))
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigurationsQuery {
    limit: Option<usize>,
}

#[derive(Serialize)]
struct Configurations {
    count: u128,
    slots: Vec<SlotInfo>,
    configurations: Vec<String>,
    truncated: bool,
}

#[derive(Serialize)]
struct SlotInfo {
    slot: String,
    methods: Vec<String>,
}

const DEFAULT_LIMIT: usize = 1000;

async fn configurations(
    State(s): Shared,
    Path(sid): Path<String>,
    ApiQuery(q): ApiQuery<ConfigurationsQuery>,
) -> ApiResult<Revised<Configurations>> {
    let limit = q.limit.unwrap_or(DEFAULT_LIMIT);
    s.read(&sid, |session, kb| {
        let env = &session.environment;
        let count = count_configurations(env, kb)?;
        let slots = configuration_slots(env, kb)?
            .into_iter()
            .map(|(slot, methods)| SlotInfo {
                slot: slot.to_string(),
                methods,
            })
            .collect();
        let configurations = if count <= limit as u128 {
            enumerate_configurations(env, kb)?
                .iter()
                .map(Configuration::key)
                .collect()
        } else {
            Vec::new()
        };
        Ok(revised(
            session.revision,
            Configurations {
                count,
                slots,
                truncated: count > limit as u128,
                configurations,
            },
        ))
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareRequest {
    criterion: String,
    data_units: Option<f64>,
    /// Keys to compare; all configurations when absent.
    configurations: Option<Vec<String>>,
}

async fn compare(
    State(s): Shared,
    Path(sid): Path<String>,
    ApiJson(req): ApiJson<CompareRequest>,
) -> ApiResult<Revised<Value>> {
    let criterion: Criterion = req.criterion.parse()?;
    s.read(&sid, |session, kb| {
        let env = &session.environment;
        let configs = match &req.configurations {
            Some(keys) => keys
                .iter()
                .map(|k| Configuration::parse_key(k))
                .collect::<Result<Vec<_>, _>>()?,
            None => enumerate_configurations(env, kb)?,
        };
        let reports = compare_configurations(env, kb, &configs, criterion, req.data_units.unwrap_or(1.0))?;
        Ok(revised(
            session.revision,
            json!({ "criterion": criterion, "reports": reports }),
        ))
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerateRequest {
    vocabulary: Option<String>,
    /// Configuration key; the environment's current choices when absent.
    configuration: Option<String>,
}

#[derive(Serialize)]
struct Generated {
    vocabulary: String,
    configuration: String,
    script: String,
    steps: Vec<TraversalRow>,
}

async fn generate(
    State(s): Shared,
    Path(sid): Path<String>,
    ApiJson(req): ApiJson<GenerateRequest>,
) -> ApiResult<Revised<Generated>> {
    let name = req.vocabulary.unwrap_or_else(|| "generic".into());
    let vocab = s.vocabulary(&name)?;
    s.read(&sid, |session, kb| {
        let env = &session.environment;
        let config = match &req.configuration {
            Some(k) => Configuration::parse_key(k)?,
            None => Configuration::current(env),
        };
        let script = generate_script(env, kb, &config, vocab)?;
        Ok(revised(
            session.revision,
            Generated {
                vocabulary: name.clone(),
                configuration: config.key(),
                script: script.text,
                steps: script.steps,
            },
        ))
    })
}
