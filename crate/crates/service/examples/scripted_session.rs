//! Drive the HTTP API in-process: open a session, add two instances, accept
//! the suggestion and generate a script. Pass `--listen` to serve the same
//! state on 127.0.0.1:8080 afterwards.
//!
//!     cargo run -p vso-service --example scripted_session [-- --listen]

use std::sync::Arc;

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use vso_core::{samples, KnowledgeBase};
use vso_service::{router, AppState};

async fn send(app: &axum::Router, method: &str, uri: &str, body: Value) -> Value {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(if body.is_null() {
            Body::empty()
        } else {
            Body::from(body.to_string())
        })
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value: Value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    println!("{method} {uri} -> {status}");
    value
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let kb = KnowledgeBase::new(samples::ship_and_waves()).expect("sample catalog is valid");
    let app = router(Arc::new(AppState::new(kb.clone())));

    let session = send(&app, "POST", "/v1/sessions", Value::Null).await;
    let base = format!("/v1/sessions/{}", session["session_id"].as_str().unwrap());
    send(
        &app,
        "POST",
        &format!("{base}/instances"),
        json!({"revision": 1, "image": "o1"}),
    )
    .await;
    send(
        &app,
        "POST",
        &format!("{base}/instances"),
        json!({"revision": 2, "image": "o2"}),
    )
    .await;

    let stale = send(
        &app,
        "POST",
        &format!("{base}/instances"),
        json!({"revision": 1, "image": "o2"}),
    )
    .await;
    println!("  {}", stale["error"]);

    let suggestions = send(&app, "GET", &format!("{base}/suggestions"), Value::Null).await;
    println!("  {}", suggestions["suggestions"]);
    send(
        &app,
        "POST",
        &format!("{base}/suggestions/apply"),
        json!({"revision": 3}),
    )
    .await;

    let ranked = send(
        &app,
        "POST",
        &format!("{base}/compare"),
        json!({"criterion": "total"}),
    )
    .await;
    println!("  best: {}", ranked["reports"][0]["key"]);

    let script = send(&app, "POST", &format!("{base}/generate"), json!({})).await;
    print!("{}", script["script"].as_str().unwrap());

    if std::env::args().any(|a| a == "--listen") {
        let addr = vso_service::DEFAULT_ADDR.parse().unwrap();
        println!("serving a fresh state on http://{addr}/v1/");
        vso_service::serve(addr, AppState::new(kb)).await?;
    }
    Ok(())
}
