//! Drives the HTTP API in-process through one interface C session and
//! prints each request with a trimmed response.
//!
//! ```bash
//! cargo run -p critique-server --example api_walkthrough
//! ```

use axum::body::Body;
use axum::http::{Method, Request};
use axum::Router;
use critique_core::{Config, System, FIXTURE_DIR};
use critique_server::{api, AppState};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> Value {
    let req = Request::builder()
        .method(method.clone())
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    println!("{method} {uri} -> {status}");
    v
}

fn top(v: &Value, n: usize) {
    for item in v["items"].as_array().into_iter().flatten().take(n) {
        println!(
            "    {} {:.3} {}",
            item["name"],
            item["score"].as_f64().unwrap_or(0.0),
            item["explanation"]
        );
    }
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let system = System::from_dir(FIXTURE_DIR, Config::default())?;
    let app = api(AppState::new(system));

    let created = call(
        &app,
        Method::POST,
        "/api/session",
        Some(json!({"query": "rooftop pool and a quiet room near the metro", "interface": "C"})),
    )
    .await;
    println!(
        "    matched {} at {:.3}",
        created["matched_user"],
        created["similarity"].as_f64().unwrap()
    );
    let id = created["session_id"].as_str().unwrap().to_string();
    let dest = created["destinations"][0].clone();

    let recs = call(
        &app,
        Method::POST,
        &format!("/api/session/{id}/destination"),
        Some(json!({"destination": dest})),
    )
    .await;
    top(&recs, 3);
    let kp = recs["items"][0]["explanation"][0].as_str().unwrap().to_string();

    let after = call(
        &app,
        Method::POST,
        &format!("/api/session/{id}/critique"),
        Some(json!({"keyphrase": kp, "polarity": "NEGATIVE"})),
    )
    .await;
    top(&after, 3);

    let found = call(&app, Method::GET, "/api/keyphrases?prefix=ro", None).await;
    println!("    {}", found["keyphrases"]);
    let boost = found["keyphrases"][0].clone();
    let boosted = call(
        &app,
        Method::POST,
        &format!("/api/session/{id}/critique"),
        Some(json!({"keyphrase": boost, "polarity": "POSITIVE"})),
    )
    .await;
    top(&boosted, 3);

    let bad = call(
        &app,
        Method::POST,
        &format!("/api/session/{id}/critique"),
        Some(json!({"keyphrase": "helipad", "polarity": "NEGATIVE"})),
    )
    .await;
    println!("    {bad}");

    let done = call(&app, Method::POST, &format!("/api/session/{id}/finish"), None).await;
    println!(
        "    {} after {} steps",
        done["status"],
        done["history"].as_array().unwrap().len()
    );
    let catalog = call(
        &app,
        Method::GET,
        &format!("/api/catalog?destination={}", dest.as_str().unwrap()),
        None,
    )
    .await;
    println!("    {} hotels in {dest}", catalog["items"].as_array().unwrap().len());
    Ok(())
}
