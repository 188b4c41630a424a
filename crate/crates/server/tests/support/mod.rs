//! In-process HTTP client and schema checks for the service tests.

#![allow(dead_code)]

use std::path::Path;
use std::sync::{Arc, OnceLock};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use critique_core::{Config, System, FIXTURE_DIR};
use critique_server::{app, AppState};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

pub fn fixture() -> Arc<System> {
    static S: OnceLock<Arc<System>> = OnceLock::new();
    S.get_or_init(|| Arc::new(System::from_dir(FIXTURE_DIR, Config::default()).unwrap()))
        .clone()
}

#[derive(Clone)]
pub struct Client {
    pub state: AppState,
    router: Router,
}

impl Client {
    pub fn new() -> Self {
        let state = AppState::shared(fixture());
        Self {
            router: app(state.clone(), None),
            state,
        }
    }

    pub fn system(&self) -> &System {
        &self.state.system
    }

    pub async fn raw(&self, method: Method, uri: &str, body: Option<String>) -> (StatusCode, Vec<u8>) {
        let mut req = Request::builder().method(method).uri(uri);
        if body.is_some() {
            req = req.header("content-type", "application/json");
        }
        let req = req.body(body.map_or_else(Body::empty, Body::from)).unwrap();
        let resp = self.router.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        (status, bytes)
    }

    pub async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let (status, bytes) = self.raw(method, uri, body.map(|b| b.to_string())).await;
        let value = serde_json::from_slice(&bytes).unwrap_or_else(|_| panic!("{uri}: non-JSON body {bytes:?}"));
        (status, value)
    }

    /// Asserts 200 and validates against `schemas/{schema}.schema.json`.
    pub async fn ok(&self, method: Method, uri: &str, body: Option<Value>, schema: &str) -> Value {
        let (status, value) = self.call(method, uri, body).await;
        assert_eq!(status, StatusCode::OK, "{uri}: {value}");
        assert_valid(schema, &value);
        value
    }

    /// Asserts the structured error `code` with its HTTP status.
    pub async fn err(&self, method: Method, uri: &str, body: Option<Value>, code: &str) -> Value {
        let (status, value) = self.call(method, uri, body).await;
        let expected = if code == "NOT_FOUND" { 404 } else { 400 };
        assert_eq!(status.as_u16(), expected, "{uri}: {value}");
        assert_eq!(value["code"], code, "{uri}: {value}");
        assert_valid("api_error", &value);
        value
    }

    pub async fn start(&self, query: &str, interface: &str) -> String {
        let v = self
            .ok(
                Method::POST,
                "/api/session",
                Some(json!({"query": query, "interface": interface})),
                "session_created",
            )
            .await;
        v["session_id"].as_str().unwrap().to_string()
    }

    /// New session with a destination chosen; returns its id and first payload.
    pub async fn active(&self, interface: &str, destination: &str) -> (String, Value) {
        let query = self.system().corpus.reviews()[0].text.clone();
        let id = self.start(&query, interface).await;
        let v = self
            .ok(
                Method::POST,
                &format!("/api/session/{id}/destination"),
                Some(json!({ "destination": destination })),
                "recommendations",
            )
            .await;
        (id, v)
    }

    pub async fn critique(&self, id: &str, keyphrase: &str, polarity: &str) -> Value {
        self.ok(
            Method::POST,
            &format!("/api/session/{id}/critique"),
            Some(json!({"keyphrase": keyphrase, "polarity": polarity})),
            "recommendations",
        )
        .await
    }
}

pub fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

pub fn assert_valid(name: &str, value: &Value) {
    let validator = jsonschema::validator_for(&schema(name)).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(value)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{value}");
}

pub fn strs(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_string())
        .collect()
}
