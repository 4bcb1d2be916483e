use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use codeattn_core::{Corpus, Snippet};
use codeattn_service::http::router;
use codeattn_service::{StudyConfig, StudyService};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app(dir: &std::path::Path) -> Router {
    let snippets = (0..3)
        .map(|i| Snippet::new(format!("s{i}"), "int a = b + c;\nreturn a;", 1, "d").unwrap())
        .collect();
    let mut cfg = StudyConfig::new("unused", dir);
    cfg.tasks_per_participant = 2;
    let svc = StudyService::with_corpus(cfg, Corpus::new(snippets).unwrap()).unwrap();
    router(Arc::new(svc))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

#[tokio::test]
async fn full_flow_and_status_codes() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());

    let (st, body) = call(&app, "GET", "/v1/health", None).await;
    assert_eq!((st, &body["status"]), (StatusCode::OK, &json!("ok")));

    let (st, p) = call(&app, "POST", "/v1/participants", Some(json!({"format_version": 1}))).await;
    assert_eq!(st, StatusCode::CREATED);
    let pid = p["participant_id"].as_str().unwrap().to_owned();
    assert_eq!(p["tasks"].as_array().unwrap().len(), 2);

    let dup = json!({"format_version": 1, "participant_id": pid});
    let (st, e) = call(&app, "POST", "/v1/participants", Some(dup)).await;
    assert_eq!((st, &e["error"]), (StatusCode::CONFLICT, &json!("duplicate_participant")));

    let (st, e) = call(&app, "POST", "/v1/participants", Some(json!({"format_version": 2}))).await;
    assert_eq!((st, &e["error"]), (StatusCode::BAD_REQUEST, &json!("unsupported_version")));
    let (st, _) = call(&app, "POST", "/v1/participants", Some(json!({"nope": 1}))).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);

    let (st, tasks) = call(&app, "GET", &format!("/v1/participants/{pid}/tasks"), None).await;
    assert_eq!(st, StatusCode::OK);
    let task = &tasks["tasks"][0];
    assert_eq!(task["status"], "pending");
    assert_eq!(task["buggy_line"], 1);
    assert_eq!(task["tokens"].as_array().unwrap().len(), 10);
    let sid = task["snippet_id"].as_str().unwrap().to_owned();
    let (st, _) = call(&app, "GET", "/v1/participants/ghost/tasks", None).await;
    assert_eq!(st, StatusCode::NOT_FOUND);

    let open = json!({"format_version": 1, "participant_id": pid, "snippet_id": sid});
    let (st, s) = call(&app, "POST", "/v1/sessions", Some(open.clone())).await;
    assert_eq!(st, StatusCode::CREATED);
    let token = s["session_token"].as_str().unwrap().to_owned();
    let (st, s) = call(&app, "POST", "/v1/sessions", Some(open)).await;
    assert_eq!((st, &s["resumed"]), (StatusCode::OK, &json!(true)));

    let events_uri = format!("/v1/sessions/{token}/events");
    let submit_uri = format!("/v1/sessions/{token}/submit");
    let (st, e) = call(&app, "POST", &submit_uri, Some(json!({"format_version": 1, "label": "cannot_fix"}))).await;
    assert_eq!((st, &e["error"]), (StatusCode::UNPROCESSABLE_ENTITY, &json!("empty_session")));

    let good = json!({"format_version": 1, "events": [
        {"timestamp_ms": 100, "kind": "unblur", "focus_token": 0, "visible_tokens": [0, 1, 2, 3]},
        {"timestamp_ms": 900, "kind": "edit", "edit_payload": "int a = b - c;"},
        {"timestamp_ms": 1000, "kind": "blur_everything"}
    ]});
    let (st, ack) = call(&app, "POST", &events_uri, Some(good)).await;
    assert_eq!((st, &ack["persisted_events"]), (StatusCode::OK, &json!(3)));

    let late = json!({"format_version": 1, "events": [{"timestamp_ms": 50, "kind": "blur_everything"}]});
    let (st, e) = call(&app, "POST", &events_uri, Some(late)).await;
    assert_eq!((st, &e["error"]), (StatusCode::CONFLICT, &json!("out_of_order_batch")));

    let wide = json!({"format_version": 1, "events": [
        {"timestamp_ms": 2000, "kind": "unblur", "focus_token": 3, "visible_tokens": [0, 1, 2, 3, 4, 5, 6, 7]}
    ]});
    let (st, e) = call(&app, "POST", &events_uri, Some(wide)).await;
    assert_eq!((st, &e["error"]), (StatusCode::UNPROCESSABLE_ENTITY, &json!("malformed_event")));

    let (st, e) = call(&app, "POST", "/v1/sessions/ghost/events", Some(json!({"format_version": 1, "events": []}))).await;
    assert_eq!((st, &e["error"]), (StatusCode::NOT_FOUND, &json!("unknown_session")));

    let fix = json!({"format_version": 1, "label": "fix_done", "final_buggy_line": "int a = b - c;", "submitted_at_ms": 5000});
    let (st, rec) = call(&app, "POST", &submit_uri, Some(fix.clone())).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(rec["record"]["label"], "fix_done");
    assert_eq!(rec["record"]["validity"], "valid");

    let (st, e) = call(&app, "POST", &submit_uri, Some(fix)).await;
    assert_eq!((st, &e["error"]), (StatusCode::CONFLICT, &json!("already_closed")));
    let (st, e) = call(&app, "POST", &events_uri, Some(json!({"format_version": 1, "events": []}))).await;
    assert_eq!((st, &e["error"]), (StatusCode::GONE, &json!("stale_session")));

    let (_, tasks) = call(&app, "GET", &format!("/v1/participants/{pid}/tasks"), None).await;
    assert_eq!(tasks["tasks"][0]["status"], "submitted");
}
