use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use roundelim::api::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

const MIS3: &str = "delta: 3\nnodes:\nM^3\nP O^2\nedges:\nM [P O]\nO O";

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, v)
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    call(app, Method::POST, uri, Some(body)).await
}

fn app() -> Router {
    router(AppState::default())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    s
}

#[tokio::test]
async fn re_matches_the_command_line() {
    let (status, v) = post(&app(), "/v1/re", json!({ "problem": MIS3 })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(pretty(&v["result"]), golden("mis3_re.json"));
    assert!(v["timing_ms"].as_f64().unwrap() >= 0.0);
    assert!(v.get("stats").is_some());
}

#[tokio::test]
async fn problem_json_is_accepted() {
    let (_, parsed) = post(&app(), "/v1/parse", json!({ "text": MIS3 })).await;
    let (status, v) = post(&app(), "/v1/re", json!({ "problem": parsed["result"] })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(pretty(&v["result"]), golden("mis3_re.json"));
    let (_, s) = post(&app(), "/v1/serialize", json!({ "problem": parsed["result"] })).await;
    assert_eq!(s["result"]["text"], golden("mis3.problem"));
}

#[tokio::test]
async fn zero_round_of_family() {
    let app = app();
    let (_, f) = post(&app, "/v1/family", json!({ "delta": 4, "a": 2, "x": 1 })).await;
    let (status, v) = post(&app, "/v1/zero-round", json!({ "problem": f["result"] })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["result"]["holds"], false);
    assert_eq!(v["result"]["witness"], json!({ "kind": "labels", "labels": ["A", "M", "P"] }));
}

#[tokio::test]
async fn every_operation_answers() {
    let app = app();
    let family = json!({ "delta": 4, "a": 3, "x": 1 });
    let (_, f) = post(&app, "/v1/family", family.clone()).await;
    let p = f["result"].clone();
    let cases = [
        ("/v1/rere", json!({ "problem": MIS3 })),
        ("/v1/diagram", json!({ "problem": p, "side": "edge" })),
        ("/v1/right-closed-sets", json!({ "problem": p })),
        ("/v1/relax-check", json!({ "from": [[["M"], 1], [["X"], 1]], "to": [[["M", "X"], 2]] })),
        ("/v1/speedup-verify", json!({ "params": { "delta": 4, "a": 4, "x": 0 } })),
        ("/v1/failure-bound", json!({ "problem": p })),
        ("/v1/simplify", json!({ "problem": p })),
        ("/v1/plus", family.clone()),
        ("/v1/mis", json!({ "delta": 3 })),
        ("/v1/expected-re", family.clone()),
        ("/v1/sequence", json!({ "delta": 1048576, "x0": 2, "epsilon": 0.25 })),
        ("/v1/iso", json!({ "left": MIS3, "right": MIS3 })),
        ("/v1/simulate-kods", json!({ "n": 40, "delta": 4, "seed": 1, "k": 1, "a": 2 })),
        ("/v1/simulate-transform", json!({ "n": 40, "delta": 4, "seed": 1, "a": 3, "x": 0 })),
    ];
    for (uri, body) in cases {
        let (status, v) = post(&app, uri, body).await;
        assert_eq!(status, StatusCode::OK, "{uri}: {v}");
        assert!(!v["result"].is_null(), "{uri}");
    }
    let (_, sim) = post(&app, "/v1/simulate-kods", json!({ "n": 40, "delta": 4, "seed": 1, "k": 1, "a": 2 })).await;
    let (status, v) = post(
        &app,
        "/v1/simulate-check",
        json!({ "tree": sim["result"]["tree"], "problem": { "delta": 4, "nodes": [[[["M"], 3], [["X"], 1]], [[["A"], 2], [["X"], 2]], [[["P"], 1], [["O"], 3]]], "edges": [[[["M"], 1], [["A", "O", "P", "X"], 1]], [[["O"], 1], [["A", "M", "O", "X"], 1]], [[["P"], 1], [["M", "X"], 1]], [[["A"], 1], [["M", "O", "X"], 1]], [[["X"], 1], [["A", "M", "O", "P", "X"], 1]]] } }),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["result"]["check"]["verdict"]["holds"], true);
}

#[tokio::test]
async fn error_statuses() {
    let app = app();
    let (status, v) = post(&app, "/v1/parse", json!({ "text": "delta: 3\nnodes:\nM^2\nedges:\nM M" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "bad_request");
    let (status, _) = post(&app, "/v1/re", json!({ "nope": 1 })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, v) = post(&app, "/v1/expected-re", json!({ "delta": 4, "a": 2, "x": 1 })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["error"]["message"].as_str().unwrap().contains("x+2 <= a"));
    let (status, v) = post(&app, "/v1/re", json!({ "problem": MIS3, "limits": { "max_configs": 1 } })).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert!(v["stats"]["explored"].as_u64().is_some());
    let (status, _) = call(&app, Method::GET, "/v1/sessions/s999", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, Method::GET, "/v2/anything", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn sessions_record_history() {
    let app = app();
    let (status, s) = post(&app, "/v1/sessions", json!({})).await;
    assert_eq!(status, StatusCode::CREATED);
    let id = s["id"].as_str().unwrap().to_string();
    let base = format!("/v1/sessions/{id}");
    let (status, _) = call(&app, Method::PUT, &format!("{base}/problems/mis"), Some(json!({ "problem": MIS3 }))).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = call(&app, Method::PUT, &format!("{base}/problems/mis"), Some(json!({ "problem": MIS3 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, first) = post(&app, &format!("{base}/steps"), json!({ "op": "re", "input": "mis", "output": "r1" })).await;
    assert_eq!(status, StatusCode::OK, "{first}");
    assert_eq!(pretty(&first["result"]), golden("mis3_re.json"));
    let (status, second) = post(&app, &format!("{base}/steps"), json!({ "op": "rere", "input": "r1" })).await;
    assert_eq!(status, StatusCode::OK, "{second}");
    assert_eq!(second["step"]["parent"], 0);

    let (_, h) = call(&app, Method::GET, &format!("{base}/history"), None).await;
    assert_eq!(h["steps"].as_array().unwrap().len(), 2);
    let roots = h["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert_eq!(roots[0]["step"]["op"], "re");
    assert_eq!(roots[0]["children"][0]["step"]["op"], "rere");
    assert_eq!(roots[0]["children"][0]["children"], json!([]));

    let (status, _) = post(&app, &format!("{base}/steps"), json!({ "op": "re", "input": "missing" })).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (_, exported) = call(&app, Method::GET, &format!("{base}/export"), None).await;
    let (status, imported) = post(&app, "/v1/sessions/import", exported.clone()).await;
    assert_eq!(status, StatusCode::CREATED);
    let other = imported["id"].as_str().unwrap();
    let (_, again) = call(&app, Method::GET, &format!("/v1/sessions/{other}/export"), None).await;
    assert_eq!(again, exported);
    let (_, p) = call(&app, Method::GET, &format!("/v1/sessions/{other}/problems/r1"), None).await;
    assert_eq!(p["problem"], first["result"]["problem"]);

    let (status, _) = call(&app, Method::DELETE, &base, None).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = call(&app, Method::GET, &base, None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn inconsistent_imports_are_rejected() {
    let bad = json!({ "problems": {}, "history": [{ "id": 0, "parent": null, "op": "re", "input": "a", "output": "b" }] });
    let (status, _) = post(&app(), "/v1/sessions/import", bad).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

async fn poll(app: &Router, job: &str) -> Value {
    for _ in 0..600 {
        let (_, v) = call(app, Method::GET, &format!("/v1/jobs/{job}"), None).await;
        if v["status"] != "running" {
            return v;
        }
        tokio::time::sleep(Duration::from_millis(50)).await;
    }
    panic!("job {job} did not finish");
}

fn heavy() -> String {
    let p = roundelim_core::family::expected_re_problem(
        roundelim_core::family::FamilyParams::new(20, 20, 0).unwrap(),
    )
    .unwrap();
    roundelim_core::serialize_problem(&p)
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn jobs_finish_and_cancel() {
    let app = app();
    let (status, j) = post(&app, "/v1/jobs/rere", json!({ "problem": MIS3 })).await;
    assert_eq!(status, StatusCode::ACCEPTED);
    let done = poll(&app, j["job"].as_str().unwrap()).await;
    assert_eq!(done["status"], "done");
    let (_, sync) = post(&app, "/v1/rere", json!({ "problem": MIS3 })).await;
    assert_eq!(done["result"], sync["result"]);

    let (_, j) = post(&app, "/v1/jobs/sequence", json!({ "delta": 5, "x0": 0, "epsilon": 0.5, "mechanize": true })).await;
    let done = poll(&app, j["job"].as_str().unwrap()).await;
    assert_eq!(done["status"], "done");
    assert_eq!(done["result"]["transitions_hold"], true);

    let (_, j) = post(&app, "/v1/jobs/rere", json!({ "problem": heavy() })).await;
    let id = j["job"].as_str().unwrap();
    let (status, v) = call(&app, Method::DELETE, &format!("/v1/jobs/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["job"], id);
    let end = poll(&app, id).await;
    assert_eq!(end["status"], "cancelled");
    assert_eq!(end["error"]["code"], "cancelled");
    let (status, _) = call(&app, Method::GET, "/v1/jobs/j999", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn synchronous_budget() {
    let state = AppState::with_budget(Duration::from_millis(200));
    let (status, v) = post(&router(state), "/v1/rere", json!({ "problem": heavy() })).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert!(v["error"]["message"].as_str().unwrap().contains("budget"));
}
