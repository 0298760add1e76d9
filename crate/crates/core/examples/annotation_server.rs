//! Run the annotation API on an ephemeral port and walk one worker through
//! qualification and a session over HTTP.
//!
//! Pass `--serve` to keep the server running after the walkthrough.

use std::future::IntoFuture;
use std::sync::Arc;

use fusebench::annotation::{server, AnnotationStore, StoreConfig};
use serde_json::{json, Value};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let store = Arc::new(AnnotationStore::open(dir.path(), StoreConfig::default())?);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let base = format!("http://{}", listener.local_addr()?);
    tokio::spawn(axum::serve(listener, server::router(store)).into_future());
    println!("annotation API at {base}, journal in {}", dir.path().display());

    let http = reqwest::Client::new();
    let call = |method: reqwest::Method, path: &str, body: Value| {
        let req = http.request(method, format!("{base}{path}"));
        let req = if body.is_null() { req } else { req.json(&body) };
        let path = path.to_string();
        async move {
            let resp = req.send().await?;
            let status = resp.status();
            let value: Value = resp.json().await?;
            println!("{status:>4}  {path}\n      {value}");
            Ok::<Value, reqwest::Error>(value)
        }
    };
    use reqwest::Method as M;

    call(M::POST, "/workers", json!({"worker_id": "w1"})).await?;
    for _ in 0..3 {
        call(M::POST, "/workers/w1/qualification", json!({"result": "passed", "note": "good"})).await?;
    }
    call(M::POST, "/workers/w1/tutorial", Value::Null).await?;
    for _ in 0..3 {
        call(M::POST, "/workers/w1/qualification", json!({"result": "passed"})).await?;
    }

    call(
        M::POST,
        "/pairs",
        json!({
            "review_set_id": "hotel",
            "reviews": [{"id": "r0", "text": "Our room was cleaned daily. The pool was cold."}],
            "summary": {"id": "s0", "text": "The rooms were clean. The pool was cold."}
        }),
    )
    .await?;
    let session = call(M::POST, "/sessions", json!({"worker_id": "w1", "review_set_id": "hotel", "summary_id": "s0"})).await?;
    let id = session["session_id"].as_str().unwrap_or_default().to_string();

    call(M::GET, &format!("/sessions/{id}/embolden?review=0"), Value::Null).await?;
    let draft = json!({"summary_sentence_index": 0, "review_id": "r0", "highlight_spans": [[4, 26]]});
    call(M::POST, &format!("/sessions/{id}/alignments"), draft.clone()).await?;
    call(M::POST, &format!("/sessions/{id}/alignments"), draft).await?;
    call(M::POST, &format!("/sessions/{id}/advance"), json!({"step": "NextSentence"})).await?;
    call(M::POST, &format!("/sessions/{id}/submit"), Value::Null).await?;
    call(M::GET, "/review-sample?rate=1.0&seed=3", Value::Null).await?;

    if std::env::args().any(|a| a == "--serve") {
        println!("serving until ctrl-c");
        tokio::signal::ctrl_c().await?;
    }
    Ok(())
}
