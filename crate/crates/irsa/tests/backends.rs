//! HTTP backend against a local stand-in server, and record/replay round trips.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use irsa::http::HttpBackend;
use irsa::store::{request_hash, verify_store, Recorder, Replay, StoreError};
use irsa_core::backend::{Backend, BackendError, CompletionRequest, ObedientMock};
use irsa_core::dataset::{generate_dataset, DatasetParams};
use irsa_core::eval::evaluate_run;
use irsa_core::model::{FinishReason, ProblemInstance, RunConfig, TaskInput, TaskKind};
use irsa_core::prompt::{append_problem, build_single_path_prompt, default_exemplar};
use irsa_core::runtime::{run_skip, Mode};
use irsa_core::trace::TraceStyle;
use serde_json::{json, Value};

struct Seen {
    bodies: Vec<Value>,
    auth: Vec<Option<String>>,
}

fn read_request(stream: &mut TcpStream) -> Option<(Option<String>, Value)> {
    let mut reader = BufReader::new(stream.try_clone().ok()?);
    let mut len = 0;
    let mut auth = None;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).ok()? == 0 {
            return None;
        }
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        let lower = line.to_ascii_lowercase();
        if let Some(v) = lower.strip_prefix("content-length:") {
            len = v.trim().parse().ok()?;
        }
        if lower.starts_with("authorization:") {
            auth = Some(line["authorization:".len()..].trim().to_string());
        }
    }
    let mut body = vec![0; len];
    reader.read_exact(&mut body).ok()?;
    Some((auth, serde_json::from_slice(&body).ok()?))
}

/// Answers completions with the obedient mock; the first `failures` requests get a 503.
fn serve(failures: usize) -> (String, Arc<Mutex<Seen>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}/v1", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Seen { bodies: Vec::new(), auth: Vec::new() }));
    let log = Arc::clone(&seen);
    let count = AtomicUsize::new(0);
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let Some((auth, body)) = read_request(&mut stream) else { continue };
            let n = count.fetch_add(1, Ordering::SeqCst);
            let (status, payload) = if n < failures {
                ("503 Service Unavailable", json!({"error": "busy"}))
            } else {
                let stop: Vec<String> = serde_json::from_value(body.get("stop").cloned().unwrap_or(json!([]))).unwrap();
                let req = CompletionRequest::new(
                    body["prompt"].as_str().unwrap(),
                    stop,
                    body["max_tokens"].as_u64().unwrap() as u32,
                );
                let out = ObedientMock.complete(&req).unwrap();
                let reason = if out.finish_reason == FinishReason::BudgetExhausted { "length" } else { "stop" };
                ("200 OK", json!({"choices": [{"text": out.text, "finish_reason": reason}]}))
            };
            {
                let mut s = log.lock().unwrap();
                s.bodies.push(body);
                s.auth.push(auth);
            }
            let text = payload.to_string();
            let _ = write!(
                stream,
                "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{text}",
                text.len()
            );
        }
    });
    (base, seen)
}

fn lss_setup() -> (irsa_core::prompt::PromptSpec, String, TaskInput) {
    let style = TraceStyle::Lss;
    let spec = build_single_path_prompt(style.task(), &default_exemplar(style), style).unwrap();
    let input = TaskInput::letters("abcabcbb");
    let ctx = append_problem(&spec, &ProblemInstance::new("x", input.clone(), None)).unwrap();
    (spec, ctx, input)
}

#[test]
fn skip_run_over_http_matches_mock() {
    let (base, seen) = serve(1);
    let http = HttpBackend::new(base, Some("sekrit".into()), "test-model");
    let (spec, ctx, input) = lss_setup();
    let cfg = RunConfig::default();
    let over_http = run_skip(&http, &ctx, &spec, Some(&input), &cfg);
    let local = run_skip(&ObedientMock, &ctx, &spec, Some(&input), &cfg);
    assert_eq!(over_http.answer, local.answer);
    assert_eq!(over_http.full_trace, local.full_trace);
    let seen = seen.lock().unwrap();
    // one 503 retried, then one request per call
    assert_eq!(seen.bodies.len(), local.calls_used as usize + 1);
    assert_eq!(seen.bodies[0]["model"], "test-model");
    assert_eq!(seen.bodies[0]["stop"][0], "</state>");
    assert!(seen.auth.iter().all(|a| a.as_deref() == Some("Bearer sekrit")));
}

#[test]
fn persistent_errors_surface_as_transport() {
    let (base, _) = serve(usize::MAX);
    let http = HttpBackend::new(base, None, "m");
    let err = http.complete(&CompletionRequest::new("Input: s = a", vec![], 5)).unwrap_err();
    assert!(matches!(err, BackendError::Transport(ref m) if m.contains("503")), "{err:?}");
}

#[test]
fn record_then_replay_an_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.jsonl");
    let data = generate_dataset(&DatasetParams::new(TaskKind::LongestSubstring, 15, 9)).unwrap();
    let (spec, _, _) = lss_setup();
    let cfg = RunConfig::default();
    let live = {
        let rec = Recorder::open(ObedientMock, &path).unwrap();
        evaluate_run(&rec, &spec, &data, &cfg, Mode::Skip).unwrap()
    };
    let entries = verify_store(&path).unwrap();
    assert!(entries >= data.len());
    let replay = Replay::open(&path).unwrap();
    assert_eq!(replay.len(), entries);
    assert_eq!(evaluate_run(&replay, &spec, &data, &cfg, Mode::Skip).unwrap(), live);
    // reopening the recorder serves existing entries without growing the file
    let rec = Recorder::open(ObedientMock, &path).unwrap();
    evaluate_run(&rec, &spec, &data, &cfg, Mode::Skip).unwrap();
    assert_eq!(verify_store(&path).unwrap(), entries);

    let other = CompletionRequest::new("Input: s = q, r\nSTART\n", vec![], 9);
    assert_eq!(replay.complete(&other), Err(BackendError::CacheMiss(request_hash(&other))));
}

#[test]
fn tampered_store_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.jsonl");
    {
        let rec = Recorder::open(ObedientMock, &path).unwrap();
        let (_, ctx, _) = lss_setup();
        rec.complete(&CompletionRequest::new(ctx, vec!["</state>".into()], 50)).unwrap();
    }
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("\"max_tokens\":50", "\"max_tokens\":51", 1)).unwrap();
    assert!(matches!(Replay::open(&path), Err(StoreError::Corrupt { line: 1, .. })));
    std::fs::write(&path, "{not json\n").unwrap();
    assert!(matches!(verify_store(&path), Err(StoreError::Corrupt { .. })));
    assert!(matches!(Replay::open(dir.path().join("absent.jsonl")), Err(StoreError::Missing(_))));
}
