//! The HTTP provider against a local single-purpose server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;

use ontoprep_core::llm::{
    classify_pair, Answer, ChatProvider, HttpProvider, PromptTemplate, ProviderConfig, VerdictCache,
};
use ontoprep_core::Error;

#[derive(Debug, Clone)]
struct Seen {
    headers: Vec<(String, String)>,
    body: serde_json::Value,
}

/// Serves the canned `(status, body)` responses in order, one per connection.
fn serve(responses: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<Seen>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    thread::spawn(move || {
        for (status, body) in responses {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream);
            let mut headers = Vec::new();
            let mut length = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                if let Some((k, v)) = line.split_once(':') {
                    let (k, v) = (k.trim().to_ascii_lowercase(), v.trim().to_owned());
                    if k == "content-length" {
                        length = v.parse().unwrap();
                    }
                    headers.push((k, v));
                }
            }
            let mut buf = vec![0; length];
            reader.read_exact(&mut buf).unwrap();
            log.lock().unwrap().push(Seen { headers, body: serde_json::from_slice(&buf).unwrap() });
            let reply = format!(
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            reader.get_mut().write_all(reply.as_bytes()).unwrap();
        }
    });
    (url, seen)
}

fn config(url: &str, key_env: &str) -> ProviderConfig {
    ProviderConfig {
        retry_backoff_ms: 1,
        retry_limit: 2,
        timeout_secs: 10.0,
        api_key_env: key_env.into(),
        ..ProviderConfig::http(url, "test-model")
    }
}

fn openai(text: &str) -> String {
    serde_json::json!({"choices": [{"message": {"role": "assistant", "content": text}}]}).to_string()
}

#[test]
fn request_shape_and_answer() {
    let (url, seen) = serve(vec![(200, openai("Yes, they are the same."))]);
    std::env::set_var("ONTOPREP_TEST_KEY_A", "secret");
    let cfg = config(&url, "ONTOPREP_TEST_KEY_A");
    let provider = HttpProvider::new(cfg.clone()).unwrap();
    let cache = VerdictCache::in_memory();
    let v = classify_pair(&provider, &cfg, PromptTemplate::PT1, "Heart", "heart", &cache).unwrap();
    assert_eq!(v.answer, Answer::Yes);
    assert!(!v.cached);
    let seen = seen.lock().unwrap();
    assert_eq!(seen.len(), 1);
    let body = &seen[0].body;
    assert_eq!(body["model"], "test-model");
    assert_eq!(body["temperature"], 0);
    assert_eq!(body["messages"][0]["role"], "user");
    assert_eq!(body["messages"][0]["content"], "Is Heart equivalent to heart? Answer yes or no.");
    assert!(seen[0].headers.contains(&("authorization".into(), "Bearer secret".into())));

    let again = classify_pair(&provider, &cfg, PromptTemplate::PT1, "Heart", "heart", &cache).unwrap();
    assert!(again.cached);
    assert_eq!(provider.requests(), 1);
}

#[test]
fn server_errors_are_retried() {
    let (url, seen) = serve(vec![
        (503, "{}".into()),
        (500, "{}".into()),
        (200, serde_json::json!({"content": [{"type": "text", "text": "No."}]}).to_string()),
    ]);
    let cfg = config(&url, "ONTOPREP_TEST_KEY_UNSET");
    let provider = HttpProvider::new(cfg.clone()).unwrap();
    let v = classify_pair(&provider, &cfg, PromptTemplate::PT3, "a", "b", &VerdictCache::in_memory()).unwrap();
    assert_eq!(v.answer, Answer::No);
    assert_eq!(provider.requests(), 3);
    assert!(seen.lock().unwrap()[0].headers.iter().all(|(k, _)| k != "authorization"));
}

#[test]
fn quota_is_reported_without_retry() {
    let (url, _seen) = serve(vec![(429, r#"{"error":"rate limited"}"#.into())]);
    let cfg = config(&url, "ONTOPREP_TEST_KEY_UNSET");
    let provider = HttpProvider::new(cfg.clone()).unwrap();
    let err = classify_pair(&provider, &cfg, PromptTemplate::PT1, "a", "b", &VerdictCache::in_memory()).unwrap_err();
    assert!(matches!(err, Error::QuotaExceeded(_)), "{err:?}");
    assert_eq!(provider.requests(), 1);
}

#[test]
fn unreachable_endpoint_exhausts_retries() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let cfg = config(&format!("http://127.0.0.1:{port}/v1"), "ONTOPREP_TEST_KEY_UNSET");
    let provider = HttpProvider::new(cfg.clone()).unwrap();
    let err = classify_pair(&provider, &cfg, PromptTemplate::PT1, "a", "b", &VerdictCache::in_memory()).unwrap_err();
    assert!(matches!(err, Error::ProviderUnavailable { attempts: 3, .. }), "{err:?}");
}

#[test]
fn custom_auth_header_carries_raw_key() {
    let (url, seen) = serve(vec![(200, serde_json::json!({"message": {"content": "no"}}).to_string())]);
    std::env::set_var("ONTOPREP_TEST_KEY_B", "k2");
    let cfg = ProviderConfig { auth_header: "x-api-key".into(), ..config(&url, "ONTOPREP_TEST_KEY_B") };
    let provider = HttpProvider::new(cfg.clone()).unwrap();
    let v = classify_pair(&provider, &cfg, PromptTemplate::PT1, "a", "b", &VerdictCache::in_memory()).unwrap();
    assert_eq!(v.answer, Answer::No);
    assert!(seen.lock().unwrap()[0].headers.contains(&("x-api-key".into(), "k2".into())));
}
