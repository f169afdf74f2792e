use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use nlstl_core::llm::{ChatBackend, ChatRequest, HttpBackend, LlmError, RetryPolicy};

struct Reply {
    status: u16,
    body: String,
    delay: Duration,
}

fn ok(content: &str) -> Reply {
    let body = serde_json::json!({
        "id": "cmpl-1",
        "choices": [{ "index": 0, "message": { "role": "assistant", "content": content } }]
    });
    Reply {
        status: 200,
        body: body.to_string(),
        delay: Duration::ZERO,
    }
}

fn status(code: u16) -> Reply {
    Reply {
        status: code,
        body: "{\"error\":\"nope\"}".into(),
        delay: Duration::ZERO,
    }
}

/// Serves the replies in order, one connection each, and records requests.
/// Connections are handled concurrently so a slow reply does not block the next.
fn stub(replies: Vec<Reply>) -> (String, Arc<Mutex<Vec<String>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    thread::spawn(move || {
        for reply in replies {
            let Ok((mut stream, _)) = listener.accept() else { return };
            let log = log.clone();
            thread::spawn(move || {
                let request = read_request(&stream);
                log.lock().unwrap().push(request);
                thread::sleep(reply.delay);
                let _ = write!(
                    stream,
                    "HTTP/1.1 {} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                    reply.status,
                    reply.body.len(),
                    reply.body
                );
            });
        }
    });
    (format!("http://{addr}/v1"), seen)
}

fn read_request(stream: &TcpStream) -> String {
    let mut reader = BufReader::new(stream);
    let mut head = String::new();
    let mut len = 0;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 {
            break;
        }
        if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
            len = v.trim().parse().unwrap_or(0);
        }
        head.push_str(&line);
        if line == "\r\n" {
            break;
        }
    }
    let mut body = vec![0; len];
    reader.read_exact(&mut body).unwrap();
    head + &String::from_utf8_lossy(&body)
}

fn policy(retries: u32) -> RetryPolicy {
    RetryPolicy {
        max_retries: retries,
        base_delay: Duration::from_millis(5),
        max_delay: Duration::from_millis(20),
        jitter: 0.5,
    }
}

fn request() -> ChatRequest {
    ChatRequest::new("gen", "You translate.", "Always x above zero.")
}

#[test]
fn parses_assistant_content_and_sends_wire_format() {
    std::env::set_var("NLSTL_TEST_KEY_A", "secret-value-a");
    let (url, seen) = stub(vec![ok("G[0,5] ( x > 0 )")]);
    let b = HttpBackend::new(&url, "gpt-x", Some("NLSTL_TEST_KEY_A"), Duration::from_secs(5), policy(0)).unwrap();
    let resp = b.complete(&request()).unwrap();
    assert_eq!(resp.text, "G[0,5] ( x > 0 )");
    assert_eq!(resp.backend_id, "http:gpt-x");
    let raw = seen.lock().unwrap()[0].clone();
    assert!(raw.starts_with("POST /v1/chat/completions HTTP/1.1"));
    assert!(raw.to_ascii_lowercase().contains("authorization: bearer secret-value-a"));
    let body: serde_json::Value = serde_json::from_str(raw.split("\r\n\r\n").nth(1).unwrap()).unwrap();
    assert_eq!(body["model"], "gpt-x");
    assert_eq!(body["messages"][1]["content"], "Always x above zero.");
    assert_eq!(body["temperature"], 0.0);
}

#[test]
fn retries_transient_statuses() {
    let (url, seen) = stub(vec![status(503), status(429), ok("F[0,1] ( y < 2 )")]);
    let b = HttpBackend::new(&url, "m", None, Duration::from_secs(5), policy(3)).unwrap();
    assert_eq!(b.complete(&request()).unwrap().text, "F[0,1] ( y < 2 )");
    assert_eq!(seen.lock().unwrap().len(), 3);
}

#[test]
fn gives_up_after_max_retries() {
    let (url, seen) = stub((0..5).map(|_| status(500)).collect());
    let b = HttpBackend::new(&url, "m", None, Duration::from_secs(5), policy(2)).unwrap();
    assert_eq!(b.complete(&request()), Err(LlmError::HttpStatus(500)));
    assert_eq!(seen.lock().unwrap().len(), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let (url, seen) = stub(vec![status(401), ok("unused")]);
    let b = HttpBackend::new(&url, "m", None, Duration::from_secs(5), policy(3)).unwrap();
    assert_eq!(b.complete(&request()), Err(LlmError::HttpStatus(401)));
    assert_eq!(seen.lock().unwrap().len(), 1);
}

#[test]
fn timeouts_respect_budget() {
    let slow = || Reply {
        delay: Duration::from_millis(400),
        ..ok("late")
    };
    let (url, seen) = stub(vec![slow(), slow(), slow()]);
    let timeout = Duration::from_millis(100);
    let p = policy(1);
    let budget = p.backoff_budget();
    let b = HttpBackend::new(&url, "m", None, timeout, p).unwrap();
    let start = Instant::now();
    assert_eq!(b.complete(&request()), Err(LlmError::Timeout));
    let elapsed = start.elapsed();
    assert!(elapsed <= 2 * timeout + budget + Duration::from_millis(250), "{elapsed:?}");
    thread::sleep(Duration::from_millis(50));
    assert_eq!(seen.lock().unwrap().len(), 2);
}

#[test]
fn malformed_body() {
    let (url, _) = stub(vec![Reply {
        status: 200,
        body: "{\"choices\":[]}".into(),
        delay: Duration::ZERO,
    }]);
    let b = HttpBackend::new(&url, "m", None, Duration::from_secs(5), policy(0)).unwrap();
    assert!(matches!(b.complete(&request()), Err(LlmError::MalformedResponse(_))));
}

#[test]
fn credentials_never_leak() {
    let b = HttpBackend::new("http://127.0.0.1:9/v1", "m", Some("NLSTL_TEST_KEY_UNSET"), Duration::from_secs(1), policy(0))
        .unwrap();
    let err = b.complete(&request()).unwrap_err();
    assert_eq!(err, LlmError::CredentialMissing("NLSTL_TEST_KEY_UNSET".into()));

    std::env::set_var("NLSTL_TEST_KEY_B", "secret-value-b");
    let (url, _) = stub(vec![status(403)]);
    let b = HttpBackend::new(&url, "m", Some("NLSTL_TEST_KEY_B"), Duration::from_secs(5), policy(0)).unwrap();
    let err = b.complete(&request()).unwrap_err();
    assert!(!err.to_string().contains("secret-value-b"));
    assert!(!format!("{b:?}").contains("secret-value-b"));
}
