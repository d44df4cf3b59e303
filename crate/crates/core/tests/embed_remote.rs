//! The remote embedding client against an in-process HTTP server that
//! implements the `/health` and `/embed` contract.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use citescope::relatedness::{
    EmbedItem, EmbedRequest, EmbedResponse, EmbeddingProvider, EmbeddingSpec, HealthResponse, RemoteEmbedder, MAX_BATCH,
};
use citescope::Error;

const DIM: usize = 8;

/// Unnormalized deterministic vector for a text.
fn vector_for(text: &str) -> Vec<f64> {
    let mut v = vec![0.0; DIM];
    for (i, b) in text.bytes().enumerate() {
        v[(b as usize + i) % DIM] += 1.5 + (b % 7) as f64;
    }
    v
}

#[derive(Default)]
struct Behaviour {
    /// Number of leading requests answered with this status.
    fail_first: usize,
    fail_status: u16,
    /// Return one vector fewer than requested.
    drop_vector: bool,
    /// Report a different dim on every other call.
    flip_dim: bool,
}

struct MockService {
    url: String,
    requests: Arc<Mutex<Vec<(String, String)>>>,
}

fn respond(stream: &mut TcpStream, status: u16, body: &str) {
    let reason = match status {
        200 => "OK",
        400 => "Bad Request",
        503 => "Service Unavailable",
        _ => "Error",
    };
    let head = format!(
        "HTTP/1.1 {status} {reason}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n",
        body.len()
    );
    stream.write_all(head.as_bytes()).unwrap();
    stream.write_all(body.as_bytes()).unwrap();
}

fn serve(behaviour: Behaviour) -> MockService {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let requests: Arc<Mutex<Vec<(String, String)>>> = Arc::default();
    let log = Arc::clone(&requests);
    let calls = AtomicUsize::new(0);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            let mut length = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some((k, v)) = line.split_once(':') {
                    if k.eq_ignore_ascii_case("content-length") {
                        length = v.trim().parse().unwrap();
                    }
                }
            }
            let mut body = vec![0; length];
            reader.read_exact(&mut body).unwrap();
            let body = String::from_utf8(body).unwrap();
            let path = request_line.split_whitespace().nth(1).unwrap_or("").to_string();
            log.lock().unwrap().push((path.clone(), body.clone()));

            let n = calls.fetch_add(1, Ordering::SeqCst);
            if n < behaviour.fail_first {
                respond(&mut stream, behaviour.fail_status, r#"{"error":"not ready"}"#);
                continue;
            }
            match path.as_str() {
                "/health" => {
                    let h = HealthResponse { status: "ok".into(), model_id: "mock-encoder-1".into(), dim: DIM };
                    respond(&mut stream, 200, &serde_json::to_string(&h).unwrap());
                }
                "/embed" => {
                    let req: EmbedRequest = serde_json::from_str(&body).unwrap();
                    if req.texts.is_empty() || req.texts.len() > MAX_BATCH {
                        respond(&mut stream, 400, r#"{"error":"batch must hold 1 to 256 texts"}"#);
                        continue;
                    }
                    let mut vectors: Vec<Vec<f64>> = req.texts.iter().map(|t| vector_for(t)).collect();
                    if behaviour.drop_vector {
                        vectors.pop();
                    }
                    let mut dim = DIM;
                    if behaviour.flip_dim && n % 2 == 1 {
                        dim = DIM + 1;
                        vectors.iter_mut().for_each(|v| v.push(0.0));
                    }
                    respond(&mut stream, 200, &serde_json::to_string(&EmbedResponse { dim, vectors }).unwrap());
                }
                _ => respond(&mut stream, 404, "{}"),
            }
        }
    });
    MockService { url, requests }
}

fn texts(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("title {i}. abstract words {}", i * 31)).collect()
}

fn client(url: &str) -> RemoteEmbedder {
    RemoteEmbedder::connect(url).unwrap().with_backoff(Duration::from_millis(5))
}

#[test]
fn health_sets_model_identity() {
    let service = serve(Behaviour::default());
    let embedder = client(&service.url);
    assert_eq!(embedder.model_id(), "mock-encoder-1");
    let h = embedder.health().unwrap();
    assert_eq!((h.status.as_str(), h.dim), ("ok", DIM));
    assert_eq!(service.requests.lock().unwrap()[0], ("/health".to_string(), String::new()));
}

#[test]
fn request_body_is_the_documented_json() {
    let service = serve(Behaviour::default());
    let embedder = client(&service.url);
    let vectors = embedder.embed_texts(&["alpha".into(), "beta".into()]).unwrap();
    assert_eq!(vectors, vec![vector_for("alpha"), vector_for("beta")]);
    let (path, body) = service.requests.lock().unwrap()[1].clone();
    assert_eq!(path, "/embed");
    assert_eq!(
        serde_json::from_str::<serde_json::Value>(&body).unwrap(),
        serde_json::json!({"texts": ["alpha", "beta"]})
    );
}

#[test]
fn large_inputs_are_split_into_bounded_batches() {
    let service = serve(Behaviour::default());
    let embedder = client(&service.url);
    let texts = texts(600);
    let items: Vec<EmbedItem> = texts.iter().map(|t| EmbedItem { id: t, text: t }).collect();
    let out = embedder.embed(&items).unwrap();
    assert_eq!(out.len(), 600);
    let sizes: Vec<usize> = service.requests.lock().unwrap()[1..]
        .iter()
        .map(|(_, body)| serde_json::from_str::<EmbedRequest>(body).unwrap().texts.len())
        .collect();
    assert_eq!(sizes, [256, 256, 88]);
    for (item, v) in items.iter().zip(&out) {
        let v = v.as_ref().unwrap();
        assert_eq!(v.source_id, item.id);
        assert_eq!(v.values, vector_for(item.text));
    }
}

#[test]
fn batch_and_singleton_requests_agree() {
    let service = serve(Behaviour::default());
    let embedder = client(&service.url);
    let texts = texts(40);
    let batch = embedder.embed_texts(&texts).unwrap();
    for (text, v) in texts.iter().zip(&batch) {
        let single = embedder.embed_texts(std::slice::from_ref(text)).unwrap();
        for (a, b) in single[0].iter().zip(v) {
            assert!((a - b).abs() <= 1e-6);
        }
    }
}

#[test]
fn blank_texts_are_not_sent() {
    let service = serve(Behaviour::default());
    let embedder = client(&service.url);
    let out = embedder.embed(&[EmbedItem { id: "a", text: "  " }, EmbedItem { id: "b", text: "beta" }]).unwrap();
    assert!(out[0].is_none() && out[1].is_some());
    let body = &service.requests.lock().unwrap()[1].1;
    assert_eq!(serde_json::from_str::<EmbedRequest>(body).unwrap().texts, ["beta"]);
}

#[test]
fn unavailable_service_is_retried() {
    let service = serve(Behaviour { fail_first: 2, fail_status: 503, ..Default::default() });
    let embedder = client(&service.url);
    assert_eq!(embedder.model_id(), "mock-encoder-1");
    assert_eq!(service.requests.lock().unwrap().len(), 3);
}

#[test]
fn persistent_unavailability_gives_up_after_three_attempts() {
    let service = serve(Behaviour { fail_first: 100, fail_status: 503, ..Default::default() });
    let err = RemoteEmbedder::new(&service.url).with_backoff(Duration::from_millis(1)).health().unwrap_err();
    assert!(err.is_retryable(), "{err}");
    assert_eq!(service.requests.lock().unwrap().len(), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let service = serve(Behaviour { fail_first: 1, fail_status: 400, ..Default::default() });
    let err = RemoteEmbedder::new(&service.url).health().unwrap_err();
    assert!(matches!(err, Error::Transport { retryable: false, .. }), "{err}");
    assert_eq!(service.requests.lock().unwrap().len(), 1);
}

#[test]
fn count_mismatch_is_a_provider_error() {
    let service = serve(Behaviour { drop_vector: true, ..Default::default() });
    let err = client(&service.url).embed_texts(&texts(3)).unwrap_err();
    assert!(matches!(err, Error::Provider(ref m) if m == "2 vectors for 3 texts"), "{err}");
}

#[test]
fn changing_dimension_is_rejected() {
    let service = serve(Behaviour { flip_dim: true, ..Default::default() });
    let embedder = client(&service.url);
    embedder.embed_texts(&texts(1)).unwrap();
    let err = embedder.embed_texts(&texts(1)).unwrap_err();
    assert!(matches!(err, Error::Provider(ref m) if m.contains("dimension changed")), "{err}");
}

#[test]
fn url_spec_builds_a_connected_provider() {
    let service = serve(Behaviour::default());
    let spec: EmbeddingSpec = format!("url:{}", service.url).parse().unwrap();
    assert_eq!(spec.build().unwrap().model_id(), "mock-encoder-1");
}
