//! A tiny blocking HTTP server that records every request and answers with a
//! caller-supplied handler.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct RecordedRequest {
    pub method: String,
    /// Path and query, as sent.
    pub url: String,
    pub body: String,
    pub headers: Vec<(String, String)>,
    pub at: Instant,
}

impl RecordedRequest {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.iter().find(|(k, _)| k.eq_ignore_ascii_case(name)).map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct StubResponse {
    pub status: u16,
    pub body: String,
    pub content_type: String,
}

impl StubResponse {
    pub fn json(body: impl Into<String>) -> Self {
        Self { status: 200, body: body.into(), content_type: "application/json".to_owned() }
    }

    pub fn status(status: u16, body: impl Into<String>) -> Self {
        Self { status, body: body.into(), content_type: "text/plain".to_owned() }
    }
}

pub trait Handler: Fn(&RecordedRequest) -> StubResponse + Send + Sync + 'static {}
impl<T: Fn(&RecordedRequest) -> StubResponse + Send + Sync + 'static> Handler for T {}

pub struct StubServer {
    port: u16,
    server: Arc<tiny_http::Server>,
    requests: Arc<Mutex<Vec<RecordedRequest>>>,
    thread: Option<JoinHandle<()>>,
}

impl StubServer {
    pub fn start(handler: impl Handler) -> Self {
        let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").expect("bind stub server"));
        let port = server.server_addr().to_ip().expect("ip listener").port();
        let requests = Arc::new(Mutex::new(Vec::new()));
        let thread = {
            let server = Arc::clone(&server);
            let requests = Arc::clone(&requests);
            std::thread::spawn(move || {
                for mut req in server.incoming_requests() {
                    let mut body = String::new();
                    let _ = req.as_reader().read_to_string(&mut body);
                    let recorded = RecordedRequest {
                        method: req.method().as_str().to_owned(),
                        url: req.url().to_owned(),
                        body,
                        headers: req
                            .headers()
                            .iter()
                            .map(|h| (h.field.as_str().as_str().to_owned(), h.value.as_str().to_owned()))
                            .collect(),
                        at: Instant::now(),
                    };
                    let resp = handler(&recorded);
                    requests.lock().unwrap().push(recorded);
                    let header = tiny_http::Header::from_bytes("Content-Type", resp.content_type.as_bytes())
                        .expect("valid header");
                    let _ = req.respond(
                        tiny_http::Response::from_string(resp.body).with_status_code(resp.status).with_header(header),
                    );
                }
            })
        };
        Self { port, server, requests, thread: Some(thread) }
    }

    /// Base URL with a trailing slash.
    pub fn url(&self) -> String {
        format!("http://127.0.0.1:{}/", self.port)
    }

    pub fn port(&self) -> u16 {
        self.port
    }

    pub fn requests(&self) -> Vec<RecordedRequest> {
        self.requests.lock().unwrap().clone()
    }

    pub fn request_count(&self) -> usize {
        self.requests.lock().unwrap().len()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

/// Answers with the given statuses first, then delegates to `inner`.
pub fn failing_first(statuses: impl IntoIterator<Item = u16>, inner: impl Handler) -> impl Handler {
    let queue = Mutex::new(statuses.into_iter().collect::<VecDeque<u16>>());
    move |req: &RecordedRequest| match queue.lock().unwrap().pop_front() {
        Some(status) => StubResponse::status(status, format!("scripted {status}")),
        None => inner(req),
    }
}

/// Always answers with the same response.
pub fn fixed(resp: StubResponse) -> impl Handler {
    move |_: &RecordedRequest| resp.clone()
}
