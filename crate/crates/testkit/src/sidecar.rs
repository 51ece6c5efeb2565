//! An in-process encoder sidecar speaking the line-delimited JSON protocol,
//! backed by the hashed-trigram encoder.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use kgvalid_core::encoder::{FallbackEncoder, DEFAULT_SEED};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SidecarFault {
    None,
    /// Replies with an id that does not match the request.
    WrongId,
    /// Replies with vectors one element too short.
    ShortVectors,
    /// Answers every encode request with an error object.
    ErrorReply,
}

pub const MOCK_MODEL: &str = "mock-hashed-trigram";

pub struct MockSidecar {
    port: u16,
    stop: Arc<AtomicBool>,
    requests: Arc<AtomicUsize>,
    thread: Option<JoinHandle<()>>,
}

fn serve(stream: TcpStream, encoder: &FallbackEncoder, fault: SidecarFault, requests: &AtomicUsize) {
    let mut writer = match stream.try_clone() {
        Ok(w) => w,
        Err(_) => return,
    };
    let reader = BufReader::new(stream);
    for line in reader.lines() {
        let Ok(line) = line else { return };
        let reply = match serde_json::from_str::<Value>(&line) {
            Err(e) => json!({"id": 0, "error": format!("bad json: {e}")}),
            Ok(v) if v.get("op").and_then(Value::as_str) == Some("hello") => {
                json!({"model": MOCK_MODEL, "dim": encoder.dimension()})
            }
            Ok(v) => {
                requests.fetch_add(1, Ordering::Relaxed);
                let id = v.get("id").and_then(Value::as_u64).unwrap_or(0);
                let texts: Vec<String> = v
                    .get("texts")
                    .and_then(Value::as_array)
                    .map(|a| a.iter().filter_map(|t| t.as_str().map(str::to_owned)).collect())
                    .unwrap_or_default();
                match fault {
                    SidecarFault::ErrorReply => json!({"id": id, "error": "model failure"}),
                    _ => {
                        let mut vectors: Vec<Vec<f64>> =
                            texts.iter().map(|t| encoder.embed(t).values().to_vec()).collect();
                        if fault == SidecarFault::ShortVectors {
                            for v in &mut vectors {
                                v.pop();
                            }
                        }
                        let id = if fault == SidecarFault::WrongId { id + 1000 } else { id };
                        json!({"id": id, "dim": encoder.dimension(), "vectors": vectors})
                    }
                }
            }
        };
        if writeln!(writer, "{reply}").and_then(|_| writer.flush()).is_err() {
            return;
        }
    }
}

impl MockSidecar {
    pub fn start(dim: usize) -> Self {
        Self::start_with(dim, SidecarFault::None)
    }

    pub fn start_with(dim: usize, fault: SidecarFault) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind sidecar");
        let port = listener.local_addr().expect("local addr").port();
        let stop = Arc::new(AtomicBool::new(false));
        let requests = Arc::new(AtomicUsize::new(0));
        let thread = {
            let stop = Arc::clone(&stop);
            let requests = Arc::clone(&requests);
            std::thread::spawn(move || {
                let encoder = Arc::new(FallbackEncoder::new(dim, DEFAULT_SEED));
                for stream in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { continue };
                    let encoder = Arc::clone(&encoder);
                    let requests = Arc::clone(&requests);
                    std::thread::spawn(move || serve(stream, &encoder, fault, &requests));
                }
            })
        };
        Self { port, stop, requests, thread: Some(thread) }
    }

    pub fn addr(&self) -> String {
        format!("127.0.0.1:{}", self.port)
    }

    /// Encode requests served so far.
    pub fn encode_requests(&self) -> usize {
        self.requests.load(Ordering::Relaxed)
    }
}

impl Drop for MockSidecar {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // wake the accept loop
        let _ = TcpStream::connect(("127.0.0.1", self.port));
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}
