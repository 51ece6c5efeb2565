//! Client for an external sentence-encoder process.
//!
//! Wire format, one JSON object per line in each direction:
//!
//! ```text
//! -> {"op":"hello"}
//! <- {"model":"<name>","dim":384}
//! -> {"id":1,"texts":["...", "..."]}
//! <- {"id":1,"dim":384,"vectors":[[...],[...]]}   or   {"id":1,"error":"..."}
//! ```

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Embedding, EncodeError};

const IO_TIMEOUT: Duration = Duration::from_secs(120);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Handshake {
    pub model: String,
    pub dim: usize,
}

#[derive(Serialize)]
struct Request<'a, S: AsRef<str>> {
    id: u64,
    #[serde(serialize_with = "serialize_texts")]
    texts: &'a [S],
}

fn serialize_texts<S: AsRef<str>, Ser: serde::Serializer>(texts: &&[S], ser: Ser) -> Result<Ser::Ok, Ser::Error> {
    ser.collect_seq(texts.iter().map(|t| t.as_ref()))
}

#[derive(Deserialize)]
struct Response {
    id: u64,
    #[serde(default)]
    dim: Option<usize>,
    #[serde(default)]
    vectors: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    error: Option<String>,
}

trait Stream: Read + Write + Send {}
impl<T: Read + Write + Send> Stream for T {}

struct Connection {
    reader: BufReader<Box<dyn Stream>>,
}

impl Connection {
    fn open(addr: &str) -> std::io::Result<Self> {
        #[cfg(unix)]
        if let Some(path) = addr.strip_prefix("unix:") {
            let stream = std::os::unix::net::UnixStream::connect(path)?;
            stream.set_read_timeout(Some(IO_TIMEOUT))?;
            return Ok(Self { reader: BufReader::new(Box::new(stream)) });
        }
        let addr = addr.strip_prefix("tcp://").unwrap_or(addr);
        let stream = TcpStream::connect(addr)?;
        stream.set_read_timeout(Some(IO_TIMEOUT))?;
        stream.set_nodelay(true)?;
        Ok(Self { reader: BufReader::new(Box::new(stream)) })
    }

    fn round_trip(&mut self, line: &str) -> std::io::Result<String> {
        let stream = self.reader.get_mut();
        stream.write_all(line.as_bytes())?;
        stream.write_all(b"\n")?;
        stream.flush()?;
        let mut reply = String::new();
        if self.reader.read_line(&mut reply)? == 0 {
            return Err(std::io::Error::new(std::io::ErrorKind::UnexpectedEof, "sidecar closed the connection"));
        }
        Ok(reply)
    }
}

/// One connection to the sidecar; requests are serialized through it.
pub struct SidecarClient {
    addr: String,
    handshake: Handshake,
    conn: Mutex<Connection>,
    next_id: AtomicU64,
}

impl std::fmt::Debug for SidecarClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SidecarClient").field("addr", &self.addr).field("handshake", &self.handshake).finish()
    }
}

impl SidecarClient {
    /// Connects (`host:port`, `tcp://host:port` or `unix:/path`) and performs
    /// the hello handshake.
    pub fn connect(addr: &str) -> Result<Self, EncodeError> {
        let transport = |e: std::io::Error| EncodeError::Transport { addr: addr.to_owned(), message: e.to_string() };
        let mut conn = Connection::open(addr).map_err(transport)?;
        let reply = conn.round_trip(r#"{"op":"hello"}"#).map_err(transport)?;
        let handshake: Handshake = serde_json::from_str(reply.trim())
            .map_err(|e| EncodeError::Protocol(format!("bad handshake {:?}: {e}", reply.trim())))?;
        if handshake.dim == 0 {
            return Err(EncodeError::Protocol("handshake reports dimension 0".into()));
        }
        Ok(Self { addr: addr.to_owned(), handshake, conn: Mutex::new(conn), next_id: AtomicU64::new(1) })
    }

    pub fn dimension(&self) -> usize {
        self.handshake.dim
    }

    pub fn model_name(&self) -> &str {
        &self.handshake.model
    }

    pub fn handshake(&self) -> &Handshake {
        &self.handshake
    }

    pub fn encode<S: AsRef<str>>(&self, texts: &[S]) -> Result<Vec<Embedding>, EncodeError> {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let line = serde_json::to_string(&Request { id, texts }).map_err(|e| EncodeError::Protocol(e.to_string()))?;
        let reply = {
            let mut conn = self.conn.lock().unwrap_or_else(|p| p.into_inner());
            conn.round_trip(&line)
                .map_err(|e| EncodeError::Transport { addr: self.addr.clone(), message: e.to_string() })?
        };
        let resp: Response = serde_json::from_str(reply.trim())
            .map_err(|e| EncodeError::Protocol(format!("malformed response: {e}")))?;
        if resp.id != id {
            return Err(EncodeError::Protocol(format!("response id {} for request {id}", resp.id)));
        }
        if let Some(err) = resp.error {
            return Err(EncodeError::Protocol(err));
        }
        let vectors =
            resp.vectors.ok_or_else(|| EncodeError::Protocol("response has neither vectors nor error".into()))?;
        if vectors.len() != texts.len() {
            return Err(EncodeError::Protocol(format!("{} vectors for {} texts", vectors.len(), texts.len())));
        }
        let dim = resp.dim.unwrap_or(self.handshake.dim);
        if dim != self.handshake.dim {
            return Err(EncodeError::DimensionMismatch(dim, self.handshake.dim));
        }
        vectors
            .into_iter()
            .map(|v| {
                if v.len() != dim {
                    return Err(EncodeError::DimensionMismatch(v.len(), dim));
                }
                Embedding::unit(v)
            })
            .collect()
    }
}
