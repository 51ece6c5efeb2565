use std::io::Read;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use super::RemoteError;

/// Spaces requests at least `1 / rate` seconds apart across all callers.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    next: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn per_second(rate: f64) -> Self {
        assert!(rate > 0.0 && rate.is_finite(), "rate limit must be positive");
        Self { interval: Duration::from_secs_f64(1.0 / rate), next: Mutex::new(None) }
    }

    pub fn interval(&self) -> Duration {
        self.interval
    }

    /// Blocks until the caller may issue one request.
    pub fn acquire(&self) {
        let mut next = self.next.lock().unwrap_or_else(|p| p.into_inner());
        let now = Instant::now();
        let slot = match *next {
            Some(t) if t > now => {
                std::thread::sleep(t - now);
                t
            }
            _ => now,
        };
        *next = Some(slot + self.interval);
    }
}

#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub backoff: Duration,
}

/// Blocking HTTP client shared by the remote backends: one rate limiter,
/// bounded retries on transport failures and transient statuses.
#[derive(Debug)]
pub struct HttpClient {
    agent: ureq::Agent,
    limiter: RateLimiter,
    retry: RetryPolicy,
    retry_events: AtomicU64,
    requests: AtomicU64,
}

pub(crate) enum Attempt {
    Done(String),
    Transient(String),
    Fatal(RemoteError),
}

/// 429 and gateway/unavailable statuses are treated like transport failures.
pub fn is_transient_status(code: u16) -> bool {
    matches!(code, 429 | 502 | 503 | 504)
}

impl HttpClient {
    pub fn new(timeout: Duration, rate: f64, retry: RetryPolicy) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(timeout).build();
        Self {
            agent,
            limiter: RateLimiter::per_second(rate),
            retry,
            retry_events: AtomicU64::new(0),
            requests: AtomicU64::new(0),
        }
    }

    pub fn agent(&self) -> &ureq::Agent {
        &self.agent
    }

    /// Retries performed since construction.
    pub fn retry_events(&self) -> u64 {
        self.retry_events.load(Ordering::Relaxed)
    }

    /// Requests issued since construction, retries included.
    pub fn requests(&self) -> u64 {
        self.requests.load(Ordering::Relaxed)
    }

    /// Runs `send` under the rate limiter, retrying transient failures up to
    /// the policy's limit. Returns the response body of the first 2xx reply.
    pub fn execute<F>(&self, url: &str, send: F) -> Result<String, RemoteError>
    where
        F: Fn(&ureq::Agent) -> Result<ureq::Response, ureq::Error>,
    {
        let mut attempt = 0u32;
        loop {
            self.limiter.acquire();
            self.requests.fetch_add(1, Ordering::Relaxed);
            let outcome = match send(&self.agent) {
                Ok(resp) => match read_body(resp) {
                    Ok(body) => Attempt::Done(body),
                    Err(e) => Attempt::Transient(format!("reading body: {e}")),
                },
                Err(ureq::Error::Status(code, resp)) if is_transient_status(code) => {
                    Attempt::Transient(format!("HTTP {code} {}", resp.status_text()))
                }
                Err(ureq::Error::Status(code, resp)) => {
                    let body = read_body(resp).unwrap_or_default();
                    Attempt::Fatal(RemoteError::Protocol {
                        url: url.to_owned(),
                        message: format!("HTTP {code}: {}", truncate(&body, 200)),
                    })
                }
                Err(ureq::Error::Transport(t)) => Attempt::Transient(t.to_string()),
            };
            match outcome {
                Attempt::Done(body) => return Ok(body),
                Attempt::Fatal(e) => return Err(e),
                Attempt::Transient(message) if attempt < self.retry.max_retries => {
                    attempt += 1;
                    self.retry_events.fetch_add(1, Ordering::Relaxed);
                    log::warn!("{url}: {message}; retry {attempt}/{}", self.retry.max_retries);
                    std::thread::sleep(self.retry.backoff * attempt);
                }
                Attempt::Transient(message) => return Err(RemoteError::Transport { url: url.to_owned(), message }),
            }
        }
    }
}

fn read_body(resp: ureq::Response) -> std::io::Result<String> {
    let mut body = String::new();
    resp.into_reader().take(256 * 1024 * 1024).read_to_string(&mut body)?;
    Ok(body)
}

fn truncate(s: &str, max: usize) -> &str {
    match s.char_indices().nth(max) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limiter_spaces_requests() {
        let limiter = RateLimiter::per_second(50.0);
        let start = Instant::now();
        for _ in 0..6 {
            limiter.acquire();
        }
        // first is immediate, five more at 20 ms spacing
        assert!(start.elapsed() >= Duration::from_millis(100));
    }

    #[test]
    fn transient_statuses() {
        assert!(is_transient_status(503));
        assert!(is_transient_status(429));
        assert!(!is_transient_status(400));
        assert!(!is_transient_status(500));
    }

    #[test]
    fn connection_refused_is_transport_after_retries() {
        let client = HttpClient::new(
            Duration::from_millis(500),
            1000.0,
            RetryPolicy { max_retries: 2, backoff: Duration::ZERO },
        );
        let url = "http://127.0.0.1:9/unreachable";
        let err = client.execute(url, |agent| agent.get(url).call()).unwrap_err();
        assert!(err.is_transport(), "{err}");
        assert_eq!(client.retry_events(), 2);
        assert_eq!(client.requests(), 3);
    }
}
