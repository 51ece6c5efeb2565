//! Sentence encoders and cosine similarity.
//!
//! Every encoder maps a batch of non-empty texts to L2-normalized vectors of
//! a fixed dimension. The built-in [`FallbackEncoder`] hashes character
//! trigrams and needs no model; [`SidecarClient`] talks to an external model
//! server over line-delimited JSON.

mod fallback;
mod sidecar;

pub use fallback::{FallbackEncoder, DEFAULT_SEED};
pub use sidecar::{Handshake, SidecarClient};

use thiserror::Error;

pub const DEFAULT_DIMENSION: usize = 384;

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("nothing to encode")]
    EmptyBatch,
    #[error("text #{0} is empty")]
    EmptyText(usize),
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("vector is empty, zero or contains non-finite values")]
    InvalidVector,
    #[error("encoder sidecar unreachable at {addr}: {message} (use `--encoder fallback` to run without it)")]
    Transport { addr: String, message: String },
    #[error("encoder sidecar protocol error: {0}")]
    Protocol(String),
}

/// A dense vector. Encoders only emit unit-norm embeddings; arbitrary
/// non-zero finite vectors are allowed so similarity can be computed on
/// scaled or hand-built vectors too.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    values: Vec<f64>,
}

impl Embedding {
    pub fn new(values: Vec<f64>) -> Result<Self, EncodeError> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) || values.iter().all(|v| *v == 0.0) {
            return Err(EncodeError::InvalidVector);
        }
        Ok(Self { values })
    }

    /// Builds and L2-normalizes.
    pub fn unit(values: Vec<f64>) -> Result<Self, EncodeError> {
        Ok(Self::new(values)?.normalized())
    }

    pub fn normalized(mut self) -> Self {
        let norm = self.norm();
        for v in &mut self.values {
            *v /= norm;
        }
        self
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, EncodeError> {
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }
}

/// Cosine similarity clamped to `[-1, 1]`.
pub fn cosine(u: &Embedding, v: &Embedding) -> Result<f64, EncodeError> {
    if u.dimension() != v.dimension() {
        return Err(EncodeError::DimensionMismatch(u.dimension(), v.dimension()));
    }
    let dot: f64 = u.values.iter().zip(&v.values).map(|(a, b)| a * b).sum();
    let sq = |e: &Embedding| e.values.iter().map(|x| x * x).sum::<f64>();
    // sqrt(a*b) keeps cos(v, v) == 1 exactly; fall back when the product leaves range
    let product = sq(u) * sq(v);
    let denom = if product.is_finite() && product > 0.0 { product.sqrt() } else { u.norm() * v.norm() };
    Ok((dot / denom).clamp(-1.0, 1.0))
}

#[derive(Debug)]
pub enum EncoderBackend {
    Fallback(FallbackEncoder),
    Sidecar(SidecarClient),
}

/// Encoder selected at startup, shared by every validation.
#[derive(Debug)]
pub struct EncoderHandle {
    backend: EncoderBackend,
}

impl EncoderHandle {
    pub fn fallback(dimension: usize) -> Self {
        Self { backend: EncoderBackend::Fallback(FallbackEncoder::new(dimension, DEFAULT_SEED)) }
    }

    pub fn sidecar(addr: &str) -> Result<Self, EncodeError> {
        Ok(Self { backend: EncoderBackend::Sidecar(SidecarClient::connect(addr)?) })
    }

    pub fn backend(&self) -> &EncoderBackend {
        &self.backend
    }

    pub fn kind(&self) -> &'static str {
        match self.backend {
            EncoderBackend::Fallback(_) => "fallback",
            EncoderBackend::Sidecar(_) => "sidecar",
        }
    }

    pub fn dimension(&self) -> usize {
        match &self.backend {
            EncoderBackend::Fallback(f) => f.dimension(),
            EncoderBackend::Sidecar(s) => s.dimension(),
        }
    }

    pub fn model_name(&self) -> &str {
        match &self.backend {
            EncoderBackend::Fallback(_) => "hashed-char-trigram",
            EncoderBackend::Sidecar(s) => s.model_name(),
        }
    }

    /// One unit-norm embedding per text, in input order.
    pub fn encode<S: AsRef<str> + Sync>(&self, texts: &[S]) -> Result<Vec<Embedding>, EncodeError> {
        if texts.is_empty() {
            return Err(EncodeError::EmptyBatch);
        }
        if let Some(idx) = texts.iter().position(|t| t.as_ref().trim().is_empty()) {
            return Err(EncodeError::EmptyText(idx));
        }
        match &self.backend {
            EncoderBackend::Fallback(f) => Ok(f.encode_batch(texts)),
            EncoderBackend::Sidecar(s) => s.encode(texts),
        }
    }
}
