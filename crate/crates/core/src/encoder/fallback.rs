use std::hash::Hasher;

use twox_hash::XxHash64;

use super::Embedding;
use crate::par;

pub const DEFAULT_SEED: u64 = 0x6b67_7661_6c69_6431;

/// Hashed character-trigram encoder. The lowercased text is cut into
/// overlapping 3-character windows (texts shorter than 3 characters form a
/// single gram), each gram is hashed with seeded XxHash64 into a bucket, and
/// the bucket counts are L2-normalized.
#[derive(Debug, Clone)]
pub struct FallbackEncoder {
    dimension: usize,
    seed: u64,
}

impl FallbackEncoder {
    pub fn new(dimension: usize, seed: u64) -> Self {
        assert!(dimension > 0, "encoder dimension must be positive");
        Self { dimension, seed }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bucket(&self, gram: &str) -> usize {
        let mut hasher = XxHash64::with_seed(self.seed);
        hasher.write(gram.as_bytes());
        (hasher.finish() % self.dimension as u64) as usize
    }

    /// Caller guarantees `text` is non-blank.
    pub fn embed(&self, text: &str) -> Embedding {
        let lowered: Vec<char> = text.to_lowercase().chars().collect();
        let mut counts = vec![0.0f64; self.dimension];
        if lowered.len() < 3 {
            let gram: String = lowered.iter().collect();
            counts[self.bucket(&gram)] += 1.0;
        } else {
            let mut gram = String::with_capacity(12);
            for window in lowered.windows(3) {
                gram.clear();
                gram.extend(window);
                counts[self.bucket(&gram)] += 1.0;
            }
        }
        Embedding::unit(counts).expect("at least one gram is counted")
    }

    pub fn encode_batch<S: AsRef<str> + Sync>(&self, texts: &[S]) -> Vec<Embedding> {
        par::map_auto(texts, |t| self.embed(t.as_ref()))
    }

    pub fn encode_sequential<S: AsRef<str>>(&self, texts: &[S]) -> Vec<Embedding> {
        texts.iter().map(|t| self.embed(t.as_ref())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::cosine;

    #[test]
    fn deterministic() {
        let enc = FallbackEncoder::new(384, DEFAULT_SEED);
        assert_eq!(enc.embed("abc"), enc.embed("abc"));
        assert_eq!(enc.embed("ABC"), enc.embed("abc"));
    }

    #[test]
    fn repeated_trigram_fills_one_bucket() {
        let enc = FallbackEncoder::new(384, DEFAULT_SEED);
        let v = enc.embed("aaaa");
        let nonzero: Vec<usize> = v.values().iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, _)| i).collect();
        assert_eq!(nonzero, vec![enc.bucket("aaa")]);
        assert_eq!(v.values()[nonzero[0]], 1.0);
    }

    #[test]
    fn short_text_is_one_gram() {
        let enc = FallbackEncoder::new(16, DEFAULT_SEED);
        let v = enc.embed("x");
        assert_eq!(v.values().iter().filter(|x| **x != 0.0).count(), 1);
    }

    #[test]
    fn batch_matches_sequential() {
        let enc = FallbackEncoder::new(384, DEFAULT_SEED);
        let texts: Vec<String> = (0..200).map(|i| format!("entity {i} born in {}", i * 7)).collect();
        assert_eq!(enc.encode_batch(&texts), enc.encode_sequential(&texts));
    }

    #[test]
    fn disjoint_trigrams_are_orthogonal() {
        let enc = FallbackEncoder::new(384, DEFAULT_SEED);
        let a = enc.embed("qqqq");
        let c = enc.embed("zzzz");
        assert_ne!(enc.bucket("qqq"), enc.bucket("zzz"));
        assert_eq!(cosine(&a, &c).unwrap(), 0.0);
        assert_eq!(cosine(&a, &enc.embed("qqqq")).unwrap(), 1.0);
    }
}
