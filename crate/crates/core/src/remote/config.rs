use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;
use url::Url;

use super::RemoteError;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
pub const DEFAULT_MAX_RETRIES: u32 = 2;
pub const DEFAULT_RATE_LIMIT: f64 = 4.0;
pub const DEFAULT_CANDIDATE_CAP: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndpointKind {
    Sparql,
    FactService,
}

impl FromStr for EndpointKind {
    type Err = RemoteError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sparql" => Ok(Self::Sparql),
            "fact-service" | "fact_service" | "factservice" => Ok(Self::FactService),
            other => Err(RemoteError::Config(format!("unknown endpoint kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EndpointConfig {
    pub name: String,
    pub base_url: Url,
    pub kind: EndpointKind,
    pub timeout: Duration,
    pub max_retries: u32,
    /// Maximum requests per second.
    pub rate_limit: f64,
    pub retry_backoff: Duration,
    /// Upper bound on rule-C candidates returned per entity.
    pub candidate_cap: usize,
}

impl EndpointConfig {
    pub fn new(name: impl Into<String>, kind: EndpointKind, url: &str) -> Result<Self, RemoteError> {
        let base_url = Url::parse(url).map_err(|e| RemoteError::Config(format!("invalid URL {url:?}: {e}")))?;
        let name = name.into();
        let cfg = Self {
            name: if name.is_empty() { base_url.host_str().unwrap_or("remote").to_owned() } else { name },
            base_url,
            kind,
            timeout: DEFAULT_TIMEOUT,
            max_retries: DEFAULT_MAX_RETRIES,
            rate_limit: DEFAULT_RATE_LIMIT,
            retry_backoff: Duration::from_millis(250),
            candidate_cap: DEFAULT_CANDIDATE_CAP,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RemoteError> {
        if self.timeout.is_zero() {
            return Err(RemoteError::Config(format!("{}: timeout must be positive", self.name)));
        }
        if !(self.rate_limit > 0.0 && self.rate_limit.is_finite()) {
            return Err(RemoteError::Config(format!("{}: rate limit must be positive", self.name)));
        }
        if self.candidate_cap == 0 {
            return Err(RemoteError::Config(format!("{}: candidate cap must be positive", self.name)));
        }
        Ok(())
    }

    /// Parses endpoint entries, one per line: `name, kind, url[, timeout-secs[, rate]]`.
    pub fn parse_file_contents(text: &str) -> Result<Vec<Self>, RemoteError> {
        let mut out = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = |what: &str| RemoteError::Config(format!("endpoint line {}: {what}", idx + 1));
            if !(3..=5).contains(&fields.len()) {
                return Err(bad("expected `name, kind, url[, timeout[, rate]]`"));
            }
            let mut cfg = Self::new(fields[0], fields[1].parse()?, fields[2])?;
            if let Some(t) = fields.get(3) {
                let secs: f64 = t.parse().map_err(|_| bad("timeout is not a number"))?;
                if !(secs > 0.0 && secs.is_finite()) {
                    return Err(bad("timeout must be positive"));
                }
                cfg.timeout = Duration::from_secs_f64(secs);
            }
            if let Some(r) = fields.get(4) {
                cfg.rate_limit = r.parse().map_err(|_| bad("rate is not a number"))?;
            }
            cfg.validate()?;
            out.push(cfg);
        }
        Ok(out)
    }

    pub fn load_file(path: &Path) -> Result<Vec<Self>, RemoteError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RemoteError::Config(format!("reading {}: {e}", path.display())))?;
        Self::parse_file_contents(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = EndpointConfig::new("dbpedia", EndpointKind::Sparql, "https://dbpedia.org/sparql").unwrap();
        assert_eq!(cfg.timeout, Duration::from_secs(30));
        assert_eq!(cfg.max_retries, 2);
        assert_eq!(cfg.rate_limit, 4.0);
        assert_eq!(cfg.candidate_cap, 5000);
        let unnamed = EndpointConfig::new("", EndpointKind::Sparql, "https://dbpedia.org/sparql").unwrap();
        assert_eq!(unnamed.name, "dbpedia.org");
    }

    #[test]
    fn file_entries() {
        let cfgs = EndpointConfig::parse_file_contents(
            "# endpoints\ndbpedia, sparql, https://dbpedia.org/sparql, 10, 2\nlods, fact-service, http://localhost:8080/api\n",
        )
        .unwrap();
        assert_eq!(cfgs.len(), 2);
        assert_eq!(cfgs[0].timeout, Duration::from_secs(10));
        assert_eq!(cfgs[0].rate_limit, 2.0);
        assert_eq!(cfgs[1].kind, EndpointKind::FactService);
        assert!(EndpointConfig::parse_file_contents("x, sparql, http://a, 0").is_err());
        assert!(EndpointConfig::parse_file_contents("x, sparql, http://a, 1, -1").is_err());
        assert!(EndpointConfig::parse_file_contents("x, graphql, http://a").is_err());
        assert!(EndpointConfig::parse_file_contents("x, sparql").is_err());
    }
}
