//! Turns the shared flags into a backend, an encoder and a prefix map.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use kgvalid_core::benchmark::DereferenceCheck;
use kgvalid_core::remote::{EndpointConfig, EndpointKind, FactServiceClient, SparqlClient};
use kgvalid_core::store::{default_source_name, read_manifest};
use kgvalid_core::{
    Backend, EncoderHandle, FactServiceBackend, KnowledgeGraph, LocalBackend, PrefixMap, SparqlBackend,
};

use crate::Common;

pub const FALLBACK_DIMENSION: usize = kgvalid_core::encoder::DEFAULT_DIMENSION;

pub enum BackendChoice {
    Local(LocalBackend),
    Sparql(SparqlBackend),
    FactService(FactServiceBackend),
}

impl BackendChoice {
    pub fn as_backend(&self) -> &dyn Backend {
        match self {
            Self::Local(b) => b,
            Self::Sparql(b) => b,
            Self::FactService(b) => b,
        }
    }

    pub fn deref_check(&self) -> Option<&dyn DereferenceCheck> {
        match self {
            Self::Local(b) => Some(b.kg()),
            Self::Sparql(b) => Some(b.client()),
            Self::FactService(_) => None,
        }
    }
}

pub struct Setup {
    pub prefixes: PrefixMap,
    pub backend: Option<BackendChoice>,
    pub encoder: EncoderHandle,
    pub parallelism: usize,
}

impl Setup {
    pub fn backend(&self) -> &dyn Backend {
        self.backend.as_ref().expect("backend required by caller").as_backend()
    }
}

pub fn prefixes(common: &Common) -> Result<PrefixMap> {
    match &common.prefixes {
        Some(path) => PrefixMap::from_file(path).with_context(|| format!("loading prefixes from {}", path.display())),
        None => Ok(PrefixMap::default()),
    }
}

/// Checks ranges and builds everything. `require_backend` is false only for
/// commands that can run without a graph.
pub fn build(common: &Common, require_backend: bool) -> Result<Setup> {
    if common.k == 0 {
        bail!("--k must be at least 1");
    }
    if !(-1.0..=1.0).contains(&common.tau) {
        bail!("--tau must lie in [-1, 1], got {}", common.tau);
    }
    if common.parallelism == Some(0) {
        bail!("--parallelism must be at least 1");
    }
    let prefixes = prefixes(common)?;
    let backend = select_backend(common, &prefixes)?;
    if require_backend && backend.is_none() {
        bail!("no backend selected: pass --kg, --kg-manifest, --sparql, --fact-service or --endpoints");
    }
    let encoder = if common.encoder == "fallback" {
        EncoderHandle::fallback(FALLBACK_DIMENSION)
    } else {
        EncoderHandle::sidecar(&common.encoder)
            .with_context(|| format!("connecting to encoder sidecar {}", common.encoder))?
    };
    let parallelism = common.parallelism.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    Ok(Setup { prefixes, backend, encoder, parallelism })
}

fn select_backend(common: &Common, prefixes: &PrefixMap) -> Result<Option<BackendChoice>> {
    let local = !common.kg.is_empty() || common.kg_manifest.is_some();
    let chosen = [local, common.sparql.is_some(), common.fact_service.is_some(), common.endpoints.is_some()]
        .iter()
        .filter(|x| **x)
        .count();
    if chosen > 1 {
        bail!("exactly one backend may be selected (local files, --sparql, --fact-service or --endpoints)");
    }
    if local {
        let mut files: Vec<(PathBuf, String)> = common.kg.iter().map(|p| (p.clone(), default_source_name(p))).collect();
        if let Some(manifest) = &common.kg_manifest {
            files.extend(read_manifest(manifest)?);
        }
        let kg = KnowledgeGraph::load(&files, prefixes)?;
        for d in kg.diagnostics() {
            log::warn!("{}: line {}: {}", d.source, d.diagnostic.line, d.diagnostic.message);
        }
        return Ok(Some(BackendChoice::Local(LocalBackend::new(kg))));
    }
    let cfg = if let Some(url) = &common.sparql {
        EndpointConfig::new("", EndpointKind::Sparql, url)?
    } else if let Some(url) = &common.fact_service {
        EndpointConfig::new("", EndpointKind::FactService, url)?
    } else if let Some(path) = &common.endpoints {
        let mut entries = EndpointConfig::load_file(path)?;
        if entries.len() != 1 {
            bail!("{} must hold exactly one endpoint, found {}", path.display(), entries.len());
        }
        entries.remove(0)
    } else {
        return Ok(None);
    };
    Ok(Some(match cfg.kind {
        EndpointKind::Sparql => BackendChoice::Sparql(SparqlBackend::new(SparqlClient::new(cfg)?)),
        EndpointKind::FactService => BackendChoice::FactService(FactServiceBackend::new(FactServiceClient::new(cfg)?)),
    }))
}
