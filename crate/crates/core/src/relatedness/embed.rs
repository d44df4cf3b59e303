//! Embedding providers: a deterministic hashed bag-of-words test embedder,
//! precomputed vector files and a remote HTTP embedding service.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub source_id: String,
    pub values: Vec<f64>,
}

impl EmbeddingVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// One text to embed, identified by the id of the paper it belongs to.
#[derive(Debug, Clone, Copy)]
pub struct EmbedItem<'a> {
    pub id: &'a str,
    pub text: &'a str,
}

pub trait EmbeddingProvider: Send + Sync {
    /// Identifier recorded in report metadata.
    fn model_id(&self) -> String;

    /// One entry per item, in order; `None` when the provider has no vector
    /// for that item.
    fn embed(&self, items: &[EmbedItem<'_>]) -> Result<Vec<Option<EmbeddingVector>>>;
}

/// Which provider to construct, as written on the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "location")]
pub enum EmbeddingSpec {
    File(String),
    Url(String),
    Test,
}

impl FromStr for EmbeddingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "test" {
            Ok(EmbeddingSpec::Test)
        } else if let Some(path) = s.strip_prefix("file:").filter(|p| !p.is_empty()) {
            Ok(EmbeddingSpec::File(path.to_string()))
        } else if let Some(url) = s.strip_prefix("url:").filter(|u| !u.is_empty()) {
            Ok(EmbeddingSpec::Url(url.to_string()))
        } else {
            Err(Error::EmbeddingSpec(s.to_string()))
        }
    }
}

impl std::fmt::Display for EmbeddingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EmbeddingSpec::File(p) => write!(f, "file:{p}"),
            EmbeddingSpec::Url(u) => write!(f, "url:{u}"),
            EmbeddingSpec::Test => f.write_str("test"),
        }
    }
}

impl EmbeddingSpec {
    pub fn build(&self) -> Result<Box<dyn EmbeddingProvider>> {
        Ok(match self {
            EmbeddingSpec::Test => Box::new(TestEmbedder::default()),
            EmbeddingSpec::File(path) => Box::new(PrecomputedVectors::load(path)?),
            EmbeddingSpec::Url(url) => Box::new(RemoteEmbedder::connect(url)?),
        })
    }
}

pub const TEST_EMBEDDER_DIM: usize = 256;

/// Hashed bag-of-words embedder: lowercase alphanumeric tokens are hashed
/// with 64-bit FNV-1a into `dim` buckets, then the count vector is scaled to
/// unit length. Word order does not matter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestEmbedder {
    pub dim: usize,
}

impl Default for TestEmbedder {
    fn default() -> Self {
        TestEmbedder { dim: TEST_EMBEDDER_DIM }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0100_0000_01b3;
    bytes.iter().fold(OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(PRIME))
}

impl TestEmbedder {
    pub fn vector(&self, id: &str, text: &str) -> EmbeddingVector {
        let mut values = vec![0.0; self.dim];
        for token in text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()) {
            let bucket = fnv1a(token.to_lowercase().as_bytes()) % self.dim as u64;
            values[bucket as usize] += 1.0;
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            values.iter_mut().for_each(|v| *v /= norm);
        }
        EmbeddingVector { source_id: id.to_string(), values }
    }
}

impl EmbeddingProvider for TestEmbedder {
    fn model_id(&self) -> String {
        format!("test-hashed-bow-fnv1a-{}", self.dim)
    }

    fn embed(&self, items: &[EmbedItem<'_>]) -> Result<Vec<Option<EmbeddingVector>>> {
        Ok(items.iter().map(|item| Some(self.vector(item.id, item.text))).collect())
    }
}

/// Vectors read from a file of `id<TAB>v1,v2,…,vd` lines.
#[derive(Debug, Clone, Default)]
pub struct PrecomputedVectors {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
    origin: String,
}

impl PrecomputedVectors {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut out = PrecomputedVectors { origin: origin.to_string(), ..Default::default() };
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fail = |message: String| Error::Provider(format!("{origin}:{}: {message}", i + 1));
            let (id, values) = line.split_once('\t').ok_or_else(|| fail("expected id<TAB>values".into()))?;
            let values = values
                .split(',')
                .map(|v| v.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| fail(format!("non-numeric or non-finite value for {id:?}")))?;
            if out.vectors.is_empty() {
                out.dim = values.len();
            } else if values.len() != out.dim {
                return Err(fail(format!("dimension {} differs from {}", values.len(), out.dim)));
            }
            if out.vectors.insert(id.to_string(), values).is_some() {
                return Err(fail(format!("duplicate id {id:?}")));
            }
        }
        Ok(out)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl EmbeddingProvider for PrecomputedVectors {
    fn model_id(&self) -> String {
        format!("precomputed:{}", self.origin)
    }

    fn embed(&self, items: &[EmbedItem<'_>]) -> Result<Vec<Option<EmbeddingVector>>> {
        Ok(items
            .iter()
            .map(|item| {
                self.vectors
                    .get(item.id)
                    .map(|values| EmbeddingVector { source_id: item.id.to_string(), values: values.clone() })
            })
            .collect())
    }
}

/// Request body of `POST /embed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedRequest {
    pub texts: Vec<String>,
}

/// Response body of `POST /embed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedResponse {
    pub dim: usize,
    pub vectors: Vec<Vec<f64>>,
}

/// Response body of `GET /health`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub model_id: String,
    pub dim: usize,
}

/// Largest batch the embedding service accepts in one request.
pub const MAX_BATCH: usize = 256;
const ATTEMPTS: usize = 3;

/// Client for the local embedding service.
pub struct RemoteEmbedder {
    base: String,
    agent: ureq::Agent,
    model_id: String,
    batch: usize,
    backoff: Duration,
    /// Dimension of the first response; later responses must match it.
    dim: OnceLock<usize>,
}

fn transport_error(err: ureq::Error) -> Error {
    let retryable = matches!(
        err,
        ureq::Error::Io(_) | ureq::Error::Timeout(_) | ureq::Error::ConnectionFailed | ureq::Error::HostNotFound
    );
    Error::Transport { message: err.to_string(), retryable }
}

impl RemoteEmbedder {
    /// Creates a client and asks `/health` for the model identity.
    pub fn connect(base_url: &str) -> Result<Self> {
        let mut embedder = Self::new(base_url);
        let health = embedder.health()?;
        embedder.model_id = health.model_id;
        Ok(embedder)
    }

    /// Creates a client without contacting the service.
    pub fn new(base_url: &str) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .http_status_as_error(false)
            .build()
            .into();
        RemoteEmbedder {
            base: base_url.trim_end_matches('/').to_string(),
            agent,
            model_id: "remote:unknown".into(),
            batch: MAX_BATCH,
            backoff: Duration::from_millis(250),
            dim: OnceLock::new(),
        }
    }

    pub fn with_batch_size(mut self, batch: usize) -> Self {
        self.batch = batch.clamp(1, MAX_BATCH);
        self
    }

    /// Base delay between retries; attempt `k` waits `k` times this long.
    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }

    pub fn health(&self) -> Result<HealthResponse> {
        self.retrying(|| {
            let mut response = self.agent.get(format!("{}/health", self.base)).call().map_err(transport_error)?;
            check_status(response.status().as_u16())?;
            response.body_mut().read_json::<HealthResponse>().map_err(|e| Error::Provider(e.to_string()))
        })
    }

    fn retrying<T>(&self, mut call: impl FnMut() -> Result<T>) -> Result<T> {
        let mut attempt = 1;
        loop {
            match call() {
                Err(err) if err.is_retryable() && attempt < ATTEMPTS => {
                    log::warn!("embedding service: {err}; retrying");
                    std::thread::sleep(self.backoff * attempt as u32);
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    /// Sends one `/embed` request and checks the response against the contract.
    pub fn embed_texts(&self, texts: &[String]) -> Result<Vec<Vec<f64>>> {
        let request = EmbedRequest { texts: texts.to_vec() };
        let response = self.retrying(|| {
            let mut response =
                self.agent.post(format!("{}/embed", self.base)).send_json(&request).map_err(transport_error)?;
            check_status(response.status().as_u16())?;
            response.body_mut().read_json::<EmbedResponse>().map_err(|e| Error::Provider(e.to_string()))
        })?;
        if response.vectors.len() != texts.len() {
            return Err(Error::Provider(format!("{} vectors for {} texts", response.vectors.len(), texts.len())));
        }
        if let Some(bad) = response.vectors.iter().find(|v| v.len() != response.dim) {
            return Err(Error::Provider(format!("vector of length {} with dim {}", bad.len(), response.dim)));
        }
        let dim = *self.dim.get_or_init(|| response.dim);
        if response.dim != dim {
            return Err(Error::Provider(format!("dimension changed from {dim} to {}", response.dim)));
        }
        if response.vectors.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Provider("non-finite vector component".into()));
        }
        Ok(response.vectors)
    }
}

fn check_status(status: u16) -> Result<()> {
    match status {
        200..=299 => Ok(()),
        503 | 429 => Err(Error::Transport { message: format!("service returned {status}"), retryable: true }),
        _ => Err(Error::Transport { message: format!("service returned {status}"), retryable: false }),
    }
}

impl EmbeddingProvider for RemoteEmbedder {
    fn model_id(&self) -> String {
        self.model_id.clone()
    }

    fn embed(&self, items: &[EmbedItem<'_>]) -> Result<Vec<Option<EmbeddingVector>>> {
        let mut out: Vec<Option<EmbeddingVector>> = vec![None; items.len()];
        // The service rejects blank texts; those items stay missing.
        let sendable: Vec<usize> = (0..items.len()).filter(|&i| !items[i].text.trim().is_empty()).collect();
        for chunk in sendable.chunks(self.batch) {
            let texts: Vec<String> = chunk.iter().map(|&i| items[i].text.to_string()).collect();
            let vectors = self.embed_texts(&texts)?;
            for (&i, values) in chunk.iter().zip(vectors) {
                out[i] = Some(EmbeddingVector { source_id: items[i].id.to_string(), values });
            }
        }
        Ok(out)
    }
}
