//! Prompt assembly and a cached client for OpenAI-compatible chat-completion
//! endpoints. Responses are only ever parsed by [`crate::dsl`], never run.

pub mod cache;
pub mod prompts;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::dsl::{parse_transcript, ParsedProgramSet};
use crate::phonology::Inventory;

pub use cache::{fixtures_to_jsonl, CacheKey, FixtureRecord, Fixtures, ResponseCache};
pub use prompts::{build_datagen_prompt, build_sli_prompt, prompt_hash, PromptBundle, TemplateId, SECTION_MARKERS};

/// Environment variable holding the API key.
pub const API_KEY_VAR: &str = "SLI_API_KEY";

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("expected {expected} seed words, got {got}")]
    WrongSeedCount { expected: usize, got: usize },
    #[error("endpoint answered {status}: {message}")]
    Status { status: u16, message: String },
    #[error("no cached response for prompt {prompt_hash} sample {sample_index} in cache-only mode")]
    CacheMiss { prompt_hash: String, sample_index: usize },
    #[error("gave up after {attempts} attempts: {last}")]
    BudgetExhausted { attempts: usize, last: String },
    #[error("malformed response: {0}")]
    BadResponse(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error("fixtures: {0}")]
    Fixture(String),
    #[error("gateway configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GatewayConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    /// Samples per prompt.
    pub samples: usize,
    pub max_tokens: u32,
    pub retry_budget: usize,
    pub backoff_ms: u64,
    pub timeout_secs: u64,
    pub max_in_flight: usize,
    pub cache_dir: Option<PathBuf>,
    pub cache_only: bool,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        GatewayConfig {
            endpoint: "http://localhost:8000/v1/chat/completions".into(),
            model: "default".into(),
            temperature: 0.8,
            samples: 20,
            max_tokens: 1024,
            retry_budget: 4,
            backoff_ms: 500,
            timeout_secs: 120,
            max_in_flight: 4,
            cache_dir: None,
            cache_only: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionRequest {
    pub model: String,
    pub temperature: f64,
    pub samples: usize,
    pub max_tokens: u32,
    pub prompt: PromptBundle,
}

impl CompletionRequest {
    pub fn new(cfg: &GatewayConfig, prompt: PromptBundle, samples: usize) -> Self {
        CompletionRequest {
            model: cfg.model.clone(),
            temperature: cfg.temperature,
            samples,
            max_tokens: cfg.max_tokens,
            prompt,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub content: String,
    pub finish_reason: Option<String>,
    pub usage: Option<Usage>,
    pub cached: bool,
    pub prompt_hash: String,
    pub sample_index: usize,
}

/// A failed call; `status` is `None` for transport-level failures.
#[derive(Debug, Clone)]
pub struct TransportError {
    pub status: Option<u16>,
    pub message: String,
}

impl TransportError {
    fn retryable(&self) -> bool {
        match self.status {
            None => true,
            Some(s) => s == 429 || s >= 500,
        }
    }
}

/// Sends one chat-completion body and returns the decoded JSON reply.
pub trait Transport: Send + Sync {
    fn post(&self, endpoint: &str, api_key: Option<&str>, body: &Value) -> Result<Value, TransportError>;
}

pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder().timeout_global(Some(timeout)).build();
        HttpTransport { agent: config.into() }
    }
}

impl Transport for HttpTransport {
    fn post(&self, endpoint: &str, api_key: Option<&str>, body: &Value) -> Result<Value, TransportError> {
        let mut req = self.agent.post(endpoint);
        if let Some(k) = api_key {
            req = req.header("Authorization", &format!("Bearer {k}"));
        }
        let mut resp = req.send_json(body).map_err(|e| match e {
            ureq::Error::StatusCode(s) => TransportError { status: Some(s), message: e.to_string() },
            other => TransportError { status: None, message: other.to_string() },
        })?;
        resp.body_mut()
            .read_json::<Value>()
            .map_err(|e| TransportError { status: None, message: format!("undecodable body: {e}") })
    }
}

/// Counting semaphore bounding in-flight requests.
struct Slots {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Slots {
    fn acquire(&self) -> SlotGuard<'_> {
        let mut free = self.free.lock().expect("poisoned");
        while *free == 0 {
            free = self.cv.wait(free).expect("poisoned");
        }
        *free -= 1;
        SlotGuard(self)
    }
}

struct SlotGuard<'a>(&'a Slots);

impl Drop for SlotGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("poisoned") += 1;
        self.0.cv.notify_one();
    }
}

pub struct Gateway {
    pub config: GatewayConfig,
    transport: Option<Box<dyn Transport>>,
    api_key: Option<String>,
    cache: ResponseCache,
    fixtures: Fixtures,
    slots: Slots,
    // identical in-flight requests wait on one lock so only one hits the network
    inflight: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl Gateway {
    /// A gateway over HTTP; the key is read from [`API_KEY_VAR`].
    pub fn new(config: GatewayConfig) -> Result<Self, GatewayError> {
        let transport: Option<Box<dyn Transport>> = if config.cache_only {
            None
        } else {
            Some(Box::new(HttpTransport::new(Duration::from_secs(config.timeout_secs))))
        };
        let key = std::env::var(API_KEY_VAR).ok().filter(|k| !k.is_empty());
        Self::with_transport(config, transport, key)
    }

    pub fn with_transport(
        config: GatewayConfig,
        transport: Option<Box<dyn Transport>>,
        api_key: Option<String>,
    ) -> Result<Self, GatewayError> {
        if config.max_in_flight == 0 {
            return Err(GatewayError::Config("max_in_flight must be at least 1".into()));
        }
        if config.samples == 0 {
            return Err(GatewayError::Config("samples must be at least 1".into()));
        }
        let cache = match &config.cache_dir {
            Some(d) => ResponseCache::at(d)?,
            None => ResponseCache::disabled(),
        };
        let slots = Slots { free: Mutex::new(config.max_in_flight), cv: Condvar::new() };
        Ok(Gateway {
            config,
            transport,
            api_key,
            cache,
            fixtures: Fixtures::default(),
            slots,
            inflight: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_fixtures(mut self, fixtures: Fixtures) -> Self {
        self.fixtures = fixtures;
        self
    }

    fn key<'a>(&'a self, req: &'a CompletionRequest, sample_index: usize) -> CacheKey<'a> {
        CacheKey {
            endpoint: &self.config.endpoint,
            model: &req.model,
            temperature: req.temperature,
            max_tokens: req.max_tokens,
            prompt_hash: &req.prompt.hash,
            sample_index,
        }
    }

    fn lookup(&self, req: &CompletionRequest, i: usize) -> Option<Transcript> {
        let hash = &req.prompt.hash;
        let hit = |content: String, finish_reason: Option<String>| Transcript {
            content,
            finish_reason,
            usage: None,
            cached: true,
            prompt_hash: hash.clone(),
            sample_index: i,
        };
        if let Some(c) = self.fixtures.get(hash, i) {
            return Some(hit(c.to_string(), None));
        }
        self.cache.get(&self.key(req, i)).map(|(c, f)| hit(c, f))
    }

    /// Returns exactly `req.samples` transcripts, from fixtures or cache
    /// where possible, or an error.
    pub fn complete(&self, req: &CompletionRequest) -> Result<Vec<Transcript>, GatewayError> {
        if req.samples == 0 {
            return Err(GatewayError::Config("samples must be at least 1".into()));
        }
        let lock = {
            let mut map = self.inflight.lock().expect("poisoned");
            map.entry(req.prompt.hash.clone()).or_default().clone()
        };
        let _held = lock.lock().expect("poisoned");

        let mut out: Vec<Option<Transcript>> = (0..req.samples).map(|i| self.lookup(req, i)).collect();
        let missing: Vec<usize> = (0..req.samples).filter(|&i| out[i].is_none()).collect();
        if let Some(&first) = missing.first() {
            let Some(transport) = self.transport.as_ref().filter(|_| !self.config.cache_only) else {
                return Err(GatewayError::CacheMiss { prompt_hash: req.prompt.hash.clone(), sample_index: first });
            };
            let fresh = self.fetch(transport.as_ref(), req, missing.len())?;
            for (i, t) in missing.into_iter().zip(fresh) {
                self.cache.put(&self.key(req, i), &t.content, t.finish_reason.as_deref())?;
                out[i] = Some(Transcript { sample_index: i, ..t });
            }
        }
        Ok(out.into_iter().map(|t| t.expect("every index filled")).collect())
    }

    fn fetch(&self, transport: &dyn Transport, req: &CompletionRequest, n: usize) -> Result<Vec<Transcript>, GatewayError> {
        let body = json!({
            "model": req.model,
            "messages": [{"role": "user", "content": req.prompt.text}],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
            "n": n,
        });
        let mut last = String::new();
        for attempt in 0..self.config.retry_budget.max(1) {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(self.config.backoff_ms << (attempt - 1).min(10)));
            }
            let reply = {
                let _slot = self.slots.acquire();
                transport.post(&self.config.endpoint, self.api_key.as_deref(), &body)
            };
            match reply {
                Ok(v) => return parse_reply(&v, n, &req.prompt.hash),
                Err(e) if e.retryable() => {
                    log::warn!("completion attempt {} failed: {}", attempt + 1, e.message);
                    last = e.message;
                }
                Err(e) => {
                    return Err(GatewayError::Status { status: e.status.unwrap_or(0), message: e.message });
                }
            }
        }
        Err(GatewayError::BudgetExhausted { attempts: self.config.retry_budget.max(1), last })
    }
}

fn parse_reply(v: &Value, n: usize, prompt_hash: &str) -> Result<Vec<Transcript>, GatewayError> {
    let choices = v
        .get("choices")
        .and_then(Value::as_array)
        .ok_or_else(|| GatewayError::BadResponse("no `choices` array".into()))?;
    if choices.len() != n {
        return Err(GatewayError::BadResponse(format!("asked for {n} choices, got {}", choices.len())));
    }
    let usage: Option<Usage> = v.get("usage").and_then(|u| serde_json::from_value(u.clone()).ok());
    choices
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let content = c
                .pointer("/message/content")
                .and_then(Value::as_str)
                .ok_or_else(|| GatewayError::BadResponse(format!("choice {i} has no message content")))?;
            Ok(Transcript {
                content: content.to_string(),
                finish_reason: c.get("finish_reason").and_then(Value::as_str).map(str::to_string),
                usage: usage.clone(),
                cached: false,
                prompt_hash: prompt_hash.to_string(),
                sample_index: i,
            })
        })
        .collect()
}

/// Constructor laws found in a transcript, with diagnostics.
pub fn extract_programs(t: &Transcript, inv: &Inventory) -> ParsedProgramSet {
    parse_transcript(&t.content, inv)
}
