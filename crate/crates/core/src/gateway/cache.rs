//! Content-addressed transcript cache and recorded fixtures.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::prompts::hex;
use super::GatewayError;

/// One recorded completion: the `sample_index`-th sample for a prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureRecord {
    pub prompt_hash: String,
    pub sample_index: usize,
    pub content: String,
}

/// Replayable completions keyed by prompt hash and sample index.
#[derive(Debug, Clone, Default)]
pub struct Fixtures {
    map: HashMap<(String, usize), String>,
}

impl Fixtures {
    pub fn from_jsonl(text: &str) -> Result<Self, GatewayError> {
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: FixtureRecord = serde_json::from_str(line)
                .map_err(|e| GatewayError::Fixture(format!("line {}: {e}", i + 1)))?;
            map.insert((rec.prompt_hash, rec.sample_index), rec.content);
        }
        Ok(Fixtures { map })
    }

    pub fn load(path: &Path) -> Result<Self, GatewayError> {
        let text = fs::read_to_string(path).map_err(|e| GatewayError::Fixture(format!("{}: {e}", path.display())))?;
        Self::from_jsonl(&text)
    }

    pub fn get(&self, prompt_hash: &str, sample_index: usize) -> Option<&str> {
        self.map.get(&(prompt_hash.to_string(), sample_index)).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Serializes records as fixture JSONL, sorted for stable diffs.
pub fn fixtures_to_jsonl(records: &[FixtureRecord]) -> String {
    let mut recs = records.to_vec();
    recs.sort_by(|a, b| (&a.prompt_hash, a.sample_index).cmp(&(&b.prompt_hash, b.sample_index)));
    recs.iter().map(|r| serde_json::to_string(r).expect("plain struct") + "\n").collect()
}

/// Everything that changes what a sample would be.
#[derive(Debug, Clone, Serialize)]
pub struct CacheKey<'a> {
    pub endpoint: &'a str,
    pub model: &'a str,
    pub temperature: f64,
    pub max_tokens: u32,
    pub prompt_hash: &'a str,
    pub sample_index: usize,
}

impl CacheKey<'_> {
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("plain struct");
        hex(&Sha256::digest(json.as_bytes()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Entry {
    content: String,
    finish_reason: Option<String>,
}

/// On-disk cache; one JSON file per key, written via temp file and rename.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: Option<PathBuf>,
}

impl ResponseCache {
    pub fn disabled() -> Self {
        ResponseCache { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Result<Self, GatewayError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| GatewayError::Cache(format!("{}: {e}", dir.display())))?;
        Ok(ResponseCache { dir: Some(dir) })
    }

    fn path(&self, digest: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{digest}.json")))
    }

    pub fn get(&self, key: &CacheKey<'_>) -> Option<(String, Option<String>)> {
        let path = self.path(&key.digest())?;
        let text = fs::read_to_string(path).ok()?;
        let e: Entry = serde_json::from_str(&text).ok()?;
        Some((e.content, e.finish_reason))
    }

    pub fn put(&self, key: &CacheKey<'_>, content: &str, finish_reason: Option<&str>) -> Result<(), GatewayError> {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path(&key.digest())) else { return Ok(()) };
        let err = |e: std::io::Error| GatewayError::Cache(format!("{}: {e}", path.display()));
        let entry = Entry { content: content.to_string(), finish_reason: finish_reason.map(str::to_string) };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
        tmp.write_all(serde_json::to_string(&entry).expect("plain struct").as_bytes()).map_err(err)?;
        tmp.persist(&path).map_err(|e| err(e.error))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(i: usize) -> CacheKey<'static> {
        CacheKey { endpoint: "http://x", model: "m", temperature: 0.8, max_tokens: 10, prompt_hash: "abc", sample_index: i }
    }

    #[test]
    fn round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let c = ResponseCache::at(dir.path()).unwrap();
        assert!(c.get(&key(0)).is_none());
        c.put(&key(0), "hello ✓", Some("stop")).unwrap();
        assert_eq!(c.get(&key(0)), Some(("hello ✓".to_string(), Some("stop".to_string()))));
        assert!(c.get(&key(1)).is_none());
    }

    #[test]
    fn fixtures_parse_and_reject_garbage() {
        let recs = vec![
            FixtureRecord { prompt_hash: "b".into(), sample_index: 0, content: "y".into() },
            FixtureRecord { prompt_hash: "a".into(), sample_index: 1, content: "x".into() },
        ];
        let text = fixtures_to_jsonl(&recs);
        assert!(text.starts_with("{\"prompt_hash\":\"a\""));
        let f = Fixtures::from_jsonl(&text).unwrap();
        assert_eq!(f.get("a", 1), Some("x"));
        assert_eq!(f.get("a", 0), None);
        assert!(Fixtures::from_jsonl("{\"prompt_hash\":1}").is_err());
    }
}
