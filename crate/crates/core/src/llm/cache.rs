//! Append-only JSON-lines store of LLM verdicts.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{Answer, PromptTemplate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub model: String,
    pub template: PromptTemplate,
    pub e1: String,
    pub e2: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub model: String,
    pub template: PromptTemplate,
    pub e1: String,
    pub e2: String,
    pub answer: Answer,
    pub raw_text: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl CacheRecord {
    pub fn key(&self) -> CacheKey {
        CacheKey {
            model: self.model.clone(),
            template: self.template,
            e1: self.e1.clone(),
            e2: self.e2.clone(),
        }
    }
}

/// Verdicts keyed by model, template and the two entity texts. Writes are
/// appended and flushed one record at a time so an interrupted run loses at
/// most the record in flight.
#[derive(Debug, Default)]
pub struct VerdictCache {
    path: Option<PathBuf>,
    entries: Mutex<HashMap<CacheKey, CacheRecord>>,
    file: Mutex<Option<File>>,
}

impl VerdictCache {
    pub fn in_memory() -> Self {
        VerdictCache::default()
    }

    /// Opens (or creates) a cache file. A truncated final line, as left by an
    /// interrupted write, is cut off; any other malformed line is an error.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_owned();
        let mut entries = HashMap::new();
        let mut valid_len = None;
        if path.exists() {
            let text = fs::read_to_string(&path)
                .map_err(|e| Error::io(format!("reading cache {}", path.display()), e))?;
            let mut offset = 0;
            for line in text.split_inclusive('\n') {
                let is_last = offset + line.len() == text.len();
                if !line.trim().is_empty() {
                    match serde_json::from_str::<CacheRecord>(line) {
                        Ok(record) => {
                            entries.insert(record.key(), record);
                        }
                        Err(_) if is_last && !line.ends_with('\n') => {
                            valid_len = Some(offset as u64);
                            break;
                        }
                        Err(e) => return Err(Error::Cache(e)),
                    }
                }
                offset += line.len();
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(format!("opening cache {}", path.display()), e))?;
        if let Some(len) = valid_len {
            file.set_len(len).map_err(|e| Error::io("truncating verdict cache", e))?;
        }
        Ok(VerdictCache {
            path: Some(path),
            entries: Mutex::new(entries),
            file: Mutex::new(Some(file)),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &CacheKey) -> Option<CacheRecord> {
        self.entries.lock().expect("cache lock").get(key).cloned()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn insert(&self, key: CacheKey, answer: Answer, raw_text: &str) -> Result<CacheRecord> {
        let record = CacheRecord {
            model: key.model.clone(),
            template: key.template,
            e1: key.e1.clone(),
            e2: key.e2.clone(),
            answer,
            raw_text: raw_text.to_owned(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        };
        let mut file = self.file.lock().expect("cache file lock");
        if let Some(file) = file.as_mut() {
            let mut line = serde_json::to_string(&record)?;
            line.push('\n');
            file.write_all(line.as_bytes())
                .and_then(|_| file.flush())
                .map_err(|e| Error::io("appending to verdict cache", e))?;
        }
        self.entries.lock().expect("cache lock").insert(key, record.clone());
        Ok(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(e1: &str) -> CacheKey {
        CacheKey { model: "m".into(), template: PromptTemplate::PT1, e1: e1.into(), e2: "b".into() }
    }

    #[test]
    fn persists_across_opens() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let cache = VerdictCache::open(&path).unwrap();
        cache.insert(key("a"), Answer::Yes, "Yes.").unwrap();
        cache.insert(key("c"), Answer::Unparseable, "Hmm\nwell").unwrap();
        drop(cache);
        let reopened = VerdictCache::open(&path).unwrap();
        assert_eq!(reopened.len(), 2);
        assert_eq!(reopened.get(&key("c")).unwrap().raw_text, "Hmm\nwell");
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
    }

    #[test]
    fn truncated_tail_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let cache = VerdictCache::open(&path).unwrap();
        cache.insert(key("a"), Answer::No, "No").unwrap();
        drop(cache);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"model\":\"m\",\"temp").unwrap();
        drop(f);
        let cache = VerdictCache::open(&path).unwrap();
        assert_eq!(cache.len(), 1);
        cache.insert(key("d"), Answer::Yes, "Yes").unwrap();
        drop(cache);
        assert_eq!(VerdictCache::open(&path).unwrap().len(), 2);
    }

    #[test]
    fn record_fields() {
        let cache = VerdictCache::in_memory();
        let rec = cache.insert(key("a"), Answer::Yes, "yes").unwrap();
        let json: serde_json::Value = serde_json::to_value(&rec).unwrap();
        for field in ["model", "template", "e1", "e2", "answer", "raw_text", "timestamp"] {
            assert!(json.get(field).is_some(), "{field}");
        }
        assert_eq!(json["answer"], "yes");
        assert_eq!(json["template"], "PT1");
    }
}
