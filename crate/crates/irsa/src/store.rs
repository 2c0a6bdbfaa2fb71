//! Content-addressed record/replay store: one JSON object per line holding the request
//! hash, the request, and the result.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use irsa_core::backend::{Backend, BackendError, CompletionRequest, CompletionResult};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreLine {
    pub hash: String,
    pub request: CompletionRequest,
    pub result: CompletionResult,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("store `{0}` does not exist")]
    Missing(PathBuf),
    #[error("{path}:{line}: {msg}")]
    Corrupt { path: PathBuf, line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Hash over the request fields that determine a completion.
pub fn request_hash(req: &CompletionRequest) -> String {
    let key = serde_json::json!({
        "context": req.context,
        "stop": req.stop,
        "max_tokens": req.max_tokens,
        "temperature": req.temperature,
        "logprobs": req.logprobs,
    });
    hex::encode(Sha256::digest(key.to_string().as_bytes()))
}

fn read_lines(path: &Path) -> Result<Vec<StoreLine>, StoreError> {
    if !path.exists() {
        return Err(StoreError::Missing(path.to_path_buf()));
    }
    let mut out = Vec::new();
    for (k, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let corrupt = |msg: String| StoreError::Corrupt { path: path.to_path_buf(), line: k + 1, msg };
        let entry: StoreLine = serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
        if request_hash(&entry.request) != entry.hash {
            return Err(corrupt(format!("hash {} does not match its request", entry.hash)));
        }
        out.push(entry);
    }
    Ok(out)
}

/// Serves recorded completions; anything unrecorded is a cache miss.
#[derive(Debug, Clone)]
pub struct Replay {
    entries: HashMap<String, CompletionResult>,
}

impl Replay {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let entries = read_lines(path.as_ref())?.into_iter().map(|e| (e.hash, e.result)).collect();
        Ok(Replay { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Backend for Replay {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        let h = request_hash(req);
        self.entries.get(&h).cloned().ok_or(BackendError::CacheMiss(h))
    }
}

/// Wraps a live backend and appends every new exchange to the store. Requests already in
/// the store are answered from it.
pub struct Recorder<B> {
    inner: B,
    seen: RwLock<HashMap<String, CompletionResult>>,
    file: Mutex<File>,
}

impl<B: Backend> Recorder<B> {
    pub fn open(inner: B, path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        let seen = match read_lines(path) {
            Ok(lines) => lines.into_iter().map(|e| (e.hash, e.result)).collect(),
            Err(StoreError::Missing(_)) => HashMap::new(),
            Err(e) => return Err(e),
        };
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Recorder { inner, seen: RwLock::new(seen), file: Mutex::new(file) })
    }

    pub fn into_inner(self) -> B {
        self.inner
    }
}

impl<B: Backend> Backend for Recorder<B> {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        let hash = request_hash(req);
        if let Some(hit) = self.seen.read().expect("store lock").get(&hash) {
            return Ok(hit.clone());
        }
        let result = self.inner.complete(req)?;
        let mut seen = self.seen.write().expect("store lock");
        if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(hash) {
            let line = StoreLine { hash: slot.key().clone(), request: req.clone(), result: result.clone() };
            let text = serde_json::to_string(&line).map_err(|e| BackendError::StoreCorrupt(e.to_string()))?;
            let mut file = self.file.lock().expect("store file lock");
            writeln!(file, "{text}").map_err(|e| BackendError::StoreCorrupt(e.to_string()))?;
            slot.insert(result.clone());
        }
        Ok(result)
    }
}

/// Entry count and integrity check for a store file.
pub fn verify_store(path: impl AsRef<Path>) -> Result<usize, StoreError> {
    Ok(read_lines(path.as_ref())?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use irsa_core::backend::ObedientMock;

    #[test]
    fn record_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let ctx = "Problem: 2, 1\nEXECUTION\n";
        let req = CompletionRequest::new(ctx, vec!["END OF EXECUTION".into()], 500);
        let live = Recorder::open(ObedientMock, &path).unwrap().complete(&req).unwrap();
        let replay = Replay::open(&path).unwrap();
        assert_eq!(replay.complete(&req).unwrap(), live);
        let mut other = req.clone();
        other.stop = vec!["</state>".into()];
        assert!(matches!(replay.complete(&other), Err(BackendError::CacheMiss(_))));
        assert!(matches!(Replay::open(dir.path().join("nope")), Err(StoreError::Missing(_))));
        std::fs::write(&path, "{not json\n").unwrap();
        assert!(matches!(Replay::open(&path), Err(StoreError::Corrupt { line: 1, .. })));
    }
}
