//! On-disk session store.
//!
//! Layout under the root:
//!
//! ```text
//! sessions/<id>/log            raw uploaded log
//! sessions/<id>/regions.json   semantic regions, if any were defined
//! ```
//!
//! Parsed sessions are kept in memory. Derived responses are cached by
//! (log hash, endpoint, parameter hash); replacing a log changes its hash,
//! so stale entries can never be served and are purged eagerly.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use sha2::{Digest, Sha256};
use touchscope_core::layout::validate_regions;
use touchscope_core::{load_session, SemanticRegion, Session};

const LOG_FILE: &str = "log";
const REGIONS_FILE: &str = "regions.json";
const CACHE_CAPACITY: usize = 1024;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("session {0:?} not found")]
    NotFound(String),
    #[error("invalid session id {0:?}: use letters, digits, '-', '_' or '.'")]
    InvalidId(String),
    #[error("session {0:?} is being written by another request")]
    Busy(String),
    #[error(transparent)]
    Engine(#[from] touchscope_core::Error),
    #[error("store i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt regions file for {id:?}: {source}")]
    Regions {
        id: String,
        source: serde_json::Error,
    },
}

/// Hex sha256 of `bytes`.
pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A parsed session together with its identity and user-defined regions.
#[derive(Debug, Clone)]
pub struct StoredSession {
    pub session: Arc<Session>,
    pub hash: String,
    pub regions: Arc<Vec<SemanticRegion>>,
}

impl StoredSession {
    /// Hash covering the log and the regions, for caches that depend on both.
    pub fn regions_hash(&self) -> String {
        let json = serde_json::to_vec(&*self.regions).expect("regions serialize");
        content_hash(&json)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CacheKey {
    session_hash: String,
    endpoint: &'static str,
    params_hash: String,
}

#[derive(Debug)]
pub struct SessionStore {
    root: PathBuf,
    sessions: RwLock<BTreeMap<String, StoredSession>>,
    // one lock per session id; uploads try-lock, region edits wait
    writers: Mutex<HashMap<String, Arc<Mutex<()>>>>,
    cache: Mutex<HashMap<CacheKey, Arc<Vec<u8>>>>,
}

pub fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

impl SessionStore {
    /// Open (creating if needed) a store rooted at `root` and load every
    /// session already on disk.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(root.join("sessions"))?;
        let store = Self {
            root,
            sessions: RwLock::new(BTreeMap::new()),
            writers: Mutex::new(HashMap::new()),
            cache: Mutex::new(HashMap::new()),
        };
        let mut loaded = BTreeMap::new();
        for entry in fs::read_dir(store.root.join("sessions"))? {
            let entry = entry?;
            let id = entry.file_name().to_string_lossy().into_owned();
            if !valid_id(&id) || !entry.path().join(LOG_FILE).is_file() {
                tracing::warn!(path = %entry.path().display(), "skipping unrecognised store entry");
                continue;
            }
            let bytes = fs::read(entry.path().join(LOG_FILE))?;
            let session = load_session(&id, &bytes)?;
            let regions = store.read_regions(&id)?;
            loaded.insert(
                id,
                StoredSession {
                    session: Arc::new(session),
                    hash: content_hash(&bytes),
                    regions: Arc::new(regions),
                },
            );
        }
        tracing::info!(sessions = loaded.len(), root = %store.root.display(), "store opened");
        *store.sessions.write() = loaded;
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dir(&self, id: &str) -> PathBuf {
        self.root.join("sessions").join(id)
    }

    fn read_regions(&self, id: &str) -> Result<Vec<SemanticRegion>, StoreError> {
        let path = self.dir(id).join(REGIONS_FILE);
        match fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes).map_err(|source| StoreError::Regions {
                id: id.to_string(),
                source,
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(e.into()),
        }
    }

    fn writer(&self, id: &str) -> Arc<Mutex<()>> {
        self.writers
            .lock()
            .entry(id.to_string())
            .or_default()
            .clone()
    }

    /// Store a log under `id` (or under a hash-derived id when `None`).
    /// Returns the stored session and whether it was newly created.
    /// Replacing a log clears the session's regions.
    pub fn put_log(
        &self,
        id: Option<&str>,
        bytes: &[u8],
    ) -> Result<(StoredSession, bool), StoreError> {
        let hash = content_hash(bytes);
        let id = match id {
            Some(id) => id.to_string(),
            None => format!("s-{}", &hash[..12]),
        };
        if !valid_id(&id) {
            return Err(StoreError::InvalidId(id));
        }
        let lock = self.writer(&id);
        let _guard = lock
            .try_lock()
            .ok_or_else(|| StoreError::Busy(id.clone()))?;

        let session = load_session(&id, bytes)?;
        let dir = self.dir(&id);
        fs::create_dir_all(&dir)?;
        write_atomic(&dir.join(LOG_FILE), bytes)?;
        match fs::remove_file(dir.join(REGIONS_FILE)) {
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => return Err(e.into()),
            _ => {}
        }

        let stored = StoredSession {
            session: Arc::new(session),
            hash,
            regions: Arc::new(Vec::new()),
        };
        let previous = self.sessions.write().insert(id.clone(), stored.clone());
        if let Some(old) = &previous {
            if old.hash != stored.hash {
                self.purge(&old.hash);
            }
        }
        tracing::info!(session = %id, hash = %stored.hash, replaced = previous.is_some(), "log stored");
        Ok((stored, previous.is_none()))
    }

    pub fn get(&self, id: &str) -> Result<StoredSession, StoreError> {
        self.sessions
            .read()
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    /// All sessions in lexicographic id order.
    pub fn list(&self) -> Vec<StoredSession> {
        self.sessions.read().values().cloned().collect()
    }

    /// Validate and persist the semantic regions of a session.
    pub fn put_regions(
        &self,
        id: &str,
        regions: Vec<SemanticRegion>,
    ) -> Result<StoredSession, StoreError> {
        let lock = self.writer(id);
        let _guard = lock.lock();
        let current = self.get(id)?;
        validate_regions(&regions, &current.session.device)?;
        let json = serde_json::to_vec_pretty(&regions).expect("regions serialize");
        write_atomic(&self.dir(id).join(REGIONS_FILE), &json)?;
        let updated = StoredSession {
            regions: Arc::new(regions),
            ..current
        };
        self.sessions
            .write()
            .insert(id.to_string(), updated.clone());
        Ok(updated)
    }

    /// Cached response bytes, computing and storing them on a miss.
    pub fn cached<E>(
        &self,
        session_hash: &str,
        endpoint: &'static str,
        params_hash: String,
        compute: impl FnOnce() -> Result<Vec<u8>, E>,
    ) -> Result<Arc<Vec<u8>>, E> {
        let key = CacheKey {
            session_hash: session_hash.to_string(),
            endpoint,
            params_hash,
        };
        if let Some(hit) = self.cache.lock().get(&key) {
            return Ok(hit.clone());
        }
        let value = Arc::new(compute()?);
        let mut cache = self.cache.lock();
        if cache.len() >= CACHE_CAPACITY {
            cache.clear();
        }
        cache.insert(key, value.clone());
        Ok(value)
    }

    pub fn cache_len(&self) -> usize {
        self.cache.lock().len()
    }

    fn purge(&self, session_hash: &str) {
        self.cache
            .lock()
            .retain(|k, _| k.session_hash != session_hash);
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}
