use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::dataset::ClueAnswerPair;
use crate::schema::{CrosswordLayout, GeneratorConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredLayout {
    pub id: String,
    pub config: GeneratorConfig,
    pub preferred: Vec<String>,
    pub layout: CrosswordLayout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub pairs: Vec<ClueAnswerPair>,
    pub layouts: Vec<StoredLayout>,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    pub updated_at: u64,
    /// Counter behind pair ids `p{n}`.
    #[serde(default)]
    pub next_pair: u64,
}

impl Session {
    fn new(id: String) -> Self {
        let now = now();
        Session {
            id,
            pairs: Vec::new(),
            layouts: Vec::new(),
            created_at: now,
            updated_at: now,
            next_pair: 0,
        }
    }

    /// Appends pairs under fresh session-local ids.
    pub fn add_pairs(
        &mut self,
        pairs: impl IntoIterator<Item = ClueAnswerPair>,
    ) -> Vec<ClueAnswerPair> {
        let mut added = Vec::new();
        for mut pair in pairs {
            pair.id = format!("p{}", self.next_pair);
            self.next_pair += 1;
            added.push(pair.clone());
            self.pairs.push(pair);
        }
        added
    }

    pub fn touch(&mut self) {
        self.updated_at = now();
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

pub type SessionHandle = Arc<tokio::sync::RwLock<Session>>;

/// Sessions in memory, each mirrored to `<dir>/<id>.json`.
pub struct Store {
    dir: PathBuf,
    sessions: RwLock<HashMap<String, SessionHandle>>,
}

impl Store {
    /// Creates `dir` if needed and loads every session file in it.
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let mut sessions = HashMap::new();
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let text = fs::read_to_string(&path)?;
            let session: Session = serde_json::from_str(&text).map_err(|e| {
                io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}: {e}", path.display()),
                )
            })?;
            sessions.insert(
                session.id.clone(),
                Arc::new(tokio::sync::RwLock::new(session)),
            );
        }
        Ok(Store {
            dir,
            sessions: RwLock::new(sessions),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn create(&self) -> io::Result<Session> {
        let mut sessions = self.sessions.write();
        let id = loop {
            let id = format!("s{:016x}", rand::random::<u64>());
            if !sessions.contains_key(&id) {
                break id;
            }
        };
        let session = Session::new(id.clone());
        self.persist(&session)?;
        sessions.insert(id, Arc::new(tokio::sync::RwLock::new(session.clone())));
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Option<SessionHandle> {
        self.sessions.read().get(id).cloned()
    }

    /// Writes through a temporary file so a crash never leaves half a session.
    pub fn persist(&self, session: &Session) -> io::Result<()> {
        let path = self.dir.join(format!("{}.json", session.id));
        let tmp = path.with_extension("json.tmp");
        fs::write(
            &tmp,
            serde_json::to_vec_pretty(session).expect("session serializes"),
        )?;
        fs::rename(tmp, path)
    }
}
