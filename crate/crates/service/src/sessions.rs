//! In-memory model store with optimistic concurrency and optional write-through.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use parking_lot::RwLock;

use ahp_core::store::{load_model, save_model, ModelDocument, MODEL_EXTENSION};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSession {
    pub model_id: String,
    pub document: ModelDocument,
    pub revision: u64,
}

#[derive(Debug, PartialEq, Eq)]
pub enum UpdateError<E> {
    NotFound,
    Conflict { current: u64 },
    Rejected(E),
}

#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, ModelSession>>,
    data_dir: Option<PathBuf>,
}

impl SessionStore {
    pub fn new(data_dir: Option<PathBuf>) -> Self {
        Self { sessions: RwLock::new(HashMap::new()), data_dir }
    }

    /// Loads every `*.ahp.json` under `dir`, keyed by file stem, at revision 1.
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        let store = Self::new(Some(dir.to_path_buf()));
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
            let Some(id) = name.strip_suffix(MODEL_EXTENSION) else { continue };
            match load_model(&std::fs::read(&path)?) {
                Ok(document) => {
                    let session = ModelSession { model_id: id.to_string(), document, revision: 1 };
                    store.sessions.write().insert(id.to_string(), session);
                }
                Err(e) => tracing::warn!("skipping {}: {e}", path.display()),
            }
        }
        Ok(store)
    }

    pub fn get(&self, id: &str) -> Option<ModelSession> {
        self.sessions.read().get(id).cloned()
    }

    pub fn insert(&self, document: ModelDocument) -> ModelSession {
        let model_id = uuid::Uuid::new_v4().simple().to_string();
        let session = ModelSession { model_id: model_id.clone(), document, revision: 1 };
        let mut map = self.sessions.write();
        self.persist(&session);
        map.insert(model_id, session.clone());
        session
    }

    /// Applies `mutate` to a copy of the document if `if_revision` is current.
    /// The stored session changes only when `mutate` succeeds.
    pub fn update<E>(
        &self,
        id: &str,
        if_revision: u64,
        mutate: impl FnOnce(&mut ModelDocument) -> Result<(), E>,
    ) -> Result<ModelSession, UpdateError<E>> {
        let mut map = self.sessions.write();
        let session = map.get_mut(id).ok_or(UpdateError::NotFound)?;
        if session.revision != if_revision {
            return Err(UpdateError::Conflict { current: session.revision });
        }
        let mut doc = session.document.clone();
        mutate(&mut doc).map_err(UpdateError::Rejected)?;
        session.document = doc;
        session.revision += 1;
        let updated = session.clone();
        self.persist(&updated);
        Ok(updated)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn persist(&self, session: &ModelSession) {
        let Some(dir) = &self.data_dir else { return };
        let path = dir.join(format!("{}{MODEL_EXTENSION}", session.model_id));
        if let Err(e) = std::fs::write(&path, save_model(&session.document)) {
            tracing::error!("write-through to {} failed: {e}", path.display());
        }
    }
}
