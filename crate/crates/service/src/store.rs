use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;
use vsat_core::review::Project;

use crate::error::ApiError;

/// A project plus the directory its preview assets are served from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub project: Project,
    #[serde(default)]
    pub assets: Option<PathBuf>,
}

/// Mutations of one project are serialized through `writer`; readers take
/// the current immutable snapshot.
struct Slot {
    writer: Mutex<()>,
    current: RwLock<Arc<Record>>,
}

impl Slot {
    fn new(record: Record) -> Self {
        Slot {
            writer: Mutex::new(()),
            current: RwLock::new(Arc::new(record)),
        }
    }

    fn snapshot(&self) -> Arc<Record> {
        self.current.read().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

/// Project registry persisted as one JSON file per project.
pub struct Store {
    dir: PathBuf,
    slots: RwLock<BTreeMap<String, Arc<Slot>>>,
}

fn storage(path: &Path, e: impl std::fmt::Display) -> ApiError {
    ApiError::Storage(format!("{}: {e}", path.display()))
}

impl Store {
    /// Opens `dir`, loading every saved project.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ApiError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| storage(&dir, e))?;
        let mut slots = BTreeMap::new();
        for entry in std::fs::read_dir(&dir).map_err(|e| storage(&dir, e))? {
            let path = entry.map_err(|e| storage(&dir, e))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let bytes = std::fs::read(&path).map_err(|e| storage(&path, e))?;
            let record: Record = serde_json::from_slice(&bytes).map_err(|e| storage(&path, e))?;
            slots.insert(record.project.project_id.clone(), Arc::new(Slot::new(record)));
        }
        Ok(Store {
            dir,
            slots: RwLock::new(slots),
        })
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    /// Writes to a temporary file and renames it over the old state.
    fn persist(&self, record: &Record) -> Result<(), ApiError> {
        let path = self.path(&record.project.project_id);
        let tmp = path.with_extension("json.tmp");
        let bytes = serde_json::to_vec_pretty(record).map_err(|e| storage(&path, e))?;
        let mut f = std::fs::File::create(&tmp).map_err(|e| storage(&tmp, e))?;
        f.write_all(&bytes).and_then(|_| f.sync_all()).map_err(|e| storage(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| storage(&path, e))
    }

    fn slot(&self, id: &str) -> Result<Arc<Slot>, ApiError> {
        self.slots
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("project {id}")))
    }

    pub fn get(&self, id: &str) -> Result<Arc<Record>, ApiError> {
        Ok(self.slot(id)?.snapshot())
    }

    pub fn ids(&self) -> Vec<String> {
        self.slots.read().unwrap_or_else(|e| e.into_inner()).keys().cloned().collect()
    }

    /// Registers a project unless one with the same id exists. Returns the
    /// stored record and whether it was created.
    pub fn insert(&self, record: Record) -> Result<(Arc<Record>, bool), ApiError> {
        let id = record.project.project_id.clone();
        let mut slots = self.slots.write().unwrap_or_else(|e| e.into_inner());
        if let Some(slot) = slots.get(&id) {
            return Ok((slot.snapshot(), false));
        }
        self.persist(&record)?;
        let slot = Arc::new(Slot::new(record));
        let snap = slot.snapshot();
        slots.insert(id, slot);
        Ok((snap, true))
    }

    /// Applies `f` to a copy of the project and publishes the result if it
    /// succeeds and was persisted.
    pub async fn update<T>(
        &self,
        id: &str,
        f: impl FnOnce(&mut Record) -> Result<T, ApiError>,
    ) -> Result<(Arc<Record>, T), ApiError> {
        let slot = self.slot(id)?;
        let _guard = slot.writer.lock().await;
        let mut record = (*slot.snapshot()).clone();
        let out = f(&mut record)?;
        self.persist(&record)?;
        let snap = Arc::new(record);
        *slot.current.write().unwrap_or_else(|e| e.into_inner()) = snap.clone();
        Ok((snap, out))
    }

    /// Rewrites every project file.
    pub fn flush(&self) -> Result<(), ApiError> {
        for id in self.ids() {
            self.persist(self.get(&id)?.as_ref())?;
        }
        Ok(())
    }
}
