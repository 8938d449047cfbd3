//! Class tables and character tables, memoized in process and optionally
//! persisted as JSON files.
//!
//! An entry's key is the SHA-256 of the canonical group spec, the artifact
//! kind and the engine version. Files are written to a temporary name and
//! renamed into place. Loaded payloads are re-validated; anything that fails
//! to parse or validate is discarded with a warning and recomputed.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chartab::{CharTable, CharTableData};
use crate::classes::{ClassTable, ClassTableData};
use crate::error::Result;
use crate::zoo::{GroupMeta, GroupSpec};
use crate::ENGINE_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArtifactKind {
    Classes,
    Chartab,
}

impl ArtifactKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArtifactKind::Classes => "classes",
            ArtifactKind::Chartab => "chartab",
        }
    }
}

/// Hex SHA-256 of (canonical spec, kind, engine version).
pub fn cache_key(spec: &GroupSpec, kind: ArtifactKind) -> String {
    let mut h = Sha256::new();
    h.update(spec.canonical_json().as_bytes());
    h.update(b"\n");
    h.update(kind.as_str().as_bytes());
    h.update(b"\n");
    h.update(ENGINE_VERSION.as_bytes());
    hex::encode(h.finalize())
}

/// What happened when an artifact was requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheEvent {
    /// Served from the in-process memo.
    Memory,
    /// Loaded from disk and re-validated.
    Loaded,
    /// Computed because no file existed (or no cache directory is set).
    Computed,
    /// A file existed but was unusable; it was replaced.
    Recomputed,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry<T> {
    engine_version: String,
    kind: ArtifactKind,
    spec: String,
    payload: T,
}

/// Source of class and character tables for the checks.
#[derive(Default)]
pub struct Store {
    dir: Option<PathBuf>,
    classes: Mutex<HashMap<String, Arc<ClassTable>>>,
    chartabs: Mutex<HashMap<String, Arc<CharTable>>>,
    events: Mutex<Vec<(String, CacheEvent)>>,
}

impl Store {
    /// In-process memo only.
    pub fn memory() -> Store {
        Store::default()
    }

    /// Memo backed by JSON files in `dir` (created if missing).
    pub fn at(dir: impl Into<PathBuf>) -> Result<Store> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Store {
            dir: Some(dir),
            ..Store::default()
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Every request served so far, in order.
    pub fn events(&self) -> Vec<(String, CacheEvent)> {
        self.events.lock().unwrap().clone()
    }

    fn record(&self, key: &str, e: CacheEvent) {
        self.events.lock().unwrap().push((key.to_string(), e));
    }

    pub fn path_for(&self, spec: &GroupSpec, kind: ArtifactKind) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{}.json", cache_key(spec, kind))))
    }

    pub fn classes(&self, meta: &GroupMeta) -> Result<Arc<ClassTable>> {
        let key = cache_key(&meta.spec, ArtifactKind::Classes);
        if let Some(t) = self.classes.lock().unwrap().get(&key) {
            self.record(&key, CacheEvent::Memory);
            return Ok(t.clone());
        }
        let (table, event) = self.load_or_compute(
            meta,
            ArtifactKind::Classes,
            |data: ClassTableData| ClassTable::from_data(meta.group.clone(), data),
            || ClassTable::new(meta.group.clone()),
            ClassTable::to_data,
        )?;
        let table = Arc::new(table);
        self.record(&key, event);
        self.classes.lock().unwrap().insert(key, table.clone());
        Ok(table)
    }

    pub fn chartab(&self, meta: &GroupMeta) -> Result<Arc<CharTable>> {
        let key = cache_key(&meta.spec, ArtifactKind::Chartab);
        if let Some(t) = self.chartabs.lock().unwrap().get(&key) {
            self.record(&key, CacheEvent::Memory);
            return Ok(t.clone());
        }
        let classes = self.classes(meta)?;
        let (table, event) = self.load_or_compute(
            meta,
            ArtifactKind::Chartab,
            |data: CharTableData| CharTable::from_data(classes.clone(), data),
            || CharTable::new(classes.clone()),
            CharTable::to_data,
        )?;
        let table = Arc::new(table);
        self.record(&key, event);
        self.chartabs.lock().unwrap().insert(key, table.clone());
        Ok(table)
    }

    fn load_or_compute<T, D>(
        &self,
        meta: &GroupMeta,
        kind: ArtifactKind,
        load: impl FnOnce(D) -> Result<T>,
        compute: impl FnOnce() -> Result<T>,
        save: impl FnOnce(&T) -> D,
    ) -> Result<(T, CacheEvent)>
    where
        D: Serialize + for<'de> Deserialize<'de>,
    {
        let Some(path) = self.path_for(&meta.spec, kind) else {
            return Ok((compute()?, CacheEvent::Computed));
        };
        let spec = meta.spec.canonical_json();
        let mut event = CacheEvent::Computed;
        if path.exists() {
            match read_entry::<D>(&path, kind, &spec).and_then(load) {
                Ok(t) => return Ok((t, CacheEvent::Loaded)),
                Err(e) => {
                    log::warn!("discarding cache entry {}: {e}", path.display());
                    event = CacheEvent::Recomputed;
                }
            }
        }
        let value = compute()?;
        let entry = CacheEntry {
            engine_version: ENGINE_VERSION.to_string(),
            kind,
            spec,
            payload: save(&value),
        };
        write_atomic(&path, &serde_json::to_vec(&entry)?)?;
        Ok((value, event))
    }
}

fn read_entry<D: for<'de> Deserialize<'de>>(path: &Path, kind: ArtifactKind, spec: &str) -> Result<D> {
    let bytes = fs::read(path)?;
    let entry: CacheEntry<D> = serde_json::from_slice(&bytes)?;
    if entry.engine_version != ENGINE_VERSION || entry.kind != kind || entry.spec != spec {
        return Err(crate::Error::Internal("cache entry header does not match".into()));
    }
    Ok(entry.payload)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::make_group;

    fn a5() -> GroupMeta {
        make_group(&GroupSpec::parse(r#"{"family":"Alt","n":5}"#).unwrap()).unwrap()
    }

    #[test]
    fn key_is_stable_under_formatting() {
        let a = GroupSpec::parse(r#"{"family":"PSL","d":2,"q":7}"#).unwrap();
        let b = GroupSpec::parse("{ \"q\" : 7,\n \"d\": 2, \"family\": \"PSL\" }").unwrap();
        assert_eq!(cache_key(&a, ArtifactKind::Classes), cache_key(&b, ArtifactKind::Classes));
        assert_ne!(cache_key(&a, ArtifactKind::Classes), cache_key(&a, ArtifactKind::Chartab));
    }

    #[test]
    fn roundtrip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let meta = a5();
        let cold = {
            let s = Store::at(dir.path()).unwrap();
            let t = s.chartab(&meta).unwrap();
            assert!(s.events().iter().all(|e| e.1 == CacheEvent::Computed));
            t.to_data()
        };
        let s = Store::at(dir.path()).unwrap();
        assert_eq!(s.chartab(&meta).unwrap().to_data(), cold);
        assert!(s.events().iter().all(|e| e.1 == CacheEvent::Loaded));

        let path = s.path_for(&meta.spec, ArtifactKind::Classes).unwrap();
        let text = fs::read(&path).unwrap();
        fs::write(&path, &text[..text.len() / 2]).unwrap();
        let s = Store::at(dir.path()).unwrap();
        assert_eq!(s.classes(&meta).unwrap().to_data().reps.len(), 5);
        assert_eq!(s.events()[0].1, CacheEvent::Recomputed);
        // the rewritten file loads cleanly
        let s = Store::at(dir.path()).unwrap();
        s.classes(&meta).unwrap();
        assert_eq!(s.events()[0].1, CacheEvent::Loaded);
    }
}
