//! In-process session store. Registered logs and bundles are immutable;
//! rendered report bodies are cached by request key and published only once
//! fully computed.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use serde::Serialize;
use splitaudit_core::ingest::{parse_log_with, write_csv_file, ORDINAL_COLUMN};
use splitaudit_core::preprocess::PreprocessSpec;
use splitaudit_core::report::ThresholdConfig;
use splitaudit_core::split::{load_bundle_dir, write_bundle_dir, SplitBundle, DEFAULT_PREFIX};
use splitaudit_core::{ColumnMapping, InteractionLog, ParseOptions, SubsetRole};

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Request bodies above this many bytes are answered with 413.
    pub max_body_bytes: usize,
    /// Bundles created through the API are written here and reloaded on start.
    pub data_dir: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            max_body_bytes: 64 * 1024 * 1024,
            data_dir: None,
        }
    }
}

pub struct Dataset {
    pub name: String,
    pub raw: InteractionLog,
    pub preprocessing: PreprocessSpec,
    /// Present when preprocessing changed anything.
    pub preprocessed: Option<InteractionLog>,
    pub skipped_rows: usize,
}

impl Dataset {
    /// The log splits are cut from.
    pub fn working(&self) -> &InteractionLog {
        self.preprocessed.as_ref().unwrap_or(&self.raw)
    }

    pub fn log(&self, role: SubsetRole) -> Option<&InteractionLog> {
        match role {
            SubsetRole::Raw => Some(&self.raw),
            SubsetRole::Preprocessed => self.preprocessed.as_ref(),
            _ => None,
        }
    }
}

pub struct Bundle {
    pub name: String,
    pub bundle: SplitBundle,
    /// The log the bundle was cut from, if known.
    pub dataset: Option<InteractionLog>,
}

impl Bundle {
    pub fn log(&self, role: SubsetRole) -> Option<&InteractionLog> {
        self.bundle
            .subset(role)
            .or_else(|| self.dataset.as_ref().filter(|d| d.role() == role))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BundleSummary {
    pub id: String,
    pub name: String,
    pub label: String,
}

#[derive(Default)]
struct Inner {
    datasets: RwLock<HashMap<String, Arc<Dataset>>>,
    bundles: RwLock<HashMap<String, Arc<Bundle>>>,
    thresholds: RwLock<HashMap<String, Arc<ThresholdConfig>>>,
    cache: Mutex<HashMap<String, Arc<Vec<u8>>>>,
    next_id: AtomicU64,
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
    pub config: Arc<ServerConfig>,
}

const REFERENCE_FILE: &str = "reference.csv";
const NAME_FILE: &str = "name.txt";

impl AppState {
    pub fn new(config: ServerConfig) -> Self {
        AppState {
            inner: Arc::new(Inner {
                next_id: AtomicU64::new(1),
                ..Default::default()
            }),
            config: Arc::new(config),
        }
    }

    fn fresh_id(&self, prefix: char) -> String {
        format!("{prefix}{}", self.inner.next_id.fetch_add(1, Ordering::Relaxed))
    }

    pub fn add_dataset(&self, dataset: Dataset) -> String {
        let id = self.fresh_id('d');
        self.inner
            .datasets
            .write()
            .unwrap()
            .insert(id.clone(), Arc::new(dataset));
        id
    }

    pub fn dataset(&self, id: &str) -> Option<Arc<Dataset>> {
        self.inner.datasets.read().unwrap().get(id).cloned()
    }

    pub fn add_bundle(&self, bundle: Bundle) -> std::io::Result<String> {
        let id = self.fresh_id('b');
        if let Some(root) = &self.config.data_dir {
            persist_bundle(&root.join("bundles").join(&id), &bundle)?;
        }
        self.inner.bundles.write().unwrap().insert(id.clone(), Arc::new(bundle));
        Ok(id)
    }

    pub fn bundle(&self, id: &str) -> Option<Arc<Bundle>> {
        self.inner.bundles.read().unwrap().get(id).cloned()
    }

    pub fn bundles(&self) -> Vec<BundleSummary> {
        let map = self.inner.bundles.read().unwrap();
        let mut out: Vec<BundleSummary> = map
            .iter()
            .map(|(id, b)| BundleSummary {
                id: id.clone(),
                name: b.name.clone(),
                label: b.bundle.label(),
            })
            .collect();
        out.sort_by_key(|b| natural_key(&b.id));
        out
    }

    pub fn add_thresholds(&self, config: ThresholdConfig) -> String {
        let id = self.fresh_id('t');
        self.inner
            .thresholds
            .write()
            .unwrap()
            .insert(id.clone(), Arc::new(config));
        id
    }

    pub fn thresholds(&self, id: &str) -> Option<Arc<ThresholdConfig>> {
        self.inner.thresholds.read().unwrap().get(id).cloned()
    }

    pub fn cached(&self, key: &str) -> Option<Arc<Vec<u8>>> {
        self.inner.cache.lock().unwrap().get(key).cloned()
    }

    /// Store a computed body unless another request got there first;
    /// either way return the published body.
    pub fn publish(&self, key: String, body: Vec<u8>) -> Arc<Vec<u8>> {
        self.inner
            .cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| Arc::new(body))
            .clone()
    }

    /// Reload bundles persisted under the data directory.
    pub fn restore(&self) -> splitaudit_core::Result<usize> {
        let Some(root) = &self.config.data_dir else {
            return Ok(0);
        };
        let dir = root.join("bundles");
        let Ok(entries) = std::fs::read_dir(&dir) else {
            return Ok(0);
        };
        let mut ids: Vec<String> = entries
            .filter_map(|e| e.ok())
            .filter(|e| e.path().is_dir())
            .filter_map(|e| e.file_name().to_str().map(str::to_owned))
            .collect();
        ids.sort_by_key(|id| natural_key(id));
        let mut max_seen = 0;
        for id in &ids {
            let path = dir.join(id);
            let bundle = load_bundle_dir(&path, Some(DEFAULT_PREFIX), &ColumnMapping::canonical())?;
            let reference = path.join(REFERENCE_FILE);
            let dataset = if reference.exists() {
                let options = ParseOptions {
                    skip_malformed: false,
                    ordinal_column: Some(ORDINAL_COLUMN.to_owned()),
                };
                Some(
                    parse_log_with(
                        &reference,
                        &ColumnMapping::canonical(),
                        SubsetRole::Preprocessed,
                        &options,
                    )?
                    .log,
                )
            } else {
                None
            };
            let name = std::fs::read_to_string(path.join(NAME_FILE)).unwrap_or_else(|_| id.clone());
            max_seen = max_seen.max(natural_key(id).1);
            self.inner.bundles.write().unwrap().insert(
                id.clone(),
                Arc::new(Bundle {
                    name: name.trim().to_owned(),
                    bundle,
                    dataset,
                }),
            );
        }
        self.inner.next_id.fetch_max(max_seen + 1, Ordering::Relaxed);
        Ok(ids.len())
    }
}

fn natural_key(id: &str) -> (String, u64) {
    let digits = id.trim_start_matches(|c: char| !c.is_ascii_digit());
    let prefix = &id[..id.len() - digits.len()];
    (prefix.to_owned(), digits.parse().unwrap_or(0))
}

fn persist_bundle(dir: &Path, b: &Bundle) -> std::io::Result<()> {
    let to_io = |e: splitaudit_core::Error| std::io::Error::other(e.to_string());
    write_bundle_dir(&b.bundle, dir, DEFAULT_PREFIX).map_err(to_io)?;
    if let Some(d) = &b.dataset {
        write_csv_file(d, &dir.join(REFERENCE_FILE)).map_err(to_io)?;
    }
    std::fs::write(dir.join(NAME_FILE), format!("{}\n", b.name))
}
