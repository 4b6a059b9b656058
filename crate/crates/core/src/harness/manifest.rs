//! Dataset manifests: a CSV of `shape_id,path,class_label` rows.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub shape_id: String,
    /// Mask image (PBM/PNG) or graph JSON, resolved against the manifest's
    /// directory when relative.
    pub path: PathBuf,
    pub class_label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(name: impl Into<String>, entries: Vec<ManifestEntry>) -> Result<Self, HarnessError> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !seen.insert(e.shape_id.as_str()) {
                return Err(HarnessError::Manifest(format!("duplicate shape id {:?}", e.shape_id)));
            }
        }
        Ok(Self {
            name: name.into(),
            entries,
        })
    }

    /// Reads a manifest CSV with a `shape_id,path,class_label` header.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| HarnessError::Manifest(format!("{}: {e}", path.display())))?;
        let mut entries = Vec::new();
        for row in reader.deserialize::<ManifestEntry>() {
            let mut e = row.map_err(|e| HarnessError::Manifest(format!("{}: {e}", path.display())))?;
            if e.path.is_relative() {
                e.path = base.join(&e.path);
            }
            entries.push(e);
        }
        let name = path
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        Self::new(name, entries)
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        for e in &self.entries {
            w.serialize(e).map_err(|e| HarnessError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| HarnessError::Io(e.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Class labels in order of first appearance.
    pub fn classes(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.class_label) {
                out.push(e.class_label.clone());
            }
        }
        out
    }
}
