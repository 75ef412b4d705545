use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::machine::{parse_machine, MachineDescription};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tags {
    pub mode: String,
    pub discipline: String,
    pub purpose: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    /// Symbol digits; empty for the empty word.
    pub input: String,
    /// accept, reject, loop, limit or violation.
    pub verdict: String,
    /// How the verdict was obtained.
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub file: String,
    pub description: String,
    pub tags: Tags,
    #[serde(default)]
    pub expected: Vec<Expected>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub entries: Vec<CorpusEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Manifest { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: crate::machine::ParseError },
}

pub const MANIFEST: &str = "manifest.json";

/// Reads `manifest.json` in `dir`. A directory without one is an empty
/// corpus.
pub fn load_manifest(dir: &Path) -> Result<Manifest, CorpusError> {
    let path = dir.join(MANIFEST);
    if !path.exists() {
        return Ok(Manifest::default());
    }
    let text = std::fs::read_to_string(&path).map_err(|source| CorpusError::Io { path: path.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| CorpusError::Manifest { path, source })
}

pub fn load_entry(dir: &Path, entry: &CorpusEntry) -> Result<MachineDescription, CorpusError> {
    let path = dir.join(&entry.file);
    let text = std::fs::read_to_string(&path).map_err(|source| CorpusError::Io { path: path.clone(), source })?;
    parse_machine(&text).map_err(|source| CorpusError::Parse { path, source })
}

/// Every machine of the corpus in manifest order.
pub fn load_corpus(dir: &Path) -> Result<Vec<(CorpusEntry, MachineDescription)>, CorpusError> {
    load_manifest(dir)?
        .entries
        .into_iter()
        .map(|e| {
            let desc = load_entry(dir, &e)?;
            Ok((e, desc))
        })
        .collect()
}

/// The corpus shipped with the crate.
pub fn bundled_corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}
