//! Loading sessions and model dumps from directories.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::ModelAttentionDump;
use crate::session::log::{LogError, SessionLog};
use crate::session::SessionRecord;
use crate::Scalar;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Log { path: PathBuf, source: LogError },
}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Files of a directory with the given extensions, sorted by name.
/// A plain file path is returned as is.
pub fn list_files(path: &Path, extensions: &[&str]) -> Result<Vec<PathBuf>, LoadError> {
    if path.is_file() {
        return Ok(vec![path.to_owned()]);
    }
    let io_err = |source| LoadError::Io {
        path: path.to_owned(),
        source,
    };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(path).map_err(io_err)? {
        let p = entry.map_err(io_err)?.path();
        let ext = p.extension().and_then(|e| e.to_str()).unwrap_or_default();
        if p.is_file() && extensions.contains(&ext) {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

/// Loads one session file: a `.json` record, or a `.jsonl` service log.
/// Returns `None` for a log whose session is still open.
pub fn load_session_file(path: &Path) -> Result<Option<SessionRecord>, LoadError> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "jsonl") {
        let log = SessionLog::parse(&text).map_err(|source| LoadError::Log {
            path: path.to_owned(),
            source,
        })?;
        Ok(log.submission)
    } else {
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|source| LoadError::Json {
                path: path.to_owned(),
                source,
            })
    }
}

/// Loads every submitted session under `path`; open logs are skipped.
pub fn load_sessions(path: &Path) -> Result<Vec<SessionRecord>, LoadError> {
    let mut out = Vec::new();
    for file in list_files(path, &["json", "jsonl"])? {
        out.extend(load_session_file(&file)?);
    }
    Ok(out)
}

/// Loads every dump under `path`, keeping per (model, snippet) only the
/// most likely prediction. Output is ordered by model id, then snippet id.
pub fn load_dumps<F: Scalar>(path: &Path) -> Result<Vec<ModelAttentionDump<F>>, LoadError> {
    let mut best: BTreeMap<(String, String), ModelAttentionDump<F>> = BTreeMap::new();
    for file in list_files(path, &["json"])? {
        let dump: ModelAttentionDump<F> =
            serde_json::from_str(&read(&file)?).map_err(|source| LoadError::Json {
                path: file.clone(),
                source,
            })?;
        let key = (dump.model_id.clone(), dump.snippet_id.clone());
        match best.get(&key) {
            Some(prev) if prev.prediction_rank <= dump.prediction_rank => {}
            _ => {
                best.insert(key, dump);
            }
        }
    }
    Ok(best.into_values().collect())
}
