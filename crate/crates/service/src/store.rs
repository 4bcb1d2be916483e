//! On-disk layout: `participants.jsonl` plus one `sessions/<token>.jsonl`
//! log per session. Every write is appended and synced before returning.

use std::fs::{self, File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use codeattn_core::session::log::{LogLine, SessionLog};
use codeattn_core::session::SESSION_FORMAT_VERSION;
use serde::{Deserialize, Serialize};

use crate::ServiceError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParticipantRecord {
    pub format_version: u32,
    pub participant_id: String,
    pub tasks: Vec<String>,
    pub registered_unix_ms: u64,
}

/// An append-only, line-delimited file.
#[derive(Debug)]
pub struct AppendFile {
    file: File,
}

impl AppendFile {
    /// Writes the lines and syncs them to disk.
    pub fn append(&mut self, lines: &[String]) -> Result<(), ServiceError> {
        let mut buf = String::new();
        for l in lines {
            buf.push_str(l);
            buf.push('\n');
        }
        self.file.write_all(buf.as_bytes())?;
        self.file.sync_data()?;
        Ok(())
    }
}

/// Opens `path` for appending after cutting off a torn final line, which
/// can only be a write that was never acknowledged. Returns the kept text.
fn open_repaired(path: &Path) -> Result<(String, AppendFile), ServiceError> {
    let mut file = OpenOptions::new().read(true).write(true).open(path)?;
    let mut text = String::new();
    file.read_to_string(&mut text).map_err(|e| ServiceError::Corrupt {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    if !text.is_empty() && !text.ends_with('\n') {
        let keep = text.rfind('\n').map_or(0, |i| i + 1);
        tracing::warn!(path = %path.display(), dropped = text.len() - keep, "truncating torn log tail");
        text.truncate(keep);
        file.set_len(keep as u64)?;
        file.sync_data()?;
    }
    file.seek(SeekFrom::End(0))?;
    Ok((text, AppendFile { file }))
}

fn sync_dir(dir: &Path) -> Result<(), ServiceError> {
    #[cfg(unix)]
    File::open(dir)?.sync_all()?;
    #[cfg(not(unix))]
    let _ = dir;
    Ok(())
}

#[derive(Debug)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let root = root.into();
        fs::create_dir_all(root.join("sessions"))?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn sessions_dir(&self) -> PathBuf {
        self.root.join("sessions")
    }

    fn participants_path(&self) -> PathBuf {
        self.root.join("participants.jsonl")
    }

    /// The participants log, creating it if missing.
    pub fn participants(&self) -> Result<(Vec<ParticipantRecord>, AppendFile), ServiceError> {
        let path = self.participants_path();
        if !path.exists() {
            File::create(&path)?;
            sync_dir(&self.root)?;
        }
        let (text, file) = open_repaired(&path)?;
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let rec: ParticipantRecord = serde_json::from_str(line).map_err(|e| ServiceError::Corrupt {
                path: format!("{}:{}", path.display(), i + 1),
                reason: e.to_string(),
            })?;
            if rec.format_version != SESSION_FORMAT_VERSION {
                return Err(ServiceError::Corrupt {
                    path: format!("{}:{}", path.display(), i + 1),
                    reason: format!("unsupported format_version {}", rec.format_version),
                });
            }
            out.push(rec);
        }
        Ok((out, file))
    }

    /// Creates a new session log holding `open` as its first line.
    pub fn create_session(&self, token: &str, open: &LogLine) -> Result<AppendFile, ServiceError> {
        let path = self.sessions_dir().join(format!("{token}.jsonl"));
        let file = OpenOptions::new().append(true).create_new(true).open(&path)?;
        let mut f = AppendFile { file };
        f.append(&[open.to_json()])?;
        sync_dir(&self.sessions_dir())?;
        Ok(f)
    }

    /// Every stored session log, in file-name order.
    pub fn sessions(&self) -> Result<Vec<(SessionLog, AppendFile)>, ServiceError> {
        let mut paths: Vec<PathBuf> = fs::read_dir(self.sessions_dir())?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()?;
        paths.retain(|p| p.extension().is_some_and(|e| e == "jsonl"));
        paths.sort();
        let mut out = Vec::with_capacity(paths.len());
        for path in paths {
            let (text, file) = open_repaired(&path)?;
            let log = SessionLog::parse(&text).map_err(|e| ServiceError::Corrupt {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            out.push((log, file));
        }
        Ok(out)
    }
}
