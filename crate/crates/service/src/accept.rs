//! Append-only log of translations accepted by a translator.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One accepted translation, stored as a JSON line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptanceRecord {
    /// Seconds since the Unix epoch (UTC).
    pub timestamp: u64,
    pub source: String,
    pub chosen: String,
    pub offered: Vec<String>,
    pub session_id: Option<String>,
    /// The chosen text is none of the offered outputs.
    pub edited: bool,
}

impl AcceptanceRecord {
    pub fn new(source: String, chosen: String, offered: Vec<String>, session_id: Option<String>) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let edited = !offered.contains(&chosen);
        AcceptanceRecord {
            timestamp,
            source,
            chosen,
            offered,
            session_id,
            edited,
        }
    }
}

#[derive(Debug, Error)]
pub enum AcceptError {
    #[error("chosen translation is empty")]
    EmptyChoice,
    #[error("acceptance log {}: {source}", path.display())]
    Storage {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

struct Inner {
    file: File,
    lines: u64,
}

/// Serializes appends; record ids are 1-based line numbers.
pub struct AcceptanceLog {
    path: PathBuf,
    inner: Mutex<Option<Inner>>,
}

impl AcceptanceLog {
    /// The file is opened lazily on the first append.
    pub fn new(path: impl Into<PathBuf>) -> Self {
        AcceptanceLog {
            path: path.into(),
            inner: Mutex::new(None),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn open(&self) -> io::Result<Inner> {
        let lines = match File::open(&self.path) {
            Ok(f) => BufReader::new(f).lines().count() as u64,
            Err(e) if e.kind() == io::ErrorKind::NotFound => 0,
            Err(e) => return Err(e),
        };
        let file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        Ok(Inner { file, lines })
    }

    pub fn append(&self, record: &AcceptanceRecord) -> Result<u64, AcceptError> {
        if record.chosen.trim().is_empty() {
            return Err(AcceptError::EmptyChoice);
        }
        let storage = |source| AcceptError::Storage {
            path: self.path.clone(),
            source,
        };
        let mut line = serde_json::to_string(record).expect("record serializes");
        line.push('\n');

        let mut guard = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        if guard.is_none() {
            *guard = Some(self.open().map_err(storage)?);
        }
        let inner = guard.as_mut().unwrap();
        // one write per record so a crash loses at most this line
        inner.file.write_all(line.as_bytes()).map_err(storage)?;
        inner.file.flush().map_err(storage)?;
        inner.lines += 1;
        Ok(inner.lines)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(chosen: &str, offered: &[&str]) -> AcceptanceRecord {
        AcceptanceRecord::new(
            "you".into(),
            chosen.into(),
            offered.iter().map(|s| s.to_string()).collect(),
            None,
        )
    }

    #[test]
    fn edited_means_not_offered() {
        assert!(!record("'anci", &["'anci", "'anta"]).edited);
        assert!(record("'anci!", &["'anci", "'anta"]).edited);
        assert!(record("x", &[]).edited);
    }

    #[test]
    fn ids_continue_an_existing_log() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        std::fs::write(&path, "{}\n{}\n").unwrap();
        let log = AcceptanceLog::new(&path);
        assert_eq!(log.append(&record("a", &[])).unwrap(), 3);
        assert_eq!(log.append(&record("b", &[])).unwrap(), 4);
        let text = std::fs::read_to_string(&path).unwrap();
        let last: AcceptanceRecord = serde_json::from_str(text.lines().last().unwrap()).unwrap();
        assert_eq!(last.chosen, "b");
    }

    #[test]
    fn empty_choice_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let log = AcceptanceLog::new(dir.path().join("log.jsonl"));
        assert!(matches!(log.append(&record(" ", &[])), Err(AcceptError::EmptyChoice)));
    }

    #[test]
    fn unwritable_path_is_a_storage_error() {
        let dir = tempfile::tempdir().unwrap();
        let log = AcceptanceLog::new(dir.path().join("missing/log.jsonl"));
        assert!(matches!(
            log.append(&record("a", &[])),
            Err(AcceptError::Storage { .. })
        ));
    }
}
