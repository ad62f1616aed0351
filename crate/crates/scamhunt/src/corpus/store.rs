//! Append-only JSONL corpus store with an in-memory id index.
//!
//! Writes are serialized through the single `&mut` writer; any number of
//! readers may iterate a separate handle concurrently.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use super::{parse_list_record, CorpusError, ListRecord};

pub struct CorpusStore {
    path: PathBuf,
    writer: File,
    ids: HashSet<String>,
}

impl CorpusStore {
    /// Open (or create) a store, indexing the ids already on disk.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, CorpusError> {
        let path = path.into();
        let mut ids = HashSet::new();
        if path.exists() {
            for record in Self::iter_path(&path)? {
                ids.insert(record?.list_id);
            }
        }
        let writer = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(CorpusStore { path, writer, ids })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, list_id: &str) -> bool {
        self.ids.contains(list_id)
    }

    /// Append a record unless its id is already stored.
    /// Returns true when the record was written.
    pub fn append(&mut self, record: &ListRecord) -> Result<bool, CorpusError> {
        if self.ids.contains(&record.list_id) {
            return Ok(false);
        }
        let mut line = serde_json::to_string(record).expect("record serializes");
        line.push('\n');
        self.writer.write_all(line.as_bytes())?;
        self.writer.flush()?;
        self.ids.insert(record.list_id.clone());
        Ok(true)
    }

    /// Iterate the records on disk in append order.
    pub fn iter(&self) -> Result<impl Iterator<Item = Result<ListRecord, CorpusError>>, CorpusError> {
        Self::iter_path(&self.path)
    }

    pub fn iter_path(
        path: &Path,
    ) -> Result<impl Iterator<Item = Result<ListRecord, CorpusError>>, CorpusError> {
        let reader = BufReader::new(File::open(path)?);
        Ok(reader.lines().enumerate().filter_map(|(i, line)| match line {
            Ok(line) if line.trim().is_empty() => None,
            Ok(line) => Some(parse_list_record(&line, i + 1)),
            Err(e) => Some(Err(CorpusError::Io(e))),
        }))
    }

    /// Read a whole corpus file into memory.
    pub fn read_all(path: &Path) -> Result<Vec<ListRecord>, CorpusError> {
        Self::iter_path(path)?.collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn record(id: &str) -> ListRecord {
        ListRecord {
            list_id: id.to_string(),
            title: format!("title {id}"),
            description: String::new(),
            creator_id: "U1".to_string(),
            created_at: chrono::Utc.with_ymd_and_hms(2022, 3, 1, 0, 0, 0).unwrap(),
            member_ids: vec!["a".into()],
            follower_count: 0,
            member_overflow: false,
        }
    }

    #[test]
    fn appends_and_reads_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let mut store = CorpusStore::open(&path).unwrap();
        assert!(store.append(&record("L1")).unwrap());
        assert!(store.append(&record("L2")).unwrap());
        let records = CorpusStore::read_all(&path).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].list_id, "L1");
    }

    #[test]
    fn duplicate_ids_are_stored_once() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let mut store = CorpusStore::open(&path).unwrap();
        assert!(store.append(&record("L1")).unwrap());
        assert!(!store.append(&record("L1")).unwrap());
        assert_eq!(CorpusStore::read_all(&path).unwrap().len(), 1);
    }

    #[test]
    fn reopening_restores_the_id_index() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        {
            let mut store = CorpusStore::open(&path).unwrap();
            store.append(&record("L1")).unwrap();
        }
        let mut store = CorpusStore::open(&path).unwrap();
        assert_eq!(store.len(), 1);
        assert!(!store.append(&record("L1")).unwrap());
    }

    #[test]
    fn bad_lines_surface_with_their_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(&path, "{broken\n").unwrap();
        let err = CorpusStore::read_all(&path).unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 1, .. }));
    }
}
