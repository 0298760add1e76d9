//! Append-only event journal with compacted snapshots, stored as NDJSON.
//!
//! Layout under the data directory, for a journal named `name`:
//! `name.journal.ndjson` holds one `{"seq": n, "event": ...}` line per event and
//! `name.snapshot.json` holds `{"seq": n, "state": ...}`, the state after
//! applying every event up to and including `seq`. Replay loads the snapshot and
//! applies the journal lines with a larger seq.
//!
//! Each append is a single `write` of a complete line followed by `fsync`. A
//! crash can therefore only leave a partial final line, which replay drops and
//! truncates away.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Entry<E> {
    seq: u64,
    event: E,
}

#[derive(Serialize, Deserialize)]
struct Snapshot<S> {
    seq: u64,
    state: S,
}

/// What was found on disk when the journal was opened.
#[derive(Debug)]
pub struct Replay<S, E> {
    pub snapshot: Option<S>,
    /// Events newer than the snapshot, in order.
    pub events: Vec<E>,
    /// A partial trailing line was found and removed.
    pub torn_tail: bool,
}

#[derive(Debug)]
pub struct Journal {
    journal_path: PathBuf,
    snapshot_path: PathBuf,
    file: File,
    next_seq: u64,
    since_snapshot: u64,
}

impl Journal {
    pub fn open<S: DeserializeOwned, E: DeserializeOwned>(dir: &Path, name: &str) -> Result<(Journal, Replay<S, E>)> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let journal_path = dir.join(format!("{name}.journal.ndjson"));
        let snapshot_path = dir.join(format!("{name}.snapshot.json"));

        let (mut last_seq, snapshot) = match fs::read_to_string(&snapshot_path) {
            Ok(text) => {
                let snap: Snapshot<S> =
                    serde_json::from_str(&text).map_err(|e| Error::from(e).context(snapshot_path.display().to_string()))?;
                (Some(snap.seq), Some(snap.state))
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => (None, None),
            Err(e) => return Err(Error::io(&snapshot_path, e)),
        };
        let snapshot_seq = last_seq;

        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&journal_path)
            .map_err(|e| Error::io(&journal_path, e))?;

        let mut events = Vec::new();
        let mut good_len = 0u64;
        let mut torn_tail = false;
        {
            let mut reader = BufReader::new(&mut file);
            let mut line = String::new();
            loop {
                line.clear();
                let n = reader.read_line(&mut line).map_err(|e| Error::io(&journal_path, e))?;
                if n == 0 {
                    break;
                }
                let complete = line.ends_with('\n');
                match serde_json::from_str::<Entry<E>>(line.trim_end()) {
                    Ok(entry) if complete => {
                        good_len += n as u64;
                        if snapshot_seq.is_some_and(|s| entry.seq <= s) {
                            continue;
                        }
                        last_seq = Some(entry.seq);
                        events.push(entry.event);
                    }
                    _ => {
                        // Only the final line may be damaged; anything after it
                        // means the file was edited or corrupted.
                        let mut rest = String::new();
                        reader.read_line(&mut rest).map_err(|e| Error::io(&journal_path, e))?;
                        if !rest.is_empty() {
                            return Err(Error::Invalid(format!(
                                "{}: unreadable record at byte {good_len}",
                                journal_path.display()
                            )));
                        }
                        torn_tail = true;
                        break;
                    }
                }
            }
        }
        if torn_tail {
            file.set_len(good_len).map_err(|e| Error::io(&journal_path, e))?;
            file.sync_data().map_err(|e| Error::io(&journal_path, e))?;
        }
        file.seek(SeekFrom::End(0)).map_err(|e| Error::io(&journal_path, e))?;

        let since_snapshot = events.len() as u64;
        let journal = Journal {
            journal_path,
            snapshot_path,
            file,
            next_seq: last_seq.map_or(0, |s| s + 1),
            since_snapshot,
        };
        Ok((journal, Replay { snapshot, events, torn_tail }))
    }

    /// Durably appends one event and returns its sequence number.
    pub fn append<E: Serialize>(&mut self, event: &E) -> Result<u64> {
        let seq = self.next_seq;
        let mut line = serde_json::to_string(&Entry { seq, event })?;
        line.push('\n');
        self.file.write_all(line.as_bytes()).map_err(|e| Error::io(&self.journal_path, e))?;
        self.file.sync_data().map_err(|e| Error::io(&self.journal_path, e))?;
        self.next_seq += 1;
        self.since_snapshot += 1;
        Ok(seq)
    }

    /// Events appended since the last snapshot (or since opening).
    pub fn since_snapshot(&self) -> u64 {
        self.since_snapshot
    }

    /// Writes `state` as the snapshot covering every appended event, then
    /// empties the journal. A crash in between is harmless: replay skips
    /// journal entries the snapshot already covers.
    pub fn compact<S: Serialize>(&mut self, state: &S) -> Result<()> {
        let Some(seq) = self.next_seq.checked_sub(1) else { return Ok(()) };
        let tmp = self.snapshot_path.with_extension("json.tmp");
        {
            let mut f = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
            serde_json::to_writer(&mut f, &Snapshot { seq, state })?;
            f.sync_all().map_err(|e| Error::io(&tmp, e))?;
        }
        fs::rename(&tmp, &self.snapshot_path).map_err(|e| Error::io(&self.snapshot_path, e))?;
        self.file.set_len(0).map_err(|e| Error::io(&self.journal_path, e))?;
        self.file.sync_data().map_err(|e| Error::io(&self.journal_path, e))?;
        self.since_snapshot = 0;
        Ok(())
    }

    pub fn journal_path(&self) -> &Path {
        &self.journal_path
    }
}
