//! Per-campaign resume files.
//!
//! The first line identifies the campaign and its settings; each further
//! line is `k<TAB>payload<TAB>sha256(k<TAB>payload)`, where the payload is
//! the per-`k` result as JSON. A trailing line without a newline is an
//! interrupted write and is dropped; a complete line with a bad checksum is
//! corruption.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::cache::{sha256_hex, write_atomic};
use crate::error::{Error, Result};

pub struct Checkpoint {
    path: PathBuf,
    done: BTreeMap<u32, String>,
    file: Mutex<File>,
}

impl Checkpoint {
    /// Opens `dir/<name>.ckpt`, keeping earlier records when the header
    /// matches and `fresh` is false.
    pub fn open(dir: &Path, name: &str, settings: &str, fresh: bool) -> Result<Checkpoint> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{name}.ckpt"));
        let header = format!("# kfib-verify checkpoint {name} {settings}");
        let mut done = BTreeMap::new();
        let mut keep = false;
        if !fresh {
            if let Ok(text) = fs::read_to_string(&path) {
                let mut lines = text.split_inclusive('\n');
                if lines.next().map(str::trim_end) == Some(header.as_str()) {
                    keep = true;
                    for line in lines {
                        let Some(line) = line.strip_suffix('\n') else {
                            log::warn!("{}: dropping an interrupted record", path.display());
                            break;
                        };
                        let (k, payload) = parse_line(line).ok_or_else(|| Error::Checksum(path.display().to_string()))?;
                        done.insert(k, payload);
                    }
                } else {
                    log::info!("{}: settings changed, starting over", path.display());
                }
            }
        }
        // rewrite the surviving records so the file ends on a record boundary
        let mut body = format!("{header}\n");
        if keep {
            for (k, p) in &done {
                body.push_str(&line_for(*k, p));
            }
        }
        write_atomic(&path, body.as_bytes())?;
        let file = OpenOptions::new().append(true).open(&path)?;
        Ok(Checkpoint { path, done, file: Mutex::new(file) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get<T: DeserializeOwned>(&self, k: u32) -> Option<T> {
        let p = self.done.get(&k)?;
        serde_json::from_str(p).ok()
    }

    pub fn completed(&self) -> impl Iterator<Item = u32> + '_ {
        self.done.keys().copied()
    }

    pub fn record<T: Serialize>(&self, k: u32, value: &T) -> Result<()> {
        let payload = serde_json::to_string(value)?;
        let line = line_for(k, &payload);
        let mut f = self.file.lock().unwrap();
        f.write_all(line.as_bytes())?;
        f.flush()?;
        Ok(())
    }
}

fn line_for(k: u32, payload: &str) -> String {
    let body = format!("{k}\t{payload}");
    let sum = sha256_hex(body.as_bytes());
    format!("{body}\t{sum}\n")
}

fn parse_line(line: &str) -> Option<(u32, String)> {
    let (body, sum) = line.rsplit_once('\t')?;
    if sha256_hex(body.as_bytes()) != sum {
        return None;
    }
    let (k, payload) = body.split_once('\t')?;
    Some((k.parse().ok()?, payload.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resume_and_fresh() {
        let dir = tempfile::tempdir().unwrap();
        {
            let c = Checkpoint::open(dir.path(), "x", "v1", false).unwrap();
            c.record(3, &vec![1, 2]).unwrap();
            c.record(5, &vec![7]).unwrap();
        }
        let c = Checkpoint::open(dir.path(), "x", "v1", false).unwrap();
        assert_eq!(c.completed().collect::<Vec<_>>(), vec![3, 5]);
        assert_eq!(c.get::<Vec<i32>>(5), Some(vec![7]));
        drop(c);
        let c = Checkpoint::open(dir.path(), "x", "v2", false).unwrap();
        assert_eq!(c.completed().count(), 0);
        c.record(4, &0).unwrap();
        drop(c);
        let c = Checkpoint::open(dir.path(), "x", "v2", true).unwrap();
        assert_eq!(c.completed().count(), 0);
    }

    #[test]
    fn corruption_and_truncation() {
        let dir = tempfile::tempdir().unwrap();
        {
            let c = Checkpoint::open(dir.path(), "y", "s", false).unwrap();
            c.record(3, &"abc").unwrap();
        }
        let p = dir.path().join("y.ckpt");
        // interrupted trailing write is dropped
        let mut text = fs::read_to_string(&p).unwrap();
        text.push_str("4\t\"partial");
        fs::write(&p, &text).unwrap();
        let c = Checkpoint::open(dir.path(), "y", "s", false).unwrap();
        assert_eq!(c.completed().collect::<Vec<_>>(), vec![3]);
        drop(c);
        // a complete record with a bad checksum is an error
        let text = fs::read_to_string(&p).unwrap().replace("abc", "abd");
        fs::write(&p, text).unwrap();
        assert!(matches!(Checkpoint::open(dir.path(), "y", "s", false), Err(Error::Checksum(_))));
    }
}
