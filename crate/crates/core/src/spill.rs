//! Descending external sort with deduplication for census levels.
//!
//! Records are `(key, tag)` pairs. Keys of one level share a length, and the
//! symbol alphabet is ordered like the symbols, so byte order on keys is the
//! tuple order. Equal keys collapse to the smallest tag.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use crate::error::{MolrError, Result};

/// Environment variable overriding the spill directory.
pub const SPILL_DIR_ENV: &str = "MOLR_SPILL_DIR";

pub struct ExternalSorter {
    limit: usize,
    buffer: Vec<(Vec<u8>, u64)>,
    runs: Vec<PathBuf>,
    dir: Option<tempfile::TempDir>,
}

fn io_err(e: std::io::Error) -> MolrError {
    MolrError::Input(format!("spill: {e}"))
}

fn desc(a: &(Vec<u8>, u64), b: &(Vec<u8>, u64)) -> Ordering {
    b.0.cmp(&a.0).then(a.1.cmp(&b.1))
}

impl ExternalSorter {
    /// Keeps at most `limit` records in memory before writing a sorted run.
    pub fn new(limit: usize) -> Self {
        Self {
            limit: limit.max(1),
            buffer: Vec::new(),
            runs: Vec::new(),
            dir: None,
        }
    }

    pub fn push(&mut self, key: Vec<u8>, tag: u64) -> Result<()> {
        self.buffer.push((key, tag));
        if self.buffer.len() >= self.limit {
            self.flush()?;
        }
        Ok(())
    }

    pub fn spilled_runs(&self) -> usize {
        self.runs.len()
    }

    fn flush(&mut self) -> Result<()> {
        let mut buf = std::mem::take(&mut self.buffer);
        buf.sort_unstable_by(desc);
        buf.dedup_by(|b, a| a.0 == b.0);
        if self.dir.is_none() {
            let base = std::env::var_os(SPILL_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(std::env::temp_dir);
            self.dir = Some(tempfile::Builder::new().prefix("molr-spill").tempdir_in(base).map_err(io_err)?);
        }
        let path = self
            .dir
            .as_ref()
            .unwrap()
            .path()
            .join(format!("run{:05}", self.runs.len()));
        let mut w = BufWriter::new(File::create(&path).map_err(io_err)?);
        for (key, tag) in &buf {
            w.write_all(key).map_err(io_err)?;
            writeln!(w, "\t{tag}").map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;
        self.runs.push(path);
        Ok(())
    }

    /// All records, descending by key, one per distinct key.
    pub fn finish(mut self) -> Result<Vec<(Vec<u8>, u64)>> {
        if self.runs.is_empty() {
            let mut buf = std::mem::take(&mut self.buffer);
            buf.sort_unstable_by(desc);
            buf.dedup_by(|b, a| a.0 == b.0);
            return Ok(buf);
        }
        if !self.buffer.is_empty() {
            self.flush()?;
        }
        let mut readers = Vec::with_capacity(self.runs.len());
        for path in &self.runs {
            readers.push(BufReader::new(File::open(path).map_err(io_err)?).lines());
        }
        let parse = |line: std::io::Result<String>| -> Result<(Vec<u8>, u64)> {
            let line = line.map_err(io_err)?;
            let (key, tag) = line
                .split_once('\t')
                .ok_or_else(|| MolrError::Input("spill: malformed run".into()))?;
            let tag = tag
                .parse()
                .map_err(|_| MolrError::Input("spill: malformed tag".into()))?;
            Ok((key.as_bytes().to_vec(), tag))
        };
        // max-heap on key, min on tag, then run index
        let mut heap = BinaryHeap::new();
        for (i, r) in readers.iter_mut().enumerate() {
            if let Some(line) = r.next() {
                let (key, tag) = parse(line)?;
                heap.push((key, Reverse(tag), Reverse(i)));
            }
        }
        let mut out: Vec<(Vec<u8>, u64)> = Vec::new();
        while let Some((key, Reverse(tag), Reverse(i))) = heap.pop() {
            if out.last().is_none_or(|(k, _)| *k != key) {
                out.push((key, tag));
            }
            if let Some(line) = readers[i].next() {
                let (k2, t2) = parse(line)?;
                heap.push((k2, Reverse(t2), Reverse(i)));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(limit: usize, items: &[(&str, u64)]) -> Vec<(String, u64)> {
        let mut s = ExternalSorter::new(limit);
        for (k, t) in items {
            s.push(k.as_bytes().to_vec(), *t).unwrap();
        }
        s.finish()
            .unwrap()
            .into_iter()
            .map(|(k, t)| (String::from_utf8(k).unwrap(), t))
            .collect()
    }

    #[test]
    fn spilled_and_in_memory_agree() {
        let items: Vec<(String, u64)> = (0..500u64)
            .map(|i| (format!("{:03}", (i * 37) % 211), i))
            .collect();
        let borrowed: Vec<(&str, u64)> = items.iter().map(|(k, t)| (k.as_str(), *t)).collect();
        let mem = run(10_000, &borrowed);
        let disk = run(7, &borrowed);
        assert_eq!(mem, disk);
        assert_eq!(mem.len(), 211);
        assert!(mem.windows(2).all(|w| w[0].0 > w[1].0));
        // smallest tag wins among duplicates
        assert_eq!(mem.iter().find(|(k, _)| k == "000").unwrap().1, 0);
    }
}
