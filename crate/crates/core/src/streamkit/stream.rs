use std::fs::File;
use std::io::{Read, Seek, SeekFrom, Write};
use std::marker::PhantomData;
use std::sync::Arc;

use tempfile::NamedTempFile;

use super::budget::MemoryBudget;
use super::record::Record;
use crate::error::{Error, Result};

/// Creates an empty spill file in the budget's temp directory. The file is
/// removed when the returned handle is dropped.
pub(crate) fn spill_file(budget: &MemoryBudget) -> Result<NamedTempFile> {
    let file = tempfile::Builder::new()
        .prefix(&format!("plcpz-{}-", std::process::id()))
        .tempfile_in(budget.tmp_dir())
        .map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("cannot create spill file in {}: {e}", budget.tmp_dir().display()),
            ))
        })?;
    budget.counters().add_spill_file();
    Ok(file)
}

fn chunk_bytes<T: Record>(budget: &MemoryBudget) -> usize {
    let per = (budget.block_size() / T::WIDTH).max(1);
    per * T::WIDTH
}

/// Append-only writer. Items stay in core until the stream outgrows its share
/// of the budget, then everything moves to a spill file.
pub struct StreamWriter<T: Record> {
    budget: MemoryBudget,
    mem: Vec<T>,
    limit_items: usize,
    spill: Option<SpillWriter>,
    len: u64,
}

struct SpillWriter {
    file: NamedTempFile,
    buf: Vec<u8>,
    chunk: usize,
}

impl SpillWriter {
    fn flush_buf(&mut self, budget: &MemoryBudget) -> Result<()> {
        if !self.buf.is_empty() {
            self.file.as_file_mut().write_all(&self.buf)?;
            budget
                .counters()
                .add_file_write(self.buf.len() as u64, budget.block_size());
            self.buf.clear();
        }
        Ok(())
    }
}

impl<T: Record> StreamWriter<T> {
    pub fn new(budget: &MemoryBudget) -> Self {
        let limit_items = if budget.is_unbounded() {
            usize::MAX
        } else {
            (budget.stream_buffer_bytes() / T::WIDTH).max(1)
        };
        Self {
            budget: budget.clone(),
            mem: Vec::new(),
            limit_items,
            spill: None,
            len: 0,
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, item: T) -> Result<()> {
        self.len += 1;
        self.budget.counters().add_written(1);
        match &mut self.spill {
            None => {
                self.mem.push(item);
                if self.mem.len() >= self.limit_items {
                    self.move_to_disk()?;
                }
                Ok(())
            }
            Some(sp) => {
                let at = sp.buf.len();
                sp.buf.resize(at + T::WIDTH, 0);
                item.write_to(&mut sp.buf[at..]);
                if sp.buf.len() >= sp.chunk {
                    sp.flush_buf(&self.budget)?;
                }
                Ok(())
            }
        }
    }

    pub fn extend<I: IntoIterator<Item = T>>(&mut self, items: I) -> Result<()> {
        for it in items {
            self.push(it)?;
        }
        Ok(())
    }

    fn move_to_disk(&mut self) -> Result<()> {
        let chunk = chunk_bytes::<T>(&self.budget);
        let mut sp = SpillWriter {
            file: spill_file(&self.budget)?,
            buf: Vec::with_capacity(chunk),
            chunk,
        };
        for item in self.mem.drain(..) {
            let at = sp.buf.len();
            sp.buf.resize(at + T::WIDTH, 0);
            item.write_to(&mut sp.buf[at..]);
            if sp.buf.len() >= sp.chunk {
                sp.flush_buf(&self.budget)?;
            }
        }
        self.mem = Vec::new();
        self.spill = Some(sp);
        Ok(())
    }

    pub fn finish(mut self) -> Result<TupleStream<T>> {
        let storage = match self.spill {
            None => {
                self.mem.shrink_to_fit();
                Storage::Core(Arc::new(self.mem))
            }
            Some(mut sp) => {
                sp.flush_buf(&self.budget)?;
                sp.file.as_file_mut().flush()?;
                Storage::Disk(Arc::new(sp.file))
            }
        };
        Ok(TupleStream {
            budget: self.budget,
            storage,
            len: self.len,
            _marker: PhantomData,
        })
    }
}

enum Storage<T> {
    Core(Arc<Vec<T>>),
    Disk(Arc<NamedTempFile>),
}

impl<T> Clone for Storage<T> {
    fn clone(&self) -> Self {
        match self {
            Storage::Core(v) => Storage::Core(Arc::clone(v)),
            Storage::Disk(f) => Storage::Disk(Arc::clone(f)),
        }
    }
}

/// A finished stream. It can be read any number of times; clones share the
/// underlying storage.
pub struct TupleStream<T: Record> {
    budget: MemoryBudget,
    storage: Storage<T>,
    len: u64,
    _marker: PhantomData<T>,
}

impl<T: Record> Clone for TupleStream<T> {
    fn clone(&self) -> Self {
        Self {
            budget: self.budget.clone(),
            storage: self.storage.clone(),
            len: self.len,
            _marker: PhantomData,
        }
    }
}

impl<T: Record> std::fmt::Debug for TupleStream<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TupleStream")
            .field("len", &self.len)
            .field("on_disk", &self.is_on_disk())
            .finish()
    }
}

impl<T: Record> TupleStream<T> {
    pub fn empty(budget: &MemoryBudget) -> Self {
        Self {
            budget: budget.clone(),
            storage: Storage::Core(Arc::new(Vec::new())),
            len: 0,
            _marker: PhantomData,
        }
    }

    pub fn from_items<I: IntoIterator<Item = T>>(budget: &MemoryBudget, items: I) -> Result<Self> {
        let mut w = StreamWriter::new(budget);
        w.extend(items)?;
        w.finish()
    }

    /// Wraps items that are already in core when they fit the budget's
    /// stream share, saving a copy; otherwise goes through a writer.
    pub(crate) fn from_vec(budget: &MemoryBudget, items: Vec<T>) -> Result<Self> {
        if budget.is_unbounded() || items.len() < (budget.stream_buffer_bytes() / T::WIDTH).max(1) {
            budget.counters().add_written(items.len() as u64);
            Ok(Self {
                budget: budget.clone(),
                len: items.len() as u64,
                storage: Storage::Core(Arc::new(items)),
                _marker: PhantomData,
            })
        } else {
            Self::from_items(budget, items)
        }
    }

    /// Takes the items out of an in-core stream nobody else shares.
    pub(crate) fn into_core_vec(self) -> std::result::Result<Vec<T>, Self> {
        let Self { budget, storage, len, .. } = self;
        let storage = match storage {
            Storage::Core(v) => match Arc::try_unwrap(v) {
                Ok(v) => return Ok(v),
                Err(v) => Storage::Core(v),
            },
            disk => disk,
        };
        Err(Self {
            budget,
            storage,
            len,
            _marker: PhantomData,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_on_disk(&self) -> bool {
        matches!(self.storage, Storage::Disk(_))
    }

    pub fn budget(&self) -> &MemoryBudget {
        &self.budget
    }

    pub fn iter(&self) -> Result<StreamReader<T>> {
        self.iter_from(0)
    }

    /// Reader positioned at item `offset` (0-based).
    pub fn iter_from(&self, offset: u64) -> Result<StreamReader<T>> {
        let offset = offset.min(self.len);
        let source = match &self.storage {
            Storage::Core(v) => Source::Core {
                items: Arc::clone(v),
                pos: offset as usize,
            },
            Storage::Disk(f) => {
                let mut file = f.reopen()?;
                file.seek(SeekFrom::Start(offset * T::WIDTH as u64))?;
                let chunk = chunk_bytes::<T>(&self.budget);
                Source::Disk {
                    file,
                    buf: vec![0u8; chunk],
                    filled: 0,
                    pos: 0,
                    remaining: (self.len - offset) * T::WIDTH as u64,
                }
            }
        };
        Ok(StreamReader {
            budget: self.budget.clone(),
            source,
            _marker: PhantomData,
        })
    }

    pub fn cursor(&self) -> Result<StreamCursor<T>> {
        StreamCursor::new(self.iter()?)
    }

    /// Reads the whole stream into memory. Meant for tests and small outputs.
    pub fn to_vec(&self) -> Result<Vec<T>> {
        self.iter()?.collect()
    }
}

enum Source<T> {
    Core {
        items: Arc<Vec<T>>,
        pos: usize,
    },
    Disk {
        file: File,
        buf: Vec<u8>,
        filled: usize,
        pos: usize,
        remaining: u64,
    },
}

/// Sequential reader over a [`TupleStream`].
pub struct StreamReader<T: Record> {
    budget: MemoryBudget,
    source: Source<T>,
    _marker: PhantomData<T>,
}

impl<T: Record> StreamReader<T> {
    pub fn next_item(&mut self) -> Result<Option<T>> {
        match &mut self.source {
            Source::Core { items, pos } => {
                if *pos < items.len() {
                    let v = items[*pos];
                    *pos += 1;
                    self.budget.counters().add_read(1);
                    Ok(Some(v))
                } else {
                    Ok(None)
                }
            }
            Source::Disk {
                file,
                buf,
                filled,
                pos,
                remaining,
            } => {
                if *pos == *filled {
                    if *remaining == 0 {
                        return Ok(None);
                    }
                    let want = (buf.len() as u64).min(*remaining) as usize;
                    file.read_exact(&mut buf[..want]).map_err(|e| {
                        Error::Io(std::io::Error::new(e.kind(), format!("spill file read: {e}")))
                    })?;
                    self.budget
                        .counters()
                        .add_file_read(want as u64, self.budget.block_size());
                    *remaining -= want as u64;
                    *filled = want;
                    *pos = 0;
                }
                let v = T::read_from(&buf[*pos..*pos + T::WIDTH]);
                *pos += T::WIDTH;
                self.budget.counters().add_read(1);
                Ok(Some(v))
            }
        }
    }
}

impl<T: Record> Iterator for StreamReader<T> {
    type Item = Result<T>;

    fn next(&mut self) -> Option<Result<T>> {
        self.next_item().transpose()
    }
}

/// A reader with one item of lookahead.
pub struct StreamCursor<T: Record> {
    reader: StreamReader<T>,
    head: Option<T>,
}

impl<T: Record> StreamCursor<T> {
    pub fn new(mut reader: StreamReader<T>) -> Result<Self> {
        let head = reader.next_item()?;
        Ok(Self { reader, head })
    }

    pub fn peek(&self) -> Option<&T> {
        self.head.as_ref()
    }

    /// Returns the current head and moves to the next item.
    pub fn advance(&mut self) -> Result<Option<T>> {
        let cur = self.head.take();
        if cur.is_some() {
            self.head = self.reader.next_item()?;
        }
        Ok(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_budget(dir: &std::path::Path) -> MemoryBudget {
        MemoryBudget::new(16 * 4096, dir, 4096).unwrap()
    }

    #[test]
    fn stays_in_core_when_small() {
        let b = MemoryBudget::unbounded();
        let s = TupleStream::from_items(&b, 0u64..100).unwrap();
        assert!(!s.is_on_disk());
        assert_eq!(s.to_vec().unwrap(), (0..100).collect::<Vec<_>>());
        assert_eq!(b.io_stats().spill_files, 0);
    }

    #[test]
    fn spills_and_rereads() {
        let dir = tempfile::tempdir().unwrap();
        let b = small_budget(dir.path());
        let s = TupleStream::from_items(&b, (0u64..50_000).map(|i| (i, i as u8))).unwrap();
        assert!(s.is_on_disk());
        assert_eq!(s.len(), 50_000);
        for _ in 0..2 {
            let v = s.to_vec().unwrap();
            assert_eq!(v.len(), 50_000);
            assert!(v.iter().enumerate().all(|(i, &(a, c))| a == i as u64 && c == i as u8));
        }
        let tail: Vec<_> = s.iter_from(49_998).unwrap().map(|r| r.unwrap().0).collect();
        assert_eq!(tail, vec![49_998, 49_999]);
        let st = b.io_stats();
        assert_eq!(st.spill_files, 1);
        assert!(st.blocks_written >= (50_000 * 9) / 4096);
        assert!(st.blocks_read > 0);
    }

    #[test]
    fn spill_file_removed_on_drop() {
        let dir = tempfile::tempdir().unwrap();
        let b = small_budget(dir.path());
        let s = TupleStream::from_items(&b, 0u64..20_000).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        drop(s);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn cursor_peeks() {
        let b = MemoryBudget::unbounded();
        let s = TupleStream::from_items(&b, [3u32, 5]).unwrap();
        let mut c = s.cursor().unwrap();
        assert_eq!(c.peek(), Some(&3));
        assert_eq!(c.advance().unwrap(), Some(3));
        assert_eq!(c.advance().unwrap(), Some(5));
        assert_eq!(c.peek(), None);
        assert_eq!(c.advance().unwrap(), None);
    }
}
