use std::env;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest transfer unit accepted by [`MemoryBudget::new`].
pub const MIN_BLOCK_SIZE: usize = 4096;
/// Default transfer unit.
pub const DEFAULT_BLOCK_SIZE: usize = 64 * 1024;
/// Environment variable consulted for the spill directory.
pub const TMP_DIR_ENV: &str = "PLCPZ_TMP";

/// How much core memory streams may use before spilling, where spill files
/// go, and the block size used for I/O accounting.
///
/// Cloning a budget shares its I/O counters, so all streams created from one
/// budget (or its clones) report into the same [`IoStats`].
#[derive(Debug, Clone)]
pub struct MemoryBudget {
    bytes_in_core: usize,
    tmp_dir: PathBuf,
    block_size: usize,
    counters: Arc<IoCounters>,
}

impl MemoryBudget {
    pub fn new(bytes_in_core: usize, tmp_dir: impl Into<PathBuf>, block_size: usize) -> Result<Self> {
        if block_size < MIN_BLOCK_SIZE {
            return Err(Error::Config(format!(
                "block size {block_size} is below the minimum of {MIN_BLOCK_SIZE} bytes"
            )));
        }
        if bytes_in_core / 4 < block_size {
            return Err(Error::Config(format!(
                "memory budget {bytes_in_core} must hold at least four blocks of {block_size} bytes"
            )));
        }
        Ok(Self {
            bytes_in_core,
            tmp_dir: tmp_dir.into(),
            block_size,
            counters: Arc::default(),
        })
    }

    /// A budget that never spills. Spill files would go to the default
    /// temporary directory.
    pub fn unbounded() -> Self {
        Self {
            bytes_in_core: usize::MAX,
            tmp_dir: default_tmp_dir(),
            block_size: DEFAULT_BLOCK_SIZE,
            counters: Arc::default(),
        }
    }

    /// `bytes_in_core` with the default block size and the spill directory
    /// taken from `PLCPZ_TMP` (falling back to the system temp dir).
    pub fn with_bytes(bytes_in_core: usize) -> Result<Self> {
        Self::new(bytes_in_core, default_tmp_dir(), DEFAULT_BLOCK_SIZE)
    }

    pub fn bytes_in_core(&self) -> usize {
        self.bytes_in_core
    }

    pub fn tmp_dir(&self) -> &Path {
        &self.tmp_dir
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn is_unbounded(&self) -> bool {
        self.bytes_in_core == usize::MAX
    }

    /// Bytes a single stream may buffer before it moves to a spill file.
    /// Several streams are alive during one pass, so each gets an eighth.
    pub fn stream_buffer_bytes(&self) -> usize {
        (self.bytes_in_core / 8).max(self.block_size)
    }

    /// Bytes of items sorted in core per run.
    pub fn sort_run_bytes(&self) -> usize {
        (self.bytes_in_core / 2).max(self.block_size)
    }

    /// Number of runs merged at once: one read buffer per input plus one for
    /// the output must fit into half the budget.
    pub fn merge_fan_in(&self) -> usize {
        let blocks = (self.bytes_in_core / 2) / self.block_size;
        blocks.saturating_sub(1).clamp(2, 1024)
    }

    pub fn io_stats(&self) -> IoStats {
        self.counters.snapshot()
    }

    pub(crate) fn counters(&self) -> &IoCounters {
        &self.counters
    }
}

pub fn default_tmp_dir() -> PathBuf {
    env::var_os(TMP_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(env::temp_dir)
}

#[derive(Debug, Default)]
pub(crate) struct IoCounters {
    items_written: AtomicU64,
    items_read: AtomicU64,
    blocks_written: AtomicU64,
    blocks_read: AtomicU64,
    spill_files: AtomicU64,
    spilled_bytes: AtomicU64,
}

impl IoCounters {
    pub(crate) fn add_written(&self, items: u64) {
        self.items_written.fetch_add(items, Ordering::Relaxed);
    }

    pub(crate) fn add_read(&self, items: u64) {
        self.items_read.fetch_add(items, Ordering::Relaxed);
    }

    pub(crate) fn add_spill_file(&self) {
        self.spill_files.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn add_file_write(&self, bytes: u64, block_size: usize) {
        self.spilled_bytes.fetch_add(bytes, Ordering::Relaxed);
        self.blocks_written
            .fetch_add(bytes.div_ceil(block_size as u64), Ordering::Relaxed);
    }

    pub(crate) fn add_file_read(&self, bytes: u64, block_size: usize) {
        self.blocks_read
            .fetch_add(bytes.div_ceil(block_size as u64), Ordering::Relaxed);
    }

    fn snapshot(&self) -> IoStats {
        IoStats {
            items_written: self.items_written.load(Ordering::Relaxed),
            items_read: self.items_read.load(Ordering::Relaxed),
            blocks_written: self.blocks_written.load(Ordering::Relaxed),
            blocks_read: self.blocks_read.load(Ordering::Relaxed),
            spill_files: self.spill_files.load(Ordering::Relaxed),
            spilled_bytes: self.spilled_bytes.load(Ordering::Relaxed),
        }
    }
}

/// Logical transfer counters. Blocks count whole `block_size` units moved to
/// or from spill files; in-core streams only move items.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IoStats {
    pub items_written: u64,
    pub items_read: u64,
    pub blocks_written: u64,
    pub blocks_read: u64,
    pub spill_files: u64,
    pub spilled_bytes: u64,
}

impl IoStats {
    pub fn blocks(&self) -> u64 {
        self.blocks_written + self.blocks_read
    }

    /// Counters accumulated since `earlier`.
    pub fn since(&self, earlier: &IoStats) -> IoStats {
        IoStats {
            items_written: self.items_written - earlier.items_written,
            items_read: self.items_read - earlier.items_read,
            blocks_written: self.blocks_written - earlier.blocks_written,
            blocks_read: self.blocks_read - earlier.blocks_read,
            spill_files: self.spill_files - earlier.spill_files,
            spilled_bytes: self.spilled_bytes - earlier.spilled_bytes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_blocks_and_budgets() {
        assert!(matches!(
            MemoryBudget::new(1 << 20, "/tmp", 1024),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            MemoryBudget::new(3 * 4096, "/tmp", 4096),
            Err(Error::Config(_))
        ));
        assert!(MemoryBudget::new(4 * 4096, "/tmp", 4096).is_ok());
    }

    #[test]
    fn clones_share_counters() {
        let a = MemoryBudget::unbounded();
        let b = a.clone();
        b.counters().add_written(3);
        assert_eq!(a.io_stats().items_written, 3);
        let before = a.io_stats();
        a.counters().add_read(2);
        assert_eq!(a.io_stats().since(&before).items_read, 2);
    }

    #[test]
    fn fan_in_is_at_least_two() {
        let b = MemoryBudget::new(4 * 4096, "/tmp", 4096).unwrap();
        assert_eq!(b.merge_fan_in(), 2);
        let b = MemoryBudget::new(1 << 20, "/tmp", 4096).unwrap();
        assert_eq!(b.merge_fan_in(), 127);
    }
}
