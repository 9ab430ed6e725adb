//! Budgeted streaming primitives. Streams, sorts and priority queues keep
//! data in core until a [`MemoryBudget`] is exceeded, then spill to
//! temporary files.

mod budget;
mod pq;
mod record;
mod sort;
mod stream;
mod zip;

pub use budget::{default_tmp_dir, IoStats, MemoryBudget, DEFAULT_BLOCK_SIZE, MIN_BLOCK_SIZE, TMP_DIR_ENV};
pub use pq::SpillingPriorityQueue;
pub use record::Record;
pub use sort::{coalesce_owned, merge_runs, sort_owned, sort_stream};
pub use stream::{StreamCursor, StreamReader, StreamWriter, TupleStream};
pub use zip::{scan_zip, ScanZip, Side};
