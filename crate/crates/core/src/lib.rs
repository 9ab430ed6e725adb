//! Bidirectional text compression by streaming over the permuted LCP array,
//! with external-memory decompression by chain compaction and pointer
//! jumping.

pub mod codec;
pub mod corpus;
pub mod decompress;
pub mod error;
pub mod factorizer;
pub mod factors;
pub mod scheme;
pub mod streamkit;
pub mod text_index;

pub use error::{DecodeError, Error, Result};
pub use streamkit::{IoStats, MemoryBudget, TupleStream};
pub use factors::{Factor, FactorSink, Factorization, Reference};
pub use text_index::{build_index, IndexBundle, Text};
