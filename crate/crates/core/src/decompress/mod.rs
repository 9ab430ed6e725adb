//! Decompressors for bidirectional codings: a naive in-memory resolver,
//! chain compaction (in memory and external) and external pointer jumping.

mod compact;
mod graph;
mod oracle;
mod pj;
mod random;

pub use compact::{compact_em, compact_im, CompactStats};
pub use graph::{build_dep_streams, graph_stats, DepGraphStats, DepStreams, FactorRecord, RequestRecord};
pub use oracle::{decompress_oracle, resolution_rounds};
pub use pj::{decompress_pj, decompress_pj_stream, round_limit, PjRound, PjStats};
pub use random::{chain_coding, random_bidirectional_coding};

#[cfg(test)]
pub(crate) mod tests_support {
    use crate::factors::{factorization_from_references, Factorization, Reference};

    /// Six factors: the first refers across the second and third, the third
    /// refers into the fifth and the fifth into the literal sixth.
    pub fn six_factor_fixture() -> Factorization {
        let text = b"ypxypqzpqrpqrs\0";
        let refs = [Reference::new(1, 4, 2), Reference::new(5, 8, 2), Reference::new(8, 11, 3)];
        let f = factorization_from_references(text, 1, &refs);
        assert_eq!(f.factors.len(), 6);
        f
    }
}
