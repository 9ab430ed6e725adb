//! Arrays of the running example, frozen from a brute-force construction.

use plcpz_core::text_index::{lcp_from_plcp, load_index, write_index, IndexFile};
use plcpz_core::{build_index, Text};

const SA: [u64; 22] = [22, 21, 16, 19, 17, 6, 1, 8, 13, 3, 10, 20, 15, 18, 5, 7, 12, 2, 9, 14, 4, 11];
const ISA: [u64; 22] = [7, 18, 10, 21, 15, 6, 16, 8, 19, 11, 22, 17, 9, 20, 13, 3, 5, 14, 4, 12, 2, 1];
const PHI: [u64; 22] = [6, 12, 13, 14, 18, 17, 5, 1, 2, 3, 4, 7, 8, 9, 20, 21, 19, 15, 16, 10, 22, 11];
const PLCP: [u64; 22] = [4, 5, 4, 3, 4, 5, 5, 7, 6, 5, 4, 3, 2, 1, 2, 1, 3, 2, 1, 0, 0, 0];
const LCP: [u64; 22] = [0, 0, 1, 1, 3, 5, 4, 7, 2, 4, 5, 0, 2, 2, 4, 5, 3, 5, 6, 1, 3, 4];
const BWT_RUNS: u64 = 13;

fn running_example() -> Text {
    Text::from_content(b"ababbabababbabbaababa".to_vec()).unwrap()
}

#[test]
fn arrays_match_frozen_values() {
    let b = build_index(&running_example());
    assert_eq!(b.sa_values().collect::<Vec<_>>(), SA);
    assert_eq!(b.isa_values().collect::<Vec<_>>(), ISA);
    assert_eq!(b.phi_values().collect::<Vec<_>>(), PHI);
    assert_eq!(b.plcp_values().collect::<Vec<_>>(), PLCP);
    assert_eq!(lcp_from_plcp(&b), LCP);
    assert_eq!(b.bwt_runs(), BWT_RUNS);
    // Φ wraps from the smallest suffix to the largest.
    assert_eq!(b.phi(21), 22);
    assert_eq!(b.phi(22), 11);
}

#[test]
fn dump_round_trips_through_memory_and_file() {
    let b = build_index(&running_example());
    let mut bytes = Vec::new();
    write_index(&b, &mut bytes).unwrap();
    assert_eq!(bytes.len(), 24 + 4 * 22 * 8);
    let back = load_index(&bytes[..]).unwrap();
    assert_eq!(back.sa_values().collect::<Vec<_>>(), SA);
    assert_eq!(back.plcp_values().collect::<Vec<_>>(), PLCP);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ex.idx");
    std::fs::write(&path, &bytes).unwrap();
    let f = IndexFile::open(&path).unwrap();
    assert_eq!(f.len(), 22);
    assert_eq!(f.bwt_runs(), BWT_RUNS);
    assert_eq!(f.phi_iter().unwrap().collect::<Result<Vec<_>, _>>().unwrap(), PHI);
    assert_eq!(f.isa_iter().unwrap().collect::<Result<Vec<_>, _>>().unwrap(), ISA);
}

#[test]
fn truncated_dump_is_rejected() {
    let b = build_index(&running_example());
    let mut bytes = Vec::new();
    write_index(&b, &mut bytes).unwrap();
    assert!(load_index(&bytes[..bytes.len() - 3]).is_err());
    assert!(load_index(&bytes[..10]).is_err());
}
