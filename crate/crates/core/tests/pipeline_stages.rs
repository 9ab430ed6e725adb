//! Access patterns of the four compression stages, observed through the
//! input iterators and per-stage I/O counters.

use std::cell::Cell;

use plcpz_core::corpus::repetitive_text;
use plcpz_core::factorizer::pipeline_compress;
use plcpz_core::factors::FactorizationBuilder;
use plcpz_core::{build_index, MemoryBudget, Text};

#[test]
fn stages_read_their_inputs_once() {
    let t = Text::from_content(repetitive_text(5, 200_000, 8).unwrap()).unwrap();
    let b = build_index(&t);
    let dir = tempfile::tempdir().unwrap();
    for budget in [MemoryBudget::unbounded(), MemoryBudget::new(64 * 1024, dir.path(), 4096).unwrap()] {
        // Event clock: every PLCP read must happen before the first Φ read.
        let clock = Cell::new(0u64);
        let last_plcp = Cell::new(0u64);
        let first_phi = Cell::new(u64::MAX);
        let plcp_reads = Cell::new(0u64);
        let plcp = b.plcp_values().map(|v| {
            clock.set(clock.get() + 1);
            last_plcp.set(clock.get());
            plcp_reads.set(plcp_reads.get() + 1);
            Ok(v)
        });
        let phi = b.phi_values().map(|v| {
            clock.set(clock.get() + 1);
            first_phi.set(first_phi.get().min(clock.get()));
            Ok(v)
        });
        let mut sink = FactorizationBuilder::new(t.len(), 2);
        let st = pipeline_compress(t.as_bytes(), plcp, phi, 2, &budget, &mut sink).unwrap();
        let refs = st.references;
        assert!(refs > 100);

        assert_eq!(plcp_reads.get(), t.len());
        assert!(last_plcp.get() < first_phi.get());
        // Scan: writes each pair once and reads nothing back.
        assert_eq!(st.io_scan.items_read, 0);
        assert_eq!(st.io_scan.items_written, refs);
        // Sort: reads every pair at least once.
        assert!(st.io_sort.items_read >= refs);
        // Φ merge: one pass over the sorted pairs, one triple per pair.
        assert_eq!(st.io_phi_merge.items_read, refs);
        assert_eq!(st.io_phi_merge.items_written, refs);
        // Text merge: one pass over the triples, nothing written to streams.
        assert_eq!(st.io_text_merge.items_read, refs);
        assert_eq!(st.io_text_merge.items_written, 0);

        let f = sink.finish();
        assert_eq!(f.reference_count(), refs);
    }
}
