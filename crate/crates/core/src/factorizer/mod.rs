//! Streaming computation of the greedy PLCP factorization and the
//! scan/sort/scan/scan pipeline that turns it into a text-order coding.

mod peaks;
mod stream;

pub use peaks::{detect_peaks, PeakFlags};
pub use stream::{process_peak_list, PeakEntry, ScanStats, StreamFactorizer};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factors::{FactorSink, Factorization, FactorizationBuilder, Reference};
use crate::scheme::check_theta;
use crate::streamkit::{sort_stream, IoStats, MemoryBudget, StreamWriter, TupleStream};
use crate::text_index::{IndexBundle, Text};

/// Runs the scan over PLCP and collects the `(dst, len)` pairs in discovery
/// order.
pub fn stream_factorize<I>(plcp: I, theta: u64, budget: &MemoryBudget) -> Result<(TupleStream<(u64, u64)>, ScanStats)>
where
    I: IntoIterator<Item = Result<u64>>,
{
    check_theta(theta)?;
    let mut out = StreamWriter::new(budget);
    let mut f = StreamFactorizer::new(theta);
    let mut emit = |d: u64, l: u64| out.push((d, l));
    for v in plcp {
        f.push(v?, &mut emit)?;
    }
    let stats = f.finish(&mut emit)?;
    Ok((out.finish()?, stats))
}

/// Counters of one pipeline run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PipelineStats {
    pub n: u64,
    pub theta: u64,
    pub references: u64,
    pub literal_factors: u64,
    pub literal_chars: u64,
    pub scan: ScanStats,
    pub io_scan: IoStats,
    pub io_sort: IoStats,
    pub io_phi_merge: IoStats,
    pub io_text_merge: IoStats,
}

impl PipelineStats {
    /// Factors in the coded file (literal runs coalesced).
    pub fn coded_factors(&self) -> u64 {
        self.references + self.literal_factors
    }

    /// Factors when every literal character counts as its own factor.
    pub fn total_factors(&self) -> u64 {
        self.references + self.literal_chars
    }
}

const LITERAL_CHUNK: usize = 64 * 1024;

/// Computes the coding of `text` (sentinel included) from its PLCP and Φ
/// arrays in four passes: scan PLCP for pairs, sort pairs by destination,
/// merge with Φ for sources, merge with the text for literals. Factors reach
/// `sink` in text order.
pub fn pipeline_compress<P, F, S>(
    text: &[u8],
    plcp: P,
    phi: F,
    theta: u64,
    budget: &MemoryBudget,
    sink: &mut S,
) -> Result<PipelineStats>
where
    P: IntoIterator<Item = Result<u64>>,
    F: IntoIterator<Item = Result<u64>>,
    S: FactorSink + ?Sized,
{
    let n = text.len() as u64;
    let mut stats = PipelineStats {
        n,
        theta,
        ..Default::default()
    };

    let t0 = budget.io_stats();
    let (pairs, scan) = stream_factorize(plcp, theta, budget)?;
    if scan.positions != n {
        return Err(Error::Input(format!(
            "PLCP has {} entries but the text has {n} characters",
            scan.positions
        )));
    }
    stats.scan = scan;
    let t1 = budget.io_stats();
    stats.io_scan = t1.since(&t0);

    let sorted = sort_stream(&pairs, |p| p.0, budget)?;
    drop(pairs);
    let t2 = budget.io_stats();
    stats.io_sort = t2.since(&t1);

    let mut triples = StreamWriter::<Reference>::new(budget);
    {
        let mut cur = sorted.cursor()?;
        let mut phi_len = 0u64;
        for (k, src) in phi.into_iter().enumerate() {
            let src = src?;
            let i = k as u64 + 1;
            phi_len = i;
            if let Some(&(dst, len)) = cur.peek() {
                if dst == i {
                    triples.push(Reference::new(dst, src, len))?;
                    cur.advance()?;
                }
            }
        }
        if phi_len != n {
            return Err(Error::Input(format!("Φ has {phi_len} entries but the text has {n} characters")));
        }
        if let Some(&(dst, _)) = cur.peek() {
            return Err(Error::Logic(format!("pair at {dst} has no Φ entry")));
        }
    }
    let triples = triples.finish()?;
    drop(sorted);
    let t3 = budget.io_stats();
    stats.io_phi_merge = t3.since(&t2);

    let mut pos = 1u64;
    let literal = |from: u64, to: u64, stats: &mut PipelineStats, sink: &mut S| -> Result<()> {
        if from >= to {
            return Ok(());
        }
        sink.begin_literal(from, to - from)?;
        for chunk in text[from as usize - 1..to as usize - 1].chunks(LITERAL_CHUNK) {
            sink.literal_bytes(chunk)?;
        }
        stats.literal_factors += 1;
        stats.literal_chars += to - from;
        Ok(())
    };
    for r in triples.iter()? {
        let r = r?;
        if r.dst < pos {
            return Err(Error::Logic(format!("reference at {} overlaps the previous factor", r.dst)));
        }
        literal(pos, r.dst, &mut stats, sink)?;
        sink.reference(r)?;
        stats.references += 1;
        pos = r.end();
    }
    literal(pos, n + 1, &mut stats, sink)?;
    stats.io_text_merge = budget.io_stats().since(&t3);
    Ok(stats)
}

/// Convenience wrapper: index in memory, coding collected in memory.
pub fn compress(t: &Text, b: &IndexBundle, theta: u64, budget: &MemoryBudget) -> Result<(Factorization, PipelineStats)> {
    let mut sink = FactorizationBuilder::new(t.len(), theta);
    let stats = pipeline_compress(
        t.as_bytes(),
        b.plcp_values().map(Ok),
        b.phi_values().map(Ok),
        theta,
        budget,
        &mut sink,
    )?;
    Ok((sink.finish(), stats))
}

/// Text on which the scan must keep `m - 2` interesting peaks at once:
/// `F_m = c_m`, `F_i = c_i F_{i+1} c_i`, `T = F_m F_{m-1} ... F_1` with
/// `c_i = i`. Its length is `m^2` plus the sentinel.
pub fn lower_bound_text(m: u32) -> Result<Text> {
    if !(2..=255).contains(&m) {
        return Err(Error::Config(format!("lower-bound parameter must be in 2..=255, got {m}")));
    }
    let mut blocks: Vec<Vec<u8>> = Vec::with_capacity(m as usize);
    let mut f = vec![m as u8];
    blocks.push(f.clone());
    for i in (1..m).rev() {
        let mut g = Vec::with_capacity(f.len() + 2);
        g.push(i as u8);
        g.extend_from_slice(&f);
        g.push(i as u8);
        blocks.push(g.clone());
        f = g;
    }
    Text::from_content(blocks.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::scheme_references;
    use crate::text_index::build_index;

    fn pairs_of(t: &Text, theta: u64) -> (Vec<(u64, u64)>, ScanStats) {
        let b = build_index(t);
        let budget = MemoryBudget::unbounded();
        let (s, st) = stream_factorize(b.plcp_values().map(Ok), theta, &budget).unwrap();
        (s.to_vec().unwrap(), st)
    }

    fn oracle_pairs(t: &Text, theta: u64) -> Vec<(u64, u64)> {
        let b = build_index(t);
        let mut v: Vec<_> = scheme_references(&b, theta).iter().map(|r| (r.dst, r.len)).collect();
        v.sort();
        v
    }

    #[test]
    fn lower_bound_small_cases() {
        assert_eq!(lower_bound_text(2).unwrap().content(), &[2, 1, 2, 1]);
        assert_eq!(lower_bound_text(3).unwrap().content(), &[3, 2, 3, 2, 1, 2, 3, 2, 1]);
        for m in [2u32, 7, 30] {
            assert_eq!(lower_bound_text(m).unwrap().len(), (m * m) as u64 + 1);
        }
        assert!(lower_bound_text(1).is_err());
        assert!(lower_bound_text(256).is_err());
    }

    #[test]
    fn lower_bound_list_size() {
        for m in [4u32, 10, 25] {
            let t = lower_bound_text(m).unwrap();
            let (mut p, st) = pairs_of(&t, 2);
            assert_eq!(st.max_peak_list, m as u64 - 2, "m={m}");
            p.sort();
            assert_eq!(p, oracle_pairs(&t, 2));
        }
    }

    #[test]
    fn single_repeated_character() {
        let t = Text::from_content(vec![b'a'; 50]).unwrap();
        let (mut p, _) = pairs_of(&t, 2);
        p.sort();
        assert_eq!(p, oracle_pairs(&t, 2));
        assert_eq!(p, vec![(1, 49)]);
    }

    #[test]
    fn all_binary_strings_match_oracle() {
        for len in 1..=10u32 {
            for bits in 0..(1u32 << len) {
                let v: Vec<u8> = (0..len).map(|k| b'a' + ((bits >> k) & 1) as u8).collect();
                let t = Text::from_content(v).unwrap();
                for theta in 2..=4 {
                    let (mut p, _) = pairs_of(&t, theta);
                    p.sort();
                    assert_eq!(p, oracle_pairs(&t, theta), "{:?} theta={theta}", t.content());
                }
            }
        }
    }

    #[test]
    fn pipeline_running_example() {
        let t = Text::from_content(b"ababbabababbabbaababa".to_vec()).unwrap();
        let b = build_index(&t);
        let (f, st) = compress(&t, &b, 2, &MemoryBudget::unbounded()).unwrap();
        let refs: Vec<_> = f.references().map(|r| (r.dst, r.src, r.len)).collect();
        assert_eq!(refs, vec![(2, 12, 5), (8, 1, 7), (15, 20, 2), (17, 19, 3)]);
        assert_eq!(st.literal_chars, 5);
        assert_eq!(st.literal_factors, 3);
        assert_eq!(st.total_factors(), 9);
        f.validate().unwrap();
    }

    #[test]
    fn rejects_theta_below_two() {
        let budget = MemoryBudget::unbounded();
        assert!(matches!(
            stream_factorize(std::iter::empty(), 1, &budget),
            Err(Error::Config(_))
        ));
    }
}
