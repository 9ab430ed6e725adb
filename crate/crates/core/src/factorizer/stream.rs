use serde::Serialize;

use crate::error::Result;

/// A resident of the peak list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeakEntry {
    pub pos: u64,
    /// PLCP value as read by the scan.
    pub val: u64,
    /// PLCP value at `pos + val`, filled in once the scan gets there. Needed
    /// when factoring this peak exposes a new peak right after its span.
    pub next_value: Option<u64>,
}

impl PeakEntry {
    fn end(&self) -> u64 {
        self.pos + self.val
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ScanStats {
    pub positions: u64,
    pub pairs: u64,
    /// Largest number of entries held in the peak list at once, not counting
    /// the current maximal-peak candidate.
    pub max_peak_list: u64,
    /// Peaks created behind a factor while resolving the list.
    pub exposed_peaks: u64,
}

struct Task {
    lo: usize,
    hi: usize,
    cap: u64,
    extra: Option<PeakEntry>,
}

/// Factors the peaks in `list` (ascending positions) given that every span
/// must end at or before `cap`. Emits `(dst, len)` pairs in discovery order
/// and returns the number of exposed peaks that were created.
pub fn process_peak_list(
    list: &[PeakEntry],
    cap: u64,
    theta: u64,
    emit: &mut impl FnMut(u64, u64) -> Result<()>,
) -> Result<u64> {
    let mut exposed = 0;
    let mut stack = vec![Task {
        lo: 0,
        hi: list.len(),
        cap,
        extra: None,
    }];
    while let Some(t) = stack.pop() {
        // Leftmost entry with the largest capped value.
        let mut best: Option<(Option<usize>, PeakEntry, u64)> = None;
        let mut consider = |idx: Option<usize>, e: PeakEntry| {
            debug_assert!(e.pos < t.cap);
            let v = e.val.min(t.cap - e.pos);
            if v >= theta && best.map_or(true, |(_, _, bv)| v > bv) {
                best = Some((idx, e, v));
            }
        };
        if let Some(e) = t.extra {
            consider(None, e);
        }
        for k in t.lo..t.hi {
            consider(Some(k), list[k]);
        }
        let Some((idx, e, v)) = best else { continue };
        emit(e.pos, v)?;

        let right_from = idx.map_or(t.lo, |k| k + 1);
        let right_lo = right_from + list[right_from..t.hi].partition_point(|x| x.pos < e.pos + v);
        let mut exposed_peak = None;
        let after = e.pos + v;
        if v == e.val && after < t.cap {
            debug_assert!(idx.is_some(), "an exposed peak is always capped");
            if let Some(next) = e.next_value {
                let occupied = right_lo < t.hi && list[right_lo].pos == after;
                if next >= theta && !occupied {
                    exposed_peak = Some(PeakEntry {
                        pos: after,
                        val: next,
                        next_value: None,
                    });
                    exposed += 1;
                }
            } else {
                debug_assert!(false, "next value of a resolved peak was never recorded");
            }
        }
        stack.push(Task {
            lo: right_lo,
            hi: t.hi,
            cap: t.cap,
            extra: exposed_peak,
        });
        match idx {
            Some(k) => stack.push(Task {
                lo: t.lo,
                hi: k,
                cap: e.pos,
                extra: t.extra,
            }),
            None => {}
        }
    }
    Ok(exposed)
}

/// Single left-to-right scan over PLCP that emits the references of the
/// greedy scheme as `(dst, len)` pairs, holding only the interesting peaks of
/// the current segment in memory.
pub struct StreamFactorizer {
    theta: u64,
    pos: u64,
    seg_start: u64,
    prev: u64,
    candidate: Option<PeakEntry>,
    list: Vec<PeakEntry>,
    next_value_at: usize,
    stats: ScanStats,
}

impl StreamFactorizer {
    pub fn new(theta: u64) -> Self {
        Self {
            theta,
            pos: 1,
            seg_start: 1,
            prev: 0,
            candidate: None,
            list: Vec::new(),
            next_value_at: 0,
            stats: ScanStats::default(),
        }
    }

    pub fn stats(&self) -> ScanStats {
        self.stats
    }

    /// Current size of the peak list.
    pub fn peak_list_len(&self) -> usize {
        self.list.len()
    }

    /// Feeds `PLCP[pos]` for the next position.
    pub fn push(&mut self, v: u64, emit: &mut impl FnMut(u64, u64) -> Result<()>) -> Result<()> {
        let i = self.pos;
        while let Some(e) = self.list.get_mut(self.next_value_at) {
            if e.end() != i {
                break;
            }
            e.next_value = Some(v);
            self.next_value_at += 1;
        }

        let rises = i == self.seg_start || self.prev < v;
        if v >= self.theta && rises && self.candidate.map_or(true, |c| c.val < v) {
            if let Some(c) = self.candidate.take() {
                debug_assert!(self.list.last().map_or(true, |l| l.val < c.val && l.end() < c.end()));
                self.list.push(c);
                self.stats.max_peak_list = self.stats.max_peak_list.max(self.list.len() as u64);
            }
            self.candidate = Some(PeakEntry {
                pos: i,
                val: v,
                next_value: None,
            });
        }

        if let Some(c) = self.candidate {
            if c.end() - 1 == i {
                self.stats.pairs += 1;
                emit(c.pos, c.val)?;
                self.resolve(c.pos, emit)?;
                self.candidate = None;
                self.seg_start = i + 1;
            }
        }
        self.prev = v;
        self.pos += 1;
        self.stats.positions += 1;
        Ok(())
    }

    fn resolve(&mut self, cap: u64, emit: &mut impl FnMut(u64, u64) -> Result<()>) -> Result<()> {
        if !self.list.is_empty() {
            let mut count = 0u64;
            let exposed = process_peak_list(&self.list, cap, self.theta, &mut |d, l| {
                count += 1;
                emit(d, l)
            })?;
            self.stats.pairs += count;
            self.stats.exposed_peaks += exposed;
            self.list.clear();
        }
        self.next_value_at = 0;
        Ok(())
    }

    /// Flushes whatever is still pending after the last position.
    pub fn finish(mut self, emit: &mut impl FnMut(u64, u64) -> Result<()>) -> Result<ScanStats> {
        if let Some(c) = self.candidate.take() {
            self.list.push(c);
            let cap = self.pos;
            self.resolve(cap, emit)?;
        }
        Ok(self.stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(p: &[u64], theta: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let mut f = StreamFactorizer::new(theta);
        for &v in p {
            f.push(v, &mut |d, l| {
                out.push((d, l));
                Ok(())
            })
            .unwrap();
        }
        f.finish(&mut |d, l| {
            out.push((d, l));
            Ok(())
        })
        .unwrap();
        out
    }

    #[test]
    fn running_example_discovery_order() {
        let p = [4u64, 5, 4, 3, 4, 5, 5, 7, 6, 5, 4, 3, 2, 1, 2, 1, 3, 2, 1, 0, 0, 0];
        let out = run(&p, 2);
        assert_eq!(&out[..2], &[(2, 5), (8, 7)]);
        let mut sorted = out.clone();
        sorted.sort();
        assert_eq!(sorted, vec![(2, 5), (8, 7), (15, 2), (17, 3)]);
    }

    #[test]
    fn empty_list_emits_nothing() {
        let mut out = Vec::new();
        let n = process_peak_list(&[], 10, 2, &mut |d, l| {
            out.push((d, l));
            Ok(())
        })
        .unwrap();
        assert_eq!(n, 0);
        assert!(out.is_empty());
    }

    #[test]
    fn rule_d_drops_peak_below_threshold() {
        // Peak at 1 with value 4 capped by a factor at 2: value 1 < 2.
        let l = [PeakEntry {
            pos: 1,
            val: 4,
            next_value: Some(0),
        }];
        let mut out = Vec::new();
        process_peak_list(&l, 2, 2, &mut |d, len| {
            out.push((d, len));
            Ok(())
        })
        .unwrap();
        assert!(out.is_empty());
    }
}
