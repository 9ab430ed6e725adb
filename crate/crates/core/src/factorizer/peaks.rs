use std::collections::VecDeque;

/// Classification of one text position.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PeakFlags {
    pub peak: bool,
    pub interesting: bool,
    pub maximal: bool,
    /// For maximal peaks, the last position that had to be read before the
    /// peak was known to be maximal.
    pub decided_at: Option<u64>,
}

/// Evaluates the peak definitions on an unmodified PLCP array (one segment
/// starting at position 1, no factors yet).
///
/// A position `x` is a peak if `PLCP[x] >= theta` and it is the first
/// position or `PLCP[x-1] < PLCP[x]`. A peak is interesting if no earlier
/// position `j` with `PLCP[j] >= PLCP[x]` has `x` strictly inside
/// `(j, j+PLCP[j])`. An interesting peak is maximal if no interesting peak
/// lies in `(x, x+PLCP[x])`.
pub fn detect_peaks<I: IntoIterator<Item = u64>>(plcp: I, theta: u64) -> Vec<PeakFlags> {
    let mut flags: Vec<PeakFlags> = Vec::new();
    // Positions whose span may still cover the scan position, as
    // (value, end). Values strictly decrease and ends strictly increase
    // from front to back.
    let mut cover: VecDeque<(u64, u64)> = VecDeque::new();
    let mut pending: Option<(u64, u64)> = None;
    let mut prev = 0u64;
    for (k, v) in plcp.into_iter().enumerate() {
        let x = k as u64 + 1;
        while cover.front().is_some_and(|&(_, end)| end <= x) {
            cover.pop_front();
        }
        let dominated = cover.front().is_some_and(|&(val, _)| val >= v);
        let peak = v >= theta && (x == 1 || prev < v);
        let interesting = peak && !dominated;
        flags.push(PeakFlags {
            peak,
            interesting,
            ..Default::default()
        });

        if interesting {
            // The previous candidate had x inside its span.
            pending = Some((x, v));
        }
        if let Some((p, pv)) = pending {
            if p + pv - 1 == x {
                let f = &mut flags[p as usize - 1];
                f.maximal = true;
                f.decided_at = Some(x);
                pending = None;
            }
        }

        let end = x + v;
        while cover.back().is_some_and(|&(val, _)| val <= v) {
            cover.pop_back();
        }
        if v > 0 && cover.back().map_or(true, |&(_, e)| e < end) {
            cover.push_back((v, end));
        }
        prev = v;
    }
    if let Some((p, _)) = pending {
        let last = flags.len() as u64;
        let f = &mut flags[p as usize - 1];
        f.maximal = true;
        f.decided_at = Some(last);
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(p: &[u64], theta: u64) -> Vec<(bool, bool, bool)> {
        let n = p.len();
        let peak: Vec<bool> = (0..n).map(|x| p[x] >= theta && (x == 0 || p[x - 1] < p[x])).collect();
        let interesting: Vec<bool> = (0..n)
            .map(|x| peak[x] && !(0..n).any(|j| j < x && x < j + p[j] as usize && p[j] >= p[x]))
            .collect();
        (0..n)
            .map(|x| {
                let maximal = interesting[x] && !(x + 1..(x + p[x] as usize).min(n)).any(|j| interesting[j]);
                (peak[x], interesting[x], maximal)
            })
            .collect()
    }

    /// Arrays with the shape of a PLCP array: `P[i+1] >= P[i]-1` and
    /// `P[i] <= n-i`, last entry zero.
    fn plcp_shaped() -> impl Strategy<Value = Vec<u64>> {
        (1usize..64, proptest::collection::vec(0u64..6, 64)).prop_map(|(n, jumps)| {
            let mut p = vec![0u64; n];
            let mut cur = 0u64;
            for i in 0..n {
                let room = (n - 1 - i) as u64;
                cur = if jumps[i] == 0 { cur + 2 } else { cur.saturating_sub(1) + jumps[i] % 3 };
                cur = cur.min(room);
                p[i] = cur;
            }
            p
        })
    }

    #[test]
    fn running_example_first_maximal_peak() {
        let p = [4u64, 5, 4, 3, 4, 5, 5, 7, 6, 5, 4, 3, 2, 1, 2, 1, 3, 2, 1, 0, 0, 0];
        let f = detect_peaks(p, 2);
        assert!(f[0].interesting && !f[0].maximal);
        assert!(f[1].maximal);
        assert_eq!(f[1].decided_at, Some(6));
    }

    #[test]
    fn nonincreasing_start_is_maximal() {
        let f = detect_peaks([5u64, 4, 3, 2, 1, 0], 2);
        assert!(f[0].maximal);
        assert_eq!(f[0].decided_at, Some(5));
    }

    proptest! {
        #[test]
        fn matches_definitions(p in plcp_shaped(), theta in 2u64..4) {
            let got: Vec<_> = detect_peaks(p.iter().copied(), theta)
                .into_iter()
                .map(|f| (f.peak, f.interesting, f.maximal))
                .collect();
            prop_assert_eq!(got, brute(&p, theta));
        }
    }
}
