//! Induced-sorting suffix array construction over integer alphabets.

const EMPTY: u32 = u32::MAX;

pub(crate) trait Symbol: Copy + Eq {
    fn rank(self) -> usize;
}

impl Symbol for u8 {
    fn rank(self) -> usize {
        self as usize
    }
}

impl Symbol for u32 {
    fn rank(self) -> usize {
        self as usize
    }
}

/// Suffix array of `s` (0-based), where every symbol rank is `<= upper`.
/// Requires `s.len() < u32::MAX`.
pub(crate) fn suffix_array<S: Symbol>(s: &[S], upper: usize) -> Vec<u32> {
    let n = s.len();
    assert!(n < EMPTY as usize, "text too long for 32-bit suffix array");
    match n {
        0 => return Vec::new(),
        1 => return vec![0],
        2 => return if s[0].rank() < s[1].rank() { vec![0, 1] } else { vec![1, 0] },
        _ => {}
    }
    if n < 16 {
        return naive_suffix_array(s);
    }

    let mut ls = vec![false; n];
    for i in (0..n - 1).rev() {
        ls[i] = if s[i] == s[i + 1] {
            ls[i + 1]
        } else {
            s[i].rank() < s[i + 1].rank()
        };
    }
    let mut sum_l = vec![0u32; upper + 1];
    let mut sum_s = vec![0u32; upper + 1];
    for i in 0..n {
        if ls[i] {
            sum_l[s[i].rank() + 1] += 1;
        } else {
            sum_s[s[i].rank()] += 1;
        }
    }
    for c in 0..=upper {
        sum_s[c] += sum_l[c];
        if c < upper {
            sum_l[c + 1] += sum_s[c];
        }
    }

    let mut sa = vec![EMPTY; n];
    let induce = |lms: &[u32], sa: &mut [u32]| {
        sa.fill(EMPTY);
        let mut buf = sum_s.clone();
        for &d in lms {
            let d = d as usize;
            if d == n {
                continue;
            }
            let c = s[d].rank();
            sa[buf[c] as usize] = d as u32;
            buf[c] += 1;
        }
        buf.copy_from_slice(&sum_l);
        let c = s[n - 1].rank();
        sa[buf[c] as usize] = (n - 1) as u32;
        buf[c] += 1;
        for i in 0..n {
            let v = sa[i];
            if v != EMPTY && v >= 1 && !ls[v as usize - 1] {
                let c = s[v as usize - 1].rank();
                sa[buf[c] as usize] = v - 1;
                buf[c] += 1;
            }
        }
        buf.copy_from_slice(&sum_l);
        for i in (0..n).rev() {
            let v = sa[i];
            if v != EMPTY && v >= 1 && ls[v as usize - 1] {
                let c = s[v as usize - 1].rank() + 1;
                buf[c] -= 1;
                sa[buf[c] as usize] = v - 1;
            }
        }
    };

    let mut lms_map = vec![EMPTY; n + 1];
    let mut lms: Vec<u32> = Vec::new();
    for i in 1..n {
        if !ls[i - 1] && ls[i] {
            lms_map[i] = lms.len() as u32;
            lms.push(i as u32);
        }
    }
    let m = lms.len();
    induce(&lms, &mut sa);

    if m > 0 {
        let mut sorted_lms: Vec<u32> = Vec::with_capacity(m);
        for &v in &sa {
            if lms_map[v as usize] != EMPTY {
                sorted_lms.push(v);
            }
        }
        let mut rec_s = vec![0u32; m];
        let mut rec_upper = 0u32;
        rec_s[lms_map[sorted_lms[0] as usize] as usize] = 0;
        for i in 1..m {
            let mut l = sorted_lms[i - 1] as usize;
            let mut r = sorted_lms[i] as usize;
            let end_l = match lms_map[l] as usize + 1 {
                k if k < m => lms[k] as usize,
                _ => n,
            };
            let end_r = match lms_map[r] as usize + 1 {
                k if k < m => lms[k] as usize,
                _ => n,
            };
            let same = if end_l - l != end_r - r {
                false
            } else {
                while l < end_l && s[l] == s[r] {
                    l += 1;
                    r += 1;
                }
                l != n && r != n && s[l] == s[r]
            };
            if !same {
                rec_upper += 1;
            }
            rec_s[lms_map[sorted_lms[i] as usize] as usize] = rec_upper;
        }
        drop(lms_map);
        let rec_sa = suffix_array(&rec_s, rec_upper as usize);
        drop(rec_s);
        for (slot, &r) in sorted_lms.iter_mut().zip(&rec_sa) {
            *slot = lms[r as usize];
        }
        drop(rec_sa);
        induce(&sorted_lms, &mut sa);
    }
    sa
}

/// Sorts suffixes by direct comparison. Quadratic; used for short inputs and
/// as the test oracle.
pub(crate) fn naive_suffix_array<S: Symbol>(s: &[S]) -> Vec<u32> {
    let mut sa: Vec<u32> = (0..s.len() as u32).collect();
    sa.sort_by(|&a, &b| {
        let (x, y) = (&s[a as usize..], &s[b as usize..]);
        x.iter()
            .map(|c| c.rank())
            .cmp(y.iter().map(|c| c.rank()))
    });
    sa
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(suffix_array(b"banana", 255), naive_suffix_array(b"banana"));
        let long = b"mississippimississippimississippi";
        assert_eq!(suffix_array(long, 255), naive_suffix_array(long));
    }

    proptest! {
        #[test]
        fn matches_naive_binary(v in proptest::collection::vec(0u8..2, 0..300)) {
            prop_assert_eq!(suffix_array(&v, 255), naive_suffix_array(&v));
        }

        #[test]
        fn matches_naive_bytes(v in proptest::collection::vec(any::<u8>(), 0..300)) {
            prop_assert_eq!(suffix_array(&v, 255), naive_suffix_array(&v));
        }

        #[test]
        fn matches_naive_u32(v in proptest::collection::vec(0u32..5, 0..300)) {
            prop_assert_eq!(suffix_array(&v, 4), naive_suffix_array(&v));
        }
    }
}
