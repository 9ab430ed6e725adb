//! Suffix array, inverse suffix array, Φ and PLCP for a sentinel-terminated
//! text. All positions exposed by this module are 1-based.

mod dump;
mod sais;

pub use dump::{load_index, write_index, IndexFile, INDEX_MAGIC};

use crate::error::{Error, Result};

/// Terminator appended to every text. It must not occur anywhere else.
pub const SENTINEL: u8 = 0;

/// A byte string ending in a unique zero sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    bytes: Vec<u8>,
}

impl Text {
    /// Appends the sentinel to `content`. Content containing a zero byte is
    /// rejected.
    pub fn from_content(mut content: Vec<u8>) -> Result<Self> {
        if let Some(p) = content.iter().position(|&c| c == SENTINEL) {
            return Err(Error::Input(format!(
                "input contains a zero byte at offset {p}; zero is reserved for the terminator"
            )));
        }
        if content.len() >= u32::MAX as usize - 1 {
            return Err(Error::Input(format!("input of {} bytes is too long", content.len())));
        }
        content.push(SENTINEL);
        Ok(Self { bytes: content })
    }

    /// Accepts bytes that already end in the sentinel.
    pub fn from_terminated(bytes: Vec<u8>) -> Result<Self> {
        match bytes.iter().position(|&c| c == SENTINEL) {
            None => Err(Error::Input("text has no terminating zero byte".into())),
            Some(p) if p + 1 != bytes.len() => Err(Error::Input(format!(
                "zero byte at offset {p} before the end of the text"
            ))),
            Some(_) if bytes.len() >= u32::MAX as usize => {
                Err(Error::Input(format!("text of {} bytes is too long", bytes.len())))
            }
            Some(_) => Ok(Self { bytes }),
        }
    }

    /// Length including the sentinel.
    pub fn len(&self) -> u64 {
        self.bytes.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Whole text including the sentinel.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Text without the sentinel.
    pub fn content(&self) -> &[u8] {
        &self.bytes[..self.bytes.len() - 1]
    }

    /// Byte at 1-based position `i`.
    pub fn at(&self, i: u64) -> u8 {
        self.bytes[i as usize - 1]
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

/// Index arrays of a text. Values are 1-based positions (or lengths for
/// PLCP); storage is 32-bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexBundle {
    pub(crate) sa: Vec<u32>,
    pub(crate) isa: Vec<u32>,
    pub(crate) phi: Vec<u32>,
    pub(crate) plcp: Vec<u32>,
    pub(crate) bwt_runs: u64,
}

impl IndexBundle {
    pub fn len(&self) -> u64 {
        self.sa.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    /// Text position of the `i`-th smallest suffix.
    pub fn sa(&self, i: u64) -> u64 {
        self.sa[i as usize - 1] as u64
    }

    /// Rank of the suffix starting at `i`.
    pub fn isa(&self, i: u64) -> u64 {
        self.isa[i as usize - 1] as u64
    }

    /// Start of the suffix preceding `T[i..]` in suffix order. The smallest
    /// suffix wraps around to the largest.
    pub fn phi(&self, i: u64) -> u64 {
        self.phi[i as usize - 1] as u64
    }

    /// Length of the longest common prefix of `T[i..]` and `T[phi(i)..]`.
    pub fn plcp(&self, i: u64) -> u64 {
        self.plcp[i as usize - 1] as u64
    }

    /// Number of maximal equal-character runs in the BWT.
    pub fn bwt_runs(&self) -> u64 {
        self.bwt_runs
    }

    pub fn sa_values(&self) -> impl Iterator<Item = u64> + '_ {
        self.sa.iter().map(|&v| v as u64)
    }

    pub fn isa_values(&self) -> impl Iterator<Item = u64> + '_ {
        self.isa.iter().map(|&v| v as u64)
    }

    pub fn phi_values(&self) -> impl Iterator<Item = u64> + '_ {
        self.phi.iter().map(|&v| v as u64)
    }

    pub fn plcp_values(&self) -> impl Iterator<Item = u64> + '_ {
        self.plcp.iter().map(|&v| v as u64)
    }

    /// PLCP in text order, 0-based slice.
    pub fn plcp_slice(&self) -> &[u32] {
        &self.plcp
    }

    /// Φ in text order, 0-based slice of 1-based positions.
    pub fn phi_slice(&self) -> &[u32] {
        &self.phi
    }
}

pub fn build_index(t: &Text) -> IndexBundle {
    let s = t.as_bytes();
    let n = s.len();
    let sa0 = sais::suffix_array(s, 255);

    let mut isa = vec![0u32; n];
    for (rank, &p) in sa0.iter().enumerate() {
        isa[p as usize] = rank as u32 + 1;
    }
    let mut phi = vec![0u32; n];
    for k in 0..n {
        let prev = if k == 0 { sa0[n - 1] } else { sa0[k - 1] };
        phi[sa0[k] as usize] = prev + 1;
    }

    // Irreducible-style scan in text order: plcp[i+1] >= plcp[i] - 1.
    let mut plcp = vec![0u32; n];
    let mut l = 0usize;
    for i in 0..n {
        if isa[i] == 1 {
            plcp[i] = 0;
            l = 0;
            continue;
        }
        let j = phi[i] as usize - 1;
        while i + l < n && j + l < n && s[i + l] == s[j + l] {
            l += 1;
        }
        plcp[i] = l as u32;
        l = l.saturating_sub(1);
    }

    let mut bwt_runs = 0u64;
    let mut last: Option<u8> = None;
    for &p in &sa0 {
        let c = if p == 0 { s[n - 1] } else { s[p as usize - 1] };
        if last != Some(c) {
            bwt_runs += 1;
            last = Some(c);
        }
    }

    let sa = sa0.into_iter().map(|p| p + 1).collect();
    IndexBundle {
        sa,
        isa,
        phi,
        plcp,
        bwt_runs,
    }
}

/// LCP array in suffix order: `LCP[i] = PLCP[SA[i]]`.
pub fn lcp_from_plcp(b: &IndexBundle) -> Vec<u64> {
    b.sa.iter().map(|&p| b.plcp[p as usize - 1] as u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn running() -> Text {
        Text::from_content(b"ababbabababbabbaababa".to_vec()).unwrap()
    }

    #[test]
    fn rejects_zero_bytes() {
        assert!(matches!(Text::from_content(vec![1, 0, 2]), Err(Error::Input(_))));
        assert!(matches!(Text::from_terminated(vec![1, 2]), Err(Error::Input(_))));
        assert!(matches!(Text::from_terminated(vec![0, 1, 0]), Err(Error::Input(_))));
        assert_eq!(Text::from_terminated(vec![5, 0]).unwrap().len(), 2);
    }

    #[test]
    fn two_symbol_text() {
        let b = build_index(&Text::from_content(b"a".to_vec()).unwrap());
        assert_eq!(b.sa_values().collect::<Vec<_>>(), vec![2, 1]);
        assert_eq!(b.phi_values().collect::<Vec<_>>(), vec![2, 1]);
        assert_eq!(b.plcp_values().collect::<Vec<_>>(), vec![0, 0]);
        assert_eq!(b.bwt_runs(), 2);
    }

    #[test]
    fn running_example_arrays() {
        let b = build_index(&running());
        assert_eq!(b.plcp(22), 0);
        assert_eq!(b.phi(22), 11);
        assert_eq!(b.phi(21), 22);
        assert_eq!(b.isa(b.sa(5)), 5);
    }

    #[test]
    fn distinct_characters_have_zero_lcp() {
        let b = build_index(&Text::from_content(b"abcdefg".to_vec()).unwrap());
        assert!(lcp_from_plcp(&b).iter().all(|&v| v == 0));
    }

    fn brute_lcp(s: &[u8], a: usize, b: usize) -> u64 {
        s[a..].iter().zip(&s[b..]).take_while(|(x, y)| x == y).count() as u64
    }

    proptest! {
        #[test]
        fn arrays_match_definitions(v in proptest::collection::vec(1u8..4, 0..256)) {
            let t = Text::from_content(v).unwrap();
            let b = build_index(&t);
            let s = t.as_bytes();
            let n = s.len();
            let naive = sais::naive_suffix_array(s);
            prop_assert_eq!(b.sa_values().collect::<Vec<_>>(), naive.iter().map(|&p| p as u64 + 1).collect::<Vec<_>>());
            for i in 1..=n as u64 {
                prop_assert_eq!(b.sa(b.isa(i)), i);
                if b.isa(i) > 1 {
                    let j = b.phi(i);
                    prop_assert_eq!(b.plcp(i), brute_lcp(s, i as usize - 1, j as usize - 1));
                }
                if i < n as u64 {
                    prop_assert!(b.plcp(i + 1) + 1 >= b.plcp(i));
                }
            }
            prop_assert_eq!(b.plcp(b.sa(1)), 0);
            let lcp = lcp_from_plcp(&b);
            for k in 2..=n {
                let (x, y) = (b.sa(k as u64) as usize - 1, b.sa(k as u64 - 1) as usize - 1);
                prop_assert_eq!(lcp[k - 1], brute_lcp(s, x, y));
            }
            let bwt: Vec<u8> = naive.iter().map(|&p| if p == 0 { s[n - 1] } else { s[p as usize - 1] }).collect();
            let runs = 1 + bwt.windows(2).filter(|w| w[0] != w[1]).count() as u64;
            prop_assert_eq!(b.bwt_runs(), runs);
        }
    }
}
