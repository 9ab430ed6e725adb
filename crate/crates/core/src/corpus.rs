//! Seeded test corpora. Generated content never contains the zero byte, so
//! every corpus can be turned into a [`Text`](crate::Text) directly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::factorizer::lower_bound_text;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    /// Independent uniform characters from an alphabet of the given size.
    Random { alphabet: u8 },
    /// Copies of earlier stretches with sparse short edits, over a small
    /// alphabet.
    Repetitive { edit_per_mille: u16 },
    /// The peak-list worst case for parameter `m`; ignores the length.
    LowerBound { m: u32 },
}

fn symbol(alphabet: u8, k: u8) -> u8 {
    if alphabet <= 26 {
        b'a' + k
    } else {
        k + 1
    }
}

pub fn random_text(seed: u64, len: usize, alphabet: u8) -> Result<Vec<u8>> {
    if alphabet == 0 {
        return Err(Error::Config("alphabet must not be empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..len).map(|_| symbol(alphabet, rng.gen_range(0..alphabet))).collect())
}

/// Repetitive text built from a short random prefix by appending copies of
/// earlier stretches. At each copied character an edit starts with
/// probability `edit_per_mille / 1000`; an edit overwrites the next 1 to 16
/// characters with fresh random ones.
pub fn repetitive_text(seed: u64, len: usize, edit_per_mille: u16) -> Result<Vec<u8>> {
    if edit_per_mille > 1000 {
        return Err(Error::Config("edit rate must be at most 1000 per mille".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet = 4u8;
    let mut t = Vec::with_capacity(len);
    let prefix = len.min(1024);
    t.extend((0..prefix).map(|_| symbol(alphabet, rng.gen_range(0..alphabet))));
    let p = edit_per_mille as f64 / 1000.0;
    while t.len() < len {
        let copy = rng.gen_range(16..=8192).min(len - t.len());
        let from = rng.gen_range(0..t.len());
        let period = t.len() - from;
        let mut k = 0;
        while k < copy {
            if p > 0.0 && rng.gen_bool(p) {
                let run = rng.gen_range(1..=16).min(copy - k);
                t.extend((0..run).map(|_| symbol(alphabet, rng.gen_range(0..alphabet))));
                k += run;
            } else {
                t.push(t[from + k % period]);
                k += 1;
            }
        }
    }
    Ok(t)
}

pub fn generate(kind: CorpusKind, seed: u64, len: usize) -> Result<Vec<u8>> {
    match kind {
        CorpusKind::Random { alphabet } => random_text(seed, len, alphabet),
        CorpusKind::Repetitive { edit_per_mille } => repetitive_text(seed, len, edit_per_mille),
        CorpusKind::LowerBound { m } => Ok(lower_bound_text(m)?.content().to_vec()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_nul_free() {
        for kind in [
            CorpusKind::Random { alphabet: 2 },
            CorpusKind::Random { alphabet: 255 },
            CorpusKind::Repetitive { edit_per_mille: 5 },
        ] {
            let a = generate(kind, 9, 5000).unwrap();
            assert_eq!(a, generate(kind, 9, 5000).unwrap());
            assert_eq!(a.len(), 5000);
            assert!(!a.contains(&0));
        }
        assert_eq!(generate(CorpusKind::LowerBound { m: 10 }, 0, 0).unwrap().len(), 100);
    }

    #[test]
    fn alphabet_is_respected() {
        let t = random_text(1, 2000, 3).unwrap();
        assert!(t.iter().all(|c| (b'a'..b'd').contains(c)));
        assert!(random_text(1, 10, 0).is_err());
    }
}
