//! Synthetic bidirectional codings for testing decompressors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::factors::{Factor, Factorization, FactorizationBuilder, FactorSink, Reference};

/// Repetitive text of `n` characters (sentinel included): random seeds
/// extended by copying earlier stretches with occasional mutations.
fn repetitive_text(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    let mut t: Vec<u8> = Vec::with_capacity(n);
    while t.len() + 1 < n {
        if t.len() < 8 || rng.gen_bool(0.1) {
            t.push(b'a' + rng.gen_range(0..4));
        } else {
            let len = rng.gen_range(2..=32).min(n - 1 - t.len());
            let from = rng.gen_range(0..t.len());
            for k in 0..len {
                let c = t[from + k % (t.len() - from)];
                t.push(if rng.gen_bool(0.02) { b'a' + rng.gen_range(0..4) } else { c });
            }
        }
    }
    t.truncate(n.saturating_sub(1));
    t.push(0);
    t
}

/// Cycle-free coding of a random repetitive text whose references may point
/// left or right. Reference lengths are in `2..=max_len`; positions where no
/// safe reference is found become literals.
pub fn random_bidirectional_coding(seed: u64, n: usize, max_len: u64) -> Result<Factorization> {
    if n < 2 || max_len < 2 {
        return Err(Error::Config("need n >= 2 and max_len >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let text = repetitive_text(&mut rng, n);
    let at = |p: u64| text[p as usize - 1];

    // Occurrences of every character pair, 1-based start positions.
    let mut pairs: Vec<Vec<u64>> = vec![Vec::new(); 1 << 16];
    for p in 1..n as u64 {
        pairs[((at(p) as usize) << 8) | at(p + 1) as usize].push(p);
    }

    let mut target = vec![0u64; n + 1];
    let mut refs = Vec::new();
    let mut pos = 1u64;
    let last = n as u64;
    while pos < last {
        let mut placed = false;
        if pos + 1 < last && rng.gen_bool(0.85) {
            let occ = &pairs[((at(pos) as usize) << 8) | at(pos + 1) as usize];
            for _ in 0..8 {
                let src = occ[rng.gen_range(0..occ.len())];
                if src == pos {
                    continue;
                }
                let mut lcp = 0;
                while lcp < max_len && pos + lcp < last && src + lcp <= last && at(pos + lcp) == at(src + lcp) {
                    lcp += 1;
                }
                if lcp < 2 {
                    continue;
                }
                let len = rng.gen_range(2..=lcp);
                if try_place(&mut target, pos, src, len) {
                    refs.push(Reference::new(pos, src, len));
                    pos += len;
                    placed = true;
                    break;
                }
            }
        }
        if !placed {
            pos += 1;
        }
    }
    Ok(crate::factors::factorization_from_references(&text, 1, &refs))
}

/// Sets the character targets of a reference unless that closes a cycle.
fn try_place(target: &mut [u64], dst: u64, src: u64, len: u64) -> bool {
    for k in 0..len {
        target[(dst + k) as usize] = src + k;
    }
    let bound = target.len();
    for k in 0..len {
        let start = dst + k;
        let mut p = target[start as usize];
        let mut steps = 0;
        while p != 0 {
            if p == start || steps > bound {
                for k in 0..len {
                    target[(dst + k) as usize] = 0;
                }
                return false;
            }
            p = target[p as usize];
            steps += 1;
        }
    }
    true
}

/// `depth + 1` equal blocks of `block` characters and a sentinel; block `k`
/// copies block `k + 1` and the last block is literal, so the first block is
/// `depth` hops away from any literal.
pub fn chain_coding(depth: u64, block: u64) -> Result<Factorization> {
    if block == 0 {
        return Err(Error::Config("block length must be positive".into()));
    }
    let n = (depth + 1) * block + 1;
    let mut b = FactorizationBuilder::new(n, block.min(2));
    for k in 0..depth {
        b.reference(Reference::new(k * block + 1, (k + 1) * block + 1, block))?;
    }
    let lit: Vec<u8> = (0..block).map(|i| b'a' + (i % 26) as u8).chain([0]).collect();
    b.begin_literal(depth * block + 1, lit.len() as u64)?;
    b.literal_bytes(&lit)?;
    let f = b.finish();
    f.validate()?;
    debug_assert!(matches!(f.factors.last(), Some(Factor::Literal { .. })));
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompress::oracle::{decompress_oracle, resolution_rounds};
    use crate::scheme::verify_cycle_free;

    #[test]
    fn codings_are_valid_and_bidirectional() {
        let mut left = 0;
        let mut right = 0;
        for seed in 0..20 {
            let f = random_bidirectional_coding(seed, 500, 20).unwrap();
            f.validate().unwrap();
            assert!(verify_cycle_free(&f).unwrap());
            let out = decompress_oracle(&f).unwrap();
            assert_eq!(out.len(), 500);
            assert_eq!(*out.last().unwrap(), 0);
            for r in f.references() {
                if r.src < r.dst {
                    left += 1;
                } else {
                    right += 1;
                }
            }
        }
        assert!(left > 100 && right > 100, "{left} {right}");
    }

    #[test]
    fn chain_depth() {
        let f = chain_coding(8, 3).unwrap();
        assert_eq!(resolution_rounds(&f).unwrap(), 8);
        assert_eq!(f.n, 28);
    }
}
