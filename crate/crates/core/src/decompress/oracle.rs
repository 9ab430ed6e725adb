use crate::error::{Error, Result};
use crate::factors::{Factor, Factorization};

fn fill_literals(f: &Factorization) -> Result<(Vec<u8>, Vec<bool>)> {
    f.validate()?;
    let n = f.n as usize;
    let mut out = vec![0u8; n];
    let mut known = vec![false; n];
    for fac in &f.factors {
        if let Factor::Literal { dst, bytes } = fac {
            let d = *dst as usize - 1;
            out[d..d + bytes.len()].copy_from_slice(bytes);
            known[d..d + bytes.len()].iter_mut().for_each(|k| *k = true);
        }
    }
    Ok((out, known))
}

/// Recovers the text by sweeping over all references, copying every
/// character whose source is already known, until nothing is left. Sweeps
/// alternate direction so chains pointing either way settle quickly.
pub fn decompress_oracle(f: &Factorization) -> Result<Vec<u8>> {
    let (mut out, mut known) = fill_literals(f)?;
    let refs: Vec<_> = f.references().collect();
    let mut missing: u64 = refs.iter().map(|r| r.len).sum();
    let mut forward = true;
    while missing > 0 {
        let mut progress = 0u64;
        let mut step = |r: &crate::factors::Reference, k: u64| {
            let d = (r.dst + k - 1) as usize;
            let s = (r.src + k - 1) as usize;
            if !known[d] && known[s] {
                out[d] = out[s];
                known[d] = true;
                progress += 1;
            }
        };
        if forward {
            for r in &refs {
                for k in 0..r.len {
                    step(r, k);
                }
            }
        } else {
            for r in refs.iter().rev() {
                for k in (0..r.len).rev() {
                    step(r, k);
                }
            }
        }
        if progress == 0 {
            return Err(Error::Cycle(format!("{missing} characters can never be resolved")));
        }
        missing -= progress;
        forward = !forward;
    }
    Ok(out)
}

/// Number of synchronous rounds needed when every round copies exactly the
/// characters whose source was known at the start of the round. Equals the
/// largest number of reference hops from any character to a literal.
pub fn resolution_rounds(f: &Factorization) -> Result<u64> {
    let (_, mut known) = fill_literals(f)?;
    let sources = f.char_sources();
    let mut pending: Vec<usize> = (1..=f.n as usize).filter(|&p| sources[p] != 0).collect();
    let mut rounds = 0;
    while !pending.is_empty() {
        let ready: Vec<usize> = pending
            .iter()
            .copied()
            .filter(|&p| known[sources[p] as usize - 1])
            .collect();
        if ready.is_empty() {
            return Err(Error::Cycle(format!("{} characters can never be resolved", pending.len())));
        }
        for &p in &ready {
            known[p - 1] = true;
        }
        pending.retain(|&p| !known[p - 1]);
        rounds += 1;
    }
    Ok(rounds)
}
