//! Direct implementation of the greedy scheme on a mutable copy of PLCP.
//! Used as the reference the streaming factorizer is tested against.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{DecodeError, Error, Result};
use crate::factors::{factorization_from_references, Factor, Factorization, Reference};
use crate::text_index::{IndexBundle, Text};

/// Minimum reference length accepted by the factorizers.
pub const MIN_THETA: u64 = 2;

pub fn check_theta(theta: u64) -> Result<()> {
    if theta < MIN_THETA {
        return Err(Error::Config(format!("theta must be at least {MIN_THETA}, got {theta}")));
    }
    Ok(())
}

/// References in the order the scheme selects them: repeatedly the leftmost
/// position of largest current PLCP value, until that value drops below
/// `theta`.
pub fn scheme_references(b: &IndexBundle, theta: u64) -> Vec<Reference> {
    let n = b.len() as usize;
    let mut plcp: Vec<u32> = b.plcp_slice().to_vec();
    let mut removed = vec![false; n];
    let theta32 = theta.min(u32::MAX as u64) as u32;
    // Max-heap on value, then smallest position.
    let mut heap: BinaryHeap<(u32, Reverse<u32>)> = plcp
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= theta32)
        .map(|(i, &v)| (v, Reverse(i as u32)))
        .collect();
    let mut out = Vec::new();
    while let Some((val, Reverse(i))) = heap.pop() {
        let i = i as usize;
        if removed[i] || plcp[i] != val {
            continue;
        }
        if val < theta32 {
            break;
        }
        let dst = i + 1;
        let len = val as usize;
        out.push(Reference::new(dst as u64, b.phi(dst as u64), len as u64));
        // Cap values that would run into the new factor.
        for j in i.saturating_sub(len)..i {
            if !removed[j] && plcp[j] as usize > i - j {
                plcp[j] = (i - j) as u32;
                if plcp[j] >= theta32 {
                    heap.push((plcp[j], Reverse(j as u32)));
                }
            }
        }
        for k in i..i + len {
            removed[k] = true;
            plcp[k] = 0;
        }
    }
    out
}

/// The scheme's factorization in text order with maximal literal runs.
pub fn scheme_factorize(t: &Text, b: &IndexBundle, theta: u64) -> Factorization {
    let refs = scheme_references(b, theta);
    factorization_from_references(t.as_bytes(), theta, &refs)
}

/// True iff resolving every referenced character through its source chain
/// always ends at a literal character.
pub fn verify_cycle_free(f: &Factorization) -> Result<bool> {
    let n = f.n as usize;
    let mut target = vec![0u32; n + 1];
    let mut pos = 1u64;
    for fac in &f.factors {
        if let Factor::Ref(r) = fac {
            if r.src == 0 || r.src + r.len - 1 > f.n || r.dst + r.len - 1 > f.n {
                return Err(DecodeError::OutOfBounds {
                    src: r.src,
                    len: r.len,
                    n: f.n,
                }
                .into());
            }
            for k in 0..r.len {
                target[(r.dst + k) as usize] = (r.src + k) as u32;
            }
        }
        pos += fac.len();
    }
    if pos - 1 != f.n {
        return Err(DecodeError::LengthMismatch {
            expected: f.n,
            actual: pos - 1,
        }
        .into());
    }
    // 0 = unvisited, u32::MAX = resolved, otherwise the walk that touched it.
    const DONE: u32 = u32::MAX;
    let mut mark = vec![0u32; n + 1];
    let mut path = Vec::new();
    for start in 1..=n {
        if mark[start] != 0 {
            continue;
        }
        let epoch = start as u32;
        let mut p = start;
        path.clear();
        loop {
            if target[p] == 0 || mark[p] == DONE {
                break;
            }
            if mark[p] == epoch {
                return Ok(false);
            }
            mark[p] = epoch;
            path.push(p);
            p = target[p] as usize;
        }
        mark[p] = DONE;
        for &q in &path {
            mark[q] = DONE;
        }
    }
    Ok(true)
}
