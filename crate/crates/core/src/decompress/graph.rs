use serde::Serialize;

use crate::error::{Error, Result};
use crate::factors::{Factor, Factorization};
use crate::streamkit::{sort_stream, MemoryBudget, StreamWriter, TupleStream};

/// Factor records `(dst, len, id, is_ref)` in text order, literals included.
pub type FactorRecord = (u64, u64, u64, u8);
/// Request records `(src, len, id)`, one per reference.
pub type RequestRecord = (u64, u64, u64);

/// The two inputs of the dependency-graph construction: every factor sorted
/// by destination and every reference sorted by source. `id` is the factor's
/// index in text order.
pub struct DepStreams {
    pub factors: TupleStream<FactorRecord>,
    pub requests: TupleStream<RequestRecord>,
}

pub fn build_dep_streams(f: &Factorization, budget: &MemoryBudget) -> Result<DepStreams> {
    let mut fw = StreamWriter::new(budget);
    let mut rw = StreamWriter::new(budget);
    for (id, fac) in f.factors.iter().enumerate() {
        let id = id as u64;
        match fac {
            Factor::Literal { dst, bytes } => fw.push((*dst, bytes.len() as u64, id, 0u8))?,
            Factor::Ref(r) => {
                fw.push((r.dst, r.len, id, 1u8))?;
                rw.push((r.src, r.len, id))?;
            }
        }
    }
    let requests = sort_stream(&rw.finish()?, |r| r.0, budget)?;
    Ok(DepStreams {
        factors: fw.finish()?,
        requests,
    })
}

/// How a reference relates to the factors its source span touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Coverage {
    /// First and last factor index touched by the source span.
    pub first: usize,
    pub last: usize,
}

impl Coverage {
    /// Out-degree in the dependency graph (self-loops excluded).
    pub fn out_degree(&self, id: usize) -> usize {
        let span = self.last - self.first + 1;
        if (self.first..=self.last).contains(&id) {
            span - 1
        } else {
            span
        }
    }

    pub fn self_overlapping(&self, id: usize) -> bool {
        (self.first..=self.last).contains(&id)
    }

    /// The single other factor containing the whole source span, if any.
    pub fn container(&self, id: usize) -> Option<usize> {
        (self.first == self.last && self.first != id).then_some(self.first)
    }
}

pub(crate) fn coverages(f: &Factorization) -> Result<Vec<Option<Coverage>>> {
    f.validate()?;
    let starts: Vec<u64> = f.factors.iter().map(|x| x.dst()).collect();
    let find = |p: u64| starts.partition_point(|&s| s <= p) - 1;
    Ok(f
        .factors
        .iter()
        .map(|fac| match fac {
            Factor::Ref(r) => Some(Coverage {
                first: find(r.src),
                last: find(r.src + r.len - 1),
            }),
            Factor::Literal { .. } => None,
        })
        .collect())
}

/// Parent of every factor in the compaction forest: the factor that wholly
/// contains a reference's source, or `None` for literals and for references
/// whose source spans several factors or touches themselves.
pub(crate) fn containment_parents(f: &Factorization) -> Result<Vec<Option<usize>>> {
    Ok(coverages(f)?
        .iter()
        .enumerate()
        .map(|(i, c)| c.and_then(|c| c.container(i)))
        .collect())
}

/// Number of containment hops from each factor up to a factor without a
/// container that is a reference. Literals and roots get 0; a reference whose
/// container is a root gets 1.
pub(crate) fn chain_lengths(parent: &[Option<usize>]) -> Result<Vec<u64>> {
    const UNSET: u64 = u64::MAX;
    const ON_STACK: u64 = u64::MAX - 1;
    let mut chain = vec![UNSET; parent.len()];
    let mut stack = Vec::new();
    for start in 0..parent.len() {
        let mut u = start;
        while chain[u] == UNSET {
            match parent[u] {
                None => chain[u] = 0,
                Some(p) => {
                    chain[u] = ON_STACK;
                    stack.push(u);
                    u = p;
                }
            }
        }
        if chain[u] == ON_STACK {
            return Err(Error::Cycle(format!("factor {u} is contained in its own descendant")));
        }
        while let Some(v) = stack.pop() {
            let p = parent[v].unwrap();
            chain[v] = chain[p] + 1;
        }
    }
    Ok(chain)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DepGraphStats {
    pub nodes: u64,
    pub references: u64,
    pub literals: u64,
    pub edges: u64,
    pub max_out_degree: u64,
    /// References with more than one out-edge.
    pub multi_dependent: u64,
    /// References whose source overlaps their own destination.
    pub self_overlapping: u64,
    /// References whose source lies inside one other factor.
    pub contained: u64,
    /// Largest number of reference hops from a character to a literal.
    pub depth: u64,
    /// Longest chain of containment hops; compaction brings it down to 1.
    pub max_chain: u64,
}

/// Character-level hop counts: 0 for literal positions. Index 0 unused.
pub(crate) fn char_depths(f: &Factorization) -> Result<Vec<u32>> {
    const UNSET: u32 = u32::MAX;
    let src = f.char_sources();
    let n = f.n as usize;
    let mut depth = vec![UNSET; n + 1];
    let mut path = Vec::new();
    for start in 1..=n {
        let mut p = start;
        while depth[p] == UNSET && src[p] != 0 {
            if path.len() > n {
                return Err(Error::Cycle(format!("position {start} never reaches a literal")));
            }
            path.push(p);
            p = src[p] as usize;
        }
        let mut d = if depth[p] == UNSET { 0 } else { depth[p] };
        depth[p] = d;
        while let Some(q) = path.pop() {
            d += 1;
            depth[q] = d;
        }
    }
    Ok(depth)
}

pub fn graph_stats(f: &Factorization) -> Result<DepGraphStats> {
    let cov = coverages(f)?;
    let mut s = DepGraphStats {
        nodes: f.factors.len() as u64,
        ..Default::default()
    };
    for (i, c) in cov.iter().enumerate() {
        let Some(c) = c else {
            s.literals += 1;
            continue;
        };
        s.references += 1;
        let deg = c.out_degree(i) as u64;
        s.edges += deg;
        s.max_out_degree = s.max_out_degree.max(deg);
        s.multi_dependent += (deg > 1) as u64;
        s.self_overlapping += c.self_overlapping(i) as u64;
        s.contained += c.container(i).is_some() as u64;
    }
    let parents: Vec<Option<usize>> = cov.iter().enumerate().map(|(i, c)| c.and_then(|c| c.container(i))).collect();
    s.depth = char_depths(f)?.into_iter().skip(1).max().unwrap_or(0) as u64;
    s.max_chain = chain_lengths(&parents)?.into_iter().max().unwrap_or(0);
    Ok(s)
}
