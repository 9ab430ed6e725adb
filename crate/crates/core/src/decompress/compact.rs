//! Chain compaction: every reference whose source lies inside another
//! reference is redirected so that it points straight into the first factor
//! up its containment chain that has no single container.

use serde::Serialize;

use super::graph::{build_dep_streams, chain_lengths, containment_parents};
use crate::error::{Error, Result};
use crate::factors::{Factor, Factorization};
use crate::streamkit::{
    scan_zip, sort_stream, IoStats, MemoryBudget, Side, SpillingPriorityQueue, StreamWriter, TupleStream,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CompactStats {
    /// References whose source changed.
    pub rewritten: u64,
    /// References wholly contained in one other factor.
    pub contained: u64,
    /// Longest containment chain before compaction.
    pub max_chain_before: u64,
    /// Pointer-doubling rounds of the depth computation (external variant).
    pub ranking_rounds: u64,
    pub io: IoStats,
}

/// In-memory compaction by memoized walks up the containment forest.
pub fn compact_im(f: &Factorization) -> Result<(Factorization, CompactStats)> {
    let parent = containment_parents(f)?;
    let chain = chain_lengths(&parent)?;
    let mut order: Vec<usize> = (0..parent.len()).filter(|&i| chain[i] >= 2).collect();
    order.sort_by_key(|&i| chain[i]);

    let mut out = f.clone();
    let mut stats = CompactStats {
        contained: parent.iter().filter(|p| p.is_some()).count() as u64,
        max_chain_before: chain.iter().copied().max().unwrap_or(0),
        ..Default::default()
    };
    // Parents have shorter chains, so they are final when a child is visited.
    for i in order {
        let p = parent[i].unwrap();
        let (Factor::Ref(pr), Factor::Ref(cr)) = (&out.factors[p], &f.factors[i]) else {
            return Err(Error::Logic(format!("factor {i} with chain >= 2 has a literal parent")));
        };
        let src = pr.src + (cr.src - pr.dst);
        if let Factor::Ref(r) = &mut out.factors[i] {
            stats.rewritten += (r.src != src) as u64;
            r.src = src;
        }
    }
    Ok((out, stats))
}

const NIL: u64 = u64::MAX;

/// Suffix sums over a linked list given as `(id, succ, weight)` records
/// sorted by id, by repeated pointer doubling. Weights use wrapping
/// arithmetic so negative steps can be encoded.
fn rank_list(arcs: TupleStream<(u64, u64, u64)>, budget: &MemoryBudget) -> Result<(TupleStream<(u64, u64, u64)>, u64)> {
    let mut arcs = arcs;
    let mut rounds = 0;
    let limit = 2 + 64 - arcs.len().leading_zeros() as u64;
    loop {
        if rounds > limit {
            return Err(Error::Cycle("containment relation has a cycle".into()));
        }
        let mut linked = StreamWriter::new(budget);
        for a in arcs.iter()? {
            let a = a?;
            if a.1 != NIL {
                linked.push(a)?;
            }
        }
        if linked.is_empty() {
            return Ok((arcs, rounds));
        }
        let by_succ = sort_stream(&linked.finish()?, |a| a.1, budget)?;
        let mut next = StreamWriter::new(budget);
        let mut zip = scan_zip(&arcs, &by_succ, |a| a.0, |a| a.1)?;
        let mut last: Option<(u64, u64, u64)> = None;
        while let Some(item) = zip.next_item()? {
            match item {
                Side::Left(a) => {
                    if a.1 == NIL {
                        next.push(a)?;
                    }
                    last = Some(a);
                }
                Side::Right(a) => {
                    let s = last.filter(|s| s.0 == a.1).ok_or_else(|| {
                        Error::Logic(format!("successor {} of arc {} is missing", a.1, a.0))
                    })?;
                    next.push((a.0, s.1, a.2.wrapping_add(s.2)))?;
                }
            }
        }
        arcs = sort_stream(&next.finish()?, |a| a.0, budget)?;
        rounds += 1;
    }
}

/// Depth of every node below a virtual root, from `(parent, child)` edges.
/// Node ids are `0..root`; `root` is the virtual root. Returns `(id, depth)`
/// sorted by id.
fn tree_depths(
    edges_by_parent: &TupleStream<(u64, u64)>,
    root: u64,
    budget: &MemoryBudget,
) -> Result<(TupleStream<(u64, u64)>, u64)> {
    // First child per parent and (child, parent, next sibling) per child.
    let mut first_child = StreamWriter::new(budget);
    let mut siblings = StreamWriter::new(budget);
    let mut it = edges_by_parent.iter()?.peekable();
    let mut prev_parent = NIL;
    while let Some(e) = it.next() {
        let (p, c) = e?;
        let next = match it.peek() {
            Some(Ok((q, d))) if *q == p => *d,
            Some(Err(_)) => return Err(it.next().unwrap().unwrap_err()),
            _ => NIL,
        };
        siblings.push((c, p, next))?;
        if p != prev_parent {
            first_child.push((p, c))?;
            prev_parent = p;
        }
    }
    let first_child = first_child.finish()?;
    let siblings = sort_stream(&siblings.finish()?, |s| s.0, budget)?;

    // Arc 2u enters u, arc 2u+1 leaves it.
    let mut arcs = StreamWriter::new(budget);
    let mut fc = first_child.cursor()?;
    let mut start = NIL;
    for s in siblings.iter()? {
        let (u, p, next) = s?;
        while fc.peek().is_some_and(|x| x.0 < u) {
            fc.advance()?;
        }
        let down_succ = match fc.peek() {
            Some(&(q, c)) if q == u => 2 * c,
            _ => 2 * u + 1,
        };
        let up_succ = if next != NIL {
            2 * next
        } else if p == root {
            NIL
        } else {
            2 * p + 1
        };
        arcs.push((2 * u, down_succ, 1u64))?;
        arcs.push((2 * u + 1, up_succ, u64::MAX))?;
    }
    while let Some(x) = fc.advance()? {
        if x.0 == root {
            start = 2 * x.1;
        }
    }
    let arcs = arcs.finish()?;
    if arcs.is_empty() {
        return Ok((TupleStream::empty(budget), 0));
    }
    if start == NIL {
        return Err(Error::Logic("virtual root has no children".into()));
    }
    let (ranked, rounds) = rank_list(arcs, budget)?;
    let mut depths = StreamWriter::new(budget);
    for a in ranked.iter()? {
        let (id, _, rank) = a?;
        if id % 2 == 0 {
            // Suffix sum from the entering arc is 1 - depth.
            depths.push((id / 2, 1u64.wrapping_sub(rank)))?;
        }
    }
    Ok((depths.finish()?, rounds))
}

/// External-memory compaction with sorts, scans, list ranking and a
/// priority queue. Produces the same coding as [`compact_im`].
pub fn compact_em(f: &Factorization, budget: &MemoryBudget) -> Result<(Factorization, CompactStats)> {
    f.validate()?;
    let io0 = budget.io_stats();
    let b = f.factors.len() as u64;
    let root = b;
    let deps = build_dep_streams(f, budget)?;
    let mut stats = CompactStats::default();

    // Parent of every factor: the containing factor or the virtual root.
    let mut edges = StreamWriter::new(budget);
    {
        let mut zip = scan_zip(&deps.factors, &deps.requests, |x| x.0, |r| r.0)?;
        let mut cur: Option<(u64, u64, u64, u8)> = None;
        while let Some(item) = zip.next_item()? {
            match item {
                Side::Left(fac) => {
                    if fac.3 == 0 {
                        edges.push((root, fac.2))?;
                    }
                    cur = Some(fac);
                }
                Side::Right((src, len, id)) => {
                    let c = cur.ok_or_else(|| Error::Logic(format!("no factor covers source {src}")))?;
                    if src + len <= c.0 + c.1 && c.2 != id {
                        edges.push((c.2, id))?;
                        stats.contained += 1;
                    } else {
                        edges.push((root, id))?;
                    }
                }
            }
        }
    }
    let edges = sort_stream(&edges.finish()?, |e| *e, budget)?;
    let (depths, rounds) = tree_depths(&edges, root, budget)?;
    stats.ranking_rounds = rounds;

    // References at depth >= 2 are the contained ones below another
    // reference or literal; only they can change or forward a change.
    let mut nodes = StreamWriter::new(budget);
    {
        let mut d = depths.cursor()?;
        for (id, fac) in f.factors.iter().enumerate() {
            let id = id as u64;
            let depth = match d.advance()? {
                Some((i, depth)) if i == id => depth,
                _ => return Err(Error::Logic(format!("factor {id} has no depth"))),
            };
            stats.max_chain_before = stats.max_chain_before.max(depth.saturating_sub(1));
            if let (Factor::Ref(r), true) = (fac, depth >= 2) {
                nodes.push((depth, id, r.src, r.dst))?;
            }
        }
    }
    let nodes = sort_stream(&nodes.finish()?, |x| (x.0, x.1), budget)?;

    let mut fwd = StreamWriter::new(budget);
    {
        let mut zip = scan_zip(&depths, &edges, |d| d.0, |e| e.0)?;
        let mut last: Option<(u64, u64)> = None;
        while let Some(item) = zip.next_item()? {
            match item {
                Side::Left(d) => last = Some(d),
                Side::Right((p, c)) => {
                    if p == root {
                        continue;
                    }
                    match last {
                        Some((i, depth)) if i == p => {
                            if depth >= 2 {
                                fwd.push((depth, p, c))?;
                            }
                        }
                        _ => return Err(Error::Logic(format!("parent {p} has no depth"))),
                    }
                }
            }
        }
    }
    let fwd = sort_stream(&fwd.finish()?, |x| (x.0, x.1), budget)?;

    // Layer by layer: apply the message from the parent, then forward the
    // final source to the children.
    let mut pq = SpillingPriorityQueue::new(budget, |m: &(u64, u64, u64, u64)| (m.0, m.1));
    let mut updates = StreamWriter::new(budget);
    let mut fc = fwd.cursor()?;
    for node in nodes.iter()? {
        let (depth, id, mut src, dst) = node?;
        if pq.peek_key() == Some((depth, id)) {
            let (_, _, psrc, pdst) = pq.pop()?.unwrap();
            src = psrc + (src - pdst);
            updates.push((id, src))?;
        }
        while let Some(&(d, p, c)) = fc.peek() {
            if (d, p) != (depth, id) {
                break;
            }
            pq.push((depth + 1, c, src, dst))?;
            fc.advance()?;
        }
    }
    if !pq.is_empty() {
        return Err(Error::Logic("undelivered compaction messages".into()));
    }
    let updates = sort_stream(&updates.finish()?, |u| u.0, budget)?;

    let mut out = f.clone();
    for u in updates.iter()? {
        let (id, src) = u?;
        if let Factor::Ref(r) = &mut out.factors[id as usize] {
            stats.rewritten += (r.src != src) as u64;
            r.src = src;
        }
    }
    stats.io = budget.io_stats().since(&io0);
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompress::graph::graph_stats;
    use crate::decompress::oracle::decompress_oracle;
    use crate::decompress::random::random_bidirectional_coding;
    use crate::decompress::tests_support::six_factor_fixture;
    use crate::factors::Reference;

    #[test]
    fn six_factor_fixture_compacts_one_chain() {
        let f = six_factor_fixture();
        let (g, st) = compact_im(&f).unwrap();
        assert_eq!(st.rewritten, 1);
        assert_eq!(g.factors[2], Factor::Ref(Reference::new(5, 11, 2)));
        assert_eq!(g.factors[0], f.factors[0]);
        assert_eq!(graph_stats(&g).unwrap().max_chain, 1);
        assert_eq!(decompress_oracle(&g).unwrap(), decompress_oracle(&f).unwrap());
        let (h, est) = compact_em(&f, &MemoryBudget::unbounded()).unwrap();
        assert_eq!(h, g);
        assert_eq!(est.rewritten, 1);
        assert_eq!(est.max_chain_before, 2);
    }

    #[test]
    fn em_matches_im_on_random_codings() {
        let budget = MemoryBudget::unbounded();
        for seed in 0..60 {
            let f = random_bidirectional_coding(seed, 300, 12).unwrap();
            let (g, si) = compact_im(&f).unwrap();
            let (h, se) = compact_em(&f, &budget).unwrap();
            assert_eq!(g, h, "seed {seed}");
            assert_eq!(si.rewritten, se.rewritten);
            assert_eq!(si.max_chain_before, se.max_chain_before, "seed {seed}");
            assert_eq!(decompress_oracle(&g).unwrap(), decompress_oracle(&f).unwrap());
            let before = graph_stats(&f).unwrap();
            let after = graph_stats(&g).unwrap();
            assert!(after.max_chain <= 1);
            assert!(after.depth <= before.depth);
        }
    }

    #[test]
    fn list_ranking_on_a_path() {
        let budget = MemoryBudget::unbounded();
        // 0 -> 3 -> 1 -> 2, weights 1.
        let arcs = TupleStream::from_items(&budget, [(0, 3, 1), (1, 2, 1), (2, NIL, 1), (3, 1, 1)]).unwrap();
        let (r, rounds) = rank_list(arcs, &budget).unwrap();
        let v: Vec<_> = r.to_vec().unwrap().iter().map(|a| a.2).collect();
        assert_eq!(v, vec![4, 2, 1, 3]);
        assert_eq!(rounds, 2);
    }
}
