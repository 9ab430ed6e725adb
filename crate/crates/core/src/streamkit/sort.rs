use super::budget::MemoryBudget;
use super::record::Record;
use super::stream::{StreamCursor, StreamWriter, TupleStream};
use crate::error::{Error, Result};

/// Tournament tree over `k` sources. Internal nodes hold the loser of the
/// match played there; `winner` is the overall minimum. Exhausted sources
/// compare greater than everything, ties go to the lower source index.
pub(crate) struct LoserTree {
    k: usize,
    nodes: Vec<usize>,
    winner: usize,
}

impl LoserTree {
    /// `less(a, b)` must order sources by their current head, with exhausted
    /// sources last. Source indices break ties.
    pub(crate) fn new(k: usize, less: &mut impl FnMut(usize, usize) -> bool) -> Self {
        assert!(k > 0);
        let mut t = Self {
            k,
            nodes: vec![usize::MAX; k],
            winner: 0,
        };
        if k == 1 {
            return t;
        }
        // Build bottom-up: winners of subtrees rooted at internal node i.
        let mut win = vec![usize::MAX; 2 * k];
        for leaf in 0..k {
            win[k + leaf] = leaf;
        }
        for i in (1..k).rev() {
            let (a, b) = (win[2 * i], win[2 * i + 1]);
            if beats(a, b, less) {
                win[i] = a;
                t.nodes[i] = b;
            } else {
                win[i] = b;
                t.nodes[i] = a;
            }
        }
        t.winner = win[1];
        t
    }

    pub(crate) fn winner(&self) -> usize {
        self.winner
    }

    /// Replays the path from the winner's leaf after its head changed.
    pub(crate) fn replay(&mut self, less: &mut impl FnMut(usize, usize) -> bool) {
        if self.k == 1 {
            return;
        }
        let mut cur = self.winner;
        let mut node = (self.k + cur) / 2;
        while node >= 1 {
            let other = self.nodes[node];
            if beats(other, cur, less) {
                self.nodes[node] = cur;
                cur = other;
            }
            node /= 2;
        }
        self.winner = cur;
    }
}

fn beats(a: usize, b: usize, less: &mut impl FnMut(usize, usize) -> bool) -> bool {
    if less(a, b) {
        true
    } else if less(b, a) {
        false
    } else {
        a < b
    }
}

/// External merge sort. Stable: items with equal keys keep their input order.
pub fn sort_stream<T, K, F>(input: &TupleStream<T>, key: F, budget: &MemoryBudget) -> Result<TupleStream<T>>
where
    T: Record,
    K: Ord,
    F: Fn(&T) -> K,
{
    if T::WIDTH > budget.block_size() {
        return Err(Error::Config(format!(
            "record width {} exceeds block size {}",
            T::WIDTH,
            budget.block_size()
        )));
    }
    let run_items = if budget.is_unbounded() {
        usize::MAX
    } else {
        (budget.sort_run_bytes() / T::WIDTH).max(1)
    };

    let mut runs: Vec<TupleStream<T>> = Vec::new();
    let mut buf: Vec<T> = Vec::new();
    let mut reader = input.iter()?;
    loop {
        let item = reader.next_item()?;
        let full = buf.len() >= run_items;
        if item.is_none() && runs.is_empty() {
            buf.sort_by_key(|t| key(t));
            return TupleStream::from_vec(budget, buf);
        }
        if (item.is_none() && !buf.is_empty()) || full {
            buf.sort_by_key(|t| key(t));
            let mut w = StreamWriter::new(budget);
            w.extend(buf.drain(..))?;
            runs.push(w.finish()?);
        }
        match item {
            Some(it) => buf.push(it),
            None => break,
        }
    }

    let fan_in = budget.merge_fan_in();
    while runs.len() > 1 {
        let mut next = Vec::with_capacity(runs.len().div_ceil(fan_in));
        for group in runs.chunks(fan_in) {
            next.push(merge_runs(group, &key, budget)?);
        }
        runs = next;
    }
    Ok(runs.pop().unwrap_or_else(|| TupleStream::empty(budget)))
}

/// Sorts a stream it consumes. An unshared in-core stream is sorted in place
/// without a copy; anything else goes through [`sort_stream`]. Not stable.
pub fn sort_owned<T, K, F>(input: TupleStream<T>, key: F, budget: &MemoryBudget) -> Result<TupleStream<T>>
where
    T: Record,
    K: Ord,
    F: Fn(&T) -> K,
{
    match input.into_core_vec() {
        Ok(mut v) => {
            budget.counters().add_read(v.len() as u64);
            v.sort_unstable_by_key(|t| key(t));
            TupleStream::from_vec(budget, v)
        }
        Err(s) => sort_stream(&s, key, budget),
    }
}

/// Folds each item into its predecessor when `absorb(prev, next)` returns
/// true, consuming the input. Unshared in-core streams are folded in place.
pub fn coalesce_owned<T, F>(input: TupleStream<T>, mut absorb: F, budget: &MemoryBudget) -> Result<TupleStream<T>>
where
    T: Record,
    F: FnMut(&mut T, &T) -> bool,
{
    match input.into_core_vec() {
        Ok(mut v) => {
            budget.counters().add_read(v.len() as u64);
            v.dedup_by(|next, prev| absorb(prev, next));
            v.shrink_to_fit();
            TupleStream::from_vec(budget, v)
        }
        Err(s) => {
            let mut out = StreamWriter::new(budget);
            let mut open: Option<T> = None;
            for item in s.iter()? {
                let item = item?;
                if let Some(o) = &mut open {
                    if absorb(o, &item) {
                        continue;
                    }
                }
                if let Some(o) = open.replace(item) {
                    out.push(o)?;
                }
            }
            if let Some(o) = open {
                out.push(o)?;
            }
            out.finish()
        }
    }
}

/// Merges streams that are each sorted by `key`. Ties go to the earlier
/// stream in `runs`.
pub fn merge_runs<T, K, F>(runs: &[TupleStream<T>], key: &F, budget: &MemoryBudget) -> Result<TupleStream<T>>
where
    T: Record,
    K: Ord,
    F: Fn(&T) -> K,
{
    if runs.len() == 1 {
        return Ok(runs[0].clone());
    }
    let cursors: Vec<StreamCursor<T>> = runs.iter().map(|r| r.cursor()).collect::<Result<_>>()?;
    merge_cursors(cursors, key, budget)
}

/// Drains cursors that are each sorted by `key` into one sorted stream.
pub(crate) fn merge_cursors<T, K, F>(mut cursors: Vec<StreamCursor<T>>, key: &F, budget: &MemoryBudget) -> Result<TupleStream<T>>
where
    T: Record,
    K: Ord,
    F: Fn(&T) -> K,
{
    let mut out = StreamWriter::new(budget);
    if cursors.is_empty() {
        return out.finish();
    }
    let less = |a: usize, b: usize, cursors: &[StreamCursor<T>]| match (cursors[a].peek(), cursors[b].peek()) {
        (Some(x), Some(y)) => key(x) < key(y),
        (Some(_), None) => true,
        _ => false,
    };
    let mut tree = LoserTree::new(cursors.len(), &mut |a, b| less(a, b, &cursors));
    loop {
        let w = tree.winner();
        match cursors[w].advance()? {
            Some(item) => out.push(item)?,
            None => break,
        }
        tree.replay(&mut |a, b| less(a, b, &cursors));
    }
    out.finish()
}
