use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::budget::MemoryBudget;
use super::record::Record;
use super::sort::merge_cursors;
use super::stream::{StreamCursor, StreamWriter};
use crate::error::Result;

struct HeapEntry<K, T> {
    key: K,
    seq: u64,
    item: T,
}

impl<K: Ord, T> PartialEq for HeapEntry<K, T> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.seq == other.seq
    }
}

impl<K: Ord, T> Eq for HeapEntry<K, T> {}

impl<K: Ord, T> PartialOrd for HeapEntry<K, T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K: Ord, T> Ord for HeapEntry<K, T> {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.key, self.seq).cmp(&(&other.key, other.seq))
    }
}

/// Min-priority queue that keeps a bounded in-core heap and moves overflow
/// to sorted runs on disk. Items with equal keys pop in insertion order.
pub struct SpillingPriorityQueue<T: Record, K, F> {
    budget: MemoryBudget,
    key: F,
    heap: BinaryHeap<Reverse<HeapEntry<K, T>>>,
    heap_limit: usize,
    seq: u64,
    // Runs in creation order; every item in run i was pushed before every
    // item in run i + 1 and before everything currently in the heap.
    runs: Vec<StreamCursor<T>>,
    len: u64,
}

impl<T, K, F> SpillingPriorityQueue<T, K, F>
where
    T: Record,
    K: Ord + Copy,
    F: Fn(&T) -> K,
{
    pub fn new(budget: &MemoryBudget, key: F) -> Self {
        let heap_limit = if budget.is_unbounded() {
            usize::MAX
        } else {
            (budget.stream_buffer_bytes() / (T::WIDTH + 16)).max(16)
        };
        Self {
            budget: budget.clone(),
            key,
            heap: BinaryHeap::new(),
            heap_limit,
            seq: 0,
            runs: Vec::new(),
            len: 0,
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spilled_runs(&self) -> usize {
        self.runs.len()
    }

    pub fn push(&mut self, item: T) -> Result<()> {
        let key = (self.key)(&item);
        self.heap.push(Reverse(HeapEntry {
            key,
            seq: self.seq,
            item,
        }));
        self.seq += 1;
        self.len += 1;
        if self.heap.len() >= self.heap_limit {
            self.spill_heap()?;
        }
        Ok(())
    }

    fn spill_heap(&mut self) -> Result<()> {
        let mut w = StreamWriter::new(&self.budget);
        while let Some(Reverse(e)) = self.heap.pop() {
            w.push(e.item)?;
        }
        self.runs.push(w.finish()?.cursor()?);
        if self.runs.len() > self.budget.merge_fan_in() {
            let runs = std::mem::take(&mut self.runs);
            let merged = merge_cursors(runs, &self.key, &self.budget)?;
            self.runs.push(merged.cursor()?);
        }
        Ok(())
    }

    /// Index of the run holding the smallest head, ties to the oldest run.
    fn best_run(&self) -> Option<(usize, K)> {
        let mut best: Option<(usize, K)> = None;
        for (i, r) in self.runs.iter().enumerate() {
            if let Some(head) = r.peek() {
                let k = (self.key)(head);
                if best.map_or(true, |(_, bk)| k < bk) {
                    best = Some((i, k));
                }
            }
        }
        best
    }

    pub fn peek_key(&self) -> Option<K> {
        let heap_key = self.heap.peek().map(|Reverse(e)| e.key);
        match (self.best_run(), heap_key) {
            (Some((_, rk)), Some(hk)) => Some(rk.min(hk)),
            (Some((_, rk)), None) => Some(rk),
            (None, hk) => hk,
        }
    }

    pub fn pop(&mut self) -> Result<Option<T>> {
        let heap_key = self.heap.peek().map(|Reverse(e)| e.key);
        let from_run = match (self.best_run(), heap_key) {
            (Some((i, rk)), Some(hk)) => (rk <= hk).then_some(i),
            (Some((i, _)), None) => Some(i),
            (None, _) => None,
        };
        let item = match from_run {
            Some(i) => {
                let item = self.runs[i].advance()?;
                if self.runs[i].peek().is_none() {
                    self.runs.remove(i);
                }
                item
            }
            None => self.heap.pop().map(|Reverse(e)| e.item),
        };
        if item.is_some() {
            self.len -= 1;
        }
        Ok(item)
    }
}
