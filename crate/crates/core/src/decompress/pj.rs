//! External-memory decompression by pointer jumping. Every round moves each
//! pending request one hop further along the chain of the piece it lands
//! in, where pieces themselves were advanced in the previous round, so chain
//! lengths halve per round.

use std::collections::VecDeque;
use std::io::{BufWriter, Write};

use serde::Serialize;

use crate::codec::CodedItem;
use crate::error::{DecodeError, Error, Result};
use crate::factors::{Factor, Factorization};
use crate::streamkit::{
    coalesce_owned, sort_owned, IoStats, MemoryBudget, Record, SpillingPriorityQueue, StreamWriter, TupleStream,
};

/// Stored width of positions and lengths. Texts shorter than `u32::MAX` use
/// 32-bit fields, which halves the size of every list.
trait Pos: Record + Ord + std::fmt::Debug {
    fn of(x: u64) -> Self;
    fn get(self) -> u64;
}

impl Pos for u32 {
    fn of(x: u64) -> Self {
        debug_assert!(x <= u32::MAX as u64);
        x as u32
    }

    fn get(self) -> u64 {
        self as u64
    }
}

impl Pos for u64 {
    fn of(x: u64) -> Self {
        x
    }

    fn get(self) -> u64 {
        self
    }
}

/// Pending copy `(src, dst, len)`.
type Request<P> = (P, P, P);
/// Current knowledge about a reference range `(dst, src, len, level)`.
/// Level 0 means unresolved and `src` is where the range currently copies
/// from. A resolved range keeps only an upper bound on the levels of its
/// copies; the copies themselves live in the resolution list.
type Piece<P> = (P, P, P, u8);
/// Final copy `(level, src, dst, len)`. Level 1 reads literal positions;
/// level `k` reads positions filled at lower levels, so the text can be
/// filled one level at a time.
type Resolution<P> = (u8, P, P, P);
/// Known state of a text position: `(byte, known)`.
type Cell = (u8, u8);

fn req<P: Pos>(s: u64, d: u64, l: u64) -> Request<P> {
    (P::of(s), P::of(d), P::of(l))
}

fn piece<P: Pos>(d: u64, s: u64, l: u64, level: u8) -> Piece<P> {
    (P::of(d), P::of(s), P::of(l), level)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PjRound {
    pub round: u64,
    pub requests: u64,
    pub pieces: u64,
    pub finalized: u64,
    pub jumps: u64,
    pub splits: u64,
    pub pq_peak: u64,
    pub pq_spilled_runs: u64,
    pub io: IoStats,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PjStats {
    pub n: u64,
    pub references: u64,
    pub rounds: Vec<PjRound>,
    pub resolutions: u64,
    pub fill_passes: u64,
    pub io_setup: IoStats,
    pub io_finalize: IoStats,
    pub io_total: IoStats,
}

impl PjStats {
    pub fn round_count(&self) -> u64 {
        self.rounds.len() as u64
    }

    /// Rounds in which at least one request jumped.
    pub fn jump_rounds(&self) -> u64 {
        self.rounds.iter().filter(|r| r.jumps > 0).count() as u64
    }
}

/// Upper bound on rounds for a cycle-free coding of length `n`.
pub fn round_limit(n: u64) -> u64 {
    ceil_log2(n.max(1)) + 2
}

pub(crate) fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// Decompresses a coding read item by item in text order and writes the `n`
/// recovered characters to `out`.
pub fn decompress_pj_stream<I, W>(n: u64, items: I, budget: &MemoryBudget, out: W) -> Result<PjStats>
where
    I: IntoIterator<Item = Result<CodedItem>>,
    W: Write,
{
    if n < u32::MAX as u64 {
        run::<u32, _, _>(n, items, budget, out)
    } else {
        run::<u64, _, _>(n, items, budget, out)
    }
}

fn run<P, I, W>(n: u64, items: I, budget: &MemoryBudget, out: W) -> Result<PjStats>
where
    P: Pos,
    I: IntoIterator<Item = Result<CodedItem>>,
    W: Write,
{
    let io0 = budget.io_stats();
    let mut stats = PjStats {
        n,
        ..Default::default()
    };

    // Literal characters known, reference positions unknown; one request and
    // one unresolved piece per reference.
    let mut cells = StreamWriter::<Cell>::new(budget);
    let mut requests = StreamWriter::<Request<P>>::new(budget);
    let mut pieces = StreamWriter::<Piece<P>>::new(budget);
    let mut pos = 1u64;
    for item in items {
        let (dst, len) = match item? {
            CodedItem::Literal { dst, bytes } => {
                cells.extend(bytes.iter().map(|&b| (b, 1)))?;
                (dst, bytes.len() as u64)
            }
            CodedItem::Ref(r) => {
                if r.len == 0 {
                    return Err(DecodeError::ZeroLength { dst: r.dst }.into());
                }
                if r.src == 0 || r.src.checked_add(r.len - 1).map_or(true, |e| e > n) {
                    return Err(DecodeError::OutOfBounds {
                        src: r.src,
                        len: r.len,
                        n,
                    }
                    .into());
                }
                cells.extend(std::iter::repeat((0u8, 0u8)).take(r.len as usize))?;
                requests.push(req(r.src, r.dst, r.len))?;
                pieces.push(piece(r.dst, r.src, r.len, 0))?;
                stats.references += 1;
                (r.dst, r.len)
            }
        };
        if dst != pos {
            return Err(Error::Logic(format!("factor at {dst} does not follow position {}", pos - 1)));
        }
        pos += len;
    }
    if pos - 1 != n {
        return Err(DecodeError::LengthMismatch {
            expected: n,
            actual: pos - 1,
        }
        .into());
    }
    let cells = cells.finish()?;
    let mut pieces = pieces.finish()?;
    let mut req = sort_owned(requests.finish()?, |r| r.0, budget)?;
    let io1 = budget.io_stats();
    stats.io_setup = io1.since(&io0);

    let limit = round_limit(n);
    let mut res = StreamWriter::<Resolution<P>>::new(budget);
    while !req.is_empty() {
        if stats.round_count() >= limit {
            return Err(Error::Cycle(format!(
                "{} requests still pending after {limit} rounds",
                req.len()
            )));
        }
        let r0 = budget.io_stats();
        let mut round = PjRound {
            round: stats.round_count() + 1,
            requests: req.len(),
            pieces: pieces.len(),
            ..Default::default()
        };
        (req, pieces) = pj_round(req, pieces, &mut res, budget, &mut round)?;
        round.io = budget.io_stats().since(&r0);
        stats.rounds.push(round);
    }
    if let Some(p) = pieces.iter()?.find(|p| p.as_ref().map_or(true, |p| p.3 == 0)) {
        return Err(Error::Logic(format!("piece {:?} is unresolved after the last round", p?)));
    }
    drop(pieces);

    let f0 = budget.io_stats();
    let res = res.finish()?;
    stats.resolutions = res.len();
    stats.fill_passes = finalize(cells, res, budget, out)?;
    let end = budget.io_stats();
    stats.io_finalize = end.since(&f0);
    stats.io_total = end.since(&io0);
    Ok(stats)
}

/// Appends a copy to the resolution list, merging it into the previous one
/// when both continue each other, and cutting it into block-sized chunks.
struct ResolutionWriter<'a, P: Pos> {
    out: &'a mut StreamWriter<Resolution<P>>,
    open: Option<(u8, u64, u64, u64)>,
    chunk: u64,
}

impl<P: Pos> ResolutionWriter<'_, P> {
    fn push(&mut self, r: (u8, u64, u64, u64)) -> Result<()> {
        if let Some(o) = &mut self.open {
            if o.0 == r.0 && o.1 + o.3 == r.1 && o.2 + o.3 == r.2 && o.3 + r.3 <= self.chunk {
                o.3 += r.3;
                return Ok(());
            }
        }
        self.flush()?;
        let (level, mut s, mut d, mut l) = r;
        while l > self.chunk {
            self.out.push((level, P::of(s), P::of(d), P::of(self.chunk)))?;
            s += self.chunk;
            d += self.chunk;
            l -= self.chunk;
        }
        self.open = Some((level, s, d, l));
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        if let Some((level, s, d, l)) = self.open.take() {
            self.out.push((level, P::of(s), P::of(d), P::of(l)))?;
        }
        Ok(())
    }
}

fn pj_round<P: Pos>(
    requests: TupleStream<Request<P>>,
    pieces: TupleStream<Piece<P>>,
    res: &mut StreamWriter<Resolution<P>>,
    budget: &MemoryBudget,
    round: &mut PjRound,
) -> Result<(TupleStream<Request<P>>, TupleStream<Piece<P>>)> {
    let mut pq = SpillingPriorityQueue::new(budget, |r: &Request<P>| r.0);
    let mut rc = requests.cursor()?;
    let mut pc = pieces.cursor()?;
    let mut next_req = StreamWriter::new(budget);
    // Pieces produced this round, followed by the resolved pieces that stay.
    let mut next_pieces = StreamWriter::new(budget);
    let mut rw = ResolutionWriter {
        out: res,
        open: None,
        chunk: budget.block_size() as u64,
    };
    let mut finalize = |s: u64, d: u64, l: u64, level: u8, next_pieces: &mut StreamWriter<Piece<P>>| -> Result<()> {
        rw.push((level, s, d, l))?;
        next_pieces.push(piece(d, 0, l, level))?;
        round.finalized += 1;
        Ok(())
    };
    let mut jumps = 0;
    let mut splits = 0;
    let mut pq_peak = 0;
    loop {
        let from_list = match (rc.peek(), pq.peek_key()) {
            (None, None) => break,
            (Some(a), Some(k)) => a.0 <= k,
            (Some(_), None) => true,
            (None, Some(_)) => false,
        };
        let (s, d, l) = if from_list { rc.advance()? } else { pq.pop()? }.expect("peeked");
        let (s, d, l) = (s.get(), d.get(), l.get());
        while pc.peek().is_some_and(|p| p.0.get() + p.2.get() <= s) {
            pc.advance()?;
        }
        match pc.peek().map(|p| (p.0.get(), p.1.get(), p.2.get(), p.3)) {
            None => finalize(s, d, l, 1, &mut next_pieces)?,
            Some(p) if s + l <= p.0 => finalize(s, d, l, 1, &mut next_pieces)?,
            Some(p) if s < p.0 => {
                let k = p.0 - s;
                finalize(s, d, k, 1, &mut next_pieces)?;
                pq.push(req(p.0, d + k, l - k))?;
                splits += 1;
                pq_peak = pq_peak.max(pq.len());
            }
            Some(p) => {
                let take = l.min(p.0 + p.2 - s);
                if p.3 > 0 {
                    // Copy from the resolved range itself; it is filled one
                    // level earlier.
                    let level = p.3.checked_add(1).ok_or_else(|| Error::Logic("resolution level overflow".into()))?;
                    finalize(s, d, take, level, &mut next_pieces)?;
                } else {
                    let mapped = p.1 + (s - p.0);
                    next_req.push(req(mapped, d, take))?;
                    next_pieces.push(piece(d, mapped, take, 0))?;
                    jumps += 1;
                }
                if take < l {
                    pq.push(req(s + take, d + take, l - take))?;
                    splits += 1;
                    pq_peak = pq_peak.max(pq.len());
                }
            }
        }
    }
    drop(finalize);
    rw.flush()?;
    drop((rc, requests, pc));
    round.jumps = jumps;
    round.splits = splits;
    round.pq_peak = pq_peak;
    round.pq_spilled_runs = pq.spilled_runs() as u64;
    drop(pq);

    for p in pieces.iter()? {
        let p = p?;
        if p.3 > 0 {
            next_pieces.push(p)?;
        }
    }
    drop(pieces);
    let sorted = sort_owned(next_pieces.finish()?, |p| p.0, budget)?;
    // Resolved neighbours become one range at the higher level, which still
    // orders every copy after its source. Unresolved neighbours merge only
    // when they continue each other's source.
    let merged = coalesce_owned(
        sorted,
        |o, p| {
            let (od, os, ol) = (o.0.get(), o.1.get(), o.2.get());
            let joins = od + ol == p.0.get()
                && (o.3 > 0 && p.3 > 0 || o.3 == 0 && p.3 == 0 && os + ol == p.1.get());
            if joins {
                o.2 = P::of(ol + p.2.get());
                o.3 = o.3.max(p.3);
            }
            joins
        },
        budget,
    )?;
    let next = sort_owned(next_req.finish()?, |r| r.0, budget)?;
    Ok((next, merged))
}

/// Fills reference positions level by level and writes the text. Each pass
/// expands the copies of one level against the cells known so far and merges
/// the placed characters back in. Returns the number of passes.
fn finalize<P: Pos, W: Write>(
    cells: TupleStream<Cell>,
    res: TupleStream<Resolution<P>>,
    budget: &MemoryBudget,
    out: W,
) -> Result<u64> {
    let copies = sort_owned(res, |r| (r.0, r.1), budget)?;
    let mut cells = cells;
    let mut passes = 0;
    let mut cc = copies.cursor()?;
    while let Some(&(level, ..)) = cc.peek() {
        let mut placed = StreamWriter::<(P, u8)>::new(budget);
        {
            let mut text = cells.iter()?;
            let mut window: VecDeque<Cell> = VecDeque::new();
            let mut win_start = 1u64;
            while cc.peek().is_some_and(|c| c.0 == level) {
                let (_, s, d, l) = cc.advance()?.expect("peeked");
                let (s, d, l) = (s.get(), d.get(), l.get());
                while win_start < s {
                    if window.pop_front().is_none() {
                        text.next_item()?;
                    }
                    win_start += 1;
                }
                while (window.len() as u64) < l {
                    let c = text
                        .next_item()?
                        .ok_or_else(|| Error::Logic(format!("copy ({s}, {d}, {l}) runs past the text")))?;
                    window.push_back(c);
                }
                for (k, &(b, known)) in window.iter().take(l as usize).enumerate() {
                    if known == 0 {
                        return Err(Error::Logic(format!(
                            "level {level} copy reads unfilled position {}",
                            s + k as u64
                        )));
                    }
                    placed.push((P::of(d + k as u64), b))?;
                }
            }
        }
        let placed = sort_owned(placed.finish()?, |p| p.0, budget)?;
        let mut next = StreamWriter::<Cell>::new(budget);
        let mut pc = placed.cursor()?;
        for (i, c) in cells.iter()?.enumerate() {
            let (b, known) = c?;
            let pos = i as u64 + 1;
            match pc.peek() {
                Some(&(p, pb)) if p.get() == pos => {
                    if known == 1 {
                        return Err(Error::Logic(format!("position {pos} filled twice")));
                    }
                    pc.advance()?;
                    next.push((pb, 1))?;
                }
                _ => next.push((b, known))?,
            }
        }
        if let Some(p) = pc.peek() {
            return Err(Error::Logic(format!("position {} placed twice or past the text", p.0.get())));
        }
        drop((pc, placed));
        cells = next.finish()?;
        passes += 1;
    }

    let mut w = BufWriter::new(out);
    let mut buf = Vec::with_capacity(64 * 1024);
    for (i, c) in cells.iter()?.enumerate() {
        let (b, known) = c?;
        if known == 0 {
            return Err(Error::Logic(format!("position {} was never filled", i + 1)));
        }
        buf.push(b);
        if buf.len() == buf.capacity() {
            w.write_all(&buf)?;
            buf.clear();
        }
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(passes)
}

pub(crate) fn coded_items(f: &Factorization) -> impl Iterator<Item = Result<CodedItem>> + '_ {
    f.factors.iter().map(|fac| {
        Ok(match fac {
            Factor::Literal { dst, bytes } => CodedItem::Literal {
                dst: *dst,
                bytes: bytes.clone(),
            },
            Factor::Ref(r) => CodedItem::Ref(*r),
        })
    })
}

/// In-memory convenience wrapper around [`decompress_pj_stream`].
pub fn decompress_pj(f: &Factorization, budget: &MemoryBudget) -> Result<(Vec<u8>, PjStats)> {
    let mut out = Vec::with_capacity(f.n as usize);
    let stats = decompress_pj_stream(f.n, coded_items(f), budget, &mut out)?;
    Ok((out, stats))
}
