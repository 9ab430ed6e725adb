use super::record::Record;
use super::stream::{StreamCursor, TupleStream};
use crate::error::{Error, Result};

/// One item of a [`ScanZip`], tagged with the stream it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side<A, B> {
    Left(A),
    Right(B),
}

/// Co-scans two streams that are each sorted by a key, yielding items in
/// merged key order. On equal keys the left item comes first. A stream whose
/// keys go backwards is reported as an internal error.
pub struct ScanZip<A: Record, B: Record, K, FA, FB> {
    left: StreamCursor<A>,
    right: StreamCursor<B>,
    key_a: FA,
    key_b: FB,
    last_a: Option<K>,
    last_b: Option<K>,
}

pub fn scan_zip<A, B, K, FA, FB>(
    left: &TupleStream<A>,
    right: &TupleStream<B>,
    key_a: FA,
    key_b: FB,
) -> Result<ScanZip<A, B, K, FA, FB>>
where
    A: Record,
    B: Record,
    K: Ord + Copy + std::fmt::Debug,
    FA: Fn(&A) -> K,
    FB: Fn(&B) -> K,
{
    Ok(ScanZip {
        left: left.cursor()?,
        right: right.cursor()?,
        key_a,
        key_b,
        last_a: None,
        last_b: None,
    })
}

impl<A, B, K, FA, FB> ScanZip<A, B, K, FA, FB>
where
    A: Record,
    B: Record,
    K: Ord + Copy + std::fmt::Debug,
    FA: Fn(&A) -> K,
    FB: Fn(&B) -> K,
{
    pub fn next_item(&mut self) -> Result<Option<Side<A, B>>> {
        let take_left = match (self.left.peek(), self.right.peek()) {
            (None, None) => return Ok(None),
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => (self.key_a)(a) <= (self.key_b)(b),
        };
        if take_left {
            let a = self.left.advance()?.expect("peeked");
            let k = (self.key_a)(&a);
            check_order(&mut self.last_a, k, "left")?;
            Ok(Some(Side::Left(a)))
        } else {
            let b = self.right.advance()?.expect("peeked");
            let k = (self.key_b)(&b);
            check_order(&mut self.last_b, k, "right")?;
            Ok(Some(Side::Right(b)))
        }
    }
}

fn check_order<K: Ord + Copy + std::fmt::Debug>(last: &mut Option<K>, k: K, which: &str) -> Result<()> {
    if let Some(prev) = *last {
        if k < prev {
            return Err(Error::Logic(format!(
                "{which} stream of zip is not sorted: key {k:?} after {prev:?}"
            )));
        }
    }
    *last = Some(k);
    Ok(())
}

impl<A, B, K, FA, FB> Iterator for ScanZip<A, B, K, FA, FB>
where
    A: Record,
    B: Record,
    K: Ord + Copy + std::fmt::Debug,
    FA: Fn(&A) -> K,
    FB: Fn(&B) -> K,
{
    type Item = Result<Side<A, B>>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_item().transpose()
    }
}
