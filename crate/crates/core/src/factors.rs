//! Factorizations: tilings of a text into literal runs and references.

use serde::Serialize;

use crate::error::{DecodeError, Error, Result};
use crate::streamkit::Record;

/// A referencing factor: `T[dst..dst+len-1]` equals `T[src..src+len-1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Reference {
    pub dst: u64,
    pub src: u64,
    pub len: u64,
}

impl Reference {
    pub fn new(dst: u64, src: u64, len: u64) -> Self {
        Self { dst, src, len }
    }

    /// One past the last destination position.
    pub fn end(&self) -> u64 {
        self.dst + self.len
    }
}

impl Record for Reference {
    const WIDTH: usize = 24;

    fn write_to(&self, out: &mut [u8]) {
        (self.dst, self.src, self.len).write_to(out)
    }

    fn read_from(buf: &[u8]) -> Self {
        let (dst, src, len) = <(u64, u64, u64)>::read_from(buf);
        Self { dst, src, len }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factor {
    Literal { dst: u64, bytes: Vec<u8> },
    Ref(Reference),
}

impl Factor {
    pub fn dst(&self) -> u64 {
        match self {
            Factor::Literal { dst, .. } => *dst,
            Factor::Ref(r) => r.dst,
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            Factor::Literal { bytes, .. } => bytes.len() as u64,
            Factor::Ref(r) => r.len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Factor::Literal { .. })
    }
}

/// Factors in text order. `n` counts the sentinel; `theta` is the minimum
/// reference length the producer used (1 for arbitrary codings).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub theta: u64,
    pub factors: Vec<Factor>,
}

impl Factorization {
    pub fn references(&self) -> impl Iterator<Item = Reference> + '_ {
        self.factors.iter().filter_map(|f| match f {
            Factor::Ref(r) => Some(*r),
            Factor::Literal { .. } => None,
        })
    }

    pub fn reference_count(&self) -> u64 {
        self.references().count() as u64
    }

    pub fn literal_factor_count(&self) -> u64 {
        self.factors.iter().filter(|f| f.is_literal()).count() as u64
    }

    /// Number of text positions covered by literal factors.
    pub fn literal_chars(&self) -> u64 {
        self.factors
            .iter()
            .filter(|f| f.is_literal())
            .map(|f| f.len())
            .sum()
    }

    /// Checks that factors tile `[1..n]` in order, have positive length and
    /// that every reference source lies inside the text.
    pub fn validate(&self) -> Result<()> {
        let mut pos = 1u64;
        for f in &self.factors {
            if f.dst() != pos {
                return Err(Error::Logic(format!(
                    "factor starts at {} but previous factor ended at {}",
                    f.dst(),
                    pos - 1
                )));
            }
            if f.len() == 0 {
                return Err(DecodeError::ZeroLength { dst: pos }.into());
            }
            if let Factor::Ref(r) = f {
                if r.src == 0 || r.src.checked_add(r.len - 1).map_or(true, |e| e > self.n) {
                    return Err(DecodeError::OutOfBounds {
                        src: r.src,
                        len: r.len,
                        n: self.n,
                    }
                    .into());
                }
            }
            pos += f.len();
        }
        if pos - 1 != self.n {
            return Err(DecodeError::LengthMismatch {
                expected: self.n,
                actual: pos - 1,
            }
            .into());
        }
        Ok(())
    }

    /// Per-position source: 0 for literal positions, otherwise the source
    /// position of that character. Index 0 is unused.
    pub fn char_sources(&self) -> Vec<u64> {
        let mut src = vec![0u64; self.n as usize + 1];
        for r in self.references() {
            for k in 0..r.len {
                src[(r.dst + k) as usize] = r.src + k;
            }
        }
        src
    }
}

/// Consumer of factors produced in text order.
///
/// A literal run is announced with its length first and then delivered in
/// one or more byte slices.
pub trait FactorSink {
    fn begin_literal(&mut self, dst: u64, len: u64) -> Result<()>;
    fn literal_bytes(&mut self, bytes: &[u8]) -> Result<()>;
    fn reference(&mut self, r: Reference) -> Result<()>;
}

/// Collects factors into an in-memory [`Factorization`].
#[derive(Debug)]
pub struct FactorizationBuilder {
    f: Factorization,
}

impl FactorizationBuilder {
    pub fn new(n: u64, theta: u64) -> Self {
        Self {
            f: Factorization {
                n,
                theta,
                factors: Vec::new(),
            },
        }
    }

    pub fn finish(self) -> Factorization {
        self.f
    }
}

impl FactorSink for FactorizationBuilder {
    fn begin_literal(&mut self, dst: u64, len: u64) -> Result<()> {
        self.f.factors.push(Factor::Literal {
            dst,
            bytes: Vec::with_capacity(len as usize),
        });
        Ok(())
    }

    fn literal_bytes(&mut self, bytes: &[u8]) -> Result<()> {
        match self.f.factors.last_mut() {
            Some(Factor::Literal { bytes: b, .. }) => {
                b.extend_from_slice(bytes);
                Ok(())
            }
            _ => Err(Error::Logic("literal bytes without an open literal".into())),
        }
    }

    fn reference(&mut self, r: Reference) -> Result<()> {
        self.f.factors.push(Factor::Ref(r));
        Ok(())
    }
}

/// Builds a factorization of `text` (sentinel included) from references,
/// filling the gaps with maximal literal runs.
pub fn factorization_from_references(text: &[u8], theta: u64, refs: &[Reference]) -> Factorization {
    let mut refs = refs.to_vec();
    refs.sort_by_key(|r| r.dst);
    let mut b = FactorizationBuilder::new(text.len() as u64, theta);
    let mut pos = 1u64;
    let emit_gap = |b: &mut FactorizationBuilder, from: u64, to: u64| {
        if from < to {
            b.begin_literal(from, to - from).unwrap();
            b.literal_bytes(&text[from as usize - 1..to as usize - 1]).unwrap();
        }
    };
    for r in refs {
        emit_gap(&mut b, pos, r.dst);
        b.reference(r).unwrap();
        pos = r.end();
    }
    emit_gap(&mut b, pos, text.len() as u64 + 1);
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_and_validates() {
        let text = b"abab\0";
        let f = factorization_from_references(text, 2, &[Reference::new(3, 1, 2)]);
        assert_eq!(f.factors.len(), 3);
        assert_eq!(f.literal_chars(), 3);
        assert_eq!(f.reference_count(), 1);
        f.validate().unwrap();
        assert_eq!(f.char_sources(), vec![0, 0, 0, 1, 2, 0]);
    }

    #[test]
    fn validation_errors() {
        let mut f = factorization_from_references(b"abab\0", 2, &[Reference::new(3, 1, 2)]);
        f.n = 6;
        assert!(matches!(
            f.validate(),
            Err(Error::Decode(DecodeError::LengthMismatch { expected: 6, actual: 5 }))
        ));
        let f = Factorization {
            n: 3,
            theta: 1,
            factors: vec![
                Factor::Literal { dst: 1, bytes: vec![1] },
                Factor::Ref(Reference::new(2, 3, 2)),
            ],
        };
        assert!(matches!(f.validate(), Err(Error::Decode(DecodeError::OutOfBounds { .. }))));
    }
}
