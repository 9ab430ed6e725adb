//! Binary coded-file format.
//!
//! ```text
//! magic  "PLCPZ001"            8 bytes
//! n      u64 LE                text length including the terminator
//! theta  u64 LE
//! records, in text order:
//!   0x00  len:u64  bytes[len]  literal run
//!   0x01  src:u64  len:u64     reference (1-based source)
//! ```

use std::io::{self, BufReader, BufWriter, Read, Write};

use crate::error::{DecodeError, Error, Result};
use crate::factors::{Factor, FactorSink, Factorization, Reference};

pub const MAGIC: &[u8; 8] = b"PLCPZ001";
pub const HEADER_LEN: u64 = 24;
const TAG_LITERAL: u8 = 0x00;
const TAG_REFERENCE: u8 = 0x01;

/// Streaming encoder. Factors must arrive in text order.
pub struct Encoder<W: Write> {
    out: BufWriter<W>,
    n: u64,
    pos: u64,
    literal_left: u64,
    bytes: u64,
}

impl<W: Write> Encoder<W> {
    pub fn new(out: W, n: u64, theta: u64) -> Result<Self> {
        let mut out = BufWriter::with_capacity(1 << 16, out);
        out.write_all(MAGIC)?;
        out.write_all(&n.to_le_bytes())?;
        out.write_all(&theta.to_le_bytes())?;
        Ok(Self {
            out,
            n,
            pos: 1,
            literal_left: 0,
            bytes: HEADER_LEN,
        })
    }

    fn expect_at(&self, dst: u64) -> Result<()> {
        if self.literal_left != 0 {
            return Err(Error::Logic(format!(
                "factor at {dst} starts before the open literal run is complete"
            )));
        }
        if dst != self.pos {
            return Err(Error::Logic(format!("factor at {dst} but next position is {}", self.pos)));
        }
        Ok(())
    }

    /// Flushes and returns the number of bytes written.
    pub fn finish(mut self) -> Result<u64> {
        if self.literal_left != 0 || self.pos != self.n + 1 {
            return Err(Error::Logic(format!(
                "coding ends at position {} but the text has {} characters",
                self.pos - 1 + self.literal_left,
                self.n
            )));
        }
        self.out.flush()?;
        Ok(self.bytes)
    }
}

impl<W: Write> FactorSink for Encoder<W> {
    fn begin_literal(&mut self, dst: u64, len: u64) -> Result<()> {
        self.expect_at(dst)?;
        self.out.write_all(&[TAG_LITERAL])?;
        self.out.write_all(&len.to_le_bytes())?;
        self.bytes += 9;
        self.literal_left = len;
        Ok(())
    }

    fn literal_bytes(&mut self, bytes: &[u8]) -> Result<()> {
        let len = bytes.len() as u64;
        if len > self.literal_left {
            return Err(Error::Logic("literal run longer than announced".into()));
        }
        self.out.write_all(bytes)?;
        self.bytes += len;
        self.literal_left -= len;
        self.pos += len;
        Ok(())
    }

    fn reference(&mut self, r: Reference) -> Result<()> {
        self.expect_at(r.dst)?;
        self.out.write_all(&[TAG_REFERENCE])?;
        self.out.write_all(&r.src.to_le_bytes())?;
        self.out.write_all(&r.len.to_le_bytes())?;
        self.bytes += 17;
        self.pos += r.len;
        Ok(())
    }
}

/// Writes `f` and returns the number of bytes produced.
pub fn encode<W: Write>(f: &Factorization, sink: W) -> Result<u64> {
    let mut enc = Encoder::new(sink, f.n, f.theta)?;
    for fac in &f.factors {
        match fac {
            Factor::Literal { dst, bytes } => {
                enc.begin_literal(*dst, bytes.len() as u64)?;
                enc.literal_bytes(bytes)?;
            }
            Factor::Ref(r) => enc.reference(*r)?,
        }
    }
    enc.finish()
}

pub fn encode_to_vec(f: &Factorization) -> Result<Vec<u8>> {
    let mut v = Vec::new();
    encode(f, &mut v)?;
    Ok(v)
}

/// One decoded record. Long literal runs may be split into several
/// consecutive `Literal` pieces when the reader has a chunk limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodedItem {
    Literal { dst: u64, bytes: Vec<u8> },
    Ref(Reference),
}

/// Validating streaming decoder.
pub struct FactorReader<R: Read> {
    input: BufReader<R>,
    n: u64,
    theta: u64,
    pos: u64,
    literal_left: u64,
    max_chunk: u64,
    done: bool,
}

fn read_exact_or<R: Read>(r: &mut R, buf: &mut [u8], what: &'static str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => Error::Decode(DecodeError::Truncated { what }),
        _ => Error::Io(e),
    })
}

fn read_u64<R: Read>(r: &mut R, what: &'static str) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact_or(r, &mut b, what)?;
    Ok(u64::from_le_bytes(b))
}

impl<R: Read> FactorReader<R> {
    pub fn new(input: R) -> Result<Self> {
        let mut input = BufReader::with_capacity(1 << 16, input);
        let mut magic = [0u8; 8];
        read_exact_or(&mut input, &mut magic, "header")?;
        if &magic != MAGIC {
            return Err(DecodeError::BadMagic { expected: "PLCPZ001" }.into());
        }
        let n = read_u64(&mut input, "header")?;
        let theta = read_u64(&mut input, "header")?;
        Ok(Self {
            input,
            n,
            theta,
            pos: 1,
            literal_left: 0,
            max_chunk: u64::MAX,
            done: false,
        })
    }

    /// Splits literal runs into pieces of at most `max` bytes.
    pub fn with_max_literal_chunk(mut self, max: usize) -> Self {
        self.max_chunk = max.max(1) as u64;
        self
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn theta(&self) -> u64 {
        self.theta
    }

    fn read_literal_piece(&mut self) -> Result<CodedItem> {
        let take = self.literal_left.min(self.max_chunk);
        let mut bytes = vec![0u8; take as usize];
        read_exact_or(&mut self.input, &mut bytes, "literal bytes")?;
        let dst = self.pos;
        self.pos += take;
        self.literal_left -= take;
        Ok(CodedItem::Literal { dst, bytes })
    }

    pub fn next_item(&mut self) -> Result<Option<CodedItem>> {
        if self.literal_left > 0 {
            return self.read_literal_piece().map(Some);
        }
        if self.done {
            return Ok(None);
        }
        let mut tag = [0u8; 1];
        let got = loop {
            match self.input.read(&mut tag) {
                Ok(k) => break k,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e.into()),
            }
        };
        if got == 0 {
            self.done = true;
            if self.pos != self.n + 1 {
                return Err(DecodeError::Truncated { what: "factor records" }.into());
            }
            return Ok(None);
        }
        let covered = self.pos - 1;
        match tag[0] {
            TAG_LITERAL => {
                let len = read_u64(&mut self.input, "literal length")?;
                self.check_len(len, covered)?;
                self.literal_left = len;
                self.read_literal_piece().map(Some)
            }
            TAG_REFERENCE => {
                let src = read_u64(&mut self.input, "reference source")?;
                let len = read_u64(&mut self.input, "reference length")?;
                self.check_len(len, covered)?;
                if src == 0 || src.checked_add(len - 1).map_or(true, |e| e > self.n) {
                    return Err(DecodeError::OutOfBounds { src, len, n: self.n }.into());
                }
                let r = Reference::new(self.pos, src, len);
                self.pos += len;
                Ok(Some(CodedItem::Ref(r)))
            }
            t => Err(DecodeError::BadTag(t).into()),
        }
    }

    fn check_len(&self, len: u64, covered: u64) -> Result<()> {
        if len == 0 {
            return Err(DecodeError::ZeroLength { dst: self.pos }.into());
        }
        match covered.checked_add(len) {
            Some(total) if total <= self.n => Ok(()),
            total => Err(DecodeError::LengthMismatch {
                expected: self.n,
                actual: total.unwrap_or(u64::MAX),
            }
            .into()),
        }
    }
}

impl<R: Read> Iterator for FactorReader<R> {
    type Item = Result<CodedItem>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_item().transpose()
    }
}

/// Reads a whole coded file into memory.
pub fn decode<R: Read>(source: R) -> Result<Factorization> {
    let mut r = FactorReader::new(source)?;
    let mut f = Factorization {
        n: r.n(),
        theta: r.theta(),
        factors: Vec::new(),
    };
    while let Some(item) = r.next_item()? {
        f.factors.push(match item {
            CodedItem::Literal { dst, bytes } => Factor::Literal { dst, bytes },
            CodedItem::Ref(r) => Factor::Ref(r),
        });
    }
    Ok(f)
}
