use std::fs::{File, OpenOptions};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use plcpz_core::text_index::SENTINEL;
use plcpz_core::{DecodeError, Error, Result};
use serde_json::Value;

fn is_std(path: &Option<PathBuf>) -> bool {
    path.as_deref().map_or(true, |p| p == Path::new("-"))
}

pub fn open_input(path: &Option<PathBuf>) -> Result<Box<dyn Read>> {
    Ok(if is_std(path) {
        Box::new(BufReader::new(io::stdin().lock()))
    } else {
        Box::new(BufReader::new(File::open(path.as_ref().unwrap())?))
    })
}

pub fn read_input(path: &Option<PathBuf>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    open_input(path)?.read_to_end(&mut buf)?;
    Ok(buf)
}

pub fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(if is_std(path) {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        Box::new(BufWriter::new(File::create(path.as_ref().unwrap())?))
    })
}

/// Passes decoded text through, holding back the last byte so the
/// terminator never reaches the output. `finish` checks length and
/// terminator.
pub struct StripTerminator<W: Write> {
    inner: W,
    held: Option<u8>,
    seen: u64,
}

impl<W: Write> StripTerminator<W> {
    pub fn new(inner: W) -> Self {
        Self {
            inner,
            held: None,
            seen: 0,
        }
    }

    pub fn finish(mut self, n: u64) -> Result<()> {
        if self.seen != n {
            return Err(DecodeError::LengthMismatch {
                expected: n,
                actual: self.seen,
            }
            .into());
        }
        if self.held != Some(SENTINEL) {
            return Err(Error::Input("decoded text does not end with the terminator".into()));
        }
        self.inner.flush()?;
        Ok(())
    }
}

impl<W: Write> Write for StripTerminator<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let Some((&last, body)) = buf.split_last() else {
            return Ok(0);
        };
        if let Some(h) = self.held.take() {
            self.inner.write_all(&[h])?;
        }
        self.inner.write_all(body)?;
        self.held = Some(last);
        self.seen += buf.len() as u64;
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// JSON-lines sink; a no-op without a path.
pub struct Metrics {
    out: Option<BufWriter<File>>,
}

impl Metrics {
    pub fn open(path: &Option<PathBuf>) -> Result<Self> {
        let out = match path {
            Some(p) => Some(BufWriter::new(OpenOptions::new().create(true).append(true).open(p)?)),
            None => None,
        };
        Ok(Self { out })
    }

    pub fn emit(&mut self, event: &str, mut record: Value) -> Result<()> {
        let Some(out) = self.out.as_mut() else {
            return Ok(());
        };
        if let Value::Object(map) = &mut record {
            map.insert("event".into(), Value::String(event.into()));
        }
        serde_json::to_writer(&mut *out, &record).map_err(io::Error::from)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }
}

/// Byte counts like `4096`, `64K`, `8MiB` or `1G` (binary multiples).
pub fn parse_size(s: &str) -> Result<usize> {
    let t = s.trim();
    let digits = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
    let (num, unit) = t.split_at(digits);
    let base: usize = num
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse size {s:?}")))?;
    let shift = match unit.trim().to_ascii_lowercase().as_str() {
        "" | "b" => 0,
        "k" | "kb" | "kib" => 10,
        "m" | "mb" | "mib" => 20,
        "g" | "gb" | "gib" => 30,
        _ => return Err(Error::Config(format!("unknown size unit in {s:?}"))),
    };
    base.checked_mul(1usize << shift)
        .ok_or_else(|| Error::Config(format!("size {s:?} overflows")))
}
