use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use super::IndexBundle;
use crate::error::{DecodeError, Error, Result};

pub const INDEX_MAGIC: &[u8; 8] = b"PLCPIDX1";
const HEADER_LEN: u64 = 24;

#[derive(Clone, Copy)]
enum Section {
    Sa = 0,
    Isa = 1,
    Phi = 2,
    Plcp = 3,
}

/// Writes the header (`magic`, `n`, `r`) followed by SA, ISA, Φ and PLCP as
/// little-endian u64 arrays.
pub fn write_index<W: Write>(b: &IndexBundle, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    out.write_all(INDEX_MAGIC)?;
    out.write_all(&b.len().to_le_bytes())?;
    out.write_all(&b.bwt_runs.to_le_bytes())?;
    for arr in [&b.sa, &b.isa, &b.phi, &b.plcp] {
        for &v in arr.iter() {
            out.write_all(&(v as u64).to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R, what: &'static str) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => Error::Decode(DecodeError::Truncated { what }),
        _ => Error::Io(e),
    })?;
    Ok(u64::from_le_bytes(buf))
}

fn read_header<R: Read>(r: &mut R) -> Result<(u64, u64)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => Error::Decode(DecodeError::Truncated { what: "index magic" }),
        _ => Error::Io(e),
    })?;
    if &magic != INDEX_MAGIC {
        return Err(DecodeError::BadMagic { expected: "PLCPIDX1" }.into());
    }
    let n = read_u64(r, "index length")?;
    let runs = read_u64(r, "index run count")?;
    if n >= u32::MAX as u64 {
        return Err(Error::Input(format!("index length {n} is too large")));
    }
    Ok((n, runs))
}

/// Reads a whole index produced by [`write_index`].
pub fn load_index<R: Read>(input: R) -> Result<IndexBundle> {
    let mut r = BufReader::new(input);
    let (n, bwt_runs) = read_header(&mut r)?;
    let mut arrays: [Vec<u32>; 4] = Default::default();
    for (k, arr) in arrays.iter_mut().enumerate() {
        let what = ["SA", "ISA", "PHI", "PLCP"][k];
        arr.reserve(n as usize);
        for _ in 0..n {
            let v = read_u64(&mut r, what)?;
            if v > n {
                return Err(Error::Input(format!("{what} entry {v} exceeds n={n}")));
            }
            arr.push(v as u32);
        }
    }
    let [sa, isa, phi, plcp] = arrays;
    Ok(IndexBundle {
        sa,
        isa,
        phi,
        plcp,
        bwt_runs,
    })
}

/// An index file on disk whose sections are read sequentially on demand, so
/// the factorizer can run without holding any array in memory.
#[derive(Debug, Clone)]
pub struct IndexFile {
    path: PathBuf,
    n: u64,
    bwt_runs: u64,
}

impl IndexFile {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut f = File::open(&path)?;
        let (n, bwt_runs) = read_header(&mut f)?;
        let expect = HEADER_LEN + 4 * n * 8;
        let actual = f.metadata()?.len();
        if actual < expect {
            return Err(DecodeError::Truncated { what: "index arrays" }.into());
        }
        Ok(Self { path, n, bwt_runs })
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bwt_runs(&self) -> u64 {
        self.bwt_runs
    }

    fn section(&self, s: Section) -> Result<SectionIter> {
        let mut f = File::open(&self.path)?;
        f.seek(SeekFrom::Start(HEADER_LEN + s as u64 * self.n * 8))?;
        Ok(SectionIter {
            r: BufReader::with_capacity(1 << 16, f),
            left: self.n,
        })
    }

    pub fn sa_iter(&self) -> Result<SectionIter> {
        self.section(Section::Sa)
    }

    pub fn isa_iter(&self) -> Result<SectionIter> {
        self.section(Section::Isa)
    }

    pub fn phi_iter(&self) -> Result<SectionIter> {
        self.section(Section::Phi)
    }

    pub fn plcp_iter(&self) -> Result<SectionIter> {
        self.section(Section::Plcp)
    }
}

/// Sequential reader over one array of an [`IndexFile`].
pub struct SectionIter {
    r: BufReader<File>,
    left: u64,
}

impl Iterator for SectionIter {
    type Item = Result<u64>;

    fn next(&mut self) -> Option<Result<u64>> {
        if self.left == 0 {
            return None;
        }
        self.left -= 1;
        Some(read_u64(&mut self.r, "index section"))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.left as usize, Some(self.left as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text_index::{build_index, Text};

    #[test]
    fn roundtrip_in_memory_and_file() {
        let t = Text::from_content(b"ababbabababbabbaababa".to_vec()).unwrap();
        let b = build_index(&t);
        let mut buf = Vec::new();
        write_index(&b, &mut buf).unwrap();
        assert_eq!(buf.len() as u64, HEADER_LEN + 4 * 22 * 8);
        assert_eq!(&buf[..8], INDEX_MAGIC);
        assert_eq!(load_index(&buf[..]).unwrap(), b);

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("idx");
        std::fs::write(&p, &buf).unwrap();
        let f = IndexFile::open(&p).unwrap();
        assert_eq!(f.len(), 22);
        assert_eq!(f.bwt_runs(), b.bwt_runs());
        let plcp: Vec<u64> = f.plcp_iter().unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(plcp, b.plcp_values().collect::<Vec<_>>());
        let phi: Vec<u64> = f.phi_iter().unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(phi, b.phi_values().collect::<Vec<_>>());
    }

    #[test]
    fn rejects_bad_headers() {
        assert!(matches!(
            load_index(&b"NOTANIDX"[..]),
            Err(Error::Decode(DecodeError::BadMagic { .. }))
        ));
        let mut buf = INDEX_MAGIC.to_vec();
        buf.extend_from_slice(&5u64.to_le_bytes());
        buf.extend_from_slice(&1u64.to_le_bytes());
        assert!(matches!(
            load_index(&buf[..]),
            Err(Error::Decode(DecodeError::Truncated { .. }))
        ));
    }
}
