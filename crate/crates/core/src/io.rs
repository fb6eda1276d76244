//! Binary files for dense tensors (`TTDN`), tensor trains (`TTTR`) and complex
//! matrices (`TTMC`), plus the `key=value` metadata sidecar.
//!
//! All integers and floats are little-endian. Each file starts with a 4-byte
//! magic and a `u32` version (currently 1).

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Result, TtError};
use crate::linalg::CMatrix;
use crate::tt::{Core, DenseTensor, Shape, TensorTrain};

pub const VERSION: u32 = 1;
pub const DENSE_MAGIC: &[u8; 4] = b"TTDN";
pub const TRAIN_MAGIC: &[u8; 4] = b"TTTR";
pub const MATRIX_MAGIC: &[u8; 4] = b"TTMC";

/// Tolerance used to re-detect orthonormal cores after loading a train.
pub const ORTHO_DETECT_TOL: f64 = 1e-12;

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Cursor { buf, pos: 0 }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let out = &self.buf[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(TtError::format(
                self.buf.len() as u64,
                format!("unexpected end of file reading {what}"),
            )),
        }
    }

    fn magic(&mut self, want: &[u8; 4]) -> Result<()> {
        let got = self.take(4, "magic")?;
        if got != want {
            return Err(TtError::format(
                0,
                format!(
                    "bad magic {:?}, expected {:?}",
                    String::from_utf8_lossy(got),
                    String::from_utf8_lossy(want)
                ),
            ));
        }
        let at = self.pos as u64;
        let v = self.u32("version")?;
        if v != VERSION {
            return Err(TtError::format(at, format!("unsupported version {v}")));
        }
        Ok(())
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }

    /// A positive `u64` that fits in `usize`.
    fn extent(&mut self, what: &str) -> Result<usize> {
        let at = self.pos as u64;
        let v = self.u64(what)?;
        match usize::try_from(v) {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(TtError::format(at, format!("invalid {what} {v}"))),
        }
    }

    fn f64s(&mut self, count: usize, what: &str) -> Result<Vec<f64>> {
        let bytes = count
            .checked_mul(8)
            .ok_or_else(|| TtError::format(self.pos as u64, format!("{what} too large")))?;
        Ok(self
            .take(bytes, what)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(TtError::format(
                self.pos as u64,
                format!("{} trailing bytes", self.buf.len() - self.pos),
            ));
        }
        Ok(())
    }

    fn product(&self, dims: &[usize], what: &str) -> Result<usize> {
        dims.iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| TtError::format(self.pos as u64, format!("{what} overflows")))
    }
}

fn put_header(out: &mut Vec<u8>, magic: &[u8; 4]) {
    out.extend_from_slice(magic);
    out.extend_from_slice(&VERSION.to_le_bytes());
}

fn put_f64s(out: &mut Vec<u8>, values: &[f64]) {
    out.reserve(values.len() * 8);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn order_u32(d: usize) -> Result<u32> {
    u32::try_from(d).map_err(|_| TtError::arg(format!("order {d} does not fit in u32")))
}

pub fn encode_dense(t: &DenseTensor) -> Result<Vec<u8>> {
    let dims = t.shape().dims();
    let mut out = Vec::with_capacity(12 + 8 * dims.len() + 8 * t.data().len());
    put_header(&mut out, DENSE_MAGIC);
    out.extend_from_slice(&order_u32(dims.len())?.to_le_bytes());
    for &n in dims {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    put_f64s(&mut out, t.data());
    Ok(out)
}

pub fn decode_dense(buf: &[u8]) -> Result<DenseTensor> {
    let mut c = Cursor::new(buf);
    c.magic(DENSE_MAGIC)?;
    let dims = read_dims(&mut c)?;
    let size = c.product(&dims, "tensor size")?;
    let data = c.f64s(size, "tensor data")?;
    c.finish()?;
    DenseTensor::new(Shape::new(dims)?, data)
}

fn read_dims(c: &mut Cursor<'_>) -> Result<Vec<usize>> {
    let at = c.pos as u64;
    let d = c.u32("order")? as usize;
    if d == 0 {
        return Err(TtError::format(at, "order must be positive"));
    }
    (0..d).map(|_| c.extent("dimension")).collect()
}

pub fn encode_train(t: &TensorTrain) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(16 + 16 * t.order() + 8 * t.storage());
    put_header(&mut out, TRAIN_MAGIC);
    out.extend_from_slice(&order_u32(t.order())?.to_le_bytes());
    for &n in t.shape().dims() {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for r in t.ranks() {
        out.extend_from_slice(&(r as u64).to_le_bytes());
    }
    for core in t.cores() {
        put_f64s(&mut out, core.data());
    }
    Ok(out)
}

/// Decode a train and re-detect which cores are orthonormal.
pub fn decode_train(buf: &[u8]) -> Result<TensorTrain> {
    let mut c = Cursor::new(buf);
    c.magic(TRAIN_MAGIC)?;
    let dims = read_dims(&mut c)?;
    let d = dims.len();
    let rank_at = c.pos as u64;
    let ranks = (0..=d).map(|_| c.extent("rank")).collect::<Result<Vec<_>>>()?;
    if ranks[0] != 1 || ranks[d] != 1 {
        return Err(TtError::format(rank_at, "boundary ranks must be 1"));
    }
    let mut cores = Vec::with_capacity(d);
    for mu in 0..d {
        let len = c.product(&[ranks[mu], dims[mu], ranks[mu + 1]], "core size")?;
        let data = c.f64s(len, "core data")?;
        cores.push(Core::new(ranks[mu], dims[mu], ranks[mu + 1], data)?);
    }
    c.finish()?;
    Ok(TensorTrain::new(cores)?.detect_ortho(ORTHO_DETECT_TOL))
}

/// Column-major, each entry as `(re, im)`.
pub fn encode_matrix(m: &CMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 16 * m.len());
    put_header(&mut out, MATRIX_MAGIC);
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for z in m.iter() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode_matrix(buf: &[u8]) -> Result<CMatrix> {
    let mut c = Cursor::new(buf);
    c.magic(MATRIX_MAGIC)?;
    let at = c.pos as u64;
    let rows = c.u64("rows")?;
    let cols = c.u64("cols")?;
    let (rows, cols) = match (usize::try_from(rows), usize::try_from(cols)) {
        (Ok(r), Ok(k)) => (r, k),
        _ => return Err(TtError::format(at, "matrix extent does not fit in memory")),
    };
    let len = c.product(&[rows, cols, 2], "matrix size")?;
    let raw = c.f64s(len, "matrix data")?;
    c.finish()?;
    let entries = raw.chunks_exact(2).map(|p| Complex64::new(p[0], p[1]));
    Ok(CMatrix::from_iterator(rows, cols, entries))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    fs::File::open(path)?.read_to_end(&mut buf)?;
    Ok(buf)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

pub fn read_dense(path: impl AsRef<Path>) -> Result<DenseTensor> {
    decode_dense(&read_file(path.as_ref())?)
}

pub fn write_dense(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    write_file(path.as_ref(), &encode_dense(t)?)
}

pub fn read_train(path: impl AsRef<Path>) -> Result<TensorTrain> {
    decode_train(&read_file(path.as_ref())?)
}

pub fn write_train(path: impl AsRef<Path>, t: &TensorTrain) -> Result<()> {
    write_file(path.as_ref(), &encode_train(t)?)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<CMatrix> {
    decode_matrix(&read_file(path.as_ref())?)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &CMatrix) -> Result<()> {
    write_file(path.as_ref(), &encode_matrix(m))
}

/// Ordered `key=value` pairs, one per line. Blank lines and lines starting
/// with `#` are skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata(pub BTreeMap<String, String>);

impl Metadata {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.0.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut offset = 0u64;
        for line in text.split_inclusive('\n') {
            let body = line.trim();
            if !body.is_empty() && !body.starts_with('#') {
                let Some((k, v)) = body.split_once('=') else {
                    return Err(TtError::format(offset, format!("expected key=value, got '{body}'")));
                };
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
            offset += line.len() as u64;
        }
        Ok(Metadata(map))
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = read_file(path.as_ref())?;
        let text = String::from_utf8(bytes)
            .map_err(|e| TtError::format(e.utf8_error().valid_up_to() as u64, "metadata is not UTF-8"))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), self.render().as_bytes())
    }
}
