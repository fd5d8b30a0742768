//! Binary field and flow-map snapshots, and atomic file replacement.
//!
//! Field snapshot (little-endian): `b"FLD1"`, `u32 n`, `u32 ncomp`, `f64 time`,
//! then `ncomp` blocks of `n*n` f64 samples, row-major with the x index
//! fastest.
//!
//! Flow-map snapshot: `b"FMP1"`, `u32 m`, `f64 time`, then `m*m` records of
//! ten f64 values `(η₁, η₂, T₁₁, T₁₂, T₂₁, T₂₂, Tinv₁₁, Tinv₁₂, Tinv₂₁, Tinv₂₂)`.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::flowmap::{FlowMap, Mat2};
use crate::spectral::RealField;

pub const FIELD_MAGIC: &[u8; 4] = b"FLD1";
pub const FLOW_MAGIC: &[u8; 4] = b"FMP1";

/// Write through a temporary file in the destination directory, then rename
/// it over `path`.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    {
        let mut w = BufWriter::new(tmp.as_file().try_clone().map_err(io_err)?);
        body(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)?;
    }
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSnapshot {
    pub time: f64,
    pub components: Vec<RealField>,
}

pub fn write_field(path: &Path, time: f64, components: &[&RealField]) -> Result<()> {
    let n = components.first().map_or(0, |c| c.nrows());
    if components.iter().any(|c| c.dim() != (n, n)) {
        return Err(Error::Setup("snapshot components must share one square shape".into()));
    }
    write_atomic(path, |w| {
        w.write_all(FIELD_MAGIC)?;
        w.write_all(&(n as u32).to_le_bytes())?;
        w.write_all(&(components.len() as u32).to_le_bytes())?;
        w.write_all(&time.to_le_bytes())?;
        for c in components {
            for v in c.iter() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    })
}

/// Little-endian reader that reports the byte offset of any failure.
struct Cursor<'a> {
    path: &'a Path,
    bytes: Vec<u8>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn open(path: &'a Path) -> Result<Self> {
        let mut bytes = Vec::new();
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Ok(Self { path, bytes, pos: 0 })
    }

    fn fail(&self, detail: impl Into<String>) -> Error {
        Error::Snapshot {
            path: self.path.to_path_buf(),
            detail: format!("{} (byte offset {})", detail.into(), self.pos),
        }
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| self.fail("unexpected end of file"))?;
        let out = chunk.try_into().expect("slice length checked");
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }

    fn magic(&mut self, expected: &[u8; 4]) -> Result<()> {
        let got: [u8; 4] = self.take()?;
        if &got != expected {
            self.pos -= 4;
            return Err(self.fail(format!("bad magic {got:?}")));
        }
        Ok(())
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(self.fail("trailing bytes"));
        }
        Ok(())
    }
}

pub fn read_field(path: &Path) -> Result<FieldSnapshot> {
    let mut c = Cursor::open(path)?;
    c.magic(FIELD_MAGIC)?;
    let n = c.u32()? as usize;
    let ncomp = c.u32()? as usize;
    let time = c.f64()?;
    let mut components = Vec::with_capacity(ncomp);
    for _ in 0..ncomp {
        let mut data = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            data.push(c.f64()?);
        }
        components.push(Array2::from_shape_vec((n, n), data).expect("length matches n*n"));
    }
    c.finish()?;
    Ok(FieldSnapshot { time, components })
}

pub fn write_flow(path: &Path, fm: &FlowMap) -> Result<()> {
    write_atomic(path, |w| {
        w.write_all(FLOW_MAGIC)?;
        w.write_all(&(fm.m() as u32).to_le_bytes())?;
        w.write_all(&fm.t.to_le_bytes())?;
        for p in 0..fm.len() {
            let (t, ti) = (fm.tangent[p], fm.inverse_tangent[p]);
            let rec = [
                fm.positions[p][0], fm.positions[p][1],
                t[0][0], t[0][1], t[1][0], t[1][1],
                ti[0][0], ti[0][1], ti[1][0], ti[1][1],
            ];
            for v in rec {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    })
}

pub fn read_flow(path: &Path) -> Result<FlowMap> {
    let mut c = Cursor::open(path)?;
    c.magic(FLOW_MAGIC)?;
    let m = c.u32()? as usize;
    let time = c.f64()?;
    let mut positions = Vec::with_capacity(m * m);
    let mut tangent = Vec::with_capacity(m * m);
    let mut inverse = Vec::with_capacity(m * m);
    let mat = |c: &mut Cursor| -> Result<Mat2> { Ok([[c.f64()?, c.f64()?], [c.f64()?, c.f64()?]]) };
    for _ in 0..m * m {
        positions.push([c.f64()?, c.f64()?]);
        tangent.push(mat(&mut c)?);
        inverse.push(mat(&mut c)?);
    }
    c.finish()?;
    FlowMap::from_parts(m, time, positions, tangent, inverse)
}
