//! `SCMP` compressed-stream layout (little-endian):
//!
//! ```text
//! magic "SCMP" | version u8 = 1 | method u8 (1 = PCA, 2 = CSI) | p u16 | n u16
//! | w u32 | h u32 | quality u8 | wavelengths f32 × n | side info | p plane records
//! ```
//!
//! PCA side info is `mean f32 × n | basis f32 × n·p (row-major) | eigenvalues
//! f32 × p`; CSI side info is `knot index u16 × p`.

use crate::cube::check_wavelengths;
use crate::error::{ensure, Error, Result};
use crate::reduction::{CsiSideInfo, Method, PcaSideInfo};
use crate::spatial::EncodedPlane;

pub const SCMP_MAGIC: [u8; 4] = *b"SCMP";
pub const SCMP_VERSION: u8 = 1;
pub const SCMP_HEADER_LEN: usize = 19;

#[derive(Debug, Clone, PartialEq)]
pub enum SideInfo {
    Pca(PcaSideInfo),
    Csi(CsiSideInfo),
}

impl SideInfo {
    pub fn method(&self) -> Method {
        match self {
            SideInfo::Pca(_) => Method::Pca,
            SideInfo::Csi(_) => Method::Csi,
        }
    }

    pub fn planes(&self) -> usize {
        match self {
            SideInfo::Pca(s) => s.components(),
            SideInfo::Csi(s) => s.knot_count(),
        }
    }
}

/// Byte size of the side-info block.
pub fn side_info_len(method: Method, n: usize, p: usize) -> usize {
    match method {
        Method::Pca => 4 * n + 4 * n * p + 4 * p,
        Method::Csi => 2 * p,
    }
}

/// A decodable compressed cube.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedStream {
    pub width: usize,
    pub height: usize,
    pub wavelengths: Vec<f32>,
    pub quality: u8,
    pub side: SideInfo,
    pub planes: Vec<EncodedPlane>,
}

impl CompressedStream {
    pub fn method(&self) -> Method {
        self.side.method()
    }

    pub fn p(&self) -> usize {
        self.side.planes()
    }

    pub fn bands(&self) -> usize {
        self.wavelengths.len()
    }

    /// Header, wavelengths and side info: everything except plane records.
    pub fn overhead_len(&self) -> usize {
        SCMP_HEADER_LEN + 4 * self.bands() + side_info_len(self.method(), self.bands(), self.p())
    }

    pub fn serialized_len(&self) -> usize {
        self.overhead_len()
            + self
                .planes
                .iter()
                .map(|p| p.serialized_len())
                .sum::<usize>()
    }

    /// Checks internal consistency.
    pub fn validate(&self) -> Result<()> {
        let (n, p) = (self.bands(), self.p());
        ensure!(
            self.width >= 1 && self.height >= 1 && n >= 1,
            Corrupt,
            "stream has a zero dimension"
        );
        ensure!(
            self.planes.len() == p,
            Corrupt,
            "stream has {} planes but side info describes {p}",
            self.planes.len()
        );
        ensure!(
            (1..=100).contains(&self.quality),
            Corrupt,
            "stream quality {} outside 1..=100",
            self.quality
        );
        check_wavelengths(&self.wavelengths).map_err(|e| Error::Corrupt(e.to_string()))?;
        match &self.side {
            SideInfo::Pca(s) => {
                s.validate().map_err(|e| Error::Corrupt(e.to_string()))?;
                ensure!(
                    s.bands() == n,
                    Corrupt,
                    "PCA side info covers {} bands, stream has {n}",
                    s.bands()
                );
                ensure!(
                    s.mean
                        .iter()
                        .chain(&s.basis)
                        .chain(&s.eigenvalues)
                        .all(|v| v.is_finite()),
                    Corrupt,
                    "PCA side info has non-finite values"
                );
            }
            SideInfo::Csi(s) => s.validate(n).map_err(|e| Error::Corrupt(e.to_string()))?,
        }
        for (k, plane) in self.planes.iter().enumerate() {
            ensure!(
                plane.width == self.width && plane.height == self.height,
                Corrupt,
                "plane {k} is {}x{}, stream is {}x{}",
                plane.width,
                plane.height,
                self.width,
                self.height
            );
            ensure!(
                plane.quality == self.quality,
                Corrupt,
                "plane {k} quality {} differs from stream quality {}",
                plane.quality,
                self.quality
            );
        }
        Ok(())
    }
}

pub fn serialize_stream(stream: &CompressedStream) -> Result<Vec<u8>> {
    stream
        .validate()
        .map_err(|e| Error::Validation(e.to_string()))?;
    let (n, p) = (stream.bands(), stream.p());
    let narrow = |v: usize, max: usize, what: &str| -> Result<usize> {
        ensure!(
            v <= max,
            Validation,
            "{what} {v} exceeds container limit {max}"
        );
        Ok(v)
    };
    let mut out = Vec::with_capacity(stream.serialized_len());
    out.extend_from_slice(&SCMP_MAGIC);
    out.push(SCMP_VERSION);
    out.push(match stream.method() {
        Method::Pca => 1,
        Method::Csi => 2,
    });
    out.extend_from_slice(&(narrow(p, u16::MAX as usize, "p")? as u16).to_le_bytes());
    out.extend_from_slice(&(narrow(n, u16::MAX as usize, "bands")? as u16).to_le_bytes());
    out.extend_from_slice(
        &(narrow(stream.width, u32::MAX as usize, "width")? as u32).to_le_bytes(),
    );
    out.extend_from_slice(
        &(narrow(stream.height, u32::MAX as usize, "height")? as u32).to_le_bytes(),
    );
    out.push(stream.quality);
    for w in &stream.wavelengths {
        out.extend_from_slice(&w.to_le_bytes());
    }
    match &stream.side {
        SideInfo::Pca(s) => {
            for v in s.mean.iter().chain(&s.basis).chain(&s.eigenvalues) {
                out.extend_from_slice(&(*v as f32).to_le_bytes());
            }
        }
        SideInfo::Csi(s) => {
            for &k in &s.knot_indices {
                out.extend_from_slice(&(k as u16).to_le_bytes());
            }
        }
    }
    for plane in &stream.planes {
        plane.write_to(&mut out)?;
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        ensure!(
            self.bytes.len() - self.pos >= n,
            Corrupt,
            "stream truncated in {what}: need {n} bytes, {} left",
            self.bytes.len() - self.pos
        );
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn f32s(&mut self, count: usize, what: &str) -> Result<Vec<f32>> {
        Ok(self
            .take(4 * count, what)?
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn parse_stream(bytes: &[u8]) -> Result<CompressedStream> {
    ensure!(
        bytes.len() >= 5,
        Corrupt,
        "stream truncated: {} bytes",
        bytes.len()
    );
    ensure!(
        bytes[0..4] == SCMP_MAGIC,
        Format,
        "bad magic {:?}, expected \"SCMP\"",
        String::from_utf8_lossy(&bytes[0..4])
    );
    ensure!(
        bytes[4] == SCMP_VERSION,
        Format,
        "unsupported stream version {}",
        bytes[4]
    );
    let mut c = Cursor { bytes, pos: 5 };
    let head = c.take(SCMP_HEADER_LEN - 5, "header")?;
    let method = match head[0] {
        1 => Method::Pca,
        2 => Method::Csi,
        t => return Err(Error::Format(format!("unknown method tag {t}"))),
    };
    let p = u16::from_le_bytes([head[1], head[2]]) as usize;
    let n = u16::from_le_bytes([head[3], head[4]]) as usize;
    let width = u32::from_le_bytes(head[5..9].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(head[9..13].try_into().unwrap()) as usize;
    let quality = head[13];
    ensure!(n >= 1 && p >= 1, Corrupt, "stream declares p={p}, n={n}");
    ensure!(p <= n, Corrupt, "stream declares p={p} > n={n}");

    let wavelengths = c.f32s(n, "wavelengths")?;
    let side = match method {
        Method::Pca => {
            let widen = |v: Vec<f32>| v.into_iter().map(f64::from).collect::<Vec<f64>>();
            let mean = widen(c.f32s(n, "PCA mean")?);
            let basis = widen(c.f32s(n * p, "PCA basis")?);
            let eigenvalues = widen(c.f32s(p, "PCA eigenvalues")?);
            SideInfo::Pca(PcaSideInfo {
                mean,
                basis,
                eigenvalues,
            })
        }
        Method::Csi => {
            let raw = c.take(2 * p, "CSI knots")?;
            let knot_indices = raw
                .chunks_exact(2)
                .map(|b| u16::from_le_bytes([b[0], b[1]]) as usize)
                .collect();
            SideInfo::Csi(CsiSideInfo { knot_indices })
        }
    };
    let mut planes = Vec::with_capacity(p);
    for _ in 0..p {
        let (plane, used) = EncodedPlane::read_from(&bytes[c.pos..])?;
        c.pos += used;
        planes.push(plane);
    }
    ensure!(
        c.pos == bytes.len(),
        Corrupt,
        "{} trailing bytes after the last plane",
        bytes.len() - c.pos
    );
    let stream = CompressedStream {
        width,
        height,
        wavelengths,
        quality,
        side,
        planes,
    };
    stream.validate()?;
    Ok(stream)
}
