//! Spectral cube data model and the `SCUB` on-disk container.
//!
//! Layout (little-endian):
//!
//! | field       | type               |
//! |-------------|--------------------|
//! | magic       | `b"SCUB"`          |
//! | version     | u8 = 1             |
//! | dtype       | u8 = 1 (f32)       |
//! | reserved    | u16 = 0            |
//! | width       | u32                |
//! | height      | u32                |
//! | bands       | u32                |
//! | wavelengths | f32 × bands        |
//! | samples     | f32 × (H·W·bands), band-major |

use std::path::Path;

use crate::error::{ensure, Error, Result};

pub const SCUB_MAGIC: [u8; 4] = *b"SCUB";
pub const SCUB_VERSION: u8 = 1;
pub const DTYPE_F32: u8 = 1;
pub const SCUB_HEADER_LEN: usize = 20;

/// An H×W×N cube of spectral samples stored as band-major planes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCube {
    width: usize,
    height: usize,
    wavelengths: Vec<f32>,
    samples: Vec<f32>,
}

impl SpectralCube {
    /// Builds a cube, checking every invariant. `samples` is band-major:
    /// index `b·H·W + y·W + x`.
    pub fn new(
        width: usize,
        height: usize,
        wavelengths: Vec<f32>,
        samples: Vec<f32>,
    ) -> Result<Self> {
        let cube = SpectralCube {
            width,
            height,
            wavelengths,
            samples,
        };
        cube.validate()?;
        Ok(cube)
    }

    /// Builds a cube from f64 planes, rounding samples to f32.
    pub fn from_f64(
        width: usize,
        height: usize,
        wavelengths: &[f64],
        samples: &[f64],
    ) -> Result<Self> {
        Self::new(
            width,
            height,
            wavelengths.iter().map(|&w| w as f32).collect(),
            samples.iter().map(|&s| s as f32).collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.width >= 1 && self.height >= 1 && !self.wavelengths.is_empty(),
            Validation,
            "cube dimensions must be >= 1 (got {}x{}x{})",
            self.width,
            self.height,
            self.wavelengths.len()
        );
        let expected = self
            .width
            .checked_mul(self.height)
            .and_then(|p| p.checked_mul(self.wavelengths.len()))
            .ok_or_else(|| Error::Validation("cube dimensions overflow".into()))?;
        ensure!(
            self.samples.len() == expected,
            Validation,
            "sample count {} does not match {}x{}x{}",
            self.samples.len(),
            self.width,
            self.height,
            self.wavelengths.len()
        );
        check_wavelengths(&self.wavelengths)?;
        if let Some(i) = self.samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite sample at index {i}")));
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bands(&self) -> usize {
        self.wavelengths.len()
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn wavelengths(&self) -> &[f32] {
        &self.wavelengths
    }

    pub fn wavelengths_f64(&self) -> Vec<f64> {
        self.wavelengths.iter().map(|&w| f64::from(w)).collect()
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    /// The spatial plane of band `b`, row-major.
    pub fn band(&self, b: usize) -> &[f32] {
        let n = self.pixel_count();
        &self.samples[b * n..(b + 1) * n]
    }

    pub fn get(&self, x: usize, y: usize, b: usize) -> f32 {
        self.samples[b * self.pixel_count() + y * self.width + x]
    }

    /// Spectrum of the pixel at row-major index `pixel`, widened to f64.
    pub fn spectrum(&self, pixel: usize) -> Vec<f64> {
        let n = self.pixel_count();
        (0..self.bands())
            .map(|b| f64::from(self.samples[b * n + pixel]))
            .collect()
    }

    /// Size of this cube when serialized as `SCUB`.
    pub fn serialized_len(&self) -> usize {
        scub_len(self.width, self.height, self.bands())
    }

    pub fn same_shape(&self, other: &SpectralCube) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.wavelengths == other.wavelengths
    }
}

/// Byte length of an `SCUB` file for the given dimensions.
pub fn scub_len(width: usize, height: usize, bands: usize) -> usize {
    SCUB_HEADER_LEN + 4 * bands + 4 * width * height * bands
}

pub(crate) fn check_wavelengths(w: &[f32]) -> Result<()> {
    if let Some(i) = w.iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!(
            "non-finite wavelength at index {i}"
        )));
    }
    if let Some(i) = w.windows(2).position(|p| p[1] <= p[0]) {
        return Err(Error::Validation(format!(
            "wavelengths not strictly increasing at index {}",
            i + 1
        )));
    }
    Ok(())
}

/// Serializes a cube to `SCUB` bytes.
pub fn write_cube(cube: &SpectralCube) -> Result<Vec<u8>> {
    cube.validate()?;
    let dim = |v: usize, what: &str| {
        u32::try_from(v).map_err(|_| Error::Validation(format!("{what} {v} exceeds u32")))
    };
    let mut out = Vec::with_capacity(cube.serialized_len());
    out.extend_from_slice(&SCUB_MAGIC);
    out.push(SCUB_VERSION);
    out.push(DTYPE_F32);
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&dim(cube.width, "width")?.to_le_bytes());
    out.extend_from_slice(&dim(cube.height, "height")?.to_le_bytes());
    out.extend_from_slice(&dim(cube.bands(), "bands")?.to_le_bytes());
    for w in &cube.wavelengths {
        out.extend_from_slice(&w.to_le_bytes());
    }
    for s in &cube.samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    Ok(out)
}

/// Parses `SCUB` bytes. Never returns a partially built cube.
pub fn read_cube(bytes: &[u8]) -> Result<SpectralCube> {
    ensure!(
        bytes.len() >= 4,
        Corrupt,
        "truncated header: {} bytes",
        bytes.len()
    );
    ensure!(
        bytes[0..4] == SCUB_MAGIC,
        Format,
        "bad magic {:?}, expected \"SCUB\"",
        String::from_utf8_lossy(&bytes[0..4])
    );
    ensure!(
        bytes.len() >= SCUB_HEADER_LEN,
        Corrupt,
        "truncated header: {} of {} bytes",
        bytes.len(),
        SCUB_HEADER_LEN
    );
    ensure!(
        bytes[4] == SCUB_VERSION,
        Format,
        "unsupported version {}",
        bytes[4]
    );
    ensure!(
        bytes[5] == DTYPE_F32,
        Format,
        "unsupported dtype tag {}",
        bytes[5]
    );
    let reserved = u16::from_le_bytes([bytes[6], bytes[7]]);
    ensure!(
        reserved == 0,
        Format,
        "reserved field is {reserved}, expected 0"
    );
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let (width, height, bands) = (u32_at(8), u32_at(12), u32_at(16));
    ensure!(
        width >= 1 && height >= 1 && bands >= 1,
        Corrupt,
        "zero dimension in header ({width}x{height}x{bands})"
    );
    let expected = (width as u128 * height as u128 * bands as u128 + bands as u128) * 4
        + SCUB_HEADER_LEN as u128;
    ensure!(
        bytes.len() as u128 == expected,
        Corrupt,
        "length {} does not match header dimensions {width}x{height}x{bands} ({expected} bytes)",
        bytes.len()
    );
    let floats = |start: usize, count: usize| -> Vec<f32> {
        bytes[start..start + 4 * count]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect()
    };
    let wavelengths = floats(SCUB_HEADER_LEN, bands);
    let samples = floats(SCUB_HEADER_LEN + 4 * bands, width * height * bands);
    SpectralCube::new(width, height, wavelengths, samples)
}

pub fn read_cube_file(path: impl AsRef<Path>) -> Result<SpectralCube> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_cube(&bytes)
}

pub fn write_cube_file(cube: &SpectralCube, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_cube(cube)?)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cube_2x2x3() -> SpectralCube {
        let samples = (0..12).map(|i| i as f32 * 0.25).collect();
        SpectralCube::new(2, 2, vec![450.0, 550.0, 650.0], samples).unwrap()
    }

    #[test]
    fn single_sample_round_trip() {
        let c = SpectralCube::new(1, 1, vec![550.0], vec![0.5]).unwrap();
        let bytes = write_cube(&c).unwrap();
        assert_eq!(read_cube(&bytes).unwrap(), c);
    }

    #[test]
    fn byte_layout_2x2x3() {
        let c = cube_2x2x3();
        let bytes = write_cube(&c).unwrap();
        // 20 header + 3*4 wavelengths + 12*4 samples
        assert_eq!(bytes.len(), 80);
        assert_eq!(&bytes[0..4], b"SCUB");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 1);
        assert_eq!(&bytes[6..8], &[0, 0]);
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &2u32.to_le_bytes());
        assert_eq!(&bytes[16..20], &3u32.to_le_bytes());
        assert_eq!(&bytes[20..24], &450f32.to_le_bytes());
        assert_eq!(&bytes[28..32], &650f32.to_le_bytes());
        // band 1, pixel (x=1, y=0) is sample index 5 at offset 32 + 5*4
        assert_eq!(&bytes[52..56], &1.25f32.to_le_bytes());
        assert_eq!(&bytes[76..80], &2.75f32.to_le_bytes());
        assert_eq!(read_cube(&bytes).unwrap(), c);
    }

    #[test]
    fn deterministic_output() {
        assert_eq!(
            write_cube(&cube_2x2x3()).unwrap(),
            write_cube(&cube_2x2x3()).unwrap()
        );
    }

    #[test]
    fn malformed_headers_yield_distinct_errors() {
        let good = write_cube(&cube_2x2x3()).unwrap();

        let mut bad = good.clone();
        bad[0..4].copy_from_slice(b"XXXX");
        assert!(matches!(read_cube(&bad), Err(Error::Format(m)) if m.contains("magic")));

        let mut bad = good.clone();
        bad[5] = 2;
        assert!(matches!(read_cube(&bad), Err(Error::Format(m)) if m.contains("dtype")));

        let mut bad = good.clone();
        bad[4] = 9;
        assert!(matches!(read_cube(&bad), Err(Error::Format(m)) if m.contains("version")));

        let mut bad = good.clone();
        bad[8..12].copy_from_slice(&3u32.to_le_bytes());
        assert!(matches!(read_cube(&bad), Err(Error::Corrupt(m)) if m.contains("length")));

        let mut bad = good.clone();
        bad[16..20].copy_from_slice(&0u32.to_le_bytes());
        assert!(matches!(read_cube(&bad), Err(Error::Corrupt(m)) if m.contains("zero")));

        assert!(matches!(
            read_cube(&good[..good.len() - 1]),
            Err(Error::Corrupt(_))
        ));
        assert!(matches!(read_cube(&good[..10]), Err(Error::Corrupt(_))));
    }

    #[test]
    fn rejects_bad_wavelengths_and_nan() {
        let mut bytes = write_cube(&cube_2x2x3()).unwrap();
        bytes[24..28].copy_from_slice(&450f32.to_le_bytes());
        assert!(matches!(read_cube(&bytes), Err(Error::Validation(_))));

        let mut bytes = write_cube(&cube_2x2x3()).unwrap();
        bytes[40..44].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(read_cube(&bytes), Err(Error::Validation(_))));
    }

    #[test]
    fn constructor_checks_invariants() {
        assert!(SpectralCube::new(0, 1, vec![1.0], vec![]).is_err());
        assert!(SpectralCube::new(1, 1, vec![1.0, 2.0], vec![0.0]).is_err());
        assert!(SpectralCube::new(1, 1, vec![2.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(SpectralCube::new(1, 1, vec![1.0], vec![f32::INFINITY]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            w in 1usize..6, h in 1usize..6, n in 1usize..6,
            seed in any::<u64>(),
        ) {
            let wl: Vec<f32> = (0..n).map(|i| 400.0 + 10.0 * i as f32).collect();
            let mut state = seed | 1;
            let samples: Vec<f32> = (0..w * h * n)
                .map(|_| {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    f32::from_bits((state >> 40) as u32 | 0x3f00_0000)
                })
                .collect();
            let c = SpectralCube::new(w, h, wl, samples).unwrap();
            let bytes = write_cube(&c).unwrap();
            prop_assert_eq!(bytes.len(), scub_len(w, h, n));
            let back = read_cube(&bytes).unwrap();
            prop_assert_eq!(write_cube(&back).unwrap(), bytes);
        }
    }
}
