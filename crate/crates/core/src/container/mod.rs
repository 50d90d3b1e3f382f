//! End-to-end codec: spectral reduction, plane coding at one shared quality,
//! and rate control that searches that quality for a target compression rate.

mod stream;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

pub use stream::{
    parse_stream, serialize_stream, side_info_len, CompressedStream, SideInfo, SCMP_HEADER_LEN,
};

use crate::cube::SpectralCube;
use crate::error::{ensure, Error, Result};
use crate::par;
use crate::reduction::{
    csi_forward, csi_inverse, csi_select_knots, pca_fit, pca_forward, pca_inverse, Method,
    ReducedPlanes,
};
use crate::spatial::plane::PLANE_HEADER_LEN;
use crate::spatial::{decode_plane, EncodedPlane, PreparedPlane};

/// Requested compression rate and the accepted relative deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTarget {
    pub target_cr: f64,
    pub tolerance: f64,
}

impl RateTarget {
    pub const DEFAULT_TOLERANCE: f64 = 0.05;

    pub fn new(target_cr: f64, tolerance: f64) -> Result<Self> {
        ensure!(
            target_cr.is_finite() && target_cr > 1.0,
            Argument,
            "target CR must be > 1 (got {target_cr})"
        );
        ensure!(
            tolerance > 0.0 && tolerance < 1.0,
            Argument,
            "tolerance must lie in (0, 1) (got {tolerance})"
        );
        Ok(RateTarget {
            target_cr,
            tolerance,
        })
    }

    pub fn lower(&self) -> f64 {
        self.target_cr * (1.0 - self.tolerance)
    }

    pub fn upper(&self) -> f64 {
        self.target_cr * (1.0 + self.tolerance)
    }

    pub fn contains(&self, cr: f64) -> bool {
        cr >= self.lower() && cr <= self.upper()
    }
}

/// Wall time of the two pipeline stages.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub spectral: Duration,
    pub spatial: Duration,
}

/// Result of [`compress`].
#[derive(Debug, Clone)]
pub struct Compressed {
    pub stream: CompressedStream,
    pub bytes: Vec<u8>,
    pub achieved_cr: f64,
    /// False when no quality lands inside the tolerance band; the stream is
    /// then the smallest CR at or above the target.
    pub within_tolerance: bool,
    /// Number of distinct qualities encoded during the search.
    pub encodes: usize,
    pub timings: StageTimings,
}

/// Original SCUB size over serialized stream size.
pub fn compression_rate(original: &SpectralCube, stream_bytes: usize) -> f64 {
    original.serialized_len() as f64 / stream_bytes as f64
}

/// Forward spectral stage. PCA side info is rounded to the f32 values the
/// container stores, so encoder and decoder use identical bases.
pub fn reduce(cube: &SpectralCube, method: Method, p: usize) -> Result<(SideInfo, ReducedPlanes)> {
    match method {
        Method::Pca => {
            let side = pca_fit(cube, p)?.rounded_to_f32();
            let planes = pca_forward(cube, &side)?;
            Ok((SideInfo::Pca(side), planes))
        }
        Method::Csi => {
            let side = csi_select_knots(cube.bands(), p)?;
            let planes = csi_forward(cube, &side)?;
            Ok((SideInfo::Csi(side), planes))
        }
    }
}

/// Inverse spectral stage.
pub fn expand(
    planes: &ReducedPlanes,
    side: &SideInfo,
    wavelengths: &[f32],
) -> Result<SpectralCube> {
    match side {
        SideInfo::Pca(s) => pca_inverse(planes, s, wavelengths, None),
        SideInfo::Csi(s) => csi_inverse(planes, s, wavelengths),
    }
}

struct PlaneSet {
    prepared: Vec<PreparedPlane>,
    cache: BTreeMap<u8, Vec<EncodedPlane>>,
}

impl PlaneSet {
    fn new(planes: &ReducedPlanes) -> Result<Self> {
        let prepared = par::try_map_range(planes.count(), |k| {
            PreparedPlane::new(&planes.planes[k], planes.width, planes.height)
        })?;
        Ok(PlaneSet {
            prepared,
            cache: BTreeMap::new(),
        })
    }

    fn encode(&mut self, quality: u8) -> Result<&[EncodedPlane]> {
        if !self.cache.contains_key(&quality) {
            let encoded =
                par::try_map_range(self.prepared.len(), |k| self.prepared[k].encode(quality))?;
            self.cache.insert(quality, encoded);
        }
        Ok(&self.cache[&quality])
    }

    fn payload_len(&mut self, quality: u8) -> Result<usize> {
        Ok(self
            .encode(quality)?
            .iter()
            .map(|e| e.serialized_len())
            .sum())
    }
}

fn assemble(
    cube: &SpectralCube,
    side: SideInfo,
    quality: u8,
    planes: Vec<EncodedPlane>,
) -> Result<(CompressedStream, Vec<u8>)> {
    let stream = CompressedStream {
        width: cube.width(),
        height: cube.height(),
        wavelengths: cube.wavelengths().to_vec(),
        quality,
        side,
        planes,
    };
    let bytes = serialize_stream(&stream)?;
    Ok((stream, bytes))
}

/// Compresses at a fixed quality, bypassing rate control.
pub fn compress_at_quality(
    cube: &SpectralCube,
    method: Method,
    p: usize,
    quality: u8,
) -> Result<Compressed> {
    let t0 = Instant::now();
    let (side, planes) = reduce(cube, method, p)?;
    let spectral = t0.elapsed();
    let t1 = Instant::now();
    let mut set = PlaneSet::new(&planes)?;
    let encoded = set.encode(quality)?.to_vec();
    let (stream, bytes) = assemble(cube, side, quality, encoded)?;
    let spatial = t1.elapsed();
    let achieved_cr = compression_rate(cube, bytes.len());
    Ok(Compressed {
        stream,
        bytes,
        achieved_cr,
        within_tolerance: true,
        encodes: 1,
        timings: StageTimings { spectral, spatial },
    })
}

/// Compresses with rate control: binary-searches the shared quality so that
/// the achieved CR falls within `rate.tolerance` of `rate.target_cr`.
pub fn compress(
    cube: &SpectralCube,
    method: Method,
    p: usize,
    rate: RateTarget,
) -> Result<Compressed> {
    cube.validate()?;
    let t0 = Instant::now();
    let (side, planes) = reduce(cube, method, p)?;
    let spectral = t0.elapsed();

    let t1 = Instant::now();
    let original = cube.serialized_len() as f64;
    let overhead = SCMP_HEADER_LEN
        + 4 * cube.bands()
        + side_info_len(method, cube.bands(), p)
        + PLANE_HEADER_LEN * p;
    let ceiling = original / overhead as f64;
    if ceiling < rate.lower() {
        return Err(Error::Rate {
            reason: format!("stream overhead alone ({overhead} bytes) exceeds the byte budget"),
            best_cr: ceiling,
            target_cr: rate.target_cr,
        });
    }

    let mut set = PlaneSet::new(&planes)?;
    let cr_at = |set: &mut PlaneSet, q: u8| -> Result<f64> {
        Ok(original / (overhead - PLANE_HEADER_LEN * p + set.payload_len(q)?) as f64)
    };

    // Largest q with CR(q) >= target; CR is non-increasing in q. `lo = 0`
    // stands for "no quality qualifies", so at most ceil(log2 101) = 7
    // distinct qualities get encoded. Every final `hi` except 101 has been
    // probed, so the follow-up lookups below hit the cache.
    let (mut lo, mut hi) = (0u8, 101u8);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if cr_at(&mut set, mid)? >= rate.target_cr {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let chosen = if lo == 0 {
        let cr1 = cr_at(&mut set, 1)?;
        if cr1 < rate.lower() {
            return Err(Error::Rate {
                reason: "target unreachable even at quality 1".into(),
                best_cr: cr1,
                target_cr: rate.target_cr,
            });
        }
        1
    } else if lo == 100 || cr_at(&mut set, lo)? <= rate.upper() {
        lo
    } else if cr_at(&mut set, lo + 1)? >= rate.lower() {
        lo + 1
    } else {
        lo
    };

    let encodes = set.cache.len();
    let encoded = set.encode(chosen)?.to_vec();
    let (stream, bytes) = assemble(cube, side, chosen, encoded)?;
    let spatial = t1.elapsed();
    let achieved_cr = compression_rate(cube, bytes.len());
    Ok(Compressed {
        stream,
        bytes,
        achieved_cr,
        within_tolerance: rate.contains(achieved_cr),
        encodes,
        timings: StageTimings { spectral, spatial },
    })
}

/// Decodes a stream back to a cube with the original dimensions and grid.
pub fn decompress(stream: &CompressedStream) -> Result<SpectralCube> {
    decompress_timed(stream).map(|(c, _)| c)
}

pub fn decompress_timed(stream: &CompressedStream) -> Result<(SpectralCube, StageTimings)> {
    stream.validate()?;
    let t0 = Instant::now();
    let planes = par::try_map_range(stream.planes.len(), |k| decode_plane(&stream.planes[k]))?;
    let planes = ReducedPlanes::new(stream.width, stream.height, planes)
        .map_err(|e| Error::Corrupt(e.to_string()))?;
    let spatial = t0.elapsed();
    let t1 = Instant::now();
    let cube = expand(&planes, &stream.side, &stream.wavelengths)
        .map_err(|e| Error::Corrupt(e.to_string()))?;
    let spectral = t1.elapsed();
    Ok((cube, StageTimings { spectral, spatial }))
}

/// Parses and decodes serialized stream bytes.
pub fn decompress_bytes(bytes: &[u8]) -> Result<SpectralCube> {
    decompress(&parse_stream(bytes)?)
}
