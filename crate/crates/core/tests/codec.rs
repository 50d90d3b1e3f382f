use proptest::prelude::*;

use spectral_codec::container::side_info_len;
use spectral_codec::cube::scub_len;
use spectral_codec::reduction::{csi_select_knots, pca_fit, pca_forward, pca_inverse};
use spectral_codec::spatial::{decode_plane, encode_plane};
use spectral_codec::synth::synthesize_cube;
use spectral_codec::{
    compress, compress_at_quality, decompress, decompress_bytes, parse_stream, read_cube,
    write_cube, Error, Method, RateTarget, SpectralCube,
};

fn cube_strategy() -> impl Strategy<Value = SpectralCube> {
    (2usize..6, 1usize..6, 1usize..7).prop_flat_map(|(w, h, n)| {
        prop::collection::vec(0.0f32..1.0, w * h * n).prop_map(move |samples| {
            let wl = (0..n).map(|i| 400.0 + 15.0 * i as f32).collect();
            SpectralCube::new(w, h, wl, samples).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scub_round_trip(cube in cube_strategy()) {
        let bytes = write_cube(&cube).unwrap();
        prop_assert_eq!(bytes.len(), scub_len(cube.width(), cube.height(), cube.bands()));
        prop_assert_eq!(read_cube(&bytes).unwrap(), cube);
    }

    #[test]
    fn scmp_round_trip(cube in cube_strategy(), q in 1u8..=100, csi in any::<bool>()) {
        let n = cube.bands();
        let (method, p) = if csi && n >= 2 { (Method::Csi, 2.max(n / 2)) } else { (Method::Pca, 1.max(n / 2)) };
        let out = compress_at_quality(&cube, method, p, q).unwrap();
        let parsed = parse_stream(&out.bytes).unwrap();
        prop_assert_eq!(&parsed, &out.stream);
        let back = decompress(&parsed).unwrap();
        prop_assert!(back.same_shape(&cube));
        prop_assert_eq!(back.wavelengths(), cube.wavelengths());
    }

    #[test]
    fn every_truncation_is_rejected(cube in cube_strategy(), cut in 1usize..64) {
        let bytes = compress_at_quality(&cube, Method::Pca, 1, 75).unwrap().bytes;
        let keep = bytes.len().saturating_sub(cut);
        prop_assert!(decompress_bytes(&bytes[..keep]).is_err());
        prop_assert!(read_cube(&write_cube(&cube).unwrap()[..keep.min(20 + 4 * cube.bands())]).is_err());
    }
}

#[test]
fn one_byte_truncation_is_corrupt() {
    let cube = synthesize_cube(16, 16, 8, "gaussian-spectra", 2).unwrap();
    let bytes = compress_at_quality(&cube, Method::Csi, 4, 80)
        .unwrap()
        .bytes;
    assert!(matches!(
        decompress_bytes(&bytes[..bytes.len() - 1]),
        Err(Error::Corrupt(_))
    ));
    let scub = write_cube(&cube).unwrap();
    assert!(matches!(
        read_cube(&scub[..scub.len() - 1]),
        Err(Error::Corrupt(_))
    ));
}

#[test]
fn bad_magic_is_format_error() {
    let cube = synthesize_cube(4, 4, 3, "ramp", 0).unwrap();
    let mut bytes = compress_at_quality(&cube, Method::Pca, 2, 80)
        .unwrap()
        .bytes;
    bytes[0] = b'X';
    assert!(matches!(parse_stream(&bytes), Err(Error::Format(_))));
    let mut scub = write_cube(&cube).unwrap();
    scub[3] = b'?';
    assert!(matches!(read_cube(&scub), Err(Error::Format(_))));
}

#[test]
fn container_length_accounts_for_every_part() {
    let cube = synthesize_cube(24, 16, 12, "random-smooth", 9).unwrap();
    for (method, p) in [(Method::Pca, 3), (Method::Csi, 5)] {
        let out = compress_at_quality(&cube, method, p, 50).unwrap();
        let planes: usize = out
            .stream
            .planes
            .iter()
            .map(|pl| 29 + pl.payload.len())
            .sum();
        assert_eq!(
            out.bytes.len(),
            19 + 4 * 12 + side_info_len(method, 12, p) + planes
        );
        let cr = scub_len(24, 16, 12) as f64 / out.bytes.len() as f64;
        assert!((out.achieved_cr - cr).abs() < 1e-12);
    }
}

#[test]
fn full_rank_pca_at_top_quality_is_near_lossless() {
    let cube = synthesize_cube(32, 32, 10, "random-smooth", 4).unwrap();
    let out = compress_at_quality(&cube, Method::Pca, 10, 100).unwrap();
    let back = decompress(&out.stream).unwrap();
    let worst = cube
        .samples()
        .iter()
        .zip(back.samples())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f32, f32::max);
    assert!(worst < 0.02, "max abs error {worst}");
}

#[test]
fn rate_control_lands_in_band_and_is_deterministic() {
    let cube = synthesize_cube(64, 64, 31, "skin", 1).unwrap();
    let rate = RateTarget::new(8.0, 0.05).unwrap();
    let a = compress(&cube, Method::Pca, 20, rate).unwrap();
    assert!(a.within_tolerance);
    assert!(rate.contains(a.achieved_cr));
    assert!(a.encodes <= 7, "{} encodes", a.encodes);
    let b = compress(&cube, Method::Pca, 20, rate).unwrap();
    assert_eq!(a.bytes, b.bytes);
    for (m, p) in [
        (Method::Pca, 2),
        (Method::Csi, 12),
        (Method::Pca, 30),
        (Method::Csi, 31),
    ] {
        let out = compress(&cube, m, p, rate).unwrap();
        assert!(out.encodes <= 7, "{m} p={p}: {} encodes", out.encodes);
    }
}

#[test]
fn too_few_planes_overshoot_the_band() {
    // at p=2 every quality still compresses far beyond CR 8
    let cube = synthesize_cube(64, 64, 31, "skin", 1).unwrap();
    let out = compress(&cube, Method::Pca, 2, RateTarget::new(8.0, 0.05).unwrap()).unwrap();
    assert!(!out.within_tolerance);
    assert!(out.achieved_cr > 8.4);
    assert_eq!(out.stream.quality, 100);
}

#[test]
fn rate_target_rejects_nonsense() {
    assert!(RateTarget::new(1.0, 0.05).is_err());
    assert!(RateTarget::new(8.0, 0.0).is_err());
    assert!(RateTarget::new(8.0, 1.0).is_err());
    assert!(RateTarget::new(f64::NAN, 0.05).is_err());
}

#[test]
fn invalid_plane_counts_are_argument_errors() {
    let cube = synthesize_cube(8, 8, 6, "ramp", 0).unwrap();
    for (m, p) in [
        (Method::Pca, 0),
        (Method::Pca, 7),
        (Method::Csi, 1),
        (Method::Csi, 7),
    ] {
        assert!(
            matches!(
                compress_at_quality(&cube, m, p, 50),
                Err(Error::Argument(_))
            ),
            "{m} p={p}"
        );
    }
    assert!(csi_select_knots(6, 1).is_err());
}

#[test]
fn knot_selection_is_even_and_keeps_ends() {
    assert_eq!(
        csi_select_knots(31, 4).unwrap().knot_indices,
        vec![0, 10, 20, 30]
    );
    assert_eq!(
        csi_select_knots(31, 31).unwrap().knot_indices,
        (0..31).collect::<Vec<_>>()
    );
    assert_eq!(csi_select_knots(5, 2).unwrap().knot_indices, vec![0, 4]);
}

#[test]
fn pca_rank_one_cube_is_recovered_by_one_component() {
    let (w, h, n) = (6, 5, 7);
    let shape: Vec<f32> = (0..n).map(|b| 0.2 + 0.1 * b as f32).collect();
    let mut samples = vec![0f32; w * h * n];
    for b in 0..n {
        for px in 0..w * h {
            samples[b * w * h + px] = shape[b] * (0.3 + 0.02 * px as f32);
        }
    }
    let wl = (0..n).map(|i| 400.0 + 50.0 * i as f32).collect();
    let cube = SpectralCube::new(w, h, wl, samples).unwrap();
    let side = pca_fit(&cube, 1).unwrap();
    let back = pca_inverse(
        &pca_forward(&cube, &side).unwrap(),
        &side,
        cube.wavelengths(),
        None,
    )
    .unwrap();
    for (a, b) in cube.samples().iter().zip(back.samples()) {
        assert!((a - b).abs() < 1e-5);
    }
}

#[test]
fn plane_coder_handles_ragged_sizes() {
    for (w, h) in [(1, 1), (7, 3), (9, 17), (16, 8)] {
        let plane: Vec<f64> = (0..w * h).map(|i| (i as f64 * 0.37).sin() * 40.0).collect();
        let enc = encode_plane(&plane, w, h, 95).unwrap();
        let dec = decode_plane(&enc).unwrap();
        assert_eq!(dec.len(), plane.len());
        let err = plane
            .iter()
            .zip(&dec)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 2.5, "{w}x{h}: {err}");
    }
}

#[test]
fn flat_plane_survives_low_quality() {
    let plane = vec![3.25; 40 * 24];
    let dec = decode_plane(&encode_plane(&plane, 40, 24, 1).unwrap()).unwrap();
    assert!(dec.iter().all(|v| (v - 3.25).abs() < 1e-9));
}

#[test]
fn top_quality_smooth_plane_psnr() {
    let cube = synthesize_cube(64, 64, 31, "random-smooth", 3).unwrap();
    let plane: Vec<f64> = cube.band(15).iter().map(|&v| f64::from(v)).collect();
    let enc = encode_plane(&plane, 64, 64, 100).unwrap();
    let dec = decode_plane(&enc).unwrap();
    let (lo, hi) = plane
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    let mse = plane
        .iter()
        .zip(&dec)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / plane.len() as f64;
    let psnr = 10.0 * ((hi - lo).powi(2) / mse).log10();
    assert!(psnr >= 40.0, "PSNR {psnr:.2} dB");
}

#[test]
fn full_rank_top_quality_error_is_quantization_bounded() {
    let cube = synthesize_cube(16, 16, 8, "random-smooth", 5).unwrap();
    let out = compress_at_quality(&cube, Method::Pca, 8, 100).unwrap();
    let scale = out
        .stream
        .planes
        .iter()
        .map(|p| p.norm.scale)
        .fold(0.0, f64::max);
    let back = decompress(&out.stream).unwrap();
    for (a, b) in cube.samples().iter().zip(back.samples()) {
        assert!(
            f64::from((a - b).abs()) <= 2.0 * scale,
            "{a} vs {b}, scale {scale}"
        );
    }
}
