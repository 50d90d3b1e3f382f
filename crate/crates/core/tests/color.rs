use proptest::prelude::*;

use spectral_codec::color::tables::grid_wavelengths;
use spectral_codec::color::{
    ciede2000, cube_delta_e, cube_delta_e_default, spectral_to_xyz, xyz_to_lab, Illuminant,
    LabColor, ObserverTable, XyzColor,
};
use spectral_codec::synth::synthesize_cube;
use spectral_codec::{Error, SpectralCube};

fn render(spectrum: &[f64]) -> XyzColor {
    spectral_to_xyz(
        spectrum,
        &grid_wavelengths(),
        &ObserverTable::cie1931_2deg(),
        &Illuminant::d65(),
    )
    .unwrap()
}

#[test]
fn perfect_reflector_is_the_d65_white() {
    let w = render(&[1.0; 31]);
    assert!((w.y - 100.0).abs() < 1e-12);
    // D65 white for the 2° observer, 10 nm grid
    assert!((w.x - 94.94).abs() < 0.05, "X = {}", w.x);
    assert!((w.z - 108.71).abs() < 0.05, "Z = {}", w.z);
    let lab = xyz_to_lab(w, w).unwrap();
    assert!((lab.l - 100.0).abs() < 1e-12 && lab.a.abs() < 1e-12 && lab.b.abs() < 1e-12);
}

#[test]
fn rendering_is_linear() {
    let a: Vec<f64> = (0..31).map(|i| 0.1 + 0.02 * i as f64).collect();
    let b: Vec<f64> = (0..31).map(|i| ((i as f64) * 0.4).sin().abs()).collect();
    let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.3 * x + 1.7 * y).collect();
    let (xa, xb, xs) = (render(&a), render(&b), render(&sum));
    assert!((xs.x - (0.3 * xa.x + 1.7 * xb.x)).abs() < 1e-10);
    assert!((xs.y - (0.3 * xa.y + 1.7 * xb.y)).abs() < 1e-10);
    assert!((xs.z - (0.3 * xa.z + 1.7 * xb.z)).abs() < 1e-10);
}

#[test]
fn finer_grid_agrees_with_tabulated_grid() {
    // 5 nm sampling of a smooth spectrum renders close to the 10 nm result
    let f = |nm: f64| 0.4 + 0.3 * ((nm - 400.0) / 60.0).sin();
    let coarse: Vec<f64> = grid_wavelengths().iter().map(|&nm| f(nm)).collect();
    let fine_wl: Vec<f64> = (0..61).map(|i| 400.0 + 5.0 * i as f64).collect();
    let fine: Vec<f64> = fine_wl.iter().map(|&nm| f(nm)).collect();
    let a = render(&coarse);
    let b = spectral_to_xyz(
        &fine,
        &fine_wl,
        &ObserverTable::cie1931_2deg(),
        &Illuminant::d65(),
    )
    .unwrap();
    assert!((a.y - b.y).abs() < 1e-9, "{} vs {}", a.y, b.y);
}

#[test]
fn spectra_short_of_the_observer_span_are_rejected() {
    let wl: Vec<f64> = (0..30).map(|i| 410.0 + 10.0 * i as f64).collect();
    let r = spectral_to_xyz(
        &[0.5; 30],
        &wl,
        &ObserverTable::cie1931_2deg(),
        &Illuminant::d65(),
    );
    assert!(matches!(r, Err(Error::Argument(_))));
}

#[test]
fn dark_colors_use_the_linear_branch() {
    let white = XyzColor {
        x: 95.047,
        y: 100.0,
        z: 108.883,
    };
    let lab = xyz_to_lab(
        XyzColor {
            x: 0.5,
            y: 0.5,
            z: 0.5,
        },
        white,
    )
    .unwrap();
    assert!((lab.l - 903.2962962 * 0.005).abs() < 1e-6, "L = {}", lab.l);
    assert!(xyz_to_lab(
        white,
        XyzColor {
            x: 0.0,
            y: 100.0,
            z: 100.0
        }
    )
    .is_err());
}

proptest! {
    #[test]
    fn ciede2000_is_symmetric_and_nonnegative(
        l1 in 0.0f64..100.0, a1 in -100.0f64..100.0, b1 in -100.0f64..100.0,
        l2 in 0.0f64..100.0, a2 in -100.0f64..100.0, b2 in -100.0f64..100.0,
    ) {
        let (p, q) = (LabColor::new(l1, a1, b1), LabColor::new(l2, a2, b2));
        let d = ciede2000(p, q);
        prop_assert!(d >= 0.0);
        prop_assert!((d - ciede2000(q, p)).abs() < 1e-9);
        prop_assert_eq!(ciede2000(p, p), 0.0);
    }
}

#[test]
fn identical_cubes_score_zero() {
    let cube = synthesize_cube(12, 9, 31, "chart", 4).unwrap();
    let s = cube_delta_e_default(&cube, &cube).unwrap();
    assert_eq!((s.mean, s.max, s.p95), (0.0, 0.0, 0.0));
    assert_eq!((s.width, s.height, s.map.len()), (12, 9, 108));
}

#[test]
fn flat_offset_gives_small_uniform_map() {
    let a = synthesize_cube(8, 8, 31, "flat", 0).unwrap();
    let shifted: Vec<f32> = a.samples().iter().map(|v| v * 1.002).collect();
    let b = SpectralCube::new(8, 8, a.wavelengths().to_vec(), shifted).unwrap();
    let s = cube_delta_e_default(&a, &b).unwrap();
    assert!(s.mean > 0.0 && s.mean < 0.05, "{}", s.mean);
    assert!(s.map.iter().all(|v| (v - s.mean).abs() < 1e-9));
}

#[test]
fn stats_order_and_shape_checks() {
    let a = synthesize_cube(10, 10, 31, "random-smooth", 1).unwrap();
    let b = synthesize_cube(10, 10, 31, "random-smooth", 2).unwrap();
    let s = cube_delta_e(&a, &b, &ObserverTable::cie1931_2deg(), &Illuminant::d65()).unwrap();
    assert!(s.mean <= s.p95 && s.p95 <= s.max);
    let c = synthesize_cube(10, 5, 31, "random-smooth", 2).unwrap();
    assert!(matches!(
        cube_delta_e_default(&a, &c),
        Err(Error::Argument(_))
    ));
}
