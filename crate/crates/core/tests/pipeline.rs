//! End-to-end checks across builders, files, detectors and the channel.

use std::io::Write;

use zopt::channel::{count_mismatches, run_ser, Detector, DetectorKind};
use zopt::constellations::{build, build_man_opt, build_s_opt, BuildConfig};
use zopt::io::{read_constellation, write_constellation, Provenance, RunConfig};
use zopt::manifold::{fejes_toth_bound, min_chordal_distance, Method};
use zopt::packing::{exact_packing, format_packing, load_packing, PackingOptimizerConfig};

#[test]
fn icosahedron_file_attains_the_bound() {
    let ico = exact_packing(12).unwrap();
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(format_packing(&ico).as_bytes()).unwrap();
    let loaded = load_packing(f.path()).unwrap();
    let x = build_s_opt(&loaded).unwrap();
    let ratio = min_chordal_distance(&x).unwrap() / fejes_toth_bound(12).unwrap();
    assert!((ratio - 1.0).abs() < 1e-6, "ratio {ratio}");
}

#[test]
fn packing_file_feeds_the_builder() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# octahedron\n6\n1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -1").unwrap();
    let cfg = BuildConfig { packing_file: Some(f.path().to_path_buf()), ..Default::default() };
    // C = 6 has no bit count, so go through the packing directly.
    let x = build_s_opt(&load_packing(f.path()).unwrap()).unwrap();
    assert!((min_chordal_distance(&x).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    // A file of the wrong size is rejected for B = 3.
    assert!(build(Method::SOpt, 3, 0, &cfg).is_err());
}

#[test]
fn man_opt_sixteen_points_is_within_the_bound() {
    let x = build_man_opt(16, 3, &PackingOptimizerConfig::default()).unwrap();
    let ratio = min_chordal_distance(&x).unwrap() / fejes_toth_bound(16).unwrap();
    assert!(ratio > 0.9 && ratio <= 1.0 + 1e-9, "ratio {ratio}");
}

#[test]
fn constellation_files_round_trip_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.json");
    let x = build(Method::ZOpt, 6, 1, &BuildConfig::default()).unwrap().constellation;
    let cfg = RunConfig { seed: 1, ..Default::default() };
    write_constellation(&path, &x, Some(Provenance::new(&cfg))).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains(&cfg.hash()));
    assert_eq!(read_constellation(&path).unwrap(), x);
}

#[test]
fn run_config_round_trips_and_rejects_unknown_fields() {
    let cfg = RunConfig { bits: Some(5), snr_db: vec![0.0, 7.5], trials: 10, ..Default::default() };
    let back = RunConfig::from_json(&cfg.to_json().unwrap()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.hash(), cfg.hash());
    let bad = cfg.to_json().unwrap().replacen('{', "{\"bogus\": 1,", 1);
    assert!(RunConfig::from_json(&bad).is_err());
    let future = cfg.to_json().unwrap().replace("\"1.0\"", "\"2.0\"");
    assert!(RunConfig::from_json(&future).is_err());
}

#[test]
fn zopt_detector_matches_glrt_on_the_channel() {
    let x = build(Method::ZOpt, 8, 0, &BuildConfig::default()).unwrap().constellation;
    let glrt = Detector::prepare(DetectorKind::Glrt, &x).unwrap();
    let zopt = Detector::prepare(DetectorKind::Zopt, &x).unwrap();
    let n = count_mismatches(&x, &glrt, &zopt, 5.0, 20_000, 2, 4).unwrap();
    assert_eq!(n, 0);
}

#[test]
fn ser_decreases_with_snr_and_is_reproducible() {
    let x = build(Method::SOpt, 4, 0, &BuildConfig::default()).unwrap().constellation;
    let snr = [0.0, 10.0, 20.0];
    let a = run_ser(&x, DetectorKind::Sopt, &snr, 20_000, 2, 8).unwrap();
    let b = run_ser(&x, DetectorKind::Sopt, &snr, 20_000, 2, 8).unwrap();
    assert_eq!(a, b);
    assert!(a.ser[0] > a.ser[1] && a.ser[1] > a.ser[2]);
    let g = run_ser(&x, DetectorKind::Glrt, &snr, 20_000, 2, 8).unwrap();
    assert_eq!(g.errors, a.errors);
}
