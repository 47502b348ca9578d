//! Runs the `zopt` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn zopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zopt")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = zopt(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn construct(dir: &Path, method: &str, bits: u32) -> String {
    let path = dir.join(format!("{method}-{bits}.json"));
    let p = path.to_str().unwrap().to_string();
    ok(&["construct", "--method", method, "--bits", &bits.to_string(), "-o", &p]);
    p
}

fn report(path: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(format!("{path}.report.json")).unwrap()).unwrap()
}

/// Data rows of a CSV with `#` comment lines removed.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

/// Minimum chordal distance of the eight-point square antiprism.
fn antiprism_dmin() -> f64 {
    ((4.0 - 2f64.sqrt()) / 7.0).sqrt()
}

#[test]
fn construct_zopt_three_bits() {
    let dir = tempfile::tempdir().unwrap();
    let p = construct(dir.path(), "z-opt", 3);
    let r = report(&p);
    assert_eq!(r["C"], 8);
    assert!((r["d_min"].as_f64().unwrap() - antiprism_dmin()).abs() < 1e-9);
    assert_eq!(r["n_v"], 1);
    assert!(r["provenance"]["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn construct_sopt_tetrahedron_and_grass_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&construct(dir.path(), "s-opt", 2));
    assert!((r["d_min"].as_f64().unwrap() - 0.8164966).abs() < 1e-6);
    let p = construct(dir.path(), "grass-lattice", 2);
    let x: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let cw = x["codewords"].as_array().unwrap();
    assert_eq!(cw.len(), 4);
    for c in cw {
        let v: Vec<f64> = c.as_array().unwrap().iter().map(|e| e.as_f64().unwrap()).collect();
        assert!((v.iter().map(|e| e * e).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn evaluate_tabulates_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<String> = (1..=3).map(|b| construct(dir.path(), "z-opt", b)).collect();
    let mut args = vec!["evaluate"];
    args.extend(files.iter().map(String::as_str));
    let text = ok(&args);
    assert!(text.starts_with("# tool: zopt"));
    assert!(text.contains("# C = 2"));
    let r = rows(&text);
    let dmin: Vec<f64> = r.iter().map(|row| row[3].parse().unwrap()).collect();
    for (got, want) in dmin.iter().zip([1.0, 6f64.sqrt() / 3.0, antiprism_dmin()]) {
        assert!((got - want).abs() < 1e-8);
    }
    assert_eq!(r[0][4], "");
    for row in &r {
        assert!(row[5].parse::<f64>().unwrap() <= 1.0 + 1e-9);
    }
}

#[test]
fn bound_table_and_domain() {
    let text = ok(&["bound", "--from", "3", "--to", "40"]);
    let vals: Vec<f64> = rows(&text).iter().map(|r| r[1].parse().unwrap()).collect();
    assert!((vals[0] - 0.8660254).abs() < 1e-7);
    assert!((vals[1] - 0.8164966).abs() < 1e-7);
    assert!(vals.windows(2).all(|w| w[1] < w[0]));
    let out = zopt(&["bound", "--from", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = construct(dir.path(), "s-opt", 3);
    let out = zopt(&["simulate", "-c", &p, "--snr", "10", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = zopt(&["construct", "--method", "nope", "--bits", "3", "-o", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_glrt_is_exhaustive() {
    let dir = tempfile::tempdir().unwrap();
    let p = construct(dir.path(), "z-opt", 6);
    let text = ok(&["bench", "-c", &p, "--detectors", "glrt,zopt", "--trials", "2000", "--snr", "10"]);
    let r = rows(&text);
    assert_eq!(r[0][0], "glrt");
    assert_eq!(r[0][4].parse::<f64>().unwrap(), 64.0);
    assert!(r[1][5].parse::<u64>().unwrap() <= 4);
}

#[test]
fn glrt_and_sopt_ser_columns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = construct(dir.path(), "s-opt", 5);
    let run = |d: &str| {
        let text = ok(&["simulate", "-c", &p, "-d", d, "--snr", "-5,0,5,10", "--trials", "5000", "-n", "2", "--seed", "3"]);
        rows(&text).into_iter().map(|r| r[3].clone()).collect::<Vec<_>>()
    };
    assert_eq!(run("glrt"), run("sopt"));
}

#[test]
fn simulate_json_and_config_replay() {
    let dir = tempfile::tempdir().unwrap();
    let p = construct(dir.path(), "z-opt", 4);
    let cfg = dir.path().join("run.json");
    let first = ok(&[
        "simulate", "-c", &p, "-d", "zopt", "--snr", "0,10", "--trials", "1000", "--format", "json",
        "--save-config", cfg.to_str().unwrap(),
    ]);
    let replay = ok(&["simulate", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(first, replay);
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["curve"]["ser"].as_array().unwrap().len(), 2);
}

#[test]
fn detect_reads_received_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let p = construct(dir.path(), "z-opt", 2);
    let x: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    // Noise-free blocks y = codeword, two columns each.
    let mut csv = String::from("trial,col,y0_re,y0_im,y1_re,y1_im\n");
    for (k, c) in x["codewords"].as_array().unwrap().iter().enumerate() {
        let v: Vec<f64> = c.as_array().unwrap().iter().map(|e| e.as_f64().unwrap()).collect();
        for col in 0..2 {
            csv.push_str(&format!("{k},{col},{},{},{},{}\n", v[0], v[1], v[2], v[3]));
        }
    }
    let input = dir.path().join("y.csv");
    std::fs::write(&input, csv).unwrap();
    for d in ["glrt", "sopt", "zopt"] {
        let text = ok(&["detect", "-c", &p, "-d", d, "-i", input.to_str().unwrap()]);
        let idx: Vec<String> = rows(&text).into_iter().map(|r| r[1].clone()).collect();
        assert_eq!(idx, ["0", "1", "2", "3"], "{d}");
    }
    std::fs::write(&input, "trial,col,y0_re\n0,0,1\n").unwrap();
    let out = zopt(&["detect", "-c", &p, "-i", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}
