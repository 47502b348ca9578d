use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use num_complex::Complex64;
use serde_json::json;

use zopt::channel::{bench_detectors, run_ser, Detector, DetectorKind};
use zopt::constellations::{build, BuildConfig};
use zopt::detectors::ReceivedBlock;
use zopt::io::{read_constellation, read_text, write_constellation, write_text, Provenance, RunConfig};
use zopt::manifold::{fejes_toth_bound, min_chordal_distance, Method};

use crate::{
    BenchArgs, BoundArgs, Command, CommonArgs, ConstructArgs, DetectArgs, EvaluateArgs, SimArgs, SimulateArgs,
    EXIT_DATA, EXIT_NUMERICAL, EXIT_USAGE,
};

/// Invalid or missing command-line parameters.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<zopt::Error>() {
            return match e {
                zopt::Error::Numerical(_) => EXIT_NUMERICAL,
                _ => EXIT_DATA,
            };
        }
    }
    EXIT_DATA
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Construct(a) => construct(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Bound(a) => bound(a),
        Command::Simulate(a) => simulate(a),
        Command::Bench(a) => bench(a),
        Command::Detect(a) => detect(a),
    }
}

fn base_config(common: &CommonArgs, command: &str) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_json(&read_text(path)?).with_context(|| format!("loading {}", path.display()))?,
        None => RunConfig::default(),
    };
    cfg.command = command.into();
    Ok(cfg)
}

fn finish_config(common: &CommonArgs, cfg: &RunConfig) -> Result<Provenance> {
    if let Some(path) = &common.save_config {
        write_text(path, &cfg.to_json()?)?;
    }
    Ok(Provenance::new(cfg))
}

fn emit(common: &CommonArgs, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => Ok(write_text(path, text)?),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_method(s: &str) -> Result<Method> {
    s.parse::<Method>().map_err(|e| usage(e.to_string()))
}

fn parse_detector(s: &str) -> Result<DetectorKind> {
    s.parse::<DetectorKind>().map_err(|e| usage(e.to_string()))
}

fn build_config(cfg: &RunConfig) -> BuildConfig {
    BuildConfig {
        zopt: cfg.zopt.clone(),
        packing: cfg.packing.clone(),
        grass_lattice: cfg.grass_lattice.clone(),
        packing_file: cfg.packing_file.clone(),
    }
}

fn bound_cell(count: usize) -> (String, f64) {
    match fejes_toth_bound(count) {
        Ok(b) => (format!("{b:.9}"), b),
        Err(_) => (String::new(), 1.0),
    }
}

fn construct(a: ConstructArgs) -> Result<()> {
    let mut cfg = base_config(&a.common, "construct")?;
    if let Some(m) = &a.method {
        cfg.method = Some(parse_method(m)?);
    }
    if a.bits.is_some() {
        cfg.bits = a.bits;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.packing_file.is_some() {
        cfg.packing_file = a.packing_file.clone();
    }
    if let Some(alpha) = a.alpha {
        cfg.grass_lattice.alpha = alpha;
    }
    let method = cfg.method.ok_or_else(|| usage("--method is required"))?;
    let bits = cfg.bits.ok_or_else(|| usage("--bits is required"))?;
    let out = a.common.out.clone().ok_or_else(|| usage("--out is required for construct"))?;
    let provenance = finish_config(&a.common, &cfg)?;

    let built = build(method, bits, cfg.seed, &build_config(&cfg)).with_context(|| format!("building {method} B={bits}"))?;
    let x = &built.constellation;
    write_constellation(&out, x, Some(provenance.clone()))?;

    let d = min_chordal_distance(x)?;
    let (_, b) = bound_cell(x.len());
    let mut report = json!({
        "provenance": provenance,
        "method": method,
        "B": bits,
        "C": x.len(),
        "d_min": d,
        "fejes_toth_bound": if x.len() > 2 { json!(b) } else { json!(null) },
        "bound_note": if x.len() == 2 { json!("C = 2: bound singular, exact optimum 1 used for ratio") } else { json!(null) },
        "ratio": d / b,
    });
    if let Some(z) = &built.zopt {
        report["n_v"] = json!(z.structure.n_v);
        report["layers"] = json!(z.structure.layers);
        report["candidate_set_size"] = json!(z.structure.candidate_count());
        report["theta"] = json!(z.theta);
        if let Some(sol) = &z.solution {
            report["objective_calls"] = json!(sol.objective_calls);
        }
    }
    let report_path = a.report.unwrap_or_else(|| sidecar_path(&out));
    write_text(&report_path, &serde_json::to_string_pretty(&report)?)?;
    eprintln!("wrote {} ({} codewords, d_min = {d:.9})", out.display(), x.len());
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".report.json");
    PathBuf::from(s)
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let mut cfg = base_config(&a.common, "evaluate")?;
    cfg.inputs = a.inputs.clone();
    let provenance = finish_config(&a.common, &cfg)?;
    let mut text = provenance.csv_header();
    let mut has_two = false;
    text.push_str("method,B,C,d_min,fejes_toth_bound,ratio\n");
    for path in &cfg.inputs {
        let x = read_constellation(path).with_context(|| format!("reading {}", path.display()))?;
        let d = min_chordal_distance(&x)?;
        let (cell, b) = bound_cell(x.len());
        has_two |= x.len() == 2;
        let bits = x.bits().map(|b| b.to_string()).unwrap_or_default();
        writeln!(text, "{},{bits},{},{d:.9},{cell},{:.9}", x.method(), x.len(), d / b)?;
    }
    if has_two {
        text.push_str("# C = 2: the bound is singular; the exact optimum 1 is used for the ratio\n");
    }
    emit(&a.common, &text)
}

fn bound(a: BoundArgs) -> Result<()> {
    if a.from < 3 {
        return Err(anyhow!(zopt::Error::Domain(format!(
            "bound needs C >= 3, got {} (C = 2 is exactly 1)",
            a.from
        ))));
    }
    if a.to < a.from {
        return Err(usage(format!("--to {} is below --from {}", a.to, a.from)));
    }
    let mut cfg = base_config(&a.common, "bound")?;
    cfg.bound_range = Some((a.from, a.to));
    let provenance = finish_config(&a.common, &cfg)?;
    let mut text = provenance.csv_header();
    text.push_str("C,fejes_toth_bound\n");
    for c in a.from..=a.to {
        writeln!(text, "{c},{:.9}", fejes_toth_bound(c)?)?;
    }
    emit(&a.common, &text)
}

fn apply_sim(cfg: &mut RunConfig, s: &SimArgs) {
    if s.constellation.is_some() {
        cfg.constellation = s.constellation.clone();
    }
    if let Some(snr) = &s.snr {
        cfg.snr_db = snr.clone();
    }
    if let Some(t) = s.trials {
        cfg.trials = t;
    }
    if let Some(n) = s.antennas {
        cfg.antennas = n as usize;
    }
    if let Some(seed) = s.seed {
        cfg.seed = seed;
    }
}

fn check_sim(cfg: &RunConfig) -> Result<PathBuf> {
    let path = cfg.constellation.clone().ok_or_else(|| usage("--constellation is required"))?;
    if cfg.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if cfg.antennas == 0 {
        return Err(usage("--antennas must be at least 1"));
    }
    if cfg.snr_db.is_empty() {
        return Err(usage("--snr needs at least one value"));
    }
    Ok(path)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = base_config(&a.common, "simulate")?;
    apply_sim(&mut cfg, &a.sim);
    if let Some(d) = &a.detector {
        cfg.detectors = vec![parse_detector(d)?];
    }
    if cfg.detectors.is_empty() {
        cfg.detectors = vec![DetectorKind::Glrt];
    }
    if cfg.detectors.len() != 1 {
        return Err(usage("simulate runs exactly one detector"));
    }
    if a.format != "csv" && a.format != "json" {
        return Err(usage(format!("unknown format '{}' (csv or json)", a.format)));
    }
    let path = check_sim(&cfg)?;
    let provenance = finish_config(&a.common, &cfg)?;
    let x = read_constellation(&path).with_context(|| format!("reading {}", path.display()))?;
    let curve = run_ser(&x, cfg.detectors[0], &cfg.snr_db, cfg.trials, cfg.antennas, cfg.seed)?;
    let text = if a.format == "json" {
        serde_json::to_string_pretty(&json!({
            "provenance": provenance,
            "constellation": path,
            "method": x.method(),
            "C": x.len(),
            "snr_definition": "1 / noise variance per complex entry",
            "curve": curve,
        }))? + "\n"
    } else {
        let mut t = provenance.csv_header();
        writeln!(t, "# detector: {}, antennas: {}, C: {}", curve.detector, curve.antennas, x.len())?;
        t.push_str("snr_db,trials,errors,ser,mean_distance_evals,mean_comparisons\n");
        for k in 0..curve.snr_db.len() {
            writeln!(
                t,
                "{},{},{},{:.9},{:.6},{:.6}",
                curve.snr_db[k], curve.trials, curve.errors[k], curve.ser[k], curve.mean_distance_evals[k], curve.mean_comparisons[k]
            )?;
        }
        t
    };
    emit(&a.common, &text)
}

fn bench(a: BenchArgs) -> Result<()> {
    let mut cfg = base_config(&a.common, "bench")?;
    apply_sim(&mut cfg, &a.sim);
    if let Some(ds) = &a.detectors {
        cfg.detectors = ds.iter().map(|d| parse_detector(d)).collect::<Result<_>>()?;
    }
    if cfg.detectors.is_empty() {
        cfg.detectors = vec![DetectorKind::Glrt, DetectorKind::Sopt];
    }
    if cfg.snr_db.is_empty() {
        cfg.snr_db = vec![10.0];
    }
    let path = check_sim(&cfg)?;
    let provenance = finish_config(&a.common, &cfg)?;
    let x = read_constellation(&path).with_context(|| format!("reading {}", path.display()))?;
    let mut text = provenance.csv_header();
    writeln!(text, "# antennas: {}, C: {}", cfg.antennas, x.len())?;
    text.push_str("detector,snr_db,trials,errors,mean_distance_evals,max_distance_evals,mean_comparisons,max_comparisons\n");
    for &snr in &cfg.snr_db {
        for r in bench_detectors(&x, &cfg.detectors, cfg.trials, cfg.antennas, snr, cfg.seed)? {
            writeln!(
                text,
                "{},{snr},{},{},{:.6},{},{:.6},{}",
                r.detector, r.trials, r.errors, r.mean_distance_evals, r.max_distance_evals, r.mean_comparisons, r.max_comparisons
            )?;
        }
    }
    emit(&a.common, &text)
}

/// Received blocks keyed by trial number, columns in file order.
fn read_blocks(path: &Path) -> Result<BTreeMap<u64, Vec<[Complex64; 2]>>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| anyhow!(zopt::Error::Format { line: 0, msg: e.to_string() }))?;
    let headers = reader.headers().map_err(|e| anyhow!(zopt::Error::Format { line: 1, msg: e.to_string() }))?.clone();
    let expected = ["trial", "col", "y0_re", "y0_im", "y1_re", "y1_im"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(anyhow!(zopt::Error::Format {
            line: 1,
            msg: format!("expected header {}", expected.join(",")),
        }));
    }
    let mut blocks: BTreeMap<u64, Vec<(u64, [Complex64; 2])>> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| anyhow!(zopt::Error::Format { line: 0, msg: e.to_string() }))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let bad = |msg: String| anyhow!(zopt::Error::Format { line, msg });
        let int = |k: usize| rec[k].parse::<u64>().map_err(|e| bad(format!("column {}: {e}", expected[k])));
        let num = |k: usize| rec[k].parse::<f64>().map_err(|e| bad(format!("column {}: {e}", expected[k])));
        let (trial, col) = (int(0)?, int(1)?);
        let y = [Complex64::new(num(2)?, num(3)?), Complex64::new(num(4)?, num(5)?)];
        blocks.entry(trial).or_default().push((col, y));
    }
    Ok(blocks
        .into_iter()
        .map(|(t, mut cols)| {
            cols.sort_by_key(|c| c.0);
            (t, cols.into_iter().map(|c| c.1).collect())
        })
        .collect())
}

fn detect(a: DetectArgs) -> Result<()> {
    let mut cfg = base_config(&a.common, "detect")?;
    let kind = parse_detector(&a.detector)?;
    cfg.detectors = vec![kind];
    cfg.constellation = Some(a.constellation.clone());
    cfg.inputs = vec![a.input.clone()];
    let provenance = finish_config(&a.common, &cfg)?;
    let x = read_constellation(&a.constellation).with_context(|| format!("reading {}", a.constellation.display()))?;
    let detector = Detector::prepare(kind, &x)?;
    let blocks = read_blocks(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let mut text = provenance.csv_header();
    text.push_str("trial,index,distance_evals,comparisons\n");
    for (trial, cols) in blocks {
        let y = ReceivedBlock::new(cols)?;
        let r = detector.detect(&y).with_context(|| format!("trial {trial}"))?;
        writeln!(text, "{trial},{},{},{}", r.index, r.distance_evals, r.comparisons)?;
    }
    emit(&a.common, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&usage("x")), EXIT_USAGE);
        assert_eq!(exit_code(&anyhow!(zopt::Error::Numerical("x".into()))), EXIT_NUMERICAL);
        let wrapped = anyhow!(zopt::Error::Domain("x".into())).context("outer");
        assert_eq!(exit_code(&wrapped), EXIT_DATA);
    }

    #[test]
    fn sidecar_naming() {
        assert_eq!(sidecar_path(Path::new("a/b.json")), PathBuf::from("a/b.json.report.json"));
    }
}
