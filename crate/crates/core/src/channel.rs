//! Block-Rayleigh link simulation.
//!
//! `Y = √2 · x · h + W` with one transmit stream over two channel uses,
//! `N` receive antennas, `h ~ CN(0, 1)` and `W ~ CN(0, σ²)` entrywise, and
//! `SNR = 1 / σ²`.
//!
//! Trial `k` always draws from substream `k` of the run seed, and the noise
//! is drawn at unit variance and then scaled. Every SNR point and every
//! detector therefore sees the same symbols, fades and noise directions.

use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detectors::{
    glrt_detect, sopt_detect, sopt_index, zopt_detect, DetectionResult, NearestNeighborIndex, ReceivedBlock,
    ZOptDetectorState, DEFAULT_LEAF_SIZE,
};
use crate::error::{Error, Result};
use crate::manifold::{Codeword, Constellation};
use crate::rng::{complex_normal, substream, StreamRng};

/// Trials handled per parallel work item.
const CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSample {
    pub h: Vec<Complex64>,
    pub w: Vec<[Complex64; 2]>,
    pub sigma2: f64,
}

impl ChannelSample {
    /// Draws `antennas` fades and the matching noise at variance `sigma2`.
    pub fn draw(rng: &mut StreamRng, antennas: usize, sigma2: f64) -> Self {
        let h = (0..antennas).map(|_| complex_normal(rng, 1.0)).collect();
        let scale = sigma2.sqrt();
        let w = (0..antennas)
            .map(|_| [complex_normal(rng, 1.0) * scale, complex_normal(rng, 1.0) * scale])
            .collect();
        Self { h, w, sigma2 }
    }
}

/// Noise variance for an SNR in dB.
pub fn noise_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

pub fn transmit(x: &Codeword, ch: &ChannelSample) -> Result<ReceivedBlock> {
    if ch.h.len() != ch.w.len() {
        return Err(Error::invalid("fade and noise antenna counts differ"));
    }
    let g = std::f64::consts::SQRT_2;
    let cols = ch
        .h
        .iter()
        .zip(&ch.w)
        .map(|(h, w)| [x.c0() * h * g + w[0], x.c1() * h * g + w[1]])
        .collect();
    ReceivedBlock::new(cols)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorKind {
    Glrt,
    Sopt,
    Zopt,
}

impl DetectorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DetectorKind::Glrt => "glrt",
            DetectorKind::Sopt => "sopt",
            DetectorKind::Zopt => "zopt",
        }
    }
}

impl std::fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "glrt" => Ok(DetectorKind::Glrt),
            "sopt" => Ok(DetectorKind::Sopt),
            "zopt" => Ok(DetectorKind::Zopt),
            other => Err(Error::invalid(format!("unknown detector '{other}' (expected glrt, sopt or zopt)"))),
        }
    }
}

/// A detector with its precomputed state.
#[derive(Clone, Debug)]
pub enum Detector {
    Glrt(Constellation),
    Sopt(NearestNeighborIndex),
    Zopt(ZOptDetectorState),
}

impl Detector {
    pub fn prepare(kind: DetectorKind, x: &Constellation) -> Result<Self> {
        Ok(match kind {
            DetectorKind::Glrt => Detector::Glrt(x.clone()),
            DetectorKind::Sopt => Detector::Sopt(sopt_index(x, DEFAULT_LEAF_SIZE)?),
            DetectorKind::Zopt => Detector::Zopt(ZOptDetectorState::from_constellation(x)?),
        })
    }

    pub fn kind(&self) -> DetectorKind {
        match self {
            Detector::Glrt(_) => DetectorKind::Glrt,
            Detector::Sopt(_) => DetectorKind::Sopt,
            Detector::Zopt(_) => DetectorKind::Zopt,
        }
    }

    pub fn detect(&self, y: &ReceivedBlock) -> Result<DetectionResult> {
        match self {
            Detector::Glrt(x) => glrt_detect(y, x),
            Detector::Sopt(nn) => sopt_detect(y, nn),
            Detector::Zopt(state) => zopt_detect(y, state),
        }
    }
}

/// Symbol, fade and unit-variance noise of one trial.
pub fn trial_draw(x: &Constellation, seed: u64, trial: u64, antennas: usize) -> (usize, ChannelSample) {
    let mut rng = substream(seed, trial);
    let symbol = rng.gen_range(0..x.len());
    (symbol, ChannelSample::draw(&mut rng, antennas, 1.0))
}

/// Received block of one trial at noise variance `sigma2`.
pub fn trial_block(x: &Constellation, seed: u64, trial: u64, antennas: usize, sigma2: f64) -> Result<(usize, ReceivedBlock)> {
    let (symbol, mut ch) = trial_draw(x, seed, trial, antennas);
    let scale = sigma2.sqrt();
    for w in &mut ch.w {
        w[0] *= scale;
        w[1] *= scale;
    }
    ch.sigma2 = sigma2;
    Ok((symbol, transmit(&x.codewords()[symbol], &ch)?))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Tally {
    errors: u64,
    distance_evals: u64,
    comparisons: u64,
    max_distance_evals: u64,
    max_comparisons: u64,
}

impl Tally {
    fn add(&mut self, r: &DetectionResult, wrong: bool) {
        self.errors += u64::from(wrong);
        self.distance_evals += r.distance_evals as u64;
        self.comparisons += r.comparisons as u64;
        self.max_distance_evals = self.max_distance_evals.max(r.distance_evals as u64);
        self.max_comparisons = self.max_comparisons.max(r.comparisons as u64);
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.errors += o.errors;
        self.distance_evals += o.distance_evals;
        self.comparisons += o.comparisons;
        self.max_distance_evals = self.max_distance_evals.max(o.max_distance_evals);
        self.max_comparisons = self.max_comparisons.max(o.max_comparisons);
        self
    }
}

fn run_point(
    x: &Constellation,
    detector: &Detector,
    sigma2: f64,
    trials: u64,
    antennas: usize,
    seed: u64,
) -> Result<Tally> {
    let chunks = trials.div_ceil(CHUNK as u64);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::default();
            let end = ((c + 1) * CHUNK as u64).min(trials);
            for k in c * CHUNK as u64..end {
                let (symbol, y) = trial_block(x, seed, k, antennas, sigma2)?;
                let r = detector.detect(&y)?;
                t.add(&r, r.index != symbol);
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
}

/// Symbol-error-rate curve with per-point operation counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SerCurve {
    pub detector: DetectorKind,
    pub antennas: usize,
    pub seed: u64,
    pub trials: u64,
    pub snr_db: Vec<f64>,
    pub errors: Vec<u64>,
    pub ser: Vec<f64>,
    pub mean_distance_evals: Vec<f64>,
    pub mean_comparisons: Vec<f64>,
}

fn check_run(trials: u64, antennas: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if antennas == 0 {
        return Err(Error::invalid("at least one receive antenna required"));
    }
    Ok(())
}

pub fn run_ser(
    x: &Constellation,
    kind: DetectorKind,
    snr_db: &[f64],
    trials: u64,
    antennas: usize,
    seed: u64,
) -> Result<SerCurve> {
    check_run(trials, antennas)?;
    let detector = Detector::prepare(kind, x)?;
    let mut curve = SerCurve {
        detector: kind,
        antennas,
        seed,
        trials,
        snr_db: snr_db.to_vec(),
        errors: Vec::new(),
        ser: Vec::new(),
        mean_distance_evals: Vec::new(),
        mean_comparisons: Vec::new(),
    };
    for &snr in snr_db {
        if !snr.is_finite() {
            return Err(Error::invalid(format!("SNR must be finite, got {snr}")));
        }
        let t = run_point(x, &detector, noise_variance(snr), trials, antennas, seed)?;
        curve.errors.push(t.errors);
        curve.ser.push(t.errors as f64 / trials as f64);
        curve.mean_distance_evals.push(t.distance_evals as f64 / trials as f64);
        curve.mean_comparisons.push(t.comparisons as f64 / trials as f64);
    }
    Ok(curve)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorCounters {
    pub detector: DetectorKind,
    pub trials: u64,
    pub errors: u64,
    pub mean_distance_evals: f64,
    pub max_distance_evals: u64,
    pub mean_comparisons: f64,
    pub max_comparisons: u64,
}

/// Runs the same trial stream through each detector and reports counters.
pub fn bench_detectors(
    x: &Constellation,
    kinds: &[DetectorKind],
    trials: u64,
    antennas: usize,
    snr_db: f64,
    seed: u64,
) -> Result<Vec<DetectorCounters>> {
    check_run(trials, antennas)?;
    kinds
        .iter()
        .map(|&kind| {
            let d = Detector::prepare(kind, x)?;
            let t = run_point(x, &d, noise_variance(snr_db), trials, antennas, seed)?;
            Ok(DetectorCounters {
                detector: kind,
                trials,
                errors: t.errors,
                mean_distance_evals: t.distance_evals as f64 / trials as f64,
                max_distance_evals: t.max_distance_evals,
                mean_comparisons: t.comparisons as f64 / trials as f64,
                max_comparisons: t.max_comparisons,
            })
        })
        .collect()
}

/// Number of trials in which two detectors disagree on the same blocks.
pub fn count_mismatches(
    x: &Constellation,
    a: &Detector,
    b: &Detector,
    snr_db: f64,
    trials: u64,
    antennas: usize,
    seed: u64,
) -> Result<u64> {
    check_run(trials, antennas)?;
    let sigma2 = noise_variance(snr_db);
    let chunks = trials.div_ceil(CHUNK as u64);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let end = ((c + 1) * CHUNK as u64).min(trials);
            let mut n = 0u64;
            for k in c * CHUNK as u64..end {
                let (_, y) = trial_block(x, seed, k, antennas, sigma2)?;
                n += u64::from(a.detect(&y)?.index != b.detect(&y)?.index);
            }
            Ok(n)
        })
        .try_reduce(|| 0, |p, q| Ok(p + q))
}
