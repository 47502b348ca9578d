//! Layered-polygon constellations.
//!
//! Points sit on `l` horizontal rings of the Bloch sphere. Ring `m` holds a
//! regular `z_m`-gon, even rings are rotated by `π / z_max`, and the polar
//! angles are mirror-symmetric about the equator, so only `n_v = ⌊l/2⌋`
//! angles are free. The minimum distance of the whole set is the minimum of
//! a short list of vertical, horizontal and diagonal candidate distances.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{angles_to_codeword, Codeword, Constellation, Method, SphericalAngles};
use crate::rng::{real_normal, substream};

/// One row of the layer table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZOptStructure {
    pub bits: u32,
    pub count: usize,
    pub layers: usize,
    pub layer_sizes: Vec<usize>,
    pub z_max: usize,
    pub n_v: usize,
}

impl ZOptStructure {
    /// First and last rings hold `z_max / 2` points (B ∈ {5, 7}).
    pub fn has_half_layers(&self) -> bool {
        matches!(self.bits, 5 | 7)
    }

    /// Index of the first codeword of each ring.
    pub fn layer_offsets(&self) -> Vec<usize> {
        self.layer_sizes
            .iter()
            .scan(0, |acc, &z| {
                let start = *acc;
                *acc += z;
                Some(start)
            })
            .collect()
    }

    /// Azimuth of point `n` (zero-based) on ring `m` (one-based).
    pub fn azimuth(&self, m: usize, n: usize) -> f64 {
        let offset = if m.is_multiple_of(2) { PI / self.z_max as f64 } else { 0.0 };
        offset + TAU * n as f64 / self.layer_sizes[m - 1] as f64
    }

    /// Number of candidate distances in the reduced objective.
    pub fn candidate_count(&self) -> usize {
        let (v, h, d) = self.candidate_shape();
        v + h + d
    }

    fn n_v_prime(&self) -> usize {
        if self.has_half_layers() {
            self.n_v + 1
        } else {
            self.n_v
        }
    }

    fn candidate_shape(&self) -> (usize, usize, usize) {
        let nvp = self.n_v_prime();
        let h = if self.has_half_layers() { 2 } else { 1 };
        let d = (1..=nvp).filter(|&i| i < self.layers).count();
        (nvp.saturating_sub(1), h, d)
    }
}

/// The layer table for `1 <= bits <= 16`.
pub fn zopt_structure(bits: u32) -> Result<ZOptStructure> {
    // (l, size of the first/last ring, size of the inner rings, n_v)
    let (layers, edge, inner, n_v) = match bits {
        1 => (1, 2, 2, 1),
        2 => (2, 2, 2, 1),
        3 => (2, 4, 4, 1),
        4 => (4, 4, 4, 2),
        5 => (5, 4, 8, 2),
        6 => (8, 8, 8, 4),
        7 => (9, 8, 16, 4),
        8 => (16, 16, 16, 8),
        9 => (32, 16, 16, 16),
        10 => (32, 32, 32, 16),
        11 => (64, 32, 32, 32),
        12 => (64, 64, 64, 32),
        13 => (128, 64, 64, 64),
        14 => (128, 128, 128, 64),
        15 => (256, 128, 128, 128),
        16 => (256, 256, 256, 128),
        _ => return Err(Error::Unsupported(format!("Z-Opt is defined for 1 <= B <= 16, got {bits}"))),
    };
    let layer_sizes: Vec<usize> = (0..layers)
        .map(|m| if m == 0 || m + 1 == layers { edge } else { inner })
        .collect();
    let z_max = *layer_sizes.iter().max().expect("non-empty");
    Ok(ZOptStructure {
        bits,
        count: 1 << bits,
        layers,
        layer_sizes,
        z_max,
        n_v,
    })
}

/// Closed-form polar angle of the top ring for `B ∈ {1, 2, 3}`.
pub fn closed_form_angle(bits: u32) -> Option<f64> {
    match bits {
        1 => Some(FRAC_PI_2),
        2 => Some(2f64.sqrt().atan()),
        3 => Some((2.0 * 2f64.sqrt()).sqrt().atan()),
        _ => None,
    }
}

/// Expands the free angles to all `l` ring angles using the equatorial
/// mirror symmetry (and `π/2` for the middle ring of odd layer counts).
pub fn expand_theta(free: &[f64], s: &ZOptStructure) -> Result<Vec<f64>> {
    if s.layers == 1 {
        return Ok(vec![FRAC_PI_2]);
    }
    if free.len() != s.n_v {
        return Err(Error::invalid(format!(
            "expected {} free angles for B = {}, got {}",
            s.n_v,
            s.bits,
            free.len()
        )));
    }
    let mut prev = 0.0;
    for &t in free {
        if !(t > prev && t < FRAC_PI_2) {
            return Err(Error::invalid(format!(
                "free angles must increase strictly within (0, π/2): {free:?}"
            )));
        }
        prev = t;
    }
    let mut full = free.to_vec();
    if s.layers % 2 == 1 {
        full.push(FRAC_PI_2);
    }
    full.extend(free.iter().rev().map(|t| PI - t));
    Ok(full)
}

pub fn d_vertical(a: f64, b: f64) -> f64 {
    2.0 * ((a - b).abs() / 2.0).sin()
}

pub fn d_horizontal(theta: f64, dphi: f64) -> f64 {
    2.0 * theta.sin() * (dphi / 2.0).sin()
}

pub fn d_diagonal(a: f64, b: f64, dphi: f64) -> f64 {
    let s = (dphi / 2.0).sin();
    let v = ((a - b) / 2.0).sin();
    2.0 * (v * v + a.sin() * b.sin() * s * s).max(0.0).sqrt()
}

/// Candidate distances on the Bloch sphere (Euclidean units).
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateDistances {
    pub vertical: Vec<f64>,
    pub horizontal: Vec<f64>,
    pub diagonal: Vec<f64>,
}

impl CandidateDistances {
    pub fn len(&self) -> usize {
        self.vertical.len() + self.horizontal.len() + self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn min(&self) -> f64 {
        self.vertical
            .iter()
            .chain(&self.horizontal)
            .chain(&self.diagonal)
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Vertical pairs `(i, i+2)`, horizontal neighbours on the top ring(s) and
/// diagonal pairs `(i, i+1)` at azimuth offset `π / z_max`.
///
/// Neighbours on a regular `z`-gon are `2π / z` apart in azimuth, which is
/// the offset used for the horizontal candidates.
pub fn candidate_distances(free: &[f64], s: &ZOptStructure) -> Result<CandidateDistances> {
    let theta = expand_theta(free, s)?;
    Ok(candidates_from_full(&theta, s))
}

pub(crate) fn candidates_from_full(theta: &[f64], s: &ZOptStructure) -> CandidateDistances {
    // One-based ring index -> polar angle.
    let th = |i: usize| theta[i - 1];
    let nvp = s.n_v_prime();
    let vertical = (1..nvp)
        .filter(|&i| i + 2 <= s.layers)
        .map(|i| d_vertical(th(i), th(i + 2)))
        .collect();
    let h_rings: &[usize] = if s.has_half_layers() { &[1, 2] } else { &[1] };
    let horizontal = h_rings
        .iter()
        .map(|&i| d_horizontal(th(i), TAU / s.layer_sizes[i - 1] as f64))
        .collect();
    let dphi = PI / s.z_max as f64;
    let diagonal = (1..=nvp)
        .filter(|&i| i < s.layers)
        .map(|i| d_diagonal(th(i), th(i + 1), dphi))
        .collect();
    CandidateDistances {
        vertical,
        horizontal,
        diagonal,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZOptConfig {
    /// Bisection steps on the target distance.
    pub bisection_iters: usize,
    /// Iteration cap of the seeded pattern-search polish.
    pub polish_iters: usize,
    /// Initial polish step in radians.
    pub polish_step: f64,
}

impl Default for ZOptConfig {
    fn default() -> Self {
        Self {
            bisection_iters: 200,
            polish_iters: 4000,
            polish_step: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZOptSolution {
    /// Optimized free angles `θ_1 < … < θ_{n_v}`.
    pub angles: Vec<f64>,
    /// Minimum candidate distance at `angles` (Euclidean, on the sphere).
    pub objective: f64,
    /// Objective evaluations spent (bisection feasibility checks excluded).
    pub objective_calls: usize,
    /// Candidate distances computed per objective evaluation.
    pub distances_per_call: usize,
}

impl ZOptSolution {
    pub fn min_chordal_distance(&self) -> f64 {
        self.objective / 2.0
    }
}

/// Maximizes the minimum candidate distance over the free angles.
///
/// Every constraint of the reduced problem bounds the next ring angle from
/// below by a non-decreasing function of the previous ones, while the
/// equatorial constraints favour small angles. Placing each ring as high as
/// the target distance allows therefore decides feasibility of a target
/// exactly, and bisection on the target yields the maximin angles. A seeded
/// pattern search then polishes the result on the exact objective.
pub fn optimize_zopt(s: &ZOptStructure, config: &ZOptConfig, seed: u64) -> Result<ZOptSolution> {
    if !(4..=16).contains(&s.bits) {
        return Err(Error::Unsupported(format!(
            "angle optimization covers 4 <= B <= 16; B = {} has a closed form",
            s.bits
        )));
    }
    if config.bisection_iters == 0 || config.polish_step <= 0.0 {
        return Err(Error::InvalidConfig(format!("{config:?}")));
    }
    let mut lo = 0.0;
    let mut hi = 2.0;
    let mut best: Option<Vec<f64>> = None;
    for _ in 0..config.bisection_iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match greedy_layers(mid, s) {
            Some(angles) => {
                lo = mid;
                best = Some(angles);
            }
            None => hi = mid,
        }
    }
    let angles = best.ok_or_else(|| Error::Numerical(format!("no feasible ring angles for B = {}", s.bits)))?;
    let mut objective = Objective::new(s);
    let start = objective.eval(&angles);
    let (angles, value) = polish(&mut objective, angles, start, config, seed);
    Ok(ZOptSolution {
        angles,
        objective: value,
        objective_calls: objective.calls,
        distances_per_call: s.candidate_count(),
    })
}

struct Objective<'a> {
    s: &'a ZOptStructure,
    calls: usize,
}

impl<'a> Objective<'a> {
    fn new(s: &'a ZOptStructure) -> Self {
        Self { s, calls: 0 }
    }

    /// Minimum candidate distance, or `-inf` outside the ordered domain.
    fn eval(&mut self, free: &[f64]) -> f64 {
        self.calls += 1;
        match candidate_distances(free, self.s) {
            Ok(c) => c.min(),
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

/// Highest placement of the rings compatible with all candidate distances
/// being at least `t`, or `None` if `t` is unattainable.
fn greedy_layers(t: f64, s: &ZOptStructure) -> Option<Vec<f64>> {
    if t >= 2.0 {
        return None;
    }
    let v_gap = 2.0 * (t / 2.0).asin();
    let dphi = PI / s.z_max as f64;
    let ring_floor = |i: usize| -> Option<f64> {
        let h = 2.0 * (PI / s.layer_sizes[i - 1] as f64).sin();
        let r = t / h;
        (r < 1.0).then(|| r.asin())
    };
    let half = s.has_half_layers();
    let mut theta: Vec<f64> = Vec::with_capacity(s.n_v);
    for i in 1..=s.n_v {
        let mut lb: f64 = 0.0;
        if i == 1 || (half && i == 2) {
            lb = lb.max(ring_floor(i)?);
        }
        if i >= 2 {
            let prev = theta[i - 2];
            lb = lb.max(min_diagonal_partner(prev, t, dphi)?);
            lb = lb.max(next_up(prev));
        }
        if i >= 3 {
            lb = lb.max(theta[i - 3] + v_gap);
        }
        if lb <= 0.0 {
            lb = f64::MIN_POSITIVE;
        }
        if lb >= FRAC_PI_2 {
            return None;
        }
        theta.push(lb);
    }
    // Constraints that involve the mirrored half all prefer small angles.
    // The slack absorbs rounding in the constraints met with equality above.
    let full = expand_theta(&theta, s).ok()?;
    (candidates_from_full(&full, s).min() >= t - 1e-12).then_some(theta)
}

fn next_up(x: f64) -> f64 {
    x + x.abs().max(1.0) * 4.0 * f64::EPSILON
}

/// Smallest `b` in `(a, π/2)` with `d_d(a, b, dphi) >= t`.
fn min_diagonal_partner(a: f64, t: f64, dphi: f64) -> Option<f64> {
    if d_diagonal(a, FRAC_PI_2, dphi) < t {
        return None;
    }
    if d_diagonal(a, a, dphi) >= t {
        return Some(next_up(a));
    }
    let (mut lo, mut hi) = (a, FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if d_diagonal(a, mid, dphi) >= t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Seeded pattern search: an axis sweep plus one random direction per
/// round, keeping strict improvements and halving the step on failure.
fn polish(
    objective: &mut Objective<'_>,
    mut x: Vec<f64>,
    mut fx: f64,
    config: &ZOptConfig,
    seed: u64,
) -> (Vec<f64>, f64) {
    let n = x.len();
    let mut rng = substream(seed, 0);
    let mut step = config.polish_step;
    let mut trial = x.clone();
    let mut dir = vec![0.0; n];
    for _ in 0..config.polish_iters {
        if step < 1e-15 {
            break;
        }
        let mut improved = false;
        for k in 0..n {
            for sign in [1.0, -1.0] {
                trial.copy_from_slice(&x);
                trial[k] += sign * step;
                let f = objective.eval(&trial);
                if f > fx {
                    x.copy_from_slice(&trial);
                    fx = f;
                    improved = true;
                }
            }
        }
        let mut norm = 0.0;
        for d in dir.iter_mut() {
            *d = real_normal(&mut rng);
            norm += *d * *d;
        }
        let norm = norm.sqrt();
        for sign in [1.0, -1.0] {
            for ((t, xi), d) in trial.iter_mut().zip(&x).zip(&dir) {
                *t = xi + sign * step * d / norm;
            }
            let f = objective.eval(&trial);
            if f > fx {
                x.copy_from_slice(&trial);
                fx = f;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

/// A layered constellation with the data its detector needs.
#[derive(Clone, Debug, PartialEq)]
pub struct ZOptConstellation {
    pub structure: ZOptStructure,
    /// All ring polar angles, strictly increasing.
    pub theta: Vec<f64>,
    pub constellation: Constellation,
    pub layer_offsets: Vec<usize>,
    /// Present when the angles came from the optimizer.
    pub solution: Option<ZOptSolution>,
}

impl ZOptConstellation {
    /// Minimum of the candidate distances, in chordal units.
    pub fn candidate_min_chordal(&self) -> f64 {
        candidates_from_full(&self.theta, &self.structure).min() / 2.0
    }
}

/// Builds the layered constellation for `bits`, optimizing the ring angles
/// for `B >= 4`.
pub fn build_z_opt(bits: u32, config: &ZOptConfig, seed: u64) -> Result<ZOptConstellation> {
    let structure = zopt_structure(bits)?;
    let (free, solution) = match closed_form_angle(bits) {
        Some(t) => (vec![t], None),
        None => {
            let sol = optimize_zopt(&structure, config, seed)?;
            (sol.angles.clone(), Some(sol))
        }
    };
    let theta = expand_theta(&free, &structure)?;
    zopt_from_theta(structure, theta, solution)
}

/// Realizes the codewords for given ring angles, ring-major.
pub fn zopt_from_theta(
    structure: ZOptStructure,
    theta: Vec<f64>,
    solution: Option<ZOptSolution>,
) -> Result<ZOptConstellation> {
    if theta.len() != structure.layers {
        return Err(Error::invalid("one polar angle per ring expected"));
    }
    let mut codewords: Vec<Codeword> = Vec::with_capacity(structure.count);
    for (m0, &th) in theta.iter().enumerate() {
        let m = m0 + 1;
        for n in 0..structure.layer_sizes[m0] {
            let a = SphericalAngles::new(th, structure.azimuth(m, n))?;
            codewords.push(angles_to_codeword(a));
        }
    }
    let constellation = Constellation::new(Method::ZOpt, codewords)?;
    Ok(ZOptConstellation {
        layer_offsets: structure.layer_offsets(),
        structure,
        theta,
        constellation,
        solution,
    })
}
