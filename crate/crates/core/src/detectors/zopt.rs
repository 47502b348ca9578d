//! Structured detector for layered constellations.
//!
//! The received point is located in a (ring gap, azimuth cell) grid with a
//! binary search over the ring angles and one division for the azimuth. The
//! nearest codeword then lies on one of at most four neighbouring rings, and
//! on each ring the closest point is fixed by the cell alone.

use std::f64::consts::{PI, TAU};

use super::rough::{rough_estimate, ReceivedBlock};
use super::DetectionResult;
use crate::constellations::zopt::{d_diagonal, zopt_structure, ZOptConstellation, ZOptStructure};
use crate::error::{Error, Result};
use crate::manifold::{normalize_received, Constellation, SphericalAngles};

/// Tolerance used when recognizing a layered constellation from codewords.
const STRUCTURE_TOLERANCE: f64 = 1e-9;

/// Azimuth cell `⌊φ / (π / z_max)⌋`, clamped to `[0, 2 z_max)`.
pub fn zopt_region_j(phi: f64, z_max: usize) -> usize {
    let phi = if phi >= TAU { 0.0 } else { phi };
    let j = (phi / (PI / z_max as f64)).floor();
    if j <= 0.0 {
        0
    } else {
        (j as usize).min(2 * z_max - 1)
    }
}

/// Number of ring angles strictly below `theta`, with the comparisons spent.
pub fn zopt_region_i(theta: f64, ring_angles: &[f64]) -> (usize, usize) {
    let (mut lo, mut hi) = (0usize, ring_angles.len());
    let mut comparisons = 0;
    while lo < hi {
        let mid = (lo + hi) / 2;
        comparisons += 1;
        if ring_angles[mid] < theta {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    (lo, comparisons)
}

fn delta(a: i64, b: i64) -> i64 {
    i64::from(a == b)
}

/// One-based codeword number of the nearest point on ring `max(i, 1)` for
/// azimuth cell `j` (one-based, `1 <= j <= 2 z_max`).
pub fn t_closed_form(s: &ZOptStructure, i: usize, j: usize) -> usize {
    let (i, j) = (i as i64, j as i64);
    let z = s.z_max as i64;
    let l = s.layers as i64;
    let value = if s.has_half_layers() {
        let t = if i == 0 || i == 1 || i == l {
            let d = 3 * delta(i, 0) + delta(i, 1) - delta(j, 2 * z) - delta(j, 2 * z - 1);
            (j + 1) / 4 + 1 + z / 2 * d
        } else if i % 2 == 0 {
            (j + 1) / 2
        } else {
            j / 2 + 1 - z * delta(j, 2 * z)
        };
        (2 * i - 3) * z / 2 + t
    } else if i == 0 {
        (i - delta(j, 2 * z)) * z + j / 2 + 1
    } else if i % 2 == 1 {
        (i - 1 - delta(j, 2 * z)) * z + j / 2 + 1
    } else {
        (i - 1) * z + (j + 1) / 2
    };
    value as usize
}

/// Zero-based index of the codeword on ring `max(i, 1)` closest in azimuth
/// to the centre of cell `j` (zero-based), found from the ring layout.
pub fn t_structural(s: &ZOptStructure, i: usize, j: usize) -> usize {
    let m = i.max(1);
    let offsets = s.layer_offsets();
    let centre = (j as f64 + 0.5) * PI / s.z_max as f64;
    let size = s.layer_sizes[m - 1];
    let n = (0..size)
        .min_by(|&a, &b| {
            let da = circular_gap(s.azimuth(m, a), centre);
            let db = circular_gap(s.azimuth(m, b), centre);
            da.total_cmp(&db)
        })
        .expect("non-empty ring");
    offsets[m - 1] + n
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Detector state: the ring table and angles only, `O(√C)` storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ZOptDetectorState {
    structure: ZOptStructure,
    theta: Vec<f64>,
    layer_offsets: Vec<usize>,
}

impl ZOptDetectorState {
    pub fn new(z: &ZOptConstellation) -> Self {
        Self {
            structure: z.structure.clone(),
            theta: z.theta.clone(),
            layer_offsets: z.layer_offsets.clone(),
        }
    }

    /// Recovers the ring angles from a constellation laid out ring-major in
    /// the layered pattern for its size.
    pub fn from_constellation(x: &Constellation) -> Result<Self> {
        let bits = x.bits().ok_or_else(|| Error::invalid("layered constellations have 2^B codewords"))?;
        let s = zopt_structure(bits)?;
        let offsets = s.layer_offsets();
        let cw = x.codewords();
        let mut theta = Vec::with_capacity(s.layers);
        for m in 1..=s.layers {
            let start = offsets[m - 1];
            let th = cw[start].angles().theta;
            for n in 0..s.layer_sizes[m - 1] {
                let a = cw[start + n].angles();
                let expected = SphericalAngles::new(th, s.azimuth(m, n))?;
                let e = crate::manifold::angles_to_codeword(expected);
                if crate::manifold::chordal_distance(&e, &cw[start + n]) > STRUCTURE_TOLERANCE {
                    return Err(Error::invalid(format!(
                        "codeword {} (θ = {}, φ = {}) does not follow the layered layout",
                        start + n,
                        a.theta,
                        a.phi
                    )));
                }
            }
            theta.push(th);
        }
        if !theta.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("ring angles are not increasing"));
        }
        Ok(Self {
            structure: s,
            theta,
            layer_offsets: offsets,
        })
    }

    pub fn structure(&self) -> &ZOptStructure {
        &self.structure
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn layer_offsets(&self) -> &[usize] {
        &self.layer_offsets
    }

    pub fn len(&self) -> usize {
        self.structure.count
    }

    pub fn is_empty(&self) -> bool {
        self.structure.count == 0
    }

    /// Closed-form lookup table, `table[i][j]` zero-based, for
    /// `0 <= i <= l` and `0 <= j < 2 z_max`.
    pub fn t_table(&self) -> Vec<Vec<usize>> {
        let s = &self.structure;
        (0..=s.layers)
            .map(|i| (0..2 * s.z_max).map(|j| t_closed_form(s, i, j + 1) - 1).collect())
            .collect()
    }

    /// Azimuth (in cells) of the ring-`i_c` point nearest to cell `j`.
    fn reference_cell(&self, i_c: usize, j1: usize) -> usize {
        let s = &self.structure;
        if s.has_half_layers() && (i_c <= 1 || i_c == s.layers) {
            let g = match j1 % 4 {
                1 => 1,
                2 => 2,
                3 => -1,
                _ => 0,
            };
            (j1 as i64 - g) as usize
        } else {
            let parity = (i_c + usize::from(i_c == 0)) % 2;
            let f = usize::from(parity == j1 % 2);
            j1 - f
        }
    }

    /// Detects a received direction given in spherical angles.
    pub fn detect_angles(&self, z: SphericalAngles) -> DetectionResult {
        let s = &self.structure;
        let cell = PI / s.z_max as f64;
        let j1 = zopt_region_j(z.phi, s.z_max) + 1;
        let (i, mut comparisons) = zopt_region_i(z.theta, &self.theta);
        let lo = i.saturating_sub(1).max(1);
        let hi = (i + 2).min(s.layers);
        let mut best = (0usize, f64::INFINITY);
        let mut distance_evals = 0;
        for i_c in lo..=hi {
            let dphi = (z.phi - self.reference_cell(i_c, j1) as f64 * cell).abs();
            let d = d_diagonal(self.theta[i_c - 1], z.theta, dphi);
            distance_evals += 1;
            comparisons += 1;
            if d < best.1 {
                best = (i_c, d);
            }
        }
        DetectionResult {
            index: t_closed_form(s, best.0, j1) - 1,
            distance_evals,
            comparisons,
        }
    }
}

/// Rough estimate, normalization and structured lookup.
pub fn zopt_detect(y: &ReceivedBlock, state: &ZOptDetectorState) -> Result<DetectionResult> {
    let est = rough_estimate(y)?;
    let z = normalize_received(est)?;
    Ok(state.detect_angles(z.angles()))
}

/// Checks that `state` describes `x` before detection.
pub fn check_state(state: &ZOptDetectorState, x: &Constellation) -> Result<()> {
    if state.len() != x.len() {
        return Err(Error::invalid(format!(
            "detector built for {} codewords, constellation has {}",
            state.len(),
            x.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellations::zopt::{build_z_opt, ZOptConfig};

    #[test]
    fn region_j_examples() {
        assert_eq!(zopt_region_j(0.0, 8), 0);
        assert_eq!(zopt_region_j(0.5, 8), 1);
        assert_eq!(zopt_region_j(TAU - 1e-12, 8), 15);
        assert_eq!(zopt_region_j(TAU, 8), 0);
    }

    #[test]
    fn region_i_examples() {
        let th = [0.5, 1.2, 1.94, 2.64];
        assert_eq!(zopt_region_i(0.1, &th).0, 0);
        assert_eq!(zopt_region_i(3.0, &th).0, 4);
        let (i, c) = zopt_region_i(1.0, &th);
        assert_eq!(i, 1);
        assert!(c <= 3);
    }

    #[test]
    fn closed_form_matches_layout() {
        for b in 1..=16u32 {
            let s = zopt_structure(b).unwrap();
            for i in 0..=s.layers {
                for j in 0..2 * s.z_max {
                    assert_eq!(t_closed_form(&s, i, j + 1) - 1, t_structural(&s, i, j), "B={b} i={i} j={j}");
                }
            }
        }
        let s = zopt_structure(4).unwrap();
        assert_eq!(t_closed_form(&s, 1, 1), 1);
    }

    #[test]
    fn noiseless_codewords_are_recovered() {
        for b in 1..=8u32 {
            let z = build_z_opt(b, &ZOptConfig::default(), 0).unwrap();
            let state = ZOptDetectorState::new(&z);
            for (k, c) in z.constellation.codewords().iter().enumerate() {
                let r = state.detect_angles(c.angles());
                assert_eq!(r.index, k, "B={b}");
                assert!(r.distance_evals <= 4);
            }
        }
    }

    #[test]
    fn state_from_codewords() {
        let z = build_z_opt(5, &ZOptConfig::default(), 0).unwrap();
        let state = ZOptDetectorState::from_constellation(&z.constellation).unwrap();
        assert_eq!(state.layer_offsets(), &z.layer_offsets[..]);
        for (a, b) in state.theta().iter().zip(&z.theta) {
            assert!((a - b).abs() < 1e-12);
        }
        let other = build_z_opt(4, &ZOptConfig::default(), 0).unwrap();
        assert!(check_state(&state, &other.constellation).is_err());
    }
}
