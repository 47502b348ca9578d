//! Geometry of G(2,1) and its Bloch-sphere picture.
//!
//! A line in C² is represented by a unit vector `(c0, c1)` with the global
//! phase removed so that `c0` is real and non-negative. The map
//!
//! ```text
//! (cos θ/2, e^{jφ} sin θ/2)  <->  (sin θ cos φ, sin θ sin φ, cos θ)
//! ```
//!
//! sends such codewords to unit vectors in R³, and the chordal distance
//! between two lines is exactly half of the Euclidean distance between
//! their Bloch points.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest deviation from unit norm accepted for caller-supplied vectors.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// A canonical unit vector in C²: `c0` real and `>= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Codeword {
    c0: Complex64,
    c1: Complex64,
}

impl Codeword {
    /// Validates unit norm, renormalizes the residual and removes the global
    /// phase.
    pub fn new(c0: Complex64, c1: Complex64) -> Result<Self> {
        let norm = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!(
                "codeword norm {norm} deviates from 1 by more than {NORM_TOLERANCE}"
            )));
        }
        if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            // Already unit up to rounding; keep stored values bit-exact.
            return Ok(Self::canonicalize(c0, c1));
        }
        Ok(Self::canonicalize(c0 / norm, c1 / norm))
    }

    /// Removes the global phase from an (assumed) unit vector.
    pub(crate) fn canonicalize(c0: Complex64, c1: Complex64) -> Self {
        let r0 = c0.norm();
        if r0 > 0.0 {
            let rot = (c0 / r0).conj();
            Self {
                c0: Complex64::new(r0, 0.0),
                c1: c1 * rot,
            }
        } else {
            // c0 = 0: the south pole, where only |c1| carries information.
            Self {
                c0: Complex64::new(0.0, 0.0),
                c1: Complex64::new(c1.norm(), 0.0),
            }
        }
    }

    pub fn c0(&self) -> Complex64 {
        self.c0
    }

    pub fn c1(&self) -> Complex64 {
        self.c1
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.c0, self.c1]
    }

    /// `|<self, other>|²`.
    pub fn overlap(&self, other: &Codeword) -> f64 {
        (self.c0.conj() * other.c0 + self.c1.conj() * other.c1).norm_sqr()
    }

    pub fn bloch(&self) -> BlochPoint {
        // Pauli expectation values written through the half-angle map.
        let a = self.c0.re;
        let x = 2.0 * a * self.c1.re;
        let y = 2.0 * a * self.c1.im;
        let z = a * a - self.c1.norm_sqr();
        BlochPoint::normalized(x, y, z)
    }

    pub fn angles(&self) -> SphericalAngles {
        let r1 = self.c1.norm();
        let theta = 2.0 * r1.atan2(self.c0.re);
        let phi = if r1 == 0.0 || self.c0.re == 0.0 {
            0.0
        } else {
            self.c1.arg()
        };
        SphericalAngles::from_raw(theta, phi)
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.7}, {:.7}{:+.7}j)", self.c0.re, self.c1.re, self.c1.im)
    }
}

/// A point on the unit sphere in R³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!(
                "bloch point norm {n} deviates from 1 by more than {NORM_TOLERANCE}"
            )));
        }
        Ok(Self::normalized(x, y, z))
    }

    pub(crate) fn normalized(x: f64, y: f64, z: f64) -> Self {
        let n = (x * x + y * y + z * z).sqrt();
        Self {
            x: x / n,
            y: y / n,
            z: z / n,
        }
    }

    pub fn from_angles(a: SphericalAngles) -> Self {
        let (st, ct) = a.theta.sin_cos();
        let (sp, cp) = a.phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dist_sqr(&self, other: &BlochPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    /// Polar angle from the +z axis and azimuth in `[0, 2π)`.
    pub fn angles(&self) -> SphericalAngles {
        let rho = self.x.hypot(self.y);
        let theta = rho.atan2(self.z);
        let phi = if rho == 0.0 { 0.0 } else { self.y.atan2(self.x) };
        SphericalAngles::from_raw(theta, phi)
    }
}

/// Polar angle `theta ∈ [0, π]` and azimuth `phi ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalAngles {
    pub theta: f64,
    pub phi: f64,
}

impl SphericalAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::invalid(format!(
                "theta {theta} outside [0, π] or non-finite phi"
            )));
        }
        Ok(Self::from_raw(theta, phi))
    }

    /// Wraps `phi` into `[0, 2π)` and zeroes it at the poles.
    pub(crate) fn from_raw(theta: f64, phi: f64) -> Self {
        let theta = theta.clamp(0.0, PI);
        let phi = if theta == 0.0 || theta == PI {
            0.0
        } else {
            wrap_angle(phi)
        };
        Self { theta, phi }
    }
}

/// Maps any finite angle into `[0, 2π)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Provenance of a constellation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SOpt,
    ZOpt,
    ManOpt,
    ExpMap,
    CubeSplit,
    GrassLattice,
    External,
}

impl Method {
    pub const ALL_BUILDERS: [Method; 6] = [
        Method::SOpt,
        Method::ZOpt,
        Method::ManOpt,
        Method::ExpMap,
        Method::CubeSplit,
        Method::GrassLattice,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::SOpt => "s-opt",
            Method::ZOpt => "z-opt",
            Method::ManOpt => "man-opt",
            Method::ExpMap => "exp-map",
            Method::CubeSplit => "cube-split",
            Method::GrassLattice => "grass-lattice",
            Method::External => "external",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s {
            "s-opt" => Method::SOpt,
            "z-opt" => Method::ZOpt,
            "man-opt" => Method::ManOpt,
            "exp-map" => Method::ExpMap,
            "cube-split" => Method::CubeSplit,
            "grass-lattice" => Method::GrassLattice,
            "external" => Method::External,
            other => return Err(Error::invalid(format!("unknown method '{other}'"))),
        };
        Ok(m)
    }
}

/// An ordered set of `C >= 2` distinct canonical codewords. Bit-labelled
/// constellations have `C = 2^B`; packing-derived ones may have any size.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    codewords: Vec<Codeword>,
    method: Method,
}

impl Constellation {
    pub fn new(method: Method, codewords: Vec<Codeword>) -> Result<Self> {
        let c = codewords.len();
        if c < 2 {
            return Err(Error::invalid(format!("constellation needs at least 2 codewords, got {c}")));
        }
        if let Some((i, j)) = find_duplicate(&codewords) {
            return Err(Error::invalid(format!(
                "codewords {i} and {j} span the same line"
            )));
        }
        Ok(Self { codewords, method })
    }

    pub fn codewords(&self) -> &[Codeword] {
        &self.codewords
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// `log2 C` when the size is a power of two.
    pub fn bits(&self) -> Option<u32> {
        let c = self.codewords.len();
        c.is_power_of_two().then(|| c.trailing_zeros())
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn bloch_points(&self) -> Vec<BlochPoint> {
        self.codewords.iter().map(Codeword::bloch).collect()
    }
}

fn find_duplicate(codewords: &[Codeword]) -> Option<(usize, usize)> {
    let mut keyed: Vec<(usize, [f64; 4])> = codewords
        .iter()
        .enumerate()
        .map(|(i, c)| (i, [c.c0.re, c.c0.im, c.c1.re, c.c1.im]))
        .collect();
    keyed.sort_by(|a, b| {
        a.1.iter()
            .zip(b.1.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    keyed
        .windows(2)
        .find(|w| w[0].1 == w[1].1)
        .map(|w| (w[0].0.min(w[1].0), w[0].0.max(w[1].0)))
}

/// Chordal distance `sqrt(1 - |aᴴb|²)` between two lines.
///
/// The radicand is evaluated as `|a0 b1 - a1 b0|²`, which equals
/// `1 - |aᴴb|²` for unit vectors without the cancellation, and is clamped
/// to `[0, 1]`.
pub fn chordal_distance(a: &Codeword, b: &Codeword) -> f64 {
    chordal_from_amplitudes(a.amplitudes(), b.amplitudes())
}

fn chordal_from_amplitudes(a: [Complex64; 2], b: [Complex64; 2]) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    cross.norm_sqr().clamp(0.0, 1.0).sqrt()
}

/// Chordal distance for raw amplitude pairs, rejecting non-unit input.
pub fn chordal_distance_checked(a: [Complex64; 2], b: [Complex64; 2]) -> Result<f64> {
    for v in [a, b] {
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!("input norm {n} is not unit")));
        }
    }
    Ok(chordal_from_amplitudes(a, b))
}

pub fn euclidean_distance(p: &BlochPoint, q: &BlochPoint) -> f64 {
    p.dist_sqr(q).sqrt()
}

/// `(cos θ/2, e^{jφ} sin θ/2)`.
pub fn angles_to_codeword(a: SphericalAngles) -> Codeword {
    let (s, c) = (a.theta / 2.0).sin_cos();
    Codeword {
        c0: Complex64::new(c, 0.0),
        c1: Complex64::from_polar(s, a.phi),
    }
}

pub fn codeword_to_bloch(c: &Codeword) -> (BlochPoint, SphericalAngles) {
    (c.bloch(), c.angles())
}

/// Bloch coordinates of caller-supplied amplitudes that should already be in
/// canonical form. `c0` is clamped into `[0, 1]` when rounding pushed it
/// slightly outside.
pub fn bloch_from_amplitudes(c0: Complex64, c1: Complex64) -> Result<(BlochPoint, SphericalAngles)> {
    if c0.re < -NORM_TOLERANCE || c0.im.abs() > NORM_TOLERANCE {
        return Err(Error::invalid(format!(
            "first amplitude {c0} is not real and non-negative"
        )));
    }
    let c0 = Complex64::new(c0.re.clamp(0.0, 1.0), 0.0);
    let cw = Codeword::new(c0, c1)?;
    Ok(codeword_to_bloch(&cw))
}

/// Smallest pairwise chordal distance.
pub fn min_chordal_distance(x: &Constellation) -> Result<f64> {
    min_chordal_distance_of(x.codewords())
}

pub fn min_chordal_distance_of(codewords: &[Codeword]) -> Result<f64> {
    let c = codewords.len();
    if c < 2 {
        return Err(Error::invalid(format!(
            "minimum distance needs at least 2 codewords, got {c}"
        )));
    }
    let row_min = |i: usize| {
        let a = &codewords[i];
        codewords[i + 1..]
            .iter()
            .map(|b| chordal_distance(a, b))
            .fold(f64::INFINITY, f64::min)
    };
    let d = if c >= 512 {
        (0..c - 1)
            .into_par_iter()
            .map(row_min)
            .reduce(|| f64::INFINITY, f64::min)
    } else {
        (0..c - 1).map(row_min).fold(f64::INFINITY, f64::min)
    };
    Ok(d)
}

/// Upper bound on the minimum chordal distance of `count` lines, obtained by
/// halving the Fejes Tóth bound for points on the unit sphere.
pub fn fejes_toth_bound(count: usize) -> Result<f64> {
    if count <= 2 {
        return Err(Error::Domain(format!(
            "bound is singular for C = {count}; it needs C >= 3 (C = 2 is exactly 1)"
        )));
    }
    let c = count as f64;
    let s = (PI * c / (6.0 * (c - 2.0))).sin();
    Ok(0.5 * (4.0 - 1.0 / (s * s)).max(0.0).sqrt())
}

/// `e^{-j arg y₁} y / ‖y‖`; a vanishing first entry yields the south pole.
pub fn normalize_received(y: [Complex64; 2]) -> Result<Codeword> {
    let n = (y[0].norm_sqr() + y[1].norm_sqr()).sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::Degenerate(format!(
            "received vector has norm {n}"
        )));
    }
    Ok(Codeword::canonicalize(y[0] / n, y[1] / n))
}

// Reference values are quoted to seven digits on purpose.
#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn cw(a: f64, b: Complex64) -> Codeword {
        Codeword::new(Complex64::new(a, 0.0), b).unwrap()
    }

    #[test]
    fn chordal_examples() {
        let e0 = cw(1.0, Complex64::new(0.0, 0.0));
        let e1 = cw(0.0, Complex64::new(1.0, 0.0));
        let d = cw(FRAC_1_SQRT_2, Complex64::new(FRAC_1_SQRT_2, 0.0));
        assert_eq!(chordal_distance(&e0, &e0), 0.0);
        assert_eq!(chordal_distance(&e0, &e1), 1.0);
        assert!((chordal_distance(&e0, &d) - 0.7071068).abs() < 1e-7);
        assert_eq!(chordal_distance(&e0, &d), chordal_distance(&d, &e0));
    }

    #[test]
    fn chordal_rejects_non_unit() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert!(chordal_distance_checked([one * 1.1, zero], [one, zero]).is_err());
        assert!(chordal_distance_checked([one, zero], [zero, one]).is_ok());
    }

    #[test]
    fn euclidean_examples() {
        let n = BlochPoint::new(0.0, 0.0, 1.0).unwrap();
        let s = BlochPoint::new(0.0, 0.0, -1.0).unwrap();
        let x = BlochPoint::new(1.0, 0.0, 0.0).unwrap();
        let y = BlochPoint::new(0.0, 1.0, 0.0).unwrap();
        assert_eq!(euclidean_distance(&n, &n), 0.0);
        assert_eq!(euclidean_distance(&n, &s), 2.0);
        assert!((euclidean_distance(&x, &y) - 1.4142136).abs() < 1e-7);
    }

    #[test]
    fn angle_codeword_examples() {
        let c = angles_to_codeword(SphericalAngles::new(0.0, 1.234).unwrap());
        assert_eq!(c.amplitudes(), [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);

        let c = angles_to_codeword(SphericalAngles::new(PI / 2.0, 0.0).unwrap());
        assert!((c.c0().re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((c.c1() - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);

        let c = angles_to_codeword(SphericalAngles::new(PI / 2.0, PI / 2.0).unwrap());
        assert!((c.c1() - Complex64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-12);
    }

    #[test]
    fn codeword_to_bloch_examples() {
        let (p, a) = codeword_to_bloch(&cw(1.0, Complex64::new(0.0, 0.0)));
        assert_eq!((p.x, p.y, p.z), (0.0, 0.0, 1.0));
        assert_eq!(a.theta, 0.0);

        let (p, a) = codeword_to_bloch(&cw(0.0, Complex64::new(1.0, 0.0)));
        assert_eq!(p.z, -1.0);
        assert_eq!((a.theta, a.phi), (PI, 0.0));

        let (p, a) = codeword_to_bloch(&cw(FRAC_1_SQRT_2, Complex64::new(0.0, FRAC_1_SQRT_2)));
        assert!(p.x.abs() < 1e-12 && (p.y - 1.0).abs() < 1e-12 && p.z.abs() < 1e-12);
        assert!((a.theta - PI / 2.0).abs() < 1e-12 && (a.phi - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn bloch_from_amplitudes_clamps_and_rejects() {
        let r = bloch_from_amplitudes(Complex64::new(1.0 + 1e-13, 0.0), Complex64::new(0.0, 0.0));
        assert!(r.is_ok());
        let r = bloch_from_amplitudes(Complex64::new(-1e-6, 0.0), Complex64::new(1.0, 0.0));
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn min_distance_and_errors() {
        let e0 = cw(1.0, Complex64::new(0.0, 0.0));
        let e1 = cw(0.0, Complex64::new(1.0, 0.0));
        assert_eq!(min_chordal_distance_of(&[e0, e1]).unwrap(), 1.0);
        assert!(min_chordal_distance_of(&[e0]).is_err());
        assert!(Constellation::new(Method::External, vec![e0, e0]).is_err());
        assert!(Constellation::new(Method::External, vec![e0, e1, e0]).is_err());
    }

    #[test]
    fn bound_values() {
        assert!((fejes_toth_bound(3).unwrap() - 0.8660254).abs() < 1e-7);
        assert!((fejes_toth_bound(4).unwrap() - 0.8164966).abs() < 1e-7);
        assert!((fejes_toth_bound(12).unwrap() - 0.5257311).abs() < 1e-7);
        assert!((fejes_toth_bound(16).unwrap() - 0.4606249308422566).abs() < 1e-12);
        assert!(matches!(fejes_toth_bound(2), Err(Error::Domain(_))));
        assert!(fejes_toth_bound(1).is_err());
    }

    #[test]
    fn normalize_examples() {
        let j = Complex64::new(0.0, 1.0);
        let z = normalize_received([j * 2.0, j * 2.0]).unwrap();
        assert!((z.c0().re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((z.c1() - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);

        let z = normalize_received([Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        assert_eq!(z.amplitudes(), [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);

        let z = normalize_received([Complex64::new(0.0, 0.0), j * 5.0]).unwrap();
        assert_eq!(z.amplitudes(), [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);

        let zero = Complex64::new(0.0, 0.0);
        assert!(matches!(normalize_received([zero, zero]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(-1e-300), 0.0);
        assert!((wrap_angle(-PI / 2.0) - 1.5 * PI).abs() < 1e-15);
        assert_eq!(wrap_angle(TAU), 0.0);
    }
}
